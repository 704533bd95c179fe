#pragma once

#include "qualm/linalg.hpp"
#include "qualm/rng.hpp"

namespace qualm {

/// Haar-distributed U(D): QR of a complex Ginibre matrix with the R diagonal
/// normalized to positive reals. The normalization makes the factorization
/// unique, so the distribution is exactly Haar rather than QR-convention
/// dependent.
ComplexMatrix sample_haar_unitary(int dim, SeededStream& rng);

/// Haar O(D): real Ginibre + QR with positive diagonal. Entries are real.
ComplexMatrix sample_haar_orthogonal(int dim, SeededStream& rng);

/// Haar Sp(halfD) as 2*halfD x 2*halfD complex matrices satisfying
/// S J S^T = J with the block form J = [[0, I], [-I, 0]]. Sampled by
/// quaternionic Gram-Schmidt of a quaternion Ginibre matrix, so the
/// constraint holds structurally.
ComplexMatrix sample_haar_symplectic(int halfD, SeededStream& rng);

/// The canonical antisymmetric form [[0, I], [-I, 0]], exact integers.
ComplexMatrix canonical_J(int halfD);

}  // namespace qualm
