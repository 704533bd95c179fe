#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "qualm/errors.hpp"

namespace qualm {

/// Doubles rendered with 17 significant digits so round-trips are exact.
std::string format_double(double v);

/// Comma-separated writer with a fixed header row.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    std::size_t width_;
};

void ensure_directory(const std::string& path);

}  // namespace qualm
