#pragma once
#include <string>
#include <vector>

#include "corrcam/image.hpp"

namespace corrcam {

// Comma-separated numeric matrices, one image row per line, %.17g precision
// (round-trips doubles exactly).  "nan" is a legal cell.
void write_csv(const std::string& path, const Image2D<double>& im);
Image2D<double> read_csv_image(const std::string& path);

// Ragged variant for small tables (scaling points etc.); '#' lines skipped.
std::vector<std::vector<double>> read_csv_rows(const std::string& path);
void write_csv_rows(const std::string& path, const std::vector<std::vector<double>>& rows,
                    const std::string& header = "");

} // namespace corrcam
