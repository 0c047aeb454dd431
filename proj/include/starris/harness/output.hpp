// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace starris::harness {

// Deterministic CSV writing: fixed "%.12g" formatting, caller-ordered rows,
// one header row naming units.
class CsvWriter {
 public:
  explicit CsvWriter(std::string path);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void close();
  const std::string& path() const { return path_; }

  static std::string num(double v);
  static std::string num(int v);

 private:
  std::string path_;
  std::string buffer_;
  bool closed_ = false;
};

// Minimal vector-graphic line/scatter plots; a convenience layer over the
// CSVs, never the source of truth.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool points_only = false;
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

void ensure_directory(const std::string& path);

}  // namespace starris::harness
