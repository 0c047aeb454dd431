// SPDX-License-Identifier: Apache-2.0
#include "starris/harness/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace starris::harness {

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

void CsvWriter::header(const std::vector<std::string>& columns) {
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path_);
  out << buffer_;
  closed_ = true;
}

void ensure_directory(const std::string& path) {
  std::filesystem::create_directories(path);
}

namespace {

struct Range {
  double lo = 0, hi = 1;
  void expand(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span() const { return hi - lo > 0 ? hi - lo : 1.0; }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
  const int w = 720, h = 480;
  const int ml = 70, mr = 170, mt = 40, mb = 50;
  Range rx, ry;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        rx = {s.x[i], s.x[i]};
        ry = {s.y[i], s.y[i]};
        first = false;
      }
      rx.expand(s.x[i]);
      ry.expand(s.y[i]);
    }
  auto px = [&](double x) {
    return ml + (x - rx.lo) / rx.span() * (w - ml - mr);
  };
  auto py = [&](double y) {
    return h - mb - (y - ry.lo) / ry.span() * (h - mt - mb);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' "
      << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";
  // axes
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
      << "' y2='" << h - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << h - mb << "' stroke='black'/>\n";
  out << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
      << x_label << "</text>\n";
  out << "<text x='16' y='" << (mt + h - mb) / 2
      << "' font-family='sans-serif' font-size='12' transform='rotate(-90 16 "
      << (mt + h - mb) / 2 << ")' text-anchor='middle'>" << y_label
      << "</text>\n";
  // tick labels at the corners of the data range
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", rx.lo);
  out << "<text x='" << ml << "' y='" << h - mb + 16
      << "' font-family='sans-serif' font-size='10'>" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.4g", rx.hi);
  out << "<text x='" << w - mr << "' y='" << h - mb + 16
      << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << buf
      << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.4g", ry.lo);
  out << "<text x='" << ml - 6 << "' y='" << h - mb
      << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << buf
      << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.4g", ry.hi);
  out << "<text x='" << ml - 6 << "' y='" << mt + 4
      << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << buf
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
    if (!s.points_only && s.x.size() > 1) {
      out << "<polyline fill='none' stroke='" << color
          << "' stroke-width='1.5' points='";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      out << "'/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
          << "' r='2.5' fill='" << color << "'/>\n";
    // legend
    const int ly = mt + 18 * static_cast<int>(si);
    out << "<rect x='" << w - mr + 10 << "' y='" << ly << "' width='12' "
        << "height='12' fill='" << color << "'/>\n";
    out << "<text x='" << w - mr + 28 << "' y='" << ly + 10
        << "' font-family='sans-serif' font-size='11'>" << s.label
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace starris::harness
