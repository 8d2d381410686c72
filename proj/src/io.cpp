#include "hqc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hqc/dynamics.hpp"

namespace hqc {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << csv_field(header[k]);
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << "\r\n";
  }
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

CsvTable to_table(const TimeSeries& series, const std::string& value_name) {
  CsvTable t;
  t.header = {"Jt", value_name};
  if (series.std) t.header.push_back(value_name + "_std");
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    std::vector<double> row = {series.times[k], series.values[k]};
    if (series.std) row.push_back((*series.std)[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& x_label, const std::string& y_label,
                          const std::string& title) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double x : s.x) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    for (double y : s.y) {
      if (std::isfinite(y)) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
       << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
       << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"13\" text-anchor=\"middle\">"
     << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
  if (!title.empty()) {
    os << "<text x=\"" << W / 2 << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">" << title << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k) {
      if (!std::isfinite(series[s].y[k])) continue;
      os << px(series[s].x[k]) << "," << py(series[s].y[k]) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
       << c << "\">" << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

}  // namespace hqc
