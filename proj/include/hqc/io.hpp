#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hqc {

struct TimeSeries;

// Number formatting used by every CSV writer: 12 significant digits, '.' decimal.
std::string format_number(double v);

// Minimal RFC-4180 table: a header row plus numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void write(std::ostream& out) const;
  std::string str() const;
};

// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

CsvTable to_table(const TimeSeries& series, const std::string& value_name = "value");

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Line plot with labeled axes; purely a convenience artifact.
std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& x_label,
                          const std::string& y_label, const std::string& title = "");

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace hqc
