#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace berrylab {

/// A CSV table with pre-formatted cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Header line plus one line per row; identical tables give identical bytes.
void write_table_csv(const Table& table, std::ostream& out);
void write_table_csv(const Table& table, const std::string& path);

/// Reads a CSV written by write_table_csv (no quoting).
Table read_table_csv(const std::string& path);

/// Writes text to a file, creating parent directories; io error on failure.
void write_text_file(const std::string& path, const std::string& text);

struct LogLogPlot {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_low;   // optional error bars
  std::vector<double> y_high;
  /// Fitted line log y = intercept + slope log x, if any.
  std::optional<std::pair<double, double>> fit;  // (slope, intercept)
};

/// Static SVG with log-scaled axes; points with positive y only.
std::string render_loglog_svg(const LogLogPlot& plot);

}  // namespace berrylab
