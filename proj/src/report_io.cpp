#include "berrylab/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "berrylab/error.hpp"
#include "berrylab/numerics.hpp"

namespace berrylab {

void write_table_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::io, "failed while writing '" + path + "'");
}

void write_table_csv(const Table& table, const std::string& path) {
  std::ostringstream buf;
  write_table_csv(table, buf);
  write_text_file(path, buf.str());
}

Table read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, "'" + path + "' is empty");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    t.rows.push_back(split(line));
  }
  return t;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_loglog_svg(const LogLogPlot& plot) {
  constexpr double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 50;
  std::vector<double> lx, ly, lo, hi;
  for (std::size_t i = 0; i < plot.x.size(); ++i) {
    if (!(plot.x[i] > 0.0) || !(plot.y[i] > 0.0)) continue;
    lx.push_back(std::log10(plot.x[i]));
    ly.push_back(std::log10(plot.y[i]));
    const bool bars = plot.y_low.size() == plot.x.size() && plot.y_high.size() == plot.x.size();
    lo.push_back(bars && plot.y_low[i] > 0.0 ? std::log10(plot.y_low[i]) : ly.back());
    hi.push_back(bars && plot.y_high[i] > 0.0 ? std::log10(plot.y_high[i]) : ly.back());
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!lx.empty()) {
    x0 = std::floor(*std::min_element(lx.begin(), lx.end()) * 2.0) / 2.0;
    x1 = std::ceil(*std::max_element(lx.begin(), lx.end()) * 2.0) / 2.0;
    y0 = std::floor(*std::min_element(lo.begin(), lo.end()) * 2.0) / 2.0;
    y1 = std::ceil(*std::max_element(hi.begin(), hi.end()) * 2.0) / 2.0;
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
  }
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double v) { return H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(plot.title) << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right
    << "\" height=\"" << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double v = x0; v <= x1 + 1e-9; v += 0.5) {
    s << "<line x1=\"" << num(px(v)) << "\" y1=\"" << H - bottom << "\" x2=\"" << num(px(v))
      << "\" y2=\"" << H - bottom + 5 << "\" stroke=\"black\"/>";
    s << "<text x=\"" << num(px(v)) << "\" y=\"" << H - bottom + 18
      << "\" text-anchor=\"middle\">" << format_double(std::pow(10.0, v)).substr(0, 6)
      << "</text>\n";
  }
  for (double v = y0; v <= y1 + 1e-9; v += 0.5) {
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << num(py(v)) << "\" x2=\"" << left
      << "\" y2=\"" << num(py(v)) << "\" stroke=\"black\"/>";
    s << "<text x=\"" << left - 8 << "\" y=\"" << num(py(v) + 4)
      << "\" text-anchor=\"end\">" << format_double(std::pow(10.0, v)).substr(0, 7)
      << "</text>\n";
  }
  s << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\">" << escape(plot.x_label) << " (log scale)</text>\n";
  s << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (top + H - bottom) / 2 << ")\">" << escape(plot.y_label) << " (log scale)</text>\n";
  if (plot.fit && !lx.empty()) {
    const auto [slope, intercept] = *plot.fit;
    // intercept is in natural-log units
    auto fy = [&](double v) { return (intercept + slope * v * std::log(10.0)) / std::log(10.0); };
    s << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(fy(x0))) << "\" x2=\"" << num(px(x1))
      << "\" y2=\"" << num(py(fy(x1))) << "\" stroke=\"#c33\" stroke-dasharray=\"6 4\"/>\n";
    s << "<text x=\"" << W - right - 8 << "\" y=\"" << top + 16
      << "\" text-anchor=\"end\" fill=\"#c33\">slope " << num(slope) << "</text>\n";
  }
  for (std::size_t i = 0; i < lx.size(); ++i) {
    if (hi[i] > lo[i])
      s << "<line x1=\"" << num(px(lx[i])) << "\" y1=\"" << num(py(lo[i])) << "\" x2=\""
        << num(px(lx[i])) << "\" y2=\"" << num(py(hi[i])) << "\" stroke=\"#236\"/>";
    s << "<circle cx=\"" << num(px(lx[i])) << "\" cy=\"" << num(py(ly[i]))
      << "\" r=\"4\" fill=\"#236\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace berrylab
