// SPDX-License-Identifier: Apache-2.0

#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace cli {

using covert::ErrorCode;
using covert::Json;

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  covert::require(it != columns.end(), ErrorCode::invalid_input, "no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string scalar_text(const Json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

std::string to_csv(const CommandOutput& out) {
  std::ostringstream s;
  if (out.table) {
    const Table& t = *out.table;
    for (std::size_t c = 0; c < t.columns.size(); ++c) s << (c ? "," : "") << t.columns[c];
    s << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) s << (c ? "," : "") << format_double(row[c]);
      s << '\n';
    }
    return s.str();
  }
  std::vector<std::pair<std::string, std::string>> cells;
  for (const auto& [key, value] : out.summary.items())
    if (value.is_primitive()) cells.emplace_back(key, scalar_text(value));
  for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i].first;
  s << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i].second;
  s << '\n';
  return s.str();
}

std::string to_json(const CommandOutput& out) {
  Json doc = out.summary;
  if (out.table) {
    Json rows = Json::array();
    for (const auto& row : out.table->rows) {
      Json r = Json::object();
      for (std::size_t c = 0; c < row.size(); ++c) r[out.table->columns[c]] = row[c];
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
  }
  return doc.dump(2) + "\n";
}

std::string to_svg(const Table& table, const PlotSpec& spec) {
  constexpr double width = 720.0, height = 440.0, margin = 60.0;
  const std::size_t xi = table.column(spec.x);
  std::vector<std::size_t> yi;
  for (const auto& y : spec.y) yi.push_back(table.column(y));
  const auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  const auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& row : table.rows) {
    if (!std::isfinite(tx(row[xi]))) continue;
    x0 = std::min(x0, tx(row[xi]));
    x1 = std::max(x1, tx(row[xi]));
    for (auto c : yi) {
      const double v = ty(row[c]);
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const auto px = [&](double v) { return margin + (tx(v) - x0) / (x1 - x0) * (width - 2 * margin); };
  const auto py = [&](double v) {
    return height - margin - (ty(v) - y0) / (y1 - y0) * (height - 2 * margin);
  };

  // Series keyed by (group value, y column).
  std::map<std::pair<double, std::size_t>, std::vector<std::pair<double, double>>> series;
  const bool grouped = !spec.group.empty();
  const std::size_t gi = grouped ? table.column(spec.group) : 0;
  for (const auto& row : table.rows)
    for (auto c : yi)
      if (std::isfinite(tx(row[xi])) && std::isfinite(ty(row[c])))
        series[{grouped ? row[gi] : 0.0, c}].emplace_back(px(row[xi]), py(row[c]));

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << spec.title << "</text>\n"
    << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
    << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
    << height - margin << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
    << (spec.log_x ? "log10 " : "") << spec.x << "</text>\n";
  const auto tick = [&](double v) { return format_double(std::round(v * 1000.0) / 1000.0); };
  s << "<text x=\"" << margin << "\" y=\"" << height - margin + 16 << "\" font-size=\"11\">"
    << tick(x0) << "</text>\n<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
    << "\" font-size=\"11\" text-anchor=\"end\">" << tick(x1) << "</text>\n"
    << "<text x=\"" << margin - 4 << "\" y=\"" << height - margin << "\" font-size=\"11\" "
    << "text-anchor=\"end\">" << tick(y0) << "</text>\n<text x=\"" << margin - 4 << "\" y=\""
    << margin + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << tick(y1) << "</text>\n";

  std::size_t index = 0;
  for (const auto& [key, pts] : series) {
    const char* colour = palette[index % std::size(palette)];
    s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) s << x << ',' << y << ' ';
    s << "\"/>\n";
    std::string label = table.columns[key.second];
    if (grouped) label += " (" + spec.group + "=" + format_double(key.first) + ")";
    s << "<text x=\"" << width - margin - 4 << "\" y=\"" << margin + 14.0 * static_cast<double>(index)
      << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << colour << "\">" << label
      << "</text>\n";
    ++index;
  }
  s << "</svg>\n";
  return s.str();
}

void emit(const CommandOutput& out, const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") {
    covert::write_atomically(path, to_csv(out));
  } else if (ext == ".json") {
    covert::write_atomically(path, to_json(out));
  } else {
    covert::fail(ErrorCode::invalid_input, "output must end in .csv or .json: " + path.string());
  }
}

}  // namespace cli
