// SPDX-License-Identifier: Apache-2.0
//
// Result containers and CSV / JSON / SVG emission for the CLI.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "covert/io.hpp"

namespace cli {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

/// Which table columns an SVG line chart should draw.
struct PlotSpec {
  std::string x;
  std::vector<std::string> y;
  std::string group;  // optional column splitting rows into separate series
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

struct CommandOutput {
  covert::Json summary = covert::Json::object();
  std::optional<Table> table;
  std::optional<PlotSpec> plot;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

std::string to_csv(const CommandOutput& out);
std::string to_json(const CommandOutput& out);
std::string to_svg(const Table& table, const PlotSpec& spec);

/// Chooses CSV or JSON from the extension and writes atomically.
void emit(const CommandOutput& out, const std::filesystem::path& path);

}  // namespace cli
