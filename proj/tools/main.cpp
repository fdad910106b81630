// SPDX-License-Identifier: Apache-2.0
//
// covert-mimo: command-line front end. Flags override keys of the --config
// JSON document; results go to --out (.csv or .json) or to stdout as JSON.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string svg;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string na_range;
  std::string n_range;
  std::string nw;
  bool real_input = false;
};

void print_error(std::string_view code, const std::string& message) {
  covert::Json err;
  err["error"] = code;
  err["message"] = message;
  std::cerr << err.dump() << '\n';
}

covert::Json merged_config(const Flags& f) {
  covert::Json cfg = f.config.empty() ? covert::Json::object() : covert::read_json_file(f.config);
  covert::require(cfg.is_object(), covert::ErrorCode::invalid_input, "config must be a JSON object");
  if (f.seed) cfg["seed"] = *f.seed;
  if (f.trials) cfg["trials"] = *f.trials;
  if (!f.na_range.empty()) cfg["na_range"] = f.na_range;
  if (!f.n_range.empty()) cfg["n_range"] = f.n_range;
  if (!f.nw.empty()) cfg["nw"] = f.nw;
  if (f.real_input) cfg["real_input"] = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert communication over MIMO AWGN channels"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& name : cli::kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config, "JSON configuration file");
    sub->add_option("--out", flags.out, "output file (.csv or .json)");
    sub->add_option("--svg", flags.svg, "optional SVG chart for tabular results");
    sub->add_option("--seed", flags.seed, "Monte Carlo seed");
    sub->add_option("--trials", flags.trials, "Monte Carlo trials");
    sub->add_option("--na-range", flags.na_range, "transmit antennas start:stop:step");
    sub->add_option("--n-range", flags.n_range, "blocklengths start:stop:count, log-spaced");
    sub->add_option("--nw", flags.nw, "Willie antenna counts, comma separated");
    sub->add_flag("--real-input", flags.real_input, "real-channel scaling convention");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const cli::CommandOutput result = cli::run_command(command, merged_config(flags));
    if (flags.out.empty()) {
      std::cout << cli::to_json(result);
    } else {
      cli::emit(result, flags.out);
    }
    if (!flags.svg.empty()) {
      covert::require(result.table && result.plot, covert::ErrorCode::invalid_input,
                      command + " has no chart to render");
      covert::write_atomically(flags.svg, cli::to_svg(*result.table, *result.plot));
    }
  } catch (const covert::Error& e) {
    print_error(covert::to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
