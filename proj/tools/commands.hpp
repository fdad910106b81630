// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "output.hpp"

namespace cli {

inline const std::vector<std::string> kCommands = {
    "beam-pattern", "kl",          "allocate",          "scaling",          "antenna-bound",
    "simulate-detector", "figure-nats-vs-na", "figure-nats-vs-n", "steer"};

/// Parses "start:stop:step" into an inclusive arithmetic ladder.
std::vector<std::int64_t> parse_linear_range(const std::string& spec);

/// Parses "start:stop:count" into count log-spaced integers (duplicates dropped).
std::vector<std::uint64_t> parse_log_range(const std::string& spec);

/// Parses "1,10,50".
std::vector<std::int64_t> parse_list(const std::string& spec);

/// Runs one subcommand on a merged configuration (file keys overridden by flags).
CommandOutput run_command(const std::string& command, const covert::Json& config);

}  // namespace cli
