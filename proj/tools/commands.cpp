// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "covert/allocation.hpp"
#include "covert/covertness.hpp"
#include "covert/detector.hpp"
#include "covert/scaling.hpp"

namespace cli {

using covert::ErrorCode;
using covert::Json;
using covert::require;

namespace {

template <class T>
T get(const Json& cfg, const char* key, T fallback) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    covert::fail(ErrorCode::invalid_input, std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const Json& cfg, const char* key) {
  require(cfg.contains(key), ErrorCode::invalid_input, std::string("missing key '") + key + "'");
  return get<T>(cfg, key, T{});
}

// Accepts 1e6-style numbers in integer fields.
std::uint64_t get_count(const Json& cfg, const char* key, std::uint64_t fallback) {
  const double v = get<double>(cfg, key, static_cast<double>(fallback));
  require(v >= 1.0 && v < 1.8e19 && std::floor(v) == v, ErrorCode::invalid_input,
          std::string("'") + key + "' must be a positive integer");
  return static_cast<std::uint64_t>(v);
}

const Json& scenario_doc(const Json& cfg) {
  return cfg.contains("scenario") ? cfg.at("scenario") : cfg;
}

covert::CovertBudget budget_of(const Json& cfg) {
  covert::CovertBudget b;
  b.blocklength = get_count(cfg, "n", 1);
  b.detection_level = get<double>(cfg, "delta", 0.1);
  b.validate();
  return b;
}

struct Resolved {
  covert::MimoScenario scenario;
  covert::EigenStructure eig;
  covert::CovertBudget budget;
  covert::PowerAllocation alloc;
  std::optional<covert::AllocationResult> optimum;
  std::string source;
};

Resolved resolve(const Json& cfg) {
  Resolved r;
  r.scenario = covert::scenario_from_json(scenario_doc(cfg));
  r.eig = covert::rotated_eigen(r.scenario);
  r.budget = budget_of(cfg);
  const Json spec = cfg.contains("allocation") ? cfg.at("allocation") : Json("optimal");
  if (spec.is_array()) {
    covert::RVector q(r.eig.n_a());
    require(spec.size() == static_cast<std::size_t>(q.size()), ErrorCode::invalid_input,
            "explicit allocation needs N_a entries");
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = spec.at(static_cast<std::size_t>(i)).get<double>();
    r.alloc = covert::PowerAllocation::from_directions(r.eig, q);
    r.source = "explicit";
    return r;
  }
  require(spec.is_string(), ErrorCode::invalid_input,
          "allocation must be \"optimal\", \"uniform\", \"zero\" or a list of powers");
  r.source = spec.get<std::string>();
  if (r.source == "optimal") {
    r.optimum = covert::optimize_covariance(r.eig, r.scenario, r.budget);
    r.alloc = r.optimum->allocation;
  } else if (r.source == "zero") {
    r.alloc = covert::PowerAllocation::zero(r.eig);
  } else if (r.source == "uniform") {
    covert::RVector q = covert::RVector::Zero(r.eig.n_a());
    const auto dims = std::max<Eigen::Index>(1, r.eig.dims());
    q.head(dims).setConstant(r.scenario.power_budget / static_cast<double>(dims));
    r.alloc = covert::PowerAllocation::from_directions(r.eig, q);
  } else {
    covert::fail(ErrorCode::invalid_input, "unknown allocation '" + r.source + "'");
  }
  return r;
}

Table direction_table(const Resolved& r) {
  Table t{{"direction", "lambda_b", "lambda_w_rotated", "q", "kl_term"}, {}};
  const covert::RVector terms = covert::kl_terms(r.alloc, r.eig, r.scenario.sigma_w2);
  for (Eigen::Index i = 0; i < r.eig.n_a(); ++i)
    t.rows.push_back({static_cast<double>(i), r.eig.lambda_b(i), r.eig.lambda_w_rotated(i),
                      r.alloc.per_direction(i), terms(i)});
  return t;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

CommandOutput beam_pattern(const Json& cfg) {
  const covert::ArrayGeometry geom = covert::geometry_from_json(cfg);
  const auto points = get_count(cfg, "points", 2001);
  require(points >= 2, ErrorCode::invalid_input, "points must be at least 2");
  const double lo = get<double>(cfg, "omega_min", -1.0);
  const double hi = get<double>(cfg, "omega_max", 1.0);
  CommandOutput out;
  out.summary["num_antennas"] = geom.num_antennas();
  out.summary["antenna_separation"] = geom.antenna_separation();
  out.summary["array_length"] = geom.array_length();
  Table t{{"omega", "gain"}, {}};
  const double span = static_cast<double>(points - 1);
  for (std::uint64_t i = 0; i < points; ++i) {
    // Endpoint-weighted form keeps grid points such as 0.5 exact.
    const double omega = (lo * (span - static_cast<double>(i)) + hi * static_cast<double>(i)) / span;
    t.rows.push_back({omega, covert::beam_gain(geom, omega)});
  }
  out.table = std::move(t);
  out.plot = PlotSpec{"omega", {"gain"}, "", false, false, "Transmit beam pattern |f(omega)|"};
  return out;
}

CommandOutput kl(const Json& cfg) {
  const Resolved r = resolve(cfg);
  const double single = covert::kl_single_letter(r.alloc, r.eig, r.scenario.sigma_w2);
  const double exact = covert::kl_gaussian(r.alloc.covariance, r.scenario.h_w, r.scenario.sigma_w2);
  const double total = covert::kl_n_letter(single, r.budget.blocklength);
  CommandOutput out;
  out.summary["allocation"] = r.source;
  out.summary["n"] = r.budget.blocklength;
  out.summary["delta"] = r.budget.detection_level;
  out.summary["kl_single_letter"] = single;
  out.summary["kl_gaussian"] = exact;
  out.summary["kl_n_letter"] = total;
  out.summary["kl_threshold"] = r.budget.kl_threshold();
  out.summary["pinsker_floor"] = covert::detection_lower_bound(total);
  out.summary["covert"] = single <= r.budget.kl_threshold();
  out.table = direction_table(r);
  return out;
}

CommandOutput allocate(const Json& cfg) {
  Json c = cfg;
  c["allocation"] = "optimal";
  const Resolved r = resolve(c);
  const covert::AllocationResult& a = *r.optimum;
  CommandOutput out;
  out.summary["n"] = r.budget.blocklength;
  out.summary["delta"] = r.budget.detection_level;
  out.summary["rate_nats"] = a.rate;
  out.summary["rate_logdet_nats"] = covert::rate_cc(r.scenario, a.allocation);
  out.summary["total_power"] = a.allocation.total_power();
  out.summary["kl_single_letter"] = a.kl_value;
  out.summary["kl_threshold"] = r.budget.kl_threshold();
  out.summary["mu"] = a.mu;
  out.summary["eta"] = number_or_null(a.eta);
  out.summary["eta_infinite"] = std::isinf(a.eta);
  out.summary["power_active"] = a.power_active;
  out.summary["kl_active"] = a.kl_active;
  out.summary["kkt_residual"] = a.kkt_residual;
  out.table = direction_table(r);
  return out;
}

CommandOutput scaling(const Json& cfg) {
  Json c = cfg;
  c["allocation"] = "optimal";
  const Resolved r = resolve(c);
  const bool real_input = get<bool>(cfg, "real_input", false);
  // Shares follow the optimizer while its KL constraint binds; otherwise uniform.
  covert::NormalizedShares shares;
  std::string share_source = "uniform";
  if (r.optimum->kl_active && r.optimum->kl_value > 0.0) {
    shares = covert::normalized_shares(r.alloc, r.eig, r.scenario.sigma_w2);
    share_source = "optimizer";
  } else {
    shares = covert::uniform_shares(r.eig);
  }
  const double sb = r.scenario.sigma_b2;
  const double sw = r.scenario.sigma_w2;
  const covert::ScalingResult l = covert::scaling_L(r.eig, shares, sb, sw, real_input);
  const covert::ScalingResult ls = covert::scaling_LS(r.eig, shares, sb, sw, real_input);

  CommandOutput out;
  out.summary["shares"] = share_source;
  out.summary["real_input"] = real_input;
  out.summary["L"] = l.total;
  out.summary["L_S"] = ls.total;
  out.summary["units"] = "sqrt(nats)";
  if (cfg.contains("lambda_hat")) {
    const covert::SpectralBound bound(get<double>(cfg, "lambda_hat", 0.0));
    const auto cl = covert::scaling_bounds_spectral(r.eig, shares, sb, bound, sw,
                                                    covert::ScalingKind::covert, real_input);
    const auto cs = covert::scaling_bounds_spectral(
        r.eig, shares, sb, bound, sw, covert::ScalingKind::covert_with_secrecy, real_input);
    out.summary["L_lower"] = cl.bounds->first;
    out.summary["L_upper"] = cl.bounds->second;
    out.summary["L_S_lower"] = cs.bounds->first;
    out.summary["L_S_upper"] = cs.bounds->second;
  }
  Table t{{"direction", "share", "lambda_b", "lambda_w_rotated", "L_term", "L_S_term"}, {}};
  for (Eigen::Index i = 0; i < l.per_direction.size(); ++i)
    t.rows.push_back({static_cast<double>(i), shares.c(i), r.eig.lambda_b(i),
                      r.eig.lambda_w_rotated(i), l.per_direction(i), ls.per_direction(i)});
  out.table = std::move(t);
  return out;
}

covert::LinkBudget link_of(const Json& cfg, std::int64_t n_w) {
  covert::LinkBudget link = covert::reference_link_budget(n_w);
  link.xi_b2 = get<double>(cfg, "xi_b2", link.xi_b2);
  link.xi_w2 = get<double>(cfg, "xi_w2", link.xi_w2);
  link.n_b = get<std::int64_t>(cfg, "n_b", link.n_b);
  link.bandwidth = get<double>(cfg, "bandwidth", link.bandwidth);
  if (cfg.contains("noise_dbm_hz"))
    link.noise_density_b = link.noise_density_w = covert::dbm_to_watts(get<double>(cfg, "noise_dbm_hz", 0.0));
  if (cfg.contains("power_dbm")) link.power = covert::dbm_to_watts(get<double>(cfg, "power_dbm", 0.0));
  link.omega_b = get<double>(cfg, "omega_b", link.omega_b);
  link.omega_w = get<double>(cfg, "omega_w", link.omega_w);
  return link;
}

std::vector<std::int64_t> willie_counts(const Json& cfg, std::vector<std::int64_t> fallback) {
  if (!cfg.contains("nw")) return fallback;
  const Json& v = cfg.at("nw");
  if (v.is_string()) return parse_list(v.get<std::string>());
  if (v.is_number_integer()) return {v.get<std::int64_t>()};
  return v.get<std::vector<std::int64_t>>();
}

covert::WillieLink willie_of(const covert::LinkBudget& link) {
  return covert::WillieLink{std::sqrt(link.xi_w2), link.n_w, link.noise_density_w * link.bandwidth};
}

CommandOutput antenna_bound(const Json& cfg) {
  const auto n_w = willie_counts(cfg, {10}).front();
  const covert::LinkBudget link = link_of(cfg, n_w);
  covert::CovertBudget budget;
  budget.blocklength = get_count(cfg, "n", 10000);
  budget.detection_level = get<double>(cfg, "delta", 1e-2);
  const double omega = link.omega_b - link.omega_w;
  const double sep = get<double>(cfg, "antenna_separation", covert::kReferenceSeparation);
  const covert::WillieLink willie = willie_of(link);

  CommandOutput out;
  out.summary["n_w"] = n_w;
  out.summary["omega"] = omega;
  out.summary["n"] = budget.blocklength;
  out.summary["delta"] = budget.detection_level;
  out.summary["kl_threshold"] = budget.kl_threshold();
  out.summary["min_antennas_fixed_separation"] =
      covert::min_antennas_fixed_separation(willie, sep, omega, budget, link.power);
  if (cfg.contains("num_antennas")) {
    const covert::ArrayGeometry geom = covert::geometry_from_json(
        cfg.contains("array_length") ? cfg : Json{{"num_antennas", cfg.at("num_antennas")},
                                                  {"antenna_separation", sep}});
    out.summary["array_length"] = geom.array_length();
    out.summary["bound_fixed_length"] =
        covert::min_antennas_bound(willie, geom, omega, budget, link.power);
    out.summary["min_antennas_fixed_length"] =
        covert::min_antennas(willie, geom, omega, budget, link.power);
  }
  return out;
}

CommandOutput simulate_detector(const Json& cfg) {
  const Resolved r = resolve(cfg);
  const auto trials = get_count(cfg, "trials", 100000);
  const auto seed = get<std::uint64_t>(cfg, "seed", 0);
  covert::MonteCarloOptions options;
  options.per_symbol = get<bool>(cfg, "per_symbol", false);
  const auto mc = covert::monte_carlo_detection(r.scenario, r.alloc, r.budget.blocklength, trials,
                                                seed, options);
  const double single = covert::kl_single_letter(r.alloc, r.eig, r.scenario.sigma_w2);
  CommandOutput out;
  out.summary["allocation"] = r.source;
  out.summary["n"] = r.budget.blocklength;
  out.summary["trials"] = trials;
  out.summary["seed"] = seed;
  out.summary["alpha"] = mc.alpha;
  out.summary["beta"] = mc.beta;
  out.summary["threshold"] = mc.threshold;
  out.summary["error_sum"] = mc.error_sum;
  out.summary["confidence_halfwidth"] = mc.confidence_halfwidth;
  out.summary["pinsker_floor"] = mc.pinsker_floor;
  out.summary["pinsker_floor_single_letter"] =
      covert::detection_lower_bound(covert::kl_n_letter(single, r.budget.blocklength));
  try {
    const auto exact = covert::exact_error_sum(r.scenario, r.alloc, r.budget.blocklength);
    out.summary["exact_error_sum"] = exact.error_sum;
    out.summary["exact_threshold"] = exact.threshold;
  } catch (const covert::Error& e) {
    if (e.code() != ErrorCode::unsupported_case) throw;
    out.summary["exact_error_sum"] = nullptr;
  }
  return out;
}

CommandOutput figure_nats_vs_na(const Json& cfg) {
  const auto counts = parse_linear_range(get<std::string>(cfg, "na_range", "1000000:600000000:1000000"));
  const auto willies = willie_counts(cfg, {1, 10, 50});
  const auto n = get_count(cfg, "n", 10000);
  const double delta = get<double>(cfg, "delta", 1e-2);
  const double sep = get<double>(cfg, "antenna_separation", covert::kReferenceSeparation);
  CommandOutput out;
  out.summary["n"] = n;
  out.summary["delta"] = delta;
  out.summary["antenna_separation"] = sep;
  Json bounds = Json::object();
  Table t{{"n_w", "n_a", "covert_nats", "noncovert_nats", "ratio"}, {}};
  for (const auto n_w : willies) {
    const covert::LinkBudget link = link_of(cfg, n_w);
    bounds[std::to_string(n_w)] = covert::min_antennas_fixed_separation(
        willie_of(link), sep, link.omega_b - link.omega_w, covert::CovertBudget{n, delta}, link.power);
    for (const auto n_a : counts) {
      const auto pair = covert::covert_nats_firstorder(covert::ArrayGeometry(n_a, sep), link, n, delta);
      t.rows.push_back({static_cast<double>(n_w), static_cast<double>(n_a), pair.covert_nats,
                        pair.noncovert_nats, pair.covert_nats / pair.noncovert_nats});
    }
  }
  out.summary["min_antennas"] = std::move(bounds);
  out.table = std::move(t);
  out.plot = PlotSpec{"n_a", {"covert_nats", "noncovert_nats"}, "n_w", true, true,
                      "Covert and non-covert nats vs transmit antennas"};
  return out;
}

CommandOutput figure_nats_vs_n(const Json& cfg) {
  const auto lengths = parse_log_range(get<std::string>(cfg, "n_range", "1e4:1e8:41"));
  std::vector<std::int64_t> arrays = {10, 100};
  if (cfg.contains("na_list")) arrays = cfg.at("na_list").get<std::vector<std::int64_t>>();
  const auto n_w = willie_counts(cfg, {10}).front();
  const double delta = get<double>(cfg, "delta", 1e-2);
  const double sep = get<double>(cfg, "antenna_separation", covert::kReferenceSeparation);
  const covert::LinkBudget link = link_of(cfg, n_w);
  CommandOutput out;
  out.summary["n_w"] = n_w;
  out.summary["delta"] = delta;
  Table t{{"n_a", "n", "covert_nats", "noncovert_nats"}, {}};
  for (const auto n_a : arrays) {
    for (const auto n : lengths) {
      const auto pair = covert::covert_nats_firstorder(covert::ArrayGeometry(n_a, sep), link, n, delta);
      t.rows.push_back({static_cast<double>(n_a), static_cast<double>(n), pair.covert_nats,
                        pair.noncovert_nats});
    }
  }
  out.table = std::move(t);
  out.plot = PlotSpec{"n", {"covert_nats", "noncovert_nats"}, "n_a", true, true,
                      "Covert and non-covert nats vs channel uses"};
  return out;
}

CommandOutput steer(const Json& cfg) {
  const covert::ArrayGeometry geom = covert::geometry_from_json(cfg);
  const double omega_b = get_required<double>(cfg, "omega_b");
  const double omega_w = get_required<double>(cfg, "omega_w");
  const double lambda_w = get<double>(cfg, "lambda_w", 1.0);
  const double lambda_b = get<double>(cfg, "lambda_b", 1.0);
  const double sigma_w2 = get<double>(cfg, "sigma_w2", 1.0);
  const double sigma_b2 = get<double>(cfg, "sigma_b2", 1.0);
  const double power = get<double>(cfg, "power", 1.0);
  const covert::CovertBudget budget = budget_of(cfg);
  const auto s = covert::steer_direction(geom, omega_b, omega_w, lambda_w, sigma_w2, power, budget);
  CommandOutput out;
  out.summary["omega"] = s.omega;
  out.summary["bob_gain"] = s.bob_gain;
  out.summary["willie_gain"] = s.willie_gain;
  out.summary["rate_nats"] = std::log1p(power * lambda_b * s.bob_gain * s.bob_gain / sigma_b2);
  out.summary["kl_single_letter"] =
      covert::kl_term(power * lambda_w * s.willie_gain * s.willie_gain / sigma_w2);
  out.summary["kl_threshold"] = budget.kl_threshold();
  if (geom.num_antennas() >= 2) {
    const auto null = covert::null_steer_index(geom, omega_b, omega_w, power, lambda_b, sigma_b2);
    out.summary["null_k"] = null.k;
    out.summary["null_omega"] = null.omega;
    out.summary["null_bob_gain"] = null.bob_gain;
    out.summary["null_rate_nats"] = null.rate;
  }
  return out;
}

double parse_number(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  covert::fail(ErrorCode::invalid_input, "bad number '" + text + "' in '" + spec + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, sep);) parts.push_back(part);
  return parts;
}

std::int64_t as_integer(double v, const std::string& spec) {
  require(std::floor(v) == v && std::abs(v) < 9e18, ErrorCode::invalid_input,
          "range '" + spec + "' must contain integers");
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::vector<std::int64_t> parse_linear_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  require(parts.size() == 3, ErrorCode::invalid_input, "range must be start:stop:step");
  const auto start = as_integer(parse_number(parts[0], spec), spec);
  const auto stop = as_integer(parse_number(parts[1], spec), spec);
  const auto step = as_integer(parse_number(parts[2], spec), spec);
  require(start >= 1 && stop >= start && step >= 1, ErrorCode::invalid_input,
          "range needs 1 <= start <= stop and step >= 1");
  require((stop - start) / step < 10000000, ErrorCode::invalid_input, "range is too long");
  std::vector<std::int64_t> out;
  for (std::int64_t v = start; v <= stop; v += step) out.push_back(v);
  return out;
}

std::vector<std::uint64_t> parse_log_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  require(parts.size() == 3, ErrorCode::invalid_input, "log range must be start:stop:count");
  const double start = parse_number(parts[0], spec);
  const double stop = parse_number(parts[1], spec);
  const auto count = as_integer(parse_number(parts[2], spec), spec);
  require(start >= 1.0 && stop >= start && stop < 1.8e19 && count >= 1, ErrorCode::invalid_input,
          "log range needs 1 <= start <= stop and count >= 1");
  std::vector<std::uint64_t> out;
  for (std::int64_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    const auto v = static_cast<std::uint64_t>(
        std::llround(std::pow(10.0, std::log10(start) + t * (std::log10(stop) - std::log10(start)))));
    if (out.empty() || v != out.back()) out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> parse_list(const std::string& spec) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(spec, ',')) out.push_back(as_integer(parse_number(part, spec), spec));
  require(!out.empty(), ErrorCode::invalid_input, "empty list");
  for (auto v : out) require(v >= 1, ErrorCode::invalid_input, "list entries must be positive");
  return out;
}

CommandOutput run_command(const std::string& command, const Json& config) {
  static const std::map<std::string, std::function<CommandOutput(const Json&)>> table = {
      {"beam-pattern", beam_pattern},
      {"kl", kl},
      {"allocate", allocate},
      {"scaling", scaling},
      {"antenna-bound", antenna_bound},
      {"simulate-detector", simulate_detector},
      {"figure-nats-vs-na", figure_nats_vs_na},
      {"figure-nats-vs-n", figure_nats_vs_n},
      {"steer", steer},
  };
  const auto it = table.find(command);
  require(it != table.end(), ErrorCode::invalid_input, "unknown command '" + command + "'");
  return it->second(config);
}

}  // namespace cli
