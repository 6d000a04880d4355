#include "beamtrack/harness.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "beamtrack/indivpower.hpp"
#include "beamtrack/kalman.hpp"
#include "beamtrack/outage.hpp"
#include "beamtrack/sumpower.hpp"

namespace beamtrack {

namespace {

using nlohmann::json;

/// Stream tag for network/channel draws that must not collide with the
/// per-realization substreams (which use small indices).
constexpr std::uint64_t kNetworkStreamTag = 0x9E3779B97F4A7C15ULL;

struct Accumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  long n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(n) * m * m) /
                          static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string power_suffix(double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

std::vector<ConstraintMode> modes_of(ConstraintMode m) {
  if (m == ConstraintMode::All)
    return {ConstraintMode::Sum, ConstraintMode::Individual,
            ConstraintMode::EqualPower};
  return {m};
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     if (a.param != b.param) return a.param < b.param;
                     return a.method < b.method;
                   });
}

int single_sensor_count(const ExperimentConfig& cfg, const char* what) {
  if (cfg.n_sensors.size() != 1)
    throw std::invalid_argument(std::string("config: ") + what +
                                " needs exactly one n_sensors value, got " +
                                std::to_string(cfg.n_sensors.size()));
  return cfg.n_sensors.front();
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::MseVsSensors: return "mse_vs_sensors";
    case Experiment::OutageVsPower: return "outage_vs_power";
    case Experiment::TrackingTrace: return "tracking_trace";
  }
  return "?";
}

std::string to_string(ConstraintMode m) {
  switch (m) {
    case ConstraintMode::Sum: return "sum";
    case ConstraintMode::Individual: return "individual";
    case ConstraintMode::EqualPower: return "equal";
    case ConstraintMode::All: return "all";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  if (s == "mse_vs_sensors") return Experiment::MseVsSensors;
  if (s == "outage_vs_power") return Experiment::OutageVsPower;
  if (s == "tracking_trace") return Experiment::TrackingTrace;
  throw std::invalid_argument("config: unknown experiment '" + s + "'");
}

ConstraintMode constraint_mode_from_string(const std::string& s) {
  if (s == "sum") return ConstraintMode::Sum;
  if (s == "individual") return ConstraintMode::Individual;
  if (s == "equal") return ConstraintMode::EqualPower;
  if (s == "all") return ConstraintMode::All;
  throw std::invalid_argument("config: unknown constraint_mode '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (n_sensors.empty())
    throw std::invalid_argument("config: n_sensors must be non-empty");
  for (int n : n_sensors)
    if (n < 1) throw std::invalid_argument("config: n_sensors entries must be >= 1");
  if (p_max.empty())
    throw std::invalid_argument("config: p_max must be non-empty");
  for (double p : p_max)
    if (!(p > 0.0)) throw std::invalid_argument("config: p_max entries must be > 0");
  if (realizations < 1)
    throw std::invalid_argument("config: realizations must be >= 1");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
  if (!(distance_range[0] > 0.0) || distance_range[0] > distance_range[1])
    throw std::invalid_argument("config: bad distance_range");
  if (sigma_v2_range[0] < 0.0 || sigma_v2_range[0] > sigma_v2_range[1])
    throw std::invalid_argument("config: bad sigma_v2_range");
  if (!(sigma_v2_floor > 0.0))
    throw std::invalid_argument("config: sigma_v2_floor must be > 0");
  if (!(sigma_w2 > 0.0)) throw std::invalid_argument("config: sigma_w2 must be > 0");
  if (!(sigma_theta2 > 0.0))
    throw std::invalid_argument("config: sigma_theta2 must be > 0");
  if (!(std::abs(alpha) < 1.0))
    throw std::invalid_argument("config: |alpha| must be < 1");
  if (gamma < 0.0) throw std::invalid_argument("config: gamma must be >= 0");
  if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::MseVsSensors:
      for (int n = 2; n <= 20; ++n) cfg.n_sensors.push_back(n);
      cfg.p_max = {300.0, 3000.0};
      break;
    case Experiment::OutageVsPower:
      cfg.n_sensors = {10};
      for (int k = 1; k <= 10; ++k) cfg.p_max.push_back(100.0 * k);
      break;
    case Experiment::TrackingTrace:
      cfg.n_sensors = {10};
      cfg.p_max = {300.0};
      cfg.trials = 10000;
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config: top level must be a JSON object");

  Experiment exp = Experiment::MseVsSensors;
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string())
      throw std::invalid_argument("config: bad value for key 'experiment'");
    exp = experiment_from_string(j["experiment"].get<std::string>());
  }
  ExperimentConfig cfg = default_config(exp);

  auto bad = [](const std::string& key) {
    return std::invalid_argument("config: bad value for key '" + key + "'");
  };
  auto get_double = [&](const json& v, const std::string& key) {
    if (!v.is_number()) throw bad(key);
    return v.get<double>();
  };
  auto get_range = [&](const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2) throw bad(key);
    return std::array<double, 2>{get_double(v[0], key), get_double(v[1], key)};
  };

  bool have_seed = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") {
      // handled above
    } else if (key == "n_sensors") {
      cfg.n_sensors.clear();
      if (value.is_number_integer()) {
        cfg.n_sensors.push_back(value.get<int>());
      } else if (value.is_array()) {
        for (const auto& v : value) {
          if (!v.is_number_integer()) throw bad(key);
          cfg.n_sensors.push_back(v.get<int>());
        }
      } else {
        throw bad(key);
      }
    } else if (key == "p_max") {
      cfg.p_max.clear();
      if (value.is_number()) {
        cfg.p_max.push_back(value.get<double>());
      } else if (value.is_array()) {
        for (const auto& v : value) cfg.p_max.push_back(get_double(v, key));
      } else {
        throw bad(key);
      }
    } else if (key == "constraint_mode") {
      if (!value.is_string()) throw bad(key);
      cfg.constraint_mode =
          constraint_mode_from_string(value.get<std::string>());
    } else if (key == "realizations") {
      if (!value.is_number_integer()) throw bad(key);
      cfg.realizations = value.get<int>();
    } else if (key == "trials") {
      if (!value.is_number_integer()) throw bad(key);
      cfg.trials = value.get<long>();
    } else if (key == "epsilon") {
      cfg.epsilon = get_double(value, key);
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer())
        throw bad(key);
      cfg.seed = value.get<std::uint64_t>();
      have_seed = true;
    } else if (key == "distance_range") {
      cfg.distance_range = get_range(value, key);
    } else if (key == "sigma_v2_range") {
      cfg.sigma_v2_range = get_range(value, key);
    } else if (key == "sigma_v2_floor") {
      cfg.sigma_v2_floor = get_double(value, key);
    } else if (key == "sigma_w2") {
      cfg.sigma_w2 = get_double(value, key);
    } else if (key == "sigma_theta2") {
      cfg.sigma_theta2 = get_double(value, key);
    } else if (key == "alpha") {
      cfg.alpha = get_double(value, key);
    } else if (key == "gamma") {
      cfg.gamma = get_double(value, key);
    } else if (key == "steps") {
      if (!value.is_number_integer()) throw bad(key);
      cfg.steps = value.get<int>();
    } else if (key == "output_path") {
      if (!value.is_string()) throw bad(key);
      cfg.output_path = value.get<std::string>();
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!have_seed)
    throw std::invalid_argument(
        "config: missing required key 'seed' (runs must be reproducible)");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["n_sensors"] = cfg.n_sensors;
  j["p_max"] = cfg.p_max;
  j["constraint_mode"] = to_string(cfg.constraint_mode);
  j["realizations"] = cfg.realizations;
  j["trials"] = cfg.trials;
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.seed;
  j["distance_range"] = cfg.distance_range;
  j["sigma_v2_range"] = cfg.sigma_v2_range;
  j["sigma_v2_floor"] = cfg.sigma_v2_floor;
  j["sigma_w2"] = cfg.sigma_w2;
  j["sigma_theta2"] = cfg.sigma_theta2;
  j["alpha"] = cfg.alpha;
  j["gamma"] = cfg.gamma;
  j["steps"] = cfg.steps;
  j["output_path"] = cfg.output_path;
  return j.dump(2) + "\n";
}

SensorNetwork draw_network(int n_sensors, const ExperimentConfig& cfg,
                           Rng& rng) {
  SensorNetwork net;
  net.distances.resize(n_sensors);
  net.sigma_v2.resize(n_sensors);
  net.gamma = cfg.gamma;
  net.sigma_w2 = cfg.sigma_w2;
  for (int i = 0; i < n_sensors; ++i)
    net.distances[i] = rng.uniform(cfg.distance_range[0], cfg.distance_range[1]);
  for (int i = 0; i < n_sensors; ++i) {
    const double raw = rng.uniform(cfg.sigma_v2_range[0], cfg.sigma_v2_range[1]);
    net.sigma_v2[i] =
        std::clamp(raw, cfg.sigma_v2_floor, cfg.sigma_v2_range[1]);
  }
  return net;
}

std::vector<ResultRow> run_mse_vs_sensors(const ExperimentConfig& cfg) {
  cfg.validate();
  const Rng master(cfg.seed);
  const auto modes = modes_of(cfg.constraint_mode);
  std::vector<ResultRow> rows;
  long individual_failures = 0;

  for (int n : cfg.n_sensors) {
    // accumulators per (p_max index, method label)
    std::vector<std::vector<Accumulator>> acc(
        cfg.p_max.size(), std::vector<Accumulator>(modes.size() + 1));
    for (int r = 0; r < cfg.realizations; ++r) {
      Rng rng = master.substream(static_cast<std::uint64_t>(r));
      const SensorNetwork net = draw_network(n, cfg, rng);
      const ChannelRealization ch = sample_channel(net, rng);
      const double p_pred = cfg.sigma_theta2;  // single update from the prior
      for (size_t pi = 0; pi < cfg.p_max.size(); ++pi) {
        const double p = cfg.p_max[pi];
        const SumPowerInstance inst =
            make_sum_power_instance(ch, net, cfg.sigma_theta2, p);
        for (size_t mi = 0; mi < modes.size(); ++mi) {
          switch (modes[mi]) {
            case ConstraintMode::Sum:
              acc[pi][mi].add(posterior_mse(p_pred, optimal_snr_sum(inst)));
              break;
            case ConstraintMode::Individual: {
              const Eigen::VectorXd p_each =
                  Eigen::VectorXd::Constant(n, p / n);
              try {
                const IndividualSolution sol =
                    solve_individual(lift(ch, net, cfg.sigma_theta2, p_each));
                acc[pi][mi].add(
                    posterior_mse(p_pred, snr_objective(sol.gain, inst)));
              } catch (const std::exception&) {
                ++individual_failures;
              }
              break;
            }
            case ConstraintMode::EqualPower: {
              const GainVector ae =
                  equal_power_gain(net, cfg.sigma_theta2, p);
              acc[pi][mi].add(posterior_mse(p_pred, snr_objective(ae, inst)));
              break;
            }
            case ConstraintMode::All:
              break;  // expanded earlier
          }
        }
        acc[pi][modes.size()].add(mse_lower_bound(p_pred, net));
      }
    }
    for (size_t pi = 0; pi < cfg.p_max.size(); ++pi) {
      const std::string suffix = "_P" + power_suffix(cfg.p_max[pi]);
      for (size_t mi = 0; mi <= modes.size(); ++mi) {
        const std::string base =
            mi < modes.size() ? to_string(modes[mi]) : "lower_bound";
        const Accumulator& a = acc[pi][mi];
        rows.push_back({to_string(cfg.experiment), static_cast<double>(n),
                        base + suffix, a.mean(), a.std_error(), a.n,
                        cfg.seed});
      }
    }
  }
  if (individual_failures > 0)
    std::cerr << "warning: individual-power solve failed on "
              << individual_failures << " realizations (rows use the rest)\n";
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_outage_vs_power(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n = single_sensor_count(cfg, "outage_vs_power");
  const Rng master(cfg.seed);
  Rng net_rng = master.substream(kNetworkStreamTag);
  const SensorNetwork net = draw_network(n, cfg, net_rng);
  const double p_pred = cfg.sigma_theta2;  // prediction MSE at the prior

  std::vector<ResultRow> rows;
  for (double p : cfg.p_max) {
    const OutageInstance inst =
        make_outage_instance(net, cfg.sigma_theta2, p, p_pred, cfg.epsilon);
    const double theory = outage_probability(inst);
    const double emp = empirical_outage(inst, cfg.trials, master);
    const double se = std::sqrt(std::max(0.0, emp * (1.0 - emp)) /
                                static_cast<double>(cfg.trials));
    rows.push_back({to_string(cfg.experiment), p, "theory", theory, 0.0, 0,
                    cfg.seed});
    rows.push_back({to_string(cfg.experiment), p, "empirical", emp, se,
                    cfg.trials, cfg.seed});
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_tracking_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n = single_sensor_count(cfg, "tracking_trace");
  if (cfg.p_max.size() != 1)
    throw std::invalid_argument(
        "config: tracking_trace needs exactly one p_max value");
  const double p = cfg.p_max.front();
  const int steps = cfg.steps;
  const ProcessModel model =
      ProcessModel::stationary(cfg.alpha, cfg.sigma_theta2);
  const Rng master(cfg.seed);

  // One network and one channel sequence, shared by every trial and mode.
  Rng net_rng = master.substream(kNetworkStreamTag);
  const SensorNetwork net = draw_network(n, cfg, net_rng);
  std::vector<ChannelRealization> channels;
  channels.reserve(steps);
  for (int t = 0; t < steps; ++t) channels.push_back(sample_channel(net, net_rng));

  const auto modes = modes_of(cfg.constraint_mode);
  const size_t nm = modes.size();

  // Per-step gains depend only on the channel, so compute them once.
  std::vector<std::vector<GainVector>> gains(nm);
  for (size_t mi = 0; mi < nm; ++mi) {
    gains[mi].reserve(steps);
    for (int t = 0; t < steps; ++t) {
      const SumPowerInstance inst =
          make_sum_power_instance(channels[t], net, cfg.sigma_theta2, p);
      switch (modes[mi]) {
        case ConstraintMode::Sum:
          gains[mi].push_back(optimal_gain_sum(inst));
          break;
        case ConstraintMode::Individual: {
          const Eigen::VectorXd p_each = Eigen::VectorXd::Constant(n, p / n);
          gains[mi].push_back(
              solve_individual(lift(channels[t], net, cfg.sigma_theta2, p_each))
                  .gain);
          break;
        }
        case ConstraintMode::EqualPower:
          gains[mi].push_back(equal_power_gain(net, cfg.sigma_theta2, p));
          break;
        case ConstraintMode::All:
          break;
      }
    }
  }

  // Error-covariance recursion (deterministic given the channel sequence).
  std::vector<std::vector<double>> p_rec(nm, std::vector<double>(steps));
  for (size_t mi = 0; mi < nm; ++mi) {
    double p_pred = cfg.sigma_theta2;  // stationary prior
    for (int t = 0; t < steps; ++t) {
      const SumPowerInstance inst =
          make_sum_power_instance(channels[t], net, cfg.sigma_theta2, p);
      const double g = snr_objective(gains[mi][t], inst);
      const double p_post = posterior_mse(p_pred, g);
      p_rec[mi][t] = p_post;
      p_pred = model.alpha * model.alpha * p_post + model.sigma_u2;
    }
  }

  // Monte Carlo squared error, with noises shared across modes per trial.
  std::vector<std::vector<Accumulator>> err(nm,
                                            std::vector<Accumulator>(steps));
  for (long trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = master.substream(static_cast<std::uint64_t>(trial));
    Complex theta = sample_initial_state(model, rng);
    std::vector<KalmanState> states(nm);
    for (int t = 0; t < steps; ++t) {
      const Eigen::VectorXcd v = sample_sensor_noise(net, rng);
      const Complex w = rng.cgaussian(net.sigma_w2);
      for (size_t mi = 0; mi < nm; ++mi) {
        const Prediction pred = predict(states[mi], model);
        const Complex y =
            combine_observation(theta, gains[mi][t], channels[t], v, w);
        states[mi] = update(pred, y, gains[mi][t], channels[t], net);
        err[mi][t].add(std::norm(theta - states[mi].theta_hat));
      }
      theta = step_process(theta, model, rng);
    }
  }

  std::vector<ResultRow> rows;
  for (size_t mi = 0; mi < nm; ++mi) {
    const std::string base = to_string(modes[mi]);
    for (int t = 0; t < steps; ++t) {
      rows.push_back({to_string(cfg.experiment), static_cast<double>(t + 1),
                      base + "_recursion", p_rec[mi][t], 0.0, cfg.trials,
                      cfg.seed});
      rows.push_back({to_string(cfg.experiment), static_cast<double>(t + 1),
                      base + "_empirical", err[mi][t].mean(),
                      err[mi][t].std_error(), err[mi][t].n, cfg.seed});
    }
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::MseVsSensors: return run_mse_vs_sensors(cfg);
    case Experiment::OutageVsPower: return run_outage_vs_power(cfg);
    case Experiment::TrackingTrace: return run_tracking_trace(cfg);
  }
  throw std::logic_error("run_experiment: unreachable");
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,param,method,metric,stderr,n_realizations,seed\n";
  char buf[256];
  for (const auto& r : rows) {
    out += r.experiment;
    out += ',';
    out += format_double(r.param);
    out += ',';
    out += r.method;
    out += ',';
    out += format_double(r.metric);
    out += ',';
    out += format_double(r.std_error);
    out += ',';
    std::snprintf(buf, sizeof(buf), "%ld,%" PRIu64 "\n", r.n_realizations,
                  r.seed);
    out += buf;
  }
  return out;
}

void write_results(const std::vector<ResultRow>& rows,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << results_to_csv(rows);
}

}  // namespace beamtrack
