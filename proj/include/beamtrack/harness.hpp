#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "beamtrack/model.hpp"

namespace beamtrack {

enum class Experiment { MseVsSensors, OutageVsPower, TrackingTrace };
enum class ConstraintMode { Sum, Individual, EqualPower, All };

std::string to_string(Experiment e);
std::string to_string(ConstraintMode m);
Experiment experiment_from_string(const std::string& s);
ConstraintMode constraint_mode_from_string(const std::string& s);

/// Full description of one simulation run. Defaults reproduce the reference
/// operating point: distances U[2, 8], path-loss exponent 1, unit-variance
/// process with alpha = 0.9, sensor noise U[0, 0.5] (clamped away from 0),
/// receiver noise 0.5, 300 realizations.
struct ExperimentConfig {
  Experiment experiment = Experiment::MseVsSensors;
  std::vector<int> n_sensors;       ///< sweep values (single value for
                                    ///< outage/tracking runs)
  std::vector<double> p_max;        ///< sum-power budgets to sweep
  ConstraintMode constraint_mode = ConstraintMode::All;
  int realizations = 300;           ///< network/channel draws per sweep point
  long trials = 100000;             ///< Monte Carlo trials (outage, tracking)
  double epsilon = 0.3;             ///< MSE outage threshold
  std::uint64_t seed = 0;           ///< required; no entropy fallback
  std::array<double, 2> distance_range{2.0, 8.0};
  std::array<double, 2> sigma_v2_range{0.0, 0.5};
  double sigma_v2_floor = 1e-6;     ///< clamp for drawn sensor noise
  double sigma_w2 = 0.5;
  double sigma_theta2 = 1.0;
  double alpha = 0.9;
  double gamma = 1.0;
  int steps = 20;                   ///< tracking horizon
  std::string output_path = "results.csv";

  void validate() const;
};

/// Experiment-appropriate defaults (sweep lists differ per experiment).
ExperimentConfig default_config(Experiment e);

/// Parse a JSON config. Unknown keys are rejected with a diagnostic naming
/// the key; a missing seed is an error ("seed" must be explicit so runs are
/// reproducible by construction). Absent keys keep the defaults above.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);  ///< round-trips

/// One output record. metric/std_error meaning depends on the experiment:
/// mean posterior MSE over realizations, outage probability, or per-step
/// squared error. Rows are emitted sorted by (param, method).
struct ResultRow {
  std::string experiment;
  double param = 0.0;        ///< sweep coordinate: N, p_max, or step index
  std::string method;
  double metric = 0.0;
  double std_error = 0.0;
  long n_realizations = 0;
  std::uint64_t seed = 0;
};

std::vector<ResultRow> run_mse_vs_sensors(const ExperimentConfig& cfg);
std::vector<ResultRow> run_outage_vs_power(const ExperimentConfig& cfg);
std::vector<ResultRow> run_tracking_trace(const ExperimentConfig& cfg);
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// CSV with the pinned header
///   experiment,param,method,metric,stderr,n_realizations,seed
/// and 17-significant-digit numeric formatting, so equal-seed reruns are
/// byte-identical.
std::string results_to_csv(const std::vector<ResultRow>& rows);
void write_results(const std::vector<ResultRow>& rows, const std::string& path);

/// Draw a network from the config's distributions: distances first, then
/// sensor noise variances (clamped to [sigma_v2_floor, upper]).
SensorNetwork draw_network(int n_sensors, const ExperimentConfig& cfg,
                           Rng& rng);

}  // namespace beamtrack
