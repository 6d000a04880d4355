// Python bindings for the beamtrack core: model/filter primitives, the two
// gain optimizers, the outage analysis, and the experiment harness.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "beamtrack/harness.hpp"
#include "beamtrack/indivpower.hpp"
#include "beamtrack/kalman.hpp"
#include "beamtrack/outage.hpp"
#include "beamtrack/sumpower.hpp"

namespace py = pybind11;
using namespace beamtrack;

namespace {

sdp::SolveOptions make_options(double feas_tol, double gap_tol, int max_iter) {
  sdp::SolveOptions opts;
  opts.feas_tol = feas_tol;
  opts.gap_tol = gap_tol;
  opts.max_iter = max_iter;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coherent amplify-and-forward tracking: Kalman filtering, "
            "optimal gain design, and MSE outage analysis.";

  // --- deterministic random streams -------------------------------------
  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("seed", &Rng::seed)
      .def("substream", &Rng::substream, py::arg("index"))
      .def("uniform", py::overload_cast<>(&Rng::uniform))
      .def("uniform", py::overload_cast<double, double>(&Rng::uniform),
           py::arg("lo"), py::arg("hi"))
      .def("gaussian", &Rng::gaussian)
      .def("cgaussian", &Rng::cgaussian, py::arg("sigma2"));

  // --- process / network / channel model --------------------------------
  py::class_<ProcessModel>(m, "ProcessModel")
      .def(py::init<>())
      .def_readwrite("alpha", &ProcessModel::alpha)
      .def_readwrite("sigma_u2", &ProcessModel::sigma_u2)
      .def_readwrite("sigma_theta2", &ProcessModel::sigma_theta2)
      .def_static("stationary", &ProcessModel::stationary, py::arg("alpha"),
                  py::arg("sigma_theta2"))
      .def("validate", &ProcessModel::validate);

  py::class_<SensorNetwork>(m, "SensorNetwork")
      .def(py::init<>())
      .def_readwrite("distances", &SensorNetwork::distances)
      .def_readwrite("gamma", &SensorNetwork::gamma)
      .def_readwrite("sigma_v2", &SensorNetwork::sigma_v2)
      .def_readwrite("sigma_w2", &SensorNetwork::sigma_w2)
      .def("size", &SensorNetwork::size)
      .def("validate", &SensorNetwork::validate);

  py::class_<ChannelRealization>(m, "ChannelRealization")
      .def(py::init<>())
      .def_readwrite("h_tilde", &ChannelRealization::h_tilde)
      .def_readwrite("h", &ChannelRealization::h);

  py::class_<GainVector>(m, "GainVector")
      .def(py::init<>())
      .def(py::init([](const Eigen::VectorXcd& a) {
             GainVector g;
             g.a = a;
             return g;
           }),
           py::arg("a"))
      .def_readwrite("a", &GainVector::a);

  m.def("step_process", &step_process, py::arg("theta"), py::arg("model"),
        py::arg("rng"));
  m.def("sample_initial_state", &sample_initial_state, py::arg("model"),
        py::arg("rng"));
  m.def("sample_channel", &sample_channel, py::arg("network"), py::arg("rng"));
  m.def("sample_sensor_noise", &sample_sensor_noise, py::arg("network"),
        py::arg("rng"));
  m.def("combine_observation", &combine_observation, py::arg("theta"),
        py::arg("gain"), py::arg("channel"), py::arg("sensor_noise"),
        py::arg("receiver_noise"));
  m.def("observe", &observe, py::arg("theta"), py::arg("gain"),
        py::arg("channel"), py::arg("network"), py::arg("rng"));
  m.def("transmit_power_weights", &transmit_power_weights, py::arg("network"),
        py::arg("sigma_theta2"));
  m.def("sensor_powers", &sensor_powers, py::arg("gain"), py::arg("d_diag"));
  m.def("total_power", &total_power, py::arg("gain"), py::arg("d_diag"));

  // --- Kalman filter ------------------------------------------------------
  py::class_<KalmanState>(m, "KalmanState")
      .def(py::init<>())
      .def_readwrite("theta_hat", &KalmanState::theta_hat)
      .def_readwrite("p", &KalmanState::p);

  py::class_<Prediction>(m, "Prediction")
      .def(py::init<>())
      .def_readwrite("theta_hat", &Prediction::theta_hat)
      .def_readwrite("p", &Prediction::p);

  m.def("predict", &predict, py::arg("state"), py::arg("model"));
  m.def("kalman_gain", &kalman_gain, py::arg("p_pred"), py::arg("gain"),
        py::arg("channel"), py::arg("network"));
  m.def("update", &update, py::arg("pred"), py::arg("y"), py::arg("gain"),
        py::arg("channel"), py::arg("network"));
  m.def("posterior_mse", &posterior_mse, py::arg("p_pred"), py::arg("snr"));

  // --- sum-power gain design ----------------------------------------------
  py::class_<SumPowerInstance>(m, "SumPowerInstance")
      .def(py::init<>())
      .def_readwrite("h", &SumPowerInstance::h)
      .def_readwrite("hvh_diag", &SumPowerInstance::hvh_diag)
      .def_readwrite("d_diag", &SumPowerInstance::d_diag)
      .def_readwrite("sigma_w2", &SumPowerInstance::sigma_w2)
      .def_readwrite("p_max", &SumPowerInstance::p_max);

  m.def("make_sum_power_instance", &make_sum_power_instance,
        py::arg("channel"), py::arg("network"), py::arg("sigma_theta2"),
        py::arg("p_max"));
  m.def("snr_objective", &snr_objective, py::arg("gain"), py::arg("inst"));
  m.def("noise_plus_power_diag", &noise_plus_power_diag, py::arg("inst"));
  m.def("optimal_gain_sum", &optimal_gain_sum, py::arg("inst"));
  m.def("optimal_snr_sum", &optimal_snr_sum, py::arg("inst"));
  m.def("snr_upper_bound", &snr_upper_bound, py::arg("network"));
  m.def("mse_lower_bound", &mse_lower_bound, py::arg("p_pred"),
        py::arg("network"));
  m.def("asymptotic_gain", &asymptotic_gain, py::arg("inst"));

  // --- SDP solver -----------------------------------------------------------
  auto sm = m.def_submodule("sdp", "Complex trace-form SDP solver.");

  py::enum_<sdp::SdpStatus>(sm, "SdpStatus")
      .value("Optimal", sdp::SdpStatus::Optimal)
      .value("MaxIterations", sdp::SdpStatus::MaxIterations)
      .value("Infeasible", sdp::SdpStatus::Infeasible);

  py::class_<sdp::SdpProblem>(sm, "SdpProblem")
      .def(py::init<>())
      .def_readwrite("objective", &sdp::SdpProblem::objective)
      .def_readwrite("eq_lhs", &sdp::SdpProblem::eq_lhs)
      .def_readwrite("ineq", &sdp::SdpProblem::ineq)
      .def("dim", &sdp::SdpProblem::dim)
      .def("validate", &sdp::SdpProblem::validate);

  py::class_<sdp::KktResiduals>(sm, "KktResiduals")
      .def_readonly("primal", &sdp::KktResiduals::primal)
      .def_readonly("dual_min_eig", &sdp::KktResiduals::dual_min_eig)
      .def_readonly("complementarity", &sdp::KktResiduals::complementarity)
      .def_readonly("duality_gap", &sdp::KktResiduals::duality_gap);

  py::class_<sdp::SdpSolution>(sm, "SdpSolution")
      .def_readonly("a", &sdp::SdpSolution::a)
      .def_readonly("ineq_duals", &sdp::SdpSolution::ineq_duals)
      .def_readonly("eq_dual", &sdp::SdpSolution::eq_dual)
      .def_readonly("objective_value", &sdp::SdpSolution::objective_value)
      .def_readonly("status", &sdp::SdpSolution::status)
      .def_readonly("iterations", &sdp::SdpSolution::iterations)
      .def_readonly("kkt", &sdp::SdpSolution::kkt);

  sm.def(
      "solve",
      [](const sdp::SdpProblem& prob, py::object primal_init, double feas_tol,
         double gap_tol, int max_iter) {
        const sdp::SolveOptions opts = make_options(feas_tol, gap_tol,
                                                    max_iter);
        if (primal_init.is_none()) return sdp::solve(prob, opts);
        return sdp::solve(prob, primal_init.cast<Eigen::MatrixXcd>(), opts);
      },
      py::arg("prob"), py::arg("primal_init") = py::none(),
      py::arg("feas_tol") = 1e-8, py::arg("gap_tol") = 1e-7,
      py::arg("max_iter") = 200);
  sm.def("kkt_check", &sdp::kkt_check, py::arg("prob"), py::arg("sol"));

  // --- individual power constraints ----------------------------------------
  py::register_exception<RankRecoveryFailure>(m, "RankRecoveryFailure");

  py::class_<LiftedInstance>(m, "LiftedInstance")
      .def(py::init<>())
      .def_readwrite("h", &LiftedInstance::h)
      .def_readwrite("sigma_v2", &LiftedInstance::sigma_v2)
      .def_readwrite("d_diag", &LiftedInstance::d_diag)
      .def_readwrite("hvh_diag", &LiftedInstance::hvh_diag)
      .def_readwrite("p_max_i", &LiftedInstance::p_max_i)
      .def_readwrite("sigma_w2", &LiftedInstance::sigma_w2)
      .def("sensors", &LiftedInstance::sensors)
      .def("problem", &LiftedInstance::problem);

  py::class_<IndividualSolution>(m, "IndividualSolution")
      .def_readonly("gain", &IndividualSolution::gain)
      .def_readonly("sdp", &IndividualSolution::sdp)
      .def_readonly("snr", &IndividualSolution::snr)
      .def_readonly("rank_ratio", &IndividualSolution::rank_ratio);

  m.def("lift", &lift, py::arg("channel"), py::arg("network"),
        py::arg("sigma_theta2"), py::arg("p_max_i"));
  m.def("feasible_init", &feasible_init, py::arg("inst"));
  m.def(
      "solve_individual",
      [](const LiftedInstance& inst, double rank_tol, double feas_tol,
         double gap_tol, int max_iter) {
        return solve_individual(
            inst, make_options(feas_tol, gap_tol, max_iter), rank_tol);
      },
      py::arg("inst"), py::arg("rank_tol") = 1e-5, py::arg("feas_tol") = 1e-8,
      py::arg("gap_tol") = 1e-7, py::arg("max_iter") = 200);
  m.def("power_violations", &power_violations, py::arg("gain"),
        py::arg("inst"));

  // --- outage analysis -------------------------------------------------------
  py::register_exception<EigenvalueDegeneracy>(m, "EigenvalueDegeneracy");

  py::class_<OutageInstance>(m, "OutageInstance")
      .def_readonly("network", &OutageInstance::network)
      .def_readonly("sigma_theta2", &OutageInstance::sigma_theta2)
      .def_readonly("p_max", &OutageInstance::p_max)
      .def_readonly("p_pred", &OutageInstance::p_pred)
      .def_readonly("epsilon", &OutageInstance::epsilon)
      .def_readonly("gain", &OutageInstance::gain)
      .def_readonly("v", &OutageInstance::v)
      .def_readonly("e_diag", &OutageInstance::e_diag)
      .def_readonly("beta", &OutageInstance::beta);

  py::class_<OutageMatrix>(m, "OutageMatrix")
      .def_readonly("b", &OutageMatrix::b)
      .def_readonly("eigenvalues", &OutageMatrix::eigenvalues);

  py::class_<EigenvalueBounds>(m, "EigenvalueBounds")
      .def_readonly("lower", &EigenvalueBounds::lower)
      .def_readonly("upper", &EigenvalueBounds::upper);

  m.def("equal_power_gain", &equal_power_gain, py::arg("network"),
        py::arg("sigma_theta2"), py::arg("p_max"));
  m.def("make_outage_instance", &make_outage_instance, py::arg("network"),
        py::arg("sigma_theta2"), py::arg("p_max"), py::arg("p_pred"),
        py::arg("epsilon"));
  m.def("outage_matrix", &outage_matrix, py::arg("inst"));
  m.def("outage_probability", &outage_probability, py::arg("inst"));
  m.def("weyl_bounds", &weyl_bounds, py::arg("inst"));
  m.def("empirical_outage", &empirical_outage, py::arg("inst"),
        py::arg("trials"), py::arg("stream_base"));

  // --- experiment harness ------------------------------------------------------
  py::enum_<Experiment>(m, "Experiment")
      .value("MseVsSensors", Experiment::MseVsSensors)
      .value("OutageVsPower", Experiment::OutageVsPower)
      .value("TrackingTrace", Experiment::TrackingTrace);

  py::enum_<ConstraintMode>(m, "ConstraintMode")
      .value("Sum", ConstraintMode::Sum)
      .value("Individual", ConstraintMode::Individual)
      .value("EqualPower", ConstraintMode::EqualPower)
      .value("All", ConstraintMode::All);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("experiment", &ExperimentConfig::experiment)
      .def_readwrite("n_sensors", &ExperimentConfig::n_sensors)
      .def_readwrite("p_max", &ExperimentConfig::p_max)
      .def_readwrite("constraint_mode", &ExperimentConfig::constraint_mode)
      .def_readwrite("realizations", &ExperimentConfig::realizations)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("epsilon", &ExperimentConfig::epsilon)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("distance_range", &ExperimentConfig::distance_range)
      .def_readwrite("sigma_v2_range", &ExperimentConfig::sigma_v2_range)
      .def_readwrite("sigma_v2_floor", &ExperimentConfig::sigma_v2_floor)
      .def_readwrite("sigma_w2", &ExperimentConfig::sigma_w2)
      .def_readwrite("sigma_theta2", &ExperimentConfig::sigma_theta2)
      .def_readwrite("alpha", &ExperimentConfig::alpha)
      .def_readwrite("gamma", &ExperimentConfig::gamma)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("output_path", &ExperimentConfig::output_path)
      .def("validate", &ExperimentConfig::validate);

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("experiment", &ResultRow::experiment)
      .def_readonly("param", &ResultRow::param)
      .def_readonly("method", &ResultRow::method)
      .def_readonly("metric", &ResultRow::metric)
      .def_readonly("std_error", &ResultRow::std_error)
      .def_readonly("n_realizations", &ResultRow::n_realizations)
      .def_readonly("seed", &ResultRow::seed);

  m.def("default_config", &default_config, py::arg("experiment"));
  m.def("parse_config", &parse_config, py::arg("json_text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("emit_config", &emit_config, py::arg("cfg"));
  m.def("run_experiment", &run_experiment, py::arg("cfg"),
        py::call_guard<py::gil_scoped_release>());
  m.def("results_to_csv", &results_to_csv, py::arg("rows"));
  m.def("write_results", &write_results, py::arg("rows"), py::arg("path"));
  m.def("draw_network", &draw_network, py::arg("n_sensors"), py::arg("cfg"),
        py::arg("rng"));

  m.attr("__version__") = "0.1.0";
}
