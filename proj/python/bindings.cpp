#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stq/analysis.hpp"
#include "stq/certify.hpp"
#include "stq/config.hpp"
#include "stq/norms.hpp"
#include "stq/plant.hpp"
#include "stq/quantize.hpp"
#include "stq/simulate.hpp"
#include "stq/stm.hpp"

namespace py = pybind11;
using namespace stq;

namespace {

Exponent exponent_from(double r) {
  if (std::isinf(r)) return Exponent::infinity();
  if (r == 1.0) return Exponent::one();
  if (r == 2.0) return Exponent::two();
  return Exponent::finite(r);
}

CertifyOptions make_options(std::optional<Vec> theta_cl,
                            std::optional<Vec> theta_op,
                            std::optional<int> kappa_decimals, double sigma0) {
  CertifyOptions opts;
  opts.theta_cl = std::move(theta_cl);
  opts.theta_op = std::move(theta_op);
  opts.kappa.round_decimals = kappa_decimals;
  opts.sigma0 = sigma0;
  return opts;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Contraction-based self-triggered control under quantization";

  // ---- norms ------------------------------------------------------------
  m.def(
      "weighted_norm",
      [](const Vec& x, const Vec& weights, double r) {
        return weighted_norm(x, WeightedNorm(weights, exponent_from(r)));
      },
      py::arg("x"), py::arg("weights"),
      py::arg("r") = std::numeric_limits<double>::infinity(),
      "Diagonally-weighted r-norm ||diag(weights) x||_r (r=inf by default)");
  m.def("metzler_majorant", &metzler_majorant, py::arg("a"));
  m.def("weighted_inf_log_norm", &weighted_inf_log_norm, py::arg("a"),
        py::arg("theta"),
        "Matrix measure induced by the weighted infinity norm");
  m.def("weighted_inf_induced_norm", &weighted_inf_induced_norm, py::arg("a"),
        py::arg("theta"));
  m.def("gamma_constant", &gamma_constant, py::arg("theta_cl"),
        py::arg("theta_op"));

  // ---- plants -------------------------------------------------------------
  py::class_<TwoTank>(m, "TwoTank")
      .def(py::init<double, double>(), py::arg("a") = 2.0, py::arg("H") = 1.0)
      .def_readwrite("a", &TwoTank::a)
      .def_readwrite("H", &TwoTank::H);

  py::class_<Plant>(m, "Plant")
      .def("f", &Plant::eval_f, py::arg("x"), py::arg("u"))
      .def("g", &Plant::eval_g, py::arg("x"))
      .def("F", &Plant::eval_F, py::arg("x"), py::arg("e"))
      .def("F0", &Plant::eval_F0, py::arg("x"))
      .def("f_held", &Plant::eval_fq, py::arg("x"), py::arg("q"))
      .def("jacobian_F0", &Plant::jacobian_F0, py::arg("x"))
      .def_property_readonly("state_dim", &Plant::state_dim)
      .def_property_readonly("input_dim", &Plant::input_dim);

  py::class_<LurePlant>(m, "LurePlant")
      .def(py::init([](Mat A, Mat B, Mat K, Vec xi, Vec eta,
                       const std::string& phi, std::vector<double> params,
                       double R0) {
             return LurePlant(std::move(A), std::move(B), std::move(K),
                              std::move(xi), std::move(eta),
                              nonlinearity_from_catalog(phi, params), R0);
           }),
           py::arg("A"), py::arg("B"), py::arg("K"), py::arg("xi"),
           py::arg("eta"), py::arg("phi"),
           py::arg("phi_params") = std::vector<double>{}, py::arg("R0"))
      .def_readonly("A", &LurePlant::A)
      .def_readonly("B", &LurePlant::B)
      .def_readonly("K", &LurePlant::K)
      .def_readonly("xi", &LurePlant::xi)
      .def_readonly("eta", &LurePlant::eta)
      .def_readonly("R0", &LurePlant::R0)
      .def("rhs", &LurePlant::rhs, py::arg("x"), py::arg("u"))
      .def("to_plant", &LurePlant::to_plant);

  m.def("two_tank_plant", &two_tank_plant, py::arg("tank"), py::arg("K"));
  m.def("lure_from_two_tank", &lure_from_two_tank, py::arg("tank"),
        py::arg("K"), py::arg("R0"));

  // ---- certification ------------------------------------------------------
  py::class_<Certificate>(m, "Certificate")
      .def_readonly("c", &Certificate::c)
      .def_readonly("d1", &Certificate::d1)
      .def_readonly("d2", &Certificate::d2)
      .def_readonly("theta_cl", &Certificate::theta_cl)
      .def_readonly("theta_op", &Certificate::theta_op)
      .def_readonly("kappa_min", &Certificate::kappa_min)
      .def_readonly("kappa_max", &Certificate::kappa_max)
      .def_readonly("R0", &Certificate::R0)
      .def_readonly("R1", &Certificate::R1)
      .def_readonly("R2", &Certificate::R2)
      .def_readonly("Gamma", &Certificate::Gamma)
      .def_readonly("R", &Certificate::R)
      .def_readonly("alpha", &Certificate::alpha)
      .def_readonly("sigma0", &Certificate::sigma0)
      .def("norm_cl", &Certificate::norm_cl, py::arg("x"))
      .def("norm_op", &Certificate::norm_op, py::arg("x"))
      .def("__repr__", [](const Certificate& c) {
        std::ostringstream out;
        out << "Certificate(c=" << c.c << ", d1=" << c.d1 << ", d2=" << c.d2
            << ", Gamma=" << c.Gamma << ", R=" << c.R << ", alpha=" << c.alpha
            << ")";
        return out.str();
      });

  m.def(
      "certify_lure",
      [](const LurePlant& p, double c, double d1, std::optional<Vec> theta_cl,
         std::optional<Vec> theta_op, std::optional<int> kappa_decimals,
         double sigma0) {
        return certify_lure(p, c, d1,
                            make_options(std::move(theta_cl),
                                         std::move(theta_op), kappa_decimals,
                                         sigma0));
      },
      py::arg("plant"), py::arg("c"), py::arg("d1") = 0.0,
      py::arg("theta_cl") = std::nullopt, py::arg("theta_op") = std::nullopt,
      py::arg("kappa_decimals") = 2, py::arg("sigma0") = 1.0);
  m.def(
      "kappa_bounds",
      [](const std::function<double(double)>& phi_prime, double R0,
         std::optional<int> decimals) {
        KappaOptions opts;
        opts.round_decimals = decimals;
        return kappa_bounds(phi_prime, R0, opts);
      },
      py::arg("phi_prime"), py::arg("R0"), py::arg("decimals") = 2);
  m.def("lp_feasible_theta", &lp_feasible_theta, py::arg("matrices"),
        py::arg("rate"));
  m.def(
      "verify_theta",
      [](const std::vector<Mat>& mats, double rate, const Vec& theta) {
        const ThetaFeasibility r = verify_theta(mats, rate, theta);
        return py::make_tuple(r.feasible, r.min_slack, r.slacks);
      },
      py::arg("matrices"), py::arg("rate"), py::arg("theta"));
  m.def("closed_loop_matrices", &closed_loop_matrices, py::arg("plant"),
        py::arg("kappa_min"), py::arg("kappa_max"));
  m.def("open_loop_matrices", &open_loop_matrices, py::arg("plant"),
        py::arg("kappa_min"), py::arg("kappa_max"));
  m.def("max_feasible_contraction_rate",
        [](const LurePlant& p, double hi, double tol) {
          return max_feasible_contraction_rate(p, {}, hi, tol);
        },
        py::arg("plant"), py::arg("hi") = 100.0, py::arg("tol") = 1e-6);

  // ---- quantizers -----------------------------------------------------------
  py::class_<LogQuantizer>(m, "LogQuantizer")
      .def(py::init<double, double, Vec>(), py::arg("rho"), py::arg("chi0"),
           py::arg("theta_cl"))
      .def_static("design", &LogQuantizer::design, py::arg("rho"),
                  py::arg("cert"), py::arg("chi0") = std::nullopt)
      .def("quantize", &LogQuantizer::quantize, py::arg("x"))
      .def("level", &LogQuantizer::level, py::arg("coord"), py::arg("j"))
      .def_property_readonly("rho", &LogQuantizer::rho)
      .def_property_readonly("chi0", &LogQuantizer::chi0);
  m.def("lambda0_log", &lambda0_log, py::arg("quantizer"), py::arg("cert"));

  py::class_<ZoomQuantizer>(m, "ZoomQuantizer")
      .def(py::init<double, double, double, Vec>(), py::arg("M"),
           py::arg("Delta"), py::arg("mu0"), py::arg("theta_op"))
      .def_static("design", &ZoomQuantizer::design, py::arg("M"),
                  py::arg("Delta"), py::arg("mu0"), py::arg("cert"))
      .def("quantize", &ZoomQuantizer::quantize, py::arg("x"))
      .def("quantize_at", &ZoomQuantizer::quantize_at, py::arg("x"),
           py::arg("mu"))
      .def("base_quantize", &ZoomQuantizer::base_quantize, py::arg("y"))
      .def_property("mu", &ZoomQuantizer::mu, &ZoomQuantizer::set_mu)
      .def_property_readonly("mu0", &ZoomQuantizer::mu0)
      .def_property_readonly("M", &ZoomQuantizer::range_coeff)
      .def_property_readonly("Delta", &ZoomQuantizer::error_bound);
  m.def("lambda_zoom", &lambda_zoom, py::arg("quantizer"), py::arg("cert"));

  // ---- self-triggering -------------------------------------------------------
  py::enum_<TriggerCause>(m, "TriggerCause")
      .value("threshold", TriggerCause::threshold)
      .value("ball_exit", TriggerCause::ball_exit)
      .value("max_time", TriggerCause::max_time);

  m.def("nu", &nu, py::arg("t"), py::arg("d1"), py::arg("d2"));
  m.def("tilde_tau_min", &tilde_tau_min, py::arg("lam"), py::arg("d1"),
        py::arg("d2"));
  m.def("tau_min_log", &tau_min_log, py::arg("rho"), py::arg("sigma"),
        py::arg("cert"));
  m.def("sigma_bounds_log", &sigma_bounds_log, py::arg("rho"),
        py::arg("cert"));
  m.def("gamma_log", &gamma_log, py::arg("sigma"), py::arg("sigma1"),
        py::arg("c"), py::arg("tau_max"));
  m.def("sigma_bounds_zoom", &sigma_bounds_zoom, py::arg("h"),
        py::arg("quantizer"), py::arg("cert"));
  m.def("zoom_update", &zoom_update, py::arg("mu"), py::arg("delta_t"),
        py::arg("cert"), py::arg("sigma"));
  m.def("gamma_zoom", &gamma_zoom, py::arg("sigma"), py::arg("cert"),
        py::arg("ell_max"), py::arg("h"));

  py::class_<StmLogConfig>(m, "StmLogConfig")
      .def(py::init([](double sigma, double tau_max, double lam,
                       std::optional<std::vector<double>> allowed,
                       double dt_pred) {
             StmLogConfig cfg;
             cfg.sigma = sigma;
             cfg.tau_max = tau_max;
             cfg.lambda = lam;
             cfg.allowed_times = std::move(allowed);
             cfg.dt_pred = dt_pred;
             return cfg;
           }),
           py::arg("sigma"), py::arg("tau_max"), py::arg("lam"),
           py::arg("allowed_times") = std::nullopt,
           py::arg("dt_pred") = 1e-4)
      .def_readwrite("sigma", &StmLogConfig::sigma)
      .def_readwrite("tau_max", &StmLogConfig::tau_max)
      .def_readwrite("lam", &StmLogConfig::lambda)
      .def_readwrite("dt_pred", &StmLogConfig::dt_pred)
      .def("validate", &StmLogConfig::validate, py::arg("quantizer"),
           py::arg("cert"));

  py::class_<StmZoomConfig>(m, "StmZoomConfig")
      .def(py::init([](double sigma, double h, int ell_max, double dt_pred) {
             StmZoomConfig cfg;
             cfg.sigma = sigma;
             cfg.h = h;
             cfg.ell_max = ell_max;
             cfg.dt_pred = dt_pred;
             return cfg;
           }),
           py::arg("sigma"), py::arg("h"), py::arg("ell_max"),
           py::arg("dt_pred") = 1e-4)
      .def_readwrite("sigma", &StmZoomConfig::sigma)
      .def_readwrite("h", &StmZoomConfig::h)
      .def_readwrite("ell_max", &StmZoomConfig::ell_max)
      .def_readwrite("dt_pred", &StmZoomConfig::dt_pred)
      .def("validate", &StmZoomConfig::validate, py::arg("quantizer"),
           py::arg("cert"));

  m.def(
      "next_time_log",
      [](const Plant& p, const Vec& q, const Certificate& cert,
         const LogQuantizer& quant, const StmLogConfig& cfg) {
        const LogDecision d = next_time_log(p, q, cert, quant, cfg);
        return py::make_tuple(d.tau, d.cause);
      },
      py::arg("plant"), py::arg("q"), py::arg("cert"), py::arg("quantizer"),
      py::arg("cfg"));
  m.def(
      "next_steps_zoom",
      [](const Plant& p, const Vec& q, double mu, const Certificate& cert,
         const ZoomQuantizer& quant, const StmZoomConfig& cfg) {
        const ZoomDecision d = next_steps_zoom(p, q, mu, cert, quant, cfg);
        return py::make_tuple(d.ell, d.cause, d.immediate);
      },
      py::arg("plant"), py::arg("q"), py::arg("mu"), py::arg("cert"),
      py::arg("quantizer"), py::arg("cfg"));

  // ---- simulation ------------------------------------------------------------
  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states)
      .def("state_at", &Trajectory::state_at, py::arg("t"));

  py::class_<SamplingRecord>(m, "SamplingRecord")
      .def_readonly("k", &SamplingRecord::k)
      .def_readonly("t", &SamplingRecord::t)
      .def_readonly("x_at_t", &SamplingRecord::x_at_t)
      .def_readonly("q", &SamplingRecord::q)
      .def_readonly("tau_stm", &SamplingRecord::tau_stm)
      .def_readonly("dt_realized", &SamplingRecord::dt_realized)
      .def_readonly("ell", &SamplingRecord::ell)
      .def_readonly("mu", &SamplingRecord::mu)
      .def_readonly("cause", &SamplingRecord::cause)
      .def_readonly("truncated", &SamplingRecord::truncated);

  py::class_<ClaimCheck>(m, "ClaimCheck")
      .def_readonly("name", &ClaimCheck::name)
      .def_readonly("bound", &ClaimCheck::bound)
      .def_readonly("worst_margin", &ClaimCheck::worst_margin)
      .def_readonly("passed", &ClaimCheck::pass);

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("claims", &VerificationReport::claims)
      .def_readonly("sample_count", &VerificationReport::sample_count)
      .def_readonly("min_dwell", &VerificationReport::min_dwell)
      .def("all_pass", &VerificationReport::all_pass);

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("trajectory", &SimResult::trajectory)
      .def_readonly("inputs", &SimResult::inputs)
      .def_readonly("records", &SimResult::records)
      .def_readonly("warnings", &SimResult::warnings)
      .def("sampling_instants", &SimResult::sampling_instants);

  m.def("run_log", &run_log, py::arg("plant"), py::arg("cert"),
        py::arg("quantizer"), py::arg("cfg"), py::arg("x0"),
        py::arg("horizon"), py::arg("dt"));
  m.def("run_zoom", &run_zoom, py::arg("plant"), py::arg("cert"),
        py::arg("quantizer"), py::arg("cfg"), py::arg("x0"),
        py::arg("horizon"), py::arg("dt"));
  m.def("run_ideal", &run_ideal, py::arg("plant"), py::arg("x0"),
        py::arg("horizon"), py::arg("dt"));

  // ---- analysis ----------------------------------------------------------------
  m.def("decay_w", &decay_w, py::arg("t"), py::arg("eps"), py::arg("c"));
  m.def("big_w", &big_w, py::arg("t"), py::arg("eps"), py::arg("c"));
  m.def("verify_log",
        py::overload_cast<const SimResult&, const LogQuantizer&,
                          const StmLogConfig&>(&verify_theorem),
        py::arg("sim"), py::arg("quantizer"), py::arg("cfg"));
  m.def("verify_zoom",
        py::overload_cast<const SimResult&, const ZoomQuantizer&,
                          const StmZoomConfig&>(&verify_theorem),
        py::arg("sim"), py::arg("quantizer"), py::arg("cfg"));
  m.def("verify_ideal", &verify_ideal, py::arg("sim"), py::arg("cert"));

  py::class_<RegionRow>(m, "RegionRow")
      .def_readonly("rho", &RegionRow::rho)
      .def_readonly("lower", &RegionRow::lower)
      .def_readonly("upper", &RegionRow::upper)
      .def_readonly("feasible", &RegionRow::feasible);
  py::class_<RegionTable>(m, "RegionTable")
      .def_readonly("rows", &RegionTable::rows)
      .def_readonly("rho_min", &RegionTable::rho_min)
      .def_readonly("sigma_at_crossing", &RegionTable::sigma_at_crossing);
  m.def("stabilizable_region", &stabilizable_region, py::arg("rho_grid"),
        py::arg("cert"));
  m.def("region_crossing", &region_crossing, py::arg("cert"));
  m.def(
      "relative_error",
      [](const SimResult& sim, const SimResult& ideal) {
        const RelativeErrorSeries s = relative_error(sim, ideal);
        return py::make_tuple(s.t, s.value, s.defined);
      },
      py::arg("sim"), py::arg("ideal"));

  // ---- configs -------------------------------------------------------------------
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("load", &ExperimentConfig::load, py::arg("path"))
      .def_readonly("x0", &ExperimentConfig::x0)
      .def_readonly("horizon", &ExperimentConfig::horizon)
      .def_readonly("dt", &ExperimentConfig::dt)
      .def("plant", &ExperimentConfig::plant,
           py::return_value_policy::reference_internal)
      .def("build_certificate", &ExperimentConfig::build_certificate)
      .def("make_log_quantizer", &ExperimentConfig::make_log_quantizer,
           py::arg("cert"))
      .def("make_log_stm", &ExperimentConfig::make_log_stm, py::arg("cert"),
           py::arg("quantizer"))
      .def("make_zoom_quantizer", &ExperimentConfig::make_zoom_quantizer,
           py::arg("cert"))
      .def("make_zoom_stm", &ExperimentConfig::make_zoom_stm);
}
