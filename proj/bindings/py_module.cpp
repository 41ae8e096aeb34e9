#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rbergomi/black_scholes.hpp"
#include "rbergomi/estimators.hpp"
#include "rbergomi/experiment.hpp"
#include "rbergomi/hybrid_volterra.hpp"
#include "rbergomi/rbergomi.hpp"

namespace py = pybind11;
using namespace rbergomi;

namespace {

py::array_t<double> matrix_to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.rows() * m.cols(), out.mutable_data());
    return out;
}

ModelParams make_model(double xi0, double eta, double rho, double alpha,
                       const std::vector<double>& xi0_times,
                       const std::vector<double>& xi0_values) {
    ForwardVarianceCurve curve = xi0_values.empty()
                                     ? ForwardVarianceCurve(xi0)
                                     : ForwardVarianceCurve(xi0_times, xi0_values);
    return ModelParams(std::move(curve), eta, rho, alpha);
}

}  // namespace

PYBIND11_MODULE(rbergomi_mc, m) {
    m.doc() = "Monte Carlo pricing for the rough Bergomi model: hybrid-scheme "
              "Volterra simulation and variance-reduced implied-vol estimators";

    // Black-Scholes analytics
    m.def("bs_price", &bs::bs_price, py::arg("v"), py::arg("s"), py::arg("k"), py::arg("w"),
          "Black-Scholes price in total-variance form");
    m.def("implied_total_variance", &bs::implied_total_variance, py::arg("price"), py::arg("k"));
    m.def("implied_vol", &bs::implied_vol, py::arg("price"), py::arg("k"), py::arg("t"));
    m.def("forward_delta", &bs::forward_delta, py::arg("k"), py::arg("sigma"), py::arg("t"));
    m.def("logstrike_from_spot_delta",
          py::overload_cast<double, double, double>(&bs::logstrike_from_spot_delta),
          py::arg("delta_put"), py::arg("sigma"), py::arg("t"));
    m.def("norm_cdf", &bs::norm_cdf, py::arg("x"));
    m.def("norm_ppf", &bs::norm_ppf, py::arg("p"));
    m.def("otm_sign", &bs::otm_sign, py::arg("k"));

    // hybrid scheme
    m.def("bstar_weights",
          [](double alpha, std::size_t count) {
              auto b = bstar_weights(alpha, count);
              return py::array_t<double>(b.size(), b.data());
          },
          py::arg("alpha"), py::arg("count"));
    m.def("simulate_volterra",
          [](double alpha, double maturity, std::size_t n_steps, std::size_t n_paths,
             std::uint64_t seed, bool antithetic, bool use_fft, int threads) {
              SimulateOptions opts;
              opts.antithetic = antithetic;
              opts.convolution = use_fft ? ConvolutionMode::Fft : ConvolutionMode::Direct;
              opts.threads = threads;
              const VolterraPaths vp = simulate_volterra(
                  RoughnessParams(alpha), TimeGrid(n_steps, maturity), n_paths, seed, opts);
              return py::make_tuple(matrix_to_numpy(vp.dw1), matrix_to_numpy(vp.walpha));
          },
          py::arg("alpha"), py::arg("maturity"), py::arg("n_steps"), py::arg("n_paths"),
          py::arg("seed"), py::arg("antithetic") = true, py::arg("use_fft") = true,
          py::arg("threads") = 0,
          "Returns (dw1, walpha) path skeleton arrays");

    m.def("simulate_terminals",
          [](double xi0, double eta, double rho, double alpha, double maturity,
             std::size_t n_steps, std::size_t n_paths, std::uint64_t seed, bool antithetic,
             bool with_full_price, int threads, const std::vector<double>& xi0_times,
             const std::vector<double>& xi0_values) {
              const ModelParams model = make_model(xi0, eta, rho, alpha, xi0_times, xi0_values);
              TerminalOptions opts;
              opts.antithetic = antithetic;
              opts.with_full_price = with_full_price;
              opts.threads = threads;
              const PathFunctionals pf =
                  simulate_terminals(model, TimeGrid(n_steps, maturity), n_paths, seed, opts);
              py::array_t<double> s(pf.s_t.size(), pf.s_t.data());
              py::array_t<double> s1(pf.s1_t.size(), pf.s1_t.data());
              py::array_t<double> iv(pf.iv.size(), pf.iv.data());
              return py::make_tuple(s, s1, iv);
          },
          py::arg("xi0"), py::arg("eta"), py::arg("rho"), py::arg("alpha"), py::arg("maturity"),
          py::arg("n_steps"), py::arg("n_paths"), py::arg("seed"), py::arg("antithetic") = true,
          py::arg("with_full_price") = true, py::arg("threads") = 0,
          py::arg("xi0_times") = std::vector<double>{},
          py::arg("xi0_values") = std::vector<double>{},
          "Returns terminal (s, s1, integrated_variance) arrays; s is empty when "
          "with_full_price is false");

    m.def("estimate_implied_vol",
          [](const std::string& kind, double xi0, double eta, double rho, double alpha,
             double k, double maturity, std::size_t n_steps, std::size_t n_paths,
             std::uint64_t seed, int threads) {
              const EstimatorKind ek = estimator_from_string(kind);
              const ModelParams model = make_model(xi0, eta, rho, alpha, {}, {});
              TerminalOptions opts;
              opts.antithetic = uses_antithetic(ek);
              opts.with_full_price = requires_w2(ek);
              opts.threads = threads;
              const PathFunctionals pf =
                  simulate_terminals(model, TimeGrid(n_steps, maturity), n_paths, seed, opts);
              const IvEstimate est = estimate_implied_vol(ek, pf, bs::OptionSpec(k, maturity), rho);
              py::dict out;
              out["sigma"] = est.sigma;
              out["p_hat"] = est.p_hat;
              out["alpha_hat"] = est.alpha_hat;
              out["q_hat"] = est.q_hat;
              out["ey"] = est.ey;
              out["flagged"] = est.flagged();
              return out;
          },
          py::arg("kind"), py::arg("xi0"), py::arg("eta"), py::arg("rho"), py::arg("alpha"),
          py::arg("k"), py::arg("maturity"), py::arg("n_steps") = 312, py::arg("n_paths") = 40000,
          py::arg("seed") = 42, py::arg("threads") = 0,
          "One implied-vol estimate (base/antithetic/conditional/controlled/mixed)");

    m.def("generate_smile",
          [](double xi0, double eta, double rho, double alpha,
             const std::vector<double>& maturities, const std::vector<double>& deltas,
             std::size_t n_paths, std::size_t n_steps, const std::string& kind,
             std::uint64_t seed, int threads) {
              SmileConfig cfg;
              cfg.maturities = maturities;
              cfg.deltas = deltas;
              cfg.n_paths = n_paths;
              cfg.n_steps = n_steps;
              cfg.kind = estimator_from_string(kind);
              cfg.seed = seed;
              cfg.threads = threads;
              const SmileSurface surface =
                  generate_smile(make_model(xi0, eta, rho, alpha, {}, {}), cfg);
              py::list rows;
              for (const auto& smile : surface.maturities)
                  for (const auto& pt : smile.points)
                      rows.append(py::make_tuple(smile.maturity, pt.delta_put, pt.k, pt.sigma,
                                                 pt.std_err, pt.flagged));
              return rows;
          },
          py::arg("xi0"), py::arg("eta"), py::arg("rho"), py::arg("alpha"), py::arg("maturities"),
          py::arg("deltas") = std::vector<double>{}, py::arg("n_paths") = 100000,
          py::arg("n_steps") = 312, py::arg("kind") = "mixed", py::arg("seed") = 42,
          py::arg("threads") = 0,
          "Rows of (maturity, delta_put, log_strike, sigma, std_err, flagged)");

    m.def("extract_forward_variance",
          [](const std::vector<double>& deltas, const std::vector<double>& sigmas, double t) {
              DeltaSmile smile;
              smile.maturity = t;
              for (std::size_t i = 0; i < deltas.size(); ++i)
                  smile.points.push_back({deltas[i], 0.0, sigmas[i]});
              std::sort(smile.points.begin(), smile.points.end(),
                        [](const DeltaPoint& a, const DeltaPoint& b) { return a.delta < b.delta; });
              return extract_forward_variance(smile);
          },
          py::arg("deltas"), py::arg("sigmas"), py::arg("t"),
          "t * integral of sigma(Delta)^2 over [0,1] (spline + constant wings)");

    m.def("calibrate_rho_eta",
          [](const std::vector<double>& target_ks, const std::vector<double>& target_vols,
             double maturity, double xi0, double alpha, double rho_init, double eta_init,
             std::size_t n_paths, std::size_t n_steps, const std::string& kind,
             std::uint64_t seed, double budget_ms, int max_evals) {
              CalibrationTargets targets{maturity, target_ks, target_vols};
              CalibrationOptions opts;
              opts.rho_init = rho_init;
              opts.eta_init = eta_init;
              opts.n_paths = n_paths;
              opts.n_steps = n_steps;
              opts.kind = estimator_from_string(kind);
              opts.seed = seed;
              opts.budget_ms = budget_ms;
              opts.max_evals = max_evals;
              const ModelParams base = make_model(xi0, eta_init, rho_init, alpha, {}, {});
              const CalibrationResult res = calibrate_rho_eta(targets, base, opts);
              py::dict out;
              out["rho_hat"] = res.rho_hat;
              out["eta_hat"] = res.eta_hat;
              out["rmse"] = res.rmse;
              out["iterations"] = res.iterations;
              out["converged"] = res.converged;
              out["method"] = res.method;
              return out;
          },
          py::arg("target_ks"), py::arg("target_vols"), py::arg("maturity"), py::arg("xi0"),
          py::arg("alpha"), py::arg("rho_init"), py::arg("eta_init"), py::arg("n_paths") = 1000,
          py::arg("n_steps") = 312, py::arg("kind") = "mixed", py::arg("seed") = 42,
          py::arg("budget_ms") = 700.0, py::arg("max_evals") = 80,
          "Bounded RMSE minimisation over (rho, eta) with common random numbers");
}
