#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lipvi/baseline_is.hpp"
#include "lipvi/cli.hpp"
#include "lipvi/error.hpp"
#include "lipvi/io.hpp"
#include "lipvi/lipnorm.hpp"
#include "lipvi/lvi.hpp"
#include "lipvi/oracle.hpp"

namespace py = pybind11;
using namespace lipvi;

namespace {

std::vector<Point> to_points(const std::vector<std::vector<double>>& rows, std::size_t state_dim) {
  std::vector<Point> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() < state_dim) throw Error(Errc::dimension_mismatch, "point shorter than state_dim");
    out.emplace_back(r, state_dim, r.size() - state_dim);
  }
  return out;
}

Direction to_direction(const std::string& s) {
  if (s == "upper") return Direction::upper;
  if (s == "lower") return Direction::lower;
  throw Error(Errc::invalid_argument, "direction must be 'upper' or 'lower'");
}

// Reports cross as the same JSON text the CLI writes.
std::string report_json(const BoundsReport& r) { return report_to_json(r).dump(); }

}  // namespace

PYBIND11_MODULE(_lipvi, m) {
  m.attr("__version__") = kVersion;

  static py::exception<Error> error(m, "LipviError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error((std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Policy>(m, "Policy")
      .def_static("gaussian_linear", &Policy::gaussian_linear, py::arg("gain"), py::arg("bias"), py::arg("sigma"),
                  py::arg("action_dim") = 1)
      .def_static("constant", &Policy::constant, py::arg("action"))
      .def_static("pendulum_swingup", &Policy::pendulum_swingup, py::arg("noise_sigma") = 0.0)
      .def("describe", &Policy::describe)
      .def("__repr__", &Policy::describe);

  py::class_<Environment>(m, "Environment")
      .def_static("synthetic", &Environment::synthetic, py::arg("gamma") = 0.95, py::arg("target_gain") = 1.5,
                  py::arg("target_bias") = -0.1)
      .def_static("pendulum", &Environment::pendulum)
      .def_property_readonly("name", &Environment::name)
      .def_property_readonly("state_dim", &Environment::state_dim)
      .def_property_readonly("action_dim", &Environment::action_dim)
      .def("default_target", &Environment::default_target)
      .def("default_behavior", &Environment::default_behavior, py::arg("behavior_sigma"))
      .def("default_behavior_sigma", &Environment::default_behavior_sigma)
      .def("step", [](const Environment& env, const std::vector<double>& s, const std::vector<double>& a) {
        auto r = step(env, s, a);
        return py::make_tuple(r.s_next, r.reward);
      });

  py::class_<TransitionDataset>(m, "Dataset")
      .def_property_readonly("state_dim", &TransitionDataset::state_dim)
      .def_property_readonly("action_dim", &TransitionDataset::action_dim)
      .def("__len__", &TransitionDataset::size)
      .def("row",
           [](const TransitionDataset& d, std::size_t i) {
             if (i >= d.size()) throw py::index_error();
             const auto& r = d[i];
             return py::dict(py::arg("s") = r.s, py::arg("a") = r.a, py::arg("r") = r.r,
                             py::arg("s_next") = r.s_next, py::arg("episode") = r.episode, py::arg("t") = r.t);
           })
      .def("points",
           [](const TransitionDataset& d) {
             std::vector<std::vector<double>> out;
             for (const auto& p : d.points()) out.emplace_back(p.coords().begin(), p.coords().end());
             return out;
           })
      .def("prefix", &TransitionDataset::prefix, py::arg("count"))
      .def("save", [](const TransitionDataset& d, const std::string& path) { save_dataset(path, d); })
      .def_static("load", [](const std::string& path) { return load_dataset(path); })
      .def("to_csv", [](const TransitionDataset& d) {
        std::ostringstream out;
        write_dataset(out, d);
        return out.str();
      });

  m.def("collect", &collect, py::arg("env"), py::arg("behavior"), py::arg("trajectories"), py::arg("horizon"),
        py::arg("seed"));

  m.def(
      "ground_truth",
      [](const Environment& env, const Policy& target, double gamma, std::size_t rollouts, std::size_t horizon,
         std::uint64_t seed) {
        auto t = ground_truth_return(env, target, gamma, rollouts, horizon, seed);
        return py::dict(py::arg("value") = t.value, py::arg("standard_error") = t.standard_error,
                        py::arg("truncation_tolerance") = t.truncation_tolerance);
      },
      py::arg("env"), py::arg("target"), py::arg("gamma"), py::arg("rollouts") = 2000, py::arg("horizon") = 400,
      py::arg("seed") = 0);

  m.def(
      "sample_init_points",
      [](const Environment& env, const Policy& target, std::size_t count, std::uint64_t seed) {
        std::vector<std::vector<double>> out;
        for (const auto& p : sample_init_points(env, target, count, seed))
          out.emplace_back(p.coords().begin(), p.coords().end());
        return out;
      },
      py::arg("env"), py::arg("target"), py::arg("count"), py::arg("seed") = 0);

  m.def(
      "_bounds_json",
      [](const TransitionDataset& data, const Policy& target, const std::vector<std::vector<double>>& init,
         double gamma, double eta, std::size_t max_iters, std::optional<double> tol, std::size_t subsample,
         std::size_t action_samples, double kappa, std::size_t max_escalations, std::uint64_t seed) {
        LviConfig cfg;
        cfg.gamma = gamma;
        cfg.eta = eta;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        cfg.subsample = subsample;
        cfg.action_samples = action_samples;
        cfg.init_points = init.size();
        cfg.kappa = kappa;
        cfg.max_escalations = max_escalations;
        cfg.seed = seed;
        auto points = to_points(init, data.state_dim());
        py::gil_scoped_release release;
        return report_json(run(data, target, cfg, points));
      },
      py::arg("data"), py::arg("target"), py::arg("init"), py::arg("gamma"), py::arg("eta"), py::arg("max_iters"),
      py::arg("tol"), py::arg("subsample"), py::arg("action_samples"), py::arg("kappa"), py::arg("max_escalations"),
      py::arg("seed"));

  m.def(
      "envelope",
      [](const std::vector<std::vector<double>>& anchors, const std::vector<double>& q, double eta,
         const std::string& direction, const std::vector<std::vector<double>>& xs) {
        std::size_t dim = anchors.empty() ? 0 : anchors[0].size();
        EnvelopeState s(to_points(anchors, dim), q, eta, to_direction(direction));
        return eval_batch(s, to_points(xs, dim));
      },
      py::arg("anchors"), py::arg("q"), py::arg("eta"), py::arg("direction"), py::arg("xs"));

  m.def(
      "estimate_lipschitz",
      [](const TransitionDataset& data, std::size_t row_cap, std::uint64_t seed) {
        auto m = Metric::euclidean();
        auto r = estimate_reward_lipschitz(data, m, row_cap, seed);
        auto t = estimate_transition_lipschitz(data, m, m, row_cap, seed);
        return py::make_tuple(r.value, t.value);
      },
      py::arg("data"), py::arg("row_cap") = kDefaultRowCap, py::arg("seed") = 0);
  m.def("propagate", &propagate, py::arg("eta_r"), py::arg("eta_t"), py::arg("gamma"));

  m.def(
      "lp_bound",
      [](const TransitionDataset& data, const Policy& target, const std::vector<std::vector<double>>& init,
         double gamma, double eta, const std::string& direction, std::size_t action_samples, std::uint64_t seed) {
        auto fb = freeze(data, target, action_samples, gamma, seed);
        return lp_bound(fb, to_points(init, data.state_dim()), eta, Metric::euclidean(), to_direction(direction));
      },
      py::arg("data"), py::arg("target"), py::arg("init"), py::arg("gamma"), py::arg("eta"),
      py::arg("direction") = "upper", py::arg("action_samples") = 1, py::arg("seed") = 0);

  m.def(
      "is_estimate",
      [](const TransitionDataset& data, const Policy& behavior, const Policy& target, double gamma) {
        auto e = is_estimate(split_trajectories(data), behavior, target, gamma);
        return py::dict(py::arg("estimate") = e.estimate, py::arg("weighted_returns") = e.weighted_returns,
                        py::arg("weights") = e.weights, py::arg("standard_error") = e.standard_error,
                        py::arg("effective_sample_size") = e.effective_sample_size);
      },
      py::arg("data"), py::arg("behavior"), py::arg("target"), py::arg("gamma"));
  m.def(
      "hoeffding_lower",
      [](const std::vector<double>& v, double range, double delta) { return hoeffding_lower(v, range, delta); },
      py::arg("weighted_returns"), py::arg("value_range"), py::arg("delta"));

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
