#include "lipvi/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lipvi/baseline_is.hpp"
#include "lipvi/error.hpp"
#include "lipvi/io.hpp"
#include "lipvi/lipnorm.hpp"
#include "lipvi/lvi.hpp"
#include "lipvi/oracle.hpp"

namespace lipvi::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw UsageError("bad number '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list in " + what);
  return out;
}

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

Environment parse_env(const std::string& name, double gamma) {
  auto env = environment_by_name(name, gamma);
  if (!env) throw UsageError("unknown env '" + name + "'; valid envs: synthetic, pendulum");
  return *env;
}

// "target" (the environment's), gaussian_linear:g,b,s, constant:c.., pendulum[:noise]
Policy parse_policy(const std::string& spec, const Environment& env) {
  auto [kind, args] = split_spec(spec);
  if (kind == "target") return env.default_target();
  if (kind == "gaussian_linear") {
    auto v = parse_list(args, "--policy");
    if (v.size() != 3) throw UsageError("gaussian_linear needs gain,bias,sigma");
    if (v[2] < 0.0) throw UsageError("sigma must be non-negative");
    return Policy::gaussian_linear(v[0], v[1], v[2]);
  }
  if (kind == "constant") return Policy::constant(parse_list(args, "--policy"));
  if (kind == "pendulum") return Policy::pendulum_swingup(args.empty() ? 0.0 : parse_list(args, "--policy").at(0));
  throw UsageError("unknown policy '" + spec + "'; use target, gaussian_linear:g,b,s, constant:c.. or pendulum[:noise]");
}

Metric parse_metric(const std::string& spec, const TransitionDataset& data) {
  auto [kind, args] = split_spec(spec);
  if (kind == "euclidean") return Metric::euclidean();
  if (kind == "weighted") return Metric::weighted(parse_list(args, "--metric"));
  if (kind == "features") {
    if (args.empty()) throw UsageError("features metric needs a file: features:path.csv");
    return Metric::features(load_feature_table(args, data));
  }
  throw UsageError("unknown metric '" + spec + "'; use euclidean, weighted:w.. or features:path");
}

// Flat key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Options shared by the commands that run the iteration.

struct RunOptions {
  std::string data;
  std::string env = "synthetic";
  std::string policy = "target";
  std::string init_file;
  std::string metric = "euclidean";
  std::string eta = "2.0";
  std::string tol;
  std::string out;
  LviConfig cfg;
};

void add_run_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--data", o.data, "dataset CSV")->required();
  sub->add_option("--env", o.env, "environment supplying the default policy and initial distribution");
  sub->add_option("--policy", o.policy, "target policy: target, gaussian_linear:g,b,s, constant:c.., pendulum[:noise]");
  sub->add_option("--init-file", o.init_file, "initial state-action points CSV (s0..,a0..)");
  sub->add_option("--metric", o.metric, "euclidean, weighted:w.., or features:path");
  sub->add_option("--gamma", o.cfg.gamma, "discount factor in [0, 1)");
  sub->add_option("--eta", o.eta, "Lipschitz radius, or 'auto'");
  sub->add_option("--iters", o.cfg.max_iters, "maximum iterations");
  sub->add_option("--tol", o.tol, "stopping tolerance on max |dq|");
  sub->add_option("--subsample", o.cfg.subsample, "rows updated per iteration (0 = all)");
  sub->add_option("--action-samples", o.cfg.action_samples, "target actions drawn per next state");
  sub->add_option("--init-points", o.cfg.init_points, "initial points drawn when no --init-file is given");
  sub->add_option("--kappa", o.cfg.kappa, "eta escalation factor");
  sub->add_option("--max-escalations", o.cfg.max_escalations, "escalations before giving up");
  sub->add_option("--seed", o.cfg.seed, "seed for action sampling, subsets and initial points");
  sub->add_option("--out", o.out, "report JSON path");
}

struct Prepared {
  TransitionDataset data;
  Environment env;
  Policy target;
  Metric metric;
  std::vector<Point> init;
  std::string eta_source = "given";
  json auto_eta;
};

double resolve_eta(RunOptions& o, Prepared& p) {
  if (o.eta != "auto") {
    char* end = nullptr;
    double v = std::strtod(o.eta.c_str(), &end);
    if (o.eta.empty() || *end != '\0') throw UsageError("--eta must be a number or 'auto'");
    return v;
  }
  auto er = estimate_reward_lipschitz(p.data, p.metric, kDefaultRowCap, o.cfg.seed);
  auto et = estimate_transition_lipschitz(p.data, p.metric, p.metric.state_metric(p.data.state_dim()),
                                          kDefaultRowCap, o.cfg.seed);
  p.auto_eta = {{"reward_lipschitz", er.value}, {"transition_lipschitz", et.value}, {"capped", er.capped || et.capped}};
  try {
    double eta = propagate_checked(er.value, et.value, o.cfg.gamma, p.metric);
    if (!(eta > 0.0)) throw UsageError("estimated Lipschitz norm is zero; pass --eta explicitly");
    p.eta_source = "auto";
    return eta;
  } catch (const Error& e) {
    throw UsageError(std::string("--eta auto unavailable: ") + e.what() + "; pass --eta explicitly");
  }
}

Prepared prepare(RunOptions& o) {
  Prepared p{load_dataset(o.data), parse_env(o.env, o.cfg.gamma), Policy::constant({0.0}), Metric::euclidean(), {}, "given", {}};
  p.target = parse_policy(o.policy, p.env);
  if (p.target.action_dim() != p.data.action_dim())
    throw UsageError("policy action dimension differs from the dataset");
  p.metric = parse_metric(o.metric, p.data);
  if (!o.tol.empty()) {
    char* end = nullptr;
    o.cfg.tol = std::strtod(o.tol.c_str(), &end);
    if (*end != '\0') throw UsageError("--tol must be a number");
  }
  o.cfg.eta = resolve_eta(o, p);
  o.cfg.validate();
  if (!o.init_file.empty()) {
    p.init = load_points(o.init_file, p.data.state_dim(), p.data.action_dim());
  } else {
    if (p.env.state_dim() != p.data.state_dim())
      throw UsageError("dataset does not match --env; pass --init-file");
    p.init = sample_init_points(p.env, p.target, o.cfg.init_points, o.cfg.seed);
  }
  return p;
}

json run_echo(const RunOptions& o, const Prepared& p) {
  json j = config_to_json(o.cfg);
  j["data"] = o.data;
  j["env"] = o.env;
  j["policy"] = p.target.describe();
  j["metric"] = p.metric.describe();
  j["init_file"] = o.init_file;
  j["eta_source"] = p.eta_source;
  if (!p.auto_eta.is_null()) j["eta_estimate"] = p.auto_eta;
  return j;
}

// ---------------------------------------------------------------------------

struct CollectOptions {
  std::string env;
  std::size_t trajectories = 30;
  std::size_t horizon = 100;
  std::uint64_t seed = 0;
  std::string out;
  double behavior_sigma = -1.0;
  double gamma = 0.95;
};

int cmd_collect(const CollectOptions& o, std::ostream& out) {
  auto env = parse_env(o.env, o.gamma);
  if (o.trajectories == 0 || o.horizon == 0) throw UsageError("--trajectories and --horizon must be positive");
  double sigma = o.behavior_sigma >= 0.0 ? o.behavior_sigma : env.default_behavior_sigma();
  auto data = collect(env, env.default_behavior(sigma), o.trajectories, o.horizon, o.seed);
  save_dataset(o.out, data);
  out << data.size() << " rows written to " << o.out << '\n';
  return exit_code::ok;
}

int cmd_bounds(RunOptions& o, std::ostream& out) {
  Prepared p = prepare(o);
  BoundsReport rep = run(p.data, p.target, o.cfg, p.init, p.metric);
  json j = report_to_json(rep);
  j["config"] = run_echo(o, p);
  if (!o.out.empty()) write_file_atomic(o.out, j.dump(2) + "\n");
  out << format_real(rep.lower) << ' ' << format_real(rep.upper) << ' ' << format_real(rep.eta_used) << ' '
      << rep.iterations << '\n';
  return rep.diagnosis == DiagnosisOutcome::exhausted ? exit_code::eta_exhausted : exit_code::ok;
}

int cmd_diagnose(RunOptions& o, std::ostream& out) {
  o.cfg.max_escalations = 0;
  if (o.init_file.empty()) o.cfg.init_points = 1;
  Prepared p = prepare(o);
  BoundsReport rep = run(p.data, p.target, o.cfg, p.init, p.metric);
  bool reject = rep.diagnosis == DiagnosisOutcome::exhausted;
  json j = {{"diagnosis", reject ? "reject" : "pass"},
            {"eta", o.cfg.eta},
            {"crossings", rep.crossings},
            {"iterations", rep.iterations}};
  if (!o.out.empty()) write_file_atomic(o.out, j.dump(2) + "\n");
  out << j.dump() << '\n';
  return reject ? exit_code::reject : exit_code::ok;
}

int cmd_oracle(RunOptions& o, const std::string& direction, std::ostream& out) {
  if (direction != "upper" && direction != "lower" && direction != "both")
    throw UsageError("--direction must be upper, lower or both");
  Prepared p = prepare(o);
  FrozenBellman fb = freeze(p.data, p.target, o.cfg.action_samples, o.cfg.gamma, o.cfg.seed);
  try {
    if (direction == "both") {
      double lo = lp_bound(fb, p.init, o.cfg.eta, p.metric, Direction::lower);
      double hi = lp_bound(fb, p.init, o.cfg.eta, p.metric, Direction::upper);
      out << format_real(lo) << ' ' << format_real(hi) << '\n';
    } else {
      auto dir = direction == "upper" ? Direction::upper : Direction::lower;
      out << format_real(lp_bound(fb, p.init, o.cfg.eta, p.metric, dir)) << '\n';
    }
  } catch (const Error& e) {
    if (e.code() != Errc::infeasible) throw;
    out << "infeasible\n";
    return exit_code::reject;
  }
  return exit_code::ok;
}

struct LipschitzOptions {
  std::string data;
  std::string metric = "euclidean";
  std::size_t row_cap = kDefaultRowCap;
  std::uint64_t seed = 0;
  double gamma = 0.95;
};

int cmd_estimate(const LipschitzOptions& o, std::ostream& out) {
  auto data = load_dataset(o.data);
  Metric metric = parse_metric(o.metric, data);
  check_gamma(o.gamma);
  auto er = estimate_reward_lipschitz(data, metric, o.row_cap, o.seed);
  auto et = estimate_transition_lipschitz(data, metric, metric.state_metric(data.state_dim()), o.row_cap, o.seed);
  json j = {{"reward", {{"value", er.value}, {"rows_used", er.rows_used}, {"capped", er.capped}}},
            {"transition", {{"value", et.value}, {"rows_used", et.rows_used}, {"capped", et.capped}}},
            {"gamma", o.gamma},
            {"separable", metric.separable()}};
  try {
    j["eta"] = propagate_checked(er.value, et.value, o.gamma, metric);
  } catch (const Error& e) {
    j["eta"] = nullptr;
    j["eta_error"] = std::string(to_string(e.code())) + ": " + e.what();
  }
  out << j.dump(2) << '\n';
  return exit_code::ok;
}

struct SweepOptions {
  std::string env = "synthetic";
  std::string axis;
  std::vector<std::string> values;
  std::size_t seeds = 5;
  std::size_t trajectories = 30;
  std::size_t horizon = 100;
  double behavior_sigma = -1.0;
  std::size_t truth_rollouts = 2000;
  std::size_t truth_horizon = 400;
  std::string out;
  RunOptions run;
};

int cmd_sweep(SweepOptions& o, std::ostream& out) {
  if (o.axis != "trajectories" && o.axis != "subsample") throw UsageError("--axis must be trajectories or subsample");
  if (o.values.empty()) throw UsageError("--values needs at least one entry");
  if (o.seeds == 0) throw UsageError("--seeds must be positive");
  LviConfig cfg = o.run.cfg;
  auto env = parse_env(o.env, cfg.gamma);
  Policy target = parse_policy(o.run.policy, env);
  {
    char* end = nullptr;
    cfg.eta = std::strtod(o.run.eta.c_str(), &end);
    if (*end != '\0') throw UsageError("sweep needs a numeric --eta");
  }
  cfg.validate();
  double sigma = o.behavior_sigma >= 0.0 ? o.behavior_sigma : env.default_behavior_sigma();
  Policy behavior = env.default_behavior(sigma);
  auto truth = ground_truth_return(env, target, cfg.gamma, o.truth_rollouts, o.truth_horizon, cfg.seed);

  std::ostringstream csv;
  csv << "axis,value,seed,lower,upper,truth,gap,relative_gap,eta,runtime_ms\n";
  for (const auto& value : o.values) {
    std::size_t n_t = o.trajectories;
    std::size_t subsample = cfg.subsample;
    if (value == "full") {
      if (o.axis != "subsample") throw UsageError("'full' is only valid on the subsample axis");
      subsample = 0;
    } else {
      char* end = nullptr;
      long long v = std::strtoll(value.c_str(), &end, 10);
      if (value.empty() || *end != '\0' || v <= 0) throw UsageError("bad sweep value '" + value + "'");
      (o.axis == "trajectories" ? n_t : subsample) = static_cast<std::size_t>(v);
    }
    for (std::size_t s = 0; s < o.seeds; ++s) {
      LviConfig c = cfg;
      c.seed = cfg.seed + s;
      c.subsample = subsample;
      auto t0 = std::chrono::steady_clock::now();
      auto data = collect(env, behavior, n_t, o.horizon, c.seed);
      auto init = sample_init_points(env, target, c.init_points, c.seed);
      auto rep = run(data, target, c, init);
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      double gap = rep.upper - rep.lower;
      csv << o.axis << ',' << value << ',' << c.seed << ',' << format_real(rep.lower) << ','
          << format_real(rep.upper) << ',' << format_real(truth.value) << ',' << format_real(gap) << ','
          << format_real(gap / std::abs(truth.value)) << ',' << format_real(rep.eta_used) << ','
          << format_real(std::round(ms)) << '\n';
    }
  }
  if (o.out.empty()) out << csv.str();
  else write_file_atomic(o.out, csv.str());
  return exit_code::ok;
}

// ---------------------------------------------------------------------------

int exit_for(Errc code) {
  switch (code) {
    case Errc::invalid_gamma:
    case Errc::invalid_argument:
    case Errc::contraction_violated:
    case Errc::invalid_delta:
    case Errc::empty_subset: return exit_code::usage;
    case Errc::eta_exhausted: return exit_code::eta_exhausted;
    case Errc::infeasible: return exit_code::reject;
    default: return exit_code::data;
  }
}

struct Commands {
  CLI::App app{"Certified interval bounds for off-policy evaluation by Lipschitz value iteration", "lipvi"};
  CollectOptions collect;
  RunOptions bounds, diagnose, oracle;
  std::string oracle_direction = "upper";
  LipschitzOptions lipschitz;
  SweepOptions sweep;
  std::string config;

  CLI::App* c_collect;
  CLI::App* c_bounds;
  CLI::App* c_sweep;
  CLI::App* c_estimate;
  CLI::App* c_diagnose;
  CLI::App* c_oracle;

  Commands() {
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    c_collect = app.add_subcommand("collect", "roll out the behavior policy and write a dataset");
    c_collect->add_option("--env", collect.env, "synthetic or pendulum")->required();
    c_collect->add_option("--trajectories", collect.trajectories, "number of episodes");
    c_collect->add_option("--horizon", collect.horizon, "steps per episode");
    c_collect->add_option("--seed", collect.seed, "seed");
    c_collect->add_option("--out", collect.out, "dataset CSV path")->required();
    c_collect->add_option("--behavior-sigma", collect.behavior_sigma, "behavior noise (default per env)");
    c_collect->add_option("--gamma", collect.gamma, "discount used to build the synthetic reward");

    c_bounds = app.add_subcommand("bounds", "compute the certified interval");
    add_run_options(c_bounds, bounds);

    c_sweep = app.add_subcommand("sweep", "bounds over a grid of sample sizes or subsample sizes, as CSV");
    c_sweep->add_option("--env", sweep.env, "synthetic or pendulum");
    c_sweep->add_option("--axis", sweep.axis, "trajectories or subsample")->required();
    c_sweep->add_option("--values", sweep.values, "comma separated values; 'full' allowed for subsample")
        ->required()
        ->delimiter(',');
    c_sweep->add_option("--seeds", sweep.seeds, "seeds per value");
    c_sweep->add_option("--trajectories", sweep.trajectories, "episodes when not swept");
    c_sweep->add_option("--horizon", sweep.horizon, "steps per episode");
    c_sweep->add_option("--behavior-sigma", sweep.behavior_sigma, "behavior noise (default per env)");
    c_sweep->add_option("--truth-rollouts", sweep.truth_rollouts, "Monte Carlo rollouts for the reference value");
    c_sweep->add_option("--truth-horizon", sweep.truth_horizon, "rollout length for the reference value");
    c_sweep->add_option("--policy", sweep.run.policy, "target policy");
    c_sweep->add_option("--gamma", sweep.run.cfg.gamma, "discount factor");
    c_sweep->add_option("--eta", sweep.run.eta, "Lipschitz radius");
    c_sweep->add_option("--iters", sweep.run.cfg.max_iters, "maximum iterations");
    c_sweep->add_option("--subsample", sweep.run.cfg.subsample, "rows per iteration when not swept");
    c_sweep->add_option("--action-samples", sweep.run.cfg.action_samples, "target actions per next state");
    c_sweep->add_option("--init-points", sweep.run.cfg.init_points, "initial points");
    c_sweep->add_option("--kappa", sweep.run.cfg.kappa, "eta escalation factor");
    c_sweep->add_option("--max-escalations", sweep.run.cfg.max_escalations, "escalations before giving up");
    c_sweep->add_option("--seed", sweep.run.cfg.seed, "first seed");
    c_sweep->add_option("--out", sweep.out, "CSV path (stdout when omitted)");
    sweep.run.cfg.subsample = 500;

    c_estimate = app.add_subcommand("estimate-lipschitz", "empirical reward and transition Lipschitz norms");
    c_estimate->add_option("--data", lipschitz.data, "dataset CSV")->required();
    c_estimate->add_option("--metric", lipschitz.metric, "euclidean, weighted:w.., or features:path");
    c_estimate->add_option("--row-cap", lipschitz.row_cap, "rows kept for the pair scan (0 = all)");
    c_estimate->add_option("--seed", lipschitz.seed, "seed for the row cap");
    c_estimate->add_option("--gamma", lipschitz.gamma, "discount for the propagated eta");

    c_diagnose = app.add_subcommand("diagnose", "test whether eta is consistent with the data (exit 4 on reject)");
    add_run_options(c_diagnose, diagnose);

    c_oracle = app.add_subcommand("oracle", "linear-program bound on a tiny instance");
    add_run_options(c_oracle, oracle);
    c_oracle->add_option("--direction", oracle_direction, "upper, lower or both");
    oracle.cfg.action_samples = 1;

    for (auto* sub : {c_collect, c_bounds, c_sweep, c_estimate, c_diagnose, c_oracle})
      sub->add_option("--config", config, "flat key=value file; command-line flags take precedence");
  }

  CLI::App* chosen() {
    for (auto* sub : {c_collect, c_bounds, c_sweep, c_estimate, c_diagnose, c_oracle})
      if (sub->parsed()) return sub;
    return nullptr;
  }
};

std::string with_dashes(const std::string& key) {
  std::string k = key.rfind("--", 0) == 0 ? key.substr(2) : key;
  for (char& ch : k)
    if (ch == '_') ch = '-';
  return "--" + k;
}

int dispatch(Commands& c, std::ostream& out) {
  CLI::App* sub = c.chosen();
  if (sub == c.c_collect) return cmd_collect(c.collect, out);
  if (sub == c.c_bounds) return cmd_bounds(c.bounds, out);
  if (sub == c.c_sweep) return cmd_sweep(c.sweep, out);
  if (sub == c.c_estimate) return cmd_estimate(c.lipschitz, out);
  if (sub == c.c_diagnose) return cmd_diagnose(c.diagnose, out);
  if (sub == c.c_oracle) return cmd_oracle(c.oracle, c.oracle_direction, out);
  throw UsageError("no command given");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    // First pass finds the command, its explicit flags and any config file.
    auto first = std::make_unique<Commands>();
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      first->app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      out << first->app.help(first->chosen() ? first->chosen()->get_name() : "");
      return exit_code::ok;
    } catch (const CLI::CallForVersion&) {
      out << kVersion << '\n';
      return exit_code::ok;
    } catch (const CLI::RequiredError& e) {
      // A required flag may come from the config file; the merged parse decides.
      if (first->config.empty() || !first->chosen()) {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
      }
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return exit_code::usage;
    }
    if (first->config.empty()) return dispatch(*first, out);

    // Second pass: config values for every flag not given on the command line.
    CLI::App* sub = first->chosen();
    std::vector<std::string> merged{sub->get_name()};
    for (const auto& [key, value] : read_config_file(first->config)) {
      std::string flag = with_dashes(key);
      if (flag == "--config") continue;
      CLI::Option* opt = nullptr;
      try {
        opt = sub->get_option(flag);
      } catch (const CLI::OptionNotFound&) {
        throw UsageError("unknown key '" + key + "' in " + first->config);
      }
      if (opt->count() > 0) continue;
      merged.push_back(flag);
      merged.push_back(value);
    }
    merged.insert(merged.end(), args.begin() + 1, args.end());
    auto second = std::make_unique<Commands>();
    std::vector<std::string> rev2(merged.rbegin(), merged.rend());
    try {
      second->app.parse(rev2);
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return exit_code::usage;
    }
    return dispatch(*second, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::data;
  }
}

}  // namespace lipvi::cli
