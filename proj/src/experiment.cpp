#include "glbai/experiment.hpp"

#include "glbai/gape.hpp"
#include "glbai/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace glbai {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::NumArms: return "K";
    case SweepAxis::Dim: return "d";
    case SweepAxis::Epsilon: return "epsilon";
  }
  return "none";
}

namespace {

template <typename T>
T get_field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + std::string(key) + "' has the wrong type");
  }
}

Index get_count(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw ConfigError("config field '" + std::string(key) + "' must be an integer");
  return v.get<Index>();
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "algorithm",   "link",        "K",           "d",           "epsilon",           "delta",
      "alpha_mode",  "num_replications", "base_seed", "max_steps", "exploration_length", "param_bound",
      "reward_bound", "noise_sigma", "norm_cap_factor", "track_coverage", "features_csv", "theta_csv",
      "sweep_axis",  "sweep_values"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");

  ExperimentConfig c;
  if (doc.contains("algorithm")) c.algorithm = get_field<std::string>(doc, "algorithm");
  if (doc.contains("link")) {
    try {
      c.link = parse_link_kind(get_field<std::string>(doc, "link"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config field 'link': ") + e.what());
    }
  }
  if (doc.contains("K")) c.num_arms = get_count(doc, "K");
  if (doc.contains("d")) c.dim = get_count(doc, "d");
  if (doc.contains("epsilon")) c.epsilon = get_field<double>(doc, "epsilon");
  if (doc.contains("delta")) c.delta = get_field<double>(doc, "delta");
  if (doc.contains("alpha_mode")) {
    const json& a = doc.at("alpha_mode");
    if (a.is_string() && a.get<std::string>() == "theoretical") {
      c.alpha_mode = AlphaMode::theoretical();
    } else if (a.is_string() && a.get<std::string>() == "empirical") {
      c.alpha_mode = AlphaMode::empirical();
    } else if (a.is_number() && a.get<double>() > 0) {
      c.alpha_mode = AlphaMode::fixed(a.get<double>());
    } else {
      throw ConfigError("config field 'alpha_mode' must be \"theoretical\", \"empirical\" or a positive number");
    }
  }
  if (doc.contains("num_replications")) c.num_replications = get_count(doc, "num_replications");
  if (doc.contains("base_seed")) c.base_seed = get_field<std::uint64_t>(doc, "base_seed");
  if (doc.contains("max_steps")) c.max_steps = get_count(doc, "max_steps");
  if (doc.contains("exploration_length")) c.exploration_length = get_count(doc, "exploration_length");
  if (doc.contains("param_bound")) c.param_bound = get_field<double>(doc, "param_bound");
  if (doc.contains("reward_bound")) c.reward_bound = get_field<double>(doc, "reward_bound");
  if (doc.contains("noise_sigma")) c.noise_sigma = get_field<double>(doc, "noise_sigma");
  if (doc.contains("norm_cap_factor")) c.norm_cap_factor = get_field<double>(doc, "norm_cap_factor");
  if (doc.contains("track_coverage")) c.track_coverage = get_field<bool>(doc, "track_coverage");
  const auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  if (doc.contains("features_csv")) c.features_csv = resolve(get_field<std::string>(doc, "features_csv"));
  if (doc.contains("theta_csv")) c.theta_csv = resolve(get_field<std::string>(doc, "theta_csv"));
  if (doc.contains("sweep_axis")) {
    const auto axis = get_field<std::string>(doc, "sweep_axis");
    if (axis == "none") c.sweep_axis = SweepAxis::None;
    else if (axis == "K") c.sweep_axis = SweepAxis::NumArms;
    else if (axis == "d") c.sweep_axis = SweepAxis::Dim;
    else if (axis == "epsilon") c.sweep_axis = SweepAxis::Epsilon;
    else throw ConfigError("config field 'sweep_axis' must be one of none, K, d, epsilon");
  }
  if (doc.contains("sweep_values")) c.sweep_values = get_field<std::vector<double>>(doc, "sweep_values");
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.algorithm != "glgape" && c.algorithm != "gape")
    throw ConfigError("config field 'algorithm' must be \"glgape\" or \"gape\"");
  if (c.num_replications < 1) throw ConfigError("config field 'num_replications' must be at least 1");
  if (c.num_arms < 2) throw ConfigError("config field 'K' must be at least 2");
  if (c.dim < 1) throw ConfigError("config field 'd' must be at least 1");
  if (!(c.epsilon > 0)) throw ConfigError("config field 'epsilon' must be positive");
  if (!(c.delta > 0 && c.delta < 1)) throw ConfigError("config field 'delta' must lie in (0, 1)");
  if (c.max_steps < 2) throw ConfigError("config field 'max_steps' must be at least 2");
  if (c.exploration_length && *c.exploration_length < 1)
    throw ConfigError("config field 'exploration_length' must be at least 1");
  if (c.param_bound && !(*c.param_bound > 0)) throw ConfigError("config field 'param_bound' must be positive");
  if (c.reward_bound && !(*c.reward_bound > 0)) throw ConfigError("config field 'reward_bound' must be positive");
  if (c.noise_sigma < 0) throw ConfigError("config field 'noise_sigma' must be non-negative");
  if (!(c.norm_cap_factor > 0)) throw ConfigError("config field 'norm_cap_factor' must be positive");
  if (c.theta_csv && !c.features_csv) throw ConfigError("config field 'theta_csv' requires 'features_csv'");
  if (c.features_csv && !c.theta_csv)
    throw ConfigError("config field 'theta_csv' is required to simulate rewards for 'features_csv'");
  if (c.algorithm == "gape" && c.link != LinkKind::Logistic)
    throw ConfigError("config field 'link' must be \"logistic\" for algorithm gape (binary rewards)");
  if (c.sweep_axis != SweepAxis::None) {
    if (c.sweep_values.empty()) throw ConfigError("config field 'sweep_values' must be non-empty");
    for (double v : c.sweep_values) {
      if (c.sweep_axis == SweepAxis::Epsilon ? !(v > 0) : (v < 1 || v != std::floor(v)))
        throw ConfigError("config field 'sweep_values' has an invalid entry for axis " +
                          std::string(to_string(c.sweep_axis)));
    }
  }
  if (c.sweep_axis == SweepAxis::None && !c.sweep_values.empty())
    throw ConfigError("config field 'sweep_values' given without 'sweep_axis'");
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

BanditInstance replication_instance(const ExperimentConfig& config, std::uint64_t seed) {
  InstanceOptions opts;
  opts.reward_bound = config.reward_bound;
  opts.noise_sigma = config.noise_sigma;
  if (config.features_csv) return load_instance_csv(*config.features_csv, config.theta_csv, config.link, opts);
  Rng rng(seed, Stream::Instance);
  return sample_instance(config.num_arms, config.dim, config.link, rng, opts);
}

RunConfig run_config_for(const ExperimentConfig& config, std::uint64_t seed) {
  RunConfig rc;
  rc.epsilon = config.epsilon;
  rc.delta = config.delta;
  rc.exploration_length = config.exploration_length;
  rc.alpha_mode = config.alpha_mode;
  rc.max_steps = config.max_steps;
  rc.seed = seed;
  rc.param_bound = config.param_bound;
  rc.norm_cap_factor = config.norm_cap_factor;
  rc.track_coverage = config.track_coverage;
  rc.keep_trace = false;
  return rc;
}

ReplicationOutcome run_replication(const ExperimentConfig& config, const std::string& algorithm,
                                   std::uint64_t seed) {
  const BanditInstance inst = replication_instance(config, seed);
  RunResult res;
  if (algorithm == "gape") {
    res = run_gape(inst, config.epsilon, config.delta, config.max_steps, seed, false);
  } else {
    res = run_glgape(inst, run_config_for(config, seed));
  }
  ReplicationOutcome out{};
  out.seed = seed;
  out.algorithm = algorithm;
  out.num_arms = inst.num_arms();
  out.dim = inst.dim();
  out.epsilon = config.epsilon;
  out.delta = config.delta;
  out.tau = res.tau;
  out.returned_arm = res.returned_arm;
  out.budget_exhausted = res.budget_exhausted;
  out.diagnostics = res.diagnostics;
  out.alpha = res.alpha;
  out.final_width_scale = res.final_width_scale;
  out.best_arm = -1;
  out.true_gap = std::numeric_limits<double>::quiet_NaN();
  if (inst.has_ground_truth()) {
    const InstanceStats st = instance_stats(inst);
    out.best_arm = st.best_arm;
    out.true_gap = inst.means(st.best_arm) - inst.means(res.returned_arm);
    out.success = out.true_gap < config.epsilon;
    if (algorithm == "glgape" && config.delta < std::min(1.0, static_cast<double>(inst.dim()) / std::numbers::e)) {
      out.theory = complexity_report({inst.dim(), inst.num_arms(), config.epsilon, config.delta, res.kappa,
                                      res.link.reward_bound, res.link.slope_floor, res.link.lipschitz,
                                      st.delta_min});
    }
  }
  return out;
}

std::vector<ReplicationOutcome> run_replications(const ExperimentConfig& config, const std::string& algorithm,
                                                 unsigned workers, std::ostream* progress) {
  const std::size_t n = static_cast<std::size_t>(config.num_replications);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::vector<ReplicationOutcome> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;
  const auto worker = [&] {
    for (std::size_t r = next++; r < n; r = next++) {
      try {
        results[r] = run_replication(config, algorithm, config.base_seed + r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(log_mutex);
        *progress << "[" << algorithm << "] replication " << finished << "/" << n;
        if (!errors[r]) *progress << " tau=" << results[r].tau;
        *progress << '\n';
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

void write_row(std::ostream& out, const ReplicationOutcome& r) {
  const bool truth = r.best_arm >= 0;
  out << r.seed << ',' << r.algorithm << ',' << r.num_arms << ',' << r.dim << ',' << format_number(r.epsilon)
      << ',' << format_number(r.delta) << ',' << r.tau << ',' << r.returned_arm << ','
      << (truth ? std::to_string(r.best_arm) : "") << ',' << format_number(r.true_gap) << ','
      << (truth ? (r.success ? "1" : "0") : "") << ',' << (r.budget_exhausted ? 1 : 0) << '\n';
}

json diagnostics_json(const Diagnostics& d) {
  return {{"coverage_violations", d.coverage_violations},
          {"coverage_checks", d.coverage_checks},
          {"allocation_bound_checks", d.allocation_bound_checks},
          {"allocation_bound_violations", d.allocation_bound_violations},
          {"weight_bound_checks", d.weight_bound_checks},
          {"weight_bound_violations", d.weight_bound_violations},
          {"mle_failures", d.mle_failures},
          {"mle_projected", d.mle_projected},
          {"degenerate_directions", d.degenerate_directions},
          {"truncated_rewards", d.truncated_rewards}};
}

json theory_json(std::uint64_t seed, const ComplexityReport& t) {
  return {{"seed", seed},
          {"H_eps", t.h_eps},
          {"bound_tau", t.bound_tau},
          {"d", t.inputs.dim},
          {"K", t.inputs.num_arms},
          {"epsilon", t.inputs.epsilon},
          {"delta", t.inputs.delta},
          {"kappa", t.inputs.kappa},
          {"R", t.inputs.reward_bound},
          {"c_mu", t.inputs.slope_floor},
          {"k_mu", t.inputs.lipschitz},
          {"delta_min", t.inputs.delta_min}};
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_run_csv(std::ostream& out, const std::vector<ReplicationOutcome>& rows) {
  out << kRunCsvHeader << '\n';
  for (const auto& r : rows) write_row(out, r);
}

json summarize(const std::vector<ReplicationOutcome>& rows) {
  std::vector<double> taus;
  double successes = 0, with_truth = 0;
  Index exhausted = 0;
  Diagnostics total;
  json theory = json::array();
  for (const auto& r : rows) {
    taus.push_back(static_cast<double>(r.tau));
    if (r.best_arm >= 0) {
      with_truth += 1;
      successes += r.success ? 1 : 0;
    }
    exhausted += r.budget_exhausted ? 1 : 0;
    const Diagnostics& d = r.diagnostics;
    total.coverage_violations += d.coverage_violations > 0 ? 1 : 0;
    total.coverage_checks += d.coverage_checks;
    total.allocation_bound_checks += d.allocation_bound_checks;
    total.allocation_bound_violations += d.allocation_bound_violations;
    total.weight_bound_checks += d.weight_bound_checks;
    total.weight_bound_violations += d.weight_bound_violations;
    total.mle_failures += d.mle_failures;
    total.mle_projected += d.mle_projected;
    total.degenerate_directions += d.degenerate_directions;
    total.truncated_rewards += d.truncated_rewards;
    if (r.theory) theory.push_back(theory_json(r.seed, *r.theory));
  }
  json s;
  s["replications"] = rows.size();
  if (!rows.empty()) {
    s["algorithm"] = rows.front().algorithm;
    s["mean_tau"] = stats::mean(taus);
    s["median_tau"] = stats::median(taus);
    const auto ci = stats::mean_ci95(taus);
    s["mean_tau_ci95"] = {ci.first, ci.second};
  }
  s["budget_exhausted"] = exhausted;
  if (with_truth > 0) {
    s["success_rate"] = successes / with_truth;
    const auto ci = stats::wilson_ci95(successes, with_truth);
    s["success_rate_ci95"] = {ci.first, ci.second};
  }
  json diag = diagnostics_json(total);
  diag["runs_with_coverage_violation"] = diag["coverage_violations"];
  diag.erase("coverage_violations");
  s["diagnostics"] = diag;
  if (!theory.empty()) s["theory"] = theory;
  return s;
}

json cmd_run(const ExperimentConfig& config, const fs::path& out_dir, unsigned workers, std::ostream* progress) {
  validate(config);
  fs::create_directories(out_dir);
  const auto rows = run_replications(config, config.algorithm, workers, progress);
  auto csv = open_out(out_dir / "runs.csv");
  write_run_csv(csv, rows);
  json summary = summarize(rows);
  summary["command"] = "run";
  summary["alpha_mode"] = config.alpha_mode.describe();
  write_json(out_dir / "summary.json", summary);
  return summary;
}

json cmd_sweep(const ExperimentConfig& config, const fs::path& out_dir, unsigned workers, std::ostream* progress) {
  validate(config);
  if (config.sweep_axis == SweepAxis::None) throw ConfigError("config field 'sweep_axis' must be set for sweep");
  if (config.features_csv && config.sweep_axis != SweepAxis::Epsilon)
    throw ConfigError("config field 'sweep_axis' can only be epsilon for a CSV instance");
  fs::create_directories(out_dir);

  auto csv = open_out(out_dir / "sweep.csv");
  csv << "axis,value,replication," << kRunCsvHeader << '\n';
  json points = json::array();
  std::vector<double> xs, taus;
  for (double value : config.sweep_values) {
    ExperimentConfig c = config;
    switch (config.sweep_axis) {
      case SweepAxis::NumArms: c.num_arms = static_cast<Index>(value); break;
      case SweepAxis::Dim: c.dim = static_cast<Index>(value); break;
      case SweepAxis::Epsilon: c.epsilon = value; break;
      case SweepAxis::None: break;
    }
    validate(c);
    if (progress) *progress << "[sweep] " << to_string(config.sweep_axis) << " = " << value << '\n';
    const auto rows = run_replications(c, c.algorithm, workers, progress);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      csv << to_string(config.sweep_axis) << ',' << format_number(value) << ',' << r << ',';
      write_row(csv, rows[r]);
      xs.push_back(value);
      taus.push_back(static_cast<double>(rows[r].tau));
    }
    json p = summarize(rows);
    p.erase("theory");
    p["value"] = value;
    points.push_back(p);
  }
  json summary{{"command", "sweep"}, {"axis", to_string(config.sweep_axis)}, {"points", points}};
  if (xs.size() >= 3) {
    const auto sp = stats::spearman(xs, taus);
    summary["spearman"] = {{"rho", sp.rho}, {"p_increasing", sp.p_increasing}, {"p_decreasing", sp.p_decreasing}};
  }
  write_json(out_dir / "sweep_summary.json", summary);
  return summary;
}

json cmd_compare(const ExperimentConfig& config, const fs::path& out_dir, unsigned workers, std::ostream* progress) {
  validate(config);
  if (config.link != LinkKind::Logistic)
    throw ConfigError("config field 'link' must be \"logistic\" for compare (GapE needs binary rewards)");
  fs::create_directories(out_dir);
  const auto ours = run_replications(config, "glgape", workers, progress);
  const auto base = run_replications(config, "gape", workers, progress);

  auto csv = open_out(out_dir / "compare.csv");
  csv << kRunCsvHeader << '\n';
  for (std::size_t r = 0; r < ours.size(); ++r) {
    write_row(csv, ours[r]);
    write_row(csv, base[r]);
  }
  json s1 = summarize(ours), s2 = summarize(base);
  s1.erase("theory");
  json summary{{"command", "compare"},
               {"glgape", s1},
               {"gape", s2},
               {"tau_ratio", s2["mean_tau"].get<double>() / s1["mean_tau"].get<double>()}};
  write_json(out_dir / "compare_summary.json", summary);
  return summary;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Best-arm identification in generalized linear bandits"};
  app.require_subcommand(1);
  fs::path config_path;
  fs::path out_dir = "glbai_out";
  unsigned workers = 0;
  bool quiet = false;
  for (const char* name : {"run", "sweep", "compare"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (default: logical cores)");
    sub->add_flag("--quiet", quiet, "no progress on standard error");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ExperimentConfig config;
  try {
    config = load_config(config_path);
    if (const char* env = std::getenv("GLBAI_SEED")) {
      std::uint64_t seed = 0;
      const std::string_view s(env);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("GLBAI_SEED must be an unsigned integer");
      config.base_seed = seed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "glbai: " << e.what() << '\n';
    return 2;
  }

  std::ostream* progress = quiet ? nullptr : &std::cerr;
  try {
    json summary;
    if (command == "run") summary = cmd_run(config, out_dir, workers, progress);
    else if (command == "sweep") summary = cmd_sweep(config, out_dir, workers, progress);
    else summary = cmd_compare(config, out_dir, workers, progress);
    json brief = summary;
    brief.erase("theory");
    std::cout << brief.dump(2) << '\n';
  } catch (const ConfigError& e) {
    std::cerr << "glbai: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "glbai: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace glbai
