#include "sparselab/cli/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparselab/cli/csv.hpp"
#include "sparselab/cli/instance_file.hpp"
#include "sparselab/cli/suites.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/sharpness.hpp"
#include "sparselab/sparse_operator.hpp"
#include "sparselab/testing.hpp"

namespace sparselab::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Rounded to the 12 significant digits used everywhere in the output.
json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_number(x));
}

json characteristic(const CharacteristicReport& rep) {
  return {{"value", num(rep.value)},
          {"attained_on", to_string(rep.attained_on)},
          {"test_set", rep.test_set},
          {"lower_estimate", rep.lower_estimate}};
}

json report_json(const ComparabilityReport& rep) {
  json j = {{"statement", rep.statement}, {"lhs", num(rep.lhs)}, {"rhs", num(rep.rhs)},
            {"ratio", num(rep.ratio)},    {"trivial", rep.trivial}};
  if (!rep.instance.empty()) j["instance"] = rep.instance;
  if (!rep.branch.empty()) j["branch"] = rep.branch;
  return j;
}

std::string echo(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::string out_dir(const std::string& flag) {
  const char* env = std::getenv("SPARSELAB_OUT");
  std::string dir = env && *env ? env : (flag.empty() ? "." : flag);
  std::filesystem::create_directories(dir);
  return dir;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Flags {
  std::string instance;
  std::uint64_t seed = 7;
  bool seed_given = false;
  std::size_t trials = 0;
  int depth = -1;
  std::string variant = "primal";
  int eps_min_exp = 4;
  int eps_max_exp = 12;
  std::size_t fit_rows = 4;
  double depth_factor = 24.0;
  std::string out;
  double p = 2.0, q = 4.0, alpha = 0.75;
  std::string suite;
  std::string baselines;
  bool refresh = false;
};

InstanceFile load(const Flags& f) {
  InstanceFile inst = load_instance(f.instance);
  if (f.depth >= 0) inst.depth = f.depth;
  if (f.seed_given) inst.ascent.seed = f.seed;
  return inst;
}

json instance_echo(const InstanceFile& inst) {
  return {{"members", inst.family.size()},
          {"eta", num(inst.family.eta())},
          {"p", num(inst.cfg.p)},
          {"q", num(inst.cfg.q)},
          {"r", num(inst.cfg.r)},
          {"alpha", num(inst.cfg.alpha)},
          {"omega", inst.omega.describe()},
          {"sigma", inst.sigma.describe()},
          {"depth", inst.depth}};
}

json feasibility_json(const Feasibility& f) {
  json j = {{"feasible", f.feasible}, {"margin", num(f.margin)}, {"diagonal", f.diagonal},
            {"sobolev", f.sobolev},   {"diagnostic", f.diagnostic}};
  if (f.q_range) j["q_range"] = {num(f.q_range->first), num(f.q_range->second)};
  return j;
}

void require_feasible(const ExponentConfig& cfg) {
  const Feasibility f = feasibility(cfg);
  if (!f.feasible) {
    throw ParameterError("infeasible exponents: the two-weight class is empty unless -alpha + 1/q + 1/p' >= 0 (margin " +
                         format_number(f.margin) + ")");
  }
}

json cmd_char(const Flags& flags) {
  const InstanceFile inst = load(flags);
  require_feasible(inst.cfg);
  const DyadicInterval root{0, 0};
  json j;
  j["statement"] = "two-weight and A_infty characteristics";
  j["digest"] = inst.digest;
  j["instance"] = instance_echo(inst);
  j["feasibility"] = feasibility_json(feasibility(inst.cfg));
  j["characteristic"] = characteristic(two_weight_char(inst.omega, inst.sigma, inst.cfg, inst.family));
  j["characteristic_dyadic_grid"] =
      characteristic(two_weight_char(inst.omega, inst.sigma, inst.cfg, dyadic_grid_test_set(root, inst.depth)));
  j["characteristic_origin_anchored"] =
      characteristic(two_weight_char(inst.omega, inst.sigma, inst.cfg, origin_anchored_test_set(inst.depth)));
  j["ainfty_omega"] = characteristic(ainfty(inst.omega, root, inst.depth));
  j["ainfty_sigma"] = characteristic(ainfty(inst.sigma, root, inst.depth));
  if (inst.cfg.p == inst.cfg.q) {
    j["classical_ap"] = num(classical_ap(inst.omega, inst.sigma, inst.cfg.p, family_test_set(inst.family)));
  }
  return j;
}

json cmd_opnorm(const Flags& flags) {
  const InstanceFile inst = load(flags);
  const DyadicInterval root{0, 0};
  const OpNormEstimate est = estimate_opnorm(inst.family, inst.cfg, inst.omega, inst.sigma, inst.ascent);
  json j;
  j["statement"] = "two-weight norm bound for the sparse operator";
  j["digest"] = inst.digest;
  j["instance"] = instance_echo(inst);
  j["estimate"] = num(est.ascent_value);
  j["certified_lower"] = num(est.certified_lower);
  j["converged"] = est.converged;
  j["iterations"] = est.iterations;
  j["restarts"] = est.restarts;
  j["seed"] = est.seed;
  const double family_char = two_weight_char(inst.omega, inst.sigma, inst.cfg, inst.family).value;
  j["characteristic"] = num(family_char);
  j["lower_over_characteristic"] = family_char > 0.0 ? num(est.certified_lower / family_char) : json(nullptr);
  const Feasibility f = feasibility(inst.cfg);
  j["feasibility"] = feasibility_json(f);
  if (f.feasible) {
    const double grid_char =
        two_weight_char(inst.omega, inst.sigma, inst.cfg, dyadic_grid_test_set(root, inst.depth)).value;
    const double as = ainfty(inst.sigma, root, inst.depth).value;
    const double ao = ainfty(inst.omega, root, inst.depth).value;
    const double rhs = theorem_rhs(inst.cfg, grid_char, as, ao);
    j["theorem_rhs"] = {{"value", num(rhs)},
                        {"branch", to_string(theorem_branch(inst.cfg))},
                        {"characteristic", num(grid_char)},
                        {"ainfty_sigma", num(as)},
                        {"ainfty_omega", num(ao)}};
    j["estimate_over_rhs"] = rhs > 0.0 ? num(est.ascent_value / rhs) : json(nullptr);
  } else {
    j["theorem_rhs"] = nullptr;
  }
  return j;
}

json cmd_testing(const Flags& flags) {
  const InstanceFile inst = load(flags);
  const TestingConstants tc = testing_constants(inst.family, inst.cfg, inst.omega, inst.sigma);
  json j;
  j["statement"] = "testing constants T, T*";
  j["digest"] = inst.digest;
  j["instance"] = instance_echo(inst);
  j["T"] = {{"value", num(tc.T.value)}, {"attained_on", to_string(tc.T.attained_on)}};
  if (tc.Tstar) {
    j["Tstar"] = {{"value", num(tc.Tstar->value)}, {"attained_on", to_string(tc.Tstar->attained_on)}};
  } else {
    j["Tstar"] = nullptr;
  }
  j["comparison"] = report_json(check_prop31(inst.family, inst.cfg, inst.omega, inst.sigma, inst.ascent));
  return j;
}

struct Outcome {
  json report;
  int code = exit_ok;
};

Outcome cmd_verify(const Flags& flags) {
  const std::size_t trials = flags.trials ? flags.trials : default_trials(flags.suite);
  const SuiteRun run = run_suite(flags.suite, flags.seed, trials);
  const std::string canonical =
      "verify suite=" + flags.suite + " seed=" + std::to_string(flags.seed) + " trials=" + std::to_string(trials);
  const std::string dig = digest(canonical);

  CsvTable csv;
  csv.comments = {"sparselab " + canonical, "input digest fnv1a64 " + dig,
                  "units: lhs and rhs carry the units of the compared statement; ratio = lhs/rhs is dimensionless"};
  csv.columns = {"instance_id", "statement", "branch", "lhs", "rhs", "ratio", "trivial"};
  for (const auto& rep : run.reports) {
    csv.add_row({rep.instance, rep.statement, rep.branch.empty() ? "-" : rep.branch, format_number(rep.lhs),
                 format_number(rep.rhs), format_number(rep.ratio), rep.trivial ? "1" : "0"});
  }
  const std::string path = (std::filesystem::path(out_dir(flags.out)) / ("verify-" + flags.suite + ".csv")).string();
  csv.write(path);

  const std::string baseline_path = flags.baselines.empty() ? default_baselines_path() : flags.baselines;
  Outcome res;
  json& j = res.report;
  j["statement"] = flags.suite;
  j["digest"] = dig;
  j["csv"] = path;
  j["baselines"] = baseline_path;

  Baselines baselines;
  if (flags.refresh) {
    if (std::filesystem::exists(baseline_path)) baselines = load_baselines(baseline_path);
    for (auto it = baselines.begin(); it != baselines.end();) {
      it = it->first.first == flags.suite ? baselines.erase(it) : std::next(it);
    }
    for (const auto& [key, b] : calibrate(run)) baselines[key] = b;
    save_baselines(baseline_path, baselines);
    j["refreshed"] = true;
  } else {
    baselines = load_baselines(baseline_path);
  }

  std::map<std::string, json> summary;
  for (const auto& rep : run.reports) {
    json& s = summary[rep.statement];
    if (s.is_null()) s = {{"count", 0}, {"trivial", 0}};
    s["count"] = s["count"].get<int>() + 1;
    if (rep.trivial) {
      s["trivial"] = s["trivial"].get<int>() + 1;
      continue;
    }
    if (!s.contains("min") || rep.ratio < s["min"].get<double>()) s["min"] = num(rep.ratio);
    if (!s.contains("max") || rep.ratio > s["max"].get<double>()) s["max"] = num(rep.ratio);
  }
  for (auto& [statement, s] : summary) {
    auto bound = exact_bound(statement);
    if (!bound) {
      auto it = baselines.find({flags.suite, statement});
      if (it != baselines.end()) bound = it->second;
    }
    if (bound) s["baseline"] = {num(bound->lower), num(bound->upper)};
    s["exact_bound"] = exact_bound(statement).has_value();
  }
  j["statements"] = summary;

  const auto violations = check_baselines(run, baselines);
  j["violations"] = json::array();
  for (std::size_t i = 0; i < violations.size() && i < 20; ++i) j["violations"].push_back(violations[i].reason);
  j["violation_count"] = violations.size();
  j["pass"] = violations.empty();
  if (!violations.empty()) res.code = exit_baseline;
  return res;
}

json cmd_sharpness(const Flags& flags) {
  SharpnessConfig cfg;
  cfg.p = flags.p;
  cfg.q = flags.q;
  cfg.alpha = flags.alpha;
  cfg.variant = parse_variant(flags.variant);
  cfg.eps = eps_grid(flags.eps_min_exp, flags.eps_max_exp);
  cfg.depth_factor = flags.depth_factor;
  const auto rows = sweep(cfg);

  std::ostringstream canon;
  canon << "sharpness variant=" << flags.variant << " p=" << format_number(cfg.p) << " q=" << format_number(cfg.q)
        << " alpha=" << format_number(cfg.alpha) << " eps=2^-" << flags.eps_min_exp << "..2^-" << flags.eps_max_exp
        << " depth_factor=" << format_number(cfg.depth_factor);
  const std::string dig = digest(canon.str());

  CsvTable csv;
  csv.comments = {"sparselab " + canon.str(), "input digest fnv1a64 " + dig,
                  "units: eps, K and all norms dimensionless; tail_bound is relative"};
  csv.columns = {"eps",         "K",           "characteristic", "ratio",              "tail_bound",
                 "numerator",   "denominator", "exact_norm",     "identity_deviation", "square_sum_sup"};
  for (const auto& r : rows) {
    csv.add_row({format_number(r.eps), std::to_string(r.depth), format_number(r.characteristic),
                 format_number(r.ratio), format_number(r.tail_bound), format_number(r.numerator),
                 format_number(r.denominator), format_number(r.exact_norm), format_number(r.identity_deviation),
                 format_number(r.square_sum_sup)});
  }
  const std::string path =
      (std::filesystem::path(out_dir(flags.out)) / ("sharpness-" + flags.variant + ".csv")).string();
  csv.write(path);

  const SlopeFit fit = fit_tail(rows, flags.fit_rows);
  const double expected = expected_slope(cfg.p, cfg.q, cfg.alpha, cfg.variant);
  json j;
  j["statement"] = "sharpness-" + flags.variant;
  j["digest"] = dig;
  j["csv"] = path;
  j["fit"] = {{"slope", num(fit.slope)},
              {"intercept", num(fit.intercept)},
              {"max_residual", num(fit.max_residual)},
              {"eps_window", {num(fit.eps_max), num(fit.eps_min)}},
              {"rows", fit.count}};
  j["expected_slope"] = num(expected);
  j["expected_slope_combined"] = num(expected_slope(cfg.p, cfg.q, cfg.alpha, Variant::combined));
  j["slope_error"] = num(std::abs(fit.slope - expected));
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-weight norm laboratory for sparse dyadic operators", "sparselab"};
  app.require_subcommand(1);
  Flags flags;

  auto* ch = app.add_subcommand("char", "Two-weight, A_infty and classical characteristics of an instance");
  auto* op = app.add_subcommand("opnorm", "Operator-norm estimate, certified lower bound and mixed upper bound");
  auto* te = app.add_subcommand("testing", "Testing constants T and T*");
  auto* ve = app.add_subcommand("verify", "Seeded random-instance verification suite");
  auto* sh = app.add_subcommand("sharpness", "Extremizer sweep and log-log slope fit");

  for (auto* sub : {ch, op, te}) {
    sub->add_option("--instance", flags.instance, "JSON instance file")->required();
    sub->add_option("--depth", flags.depth, "Evaluation depth for A_infty and grid characteristics")
        ->check(CLI::Range(0, 24));
    sub->add_option("--out", flags.out, "Output directory");
  }
  for (auto* sub : {op, te}) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&flags](std::uint64_t s) { flags.seed = s, flags.seed_given = true; }, "Ascent seed");
  }
  ve->add_option("--suite", flags.suite, "Suite name")->required()->check(CLI::IsMember(suite_names()));
  ve->add_option("--seed", flags.seed, "Suite seed");
  ve->add_option("--trials", flags.trials, "Number of instances (default 100, 200 for thm11)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
  ve->add_option("--out", flags.out, "Output directory (SPARSELAB_OUT overrides)");
  ve->add_option("--baselines", flags.baselines, "Baselines file");
  ve->add_flag("--refresh-baselines", flags.refresh, "Recalibrate this suite's baselines (not for CI)");

  sh->add_option("--variant", flags.variant, "primal or dual")->check(CLI::IsMember({"primal", "dual"}));
  sh->add_option("--p", flags.p, "p");
  sh->add_option("--q", flags.q, "q");
  sh->add_option("--alpha", flags.alpha, "alpha");
  sh->add_option("--eps-min-exp", flags.eps_min_exp, "Largest eps is 2^-min");
  sh->add_option("--eps-max-exp", flags.eps_max_exp, "Smallest eps is 2^-max");
  sh->add_option("--fit-rows", flags.fit_rows, "Rows (smallest eps) used in the fit");
  sh->add_option("--depth-factor", flags.depth_factor, "K(eps) = ceil(factor / eps)");
  sh->add_option("--out", flags.out, "Output directory (SPARSELAB_OUT overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  const auto t0 = Clock::now();
  json report;
  int code = exit_ok;
  try {
    if (ch->parsed()) {
      report = cmd_char(flags);
    } else if (op->parsed()) {
      report = cmd_opnorm(flags);
    } else if (te->parsed()) {
      report = cmd_testing(flags);
    } else if (ve->parsed()) {
      auto res = cmd_verify(flags);
      report = std::move(res.report);
      code = res.code;
    } else {
      report = cmd_sharpness(flags);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_parse;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return exit_parameter;
  } catch (const PreconditionError& e) {
    err << "parameter error: " << e.what() << '\n';
    return exit_parameter;
  } catch (const DegenerateInstanceError& e) {
    err << "degenerate: " << e.what() << '\n';
    return exit_degenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  report["command"] = echo(argc, argv);
  report["exit_code"] = code;
  report["timings"] = {{"wall_seconds", seconds_since(t0)}};
  out << report.dump(2) << '\n';
  if (code == exit_baseline) err << "baseline violation: see report\n";
  return code;
}

}  // namespace sparselab::cli
