#include "sparselab/cli/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparselab/cli/csv.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/instances.hpp"
#include "sparselab/principal_cubes.hpp"
#include "sparselab/random.hpp"

#ifndef SPARSELAB_BASELINES
#define SPARSELAB_BASELINES "data/baselines.txt"
#endif

namespace sparselab::cli {
namespace {

constexpr std::uint64_t kExtraStream = 0x9e3779b97f4a7c15ULL;

// Coefficients and auxiliary draws come from a stream separate from the
// instance's own, so the instance itself is shared across suites.
Rng extra_rng(std::uint64_t seed, std::size_t index) { return Rng(seed ^ kExtraStream, index); }

Eigen::VectorXd log_uniform_vector(Rng& rng, std::size_t n, double lo, double hi) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = rng.log_uniform(lo, hi);
  return v;
}

void tag(std::vector<ComparabilityReport>& out, ComparabilityReport rep, const Instance& inst) {
  rep.instance = inst.id;
  out.push_back(std::move(rep));
}

void run_instance(const std::string& suite, const Instance& inst, std::uint64_t seed, std::size_t index,
                  std::vector<ComparabilityReport>& out) {
  const DyadicInterval root{0, 0};
  AscentOptions opts;
  opts.seed = seed * 1000003ULL + index;

  if (suite == "prop31") {
    tag(out, check_prop31(inst.family, inst.cfg, inst.omega, inst.sigma, opts), inst);
  } else if (suite == "lemma32") {
    Rng rng = extra_rng(seed, index);
    Eigen::VectorXd c = log_uniform_vector(rng, inst.family.size(), 0.1, 10.0);
    for (std::size_t i = 0; i < inst.family.size(); ++i) {
      c[static_cast<Eigen::Index>(i)] *= std::pow(inst.family[i].length(), -inst.cfg.alpha * inst.cfg.r);
    }
    tag(out, check_lemma32(inst.family, inst.cfg, inst.omega, inst.sigma, c, opts), inst);
  } else if (suite == "lemma34") {
    Rng rng = extra_rng(seed, index);
    PositiveDyadicOperator op{inst.family, log_uniform_vector(rng, inst.family.size(), 0.1, 10.0)};
    tag(out, lsu_check(op, inst.cfg.p, inst.cfg.q, inst.omega, inst.sigma, opts), inst);
  } else if (suite == "lemma41") {
    Rng rng = extra_rng(seed, index);
    const Eigen::VectorXd a = log_uniform_vector(rng, inst.family.size(), 0.1, 10.0);
    tag(out, check_lemma41(inst.family, a, inst.sigma, inst.cfg.p), inst);
  } else if (suite == "lemma43") {
    Rng rng = extra_rng(seed, index);
    MeasureEstimateQuery query;
    query.a = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.1, 1.0);
    query.b = rng.uniform(0.0, 1.0);
    query.c = rng.uniform(0.0, 1.0);
    const double sum = query.a + query.b + query.c;
    if (sum < 1.0) {
      const double scale = rng.uniform(1.0, 1.5) / sum;
      query = {query.a * scale, query.b * scale, query.c * scale};
    }
    const auto r_member = static_cast<std::size_t>(rng.integer(0, static_cast<int>(inst.family.size()) - 1));
    const double as = ainfty(inst.sigma, root, inst.depth).value;
    const double ao = ainfty(inst.omega, root, inst.depth).value;
    tag(out, check_lemma43(inst.family, inst.omega, inst.sigma, query, r_member, as, ao), inst);
  } else if (suite == "principal") {
    Rng rng = extra_rng(seed, index);
    const Weight f = random_weight(rng, inst.depth, 1e-3, 1e3);
    const StoppingFamily stopping = build_principal_cubes(inst.family, f, inst.sigma);
    const PrincipalDomination dom = principal_domination(inst.family, stopping, inst.sigma, inst.cfg.p);
    tag(out, make_report("lemma33-pointwise", "", dom.worst_ratio * dom.constant, dom.constant), inst);
    tag(out, make_report("lemma33-integrated", "", dom.integrated_lhs, dom.integrated_rhs), inst);
  } else if (suite == "thm42") {
    const double ch = two_weight_char(inst.omega, inst.sigma, inst.cfg, dyadic_grid_test_set(root, inst.depth)).value;
    const double as = ainfty(inst.sigma, root, inst.depth).value;
    const double ao = ainfty(inst.omega, root, inst.depth).value;
    for (auto& rep : verify_thm42(inst.family, inst.cfg, inst.omega, inst.sigma, ch, as, ao)) tag(out, rep, inst);
  } else if (suite == "thm11") {
    const OpNormEstimate est = estimate_opnorm(inst.family, inst.cfg, inst.omega, inst.sigma, opts);
    const double family_char = two_weight_char(inst.omega, inst.sigma, inst.cfg, inst.family).value;
    const double grid_char =
        two_weight_char(inst.omega, inst.sigma, inst.cfg, dyadic_grid_test_set(root, inst.depth)).value;
    const double as = ainfty(inst.sigma, root, inst.depth).value;
    const double ao = ainfty(inst.omega, root, inst.depth).value;
    tag(out, make_report("thm11-lower", "", family_char, est.certified_lower), inst);
    tag(out, make_report("thm11-sandwich", "", est.certified_lower, est.ascent_value), inst);
    auto upper = make_report("thm11-upper", "", est.ascent_value, theorem_rhs(inst.cfg, grid_char, as, ao));
    upper.branch = to_string(theorem_branch(inst.cfg));
    tag(out, upper, inst);
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prop31",    "lemma32", "lemma34", "lemma41",
                                              "lemma43",   "principal", "thm42", "thm11"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::size_t default_trials(const std::string& suite) { return suite == "thm11" ? 200 : 100; }

SuiteRun run_suite(const std::string& suite, std::uint64_t seed, std::size_t trials) {
  if (!is_suite(suite)) throw ParameterError("unknown suite '" + suite + "'");
  if (trials < 1) throw ParameterError("trials must be at least 1");
  RandomSpec spec;
  if (suite == "lemma32") spec.range = ConfigRange::linearizing;
  SuiteRun run{suite, seed, trials, {}};
  for (std::size_t i = 0; i < trials; ++i) {
    run_instance(suite, random_instance(seed, i, spec), seed, i, run.reports);
  }
  return run;
}

std::string default_baselines_path() { return SPARSELAB_BASELINES; }

Baselines load_baselines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DegenerateInstanceError("cannot read baselines file " + path);
  Baselines out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string suite, statement;
    Bound b;
    if (!(ls >> suite)) continue;
    if (!(ls >> statement >> b.lower >> b.upper)) {
      throw DegenerateInstanceError(path + ":" + std::to_string(lineno) + ": expected 'suite statement lower upper'");
    }
    out[{suite, statement}] = b;
  }
  return out;
}

void save_baselines(const std::string& path, const Baselines& baselines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DegenerateInstanceError("cannot write baselines file " + path);
  out << "# Frozen ratio windows for the verification suites.\n"
         "# suite statement lower upper\n";
  for (const auto& [key, b] : baselines) {
    out << key.first << ' ' << key.second << ' ' << format_number(b.lower) << ' ' << format_number(b.upper) << '\n';
  }
}

std::optional<Bound> exact_bound(const std::string& statement) {
  if (statement == "lemma33-pointwise" || statement == "lemma33-integrated" || statement == "thm11-lower" ||
      statement == "thm11-sandwich") {
    return Bound{0.0, 1.0 + 1e-12};
  }
  return std::nullopt;
}

std::vector<Violation> check_baselines(const SuiteRun& run, const Baselines& baselines) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < run.reports.size(); ++i) {
    const auto& rep = run.reports[i];
    if (rep.trivial) continue;
    std::optional<Bound> bound = exact_bound(rep.statement);
    if (!bound) {
      auto it = baselines.find({run.suite, rep.statement});
      if (it == baselines.end()) {
        out.push_back({i, "no baseline for " + run.suite + "/" + rep.statement});
        continue;
      }
      bound = it->second;
    }
    if (!(rep.ratio >= bound->lower && rep.ratio <= bound->upper)) {
      out.push_back({i, rep.instance + " " + rep.statement + " ratio " + format_number(rep.ratio) +
                            " outside [" + format_number(bound->lower) + ", " + format_number(bound->upper) + "]"});
    }
  }
  return out;
}

Baselines calibrate(const SuiteRun& run, double margin) {
  Baselines out;
  for (const auto& rep : run.reports) {
    if (rep.trivial || exact_bound(rep.statement)) continue;
    if (!std::isfinite(rep.ratio)) {
      throw DegenerateInstanceError("cannot calibrate on a non-finite ratio (" + rep.instance + " " + rep.statement + ")");
    }
    const std::pair<std::string, std::string> key{run.suite, rep.statement};
    auto it = out.find(key);
    if (it == out.end()) {
      out[key] = {rep.ratio, rep.ratio};
    } else {
      it->second.lower = std::min(it->second.lower, rep.ratio);
      it->second.upper = std::max(it->second.upper, rep.ratio);
    }
  }
  for (auto& [key, b] : out) b = {b.lower / margin, b.upper * margin};
  return out;
}

}  // namespace sparselab::cli
