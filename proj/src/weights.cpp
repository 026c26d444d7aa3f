#include "sparselab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sparselab/errors.hpp"

namespace sparselab {
namespace {

// int_lo^hi c x^beta dx for 0 <= lo <= hi.
double power_mass(const PowerDensity& w, double lo, double hi) {
  if (lo < 0.0) throw ParameterError("power weights are only defined on [0, inf)");
  if (hi <= lo) return 0.0;
  const double e = w.exponent + 1.0;
  if (lo == 0.0) return w.coefficient * std::pow(hi, e) / e;
  // lo^e ((hi/lo)^e - 1) / e without cancellation for short intervals.
  return w.coefficient * std::pow(lo, e) * std::expm1(e * std::log1p((hi - lo) / lo)) / e;
}

template <class Fn>
void for_each_overlap(const StepFunction& s, double lo, double hi, Fn&& fn) {
  auto it = std::upper_bound(s.atoms.begin(), s.atoms.end(), lo,
                             [](double v, const DyadicInterval& a) { return v < a.right(); });
  for (; it != s.atoms.end() && it->left() < hi; ++it) {
    const double a = std::max(lo, it->left());
    const double b = std::min(hi, it->right());
    if (b > a) fn(s.values[it - s.atoms.begin()], a, b);
  }
}

}  // namespace

Weight Weight::power(double exponent, double coefficient) {
  if (!(exponent > -1.0)) throw ParameterError("power weight exponent must exceed -1");
  if (!(coefficient >= 0.0)) throw ParameterError("power weight coefficient must be nonnegative");
  return Weight(PowerDensity{exponent, coefficient});
}

Weight Weight::piecewise(StepFunction density) {
  if (!density.nonnegative()) throw ParameterError("piecewise weight values must be nonnegative");
  if (!density.values.allFinite()) throw ParameterError("piecewise weight values must be finite");
  return Weight(std::move(density));
}

Weight Weight::piecewise(const DyadicInterval& root, int depth, Eigen::VectorXd values) {
  return piecewise(StepFunction(uniform_atoms(root, depth), std::move(values)));
}

std::string Weight::describe() const {
  std::ostringstream out;
  out.precision(12);
  if (is_power()) {
    const auto& p = as_power();
    out << "power(beta=" << p.exponent;
    if (p.coefficient != 1.0) out << ", c=" << p.coefficient;
    out << ')';
  } else {
    out << "piecewise(" << as_piecewise().size() << " atoms)";
  }
  return out.str();
}

Weight pow(const Weight& w, double e) {
  if (w.is_power()) {
    const auto& p = w.as_power();
    const double beta = p.exponent * e;
    if (!(beta > -1.0)) {
      std::ostringstream msg;
      msg << "power weight |x|^" << p.exponent << " raised to " << e
          << " is not locally integrable at the origin";
      throw ParameterError(msg.str());
    }
    return Weight::power(beta, std::pow(p.coefficient, e));
  }
  StepFunction s = w.as_piecewise();
  if (e < 0.0 && (s.values.array() <= 0.0).any()) {
    throw ParameterError("negative power of a piecewise weight with zero values");
  }
  s.values = s.values.array().pow(e).matrix();
  return Weight::piecewise(std::move(s));
}

Weight scaled(const Weight& w, double c) {
  if (!(c >= 0.0)) throw ParameterError("weight scale must be nonnegative");
  if (w.is_power()) return Weight::power(w.as_power().exponent, w.as_power().coefficient * c);
  StepFunction s = w.as_piecewise();
  s.values *= c;
  return Weight::piecewise(std::move(s));
}

double mass(const Weight& w, double lo, double hi) {
  if (w.is_power()) return power_mass(w.as_power(), lo, hi);
  double total = 0.0;
  for_each_overlap(w.as_piecewise(), lo, hi,
                   [&](double v, double a, double b) { total += v * (b - a); });
  return total;
}

Eigen::VectorXd atom_masses(const Weight& w, const std::vector<DyadicInterval>& atoms) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) m[static_cast<Eigen::Index>(i)] = mass(w, atoms[i]);
  return m;
}

double integrate(const Weight& f, const Weight& base, const DyadicInterval& q) {
  const double lo = q.left();
  const double hi = q.right();
  if (f.is_power() && base.is_power()) {
    const auto& a = f.as_power();
    const auto& b = base.as_power();
    return power_mass({a.exponent + b.exponent, a.coefficient * b.coefficient}, lo, hi);
  }
  double total = 0.0;
  if (!f.is_power()) {
    for_each_overlap(f.as_piecewise(), lo, hi,
                     [&](double v, double a, double b) { total += v * mass(base, a, b); });
  } else {
    for_each_overlap(base.as_piecewise(), lo, hi,
                     [&](double v, double a, double b) { total += v * mass(f, a, b); });
  }
  return total;
}

double average(const Weight& w, const DyadicInterval& q) { return mass(w, q) / q.length(); }

double average(const Weight& w, const DyadicInterval& q, const Weight& base) {
  const double denom = mass(base, q);
  if (!(denom > 0.0)) {
    throw DegenerateInstanceError("zero base mass on " + to_string(q));
  }
  return integrate(w, base, q) / denom;
}

ExponentConfig ExponentConfig::make(double p, double q, double r, double alpha) {
  std::ostringstream msg;
  if (!(p > 1.0 && std::isfinite(p))) msg << "p must satisfy 1 < p < inf";
  else if (!(q >= p && std::isfinite(q))) msg << "q must satisfy p <= q < inf";
  else if (!(r > 0.0 && std::isfinite(r))) msg << "r must satisfy 0 < r < inf";
  else if (!(alpha > 0.0 && alpha <= 1.0)) msg << "alpha must satisfy 0 < alpha <= 1";
  if (!msg.str().empty()) throw ParameterError(msg.str());
  return {p, q, r, alpha};
}

double ExponentConfig::s() const {
  if (!(p > r)) throw ParameterError("(p/r)' requires p > r");
  const double t = p / r;
  return t / (t - 1.0);
}

Feasibility feasibility(const ExponentConfig& cfg) {
  Feasibility out;
  out.margin = -cfg.alpha + 1.0 / cfg.q + 1.0 / cfg.p_conj();
  out.feasible = out.margin >= -1e-12;
  out.diagonal = cfg.p == cfg.q;
  out.sobolev = std::abs(out.margin) <= 1e-12;
  if (cfg.alpha > 1.0 / cfg.p_conj()) {
    out.q_range = std::make_pair(cfg.p, cfg.p / (cfg.p * (cfg.alpha - 1.0) + 1.0));
  }
  std::ostringstream msg;
  msg.precision(12);
  if (!out.feasible) {
    msg << "infeasible: -alpha + 1/q + 1/p' = " << out.margin
        << " < 0, so no pair of weights has a finite characteristic";
    if (cfg.alpha == 1.0) msg << " (alpha = 1 forces the diagonal case p = q)";
  } else {
    msg << "feasible: -alpha + 1/q + 1/p' = " << out.margin;
    if (out.sobolev) msg << " (Sobolev line alpha = 1 + 1/q - 1/p)";
    if (out.diagonal) msg << " (diagonal p = q)";
  }
  if (out.q_range) msg << "; admissible q in [" << out.q_range->first << ", " << out.q_range->second << "]";
  out.diagnostic = msg.str();
  return out;
}

std::string TestSet::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::family: out << "family(" << intervals.size() << " members)"; break;
    case Kind::origin_anchored: out << "origin-anchored [0,2^-k), k <= " << depth; break;
    case Kind::dyadic_grid: out << "dyadic grid to depth " << depth; break;
  }
  return out.str();
}

TestSet family_test_set(const SparseFamily& family) {
  return {TestSet::Kind::family, family.max_level(), family.members()};
}

TestSet origin_anchored_test_set(int depth) {
  if (depth < 0) throw ParameterError("test-set depth must be nonnegative");
  TestSet t{TestSet::Kind::origin_anchored, depth, {}};
  for (int k = 0; k <= depth; ++k) t.intervals.push_back({k, 0});
  return t;
}

TestSet dyadic_grid_test_set(const DyadicInterval& root, int depth) {
  TestSet t{TestSet::Kind::dyadic_grid, depth, {}};
  for (int level = root.level; level <= depth; ++level) {
    auto row = uniform_atoms(root, level);
    t.intervals.insert(t.intervals.end(), row.begin(), row.end());
  }
  return t;
}

StepFunction dyadic_maximal(const Weight& w, const DyadicInterval& q, int depth) {
  if (depth < q.level) throw ParameterError("maximal function depth is coarser than the interval");
  // Running maximum of averages pushed down the tree one level at a time.
  std::vector<double> running{average(w, q)};
  for (int level = q.level + 1; level <= depth; ++level) {
    const auto row = uniform_atoms(q, level);
    std::vector<double> next(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) next[i] = std::max(running[i / 2], average(w, row[i]));
    running = std::move(next);
  }
  auto atoms = uniform_atoms(q, depth);
  return {std::move(atoms), Eigen::Map<Eigen::VectorXd>(running.data(), static_cast<Eigen::Index>(running.size()))};
}

CharacteristicReport ainfty(const Weight& w, const DyadicInterval& root, int depth) {
  if (depth < root.level) throw ParameterError("A_infty depth is coarser than the root");
  const int levels = depth - root.level;
  if (levels > 24) throw ParameterError("A_infty depth too large (at most 24 levels below the root)");

  // Masses of every dyadic node, per relative level.
  std::vector<Eigen::VectorXd> masses(static_cast<std::size_t>(levels) + 1);
  masses[static_cast<std::size_t>(levels)] = atom_masses(w, uniform_atoms(root, depth));
  for (int l = levels - 1; l >= 0; --l) {
    const auto& child = masses[static_cast<std::size_t>(l) + 1];
    Eigen::VectorXd m(child.size() / 2);
    for (Eigen::Index j = 0; j < m.size(); ++j) m[j] = child[2 * j] + child[2 * j + 1];
    masses[static_cast<std::size_t>(l)] = std::move(m);
  }
  if (!(masses[0][0] > 0.0)) throw DegenerateInstanceError("A_infty: weight has zero mass on the root");

  CharacteristicReport report;
  report.value = 0.0;
  report.attained_on = root;
  report.lower_estimate = true;
  {
    std::ostringstream desc;
    desc << "dyadic subintervals of " << to_string(root) << " to depth " << depth
         << " (truncated dyadic maximal function)";
    report.test_set = desc.str();
  }

  std::vector<double> running, next;
  for (int l = 0; l <= levels; ++l) {
    const double len = std::ldexp(root.length(), -l);
    const auto& row = masses[static_cast<std::size_t>(l)];
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      if (!(row[j] > 0.0)) continue;
      running.assign(1, row[j] / len);
      for (int d = l + 1; d <= levels; ++d) {
        const double sub_len = std::ldexp(root.length(), -d);
        const auto& sub = masses[static_cast<std::size_t>(d)];
        const Eigen::Index offset = j << (d - l);
        next.resize(running.size() * 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
          next[i] = std::max(running[i / 2], sub[offset + static_cast<Eigen::Index>(i)] / sub_len);
        }
        std::swap(running, next);
      }
      double integral = 0.0;
      for (double m : running) integral += m;
      integral *= std::ldexp(root.length(), -levels);
      const double value = integral / row[j];
      if (value > report.value) {
        report.value = value;
        report.attained_on = {root.level + l, (root.position << l) + j};
      }
    }
  }
  return report;
}

CharacteristicReport two_weight_char(const Weight& omega, const Weight& sigma,
                                     const ExponentConfig& cfg, const TestSet& tests) {
  CharacteristicReport report;
  report.test_set = tests.describe();
  bool first = true;
  for (const auto& q : tests.intervals) {
    const double value = std::pow(q.length(), -cfg.alpha) * std::pow(mass(omega, q), 1.0 / cfg.q) *
                         std::pow(mass(sigma, q), 1.0 / cfg.p_conj());
    if (first || value > report.value) {
      report.value = value;
      report.attained_on = q;
      first = false;
    }
  }
  return report;
}

CharacteristicReport two_weight_char(const Weight& omega, const Weight& sigma,
                                     const ExponentConfig& cfg, const SparseFamily& family) {
  return two_weight_char(omega, sigma, cfg, family_test_set(family));
}

CharacteristicReport one_weight_apq(const Weight& w, double p, double q, const TestSet& tests) {
  if (!(p > 1.0) || !(q >= p)) throw ParameterError("one-weight A_pq needs 1 < p <= q");
  const double p_conj = p / (p - 1.0);
  const Weight upper = pow(w, q);
  const Weight dual = pow(w, -p_conj);
  CharacteristicReport report;
  report.test_set = tests.describe();
  bool first = true;
  for (const auto& iv : tests.intervals) {
    const double value = average(upper, iv) * std::pow(average(dual, iv), q / p_conj);
    if (first || value > report.value) {
      report.value = value;
      report.attained_on = iv;
      first = false;
    }
  }
  return report;
}

double classical_ap(const Weight& omega, const Weight& sigma, double p, const TestSet& tests) {
  double best = 0.0;
  for (const auto& q : tests.intervals) {
    best = std::max(best, std::pow(q.length(), -p) * mass(omega, q) * std::pow(mass(sigma, q), p - 1.0));
  }
  return best;
}

}  // namespace sparselab
