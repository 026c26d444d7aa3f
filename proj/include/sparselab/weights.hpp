#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "sparselab/dyadic.hpp"
#include "sparselab/step_function.hpp"

namespace sparselab {

/// coefficient * |x|^exponent on [0, inf); exponent > -1.
struct PowerDensity {
  double exponent = 0.0;
  double coefficient = 1.0;
};

/// A nonnegative density with exact interval masses: either a power of |x|
/// centered at the origin or piecewise constant on dyadic atoms.
class Weight {
 public:
  Weight() : rep_(PowerDensity{}) {}

  static Weight lebesgue() { return Weight(PowerDensity{}); }
  static Weight power(double exponent, double coefficient = 1.0);
  static Weight piecewise(StepFunction density);
  static Weight piecewise(const DyadicInterval& root, int depth, Eigen::VectorXd values);

  bool is_power() const { return std::holds_alternative<PowerDensity>(rep_); }
  const PowerDensity& as_power() const { return std::get<PowerDensity>(rep_); }
  const StepFunction& as_piecewise() const { return std::get<StepFunction>(rep_); }

  std::string describe() const;

 private:
  explicit Weight(PowerDensity p) : rep_(p) {}
  explicit Weight(StepFunction s) : rep_(std::move(s)) {}

  std::variant<PowerDensity, StepFunction> rep_;
};

/// density^e. Throws ParameterError if the result is not locally integrable.
Weight pow(const Weight& w, double e);
Weight scaled(const Weight& w, double c);

/// Exact mass of w on [lo, hi).
double mass(const Weight& w, double lo, double hi);
inline double mass(const Weight& w, const DyadicInterval& q) { return mass(w, q.left(), q.right()); }

Eigen::VectorXd atom_masses(const Weight& w, const std::vector<DyadicInterval>& atoms);

/// Exact integral of f over q against the measure base(x) dx.
double integrate(const Weight& f, const Weight& base, const DyadicInterval& q);

/// <w>_q with respect to Lebesgue measure.
double average(const Weight& w, const DyadicInterval& q);
/// <w>_q^base = base(q)^-1 int_q w d(base).
double average(const Weight& w, const DyadicInterval& q, const Weight& base);

/// Exponent tuple (p, q, r, alpha) with 1 < p <= q < inf, 0 < r, 0 < alpha <= 1.
struct ExponentConfig {
  double p = 2.0;
  double q = 2.0;
  double r = 1.0;
  double alpha = 1.0;

  static ExponentConfig make(double p, double q, double r, double alpha);

  double p_conj() const { return p / (p - 1.0); }
  double q_conj() const { return q / (q - 1.0); }
  /// (p/r)'; only defined for p > r.
  double s() const;
};

struct Feasibility {
  bool feasible = false;
  double margin = 0.0;  // -alpha + 1/q + 1/p'
  bool diagonal = false;
  bool sobolev = false;
  /// Admissible q-range [p, p/(p(alpha-1)+1)] when alpha > 1/p'.
  std::optional<std::pair<double, double>> q_range;
  std::string diagnostic;
};

Feasibility feasibility(const ExponentConfig& cfg);

struct TestSet {
  enum class Kind { family, origin_anchored, dyadic_grid };
  Kind kind = Kind::family;
  int depth = 0;
  std::vector<DyadicInterval> intervals;

  std::string describe() const;
};

TestSet family_test_set(const SparseFamily& family);
/// {[0, 2^-k) : 0 <= k <= depth}
TestSet origin_anchored_test_set(int depth);
/// Every dyadic subinterval of root down to absolute level depth.
TestSet dyadic_grid_test_set(const DyadicInterval& root, int depth);

struct CharacteristicReport {
  double value = 0.0;
  DyadicInterval attained_on{};
  std::string test_set;
  bool lower_estimate = false;
};

/// On each level-D atom a of q: max over a subset Q' subset q of <w>_Q'.
StepFunction dyadic_maximal(const Weight& w, const DyadicInterval& q, int depth);

/// Fujii-Wilson characteristic with the dyadic maximal function truncated at
/// level `depth`, over every dyadic Q inside root down to that level.
CharacteristicReport ainfty(const Weight& w, const DyadicInterval& root, int depth);

/// max over the test set of |Q|^-alpha omega(Q)^{1/q} sigma(Q)^{1/p'}.
CharacteristicReport two_weight_char(const Weight& omega, const Weight& sigma,
                                     const ExponentConfig& cfg, const TestSet& tests);
CharacteristicReport two_weight_char(const Weight& omega, const Weight& sigma,
                                     const ExponentConfig& cfg, const SparseFamily& family);

/// max over the test set of <w^q>_Q <w^{-p'}>_Q^{q/p'}.
CharacteristicReport one_weight_apq(const Weight& w, double p, double q, const TestSet& tests);

/// max over the test set of |Q|^-p omega(Q) sigma(Q)^{p-1}.
double classical_ap(const Weight& omega, const Weight& sigma, double p, const TestSet& tests);

}  // namespace sparselab
