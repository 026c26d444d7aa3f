#pragma once

#include <string>
#include <vector>

namespace sparselab {

enum class Variant { primal, dual, combined };

Variant parse_variant(const std::string& name);
std::string to_string(Variant v);

/// Square-function (r = 2) experiments on the Sobolev line 1/q + 1/p' = alpha,
/// with origin-anchored intervals I_k = [0, 2^-k).
struct SharpnessConfig {
  double p = 2.0;
  double q = 4.0;
  double alpha = 0.75;
  Variant variant = Variant::primal;
  /// Strictly decreasing values in (0, 1).
  std::vector<double> eps;
  /// K(eps) = ceil(depth_factor / eps); at least 20. The default 24 keeps the
  /// dual tails under 1e-6 relative, 20 leaves them near 1.3e-6.
  double depth_factor = 24.0;

  void validate() const;
  long depth(double e) const;
};

/// {2^-k : min_exp <= k <= max_exp}, decreasing.
std::vector<double> eps_grid(int min_exp = 4, int max_exp = 12);

long truncation_depth(double eps, double depth_factor = 24.0);

struct PrimalQuantities {
  double characteristic = 0.0;
  double fnorm = 0.0;
  double afnorm_lower = 0.0;
  double afnorm_exact = 0.0;
  /// Relative bounds on the omitted shells l > K, for the q-th powers.
  double tail_lower = 0.0;
  double tail_exact = 0.0;
};

/// omega(x) = x^{(1-eps)/p'}, f(x) = x^{eps-1} on [0, 1].
PrimalQuantities primal_quantities(double eps, double p, double q, double alpha, long depth);

struct DualQuantities {
  double characteristic = 0.0;
  double rhs_norm = 0.0;
  double lhs_norm = 0.0;
  double tail_rhs = 0.0;
  double tail_lhs = 0.0;
  /// max over k <= K of the relative gap between the directly integrated
  /// coefficient |I_k|^-alpha int_{I_k} a_k omega^q and 1/2 eps^{-1/2} 2^{k(alpha-eps)}.
  double coefficient_deviation = 0.0;
  /// sup_x sum_k a_k(x)^2.
  double square_sum_sup = 0.0;
};

/// omega(x) = x^{(eps-1)/q}, a_k(x) = eps^{1/2} |I_k|^-eps x^eps 1_{I_k}(x).
/// Needs eps <= alpha / 2.
DualQuantities dual_quantities(double eps, double p, double q, double alpha, long depth);

/// 1/2 eps^{-1/2} 2^{k(alpha - eps)}
double dual_coefficient(double eps, double alpha, long k);
/// |I_k|^-alpha int_{I_k} a_k omega^q, integrated from the exponents.
double dual_coefficient_direct(double eps, double alpha, long k);

struct SweepRow {
  double eps = 0.0;
  long depth = 0;
  double characteristic = 0.0;
  double ratio = 0.0;
  double numerator = 0.0;    // Afnorm_lower (primal) or lhs_norm (dual)
  double denominator = 0.0;  // fnorm (primal) or rhs_norm (dual)
  double exact_norm = 0.0;   // Afnorm_exact (primal only)
  double tail_bound = 0.0;
  /// primal: |fnorm eps^{1/p} - 1|; dual: coefficient_deviation.
  double identity_deviation = 0.0;
  double square_sum_sup = 0.0;  // dual only
};

std::vector<SweepRow> sweep(const SharpnessConfig& cfg);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double eps_max = 0.0;
  double eps_min = 0.0;
  std::size_t count = 0;
};

/// Least squares of log(ratio) on log(characteristic) over rows [begin, end).
SlopeFit fit_slope(const std::vector<SweepRow>& rows, std::size_t begin, std::size_t end);
/// Fit over the last `count` rows (the smallest eps).
SlopeFit fit_tail(const std::vector<SweepRow>& rows, std::size_t count = 4);

/// primal p'alpha/q, dual alpha - 1/2, combined the larger of the two.
double expected_slope(double p, double q, double alpha, Variant variant);

}  // namespace sparselab
