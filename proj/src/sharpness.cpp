#include "sparselab/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparselab/errors.hpp"

namespace sparselab {
namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_sobolev(double p, double q, double alpha) {
  if (!(p > 1.0 && q >= p)) throw ParameterError("sharpness needs 1 < p <= q");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("sharpness needs 0 < alpha < 1");
  const double gap = 1.0 / q + (1.0 - 1.0 / p) - alpha;
  if (std::abs(gap) > 1e-12) {
    throw ParameterError("sharpness needs the Sobolev line 1/q + 1/p' = alpha (off by " +
                         std::to_string(gap) + ")");
  }
}

void require_depth(double eps, long depth) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  if (static_cast<double>(depth) < 20.0 / eps) {
    throw PreconditionError("truncation depth K = " + std::to_string(depth) + " is below 20/eps");
  }
}

// log int_{2^-(l+1)}^{2^-l} x^gamma dx
double log_shell(long l, double gamma) {
  const double g = gamma + 1.0;
  return -static_cast<double>(l) * g * kLn2 + std::log(-std::expm1(-g * kLn2)) - std::log(g);
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

struct Series {
  double log_sum = 0.0;
  double tail = 0.0;  // relative bound on sum_{l > K} over sum_{l <= K}
};

// sum_{l=0}^{K} G_l^power * int_shell_l x^gamma, times exp(log_const), where
// G_l = sum_{k<=l} 4^{k d} or, when `single`, only its last term 4^{l d}.
// Consecutive term ratios are nonincreasing in l, so the tail beyond K is
// at most t_{K+1} / (1 - t_{K+1}/t_K).
Series shell_series(long depth, double d, double power, double gamma, double log_const, bool single) {
  const double step = d * 2.0 * kLn2;
  double log_g = -std::numeric_limits<double>::infinity();
  double total = -std::numeric_limits<double>::infinity();
  double prev = 0.0, last = 0.0;
  for (long l = 0; l <= depth + 1; ++l) {
    const double top = static_cast<double>(l) * step;
    log_g = single ? top : log_add(log_g, top);
    const double term = power * log_g + log_shell(l, gamma) + log_const;
    if (l <= depth) {
      total = log_add(total, term);
      prev = term;
    } else {
      last = term;
    }
  }
  const double rho = std::exp(last - prev);
  if (!(rho < 1.0)) throw DegenerateInstanceError("shell series does not decay");
  Series s;
  s.log_sum = total;
  s.tail = std::exp(last - total) / (1.0 - rho);
  return s;
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "primal") return Variant::primal;
  if (name == "dual") return Variant::dual;
  if (name == "combined") return Variant::combined;
  throw ParameterError("unknown variant '" + name + "' (primal, dual or combined)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::primal: return "primal";
    case Variant::dual: return "dual";
    case Variant::combined: return "combined";
  }
  return "?";
}

void SharpnessConfig::validate() const {
  require_sobolev(p, q, alpha);
  if (variant == Variant::combined) throw ParameterError("a sweep runs either the primal or the dual variant");
  if (!(depth_factor >= 20.0)) throw ParameterError("depth factor must be at least 20");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw ParameterError("eps values must lie in (0, 1)");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ParameterError("eps grid must be strictly decreasing");
  }
}

long SharpnessConfig::depth(double e) const { return truncation_depth(e, depth_factor); }

long truncation_depth(double eps, double depth_factor) {
  return static_cast<long>(std::ceil(depth_factor / eps));
}

std::vector<double> eps_grid(int min_exp, int max_exp) {
  if (min_exp < 1 || max_exp < min_exp || max_exp > 40) {
    throw ParameterError("eps grid exponents need 1 <= min <= max <= 40");
  }
  std::vector<double> out;
  for (int k = min_exp; k <= max_exp; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

PrimalQuantities primal_quantities(double eps, double p, double q, double alpha, long depth) {
  require_sobolev(p, q, alpha);
  require_depth(eps, depth);
  const double pc = p / (p - 1.0);
  PrimalQuantities out;
  const double gamma = q * (1.0 - eps) / pc;
  out.characteristic = std::pow(eps, -q / pc) / (gamma + 1.0);

  // (omega f)^p = x^{p(1-eps)/p' + p(eps-1)}, integrated over [0, 1].
  const double e = p * (1.0 - eps) / pc + p * (eps - 1.0);
  out.fnorm = std::pow(1.0 / (e + 1.0), 1.0 / p);

  // On shell l, Af = eps^-1 (sum_{k<=l} 4^{k(alpha-eps)})^{1/2}; its largest term is k = l.
  const double log_const = -q * std::log(eps);
  const Series lower = shell_series(depth, alpha - eps, q / 2.0, gamma, log_const, true);
  const Series exact = shell_series(depth, alpha - eps, q / 2.0, gamma, log_const, false);
  out.afnorm_lower = std::exp(lower.log_sum / q);
  out.afnorm_exact = std::exp(exact.log_sum / q);
  out.tail_lower = lower.tail;
  out.tail_exact = exact.tail;
  return out;
}

double dual_coefficient(double eps, double alpha, long k) {
  return 0.5 / std::sqrt(eps) * std::exp2(static_cast<double>(k) * (alpha - eps));
}

double dual_coefficient_direct(double eps, double alpha, long k) {
  // |I_k|^-alpha eps^{1/2} |I_k|^-eps int_0^{|I_k|} x^eps x^{eps-1} dx
  const double log_len = -static_cast<double>(k) * kLn2;
  const double e = eps + (eps - 1.0);
  const double log_integral = (e + 1.0) * log_len - std::log(e + 1.0);
  return std::exp(-alpha * log_len + 0.5 * std::log(eps) - eps * log_len + log_integral);
}

DualQuantities dual_quantities(double eps, double p, double q, double alpha, long depth) {
  require_sobolev(p, q, alpha);
  require_depth(eps, depth);
  if (eps > alpha / 2.0) {
    throw PreconditionError("dual experiment needs eps <= alpha/2 = " + std::to_string(alpha / 2.0));
  }
  const double pc = p / (p - 1.0);
  const double qc = q / (q - 1.0);
  DualQuantities out;
  out.characteristic = std::pow((1.0 - eps) * pc / q + 1.0, -q / pc) / eps;

  // On shell l, sum_k a_k^2 = eps G_l x^{2 eps} with G_l = sum_{k<=l} 4^{k eps};
  // integrated to the power q'/2 against omega^q = x^{eps-1}.
  const Series rhs = shell_series(depth, eps, qc / 2.0, eps * qc + eps - 1.0,
                                  qc / 2.0 * std::log(eps), false);
  out.rhs_norm = std::exp(rhs.log_sum / qc);
  out.tail_rhs = rhs.tail;

  // sum_{k<=l} coef_k^2 = H_l / (4 eps), against omega^{-p'} = x^{(1-eps)p'/q}.
  const Series lhs = shell_series(depth, alpha - eps, pc / 2.0, (1.0 - eps) * pc / q,
                                  -pc / 2.0 * std::log(4.0 * eps), false);
  out.lhs_norm = std::exp(lhs.log_sum / pc);
  out.tail_lhs = lhs.tail;

  for (long k = 0; k <= depth; ++k) {
    const double gap = std::abs(dual_coefficient_direct(eps, alpha, k) / dual_coefficient(eps, alpha, k) - 1.0);
    out.coefficient_deviation = std::max(out.coefficient_deviation, gap);
  }

  // eps G_l x^{2 eps} peaks at the shell's right end x = 2^-l.
  double log_g = -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  for (long l = 0; l <= depth; ++l) {
    log_g = log_add(log_g, static_cast<double>(l) * eps * 2.0 * kLn2);
    best = std::max(best, std::log(eps) + log_g - 2.0 * eps * static_cast<double>(l) * kLn2);
  }
  out.square_sum_sup = std::exp(best);
  return out;
}

std::vector<SweepRow> sweep(const SharpnessConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  rows.reserve(cfg.eps.size());
  for (double e : cfg.eps) {
    SweepRow row;
    row.eps = e;
    row.depth = cfg.depth(e);
    if (cfg.variant == Variant::primal) {
      const auto pq = primal_quantities(e, cfg.p, cfg.q, cfg.alpha, row.depth);
      row.characteristic = pq.characteristic;
      row.numerator = pq.afnorm_lower;
      row.denominator = pq.fnorm;
      row.exact_norm = pq.afnorm_exact;
      row.tail_bound = std::max(pq.tail_lower, pq.tail_exact);
      row.identity_deviation = std::abs(pq.fnorm * std::pow(e, 1.0 / cfg.p) - 1.0);
    } else {
      const auto dq = dual_quantities(e, cfg.p, cfg.q, cfg.alpha, row.depth);
      row.characteristic = dq.characteristic;
      row.numerator = dq.lhs_norm;
      row.denominator = dq.rhs_norm;
      row.tail_bound = std::max(dq.tail_lhs, dq.tail_rhs);
      row.identity_deviation = dq.coefficient_deviation;
      row.square_sum_sup = dq.square_sum_sup;
    }
    row.ratio = row.numerator / row.denominator;
    rows.push_back(row);
  }
  return rows;
}

SlopeFit fit_slope(const std::vector<SweepRow>& rows, std::size_t begin, std::size_t end) {
  if (end > rows.size() || begin > end || end - begin < 3) {
    throw DegenerateInstanceError("slope fit needs at least 3 rows in the window");
  }
  const auto n = static_cast<double>(end - begin);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sx += std::log(rows[i].characteristic);
    sy += std::log(rows[i].ratio);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double dx = std::log(rows[i].characteristic) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(rows[i].ratio) - my);
  }
  if (!(sxx > 0.0)) throw DegenerateInstanceError("slope fit: characteristic is constant on the window");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = begin; i < end; ++i) {
    const double res = std::log(rows[i].ratio) - (fit.intercept + fit.slope * std::log(rows[i].characteristic));
    fit.max_residual = std::max(fit.max_residual, std::abs(res));
  }
  fit.eps_max = rows[begin].eps;
  fit.eps_min = rows[end - 1].eps;
  fit.count = end - begin;
  return fit;
}

SlopeFit fit_tail(const std::vector<SweepRow>& rows, std::size_t count) {
  if (rows.size() < count) return fit_slope(rows, 0, rows.size());
  return fit_slope(rows, rows.size() - count, rows.size());
}

double expected_slope(double p, double q, double alpha, Variant variant) {
  require_sobolev(p, q, alpha);
  const double primal = (p / (p - 1.0)) * alpha / q;
  const double dual = alpha - 0.5;
  switch (variant) {
    case Variant::primal: return primal;
    case Variant::dual: return dual;
    case Variant::combined: return std::max(primal, dual);
  }
  return primal;
}

}  // namespace sparselab
