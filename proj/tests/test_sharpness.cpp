#include <cmath>
#include <vector>

#include "doctest.h"
#include "sparselab/errors.hpp"
#include "sparselab/sharpness.hpp"
#include "sparselab/weights.hpp"

using namespace sparselab;

namespace {

template <class Fn>
double gauss(Fn&& f, double lo, double hi, int pieces = 64) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  double total = 0.0;
  const double h = (hi - lo) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double mid = lo + (i + 0.5) * h;
    for (int k = 0; k < 5; ++k) total += w[k] * f(mid + x[k] * h / 2) * h / 2;
  }
  return total;
}

// Primal norm of A f against omega^q, shell by shell with quadrature.
double primal_afnorm_oracle(double eps, double p, double q, double alpha, long K) {
  const double pc = p / (p - 1.0);
  double total = 0.0;
  for (long l = 0; l <= K; ++l) {
    double s = 0.0;  // sum over I_k containing the shell of (|I_k|^-alpha int_{I_k} f)^2
    for (long k = 0; k <= l; ++k) {
      const double len = std::ldexp(1.0, static_cast<int>(-k));
      s += std::pow(std::pow(len, -alpha) * std::pow(len, eps) / eps, 2.0);
    }
    const double lo = std::ldexp(1.0, static_cast<int>(-l - 1)), hi = 2.0 * lo;
    const double shell = gauss([&](double x) { return std::pow(x, q * (1.0 - eps) / pc); }, lo, hi);
    total += std::exp(q / 2.0 * std::log(s) + std::log(shell));
  }
  return std::pow(total, 1.0 / q);
}

struct DualOracle {
  double lhs = 0.0, rhs = 0.0, sup = 0.0;
};

DualOracle dual_oracle(double eps, double p, double q, double alpha, long K) {
  const double pc = p / (p - 1.0), qc = q / (q - 1.0);
  DualOracle out;
  double lhs = 0.0, rhs = 0.0;
  for (long l = 0; l <= K; ++l) {
    const double lo = std::ldexp(1.0, static_cast<int>(-l - 1)), hi = 2.0 * lo;
    auto squares = [&](double x) {
      double s = 0.0;
      for (long k = 0; k <= l; ++k) {
        const double len = std::ldexp(1.0, static_cast<int>(-k));
        const double a = std::sqrt(eps) * std::pow(len, -eps) * std::pow(x, eps);
        s += a * a;
      }
      return s;
    };
    rhs += gauss([&](double x) { return std::pow(squares(x), qc / 2.0) * std::pow(x, eps - 1.0); }, lo, hi);
    out.sup = std::max(out.sup, squares(hi));
    double c = 0.0;
    for (long k = 0; k <= l; ++k) c += std::pow(dual_coefficient_direct(eps, alpha, k), 2.0);
    lhs += gauss([&](double x) { return std::pow(c, pc / 2.0) * std::pow(x, (1.0 - eps) * pc / q); }, lo, hi);
  }
  out.lhs = std::pow(lhs, 1.0 / pc);
  out.rhs = std::pow(rhs, 1.0 / qc);
  return out;
}

SharpnessConfig config(double p, double q, double alpha, Variant v) {
  SharpnessConfig cfg;
  cfg.p = p;
  cfg.q = q;
  cfg.alpha = alpha;
  cfg.variant = v;
  cfg.eps = eps_grid();
  return cfg;
}

}  // namespace

TEST_CASE("grids and depths") {
  const auto g = eps_grid();
  REQUIRE(g.size() == 9);
  CHECK(g.front() == 1.0 / 16);
  CHECK(g.back() == 1.0 / 4096);
  CHECK(truncation_depth(1.0 / 16) == 384);
  CHECK(truncation_depth(0.3, 20.0) == 67);
  CHECK_THROWS_AS(eps_grid(0, 3), ParameterError);
  CHECK(parse_variant("dual") == Variant::dual);
  CHECK_THROWS_AS(parse_variant("both"), ParameterError);
  CHECK(to_string(Variant::combined) == "combined");
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(primal_quantities(0.25, 2, 4, 0.7, 200), ParameterError);
  CHECK_THROWS_AS(primal_quantities(0.25, 2, 4, 0.75, 50), PreconditionError);
  CHECK_THROWS_AS(dual_quantities(0.5, 2, 4, 0.75, 200), PreconditionError);
  CHECK_THROWS_AS(expected_slope(2, 2, 1.0, Variant::primal), ParameterError);
  auto cfg = config(2, 4, 0.75, Variant::primal);
  cfg.eps = {0.1, 0.2};
  CHECK_THROWS_AS(sweep(cfg), ParameterError);
  cfg.eps = eps_grid();
  cfg.depth_factor = 10;
  CHECK_THROWS_AS(sweep(cfg), ParameterError);
}

TEST_CASE("primal quantities against closed forms and quadrature") {
  for (auto [p, q, alpha] : {std::tuple{2.0, 4.0, 0.75}, {4.0, 8.0, 0.875}, {3.0, 6.0, 5.0 / 6.0}}) {
    for (double eps : {0.25, 0.125}) {
      const long K = truncation_depth(eps);
      const auto pq = primal_quantities(eps, p, q, alpha, K);
      const double pc = p / (p - 1.0);
      // The characteristic is the one-weight A_pq value of omega, constant over [0, a).
      const Weight omega = Weight::power((1.0 - eps) / pc);
      CHECK(pq.characteristic == doctest::Approx(one_weight_apq(omega, p, q, origin_anchored_test_set(6)).value).epsilon(1e-12));
      CHECK(pq.fnorm == doctest::Approx(std::pow(eps, -1.0 / p)).epsilon(1e-13));
      CHECK(pq.afnorm_exact == doctest::Approx(primal_afnorm_oracle(eps, p, q, alpha, K)).epsilon(1e-10));
      CHECK(pq.afnorm_lower <= pq.afnorm_exact);
      CHECK(pq.tail_exact < 1e-6);
    }
  }
}

TEST_CASE("dual quantities against closed forms and quadrature") {
  for (auto [p, q, alpha] : {std::tuple{2.0, 4.0, 0.75}, {4.0, 8.0, 0.875}}) {
    for (double eps : {0.25, 0.125}) {
      const long K = truncation_depth(eps);
      const auto dq = dual_quantities(eps, p, q, alpha, K);
      const Weight omega = Weight::power((eps - 1.0) / q);
      CHECK(dq.characteristic == doctest::Approx(one_weight_apq(omega, p, q, origin_anchored_test_set(6)).value).epsilon(1e-12));
      const auto o = dual_oracle(eps, p, q, alpha, K);
      CHECK(dq.lhs_norm == doctest::Approx(o.lhs).epsilon(1e-10));
      CHECK(dq.rhs_norm == doctest::Approx(o.rhs).epsilon(1e-10));
      CHECK(dq.square_sum_sup == doctest::Approx(o.sup).epsilon(1e-12));
      CHECK(dq.coefficient_deviation < 1e-12);
    }
  }
  CHECK(dual_coefficient(0.25, 0.75, 0) == 1.0);
  CHECK(dual_coefficient(0.25, 0.75, 4) == doctest::Approx(4.0));
}

TEST_CASE("sweep identities, tails and truncation robustness") {
  for (Variant v : {Variant::primal, Variant::dual}) {
    auto cfg = config(2, 4, 0.75, v);
    const auto rows = sweep(cfg);
    cfg.depth_factor *= 2;
    const auto doubled = sweep(cfg);
    REQUIRE(rows.size() == doubled.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].identity_deviation < 1e-9);
      CHECK(rows[i].tail_bound < 1e-6);
      CHECK(rows[i].ratio == doctest::Approx(rows[i].numerator / rows[i].denominator));
      CHECK(std::abs(doubled[i].numerator / rows[i].numerator - 1.0) <= 1e-6);
      CHECK(std::abs(doubled[i].denominator / rows[i].denominator - 1.0) <= 1e-6);
      if (i > 0) CHECK(rows[i].characteristic > rows[i - 1].characteristic);
    }
  }
}

TEST_CASE("fitted exponents reproduce the predicted slopes") {
  struct Case {
    double p, q, alpha;
    Variant v;
    double expect;
  };
  for (const Case& c : {Case{2, 4, 0.75, Variant::primal, 0.375}, Case{2, 4, 0.75, Variant::dual, 0.25},
                        Case{4, 8, 0.875, Variant::dual, 0.375}, Case{4, 8, 0.875, Variant::primal, 0.875 / 6}}) {
    const auto rows = sweep(config(c.p, c.q, c.alpha, c.v));
    const auto fit = fit_tail(rows);
    CHECK(fit.count == 4);
    CHECK(fit.eps_min == 1.0 / 4096);
    CHECK(fit.slope == doctest::Approx(c.expect).epsilon(0.01));
    CHECK(expected_slope(c.p, c.q, c.alpha, c.v) == doctest::Approx(c.expect));
  }
  CHECK(expected_slope(4, 8, 0.875, Variant::combined) == doctest::Approx(0.375));
}

TEST_CASE("slope fit on synthetic rows") {
  std::vector<SweepRow> rows;
  for (int i = 0; i < 5; ++i) {
    SweepRow r;
    r.eps = std::ldexp(1.0, -i);
    r.characteristic = std::exp(i);
    r.ratio = 3.0 * std::exp(0.4 * i);
    rows.push_back(r);
  }
  const auto fit = fit_slope(rows, 0, 5);
  CHECK(fit.slope == doctest::Approx(0.4));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
  CHECK(fit.max_residual < 1e-12);
  CHECK_THROWS_AS(fit_slope(rows, 0, 2), DegenerateInstanceError);
  for (auto& r : rows) r.characteristic = 2.0;
  CHECK_THROWS_AS(fit_slope(rows, 0, 5), DegenerateInstanceError);
}
