#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "sparselab/errors.hpp"
#include "sparselab/instances.hpp"
#include "sparselab/sparse_operator.hpp"

using namespace sparselab;

namespace {

// (sum_{Q contains x} (|Q|^-alpha int_Q f dsigma)^r)^{1/r}, one interval at a time.
double apply_at(const SparseFamily& family, const ExponentConfig& cfg, const Weight& sigma,
                const Weight& f, double x) {
  double total = 0.0;
  for (const auto& q : family.members()) {
    if (x < q.left() || x >= q.right()) continue;
    total += std::pow(std::pow(q.length(), -cfg.alpha) * integrate(f, sigma, q), cfg.r);
  }
  return std::pow(total, 1.0 / cfg.r);
}

StepFunction random_step(Rng& rng, int depth) {
  Eigen::VectorXd v(Eigen::Index{1} << depth);
  for (auto& x : v) x = rng.log_uniform(1e-2, 1e2);
  return {uniform_atoms({0, 0}, depth), v};
}

}  // namespace

TEST_CASE("apply on a two-interval chain") {
  const auto cfg = ExponentConfig::make(2, 2, 1, 1);
  const StepFunction f = StepFunction::constant(uniform_atoms({0, 0}, 1), 1.0);
  const StepFunction g = apply(chain_family(1), cfg, Weight::lebesgue(), f);
  CHECK(g.values[0] == doctest::Approx(2.0));
  CHECK(g.values[1] == doctest::Approx(1.0));

  const StepFunction neg(uniform_atoms({0, 0}, 1), Eigen::Vector2d(1.0, -1.0));
  CHECK_THROWS_AS(apply(chain_family(1), cfg, Weight::lebesgue(), neg), PreconditionError);
  const StepFunction coarse = StepFunction::constant(uniform_atoms({0, 0}, 1), 1.0);
  CHECK_THROWS_AS(apply(chain_family(3), cfg, Weight::lebesgue(), coarse), PreconditionError);
}

TEST_CASE("apply matches pointwise evaluation, is homogeneous and monotone") {
  for (std::size_t t = 0; t < 25; ++t) {
    const Instance inst = random_instance(31, t);
    Rng rng(32, t);
    const StepFunction f = random_step(rng, 6);
    const StepFunction g = apply(inst.family, inst.cfg, inst.sigma, f);
    const Weight fw = Weight::piecewise(f);
    for (std::size_t a = 0; a < f.size(); a += 5) {
      const double x = 0.5 * (f.atoms[a].left() + f.atoms[a].right());
      CHECK(g.values[static_cast<Eigen::Index>(a)] ==
            doctest::Approx(apply_at(inst.family, inst.cfg, inst.sigma, fw, x)).epsilon(1e-12));
    }
    StepFunction f2 = f;
    f2.values *= 3.5;
    CHECK((apply(inst.family, inst.cfg, inst.sigma, f2).values - 3.5 * g.values).norm() <=
          1e-12 * g.values.norm());
    f2 = f;
    f2.values[7] += 10.0;
    CHECK(((apply(inst.family, inst.cfg, inst.sigma, f2).values - g.values).array() >= -1e-12).all());
  }
}

TEST_CASE("discretized masses are consistent") {
  for (std::size_t t = 0; t < 20; ++t) {
    const Instance inst = random_instance(41, t);
    const DiscreteInstance d = discretize(inst.family, inst.omega, inst.sigma);
    CHECK((d.incidence * d.sigma_atoms - d.sigma_cubes).norm() <= 1e-12 * d.sigma_cubes.norm());
    CHECK((d.incidence * d.omega_atoms - d.omega_cubes).norm() <= 1e-12 * d.omega_cubes.norm());
    CHECK(d.sigma_atoms.sum() == doctest::Approx(mass(inst.sigma, inst.family.root())));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d.members()));
    for (std::size_t r = 0; r < d.members(); r += 3) {
      Eigen::VectorXd direct = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.atoms()));
      for (std::size_t j = 0; j < d.members(); ++j) {
        if (!inst.family[r].contains(inst.family[j])) continue;
        const auto range = d.partition.member_ranges[j];
        direct.segment(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size())).array() += 1.0;
      }
      CHECK((subtree_sum(d, r, ones) - direct).norm() == 0.0);
    }
  }
}

TEST_CASE("lp_norm") {
  CHECK(lp_norm(Eigen::Vector2d(3.0, 4.0), Eigen::Vector2d(1.0, 1.0), 2.0) == doctest::Approx(5.0));
  CHECK(lp_norm(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(0.5, 0.5), 1.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(lp_norm(Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 1.0), 0.0), ParameterError);
}

TEST_CASE("two-interval chain norm") {
  const auto cfg = ExponentConfig::make(2, 2, 1, 1);
  const auto est = estimate_opnorm(chain_family(1), cfg, Weight::lebesgue(), Weight::lebesgue());
  CHECK(est.ascent_value == doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-8));
  CHECK(oracle_opnorm(chain_family(1), cfg, Weight::lebesgue(), Weight::lebesgue()) ==
        doctest::Approx(1.0 + std::sqrt(0.5)).epsilon(1e-10));
  CHECK(est.certified_lower <= est.ascent_value);
  CHECK(est.converged);
  // Equal atom masses: the norm is the top eigenvalue of the symmetric atom map.
  Eigen::Matrix2d m;
  m << 1.5, 0.5, 0.5, 0.5;
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().maxCoeff();
  CHECK(est.ascent_value == doctest::Approx(top).epsilon(1e-8));
  CHECK(est.certified_lower == doctest::Approx(std::sqrt(2.5)));
}

TEST_CASE("ascent agrees with the brute-force oracle on small instances") {
  const auto suite = oracle_suite();
  for (std::size_t k = 0; k < suite.size(); k += 4) {
    const Instance& inst = suite[k];
    const double est = estimate_opnorm(inst.family, inst.cfg, inst.omega, inst.sigma).ascent_value;
    const double oracle = oracle_opnorm(inst.family, inst.cfg, inst.omega, inst.sigma);
    CHECK(est == doctest::Approx(oracle).epsilon(1e-6));
  }
  CHECK_THROWS_AS(oracle_opnorm(chain_family(3), ExponentConfig::make(2, 2, 1, 1), Weight::lebesgue(),
                                Weight::lebesgue()),
                  PreconditionError);
}

TEST_CASE("estimate ordering: characteristic <= indicator bound <= ascent >= random ratios") {
  for (std::size_t t = 0; t < 30; ++t) {
    const Instance inst = random_instance(51, t);
    const double chr = two_weight_char(inst.omega, inst.sigma, inst.cfg, inst.family).value;
    const double ind = indicator_lower_bound(inst.family, inst.cfg, inst.omega, inst.sigma);
    AscentOptions opts;
    opts.seed = t;
    const auto est = estimate_opnorm(inst.family, inst.cfg, inst.omega, inst.sigma, opts);
    CHECK(chr <= ind * (1 + 1e-12));
    CHECK(est.certified_lower == doctest::Approx(ind).epsilon(1e-12));
    CHECK(est.certified_lower <= est.ascent_value);

    const DiscreteInstance d = discretize(inst.family, inst.omega, inst.sigma);
    const NormProblem pb = sparse_problem(d, inst.cfg);
    CHECK(pb.ratio(est.maximizer.values) == est.ascent_value);
    Rng rng(52, t);
    for (int s = 0; s < 20; ++s) {
      Eigen::VectorXd f(static_cast<Eigen::Index>(d.atoms()));
      for (auto& x : f) x = rng.log_uniform(1e-3, 1e3);
      CHECK(pb.ratio(f) <= est.ascent_value * (1 + 1e-9));
    }
  }
}

TEST_CASE("estimates are deterministic and scale correctly") {
  const Instance inst = random_instance(61, 3);
  AscentOptions opts;
  opts.seed = 99;
  const auto a = estimate_opnorm(inst.family, inst.cfg, inst.omega, inst.sigma, opts);
  const auto b = estimate_opnorm(inst.family, inst.cfg, inst.omega, inst.sigma, opts);
  CHECK(a.ascent_value == b.ascent_value);
  CHECK(a.iterations == b.iterations);
  CHECK(a.maximizer.values == b.maximizer.values);

  const double c = 5.0;
  const auto w = estimate_opnorm(inst.family, inst.cfg, scaled(inst.omega, c), inst.sigma, opts);
  CHECK(w.ascent_value == doctest::Approx(std::pow(c, 1.0 / inst.cfg.q) * a.ascent_value).epsilon(1e-6));
  const auto s = estimate_opnorm(inst.family, inst.cfg, inst.omega, scaled(inst.sigma, c), opts);
  CHECK(s.ascent_value == doctest::Approx(std::pow(c, 1.0 / inst.cfg.p_conj()) * a.ascent_value).epsilon(1e-6));
}

TEST_CASE("zero sigma mass on a member is degenerate") {
  const Weight zero_left = Weight::piecewise({0, 0}, 1, Eigen::Vector2d(0.0, 1.0));
  const auto fam = make_family({{0, 0}, {1, 0}});
  const auto cfg = ExponentConfig::make(2, 2, 1, 1);
  CHECK_THROWS_AS(estimate_opnorm(fam, cfg, Weight::lebesgue(), zero_left), DegenerateInstanceError);
  CHECK_THROWS_AS(indicator_lower_bound(fam, cfg, Weight::lebesgue(), zero_left), DegenerateInstanceError);
}

TEST_CASE("theorem branch and right-hand side") {
  CHECK(theorem_branch(ExponentConfig::make(2, 2, 1, 0.5)) == TheoremBranch::diagonal_fractional);
  CHECK(theorem_branch(ExponentConfig::make(2, 2, 2, 0.5)) == TheoremBranch::generic);
  CHECK(theorem_branch(ExponentConfig::make(2, 2, 1, 1)) == TheoremBranch::generic);
  CHECK(theorem_branch(ExponentConfig::make(2, 3, 1, 0.5)) == TheoremBranch::generic);
  CHECK(to_string(TheoremBranch::diagonal_fractional) == "diagonal-fractional");
  for (const auto& cfg : {ExponentConfig::make(2, 2, 1, 0.5), ExponentConfig::make(2, 3, 1, 0.5),
                          ExponentConfig::make(3, 3, 0.5, 1)}) {
    CHECK(theorem_rhs(cfg, 1.0, 1.0, 1.0) == doctest::Approx(2.0));
    CHECK(theorem_rhs(cfg, 3.0, 1.0, 1.0) == doctest::Approx(6.0));
  }
  // generic: [w]( [s]^{1/q} + [o]^{(1/r - 1/p)_+} )
  CHECK(theorem_rhs(ExponentConfig::make(2, 4, 1, 0.5), 1.0, 16.0, 4.0) == doctest::Approx(2.0 + 2.0));
  CHECK(theorem_rhs(ExponentConfig::make(2, 4, 4, 0.5), 1.0, 16.0, 4.0) == doctest::Approx(2.0 + 1.0));
}
