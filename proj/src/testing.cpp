#include "sparselab/testing.hpp"

#include <cmath>
#include <utility>

#include "sparselab/errors.hpp"

namespace sparselab {
namespace {

void require_positive(const Eigen::VectorXd& masses, const SparseFamily& family, const char* what) {
  for (Eigen::Index i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0)) {
      throw DegenerateInstanceError(std::string(what) + " vanishes on " +
                                    to_string(family[static_cast<std::size_t>(i)]));
    }
  }
}

// sup_R scale_R * || sum_{Q subset R} coef_Q 1_Q ||_{L^e_masses}
TestingSup localized_sup(const DiscreteInstance& inst, const Eigen::VectorXd& coef,
                         const Eigen::VectorXd& scale, const Eigen::VectorXd& masses, double e) {
  TestingSup best;
  for (std::size_t i = 0; i < inst.members(); ++i) {
    const double value = scale[static_cast<Eigen::Index>(i)] * lp_norm(subtree_sum(inst, i, coef), masses, e);
    if (value > best.value) best = {value, inst.family[i]};
  }
  return best;
}

double conj(double x) { return x / (x - 1.0); }

}  // namespace

TestingSup testing_T(const SparseFamily& family, const ExponentConfig& cfg, const Weight& omega,
                     const Weight& sigma) {
  const DiscreteInstance inst = discretize(family, omega, sigma);
  require_positive(inst.sigma_cubes, family, "sigma");
  const double r = cfg.r;
  const Eigen::VectorXd coef =
      (inst.lengths.array().pow(-cfg.alpha * r) * inst.sigma_cubes.array().pow(r)).matrix();
  const Eigen::VectorXd scale = inst.sigma_cubes.array().pow(-r / cfg.p).matrix();
  return localized_sup(inst, coef, scale, inst.omega_atoms, cfg.q / r);
}

TestingSup testing_Tstar(const SparseFamily& family, const ExponentConfig& cfg, const Weight& omega,
                         const Weight& sigma) {
  if (!(cfg.p > cfg.r)) throw PreconditionError("T* is only defined for p > r");
  const DiscreteInstance inst = discretize(family, omega, sigma);
  require_positive(inst.sigma_cubes, family, "sigma");
  require_positive(inst.omega_cubes, family, "omega");
  const double r = cfg.r;
  const Eigen::VectorXd coef = (inst.lengths.array().pow(-cfg.alpha * r) *
                                inst.sigma_cubes.array().pow(r - 1.0) * inst.omega_cubes.array())
                                   .matrix();
  const Eigen::VectorXd scale = inst.omega_cubes.array().pow(-1.0 / conj(cfg.q / r)).matrix();
  return localized_sup(inst, coef, scale, inst.sigma_atoms, conj(cfg.p / r));
}

TestingConstants testing_constants(const SparseFamily& family, const ExponentConfig& cfg,
                                   const Weight& omega, const Weight& sigma) {
  TestingConstants out;
  out.T = testing_T(family, cfg, omega, sigma);
  if (cfg.p > cfg.r) out.Tstar = testing_Tstar(family, cfg, omega, sigma);
  return out;
}

ComparabilityReport make_report(std::string statement, std::string instance, double lhs, double rhs) {
  ComparabilityReport rep;
  rep.statement = std::move(statement);
  rep.instance = std::move(instance);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.trivial = lhs == 0.0 || rhs == 0.0;
  if (!rep.trivial) rep.ratio = lhs / rhs;
  return rep;
}

ComparabilityReport check_prop31(const SparseFamily& family, const ExponentConfig& cfg,
                                 const Weight& omega, const Weight& sigma, const AscentOptions& opts) {
  const OpNormEstimate est = estimate_opnorm(family, cfg, omega, sigma, opts);
  const TestingConstants tc = testing_constants(family, cfg, omega, sigma);
  const double lhs = std::pow(est.ascent_value, cfg.r);
  const double rhs = cfg.r < cfg.p ? tc.T.value + tc.Tstar->value : tc.T.value;
  auto rep = make_report("prop31", "", lhs, rhs);
  rep.branch = cfg.r < cfg.p ? "r<p" : "r>=p";
  return rep;
}

ComparabilityReport check_lemma32(const SparseFamily& family, const ExponentConfig& cfg,
                                  const Weight& omega, const Weight& sigma,
                                  const Eigen::VectorXd& coefficients, const AscentOptions& opts) {
  if (!(1.0 < cfg.r && cfg.r < cfg.p && cfg.p <= cfg.q)) {
    throw ParameterError("linearization comparison needs 1 < r < p <= q");
  }
  if (coefficients.size() != static_cast<Eigen::Index>(family.size()) || (coefficients.array() < 0.0).any()) {
    throw ParameterError("linearization comparison needs one nonnegative coefficient per member");
  }
  const DiscreteInstance inst = discretize(family, omega, sigma);
  require_positive(inst.sigma_cubes, family, "sigma");

  NormProblem first;
  first.op = {inst.incidence, coefficients.array().pow(1.0 / cfg.r).matrix(), cfg.r};
  first.sigma_atoms = inst.sigma_atoms;
  first.omega_atoms = inst.omega_atoms;
  first.p = cfg.p;
  first.q = cfg.q;

  NormProblem second = first;
  second.op = {inst.incidence,
               (coefficients.array() * inst.sigma_cubes.array().pow(cfg.r - 1.0)).matrix(), 1.0};
  second.p = cfg.p / cfg.r;
  second.q = cfg.q / cfg.r;

  const auto& atoms = inst.partition.atoms;
  const double one = std::pow(estimate_norm(first, atoms, opts).ascent_value, cfg.r);
  const double two = estimate_norm(second, atoms, opts).ascent_value;
  return make_report("lemma32", "", one, two);
}

ComparabilityReport lsu_check(const PositiveDyadicOperator& op, double p, double q,
                              const Weight& omega, const Weight& sigma, const AscentOptions& opts) {
  if (!(1.0 < p && p <= q)) throw ParameterError("two-sided testing characterization needs 1 < p <= q");
  if (op.tau.size() != static_cast<Eigen::Index>(op.family.size()) || (op.tau.array() < 0.0).any()) {
    throw ParameterError("positive dyadic operator needs one nonnegative tau per member");
  }
  const DiscreteInstance inst = discretize(op.family, omega, sigma);
  require_positive(inst.sigma_cubes, op.family, "sigma");
  require_positive(inst.omega_cubes, op.family, "omega");

  NormProblem pb;
  pb.op = {inst.incidence, (op.tau.array() / inst.lengths.array()).matrix(), 1.0};
  pb.sigma_atoms = inst.sigma_atoms;
  pb.omega_atoms = inst.omega_atoms;
  pb.p = p;
  pb.q = q;
  const double lhs = estimate_norm(pb, inst.partition.atoms, opts).ascent_value;

  const Eigen::ArrayXd avg_omega = inst.omega_cubes.array() / inst.lengths.array();
  const Eigen::ArrayXd avg_sigma = inst.sigma_cubes.array() / inst.lengths.array();
  const TestingSup dual = localized_sup(inst, (op.tau.array() * avg_omega).matrix(),
                                        inst.omega_cubes.array().pow(-1.0 / conj(q)).matrix(),
                                        inst.sigma_atoms, conj(p));
  const TestingSup direct = localized_sup(inst, (op.tau.array() * avg_sigma).matrix(),
                                          inst.sigma_cubes.array().pow(-1.0 / p).matrix(),
                                          inst.omega_atoms, q);
  return make_report("lemma34", "", lhs, dual.value + direct.value);
}

ComparabilityReport check_lemma41(const SparseFamily& family, const Eigen::VectorXd& coefficients,
                                  const Weight& sigma, double p) {
  if (!(p > 1.0)) throw ParameterError("dyadic-sum norm formula needs p > 1");
  if (coefficients.size() != static_cast<Eigen::Index>(family.size()) || (coefficients.array() < 0.0).any()) {
    throw ParameterError("dyadic-sum norm formula needs one nonnegative coefficient per member");
  }
  const DiscreteInstance inst = discretize(family, sigma, sigma);
  require_positive(inst.sigma_cubes, family, "sigma");
  const Eigen::VectorXd phi = inst.incidence.transpose() * coefficients;
  const double lhs = lp_norm(phi, inst.sigma_atoms, p);
  double sum = 0.0;
  for (std::size_t i = 0; i < inst.members(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double avg = subtree_sum(inst, i, coefficients).dot(inst.sigma_atoms) / inst.sigma_cubes[k];
    sum += coefficients[k] * std::pow(avg, p - 1.0) * inst.sigma_cubes[k];
  }
  return make_report("lemma41", "", lhs, std::pow(sum, 1.0 / p));
}

ComparabilityReport check_lemma43(const SparseFamily& family, const Weight& omega,
                                  const Weight& sigma, const MeasureEstimateQuery& query,
                                  std::size_t r_member, double ainfty_sigma, double ainfty_omega) {
  const auto [a, b, c] = query;
  if (a < 0.0 || b < 0.0 || c < 0.0 || a + b + c < 1.0) {
    throw ParameterError("measure estimate needs a, b, c >= 0 with a + b + c >= 1");
  }
  if (r_member >= family.size()) throw ParameterError("measure estimate: R is not a family member");
  auto term = [&](const DyadicInterval& q) {
    return std::pow(q.length(), a) * std::pow(mass(sigma, q), b) * std::pow(mass(omega, q), c);
  };
  double lhs = 0.0;
  for (std::size_t j = r_member; j < family.subtree_end(r_member); ++j) lhs += term(family[j]);
  double rhs = term(family[r_member]);
  if (a == 0.0) rhs *= std::pow(ainfty_sigma, b) * std::pow(ainfty_omega, c);
  return make_report(a > 0.0 ? "lemma43-i" : "lemma43-ii", "", lhs, rhs);
}

std::vector<ComparabilityReport> verify_thm42(const SparseFamily& family, const ExponentConfig& cfg,
                                              const Weight& omega, const Weight& sigma,
                                              double characteristic, double ainfty_sigma,
                                              double ainfty_omega) {
  const double p = cfg.p, q = cfg.q, r = cfg.r;
  const double base = std::pow(characteristic, r);
  const bool fractional_diagonal = p == q && cfg.alpha < 1.0;
  std::vector<ComparabilityReport> out;

  const double t = testing_T(family, cfg, omega, sigma).value;
  if (fractional_diagonal && p > r) {
    const double e = (1.0 - r / p) * (1.0 - r / p);
    out.push_back(make_report("thm42-T", "", t,
                              base * std::pow(ainfty_sigma, 1.0 - e) * std::pow(ainfty_omega, e)));
    out.back().branch = "diagonal-fractional";
  } else {
    out.push_back(make_report("thm42-T", "", t, base * std::pow(ainfty_sigma, r / q)));
    out.back().branch = "generic";
  }

  if (p > r) {
    const double ts = testing_Tstar(family, cfg, omega, sigma).value;
    if (fractional_diagonal) {
      const double e = (r / p) * (r / p);
      out.push_back(make_report("thm42-Tstar", "", ts,
                                base * std::pow(ainfty_omega, 1.0 - e) * std::pow(ainfty_sigma, e)));
      out.back().branch = "diagonal-fractional";
    } else {
      out.push_back(make_report("thm42-Tstar", "", ts, base * std::pow(ainfty_omega, 1.0 - r / p)));
      out.back().branch = "generic";
    }
  }
  return out;
}

}  // namespace sparselab
