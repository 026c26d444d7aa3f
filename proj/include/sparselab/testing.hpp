#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sparselab/dyadic.hpp"
#include "sparselab/sparse_operator.hpp"
#include "sparselab/weights.hpp"

namespace sparselab {

struct TestingSup {
  double value = 0.0;
  DyadicInterval attained_on{};
};

struct TestingConstants {
  TestingSup T;
  std::optional<TestingSup> Tstar;  // absent when p <= r
};

/// sup_R sigma(R)^{-r/p} || sum_{Q subset R} |Q|^{-alpha r} sigma(Q)^r 1_Q ||_{L^{q/r}_omega}
TestingSup testing_T(const SparseFamily& family, const ExponentConfig& cfg, const Weight& omega,
                     const Weight& sigma);
/// sup_R omega(R)^{-1/(q/r)'} || sum_{Q subset R} |Q|^{-alpha r} sigma(Q)^{r-1} omega(Q) 1_Q ||_{L^{(p/r)'}_sigma}
TestingSup testing_Tstar(const SparseFamily& family, const ExponentConfig& cfg, const Weight& omega,
                         const Weight& sigma);
TestingConstants testing_constants(const SparseFamily& family, const ExponentConfig& cfg,
                                   const Weight& omega, const Weight& sigma);

/// One side-by-side comparison. A zero side marks the check trivial and the
/// ratio is left at 0.
struct ComparabilityReport {
  std::string statement;
  std::string instance;
  std::string branch;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool trivial = false;
};

ComparabilityReport make_report(std::string statement, std::string instance, double lhs, double rhs);

ComparabilityReport check_prop31(const SparseFamily& family, const ExponentConfig& cfg,
                                 const Weight& omega, const Weight& sigma,
                                 const AscentOptions& opts = {});

/// I over f >= 0 in the unit ball of L^p_sigma, II over g >= 0 in the unit
/// ball of L^{p/r}_sigma; ratio I / II. Needs 1 < r < p <= q.
ComparabilityReport check_lemma32(const SparseFamily& family, const ExponentConfig& cfg,
                                  const Weight& omega, const Weight& sigma,
                                  const Eigen::VectorXd& coefficients, const AscentOptions& opts = {});

/// T f = sum_Q tau_Q <f>_Q 1_Q.
struct PositiveDyadicOperator {
  SparseFamily family;
  Eigen::VectorXd tau;
};

ComparabilityReport lsu_check(const PositiveDyadicOperator& op, double p, double q,
                              const Weight& omega, const Weight& sigma,
                              const AscentOptions& opts = {});

/// ||phi||_{L^p_sigma} against (sum_Q a_Q (<phi_Q>^sigma_Q)^{p-1} sigma(Q))^{1/p}.
ComparabilityReport check_lemma41(const SparseFamily& family, const Eigen::VectorXd& coefficients,
                                  const Weight& sigma, double p);

/// Exponents of |Q|, sigma(Q), omega(Q).
struct MeasureEstimateQuery {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Part (i) when a > 0. Part (ii) when a = 0, scaled by the supplied
/// A_infty characteristics.
ComparabilityReport check_lemma43(const SparseFamily& family, const Weight& omega,
                                  const Weight& sigma, const MeasureEstimateQuery& query,
                                  std::size_t r_member, double ainfty_sigma = 1.0,
                                  double ainfty_omega = 1.0);

/// T and (for p > r) T* against their mixed bounds. `characteristic` is the
/// two-weight A_pq^alpha constant.
std::vector<ComparabilityReport> verify_thm42(const SparseFamily& family, const ExponentConfig& cfg,
                                              const Weight& omega, const Weight& sigma,
                                              double characteristic, double ainfty_sigma,
                                              double ainfty_omega);

}  // namespace sparselab
