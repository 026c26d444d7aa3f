#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "sparselab/dyadic.hpp"
#include "sparselab/step_function.hpp"
#include "sparselab/weights.hpp"

namespace sparselab {

/// A family resolved on an atom partition, with the exact masses every
/// evaluation needs.
struct DiscreteInstance {
  SparseFamily family;
  AtomPartition partition;
  Eigen::SparseMatrix<double> incidence;  // members x atoms, entry 1 when atom inside member
  Eigen::VectorXd lengths;                // |Q| per member
  Eigen::VectorXd sigma_atoms;
  Eigen::VectorXd omega_atoms;
  Eigen::VectorXd sigma_cubes;
  Eigen::VectorXd omega_cubes;

  std::size_t members() const { return family.size(); }
  std::size_t atoms() const { return partition.size(); }
};

DiscreteInstance discretize(const SparseFamily& family, const Weight& omega, const Weight& sigma,
                            int extra_depth = 0);

Eigen::SparseMatrix<double> incidence_matrix(const AtomPartition& partition);

/// sum_{Q in S, Q subset R} coef_Q 1_Q as values on the atoms.
Eigen::VectorXd subtree_sum(const DiscreteInstance& inst, std::size_t r_member,
                            const Eigen::VectorXd& coef);

/// (sum_a |v_a|^p m_a)^{1/p}
double lp_norm(const Eigen::VectorXd& values, const Eigen::VectorXd& masses, double p);
double lp_norm(const StepFunction& f, const Weight& w, double p);

/// f -> (sum_Q 1_Q (lambda_Q int_Q f dsigma)^r)^{1/r}, acting on atom values.
/// The sparse operator has lambda_Q = |Q|^-alpha; the linear testing-type
/// operators take r = 1 with their own coefficients.
struct CubeSumOperator {
  Eigen::SparseMatrix<double> incidence;
  Eigen::VectorXd coefficients;
  double r = 1.0;

  /// `weighted` holds f_a * sigma(a).
  Eigen::VectorXd apply(const Eigen::VectorXd& weighted) const;
};

/// Norm of a CubeSumOperator from L^p_sigma to L^q_omega on atom-measurable
/// nonnegative functions.
struct NormProblem {
  CubeSumOperator op;
  Eigen::VectorXd sigma_atoms;
  Eigen::VectorXd omega_atoms;
  double p = 2.0;
  double q = 2.0;

  /// ||op(f sigma)||_{L^q_omega} / ||f||_{L^p_sigma}; zero for f = 0.
  double ratio(const Eigen::VectorXd& f) const;
};

NormProblem sparse_problem(const DiscreteInstance& inst, const ExponentConfig& cfg);

struct AscentOptions {
  int restarts = 16;
  int max_iters = 5000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

struct OpNormEstimate {
  double certified_lower = 0.0;
  double ascent_value = 0.0;
  StepFunction maximizer;
  int restarts = 0;
  long iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

/// Multi-start multiplicative ascent on log f. Besides `restarts` random
/// starts (log-uniform in [1e-3, 1e3] per atom) one run starts from the best
/// member indicator, which is also the certified lower bound.
OpNormEstimate estimate_norm(const NormProblem& problem, const std::vector<DyadicInterval>& atoms,
                             const AscentOptions& opts);

/// Best ratio over member indicators 1_Q.
struct IndicatorBound {
  double value = 0.0;
  std::size_t member = 0;
};
IndicatorBound best_indicator(const NormProblem& problem, const DiscreteInstance& inst);

StepFunction apply(const SparseFamily& family, const ExponentConfig& cfg, const Weight& sigma,
                   const StepFunction& f);

double indicator_lower_bound(const SparseFamily& family, const ExponentConfig& cfg,
                             const Weight& omega, const Weight& sigma);

OpNormEstimate estimate_opnorm(const SparseFamily& family, const ExponentConfig& cfg,
                               const Weight& omega, const Weight& sigma,
                               const AscentOptions& opts = {});

/// Brute-force grid search over nonnegative directions; at most 3 atoms.
/// `grid_res` points per angle, followed by zoomed regrids around the best
/// point.
double oracle_opnorm(const SparseFamily& family, const ExponentConfig& cfg, const Weight& omega,
                     const Weight& sigma, int grid_res = 200);

enum class TheoremBranch { generic, diagonal_fractional };

/// diagonal_fractional exactly when p = q > r and alpha < 1.
TheoremBranch theorem_branch(const ExponentConfig& cfg);
std::string to_string(TheoremBranch branch);

/// Right-hand side of the two-weight mixed A_pq^alpha / A_infty bound.
double theorem_rhs(const ExponentConfig& cfg, double characteristic, double ainfty_sigma,
                   double ainfty_omega);

}  // namespace sparselab
