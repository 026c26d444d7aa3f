#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "sparselab/dyadic.hpp"
#include "sparselab/weights.hpp"

namespace sparselab {

/// Principal (stopping) cubes of f with respect to sigma over a family. All
/// indices refer to positions in the family's member list.
struct StoppingFamily {
  std::vector<std::size_t> principals;
  /// pi(Q): minimal principal containing member Q.
  std::vector<std::size_t> parent;
  /// ch_F(F) for principal F; empty for non-principal members.
  std::vector<std::vector<std::size_t>> children;
  /// <f>_Q^sigma per member.
  Eigen::VectorXd averages;

  bool is_principal(std::size_t member) const { return parent[member] == member; }
};

/// F_0 = maximal members; the stopping children of F are the maximal members
/// Q strictly inside F with <f>_Q^sigma > 2 <f>_F^sigma.
StoppingFamily build_principal_cubes(const SparseFamily& family, const Weight& f,
                                     const Weight& sigma);

/// Pointwise check of sum_{F principal, F contains x} (<f>_F^sigma)^p against
/// (1 - 2^-p)^-1 (M_sigma f(x))^p on the atoms of the family, where M_sigma
/// is the maximal function over family members.
struct PrincipalDomination {
  std::vector<DyadicInterval> atoms;
  Eigen::VectorXd principal_sum;
  Eigen::VectorXd maximal;
  double constant = 0.0;
  /// max over atoms of principal_sum / (constant * maximal^p); 0 if all sums vanish.
  double worst_ratio = 0.0;
  /// sum_F (<f>_F)^p sigma(F) and constant * int (M_sigma f)^p dsigma.
  double integrated_lhs = 0.0;
  double integrated_rhs = 0.0;
};

PrincipalDomination principal_domination(const SparseFamily& family, const StoppingFamily& stopping,
                                         const Weight& sigma, double p);

}  // namespace sparselab
