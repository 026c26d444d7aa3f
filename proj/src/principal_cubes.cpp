#include "sparselab/principal_cubes.hpp"

#include <algorithm>
#include <cmath>

#include "sparselab/errors.hpp"

namespace sparselab {

StoppingFamily build_principal_cubes(const SparseFamily& family, const Weight& f,
                                     const Weight& sigma) {
  const std::size_t n = family.size();
  StoppingFamily out;
  out.parent.assign(n, 0);
  out.children.assign(n, {});
  out.averages.resize(static_cast<Eigen::Index>(n));

  for (std::size_t i = 0; i < n; ++i) {
    const double sm = mass(sigma, family[i]);
    if (!(sm > 0.0)) {
      throw DegenerateInstanceError("principal cubes: zero sigma-mass on " + to_string(family[i]));
    }
    out.averages[static_cast<Eigen::Index>(i)] = integrate(f, sigma, family[i]) / sm;
  }

  // Members are in tree preorder, so a member's tree parent is already
  // resolved when the member is visited.
  for (std::size_t i = 0; i < n; ++i) {
    const int up = family.parent(i);
    if (up < 0) {
      out.parent[i] = i;
      out.principals.push_back(i);
      continue;
    }
    const std::size_t boss = out.parent[static_cast<std::size_t>(up)];
    if (out.averages[static_cast<Eigen::Index>(i)] > 2.0 * out.averages[static_cast<Eigen::Index>(boss)]) {
      out.parent[i] = i;
      out.principals.push_back(i);
      out.children[boss].push_back(i);
    } else {
      out.parent[i] = boss;
    }
  }
  return out;
}

PrincipalDomination principal_domination(const SparseFamily& family, const StoppingFamily& stopping,
                                         const Weight& sigma, double p) {
  const AtomPartition partition = atoms_of(family);
  const auto n_atoms = static_cast<Eigen::Index>(partition.size());
  PrincipalDomination out;
  out.atoms = partition.atoms;
  out.principal_sum = Eigen::VectorXd::Zero(n_atoms);
  out.maximal = Eigen::VectorXd::Zero(n_atoms);
  out.constant = 1.0 / (1.0 - std::pow(2.0, -p));

  for (std::size_t i = 0; i < family.size(); ++i) {
    const AtomRange range = partition.member_ranges[i];
    const double avg = stopping.averages[static_cast<Eigen::Index>(i)];
    auto seg_max = out.maximal.segment(static_cast<Eigen::Index>(range.begin),
                                       static_cast<Eigen::Index>(range.size()));
    seg_max = seg_max.cwiseMax(avg);
    if (stopping.is_principal(i)) {
      out.principal_sum
          .segment(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size()))
          .array() += std::pow(avg, p);
      out.integrated_lhs += std::pow(avg, p) * mass(sigma, family[i]);
    }
  }

  const Eigen::VectorXd sigma_atoms = atom_masses(sigma, partition.atoms);
  const Eigen::ArrayXd bound = out.constant * out.maximal.array().pow(p);
  out.integrated_rhs = (bound * sigma_atoms.array()).sum();
  for (Eigen::Index a = 0; a < n_atoms; ++a) {
    if (out.principal_sum[a] == 0.0) continue;
    out.worst_ratio = std::max(out.worst_ratio, out.principal_sum[a] / bound[a]);
  }
  return out;
}

}  // namespace sparselab
