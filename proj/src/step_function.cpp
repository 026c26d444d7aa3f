#include "sparselab/step_function.hpp"

#include <algorithm>

#include "sparselab/errors.hpp"

namespace sparselab {

StepFunction::StepFunction(std::vector<DyadicInterval> atoms_, Eigen::VectorXd values_)
    : atoms(std::move(atoms_)), values(std::move(values_)) {
  if (static_cast<std::size_t>(values.size()) != atoms.size()) {
    throw PreconditionError("step function: value count does not match atom count");
  }
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i - 1].right() > atoms[i].left()) {
      throw PreconditionError("step function: atoms must be sorted and disjoint");
    }
  }
}

StepFunction StepFunction::constant(std::vector<DyadicInterval> atoms, double value) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(atoms.size()), value);
  return {std::move(atoms), std::move(v)};
}

StepFunction StepFunction::indicator(std::vector<DyadicInterval> atoms, const DyadicInterval& q) {
  auto range = atom_range(atoms, q);
  if (!range) throw PreconditionError("indicator: partition does not resolve " + to_string(q));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(atoms.size()));
  v.segment(static_cast<Eigen::Index>(range->begin), static_cast<Eigen::Index>(range->size()))
      .setOnes();
  return {std::move(atoms), std::move(v)};
}

double StepFunction::at(double x) const {
  auto it = std::upper_bound(atoms.begin(), atoms.end(), x,
                             [](double v, const DyadicInterval& a) { return v < a.right(); });
  if (it == atoms.end() || x < it->left()) return 0.0;
  return values[it - atoms.begin()];
}

}  // namespace sparselab
