#pragma once

#include <Eigen/Core>
#include <vector>

#include "sparselab/dyadic.hpp"

namespace sparselab {

/// Function constant on each atom of an ordered dyadic partition.
struct StepFunction {
  std::vector<DyadicInterval> atoms;
  Eigen::VectorXd values;

  StepFunction() = default;
  StepFunction(std::vector<DyadicInterval> atoms_, Eigen::VectorXd values_);

  static StepFunction constant(std::vector<DyadicInterval> atoms, double value);
  /// 1_q on a partition that resolves q.
  static StepFunction indicator(std::vector<DyadicInterval> atoms, const DyadicInterval& q);

  std::size_t size() const { return atoms.size(); }
  bool nonnegative() const { return (values.array() >= 0.0).all(); }
  /// Value at x, zero outside the atoms.
  double at(double x) const;
};

}  // namespace sparselab
