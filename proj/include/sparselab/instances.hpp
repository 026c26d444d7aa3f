#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sparselab/dyadic.hpp"
#include "sparselab/random.hpp"
#include "sparselab/weights.hpp"

namespace sparselab {

/// A family, exponents and weight pair, as consumed by every check.
struct Instance {
  std::string id;
  SparseFamily family;
  ExponentConfig cfg;
  Weight omega;
  Weight sigma;
  /// Resolution of the weights; ainfty and the grid characteristic use it.
  int depth = 0;
};

std::string describe(const Instance& inst);

/// Which exponent ranges to draw from.
enum class ConfigRange {
  feasible,     // 1 < p <= q, alpha <= 1/q + 1/p'; a third of draws diagonal
  linearizing,  // 1 < r < p <= q
};

struct RandomSpec {
  int tree_depth = 6;
  int weight_depth = 6;
  double max_carleson = 4.0;
  double weight_lo = 1e-2;
  double weight_hi = 1e2;
  ConfigRange range = ConfigRange::feasible;
};

/// Random subset of the dyadic tree below [0, 1) down to `depth`, always
/// containing the root, accepted once its Carleson constant is <= max_carleson.
SparseFamily random_family(Rng& rng, int depth, double max_carleson);

/// Piecewise-constant weight on the level-`depth` grid, values log-uniform.
Weight random_weight(Rng& rng, int depth, double lo, double hi);

ExponentConfig random_config(Rng& rng, ConfigRange range);

/// Instance `index` of the suite seeded by `seed`; independent of the others.
Instance random_instance(std::uint64_t seed, std::size_t index, const RandomSpec& spec = {});

std::vector<Instance> random_suite(std::uint64_t seed, std::size_t trials, const RandomSpec& spec = {});

/// Instances with at most 3 atoms, covering chains, two-child splits and
/// mixed power and piecewise weights under several exponent tuples.
std::vector<Instance> oracle_suite();

}  // namespace sparselab
