#include "sparselab/instances.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace sparselab {

std::string describe(const Instance& inst) {
  std::ostringstream os;
  os.precision(12);
  os << "members=" << inst.family.size() << " eta=" << inst.family.eta() << " p=" << inst.cfg.p
     << " q=" << inst.cfg.q << " r=" << inst.cfg.r << " alpha=" << inst.cfg.alpha
     << " omega=" << inst.omega.describe() << " sigma=" << inst.sigma.describe();
  return os.str();
}

SparseFamily random_family(Rng& rng, int depth, double max_carleson) {
  const double density = rng.uniform(0.15, 0.45);
  for (;;) {
    std::vector<DyadicInterval> members{{0, 0}};
    for (int level = 1; level <= depth; ++level) {
      for (std::int64_t pos = 0; pos < (std::int64_t{1} << level); ++pos) {
        if (rng.bernoulli(density)) members.push_back({level, pos});
      }
    }
    SparseFamily family = make_family(std::move(members));
    if (1.0 / family.eta() <= max_carleson) return family;
  }
}

Weight random_weight(Rng& rng, int depth, double lo, double hi) {
  Eigen::VectorXd values(Eigen::Index{1} << depth);
  for (auto& v : values) v = rng.log_uniform(lo, hi);
  return Weight::piecewise(DyadicInterval{0, 0}, depth, std::move(values));
}

ExponentConfig random_config(Rng& rng, ConfigRange range) {
  if (range == ConfigRange::linearizing) {
    const double r = rng.uniform(1.1, 2.5);
    const double p = rng.uniform(r + 0.25, r + 2.5);
    const double q = p * rng.uniform(1.0, 2.0);
    return ExponentConfig::make(p, q, r, rng.uniform(0.3, 1.0));
  }
  const double p = rng.uniform(1.25, 4.0);
  const double r = rng.uniform(0.5, 3.0);
  if (rng.bernoulli(1.0 / 3.0)) {
    const double alpha = rng.bernoulli(0.5) ? 1.0 : rng.uniform(0.3, 1.0);
    return ExponentConfig::make(p, p, r, alpha);
  }
  const double q = p * rng.uniform(1.05, 2.0);
  const double top = 1.0 / q + (1.0 - 1.0 / p);
  const double alpha = rng.bernoulli(0.25) ? top : top * rng.uniform(0.4, 1.0);
  return ExponentConfig::make(p, q, r, alpha);
}

Instance random_instance(std::uint64_t seed, std::size_t index, const RandomSpec& spec) {
  Rng rng(seed, index);
  Instance inst;
  inst.id = "s" + std::to_string(seed) + "-" + std::to_string(index);
  inst.family = random_family(rng, spec.tree_depth, spec.max_carleson);
  inst.cfg = random_config(rng, spec.range);
  inst.omega = random_weight(rng, spec.weight_depth, spec.weight_lo, spec.weight_hi);
  inst.sigma = random_weight(rng, spec.weight_depth, spec.weight_lo, spec.weight_hi);
  inst.depth = spec.weight_depth;
  return inst;
}

std::vector<Instance> random_suite(std::uint64_t seed, std::size_t trials, const RandomSpec& spec) {
  std::vector<Instance> out;
  out.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) out.push_back(random_instance(seed, i, spec));
  return out;
}

std::vector<Instance> oracle_suite() {
  // Every subset of the six non-root intervals down to level 2 whose atom
  // partition has at most 3 atoms.
  const std::array<DyadicInterval, 6> nodes{{{1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}, {2, 3}}};
  std::vector<SparseFamily> families;
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<DyadicInterval> members{{0, 0}};
    for (unsigned b = 0; b < 6; ++b) {
      if (mask & (1u << b)) members.push_back(nodes[b]);
    }
    SparseFamily family = make_family(std::move(members));
    if (atoms_of(family).size() <= 3) families.push_back(std::move(family));
  }

  const std::array<ExponentConfig, 5> configs{
      ExponentConfig::make(2.0, 2.0, 1.0, 1.0), ExponentConfig::make(2.0, 3.0, 2.0, 0.8),
      ExponentConfig::make(1.5, 3.0, 0.7, 0.9), ExponentConfig::make(3.0, 3.0, 1.5, 0.6),
      ExponentConfig::make(4.0, 6.0, 2.0, 0.5)};
  const std::array<Weight, 4> weights{
      Weight::lebesgue(), Weight::power(-0.5), Weight::power(0.5, 2.0),
      Weight::piecewise(DyadicInterval{0, 0}, 2, Eigen::Vector4d(0.3, 2.0, 5.0, 0.7))};

  std::vector<Instance> out;
  for (std::size_t k = 0; k < 2 * families.size(); ++k) {
    Instance inst;
    inst.id = "oracle-" + std::to_string(k);
    inst.family = families[k % families.size()];
    inst.cfg = configs[k % configs.size()];
    inst.omega = weights[k % weights.size()];
    inst.sigma = weights[(k / 2 + 1) % weights.size()];
    inst.depth = 2;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace sparselab
