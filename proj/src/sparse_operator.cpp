#include "sparselab/sparse_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sparselab/errors.hpp"
#include "sparselab/random.hpp"

namespace sparselab {
namespace {

constexpr double kLogClamp = 50.0;
constexpr double kLogFloor = -700.0;

// Everything the ascent needs from one evaluation at f.
struct Evaluation {
  double log_ratio = -std::numeric_limits<double>::infinity();
  double n = 0.0;  // sum_a omega_a S_a^{q/r}
  double p = 0.0;  // sum_a sigma_a f_a^p
  Eigen::VectorXd cubes;  // c_Q = lambda_Q int_Q f dsigma
  Eigen::VectorXd sums;   // S_a = sum_{Q contains a} c_Q^r
};

Evaluation evaluate(const NormProblem& pb, const Eigen::VectorXd& f) {
  Evaluation ev;
  const auto& op = pb.op;
  ev.cubes = op.coefficients.cwiseProduct(op.incidence * f.cwiseProduct(pb.sigma_atoms));
  if (op.r == 1.0) {
    ev.sums = op.incidence.transpose() * ev.cubes;
  } else {
    ev.sums = op.incidence.transpose() * ev.cubes.array().pow(op.r).matrix();
  }
  ev.n = (pb.omega_atoms.array() * ev.sums.array().pow(pb.q / op.r)).sum();
  ev.p = (pb.sigma_atoms.array() * f.array().pow(pb.p)).sum();
  if (ev.n > 0.0 && ev.p > 0.0) ev.log_ratio = std::log(ev.n) / pb.q - std::log(ev.p) / pb.p;
  return ev;
}

// Atoms that influence the ratio: inside some member with a positive
// coefficient and carrying sigma-mass.
std::vector<Eigen::Index> active_atoms(const NormProblem& pb) {
  Eigen::VectorXd reach = pb.op.incidence.transpose() * (pb.op.coefficients.array() > 0.0).cast<double>().matrix();
  std::vector<Eigen::Index> active;
  for (Eigen::Index a = 0; a < reach.size(); ++a) {
    if (reach[a] > 0.0 && pb.sigma_atoms[a] > 0.0) active.push_back(a);
  }
  return active;
}

struct RunResult {
  Eigen::VectorXd f;
  double log_ratio = -std::numeric_limits<double>::infinity();
  long iterations = 0;
  bool converged = false;
};

RunResult ascend(const NormProblem& pb, const std::vector<Eigen::Index>& active,
                 Eigen::VectorXd f, const AscentOptions& opts) {
  const auto n_active = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXd u(n_active);
  for (Eigen::Index i = 0; i < n_active; ++i) u[i] = std::max(std::log(f[active[static_cast<std::size_t>(i)]]), kLogFloor);

  auto expand = [&](const Eigen::VectorXd& logs) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(pb.sigma_atoms.size());
    const double top = logs.maxCoeff();
    for (Eigen::Index i = 0; i < n_active; ++i) {
      full[active[static_cast<std::size_t>(i)]] = std::exp(std::max(logs[i] - top, kLogFloor));
    }
    return full;
  };

  RunResult out;
  out.f = expand(u);
  Evaluation ev = evaluate(pb, out.f);
  const double q_over_r = pb.q / pb.op.r;

  for (; out.iterations < opts.max_iters; ++out.iterations) {
    // rho_b = k_b P / (N f_b^{p-1}) where k = M^T (lambda c^{r-1} M (omega S^{q/r-1})).
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(ev.sums.size());
    for (Eigen::Index a = 0; a < tail.size(); ++a) {
      if (ev.sums[a] > 0.0) tail[a] = pb.omega_atoms[a] * std::pow(ev.sums[a], q_over_r - 1.0);
    }
    const Eigen::VectorXd h = pb.op.incidence * tail;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(h.size());
    for (Eigen::Index m = 0; m < g.size(); ++m) {
      if (ev.cubes[m] > 0.0) {
        g[m] = pb.op.coefficients[m] * (pb.op.r == 1.0 ? 1.0 : std::pow(ev.cubes[m], pb.op.r - 1.0)) * h[m];
      }
    }
    const Eigen::VectorXd k = pb.op.incidence.transpose() * g;

    Eigen::VectorXd dir(n_active);
    for (Eigen::Index i = 0; i < n_active; ++i) {
      const Eigen::Index a = active[static_cast<std::size_t>(i)];
      const double rho = k[a] * ev.p / (ev.n * std::pow(out.f[a], pb.p - 1.0));
      dir[i] = rho > 0.0 ? std::clamp(std::log(rho), -kLogClamp, kLogClamp) : -kLogClamp;
    }
    if (!dir.allFinite()) break;

    double step = 1.0 / (pb.p - 1.0);
    bool accepted = false;
    Eigen::VectorXd u_try, f_try;
    Evaluation ev_try;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      u_try = u + step * dir;
      u_try.array() -= u_try.maxCoeff();
      u_try = u_try.cwiseMax(kLogFloor);
      f_try = expand(u_try);
      ev_try = evaluate(pb, f_try);
      if (ev_try.log_ratio > ev.log_ratio) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double gain = std::expm1(ev_try.log_ratio - ev.log_ratio);
    u = std::move(u_try);
    out.f = std::move(f_try);
    ev = std::move(ev_try);
    if (gain < opts.tol) {
      out.converged = true;
      ++out.iterations;
      break;
    }
  }
  out.log_ratio = ev.log_ratio;
  return out;
}

double norm_direct(const std::vector<double>& values, const Eigen::VectorXd& masses, double p) {
  double total = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    total += std::pow(std::abs(values[a]), p) * masses[static_cast<Eigen::Index>(a)];
  }
  return std::pow(total, 1.0 / p);
}

}  // namespace

Eigen::SparseMatrix<double> incidence_matrix(const AtomPartition& partition) {
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < partition.member_ranges.size(); ++i) {
    const auto& range = partition.member_ranges[i];
    for (std::size_t a = range.begin; a < range.end; ++a) {
      entries.emplace_back(static_cast<int>(i), static_cast<int>(a), 1.0);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(partition.member_ranges.size()),
                                static_cast<Eigen::Index>(partition.size()));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

DiscreteInstance discretize(const SparseFamily& family, const Weight& omega, const Weight& sigma,
                            int extra_depth) {
  DiscreteInstance inst;
  inst.family = family;
  inst.partition = atoms_of(family, extra_depth);
  inst.incidence = incidence_matrix(inst.partition);
  const auto n = static_cast<Eigen::Index>(family.size());
  inst.lengths.resize(n);
  inst.sigma_cubes.resize(n);
  inst.omega_cubes.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& q = family[static_cast<std::size_t>(i)];
    inst.lengths[i] = q.length();
    inst.sigma_cubes[i] = mass(sigma, q);
    inst.omega_cubes[i] = mass(omega, q);
  }
  inst.sigma_atoms = atom_masses(sigma, inst.partition.atoms);
  inst.omega_atoms = atom_masses(omega, inst.partition.atoms);
  return inst;
}

Eigen::VectorXd subtree_sum(const DiscreteInstance& inst, std::size_t r_member,
                            const Eigen::VectorXd& coef) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.atoms()));
  for (std::size_t j = r_member; j < inst.family.subtree_end(r_member); ++j) {
    const auto& range = inst.partition.member_ranges[j];
    out.segment(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size()))
        .array() += coef[static_cast<Eigen::Index>(j)];
  }
  return out;
}

double lp_norm(const Eigen::VectorXd& values, const Eigen::VectorXd& masses, double p) {
  if (!(p > 0.0)) throw ParameterError("L^p exponent must be positive");
  // Scaled by the largest entry so large p cannot overflow.
  const double top = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  if (!(top > 0.0)) return 0.0;
  return top * std::pow(((values.array().abs() / top).pow(p) * masses.array()).sum(), 1.0 / p);
}

double lp_norm(const StepFunction& f, const Weight& w, double p) {
  return lp_norm(f.values, atom_masses(w, f.atoms), p);
}

Eigen::VectorXd CubeSumOperator::apply(const Eigen::VectorXd& weighted) const {
  const Eigen::VectorXd cubes = coefficients.cwiseProduct(incidence * weighted);
  if (r == 1.0) return incidence.transpose() * cubes;
  const Eigen::VectorXd sums = incidence.transpose() * cubes.array().pow(r).matrix();
  return sums.array().pow(1.0 / r).matrix();
}

double NormProblem::ratio(const Eigen::VectorXd& f) const {
  const double denom = lp_norm(f, sigma_atoms, p);
  if (!(denom > 0.0)) return 0.0;
  return lp_norm(op.apply(f.cwiseProduct(sigma_atoms)), omega_atoms, q) / denom;
}

NormProblem sparse_problem(const DiscreteInstance& inst, const ExponentConfig& cfg) {
  NormProblem pb;
  pb.op.incidence = inst.incidence;
  pb.op.coefficients = inst.lengths.array().pow(-cfg.alpha).matrix();
  pb.op.r = cfg.r;
  pb.sigma_atoms = inst.sigma_atoms;
  pb.omega_atoms = inst.omega_atoms;
  pb.p = cfg.p;
  pb.q = cfg.q;
  return pb;
}

IndicatorBound best_indicator(const NormProblem& pb, const DiscreteInstance& inst) {
  IndicatorBound best;
  for (std::size_t i = 0; i < inst.members(); ++i) {
    const auto& range = inst.partition.member_ranges[i];
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.atoms()));
    f.segment(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size())).setOnes();
    const double value = pb.ratio(f);
    if (value > best.value) best = {value, i};
  }
  return best;
}

OpNormEstimate estimate_norm(const NormProblem& pb, const std::vector<DyadicInterval>& atoms,
                             const AscentOptions& opts) {
  if (!(pb.p > 1.0)) throw ParameterError("norm estimation needs p > 1");
  if (opts.restarts < 0 || opts.max_iters < 1 || !(opts.tol > 0.0)) {
    throw ParameterError("ascent options: restarts >= 0, max_iters >= 1, tol > 0");
  }
  const auto n = pb.sigma_atoms.size();
  OpNormEstimate est;
  est.seed = opts.seed;
  est.restarts = opts.restarts;

  // Certified lower bound: best indicator of a row of the incidence matrix.
  Eigen::VectorXd best_f = Eigen::VectorXd::Zero(n);
  const Eigen::SparseMatrix<double, Eigen::RowMajor> rows = pb.op.incidence;
  for (Eigen::Index m = 0; m < rows.rows(); ++m) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, m); it; ++it) f[it.col()] = 1.0;
    const double value = pb.ratio(f);
    if (value > est.certified_lower) {
      est.certified_lower = value;
      best_f = std::move(f);
    }
  }

  const auto active = active_atoms(pb);
  double best_value = est.certified_lower;
  bool best_converged = true;
  if (!active.empty() && est.certified_lower > 0.0) {
    Rng rng(opts.seed);
    for (int start = 0; start <= opts.restarts; ++start) {
      Eigen::VectorXd f0 = Eigen::VectorXd::Zero(n);
      if (start < opts.restarts) {
        for (auto a : active) f0[a] = rng.log_uniform(1e-3, 1e3);
      } else {
        for (auto a : active) f0[a] = best_f[a] > 0.0 ? 1.0 : 1e-6;
      }
      RunResult run = ascend(pb, active, std::move(f0), opts);
      est.iterations += run.iterations;
      const double value = pb.ratio(run.f);
      if (value > best_value) {
        best_value = value;
        best_f = std::move(run.f);
        best_converged = run.converged;
      }
    }
  }
  est.maximizer = StepFunction(atoms, best_f);
  est.ascent_value = pb.ratio(best_f);
  est.converged = best_converged;
  return est;
}

StepFunction apply(const SparseFamily& family, const ExponentConfig& cfg, const Weight& sigma,
                   const StepFunction& f) {
  if (!f.nonnegative()) throw PreconditionError("apply: f must be nonnegative");
  AtomPartition partition{family.root(), f.atoms, {}};
  for (const auto& q : family.members()) {
    auto range = atom_range(f.atoms, q);
    if (!range) throw PreconditionError("apply: partition of f does not resolve member " + to_string(q));
    partition.member_ranges.push_back(*range);
  }
  CubeSumOperator op;
  op.incidence = incidence_matrix(partition);
  op.coefficients.resize(static_cast<Eigen::Index>(family.size()));
  for (std::size_t i = 0; i < family.size(); ++i) {
    op.coefficients[static_cast<Eigen::Index>(i)] = std::pow(family[i].length(), -cfg.alpha);
  }
  op.r = cfg.r;
  const Eigen::VectorXd sigma_atoms = atom_masses(sigma, f.atoms);
  return {f.atoms, op.apply(f.values.cwiseProduct(sigma_atoms))};
}

double indicator_lower_bound(const SparseFamily& family, const ExponentConfig& cfg,
                             const Weight& omega, const Weight& sigma) {
  const DiscreteInstance inst = discretize(family, omega, sigma);
  for (Eigen::Index i = 0; i < inst.sigma_cubes.size(); ++i) {
    if (!(inst.sigma_cubes[i] > 0.0)) {
      throw DegenerateInstanceError("indicator bound: zero sigma-mass on a member");
    }
  }
  return best_indicator(sparse_problem(inst, cfg), inst).value;
}

OpNormEstimate estimate_opnorm(const SparseFamily& family, const ExponentConfig& cfg,
                               const Weight& omega, const Weight& sigma, const AscentOptions& opts) {
  const DiscreteInstance inst = discretize(family, omega, sigma);
  for (Eigen::Index i = 0; i < inst.sigma_cubes.size(); ++i) {
    if (!(inst.sigma_cubes[i] > 0.0)) {
      throw DegenerateInstanceError("operator norm: zero sigma-mass on a member");
    }
  }
  return estimate_norm(sparse_problem(inst, cfg), inst.partition.atoms, opts);
}

double oracle_opnorm(const SparseFamily& family, const ExponentConfig& cfg, const Weight& omega,
                     const Weight& sigma, int grid_res) {
  const AtomPartition partition = atoms_of(family);
  const std::size_t n = partition.size();
  if (n > 3) throw PreconditionError("oracle_opnorm: instance has more than 3 atoms");
  if (grid_res < 2) throw ParameterError("oracle_opnorm: grid resolution must be at least 2");
  const Eigen::VectorXd sm = atom_masses(sigma, partition.atoms);
  const Eigen::VectorXd om = atom_masses(omega, partition.atoms);

  // Direct evaluation of the cube sum, member by member.
  auto ratio = [&](const std::array<double, 3>& f) {
    std::vector<double> fv(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < family.size(); ++i) {
      const auto& range = partition.member_ranges[i];
      double integral = 0.0;
      for (std::size_t a = range.begin; a < range.end; ++a) integral += fv[a] * sm[static_cast<Eigen::Index>(a)];
      const double term = std::pow(std::pow(family[i].length(), -cfg.alpha) * integral, cfg.r);
      for (std::size_t a = range.begin; a < range.end; ++a) out[a] += term;
    }
    for (auto& v : out) v = std::pow(v, 1.0 / cfg.r);
    const double denom = norm_direct(fv, sm, cfg.p);
    return denom > 0.0 ? norm_direct(out, om, cfg.q) / denom : 0.0;
  };
  auto direction = [&](double theta, double phi) -> std::array<double, 3> {
    if (n == 1) return {1.0, 0.0, 0.0};
    if (n == 2) return {std::cos(theta), std::sin(theta), 0.0};
    return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), std::sin(theta)};
  };

  const double half_pi = std::numbers::pi / 2.0;
  if (n == 1) return ratio(direction(0.0, 0.0));
  const int dims = n == 2 ? 1 : 2;
  double best = -1.0;
  double best_t = 0.0, best_p = 0.0;
  double lo_t = 0.0, hi_t = half_pi, lo_p = 0.0, hi_p = half_pi;
  for (int round = 0; round < 60; ++round) {
    const double step_t = (hi_t - lo_t) / grid_res;
    const double step_p = dims == 2 ? (hi_p - lo_p) / grid_res : 0.0;
    for (int i = 0; i <= grid_res; ++i) {
      const double t = lo_t + i * step_t;
      for (int j = 0; j <= (dims == 2 ? grid_res : 0); ++j) {
        const double ph = lo_p + j * step_p;
        const double value = ratio(direction(t, ph));
        if (value > best) {
          best = value;
          best_t = t;
          best_p = ph;
        }
      }
    }
    if (step_t < 1e-13 && (dims == 1 || step_p < 1e-13)) break;
    lo_t = std::max(0.0, best_t - 2.0 * step_t);
    hi_t = std::min(half_pi, best_t + 2.0 * step_t);
    if (dims == 2) {
      lo_p = std::max(0.0, best_p - 2.0 * step_p);
      hi_p = std::min(half_pi, best_p + 2.0 * step_p);
    }
  }
  return best;
}

TheoremBranch theorem_branch(const ExponentConfig& cfg) {
  return (cfg.p == cfg.q && cfg.p > cfg.r && cfg.alpha < 1.0) ? TheoremBranch::diagonal_fractional
                                                               : TheoremBranch::generic;
}

std::string to_string(TheoremBranch branch) {
  return branch == TheoremBranch::generic ? "generic" : "diagonal-fractional";
}

double theorem_rhs(const ExponentConfig& cfg, double characteristic, double ainfty_sigma,
                   double ainfty_omega) {
  const double p = cfg.p, q = cfg.q, r = cfg.r;
  if (theorem_branch(cfg) == TheoremBranch::generic) {
    const double omega_exp = std::max(1.0 / r - 1.0 / p, 0.0);
    return characteristic * (std::pow(ainfty_sigma, 1.0 / q) + std::pow(ainfty_omega, omega_exp));
  }
  const double t = 1.0 - r / p;
  const double u = r / p;
  return characteristic *
         (std::pow(ainfty_omega, t * t / r) * std::pow(ainfty_sigma, (1.0 - t * t) / r) +
          std::pow(ainfty_omega, (1.0 - u * u) / r) * std::pow(ainfty_sigma, u * u / r));
}

}  // namespace sparselab
