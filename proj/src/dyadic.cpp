#include "sparselab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sparselab/errors.hpp"

namespace sparselab {

double DyadicInterval::left() const { return std::ldexp(static_cast<double>(position), -level); }

double DyadicInterval::right() const {
  return std::ldexp(static_cast<double>(position + 1), -level);
}

double DyadicInterval::length() const { return std::ldexp(1.0, -level); }

bool DyadicInterval::contains(const DyadicInterval& other) const {
  if (other.level < level) return false;
  return (other.position >> (other.level - level)) == position;
}

DyadicInterval DyadicInterval::parent() const { return {level - 1, position >> 1}; }

std::strong_ordering operator<=>(const DyadicInterval& a, const DyadicInterval& b) {
  const int common = std::max(a.level, b.level);
  const std::int64_t la = a.position << (common - a.level);
  const std::int64_t lb = b.position << (common - b.level);
  if (auto c = la <=> lb; c != 0) return c;
  return a.level <=> b.level;
}

std::string to_string(const DyadicInterval& q) {
  std::ostringstream out;
  out.precision(17);
  out << '[' << q.left() << ',' << q.right() << ')';
  return out.str();
}

Relation relate(const DyadicInterval& a, const DyadicInterval& b) {
  if (a == b) return Relation::equal;
  if (a.contains(b)) return Relation::second_inside_first;
  if (b.contains(a)) return Relation::first_inside_second;
  return Relation::disjoint;
}

std::optional<std::size_t> SparseFamily::index_of(const DyadicInterval& q) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), q);
  if (it == members_.end() || *it != q) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

int SparseFamily::max_level() const {
  int level = root_.level;
  for (const auto& q : members_) level = std::max(level, q.level);
  return level;
}

SparseFamily make_family(std::vector<DyadicInterval> members, DyadicInterval root,
                         std::optional<double> eta) {
  if (members.empty()) throw DegenerateInstanceError("sparse family has no members");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (const auto& q : members) {
    if (!root.contains(q)) {
      throw PreconditionError("member " + to_string(q) + " lies outside root " + to_string(root));
    }
  }

  SparseFamily family;
  family.root_ = root;
  family.members_ = std::move(members);
  const std::size_t n = family.members_.size();
  family.parent_.assign(n, -1);
  family.subtree_end_.assign(n, n);

  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = family.members_[i];
    while (!stack.empty() && !family.members_[stack.back()].contains(q)) {
      family.subtree_end_[stack.back()] = i;
      stack.pop_back();
    }
    if (!stack.empty()) family.parent_[i] = static_cast<int>(stack.back());
    stack.push_back(i);
  }

  const double packing = carleson_constant(family);
  if (eta) {
    if (!(*eta > 0.0 && *eta <= 1.0)) throw ParameterError("sparsity constant eta must lie in (0,1]");
    if (packing > 1.0 / *eta * (1.0 + 1e-12)) {
      throw ParameterError("declared eta violates the Carleson packing condition");
    }
    family.eta_ = *eta;
  } else {
    family.eta_ = 1.0 / packing;
  }
  return family;
}

SparseFamily chain_family(int depth) {
  if (depth < 0) throw ParameterError("chain depth must be nonnegative");
  std::vector<DyadicInterval> members;
  for (int k = 0; k <= depth; ++k) members.push_back({k, 0});
  return make_family(std::move(members), {}, 0.5);
}

double carleson_constant(const SparseFamily& family) {
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = i; j < family.subtree_end(i); ++j) total += family[j].length();
    worst = std::max(worst, total / family[i].length());
  }
  return worst;
}

std::vector<DyadicInterval> uniform_atoms(const DyadicInterval& root, int depth) {
  if (depth < root.level) throw ParameterError("grid depth is coarser than the root");
  if (depth - root.level > 40) throw ParameterError("grid depth too large");
  const int shift = depth - root.level;
  const std::int64_t count = std::int64_t{1} << shift;
  std::vector<DyadicInterval> atoms;
  atoms.reserve(static_cast<std::size_t>(count));
  for (std::int64_t m = 0; m < count; ++m) atoms.push_back({depth, (root.position << shift) + m});
  return atoms;
}

std::optional<AtomRange> atom_range(const std::vector<DyadicInterval>& atoms,
                                    const DyadicInterval& q) {
  const double lo = q.left();
  const double hi = q.right();
  auto first = std::lower_bound(atoms.begin(), atoms.end(), lo,
                                [](const DyadicInterval& a, double x) { return a.left() < x; });
  if (first == atoms.end() || first->left() != lo) return std::nullopt;
  auto last = std::lower_bound(first, atoms.end(), hi,
                               [](const DyadicInterval& a, double x) { return a.right() < x; });
  if (last == atoms.end() || last->right() != hi) return std::nullopt;
  return AtomRange{static_cast<std::size_t>(first - atoms.begin()),
                   static_cast<std::size_t>(last - atoms.begin()) + 1};
}

AtomPartition atoms_of(const SparseFamily& family, int extra_depth) {
  if (extra_depth < 0) throw ParameterError("extra refinement depth must be nonnegative");
  const DyadicInterval root = family.root();

  // Every strict ancestor of a member (within the root) has to be split.
  std::set<DyadicInterval> split;
  for (const auto& q : family.members()) {
    for (DyadicInterval a = q; a.level > root.level;) {
      a = a.parent();
      if (!split.insert(a).second) break;
    }
  }

  AtomPartition partition;
  partition.root = root;
  std::vector<DyadicInterval> todo{root};
  while (!todo.empty()) {
    const DyadicInterval cur = todo.back();
    todo.pop_back();
    if (split.count(cur)) {
      todo.push_back(cur.right_child());
      todo.push_back(cur.left_child());
    } else {
      for (const auto& a : uniform_atoms(cur, cur.level + extra_depth)) partition.atoms.push_back(a);
    }
  }

  partition.member_ranges.reserve(family.size());
  for (const auto& q : family.members()) {
    auto range = atom_range(partition.atoms, q);
    if (!range) throw PreconditionError("internal: member not resolved by atoms");
    partition.member_ranges.push_back(*range);
  }
  return partition;
}

}  // namespace sparselab
