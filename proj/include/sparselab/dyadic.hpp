#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparselab {

/// Half-open dyadic interval [position * 2^-level, (position + 1) * 2^-level).
struct DyadicInterval {
  int level = 0;
  std::int64_t position = 0;

  double left() const;
  double right() const;
  double length() const;

  /// True when `other` is a subset of *this (equality included).
  bool contains(const DyadicInterval& other) const;

  DyadicInterval parent() const;
  DyadicInterval left_child() const { return {level + 1, 2 * position}; }
  DyadicInterval right_child() const { return {level + 1, 2 * position + 1}; }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// Order by left endpoint, then larger interval first. Under this order every
/// interval is followed immediately by all of its dyadic subintervals.
std::strong_ordering operator<=>(const DyadicInterval& a, const DyadicInterval& b);

std::string to_string(const DyadicInterval& q);

enum class Relation { disjoint, equal, first_inside_second, second_inside_first };

Relation relate(const DyadicInterval& a, const DyadicInterval& b);

struct AtomRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last atom
  std::size_t size() const { return end - begin; }
};

/// Finite family of dyadic intervals inside a common root, with its sparsity
/// constant. Members are sorted (see operator<=>) and unique.
class SparseFamily {
 public:
  SparseFamily() = default;

  const DyadicInterval& root() const { return root_; }
  const std::vector<DyadicInterval>& members() const { return members_; }
  const DyadicInterval& operator[](std::size_t i) const { return members_[i]; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  double eta() const { return eta_; }

  /// Index of the minimal member strictly containing member i, or -1.
  int parent(std::size_t i) const { return parent_[i]; }
  /// Members contained in member i (itself included) occupy [i, subtree_end(i)).
  std::size_t subtree_end(std::size_t i) const { return subtree_end_[i]; }
  std::optional<std::size_t> index_of(const DyadicInterval& q) const;

  int max_level() const;

  friend SparseFamily make_family(std::vector<DyadicInterval>, DyadicInterval,
                                  std::optional<double>);

 private:
  DyadicInterval root_{};
  std::vector<DyadicInterval> members_;
  std::vector<int> parent_;
  std::vector<std::size_t> subtree_end_;
  double eta_ = 1.0;
};

/// Builds a family. Members outside `root` are rejected. When `eta` is absent
/// it is set to 1 / carleson_constant; a declared eta must satisfy the
/// packing condition.
SparseFamily make_family(std::vector<DyadicInterval> members, DyadicInterval root = {},
                         std::optional<double> eta = std::nullopt);

/// {[0, 2^-k) : 0 <= k <= depth}, declared 1/2-sparse.
SparseFamily chain_family(int depth);

/// max_R sum_{Q in S, Q subset R} |Q| / |R|.
double carleson_constant(const SparseFamily& family);

/// Ordered disjoint dyadic atoms covering the root; each family member is a
/// contiguous run of atoms.
struct AtomPartition {
  DyadicInterval root;
  std::vector<DyadicInterval> atoms;
  std::vector<AtomRange> member_ranges;

  std::size_t size() const { return atoms.size(); }
};

/// Coarsest dyadic partition of the root resolving every member, refined
/// uniformly `extra_depth` more levels.
AtomPartition atoms_of(const SparseFamily& family, int extra_depth = 0);

/// All dyadic subintervals of `root` at absolute level `depth`.
std::vector<DyadicInterval> uniform_atoms(const DyadicInterval& root, int depth);

/// Run of `atoms` (sorted, disjoint) whose union is `q`, if there is one.
std::optional<AtomRange> atom_range(const std::vector<DyadicInterval>& atoms,
                                    const DyadicInterval& q);

}  // namespace sparselab
