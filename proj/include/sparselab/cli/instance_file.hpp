#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sparselab/dyadic.hpp"
#include "sparselab/sparse_operator.hpp"
#include "sparselab/weights.hpp"

namespace sparselab::cli {

/// Malformed instance file; `field` is a dotted path such as "omega.beta".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct InstanceFile {
  ExponentConfig cfg;
  SparseFamily family;
  Weight omega;
  Weight sigma;
  AscentOptions ascent;
  /// Level down to which ainfty and the grid characteristic are evaluated.
  int depth = 6;
  std::string digest;
};

/// JSON schema:
///   exponents: {p, q, r, alpha}
///   family:    {kind: "chain", K} | {kind: "explicit", members: [[level, position], ...], eta?}
///   omega, sigma: {kind: "lebesgue"} | {kind: "power", beta, coefficient?}
///                | {kind: "piecewise", depth, values: [...]}
///   options (optional): {seed, restarts, tol, max_iters, depth}
InstanceFile parse_instance(const std::string& text);
InstanceFile load_instance(const std::string& path);

/// FNV-1a 64, as 16 hex digits.
std::string digest(const std::string& bytes);

}  // namespace sparselab::cli
