#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparselab/testing.hpp"

namespace sparselab::cli {

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

/// Default trial counts used for calibration (thm11 runs 200, the rest 100).
std::size_t default_trials(const std::string& suite);

struct SuiteRun {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<ComparabilityReport> reports;  // ordered by instance index
};

/// Seeded random-instance suite; every instance is drawn from its own
/// (seed, index) stream.
SuiteRun run_suite(const std::string& suite, std::uint64_t seed, std::size_t trials);

struct Bound {
  double lower = 0.0;
  double upper = 0.0;
};

/// Keyed by (suite, statement).
using Baselines = std::map<std::pair<std::string, std::string>, Bound>;

/// Lines "suite statement lower upper"; '#' starts a comment.
Baselines load_baselines(const std::string& path);
void save_baselines(const std::string& path, const Baselines& baselines);
std::string default_baselines_path();

/// Statements whose ratio has a proven ceiling (1 up to rounding) that the
/// baselines file cannot loosen.
std::optional<Bound> exact_bound(const std::string& statement);

struct Violation {
  std::size_t row = 0;
  std::string reason;
};

std::vector<Violation> check_baselines(const SuiteRun& run, const Baselines& baselines);

/// min / margin and max * margin per statement over the nontrivial reports.
Baselines calibrate(const SuiteRun& run, double margin = 1.1);

}  // namespace sparselab::cli
