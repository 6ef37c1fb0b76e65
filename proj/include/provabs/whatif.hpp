// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "provabs/abstraction.hpp"
#include "provabs/polynomial.hpp"
#include "provabs/valuation.hpp"

namespace provabs {

enum class Target { full, compressed, both };

/// "full", "compressed" or "both"; throws ValidationError otherwise.
Target parse_target(std::string_view name);

struct TimedEvaluation {
  std::map<std::string, double> values;
  std::chrono::nanoseconds median{0};
  std::vector<std::chrono::nanoseconds> samples;
};

inline constexpr int kTimingRepetitions = 5;

/// Evaluates `repetitions` times and keeps the median pass duration.
TimedEvaluation timed_evaluation(const ProvenanceBundle& bundle, const Valuation& valuation,
                                 int repetitions = kTimingRepetitions);

/// Percentage time reduction 100 * (1 - compressed / full).
double speedup_percent(std::chrono::nanoseconds full, std::chrono::nanoseconds compressed);

struct ComparisonRow {
  std::string key;
  double baseline = 0.0;
  std::optional<double> full;
  std::optional<double> compressed;
};

struct Comparison {
  Target target = Target::both;
  std::vector<ComparisonRow> rows;
  std::size_t full_size = 0;
  std::size_t compressed_size = 0;
  std::optional<std::chrono::nanoseconds> full_time;
  std::optional<std::chrono::nanoseconds> compressed_time;
  std::optional<double> speedup;  // only for Target::both
};

/// Evaluates a meta-variable scenario on the compressed bundle and, through
/// the induced valuation, on the full bundle. Deltas are taken against
/// `baseline` (per-key values of the full bundle under the baseline).
Comparison compare_scenario(const ProvenanceBundle& full, const ProvenanceBundle& compressed,
                            const AbstractionMapping& mapping, const Valuation& meta_valuation,
                            const std::map<std::string, double>& baseline, Target target);

nlohmann::json comparison_to_json(const Comparison& comparison);

/// Fixed-width table for terminals.
std::string format_comparison(const Comparison& comparison);

}  // namespace provabs
