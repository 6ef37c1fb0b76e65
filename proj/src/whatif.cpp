// SPDX-License-Identifier: Apache-2.0
#include "provabs/whatif.hpp"

#include <algorithm>
#include <cstdio>

#include "provabs/error.hpp"

namespace provabs {

using nlohmann::json;

Target parse_target(std::string_view name) {
  if (name == "full") return Target::full;
  if (name == "compressed") return Target::compressed;
  if (name == "both") return Target::both;
  throw ValidationError("unknown target '" + std::string(name) + "' (expected full, compressed or both)");
}

TimedEvaluation timed_evaluation(const ProvenanceBundle& bundle, const Valuation& valuation, int repetitions) {
  if (repetitions < 1) repetitions = 1;
  TimedEvaluation out;
  for (int i = 0; i < repetitions; ++i) {
    auto pass = evaluate_bundle(bundle, valuation);
    out.samples.push_back(pass.duration);
    if (i == 0) out.values = std::move(pass.values);
  }
  auto sorted = out.samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  out.median = sorted.size() % 2 == 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
  return out;
}

double speedup_percent(std::chrono::nanoseconds full, std::chrono::nanoseconds compressed) {
  if (full.count() <= 0) return 0.0;
  return 100.0 * (1.0 - static_cast<double>(compressed.count()) / static_cast<double>(full.count()));
}

Comparison compare_scenario(const ProvenanceBundle& full, const ProvenanceBundle& compressed,
                            const AbstractionMapping& mapping, const Valuation& meta_valuation,
                            const std::map<std::string, double>& baseline, Target target) {
  Comparison out;
  out.target = target;
  out.full_size = full.size();
  out.compressed_size = compressed.size();

  std::optional<TimedEvaluation> full_eval, compressed_eval;
  if (target != Target::compressed) {
    full_eval = timed_evaluation(full, induced_valuation(meta_valuation, mapping));
    out.full_time = full_eval->median;
  }
  if (target != Target::full) {
    compressed_eval = timed_evaluation(compressed, meta_valuation);
    out.compressed_time = compressed_eval->median;
  }
  if (full_eval && compressed_eval) out.speedup = speedup_percent(full_eval->median, compressed_eval->median);

  for (const auto& poly : full.polynomials()) {
    ComparisonRow row{poly.key(), 0.0, std::nullopt, std::nullopt};
    if (auto b = baseline.find(poly.key()); b != baseline.end()) row.baseline = b->second;
    if (full_eval) row.full = full_eval->values.at(poly.key());
    if (compressed_eval) {
      auto c = compressed_eval->values.find(poly.key());
      row.compressed = c == compressed_eval->values.end() ? 0.0 : c->second;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

const char* target_name(Target t) {
  switch (t) {
    case Target::full:
      return "full";
    case Target::compressed:
      return "compressed";
    case Target::both:
      return "both";
  }
  return "both";
}

double seconds(std::chrono::nanoseconds d) { return std::chrono::duration<double>(d).count(); }

}  // namespace

json comparison_to_json(const Comparison& c) {
  json rows = json::array();
  for (const auto& r : c.rows) {
    json row = {{"key", r.key}, {"baseline", r.baseline}};
    if (r.full) {
      row["full"] = *r.full;
      row["delta_full"] = *r.full - r.baseline;
    }
    if (r.compressed) {
      row["compressed"] = *r.compressed;
      row["delta_compressed"] = *r.compressed - r.baseline;
    }
    rows.push_back(std::move(row));
  }
  json timing = json::object();
  if (c.full_time) timing["full_seconds"] = seconds(*c.full_time);
  if (c.compressed_time) timing["compressed_seconds"] = seconds(*c.compressed_time);
  timing["repetitions"] = kTimingRepetitions;
  return {
      {"target", target_name(c.target)},
      {"results", std::move(rows)},
      {"size", {{"full", c.full_size}, {"compressed", c.compressed_size}}},
      {"timing", std::move(timing)},
      {"speedup_percent", c.speedup ? json(*c.speedup) : json(nullptr)},
  };
}

std::string format_comparison(const Comparison& c) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %16s %16s %14s %16s %14s\n", "key", "baseline", "full", "delta", "compressed",
                "delta");
  out += line;
  auto cell = [](const std::optional<double>& v, double base, bool delta) {
    char buf[32];
    if (!v) return std::string("-");
    std::snprintf(buf, sizeof buf, delta ? "%+.6g" : "%.10g", delta ? *v - base : *v);
    return std::string(buf);
  };
  for (const auto& r : c.rows) {
    char base[32];
    std::snprintf(base, sizeof base, "%.10g", r.baseline);
    std::snprintf(line, sizeof line, "%-16s %16s %16s %14s %16s %14s\n", r.key.c_str(), base,
                  cell(r.full, r.baseline, false).c_str(), cell(r.full, r.baseline, true).c_str(),
                  cell(r.compressed, r.baseline, false).c_str(), cell(r.compressed, r.baseline, true).c_str());
    out += line;
  }
  std::snprintf(line, sizeof line, "size: full %zu, compressed %zu\n", c.full_size, c.compressed_size);
  out += line;
  if (c.full_time) {
    std::snprintf(line, sizeof line, "time (median of %d): full %.3f us\n", kTimingRepetitions, seconds(*c.full_time) * 1e6);
    out += line;
  }
  if (c.compressed_time) {
    std::snprintf(line, sizeof line, "time (median of %d): compressed %.3f us\n", kTimingRepetitions,
                  seconds(*c.compressed_time) * 1e6);
    out += line;
  }
  if (c.speedup) {
    std::snprintf(line, sizeof line, "speedup: %.1f%%\n", *c.speedup);
    out += line;
  }
  return out;
}

}  // namespace provabs
