// SPDX-License-Identifier: Apache-2.0
#include "provabs/service.hpp"

#include <random>
#include <set>

#include "provabs/abstraction.hpp"
#include "provabs/error.hpp"
#include "provabs/io.hpp"
#include "provabs/whatif.hpp"

namespace provabs {

using nlohmann::json;

json ApiError::to_json() const {
  return {{"error", {{"code", code_}, {"message", what()}, {"details", details_}}}};
}

namespace {

template <typename F>
auto translate_errors(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ApiError&) {
    throw;
  } catch (const ParseError& e) {
    throw ApiError(422, "parse_error", e.what(), e.details());
  } catch (const EvaluationError& e) {
    throw ApiError(422, "evaluation_error", e.what(), e.details());
  } catch (const Error& e) {
    throw ApiError(422, "validation_failed", e.what(), e.details());
  }
}

ApiError missing(const std::string& what) {
  return ApiError(409, "missing_input", "session has no " + what + " yet");
}

std::shared_ptr<const std::map<std::string, double>> baseline_of(const Session& s) {
  if (!s.bundle) return nullptr;
  return std::make_shared<const std::map<std::string, double>>(evaluate_bundle(*s.bundle, s.baseline).values);
}

json assignment_screen(const Session& s) {
  const auto& r = *s.result;
  const Valuation defaults = default_meta_valuation(*s.bundle, r.mapping, s.baseline);
  const std::set<std::string> occurring = s.bundle->variables();

  json groups = json::array();
  for (const auto& g : r.mapping.groups()) {
    json leaves = json::array();
    for (const auto& leaf : g.leaves) {
      leaves.push_back({{"name", leaf}, {"baseline", s.baseline.value_of(leaf)}, {"occurs", occurring.contains(leaf)}});
    }
    groups.push_back({{"meta", g.meta}, {"default", defaults.value_of(g.meta)}, {"leaves", std::move(leaves)}});
  }
  json free = json::array();
  for (const auto& v : occurring) {
    if (!r.mapping.meta_of(v) && !r.mapping.is_meta(v)) {
      free.push_back({{"name", v}, {"baseline", s.baseline.value_of(v)}});
    }
  }
  return {{"groups", std::move(groups)}, {"free_variables", std::move(free)}};
}

json values_json(const std::map<std::string, double>& values) {
  json out = json::object();
  for (const auto& [k, v] : values) out[k] = v;
  return out;
}

}  // namespace

Service::Service() : id_state_(std::random_device{}()) {}

std::string Service::create_session() {
  std::unique_lock lock(sessions_mutex_);
  std::mt19937_64 rng(id_state_);
  std::string id;
  do {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    id = buf;
  } while (sessions_.contains(id));
  id_state_ = rng();
  sessions_.emplace(id, std::make_shared<Slot>());
  return id;
}

bool Service::has_session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.contains(id);
}

std::shared_ptr<Service::Slot> Service::slot(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "session_not_found", "unknown session '" + id + "'");
  return it->second;
}

Session Service::read(const std::string& id) const {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  return s->state;
}

json Service::put_provenance(const std::string& id, ProvenanceBundle bundle) {
  auto s = slot(id);
  return translate_errors([&] {
    std::lock_guard lock(s->mutex);
    auto& st = s->state;
    st.bundle = std::make_shared<const ProvenanceBundle>(std::move(bundle));
    st.result.reset();
    s->bound.reset();
    st.baseline_values = baseline_of(st);
    return json{{"size", st.bundle->size()},
                {"polynomials", st.bundle->polynomials().size()},
                {"variables", st.bundle->variables().size()},
                {"baseline", values_json(*st.baseline_values)}};
  });
}

json Service::put_tree(const std::string& id, AbstractionTree tree) {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  auto& st = s->state;
  st.tree = std::make_shared<const AbstractionTree>(std::move(tree));
  st.result.reset();
  s->bound.reset();
  return {{"nodes", st.tree->node_count()},
          {"leaves", st.tree->leaves().size()},
          {"cuts", count_cuts(*st.tree)}};
}

json Service::put_baseline(const std::string& id, Valuation baseline) {
  auto s = slot(id);
  return translate_errors([&] {
    std::lock_guard lock(s->mutex);
    auto& st = s->state;
    st.baseline = std::move(baseline);
    st.baseline_values = baseline_of(st);
    json out = {{"baseline", valuation_to_json(st.baseline)}};
    if (st.baseline_values) out["values"] = values_json(*st.baseline_values);
    return out;
  });
}

json Service::compress(const std::string& id, std::size_t bound) {
  auto s = slot(id);
  return translate_errors([&] {
    std::lock_guard lock(s->mutex);
    auto& st = s->state;
    if (!st.bundle) throw missing("provenance");
    if (!st.tree) throw missing("abstraction tree");
    st.result = std::make_shared<const AbstractionResult>(optimize(*st.bundle, *st.tree, bound));
    s->bound = bound;
    json out = result_to_json(*st.result);
    out.update(assignment_screen(st));
    return out;
  });
}

json Service::metavars(const std::string& id) const {
  const Session st = read(id);
  if (!st.result) throw ApiError(409, "not_compressed", "run compress first");
  return translate_errors([&] {
    json out = assignment_screen(st);
    out["cut"] = st.result->cut.names();
    out["feasible"] = st.result->feasible;
    return out;
  });
}

json Service::diagnostics(const std::string& id) const {
  const Session st = read(id);
  if (!st.result) throw ApiError(409, "not_compressed", "run compress first");
  return provabs::diagnostics(*st.result);
}

json Service::baseline_results(const std::string& id) const {
  const Session st = read(id);
  if (!st.bundle) throw missing("provenance");
  return {{"values", values_json(*st.baseline_values)},
          {"size", st.bundle->size()},
          {"baseline", valuation_to_json(st.baseline)}};
}

json Service::evaluate(const std::string& id, const json& request) {
  const Session st = read(id);
  return translate_errors([&] {
    if (!request.is_object()) throw ValidationError("request: expected an object");
    Target target = Target::both;
    if (auto t = request.find("target"); t != request.end()) {
      if (!t->is_string()) throw ValidationError("target: expected a string");
      target = parse_target(t->get<std::string>());
    }
    std::map<std::string, double> assignments;
    if (auto a = request.find("assignments"); a != request.end() && !a->is_null()) {
      assignments = valuation_from_json(json{{"assignments", *a}}).assignments();
    }
    if (!st.bundle) throw missing("provenance");

    const bool meta = st.result && st.result->feasible;
    if (target != Target::full && !meta) {
      throw ApiError(409, "not_compressed", "no feasible compression; run compress with a feasible bound");
    }

    std::set<std::string> known;
    const std::set<std::string> occurring = st.bundle->variables();
    AbstractionMapping mapping;
    Valuation scenario(st.baseline.default_value());
    if (meta) {
      mapping = st.result->mapping;
      for (const auto& g : mapping.groups()) known.insert(g.meta);
      for (const auto& v : occurring) {
        if (!mapping.meta_of(v)) known.insert(v);
      }
      scenario = default_meta_valuation(*st.bundle, mapping, st.baseline);
    } else {
      known = occurring;
      if (st.tree) {
        for (auto leaf : st.tree->leaves()) known.insert(st.tree->name(leaf));
      }
      scenario = st.baseline;
    }
    std::vector<std::string> unknown;
    for (const auto& [name, value] : assignments) {
      if (!known.contains(name)) unknown.push_back(name);
      scenario.assign(name, value);
    }
    if (!unknown.empty()) {
      std::string msg = "unknown variable";
      msg += unknown.size() > 1 ? "s" : "";
      for (const auto& u : unknown) msg += " '" + u + "'";
      throw ApiError(422, "unknown_variables", msg, unknown);
    }

    const ProvenanceBundle& compressed = meta ? st.result->compressed : *st.bundle;
    json out = comparison_to_json(
        compare_scenario(*st.bundle, compressed, mapping, scenario, *st.baseline_values, target));
    out["assignments"] = valuation_to_json(scenario);
    return out;
  });
}

json Service::snapshot() const {
  std::vector<std::pair<std::string, std::shared_ptr<Slot>>> slots;
  {
    std::shared_lock lock(sessions_mutex_);
    slots.assign(sessions_.begin(), sessions_.end());
  }
  std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  json sessions = json::array();
  for (const auto& [id, s] : slots) {
    std::lock_guard lock(s->mutex);
    const auto& st = s->state;
    sessions.push_back({
        {"id", id},
        {"provenance", st.bundle ? bundle_to_json(*st.bundle) : json(nullptr)},
        {"tree", st.tree ? tree_to_json(*st.tree) : json(nullptr)},
        {"baseline", valuation_to_json(st.baseline)},
        {"bound", s->bound ? json(*s->bound) : json(nullptr)},
    });
  }
  return {{"sessions", std::move(sessions)}};
}

void Service::restore(const json& snapshot) {
  std::unordered_map<std::string, std::shared_ptr<Slot>> restored;
  translate_errors([&] {
    if (!snapshot.is_object() || !snapshot.contains("sessions") || !snapshot["sessions"].is_array()) {
      throw ValidationError("snapshot: expected {\"sessions\":[...]}");
    }
    for (const auto& entry : snapshot["sessions"]) {
      if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string()) {
        throw ValidationError("snapshot: session without id");
      }
      auto s = std::make_shared<Slot>();
      auto& st = s->state;
      if (entry.contains("provenance") && !entry["provenance"].is_null()) {
        st.bundle = std::make_shared<const ProvenanceBundle>(bundle_from_json(entry["provenance"]));
      }
      if (entry.contains("tree") && !entry["tree"].is_null()) {
        st.tree = std::make_shared<const AbstractionTree>(tree_from_json(entry["tree"]));
      }
      if (entry.contains("baseline")) st.baseline = valuation_from_json(entry["baseline"]);
      st.baseline_values = baseline_of(st);
      if (entry.contains("bound") && entry["bound"].is_number_unsigned() && st.bundle && st.tree) {
        s->bound = entry["bound"].get<std::size_t>();
        st.result = std::make_shared<const AbstractionResult>(optimize(*st.bundle, *st.tree, *s->bound));
      }
      restored.emplace(entry["id"].get<std::string>(), std::move(s));
    }
    return 0;
  });
  std::unique_lock lock(sessions_mutex_);
  sessions_ = std::move(restored);
}

void Service::save(const std::filesystem::path& path) const {
  std::lock_guard lock(save_mutex_);
  write_file(path, snapshot().dump(2) + "\n");
}

void Service::load(const std::filesystem::path& path) { restore(parse_json(read_file(path))); }

}  // namespace provabs
