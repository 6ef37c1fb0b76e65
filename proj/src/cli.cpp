// SPDX-License-Identifier: Apache-2.0
#include "provabs/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdio>
#include <ostream>

#include "provabs/abstraction.hpp"
#include "provabs/error.hpp"
#include "provabs/generator.hpp"
#include "provabs/io.hpp"
#include "provabs/optimizer.hpp"
#include "provabs/service.hpp"
#include "provabs/whatif.hpp"

namespace provabs {

using nlohmann::json;

namespace {

// Prefixes errors raised while loading `path` with the file name.
template <typename F>
auto load(const std::string& path, F&& parse) -> decltype(parse(std::string())) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what(), e.details());
  }
}

ProvenanceBundle load_bundle(const std::string& path, Format format) {
  return load(path, [&](const std::string& text) { return parse_bundle(text, format); });
}

AbstractionTree load_tree(const std::string& path) {
  return load(path, [](const std::string& text) { return parse_tree(text); });
}

Valuation load_valuation(const std::string& path) {
  return load(path, [](const std::string& text) { return valuation_from_json(parse_json(text)); });
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::size_t checked_bound(long long bound) {
  if (bound < 1) throw ValidationError("bound must be ≥ 1");
  return static_cast<std::size_t>(bound);
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

struct Options {
  std::string provenance, tree, valuation, baseline, result, out, tree_out, valuation_out, diagnostics_out;
  std::string format = "json";
  std::string target = "both";
  std::string host = "127.0.0.1";
  std::string static_dir, snapshot;
  long long bound = 0;
  int port = 8080;
  bool json_out = false;
  GenConfig gen;
};

int cmd_gen(const Options& o, std::ostream& out) {
  const Format format = parse_format(o.format);
  const GeneratedData data = generate(o.gen);
  write_file(o.out, serialize_bundle(data.bundle, format));
  if (!o.tree_out.empty()) write_file(o.tree_out, tree_to_json(data.tree).dump(2) + "\n");
  if (!o.valuation_out.empty()) write_file(o.valuation_out, valuation_to_json(data.baseline).dump(2) + "\n");
  out << "generated " << data.bundle.size() << " monomials in " << data.bundle.polynomials().size()
      << " polynomials\n";
  return kExitOk;
}

int cmd_compress(const Options& o, std::ostream& out) {
  const std::size_t bound = checked_bound(o.bound);
  const ProvenanceBundle bundle = load_bundle(o.provenance, parse_format(o.format));
  const AbstractionTree tree = load_tree(o.tree);
  const AbstractionResult result = optimize(bundle, tree, bound);
  const json doc = result_to_json(result);
  if (!o.out.empty()) write_file(o.out, doc.dump(2) + "\n");
  if (!o.diagnostics_out.empty()) write_file(o.diagnostics_out, diagnostics(result).dump(2) + "\n");
  if (o.json_out) {
    out << doc.dump(2) << "\n";
  } else {
    out << "cut:            " << join(result.cut.names()) << "\n"
        << "size:           " << result.size << " (original " << result.original_size << ", bound " << bound
        << ")\n"
        << "expressiveness: " << result.expressiveness << "\n"
        << "feasible:       " << (result.feasible ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const ProvenanceBundle bundle = load_bundle(o.provenance, parse_format(o.format));
  const Valuation val = o.valuation.empty() ? Valuation(1.0) : load_valuation(o.valuation);
  const BundleEvaluation eval = evaluate_bundle(bundle, val);
  json values = json::object();
  for (const auto& [k, v] : eval.values) values[k] = v;
  const json doc = {{"values", values}, {"size", bundle.size()}};
  if (!o.out.empty()) write_file(o.out, doc.dump(2) + "\n");
  if (o.json_out) {
    out << doc.dump(2) << "\n";
  } else {
    for (const auto& [k, v] : eval.values) out << k << "=" << number(v) << "\n";
  }
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const ProvenanceBundle bundle = load_bundle(o.provenance, parse_format(o.format));
  const Valuation baseline = o.baseline.empty() ? Valuation(1.0) : load_valuation(o.baseline);

  AbstractionMapping mapping;
  ProvenanceBundle compressed;
  if (!o.result.empty()) {
    const json doc = load(o.result, [](const std::string& text) { return parse_json(text); });
    if (!doc.is_object() || !doc.contains("cut") || !doc.contains("mapping") || !doc["cut"].is_array()) {
      throw ValidationError(o.result + ": expected a compression result with 'cut' and 'mapping'");
    }
    mapping = mapping_from_json(doc["mapping"], doc["cut"].get<std::vector<std::string>>());
    compressed = apply_abstraction(bundle, mapping);
  } else {
    if (o.tree.empty() || o.bound == 0) throw ValidationError("compare needs -c, or -t with -b");
    const AbstractionResult result = optimize(bundle, load_tree(o.tree), checked_bound(o.bound));
    if (!result.feasible) {
      throw ValidationError("bound " + std::to_string(o.bound) + " is infeasible; minimum size is " +
                            std::to_string(result.size));
    }
    mapping = result.mapping;
    compressed = result.compressed;
  }

  Valuation scenario = default_meta_valuation(bundle, mapping, baseline);
  if (!o.valuation.empty()) {
    for (const auto& [name, value] : load_valuation(o.valuation).assignments()) scenario.assign(name, value);
  }
  const auto base_values = evaluate_bundle(bundle, baseline).values;
  const Comparison cmp = compare_scenario(bundle, compressed, mapping, scenario, base_values, parse_target(o.target));
  const json doc = comparison_to_json(cmp);
  if (!o.out.empty()) write_file(o.out, doc.dump(2) + "\n");
  if (o.json_out) {
    out << doc.dump(2) << "\n";
  } else {
    out << format_comparison(cmp);
  }
  return kExitOk;
}

httplib::Server* g_server = nullptr;

extern "C" void stop_server(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  Service service;
  ServerOptions options;
  if (!o.static_dir.empty()) options.static_dir = o.static_dir;
  if (!o.snapshot.empty()) {
    options.snapshot = o.snapshot;
    if (std::filesystem::exists(o.snapshot)) service.load(o.snapshot);
  }
  httplib::Server server;
  mount_routes(server, service, options);
  if (!server.bind_to_port(o.host, o.port)) {
    err << "error: cannot listen on " << o.host << ":" << o.port << "\n";
    return kExitIo;
  }
  out << "listening on http://" << o.host << ":" << o.port << "\n" << std::flush;
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  server.listen_after_bind();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Provenance abstraction workbench: compress provenance polynomials and run what-if valuations"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic telephony provenance bundle");
  gen->add_option("--customers", o.gen.customers, "Number of customers")->capture_default_str();
  gen->add_option("--months", o.gen.months, "Number of months (1-12)")->capture_default_str();
  gen->add_option("--zips", o.gen.zips, "Number of zip codes")->capture_default_str();
  gen->add_option("--seed", o.gen.seed, "RNG seed")->capture_default_str();
  gen->add_option("--min-duration", o.gen.min_duration, "Minimum monthly minutes")->capture_default_str();
  gen->add_option("--max-duration", o.gen.max_duration, "Maximum monthly minutes")->capture_default_str();
  gen->add_option("-o,--out", o.out, "Bundle output file")->required();
  gen->add_option("--tree-out", o.tree_out, "Abstraction tree output file");
  gen->add_option("--valuation-out", o.valuation_out, "Baseline valuation output file");
  gen->add_option("--format", o.format, "Bundle format: json or text")->capture_default_str();

  auto* compress = app.add_subcommand("compress", "Choose an optimal abstraction under a size bound");
  compress->add_option("-p,--provenance", o.provenance, "Provenance bundle")->required();
  compress->add_option("-t,--tree", o.tree, "Abstraction tree JSON")->required();
  compress->add_option("-b,--bound", o.bound, "Bound on the compressed size")->required();
  compress->add_option("-o,--out", o.out, "Write the result JSON here");
  compress->add_option("--diagnostics-out", o.diagnostics_out, "Write optimizer diagnostics JSON here");
  compress->add_option("--format", o.format, "Bundle format: json or text")->capture_default_str();
  compress->add_flag("--json", o.json_out, "Print JSON instead of a summary");

  auto* eval = app.add_subcommand("eval", "Evaluate a bundle under a valuation");
  eval->add_option("-p,--provenance", o.provenance, "Provenance bundle")->required();
  eval->add_option("-v,--valuation", o.valuation, "Valuation JSON (default: all ones)");
  eval->add_option("-o,--out", o.out, "Write values JSON here");
  eval->add_option("--format", o.format, "Bundle format: json or text")->capture_default_str();
  eval->add_flag("--json", o.json_out, "Print JSON");

  auto* compare = app.add_subcommand("compare", "Compare full and compressed evaluation of a scenario");
  compare->add_option("-p,--provenance", o.provenance, "Provenance bundle")->required();
  compare->add_option("-c,--compression-result", o.result, "Result JSON written by compress");
  compare->add_option("-t,--tree", o.tree, "Abstraction tree (with -b, instead of -c)");
  compare->add_option("-b,--bound", o.bound, "Bound on the compressed size (with -t)");
  compare->add_option("-v,--valuation", o.valuation, "Meta-variable assignments (others use defaults)");
  compare->add_option("--baseline", o.baseline, "Baseline valuation of the original variables (default: all ones)");
  compare->add_option("--target", o.target, "full, compressed or both")->capture_default_str();
  compare->add_option("-o,--out", o.out, "Write the comparison JSON here");
  compare->add_option("--format", o.format, "Bundle format: json or text")->capture_default_str();
  compare->add_flag("--json", o.json_out, "Print JSON instead of a table");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", o.port, "Port")->capture_default_str();
  serve->add_option("--host", o.host, "Bind address")->capture_default_str();
  serve->add_option("--static", o.static_dir, "Directory served under /");
  serve->add_option("--snapshot", o.snapshot, "Session snapshot file (loaded at start, saved on change)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen) return cmd_gen(o, out);
    if (*compress) return cmd_compress(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*compare) return cmd_compare(o, out);
    if (*serve) return cmd_serve(o, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ApiError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace provabs
