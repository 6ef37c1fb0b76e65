// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "provabs/polynomial.hpp"
#include "provabs/valuation.hpp"

namespace provabs {

enum class Format { json, text };

/// "json" or "text"; throws ValidationError otherwise.
Format parse_format(std::string_view name);

/// Reads a bundle in either wire format and returns it in canonical form.
/// Throws ParseError on syntax errors and ValidationError on semantic ones.
ProvenanceBundle parse_bundle(std::string_view input, Format format);

/// Deterministic serialization; parse_bundle(serialize_bundle(b)) == b.
std::string serialize_bundle(const ProvenanceBundle& bundle, Format format);

/// Parses one `coef*var^e*var + ...` expression.
Polynomial parse_polynomial(std::string_view expression, std::string key);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

nlohmann::json bundle_to_json(const ProvenanceBundle& bundle);
ProvenanceBundle bundle_from_json(const nlohmann::json& doc);

/// `{"assignments":{"m3":0.8},"default":1.0}`; `default` may be omitted (1.0).
nlohmann::json valuation_to_json(const Valuation& valuation);
Valuation valuation_from_json(const nlohmann::json& doc);

/// Parses JSON text, converting syntax errors to ParseError.
nlohmann::json parse_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace provabs
