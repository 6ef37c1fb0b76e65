// SPDX-License-Identifier: Apache-2.0
#include "provabs/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "provabs/error.hpp"

namespace provabs {

using nlohmann::json;

Format parse_format(std::string_view name) {
  if (name == "json") return Format::json;
  if (name == "text") return Format::text;
  throw ValidationError("unknown format '" + std::string(name) + "' (expected json or text)");
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

namespace {

// Recursive-descent reader for the text format. Tracks line/column for
// error messages.
class TextReader {
 public:
  explicit TextReader(std::string_view input) : in_(input) {}

  std::vector<Polynomial> read_blocks() {
    std::vector<Polynomial> polys;
    std::optional<std::string> key;
    for (;;) {
      skip_space();
      if (eof()) break;
      if (peek() == '#') {
        auto header = read_header();
        if (header) {
          if (key) polys.emplace_back(std::move(*key), std::vector<Monomial>{});
          key = std::move(header);
        }
        continue;
      }
      if (!key) fail("expected '# key: <key>' before polynomial terms");
      polys.emplace_back(std::move(*key), read_expression());
      key.reset();
    }
    if (key) polys.emplace_back(std::move(*key), std::vector<Monomial>{});
    return polys;
  }

  std::vector<Monomial> read_whole_expression() {
    auto terms = read_expression();
    skip_space();
    if (!eof()) fail(std::string("unexpected character '") + peek() + "'");
    return terms;
  }

 private:
  bool eof() const noexcept { return pos_ >= in_.size(); }
  char peek() const noexcept { return in_[pos_]; }

  void advance() noexcept {
    if (in_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() noexcept {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, col_); }

  // A `#` line is either `# key: <key>` or a comment. Returns the key for headers.
  std::optional<std::string> read_header() {
    std::size_t start = pos_;
    while (!eof() && peek() != '\n') advance();
    std::string_view line = in_.substr(start + 1, pos_ - start - 1);
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    line = trim(line);
    if (line.substr(0, 3) != "key") return std::nullopt;
    line = trim(line.substr(3));
    if (line.empty() || line.front() != ':') return std::nullopt;
    line = trim(line.substr(1));
    if (line.empty()) throw ParseError("empty polynomial key", line_, 1);
    return std::string(line);
  }

  std::vector<Monomial> read_expression() {
    std::vector<Monomial> terms;
    skip_space();
    double sign = 1.0;
    if (!eof() && (peek() == '+' || peek() == '-')) {
      sign = peek() == '-' ? -1.0 : 1.0;
      advance();
    }
    terms.push_back(read_term(sign));
    for (;;) {
      skip_space();
      if (eof() || peek() == '#') break;
      if (peek() != '+' && peek() != '-') fail(std::string("expected '+' or '-', found '") + peek() + "'");
      sign = peek() == '-' ? -1.0 : 1.0;
      advance();
      terms.push_back(read_term(sign));
    }
    return terms;
  }

  Monomial read_term(double sign) {
    double coefficient = sign;
    std::vector<Factor> factors;
    const std::size_t term_line = line_, term_col = col_;
    for (;;) {
      skip_space();
      if (eof()) fail("expected a number or variable");
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coefficient *= read_number();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        factors.push_back(read_factor());
      } else {
        fail(std::string("expected a number or variable, found '") + c + "'");
      }
      skip_space();
      if (eof() || peek() != '*') break;
      advance();
    }
    if (!std::isfinite(coefficient)) throw ParseError("non-finite coefficient", term_line, term_col);
    return Monomial(coefficient, std::move(factors));
  }

  double read_number() {
    double value = 0.0;
    const char* first = in_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, in_.data() + in_.size(), value);
    if (ec == std::errc::result_out_of_range) fail("non-finite coefficient");
    if (ec != std::errc{}) fail("malformed number");
    for (const char* p = first; p != ptr; ++p) advance();
    return value;
  }

  Factor read_factor() {
    std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) advance();
    Factor f{std::string(in_.substr(start, pos_ - start)), 1};
    skip_space();
    if (!eof() && peek() == '^') {
      advance();
      skip_space();
      const std::size_t l = line_, c = col_;
      bool negative = false;
      if (!eof() && peek() == '-') {
        negative = true;
        advance();
      }
      std::size_t digits = pos_;
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (digits == pos_) fail("expected an integer exponent");
      long long e = 0;
      auto [ptr, ec] = std::from_chars(in_.data() + digits, in_.data() + pos_, e);
      if (ec != std::errc{} || e > 1'000'000) throw ParseError("exponent out of range", l, c);
      if (negative || e < 1) throw ParseError("exponent must be positive", l, c);
      f.exponent = static_cast<int>(e);
    }
    return f;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::string serialize_text(const ProvenanceBundle& bundle) {
  std::string out;
  for (const auto& poly : bundle.polynomials()) {
    out += "# key: " + poly.key() + "\n";
    if (poly.monomials().empty()) {
      out += "0\n";
      continue;
    }
    bool first = true;
    for (const auto& m : poly.monomials()) {
      const double c = m.coefficient();
      if (first) {
        out += format_number(c);
      } else {
        out += c < 0 ? " - " : " + ";
        out += format_number(std::abs(c));
      }
      first = false;
      for (const auto& f : m.factors()) {
        out += '*';
        out += f.variable;
        if (f.exponent != 1) out += "^" + std::to_string(f.exponent);
      }
    }
    out += '\n';
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_col_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const json& require(const json& obj, const char* field, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) schema_error(path, std::string("missing field '") + field + "'");
  return *it;
}

}  // namespace

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, col);
  }
}

json bundle_to_json(const ProvenanceBundle& bundle) {
  json polys = json::array();
  for (const auto& poly : bundle.polynomials()) {
    json monomials = json::array();
    for (const auto& m : poly.monomials()) {
      json vars = json::array();
      for (const auto& f : m.factors()) vars.push_back(json::array({f.variable, f.exponent}));
      monomials.push_back({{"c", m.coefficient()}, {"v", std::move(vars)}});
    }
    polys.push_back({{"key", poly.key()}, {"monomials", std::move(monomials)}});
  }
  return {{"polynomials", std::move(polys)}};
}

ProvenanceBundle bundle_from_json(const json& doc) {
  const json& polys = require(doc, "polynomials", "$");
  if (!polys.is_array()) schema_error("$.polynomials", "expected an array");
  std::vector<Polynomial> out;
  out.reserve(polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const std::string ppath = "$.polynomials[" + std::to_string(i) + "]";
    const json& key = require(polys[i], "key", ppath);
    if (!key.is_string()) schema_error(ppath + ".key", "expected a string");
    const json& monos = require(polys[i], "monomials", ppath);
    if (!monos.is_array()) schema_error(ppath + ".monomials", "expected an array");
    std::vector<Monomial> terms;
    terms.reserve(monos.size());
    for (std::size_t j = 0; j < monos.size(); ++j) {
      const std::string mpath = ppath + ".monomials[" + std::to_string(j) + "]";
      const json& c = require(monos[j], "c", mpath);
      if (!c.is_number()) schema_error(mpath + ".c", "expected a number");
      std::vector<Factor> factors;
      if (auto v = monos[j].find("v"); v != monos[j].end()) {
        if (!v->is_array()) schema_error(mpath + ".v", "expected an array");
        for (std::size_t k = 0; k < v->size(); ++k) {
          const json& pair = (*v)[k];
          const std::string fpath = mpath + ".v[" + std::to_string(k) + "]";
          if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number_integer()) {
            schema_error(fpath, "expected [name, exponent]");
          }
          const auto e = pair[1].get<long long>();
          if (e < 1) schema_error(fpath, "exponent must be positive");
          if (e > 1'000'000) schema_error(fpath, "exponent out of range");
          factors.push_back({pair[0].get<std::string>(), static_cast<int>(e)});
        }
      }
      try {
        terms.emplace_back(c.get<double>(), std::move(factors));
      } catch (const ValidationError& e) {
        schema_error(mpath, e.what());
      }
    }
    out.emplace_back(key.get<std::string>(), std::move(terms));
  }
  return ProvenanceBundle(std::move(out));
}

ProvenanceBundle parse_bundle(std::string_view input, Format format) {
  if (format == Format::json) return bundle_from_json(parse_json(input));
  return ProvenanceBundle(TextReader(input).read_blocks());
}

std::string serialize_bundle(const ProvenanceBundle& bundle, Format format) {
  if (format == Format::json) return bundle_to_json(bundle).dump() + "\n";
  return serialize_text(bundle);
}

Polynomial parse_polynomial(std::string_view expression, std::string key) {
  return Polynomial(std::move(key), TextReader(expression).read_whole_expression());
}

json valuation_to_json(const Valuation& valuation) {
  json assignments = json::object();
  for (const auto& [name, value] : valuation.assignments()) assignments[name] = value;
  return {{"assignments", std::move(assignments)}, {"default", valuation.default_value()}};
}

Valuation valuation_from_json(const json& doc) {
  if (!doc.is_object()) schema_error("$", "expected an object");
  double fallback = 1.0;
  if (auto d = doc.find("default"); d != doc.end()) {
    if (!d->is_number() || !std::isfinite(d->get<double>())) schema_error("$.default", "expected a finite number");
    fallback = d->get<double>();
  }
  Valuation val(fallback);
  if (auto a = doc.find("assignments"); a != doc.end()) {
    if (!a->is_object()) schema_error("$.assignments", "expected an object");
    for (const auto& [name, value] : a->items()) {
      if (!is_valid_variable_name(name)) schema_error("$.assignments", "invalid variable name '" + name + "'");
      if (!value.is_number() || !std::isfinite(value.get<double>())) {
        schema_error("$.assignments." + name, "expected a finite number");
      }
      val.assign(name, value.get<double>());
    }
  }
  return val;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace provabs
