/*
 * Copyright 2026 The astrid-cpp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "astrid/dataset.hpp"
#include "astrid/error.hpp"
#include "astrid/rng.hpp"

namespace astrid {

// ---------------------------------------------------------------------------
// Shared helpers

/// Parses a complete token as a finite double. Accepts a leading '+'.
inline std::optional<double> parse_number(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

/// Shortest text that reads back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace detail {

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ARFF

struct ArffAttribute {
  std::string name;
  AttributeKind kind;

  friend bool operator==(const ArffAttribute&, const ArffAttribute&) = default;
};

/// A parsed ARFF file. Cells keep their raw token text; std::nullopt marks
/// the `?` missing value.
struct ArffDocument {
  std::string relation_name;
  std::vector<ArffAttribute> attributes;
  std::vector<std::vector<std::optional<std::string>>> rows;

  friend bool operator==(const ArffDocument&, const ArffDocument&) = default;
};

namespace detail {

/// Cursor over one ARFF line.
class ArffLineReader {
 public:
  ArffLineReader(std::string_view line, std::size_t line_no) : text_(line), line_no_(line_no) {}

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '%';
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c, std::string_view what) {
    if (peek() != c) fail(what);
    ++pos_;
  }

  /// Quoted or bare token; bare tokens stop at whitespace or any of `stops`.
  /// Returns the token text and whether it was quoted.
  std::pair<std::string, bool> token(std::string_view stops, std::string_view what) {
    skip_space();
    if (pos_ >= text_.size()) fail(what);
    const char q = text_[pos_];
    if (q == '\'' || q == '"') {
      ++pos_;
      std::string out;
      while (true) {
        if (pos_ >= text_.size()) fail("closing quote");
        char c = text_[pos_++];
        if (c == '\\') {
          if (pos_ >= text_.size()) fail("escaped character");
          out.push_back(text_[pos_++]);
        } else if (c == q) {
          return {out, true};
        } else {
          out.push_back(c);
        }
      }
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) &&
           stops.find(text_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    if (pos_ == start) fail(what);
    return {std::string(text_.substr(start, pos_ - start)), false};
  }

  /// Token in a comma-separated list: surrounding blanks are trimmed but
  /// interior blanks are kept for bare tokens.
  std::pair<std::string, bool> list_item(std::string_view terminators, std::string_view what) {
    skip_space();
    if (pos_ < text_.size() && (text_[pos_] == '\'' || text_[pos_] == '"')) {
      return token(terminators, what);
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' &&
           terminators.find(text_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    std::string_view raw = trim(text_.substr(start, pos_ - start));
    if (raw.empty()) fail(what);
    return {std::string(raw), false};
  }

  std::string_view rest() {
    skip_space();
    return text_.substr(pos_);
  }

  [[noreturn]] void fail(std::string_view what) const {
    throw SyntaxError(line_no_, "expected " + std::string(what));
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

inline AttributeKind parse_arff_type(ArffLineReader& in) {
  if (in.peek() == '{') {
    in.expect('{', "'{'");
    std::vector<std::string> cats;
    std::set<std::string> seen;
    while (true) {
      auto [cat, quoted] = in.list_item("}", "category name");
      if (!seen.insert(cat).second) in.fail("distinct category names (duplicate '" + cat + "')");
      cats.push_back(std::move(cat));
      const char c = in.peek();
      if (c == ',') {
        in.expect(',', "','");
      } else if (c == '}') {
        in.expect('}', "'}'");
        break;
      } else {
        in.fail("',' or '}' in nominal declaration");
      }
    }
    return AttributeKind::nominal(std::move(cats));
  }
  const auto [word, quoted] = in.token("", "attribute type");
  const std::string type = lowercase(word);
  if (type == "numeric" || type == "real" || type == "integer") return AttributeKind::numeric();
  if (type == "string" || type == "date" || type == "relational") {
    throw Error(ErrorCode::kUnsupportedAttributeType,
                "line " + std::to_string(in.line_no()) + ": attribute type '" + word + "'");
  }
  in.fail("numeric, real, integer, or {category list}, found '" + word + "'");
}

}  // namespace detail

/// Parses the dense ARFF subset: @relation, @attribute (numeric, real,
/// integer, nominal), @data, `%` comments, `?` missing values.
inline ArffDocument parse_arff(std::string_view text) {
  ArffDocument doc;
  enum class Section { kRelation, kAttributes, kData } section = Section::kRelation;
  std::size_t line_no = 0;
  std::size_t last_content_line = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    detail::ArffLineReader in(line, line_no);
    if (in.at_end()) {
      if (eol == text.size()) break;
      continue;
    }
    last_content_line = line_no;

    if (section != Section::kData) {
      if (in.peek() != '@') in.fail("'@' keyword");
      const auto [keyword_raw, quoted] = in.token("", "keyword");
      const std::string keyword = detail::lowercase(keyword_raw);
      if (keyword == "@relation") {
        if (section != Section::kRelation) in.fail("@attribute or @data");
        doc.relation_name = in.token("", "relation name").first;
        section = Section::kAttributes;
      } else if (keyword == "@attribute") {
        if (section != Section::kAttributes) in.fail("@relation before @attribute");
        auto name = in.token("{", "attribute name").first;
        for (const auto& a : doc.attributes) {
          if (a.name == name) in.fail("unique attribute name (duplicate '" + name + "')");
        }
        auto kind = detail::parse_arff_type(in);
        doc.attributes.push_back({std::move(name), std::move(kind)});
      } else if (keyword == "@data") {
        if (section != Section::kAttributes || doc.attributes.empty()) {
          in.fail("at least one @attribute before @data");
        }
        section = Section::kData;
      } else {
        in.fail("@relation, @attribute, or @data, found '" + keyword_raw + "'");
      }
      if (!in.at_end()) in.fail("end of line, found '" + std::string(in.rest()) + "'");
    } else {
      if (in.peek() == '{') in.fail("dense data row (sparse rows are not supported)");
      std::vector<std::optional<std::string>> row;
      row.reserve(doc.attributes.size());
      while (true) {
        auto [tok, quoted] = in.list_item("%", "data value");
        const std::size_t col = row.size();
        if (col >= doc.attributes.size()) {
          in.fail(std::to_string(doc.attributes.size()) + " values");
        }
        if (!quoted && tok == "?") {
          row.emplace_back(std::nullopt);
        } else {
          const auto& kind = doc.attributes[col].kind;
          if (kind.is_numeric() && !parse_number(tok)) {
            in.fail("number for attribute '" + doc.attributes[col].name + "', found '" + tok + "'");
          }
          if (kind.is_nominal() &&
              std::find(kind.categories.begin(), kind.categories.end(), tok) ==
                  kind.categories.end()) {
            in.fail("declared category for attribute '" + doc.attributes[col].name +
                    "', found '" + tok + "'");
          }
          row.emplace_back(std::move(tok));
        }
        if (in.at_end()) break;
        in.expect(',', "',' between values");
      }
      if (row.size() != doc.attributes.size()) {
        in.fail(std::to_string(doc.attributes.size()) + " values, found " +
                std::to_string(row.size()));
      }
      doc.rows.push_back(std::move(row));
    }
    if (eol == text.size()) break;
  }
  if (section != Section::kData) throw SyntaxError(last_content_line, "expected @data section");
  return doc;
}

namespace detail {

inline bool arff_needs_quotes(std::string_view s) {
  if (s.empty() || s == "?") return true;
  for (char c : s) {
    if (is_space(c) || c == ',' || c == '\'' || c == '"' || c == '%' || c == '{' || c == '}' ||
        c == '\\' || c == '@') {
      return true;
    }
  }
  return false;
}

inline std::string arff_quote(std::string_view s) {
  if (!arff_needs_quotes(s)) return std::string(s);
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace detail

inline std::string write_arff(const ArffDocument& doc) {
  std::string out = "@relation " + detail::arff_quote(doc.relation_name) + "\n\n";
  for (const auto& a : doc.attributes) {
    out += "@attribute " + detail::arff_quote(a.name) + " ";
    if (a.kind.is_numeric()) {
      out += "numeric";
    } else {
      out += "{";
      for (std::size_t i = 0; i < a.kind.categories.size(); ++i) {
        if (i) out += ",";
        out += detail::arff_quote(a.kind.categories[i]);
      }
      out += "}";
    }
    out += "\n";
  }
  out += "\n@data\n";
  for (const auto& row : doc.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ",";
      out += row[j] ? detail::arff_quote(*row[j]) : std::string("?");
    }
    out += "\n";
  }
  return out;
}

/// Turns the named nominal attribute into class labels; remaining attributes
/// become columns in declared order. Missing cells become kMissing.
inline Dataset to_dataset(const ArffDocument& doc, std::string_view class_attribute) {
  std::size_t class_col = doc.attributes.size();
  for (std::size_t j = 0; j < doc.attributes.size(); ++j) {
    if (doc.attributes[j].name == class_attribute) class_col = j;
  }
  if (class_col == doc.attributes.size()) {
    throw Error(ErrorCode::kUnknownAttribute, "no attribute named '" + std::string(class_attribute) + "'");
  }
  const auto& class_kind = doc.attributes[class_col].kind;
  if (!class_kind.is_nominal()) {
    throw Error(ErrorCode::kClassAttributeNotNominal,
                "class attribute '" + std::string(class_attribute) + "' is numeric");
  }

  Dataset d;
  d.class_names = class_kind.categories;
  std::vector<std::size_t> source_cols;
  for (std::size_t j = 0; j < doc.attributes.size(); ++j) {
    if (j == class_col) continue;
    d.attribute_names.push_back(doc.attributes[j].name);
    d.attribute_kinds.push_back(doc.attributes[j].kind);
    source_cols.push_back(j);
  }
  d.columns.resize(source_cols.size());

  auto category_index = [](const AttributeKind& kind, const std::string& tok) {
    const auto it = std::find(kind.categories.begin(), kind.categories.end(), tok);
    return static_cast<double>(it - kind.categories.begin());
  };

  for (const auto& row : doc.rows) {
    // A row without a class value cannot be labelled; it is dropped here
    // exactly as preprocess would drop any other incomplete row.
    if (!row[class_col]) continue;
    d.labels.push_back(static_cast<std::size_t>(category_index(class_kind, *row[class_col])));
    for (std::size_t k = 0; k < source_cols.size(); ++k) {
      const auto& cell = row[source_cols[k]];
      const auto& kind = doc.attributes[source_cols[k]].kind;
      if (!cell) {
        d.columns[k].push_back(kMissing);
      } else if (kind.is_nominal()) {
        d.columns[k].push_back(category_index(kind, *cell));
      } else {
        d.columns[k].push_back(*parse_number(*cell));
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// CSV

/// Class column selected by header name or 0-based position.
using ColumnRef = std::variant<std::string, std::size_t>;

namespace detail {

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
  std::vector<bool> quoted;
};

inline std::vector<CsvRecord> split_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    CsvRecord rec;
    rec.line = line;
    bool record_done = false;
    while (!record_done) {
      std::string field;
      bool quoted = false;
      if (pos < text.size() && text[pos] == '"') {
        quoted = true;
        ++pos;
        while (true) {
          if (pos >= text.size()) throw SyntaxError(rec.line, "closing '\"'");
          const char c = text[pos++];
          if (c == '"') {
            if (pos < text.size() && text[pos] == '"') {
              field.push_back('"');
              ++pos;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
      } else {
        while (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          if (text[pos] == '"') throw SyntaxError(line, "quote only at the start of a field");
          field.push_back(text[pos++]);
        }
      }
      rec.fields.push_back(std::move(field));
      rec.quoted.push_back(quoted);
      if (pos >= text.size()) {
        record_done = true;
      } else if (text[pos] == ',') {
        ++pos;
      } else if (text[pos] == '\n') {
        ++pos;
        ++line;
        record_done = true;
      } else if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
        pos += 2;
        ++line;
        record_done = true;
      } else {
        throw SyntaxError(line, "',' or end of line after field");
      }
    }
    // Blank lines carry no record.
    if (!(rec.fields.size() == 1 && rec.fields[0].empty() && !rec.quoted[0])) {
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace detail

/// Reads a CSV table with a mandatory header row. Empty cells are missing.
/// Columns without a hint are numeric iff every non-missing cell parses as a
/// number, otherwise nominal with categories in first-appearance order. A
/// nominal hint with an empty category list also infers the order.
inline Dataset parse_csv(std::string_view text, const ColumnRef& class_column,
                         const std::map<std::string, AttributeKind>& kind_hints = {}) {
  const auto records = detail::split_csv(text);
  if (records.empty()) throw SyntaxError(1, "header row");
  const auto& header = records.front();
  {
    std::set<std::string> names;
    for (const auto& h : header.fields) {
      if (!names.insert(h).second) throw SyntaxError(header.line, "unique column name (duplicate '" + h + "')");
    }
  }

  std::size_t class_col = header.fields.size();
  if (const auto* name = std::get_if<std::string>(&class_column)) {
    for (std::size_t j = 0; j < header.fields.size(); ++j) {
      if (header.fields[j] == *name) class_col = j;
    }
    if (class_col == header.fields.size()) {
      throw Error(ErrorCode::kUnknownClassColumn, "no column named '" + *name + "'");
    }
  } else {
    class_col = std::get<std::size_t>(class_column);
    if (class_col >= header.fields.size()) {
      throw Error(ErrorCode::kUnknownClassColumn,
                  "column index " + std::to_string(class_col) + " out of range");
    }
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].fields.size() != header.fields.size()) {
      throw SyntaxError(records[r].line, std::to_string(header.fields.size()) + " fields, found " +
                                             std::to_string(records[r].fields.size()));
    }
  }

  Dataset d;
  std::map<std::string, std::size_t> class_index;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& cell = records[r].fields[class_col];
    if (cell.empty()) throw SyntaxError(records[r].line, "class label");
    auto [it, inserted] = class_index.emplace(cell, d.class_names.size());
    if (inserted) d.class_names.push_back(cell);
    d.labels.push_back(it->second);
  }

  for (std::size_t j = 0; j < header.fields.size(); ++j) {
    if (j == class_col) continue;
    const std::string& name = header.fields[j];
    AttributeKind kind;
    bool infer_categories = false;
    if (const auto hint = kind_hints.find(name); hint != kind_hints.end()) {
      kind = hint->second;
      infer_categories = kind.is_nominal() && kind.categories.empty();
    } else {
      bool numeric = true;
      for (std::size_t r = 1; r < records.size() && numeric; ++r) {
        const auto& cell = records[r].fields[j];
        if (!cell.empty() && !parse_number(cell)) numeric = false;
      }
      kind = numeric ? AttributeKind::numeric() : AttributeKind::nominal({});
      infer_categories = !numeric;
    }

    std::vector<double> column;
    column.reserve(records.size() - 1);
    std::map<std::string, std::size_t> cat_index;
    for (std::size_t c = 0; c < kind.categories.size(); ++c) cat_index.emplace(kind.categories[c], c);
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& cell = records[r].fields[j];
      if (cell.empty()) {
        column.push_back(kMissing);
      } else if (kind.is_numeric()) {
        const auto v = parse_number(cell);
        if (!v) throw SyntaxError(records[r].line, "number in column '" + name + "', found '" + cell + "'");
        column.push_back(*v);
      } else {
        auto it = cat_index.find(cell);
        if (it == cat_index.end()) {
          if (!infer_categories) {
            throw SyntaxError(records[r].line,
                              "declared category in column '" + name + "', found '" + cell + "'");
          }
          it = cat_index.emplace(cell, kind.categories.size()).first;
          kind.categories.push_back(cell);
        }
        column.push_back(static_cast<double>(it->second));
      }
    }
    if (kind.is_nominal() && kind.categories.empty()) {
      // Column with no values at all; keep it representable.
      kind = AttributeKind::numeric();
    }
    d.attribute_names.push_back(name);
    d.attribute_kinds.push_back(std::move(kind));
    d.columns.push_back(std::move(column));
  }
  return d;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Writes `d` as CSV with the class as the last column. Numbers use the
/// shortest round-trip representation.
inline std::string write_csv(const Dataset& d, std::string_view class_column = "class") {
  std::string out;
  for (const auto& name : d.attribute_names) out += detail::csv_field(name) + ",";
  out += detail::csv_field(class_column) + "\n";
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      const double cell = d.columns[j][i];
      if (!is_missing(cell)) {
        out += d.attribute_kinds[j].is_nominal()
                   ? detail::csv_field(d.attribute_kinds[j].categories[static_cast<std::size_t>(cell)])
                   : format_number(cell);
      }
      out += ",";
    }
    out += detail::csv_field(d.class_names[d.labels[i]]) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

/// Parameters of the four-attribute synthetic model. Attributes 1 and 2 form
/// an XOR pattern: class c0 draws from unit-variance normals centred at
/// (+c,+c) or (-c,-c), class c1 at (+c,-c) or (-c,+c), each with probability
/// 1/2, so each attribute alone has the same distribution in both classes.
/// Attribute 3 is N(+s,1) for c0 and N(-s,1) for c1; attribute 4 is N(0,1).
struct SyntheticModel {
  double xor_center = 1.7;
  double shift = 0.7;
};

inline Dataset generate_synthetic(std::size_t n_per_class, std::uint64_t seed,
                                  const SyntheticModel& model = {}) {
  if (n_per_class == 0) throw Error(ErrorCode::kInvalidArgument, "n_per_class must be at least 1");
  auto rng = derive_stream(seed, "synthetic");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  Dataset d;
  d.attribute_names = {"a1", "a2", "a3", "a4"};
  d.attribute_kinds.assign(4, AttributeKind::numeric());
  d.class_names = {"c0", "c1"};
  d.columns.assign(4, {});
  for (auto& col : d.columns) col.reserve(2 * n_per_class);
  for (std::size_t cls = 0; cls < 2; ++cls) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const double s = coin(rng) ? model.xor_center : -model.xor_center;
      const double a1 = s + normal(rng);
      const double a2 = (cls == 0 ? s : -s) + normal(rng);
      const double a3 = (cls == 0 ? model.shift : -model.shift) + normal(rng);
      const double a4 = normal(rng);
      d.columns[0].push_back(a1);
      d.columns[1].push_back(a2);
      d.columns[2].push_back(a3);
      d.columns[3].push_back(a4);
      d.labels.push_back(cls);
    }
  }
  return d;
}

/// Two attributes, each N(+shift,1) for c0 and N(-shift,1) for c1, drawn
/// independently: both carry class information and neither interacts.
inline Dataset generate_interaction_free(std::size_t n_per_class, std::uint64_t seed,
                                         double shift = 0.5) {
  if (n_per_class == 0) throw Error(ErrorCode::kInvalidArgument, "n_per_class must be at least 1");
  auto rng = derive_stream(seed, "interaction-free");
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset d;
  d.attribute_names = {"a1", "a2"};
  d.attribute_kinds.assign(2, AttributeKind::numeric());
  d.class_names = {"c0", "c1"};
  d.columns.assign(2, {});
  for (std::size_t cls = 0; cls < 2; ++cls) {
    const double mu = cls == 0 ? shift : -shift;
    for (std::size_t i = 0; i < n_per_class; ++i) {
      d.columns[0].push_back(mu + normal(rng));
      d.columns[1].push_back(mu + normal(rng));
      d.labels.push_back(cls);
    }
  }
  return d;
}

}  // namespace astrid
