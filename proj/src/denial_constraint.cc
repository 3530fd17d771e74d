// Copyright 2026 The Kamino Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kamino/denial_constraint.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "kamino/status.h"

namespace kamino {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

absl::Status Syntax(std::string_view text, std::string_view what) {
  return MakeError(
      ErrorKind::kSyntaxError,
      absl::StrCat(std::string(what), " in '", std::string(text), "'"));
}

bool ParseDouble(std::string_view s, double* out) {
  return absl::SimpleAtod(std::string(s), out) && std::isfinite(*out);
}

// Operator spellings, longest first so "<=" wins over "<".
struct OpSpelling {
  std::string_view text;
  CompareOp op;
};
constexpr OpSpelling kOps[] = {
    {"==", CompareOp::kEq}, {"!=", CompareOp::kNe}, {"<>", CompareOp::kNe},
    {">=", CompareOp::kGe}, {"<=", CompareOp::kLe}, {"≠", CompareOp::kNe},
    {"≥", CompareOp::kGe},  {"≤", CompareOp::kLe},  {"=", CompareOp::kEq},
    {">", CompareOp::kGt},  {"<", CompareOp::kLt},
};

bool IsOpStart(char c) {
  return c == '=' || c == '!' || c == '<' || c == '>' ||
         static_cast<unsigned char>(c) == 0xE2;
}

// Splits the conjunction body on '&', '&&' or the logical-and sign, ignoring
// separators inside quotes.
std::vector<std::string_view> SplitConjuncts(std::string_view body) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  char quote = 0;
  for (size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '&') {
      parts.push_back(body.substr(start, i - start));
      if (i + 1 < body.size() && body[i + 1] == '&') ++i;
      start = i + 1;
    } else if (body.substr(i, 3) == "∧") {
      parts.push_back(body.substr(start, i - start));
      i += 2;
      start = i + 1;
    }
  }
  parts.push_back(body.substr(start));
  return parts;
}

struct CellRef {
  int slot;
  size_t attr;
};

// Parses "t1.name" / "t2.name"; returns false if `s` is not of that shape.
absl::StatusOr<bool> ParseCellRef(std::string_view s, const Schema& schema,
                                  CellRef* ref) {
  if (s.size() < 4 || (s[0] != 't' && s[0] != 'T') ||
      (s[1] != '1' && s[1] != '2') || s[2] != '.') {
    return false;
  }
  const std::string_view name = s.substr(3);
  auto idx = schema.IndexOf(name);
  if (!idx) {
    return MakeError(ErrorKind::kUnknownAttribute,
                     absl::StrCat("no attribute '", std::string(name), "'"));
  }
  ref->slot = s[1] - '1';
  ref->attr = *idx;
  return true;
}

absl::StatusOr<Predicate> ParsePredicate(std::string_view text,
                                         const Schema& schema) {
  text = Trim(text);
  size_t op_pos = 0;
  while (op_pos < text.size() && !IsOpStart(text[op_pos])) ++op_pos;
  if (op_pos == text.size()) return Syntax(text, "missing operator");
  const std::string_view lhs_text = Trim(text.substr(0, op_pos));
  std::string_view rest = text.substr(op_pos);
  const OpSpelling* spelling = nullptr;
  for (const OpSpelling& o : kOps) {
    if (rest.substr(0, o.text.size()) == o.text) {
      spelling = &o;
      break;
    }
  }
  if (spelling == nullptr) return Syntax(text, "unknown operator");
  const std::string_view rhs_text = Trim(rest.substr(spelling->text.size()));
  if (rhs_text.empty()) return Syntax(text, "missing right operand");

  Predicate pred;
  pred.op = spelling->op;
  CellRef lhs;
  KAMINO_ASSIGN_OR_RETURN(bool lhs_ok, ParseCellRef(lhs_text, schema, &lhs));
  if (!lhs_ok) return Syntax(text, "left operand must be t1.attr or t2.attr");
  pred.lhs_slot = lhs.slot;
  pred.lhs_attr = lhs.attr;
  const AttributeSpec& lspec = schema.attribute(lhs.attr);
  const bool ordering = pred.op != CompareOp::kEq && pred.op != CompareOp::kNe;
  if (ordering && !lspec.has_order()) {
    return MakeError(ErrorKind::kTypeMismatch,
                     absl::StrCat("'", lspec.name,
                                  "' is unordered categorical; only == and != "
                                  "apply"));
  }

  CellRef rhs;
  KAMINO_ASSIGN_OR_RETURN(bool rhs_is_cell,
                          ParseCellRef(rhs_text, schema, &rhs));
  if (rhs_is_cell) {
    const AttributeSpec& rspec = schema.attribute(rhs.attr);
    if (lspec.kind != rspec.kind) {
      return MakeError(ErrorKind::kTypeMismatch,
                       absl::StrCat("'", lspec.name, "' and '", rspec.name,
                                    "' differ in kind"));
    }
    if (lspec.is_categorical() && rhs.attr != lhs.attr &&
        lspec.categories != rspec.categories) {
      return MakeError(ErrorKind::kTypeMismatch,
                       absl::StrCat("'", lspec.name, "' and '", rspec.name,
                                    "' have different domains"));
    }
    if (ordering && !rspec.has_order()) {
      return MakeError(ErrorKind::kTypeMismatch,
                       absl::StrCat("'", rspec.name, "' is unordered"));
    }
    pred.rhs_slot = rhs.slot;
    pred.rhs_attr = rhs.attr;
    return pred;
  }

  pred.rhs_constant = true;
  std::string_view literal = rhs_text;
  const bool quoted = literal.size() >= 2 &&
                      (literal.front() == '"' || literal.front() == '\'') &&
                      literal.back() == literal.front();
  if (quoted) literal = literal.substr(1, literal.size() - 2);
  if (lspec.is_numerical()) {
    if (quoted || !ParseDouble(literal, &pred.constant)) {
      return MakeError(
          ErrorKind::kTypeMismatch,
          absl::StrCat("'", lspec.name, "' is numerical but constant is '",
                       std::string(rhs_text), "'"));
    }
  } else {
    auto idx = lspec.CategoryIndex(literal);
    if (!idx) {
      return MakeError(
          ErrorKind::kDomainViolation,
          absl::StrCat("'", std::string(literal), "' is not in the domain of '",
                       lspec.name, "'"));
    }
    pred.constant = static_cast<double>(*idx);
  }
  return pred;
}

std::string FormatConstant(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  return buf;
}

}  // namespace

std::string_view CompareOpSymbol(CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
      return "==";
    case CompareOp::kNe:
      return "!=";
    case CompareOp::kLt:
      return "<";
    case CompareOp::kLe:
      return "<=";
    case CompareOp::kGt:
      return ">";
    case CompareOp::kGe:
      return ">=";
  }
  return "?";
}

std::vector<size_t> DenialConstraint::Attributes() const {
  std::vector<size_t> attrs;
  for (const Predicate& p : predicates) {
    attrs.push_back(p.lhs_attr);
    if (!p.rhs_constant) attrs.push_back(p.rhs_attr);
  }
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  return attrs;
}

absl::StatusOr<DenialConstraint> ParseDc(std::string_view text,
                                         const Schema& schema, std::string id) {
  const std::string_view original = Trim(text);
  std::string_view s = original;
  DenialConstraint dc;

  const size_t bang = s.find('!');
  if (bang == std::string_view::npos) return Syntax(original, "missing '!'");
  std::string_view head = s.substr(0, bang);
  if (const size_t colon = head.find(':'); colon != std::string_view::npos) {
    id = std::string(Trim(head.substr(0, colon)));
    if (id.empty()) return Syntax(original, "empty constraint id");
    head = head.substr(colon + 1);
  }
  head = Trim(head);
  if (head.empty() || head == "hard") {
    dc.hard = true;
  } else if (head.substr(0, 4) == "soft") {
    dc.hard = false;
    dc.weight = std::numeric_limits<double>::quiet_NaN();
    std::string_view w = Trim(head.substr(4));
    if (!w.empty()) {
      if (w.front() != '(' || w.back() != ')') {
        return Syntax(original, "soft weight must be written soft(w)");
      }
      double weight;
      if (!ParseDouble(Trim(w.substr(1, w.size() - 2)), &weight) ||
          weight < 0) {
        return Syntax(original, "soft weight must be a non-negative number");
      }
      dc.weight = weight;
    }
  } else {
    return Syntax(original, "expected 'hard' or 'soft'");
  }

  std::string_view body = Trim(s.substr(bang + 1));
  if (body.size() < 2 || body.front() != '(' || body.back() != ')') {
    return Syntax(original, "predicates must be enclosed in '!( ... )'");
  }
  body = body.substr(1, body.size() - 2);
  if (Trim(body).empty()) return Syntax(original, "empty conjunction");
  for (std::string_view part : SplitConjuncts(body)) {
    if (Trim(part).empty()) return Syntax(original, "empty predicate");
    KAMINO_ASSIGN_OR_RETURN(Predicate p, ParsePredicate(part, schema));
    dc.predicates.push_back(p);
  }

  bool uses_t1 = false, uses_t2 = false;
  for (const Predicate& p : dc.predicates) {
    (p.lhs_slot == 0 ? uses_t1 : uses_t2) = true;
    if (!p.rhs_constant) (p.rhs_slot == 0 ? uses_t1 : uses_t2) = true;
  }
  if (uses_t2 && !uses_t1) {
    // A constraint over t2 alone is a unary constraint.
    for (Predicate& p : dc.predicates) {
      p.lhs_slot = 0;
      p.rhs_slot = 0;
    }
    uses_t2 = false;
  }
  dc.arity = uses_t2 ? 2 : 1;
  dc.id = std::move(id);
  dc.text = std::string(original);
  return dc;
}

absl::StatusOr<std::vector<DenialConstraint>> ParseDcText(
    std::string_view text, const Schema& schema) {
  std::vector<DenialConstraint> dcs;
  size_t line_no = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text =
        nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    auto dc = ParseDc(line, schema, absl::StrCat("dc", dcs.size() + 1));
    if (!dc.ok()) {
      return absl::Status(dc.status().code(),
                          absl::StrCat(std::string(dc.status().message()),
                                       " (line ", line_no, ")"));
    }
    for (const DenialConstraint& other : dcs) {
      if (other.id == dc->id) {
        return MakeError(ErrorKind::kSyntaxError,
                         absl::StrCat("duplicate constraint id '", dc->id,
                                      "' (line ", line_no, ")"));
      }
    }
    dcs.push_back(*std::move(dc));
  }
  return dcs;
}

absl::StatusOr<std::vector<DenialConstraint>> ParseDcFile(
    const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in)
    return MakeError(ErrorKind::kIoError, absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseDcText(buffer.str(), schema);
}

std::string FormatDc(const DenialConstraint& dc, const Schema& schema) {
  std::string out = dc.id.empty() ? "" : dc.id + ": ";
  if (dc.hard) {
    out += "hard";
  } else if (dc.has_weight()) {
    out += "soft(" + FormatConstant(dc.weight) + ")";
  } else {
    out += "soft";
  }
  out += " !(";
  for (size_t i = 0; i < dc.predicates.size(); ++i) {
    const Predicate& p = dc.predicates[i];
    if (i) out += " & ";
    const AttributeSpec& lspec = schema.attribute(p.lhs_attr);
    absl::StrAppend(&out, "t", p.lhs_slot + 1, ".", lspec.name, " ",
                    std::string(CompareOpSymbol(p.op)), " ");
    if (!p.rhs_constant) {
      absl::StrAppend(&out, "t", p.rhs_slot + 1, ".",
                      schema.attribute(p.rhs_attr).name);
    } else if (lspec.is_categorical()) {
      absl::StrAppend(&out, "\"",
                      lspec.categories[static_cast<size_t>(p.constant)], "\"");
    } else {
      out += FormatConstant(p.constant);
    }
  }
  out += ")";
  return out;
}

}  // namespace kamino
