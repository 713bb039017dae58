#include "narrex/literal.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "narrex/error.hpp"

namespace narrex {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(out)) return std::nullopt;
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  for (char c : s) {
    if (!is_ident_char(c)) return false;
  }
  return true;
}

[[noreturn]] void syntax_error(std::string_view text, std::size_t pos, const std::string& what) {
  throw BundleError("syntax-error",
                    "literal '" + std::string(text) + "': " + what + " at offset " + std::to_string(pos),
                    "offset " + std::to_string(pos));
}

class LiteralScanner {
 public:
  explicit LiteralScanner(std::string_view text) : text_(text) {}

  Literal parse() {
    Literal lit;
    skip_ws();
    if (pos_ + 1 < text_.size() && (text_[pos_] == 'O' || text_[pos_] == 'P' || text_[pos_] == 'F') &&
        std::isspace(static_cast<unsigned char>(text_[pos_ + 1]))) {
      lit.modality = text_[pos_] == 'O'   ? Modality::obligation
                     : text_[pos_] == 'P' ? Modality::permission
                                          : Modality::prohibition;
      ++pos_;
      skip_ws();
    }
    if (peek() == '~') {
      lit.negated = true;
      ++pos_;
      skip_ws();
    }
    lit.atom = identifier("atom");
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      skip_ws();
      if (peek() == ')') syntax_error(text_, pos_, "empty argument list");
      while (true) {
        skip_ws();
        lit.args.push_back(term());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        syntax_error(text_, pos_, "expected ',' or ')'");
      }
    }
    skip_ws();
    if (pos_ < text_.size()) {
      std::optional<CompareOp> op = comparison_op();
      if (!op) syntax_error(text_, pos_, "unexpected character");
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::optional<Value> rhs = parse_value(text_.substr(start, pos_ - start));
      if (!rhs || rhs->kind == Value::Kind::boolean) syntax_error(text_, start, "expected number or identifier");
      lit.comparison = Comparison{*op, *rhs};
      skip_ws();
      if (pos_ < text_.size()) syntax_error(text_, pos_, "trailing characters");
    }
    return lit;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string identifier(const char* what) {
    std::size_t start = pos_;
    if (!is_ident_start(peek())) syntax_error(text_, pos_, std::string("expected ") + what);
    while (is_ident_char(peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string term() {
    std::size_t start = pos_;
    if (is_ident_start(peek())) return identifier("term");
    if (peek() == '-' || std::isdigit(static_cast<unsigned char>(peek()))) {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') ++pos_;
      std::string_view num = text_.substr(start, pos_ - start);
      if (!parse_number(num)) syntax_error(text_, start, "malformed number");
      return std::string(num);
    }
    syntax_error(text_, pos_, "expected term");
  }

  std::optional<CompareOp> comparison_op() {
    auto two = text_.substr(pos_, 2);
    if (two == "<=") { pos_ += 2; return CompareOp::le; }
    if (two == ">=") { pos_ += 2; return CompareOp::ge; }
    if (two == "==") { pos_ += 2; return CompareOp::eq; }
    if (two == "!=") { pos_ += 2; return CompareOp::ne; }
    if (peek() == '<') { ++pos_; return CompareOp::lt; }
    if (peek() == '>') { ++pos_; return CompareOp::gt; }
    return std::nullopt;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::boolean:
      return v.flag ? "true" : "false";
    case Value::Kind::symbol:
      return v.symbol;
    case Value::Kind::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.15g", v.number);
      return buf;
    }
  }
  return {};
}

std::optional<Value> parse_value(std::string_view text) {
  text = trim(text);
  if (text == "true") return Value::of_bool(true);
  if (text == "false") return Value::of_bool(false);
  if (auto n = parse_number(text)) return Value::of_number(*n);
  if (is_identifier(text)) return Value::of_symbol(std::string(text));
  return std::nullopt;
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
  }
  return "?";
}

bool Comparison::holds(const Value& lhs) const {
  if (lhs.kind != rhs.kind) return op == CompareOp::ne;
  if (lhs.kind == Value::Kind::number) {
    switch (op) {
      case CompareOp::lt: return lhs.number < rhs.number;
      case CompareOp::le: return lhs.number <= rhs.number;
      case CompareOp::gt: return lhs.number > rhs.number;
      case CompareOp::ge: return lhs.number >= rhs.number;
      case CompareOp::eq: return lhs.number == rhs.number;
      case CompareOp::ne: return lhs.number != rhs.number;
    }
  }
  // Symbols and booleans only support (in)equality.
  switch (op) {
    case CompareOp::eq: return lhs == rhs;
    case CompareOp::ne: return lhs != rhs;
    default: return false;
  }
}

std::string to_string(const Literal& lit) {
  std::string out;
  switch (lit.modality) {
    case Modality::none: break;
    case Modality::obligation: out += "O "; break;
    case Modality::permission: out += "P "; break;
    case Modality::prohibition: out += "F "; break;
  }
  if (lit.negated) out += '~';
  out += lit.atom;
  if (!lit.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
      if (i) out += ',';
      out += lit.args[i];
    }
    out += ')';
  }
  if (lit.comparison) {
    out += ' ';
    out += to_string(lit.comparison->op);
    out += ' ';
    out += to_string(lit.comparison->rhs);
  }
  return out;
}

Literal parse_literal(std::string_view text) { return LiteralScanner(text).parse(); }

bool is_entity_term(std::string_view term) { return is_identifier(term); }

}  // namespace narrex
