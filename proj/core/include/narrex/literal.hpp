#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace narrex {

enum class Modality { none, obligation, permission, prohibition };

/// A ground value carried by a premise or compared against in a condition.
struct Value {
  enum class Kind { boolean, number, symbol };

  Kind kind = Kind::boolean;
  bool flag = true;
  double number = 0.0;
  std::string symbol;

  static Value of_bool(bool b) { return Value{Kind::boolean, b, 0.0, {}}; }
  static Value of_number(double n) { return Value{Kind::number, true, n, {}}; }
  static Value of_symbol(std::string s) { return Value{Kind::symbol, true, 0.0, std::move(s)}; }

  auto operator<=>(const Value&) const = default;
  bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);

/// Parses `true`, `false`, a decimal number, or an identifier.
std::optional<Value> parse_value(std::string_view text);

enum class CompareOp { lt, le, gt, ge, eq, ne };

std::string_view to_string(CompareOp op);

/// `age(marco) < 16`-style condition. Evaluated against premise values when
/// facts are grounded, so the reasoner only ever sees boolean literals.
struct Comparison {
  CompareOp op = CompareOp::eq;
  Value rhs;

  auto operator<=>(const Comparison&) const = default;
  bool operator==(const Comparison&) const = default;

  bool holds(const Value& lhs) const;
};

/// Function-free literal: `[O|P|F] [~]atom(term,...)[ op value]`.
/// Modality and the optional comparison are part of the identity.
struct Literal {
  Modality modality = Modality::none;
  bool negated = false;
  std::string atom;
  std::vector<std::string> args;
  std::optional<Comparison> comparison;

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;

  Literal complement() const {
    Literal c = *this;
    c.negated = !c.negated;
    return c;
  }

  /// The positive form; q and ~q share it.
  Literal atom_key() const {
    Literal c = *this;
    c.negated = false;
    return c;
  }

  /// The literal without polarity, modality or comparison, i.e. what a
  /// valued premise assigns to (`age(marco)`).
  Literal subject() const {
    Literal c;
    c.atom = atom;
    c.args = args;
    return c;
  }
};

std::string to_string(const Literal& lit);

/// Throws BundleError("syntax-error") with the offending offset in detail.
Literal parse_literal(std::string_view text);

/// True when `term` is an entity reference (identifier) rather than a number.
bool is_entity_term(std::string_view term);

}  // namespace narrex
