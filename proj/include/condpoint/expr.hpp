#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace condpoint {

/// A small arithmetic/boolean expression over named coordinates, used to
/// define random variables, event predicates and test functions in configs.
///
/// Grammar (lowest to highest precedence): `||`, `&&`, comparisons
/// (`< <= > >= == !=`), `+ -`, `* / %`, unary `- + !`, right-associative `^`.
/// Functions: abs sqrt exp log sin cos tan atan floor ceil sign min max pow
/// atan2 fmod. The constant `pi` is predefined. Comparisons and boolean
/// operators yield 1.0 or 0.0.
class Expr {
 public:
  struct Node;

  /// Throws Error(Config) with the offending position on a parse failure.
  static Expr parse(std::string_view text);
  static Expr constant(double value);

  const std::string& text() const { return text_; }
  std::vector<std::string> identifiers() const;

  /// Replaces identifiers for which `lookup` returns an expression.
  Expr substitute(
      const std::function<const Expr*(std::string_view)>& lookup) const;

  using ColumnLookup = std::function<std::span<const double>(std::string_view)>;
  /// Column-wise evaluation over `n` points.
  std::vector<double> evaluate(const ColumnLookup& column, std::size_t n) const;
  double evaluate(const std::function<double(std::string_view)>& value) const;

 private:
  Expr(std::shared_ptr<const Node> root, std::string text)
      : root_(std::move(root)), text_(std::move(text)) {}

  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace condpoint
