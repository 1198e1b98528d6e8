#include "condpoint/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include "condpoint/error.hpp"

namespace condpoint {

enum class Op {
  Number, Ident, Neg, Not, Add, Sub, Mul, Div, Mod, Pow,
  Lt, Le, Gt, Ge, Eq, Ne, And, Or, Call,
};

struct Expr::Node {
  Op op = Op::Number;
  double value = 0.0;
  std::string name;  // identifier or function name
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, std::vector<NodePtr> args, std::string name = {},
             double value = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  n->name = std::move(name);
  n->value = value;
  return n;
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Mod: return std::fmod(a, b);
    case Op::Pow: return std::pow(a, b);
    case Op::Lt: return a < b ? 1.0 : 0.0;
    case Op::Le: return a <= b ? 1.0 : 0.0;
    case Op::Gt: return a > b ? 1.0 : 0.0;
    case Op::Ge: return a >= b ? 1.0 : 0.0;
    case Op::Eq: return a == b ? 1.0 : 0.0;
    case Op::Ne: return a != b ? 1.0 : 0.0;
    case Op::And: return (a != 0.0 && b != 0.0) ? 1.0 : 0.0;
    case Op::Or: return (a != 0.0 || b != 0.0) ? 1.0 : 0.0;
    default: return std::nan("");
  }
}

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

struct Function {
  std::string_view name;
  std::size_t arity;
  double (*fn1)(double);
  double (*fn2)(double, double);
};

const Function kFunctions[] = {
    {"abs", 1, [](double x) { return std::fabs(x); }, nullptr},
    {"sqrt", 1, [](double x) { return std::sqrt(x); }, nullptr},
    {"exp", 1, [](double x) { return std::exp(x); }, nullptr},
    {"log", 1, [](double x) { return std::log(x); }, nullptr},
    {"sin", 1, [](double x) { return std::sin(x); }, nullptr},
    {"cos", 1, [](double x) { return std::cos(x); }, nullptr},
    {"tan", 1, [](double x) { return std::tan(x); }, nullptr},
    {"atan", 1, [](double x) { return std::atan(x); }, nullptr},
    {"floor", 1, [](double x) { return std::floor(x); }, nullptr},
    {"ceil", 1, [](double x) { return std::ceil(x); }, nullptr},
    {"sign", 1, &sign, nullptr},
    {"min", 2, nullptr, [](double a, double b) { return std::min(a, b); }},
    {"max", 2, nullptr, [](double a, double b) { return std::max(a, b); }},
    {"pow", 2, nullptr, [](double a, double b) { return std::pow(a, b); }},
    {"atan2", 2, nullptr, [](double a, double b) { return std::atan2(a, b); }},
    {"fmod", 2, nullptr, [](double a, double b) { return std::fmod(a, b); }},
};

const Function* find_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr n = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::Config, "expression '" + std::string(text_) +
                                       "': " + why + " at position " +
                                       std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  NodePtr parse_or() {
    NodePtr lhs = parse_and();
    while (accept("||")) lhs = make(Op::Or, {lhs, parse_and()});
    return lhs;
  }

  NodePtr parse_and() {
    NodePtr lhs = parse_cmp();
    while (accept("&&")) lhs = make(Op::And, {lhs, parse_cmp()});
    return lhs;
  }

  NodePtr parse_cmp() {
    NodePtr lhs = parse_add();
    static constexpr std::pair<std::string_view, Op> kOps[] = {
        {"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq},
        {"!=", Op::Ne}, {"<", Op::Lt},  {">", Op::Gt}};
    for (const auto& [tok, op] : kOps) {
      if (accept(tok)) return make(op, {lhs, parse_add()});
    }
    return lhs;
  }

  NodePtr parse_add() {
    NodePtr lhs = parse_mul();
    for (;;) {
      if (accept("+")) {
        lhs = make(Op::Add, {lhs, parse_mul()});
      } else if (accept("-")) {
        lhs = make(Op::Sub, {lhs, parse_mul()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_mul() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept("*")) {
        lhs = make(Op::Mul, {lhs, parse_unary()});
      } else if (accept("/")) {
        lhs = make(Op::Div, {lhs, parse_unary()});
      } else if (accept("%")) {
        lhs = make(Op::Mod, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept("-")) return make(Op::Neg, {parse_unary()});
    if (accept("+")) return parse_unary();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '!' &&
        (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '=')) {
      ++pos_;
      return make(Op::Not, {parse_unary()});
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept("^")) return make(Op::Pow, {base, parse_unary()});
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_or();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* begin = text_.data() + pos_;
      const auto [ptr, ec] =
          std::from_chars(begin, text_.data() + text_.size(), value);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - begin);
      return make(Op::Number, {}, {}, value);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string name(text_.substr(start, pos_ - start));
      if (accept("(")) {
        const Function* fn = find_function(name);
        if (fn == nullptr) fail("unknown function '" + name + "'");
        std::vector<NodePtr> args;
        if (!accept(")")) {
          do {
            args.push_back(parse_or());
          } while (accept(","));
          if (!accept(")")) fail("expected ')' after arguments");
        }
        if (args.size() != fn->arity) {
          fail("function '" + name + "' takes " + std::to_string(fn->arity) +
               " argument(s)");
        }
        return make(Op::Call, std::move(args), name);
      }
      if (name == "pi") return make(Op::Number, {}, {}, std::numbers::pi);
      return make(Op::Ident, {}, name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect(const NodePtr& n, std::set<std::string>& out) {
  if (n->op == Op::Ident) out.insert(n->name);
  for (const auto& a : n->args) collect(a, out);
}

NodePtr substitute_node(
    const NodePtr& n,
    const std::function<const Expr*(std::string_view)>& lookup,
    const std::function<NodePtr(const Expr&)>& root_of) {
  if (n->op == Op::Ident) {
    if (const Expr* e = lookup(n->name)) return root_of(*e);
    return n;
  }
  if (n->args.empty()) return n;
  std::vector<NodePtr> args;
  args.reserve(n->args.size());
  for (const auto& a : n->args) args.push_back(substitute_node(a, lookup, root_of));
  return make(n->op, std::move(args), n->name, n->value);
}

std::vector<double> eval_columns(const NodePtr& n, const Expr::ColumnLookup& column,
                                 std::size_t size) {
  switch (n->op) {
    case Op::Number:
      return std::vector<double>(size, n->value);
    case Op::Ident: {
      const auto col = column(n->name);
      if (col.size() != size) {
        throw Error(ErrorKind::Config, "unknown identifier '" + n->name + "'");
      }
      return {col.begin(), col.end()};
    }
    case Op::Neg: {
      auto a = eval_columns(n->args[0], column, size);
      for (auto& v : a) v = -v;
      return a;
    }
    case Op::Not: {
      auto a = eval_columns(n->args[0], column, size);
      for (auto& v : a) v = (v == 0.0) ? 1.0 : 0.0;
      return a;
    }
    case Op::Call: {
      const Function* fn = find_function(n->name);
      auto a = eval_columns(n->args[0], column, size);
      if (fn->arity == 1) {
        for (auto& v : a) v = fn->fn1(v);
      } else {
        const auto b = eval_columns(n->args[1], column, size);
        for (std::size_t i = 0; i < size; ++i) a[i] = fn->fn2(a[i], b[i]);
      }
      return a;
    }
    default: {
      auto a = eval_columns(n->args[0], column, size);
      const auto b = eval_columns(n->args[1], column, size);
      for (std::size_t i = 0; i < size; ++i) a[i] = apply_binary(n->op, a[i], b[i]);
      return a;
    }
  }
}

double eval_scalar(const NodePtr& n,
                   const std::function<double(std::string_view)>& value) {
  switch (n->op) {
    case Op::Number: return n->value;
    case Op::Ident: return value(n->name);
    case Op::Neg: return -eval_scalar(n->args[0], value);
    case Op::Not: return eval_scalar(n->args[0], value) == 0.0 ? 1.0 : 0.0;
    case Op::Call: {
      const Function* fn = find_function(n->name);
      const double a = eval_scalar(n->args[0], value);
      return fn->arity == 1 ? fn->fn1(a) : fn->fn2(a, eval_scalar(n->args[1], value));
    }
    default:
      return apply_binary(n->op, eval_scalar(n->args[0], value),
                          eval_scalar(n->args[1], value));
  }
}

}  // namespace

Expr Expr::parse(std::string_view text) {
  return Expr(Parser(text).parse(), std::string(text));
}

Expr Expr::constant(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return Expr(make(Op::Number, {}, {}, value), std::string(buf, ptr));
}

std::vector<std::string> Expr::identifiers() const {
  std::set<std::string> names;
  collect(root_, names);
  return {names.begin(), names.end()};
}

Expr Expr::substitute(
    const std::function<const Expr*(std::string_view)>& lookup) const {
  return Expr(substitute_node(root_, lookup,
                              [](const Expr& e) { return e.root_; }),
              text_);
}

std::vector<double> Expr::evaluate(const ColumnLookup& column, std::size_t n) const {
  return eval_columns(root_, column, n);
}

double Expr::evaluate(const std::function<double(std::string_view)>& value) const {
  return eval_scalar(root_, value);
}

}  // namespace condpoint
