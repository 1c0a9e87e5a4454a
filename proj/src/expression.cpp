#include "nsob/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "nsob/error.hpp"

namespace nsob {

struct Expression::Node {
  enum class Op { number, variable, neg, add, sub, mul, div, pow, call } op;
  double value = 0.0;
  std::size_t index = 0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character");
    return e;
  }

  std::size_t arity = 0;

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::invalid_input, fmt::format("expression '{}': {} at column {}", s_, what, pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make(Op::add, {lhs, term()});
      else if (eat('-')) lhs = make(Op::sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Op::mul, {lhs, unary()});
      else if (eat('/')) lhs = make(Op::div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Op::neg, {unary()});
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Op::pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    error("unexpected character");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) error("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::number;
    n->value = v;
    return n;
  }

  NodePtr word() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    auto n = std::make_shared<Expression::Node>();
    if (eat('(')) {
      static const char* known[] = {"abs", "sqrt", "exp", "log", "min", "max"};
      if (std::find(std::begin(known), std::end(known), name) == std::end(known)) {
        pos_ = start;
        error(fmt::format("unknown function '{}'", name));
      }
      n->op = Op::call;
      n->name = name;
      if (!eat(')')) {
        do n->args.push_back(expr());
        while (eat(','));
        if (!eat(')')) error("expected ')' or ','");
      }
      const bool variadic = name == "min" || name == "max";
      if (variadic ? n->args.empty() : n->args.size() != 1) {
        pos_ = start;
        error(fmt::format("wrong number of arguments to '{}'", name));
      }
      return n;
    }
    if (name == "pi") {
      n->op = Op::number;
      n->value = std::numbers::pi;
      return n;
    }
    n->op = Op::variable;
    if (name == "x") n->index = 0;
    else if (name == "y") n->index = 1;
    else if (name == "z") n->index = 2;
    else if (name.size() > 1 && name[0] == 'x' &&
             std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
      n->index = std::stoul(name.substr(1));
    else {
      pos_ = start;
      error(fmt::format("unknown variable '{}'", name));
    }
    arity = std::max(arity, n->index + 1);
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, std::span<const double> x) {
  switch (n.op) {
    case Op::number: return n.value;
    case Op::variable:
      if (n.index >= x.size())
        fail(ErrorKind::dimension_mismatch, fmt::format("expression reads coordinate {} of a {}-d point", n.index, x.size()));
      return x[n.index];
    case Op::neg: return -eval(*n.args[0], x);
    case Op::add: return eval(*n.args[0], x) + eval(*n.args[1], x);
    case Op::sub: return eval(*n.args[0], x) - eval(*n.args[1], x);
    case Op::mul: return eval(*n.args[0], x) * eval(*n.args[1], x);
    case Op::div: return eval(*n.args[0], x) / eval(*n.args[1], x);
    case Op::pow: return std::pow(eval(*n.args[0], x), eval(*n.args[1], x));
    case Op::call: {
      const double a = eval(*n.args[0], x);
      if (n.name == "abs") return std::abs(a);
      if (n.name == "sqrt") return std::sqrt(a);
      if (n.name == "exp") return std::exp(a);
      if (n.name == "log") return std::log(a);
      double r = a;
      for (std::size_t i = 1; i < n.args.size(); ++i) {
        const double b = eval(*n.args[i], x);
        r = n.name == "min" ? std::min(r, b) : std::max(r, b);
      }
      return r;
    }
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser parser(text);
  Expression e;
  e.root_ = parser.parse();
  e.text_ = text;
  e.arity_ = parser.arity;
  return e;
}

double Expression::operator()(std::span<const double> x) const { return eval(*root_, x); }

}  // namespace nsob
