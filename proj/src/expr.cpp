#include "folint/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace folint {

namespace {

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      bool digits = false;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, digits = true;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, digits = true;
      }
      if (!digits) throw ParseError("malformed number", start);
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
          i = j;
        } else {
          throw ParseError("malformed exponent in number", i);
        }
      }
      if (i < s.size() && (s[i] == '.' || std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_'))
        throw ParseError("malformed number", start);
      const std::string text(s.substr(start, i - start));
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      out.push_back({Tok::kNumber, start, s.substr(start, i - start), v});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::kIdent, start, s.substr(start, i - start)});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::kPlus; break;
      case '-': k = Tok::kMinus; break;
      case '*': k = Tok::kStar; break;
      case '/': k = Tok::kSlash; break;
      case '^': k = Tok::kCaret; break;
      case '(': k = Tok::kLParen; break;
      case ')': k = Tok::kRParen; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, start, s.substr(start, 1)});
    ++i;
  }
  out.push_back({Tok::kEnd, s.size(), {}});
  return out;
}

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

bool lookup_function(std::string_view name, Function& fn) {
  if (name == "sin") fn = Function::kSin;
  else if (name == "cos") fn = Function::kCos;
  else if (name == "exp") fn = Function::kExp;
  else if (name == "log") fn = Function::kLog;
  else if (name == "sqrt") fn = Function::kSqrt;
  else return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    if (peek().kind != Tok::kEnd) throw ParseError("unexpected token '" + std::string(peek().text) + "'", peek().offset);
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const NodeKind k = next().kind == Tok::kPlus ? NodeKind::kAdd : NodeKind::kSub;
      lhs = make_binary(k, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      const NodeKind k = next().kind == Tok::kStar ? NodeKind::kMul : NodeKind::kDiv;
      lhs = make_binary(k, lhs, factor());
    }
    return lhs;
  }

  NodePtr factor() {
    if (peek().kind == Tok::kMinus) {
      next();
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::kNegate;
      n->lhs = power();
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    while (peek().kind == Tok::kCaret) {
      next();
      if (peek().kind != Tok::kNumber) throw ParseError("exponent must be a numeric literal", peek().offset);
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::kPower;
      n->number = next().number;
      n->lhs = base;
      base = n;
    }
    return base;
  }

  NodePtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber: {
        next();
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::kLiteral;
        n->number = t.number;
        return n;
      }
      case Tok::kIdent: {
        next();
        if (peek().kind == Tok::kLParen) {
          Function fn;
          if (!lookup_function(t.text, fn)) throw ParseError("unknown function '" + std::string(t.text) + "'", t.offset);
          next();
          auto n = std::make_shared<ExprNode>();
          n->kind = NodeKind::kCall;
          n->fn = fn;
          n->lhs = expr();
          expect_rparen();
          return n;
        }
        Function fn;
        if (lookup_function(t.text, fn))
          throw ParseError("function '" + std::string(t.text) + "' requires an argument", t.offset);
        auto n = std::make_shared<ExprNode>();
        if (t.text.size() == 2 && t.text[0] == 'x' && t.text[1] >= '1' && t.text[1] <= '9') {
          n->kind = NodeKind::kCoordinate;
          n->index = t.text[1] - '1';
        } else {
          n->kind = NodeKind::kParameter;
          n->name = std::string(t.text);
        }
        return n;
      }
      case Tok::kLParen: {
        next();
        NodePtr e = expr();
        expect_rparen();
        return e;
      }
      case Tok::kEnd: throw ParseError("unexpected end of expression", t.offset);
      default: throw ParseError("unexpected token '" + std::string(t.text) + "'", t.offset);
    }
  }

  void expect_rparen() {
    if (peek().kind != Tok::kRParen) throw ParseError("expected ')'", peek().offset);
    next();
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* function_name(Function fn) {
  switch (fn) {
    case Function::kSin: return "sin";
    case Function::kCos: return "cos";
    case Function::kExp: return "exp";
    case Function::kLog: return "log";
    case Function::kSqrt: return "sqrt";
  }
  return "?";
}

void render(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::kLiteral: out += format_number(n.number); return;
    case NodeKind::kCoordinate: out += "x" + std::to_string(n.index + 1); return;
    case NodeKind::kParameter: out += n.name; return;
    case NodeKind::kNegate:
      out += "(-";
      render(*n.lhs, out);
      out += ")";
      return;
    case NodeKind::kPower:
      out += "(";
      render(*n.lhs, out);
      out += "^" + format_number(n.number) + ")";
      return;
    case NodeKind::kCall:
      out += function_name(n.fn);
      out += "(";
      render(*n.lhs, out);
      out += ")";
      return;
    default: break;
  }
  const char* op = n.kind == NodeKind::kAdd ? " + " : n.kind == NodeKind::kSub ? " - " : n.kind == NodeKind::kMul ? " * " : " / ";
  out += "(";
  render(*n.lhs, out);
  out += op;
  render(*n.rhs, out);
  out += ")";
}

void collect(const ExprNode& n, int& max_coord, std::set<std::string>* params) {
  if (n.kind == NodeKind::kCoordinate && n.index > max_coord) max_coord = n.index;
  if (n.kind == NodeKind::kParameter && params) params->insert(n.name);
  if (n.lhs) collect(*n.lhs, max_coord, params);
  if (n.rhs) collect(*n.rhs, max_coord, params);
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  bool blank = true;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  if (blank) throw ParseError("empty expression", 0);
  Parser p(lex(text));
  return Expression(p.parse_all());
}

Expression Expression::constant(double value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::kLiteral;
  n->number = value;
  return Expression(n);
}

std::string Expression::to_string() const {
  if (!root_) return {};
  std::string out;
  render(*root_, out);
  return out;
}

int Expression::max_coordinate() const {
  int m = -1;
  if (root_) collect(*root_, m, nullptr);
  return m;
}

std::set<std::string> Expression::parameter_names() const {
  std::set<std::string> names;
  int m = -1;
  if (root_) collect(*root_, m, &names);
  return names;
}

double Expression::evaluate(std::span<const double> point, const ParameterTable& params) const {
  auto lookup = [&params](std::string_view name) -> const double* {
    auto it = params.find(name);
    return it == params.end() ? nullptr : &it->second;
  };
  return evaluate_generic<double>(point, lookup, 0.0);
}

Jet3 Expression::evaluate_jet(std::span<const double> point, const ParameterTable& params, int order) const {
  const int dim = static_cast<int>(point.size());
  if (dim < 1 || dim > kMaxChartDim) throw InputError("jet evaluation needs 1..4 coordinates");
  std::array<Jet3, kMaxChartDim> vars;
  for (int i = 0; i < dim; ++i) vars[static_cast<std::size_t>(i)] = Jet3::variable(dim, i, point).truncated(order);
  // Parameters become constant jets; materialized lazily per lookup.
  std::map<std::string, Jet3, std::less<>> cache;
  auto lookup = [&](std::string_view name) -> const Jet3* {
    auto hit = cache.find(name);
    if (hit != cache.end()) return &hit->second;
    auto it = params.find(name);
    if (it == params.end()) return nullptr;
    return &cache.emplace(std::string(name), Jet3(dim, it->second, order)).first->second;
  };
  return evaluate_generic<Jet3>(std::span<const Jet3>(vars.data(), static_cast<std::size_t>(dim)), lookup,
                                Jet3(dim, 0.0, order));
}

}  // namespace folint
