#include "matid/parse.hpp"

#include <cctype>
#include <limits>
#include <string>

namespace matid {

namespace {

constexpr unsigned kMaxExponent = 64;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_item() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == 'x' || c == 'z' || c == 'e' || c == '(' || c == '[';
  }

  std::string digits() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail(pos_ >= text_.size() ? "unexpected end of input, expected integer" : "expected integer");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::uint32_t small_int() {
    std::size_t start = pos_;
    std::string s = digits();
    if (s.size() > 9) {
      pos_ = start;
      fail("integer too large");
    }
    return static_cast<std::uint32_t>(std::stoul(s));
  }

  Expr parse_sum() {
    Expr sum;
    sum.kind = Expr::Kind::Sum;
    sum.offset = (skip_space(), pos_);
    bool neg = false;
    if (peek() == '+' || peek() == '-') {
      neg = text_[pos_] == '-';
      ++pos_;
    }
    sum.children.push_back(parse_term());
    sum.negated.push_back(neg);
    while (peek() == '+' || peek() == '-') {
      neg = text_[pos_] == '-';
      ++pos_;
      sum.children.push_back(parse_term());
      sum.negated.push_back(neg);
    }
    if (sum.children.size() == 1 && !sum.negated[0]) return std::move(sum.children[0]);
    return sum;
  }

  Expr parse_term() {
    Expr prod;
    prod.kind = Expr::Kind::Product;
    prod.offset = (skip_space(), pos_);
    if (at_end()) fail("unexpected end of input");
    if (!starts_item()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    prod.children.push_back(parse_item());
    for (;;) {
      if (peek() == '*') {
        ++pos_;
        if (at_end()) fail("unexpected end of input");
        if (!starts_item()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        prod.children.push_back(parse_item());
      } else if (starts_item()) {
        prod.children.push_back(parse_item());
      } else {
        break;
      }
    }
    if (prod.children.size() == 1) return std::move(prod.children[0]);
    return prod;
  }

  Expr parse_item() {
    skip_space();
    std::size_t start = pos_;
    char c = text_[pos_];
    Expr atom;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num = digits();
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        std::size_t den_at = pos_;
        std::string den = digits();
        if (den.find_first_not_of('0') == std::string::npos) {
          pos_ = den_at;
          fail("zero denominator");
        }
        num += "/" + den;
      }
      atom.kind = Expr::Kind::Const;
      atom.value = Rational::parse(num);
      atom.offset = start;
      return atom;  // no powers on literal coefficients
    }
    if (c == '(') {
      ++pos_;
      atom = parse_sum();
      if (peek() != ')') fail(at_end() ? "unexpected end of input, expected ')'" : "expected ')'");
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      atom.kind = Expr::Kind::Commutator;
      atom.offset = start;
      atom.children.push_back(parse_sum());
      while (peek() == ',') {
        ++pos_;
        atom.children.push_back(parse_sum());
      }
      if (peek() != ']') fail(at_end() ? "unexpected end of input, expected ']'" : "expected ']'");
      if (atom.children.size() < 2) fail("commutator needs at least two entries");
      ++pos_;
    } else {
      atom = parse_var();
    }
    if (peek() == '^') {
      ++pos_;
      skip_space();
      std::size_t exp_at = pos_;
      std::uint32_t k = small_int();
      if (k > kMaxExponent) {
        pos_ = exp_at;
        fail("exponent exceeds " + std::to_string(kMaxExponent));
      }
      Expr pw;
      pw.kind = Expr::Kind::Power;
      pw.exponent = k;
      pw.offset = start;
      pw.children.push_back(std::move(atom));
      return pw;
    }
    return atom;
  }

  Expr parse_var() {
    std::size_t start = pos_;
    char kind = text_[pos_++];
    Expr v;
    v.kind = Expr::Kind::Var;
    v.offset = start;
    try {
      std::uint32_t i = small_int();
      if (kind == 'e') {
        if (pos_ >= text_.size() || text_[pos_] != '_') fail("expected '_'");
        ++pos_;
        std::uint32_t j = small_int();
        if (pos_ >= text_.size() || text_[pos_] != '_') fail("expected '_'");
        ++pos_;
        v.var = VarRef::entry(i, j, small_int());
      } else {
        v.var = kind == 'x' ? VarRef::x(i) : VarRef::z(i);
      }
    } catch (const PreconditionError& err) {
      pos_ = start;
      fail(err.what());
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

NcPoly expr_to_poly(const Expr& e, Field field) {
  switch (e.kind) {
    case Expr::Kind::Var:
      return NcPoly::variable(e.var, field);
    case Expr::Kind::Const:
      return NcPoly::constant(Scalar(field, e.value));
    case Expr::Kind::Sum: {
      NcPoly acc(field);
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        NcPoly c = expr_to_poly(e.children[i], field);
        acc = e.negated[i] ? acc - c : acc + c;
      }
      return acc;
    }
    case Expr::Kind::Product: {
      NcPoly acc = NcPoly::constant(Scalar::one(field));
      for (const Expr& c : e.children) acc = acc * expr_to_poly(c, field);
      return acc;
    }
    case Expr::Kind::Commutator: {
      std::vector<NcPoly> args;
      for (const Expr& c : e.children) args.push_back(expr_to_poly(c, field));
      return gen_commutator(args);
    }
    case Expr::Kind::Power: {
      NcPoly base = expr_to_poly(e.children[0], field);
      NcPoly acc = NcPoly::constant(Scalar::one(field));
      for (unsigned i = 0; i < e.exponent; ++i) acc = acc * base;
      return acc;
    }
  }
  return NcPoly(field);
}

NcPoly parse_poly(std::string_view text, Field field) { return expr_to_poly(parse_expr(text), field); }

}  // namespace matid
