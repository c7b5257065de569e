#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stlf/formula.hpp"

namespace stlf {

namespace stl_parse_detail {

enum class Tok {
  end, ident, number,
  lparen, rparen, lbracket, rbracket, comma, colon,
  and_op, or_op, not_op, implies,
  ge, gt, le, lt, eq, ne,
  plus, minus, star, slash,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double number = 0;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(&src) { next(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    next();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    raise(Errc::syntax_error,
          std::to_string(tok_.line) + ":" + std::to_string(tok_.col) + ": " + msg);
  }

private:
  void next() {
    const std::string& src = *src_;
    while (pos_ < src.size()) {
      char c = src[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++col_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src.size() && src[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src.size()) return;

    char c = src[pos_];
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src.size() && src[pos_ + 1] == b;
    };
    auto emit = [&](Tok k, size_t n) {
      tok_.kind = k;
      tok_.text = src.substr(pos_, n);
      pos_ += n;
      col_ += static_cast<int>(n);
    };

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t b = pos_;
      while (pos_ < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos_])) || src[pos_] == '_'))
        ++pos_;
      tok_.kind = Tok::ident;
      tok_.text = src.substr(b, pos_ - b);
      col_ += static_cast<int>(pos_ - b);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[pos_ + 1])))) {
      size_t b = pos_;
      while (pos_ < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[pos_])) || src[pos_] == '.' ||
              src[pos_] == 'e' || src[pos_] == 'E' ||
              ((src[pos_] == '+' || src[pos_] == '-') &&
               (src[pos_ - 1] == 'e' || src[pos_ - 1] == 'E'))))
        ++pos_;
      tok_.kind = Tok::number;
      tok_.text = src.substr(b, pos_ - b);
      tok_.number = parse_double(tok_.text);
      col_ += static_cast<int>(pos_ - b);
      return;
    }
    if (two('&', '&')) return emit(Tok::and_op, 2);
    if (two('|', '|')) return emit(Tok::or_op, 2);
    if (two('-', '>')) return emit(Tok::implies, 2);
    if (two('>', '=')) return emit(Tok::ge, 2);
    if (two('<', '=')) return emit(Tok::le, 2);
    if (two('=', '=')) return emit(Tok::eq, 2);
    if (two('!', '=')) return emit(Tok::ne, 2);
    switch (c) {
      case '(': return emit(Tok::lparen, 1);
      case ')': return emit(Tok::rparen, 1);
      case '[': return emit(Tok::lbracket, 1);
      case ']': return emit(Tok::rbracket, 1);
      case ',': return emit(Tok::comma, 1);
      case ':': return emit(Tok::colon, 1);
      case '>': return emit(Tok::gt, 1);
      case '<': return emit(Tok::lt, 1);
      case '=': return emit(Tok::eq, 1);
      case '!': return emit(Tok::not_op, 1);
      case '+': return emit(Tok::plus, 1);
      case '-': return emit(Tok::minus, 1);
      case '*': return emit(Tok::star, 1);
      case '/': return emit(Tok::slash, 1);
    }
    raise(Errc::syntax_error, std::to_string(line_) + ":" + std::to_string(col_) +
                                  ": unexpected character '" + std::string(1, c) + "'");
  }

  const std::string* src_ = nullptr;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

inline bool is_reserved(const std::string& s) {
  if (s == "true" || s == "false" || s == "G" || s == "F" || s == "U") return true;
  return s.size() == 2 && s[0] == 'T' && s[1] >= '1' && s[1] <= '5';
}

inline bool is_mu_fn(const std::string& s, MuFn& out) {
  if (s == "abs") out = MuFn::abs;
  else if (s == "sqrt") out = MuFn::sqrt;
  else if (s == "sin") out = MuFn::sin;
  else if (s == "cos") out = MuFn::cos;
  else if (s == "tan") out = MuFn::tan;
  else if (s == "exp") out = MuFn::exp;
  else if (s == "log") out = MuFn::log;
  else return false;
  return true;
}

/// Recursive-descent parser over a token string. Comparisons are
/// disambiguated from parenthesized formulas by backtracking.
class Parser {
public:
  explicit Parser(const std::string& src) : lex_(src) {}

  FormulaPtr parse_formula_all() {
    FormulaPtr f = implication();
    if (lex_.peek().kind != Tok::end) lex_.fail("trailing input after formula");
    return f;
  }

private:
  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (lex_.peek().kind == Tok::implies) {
      lex_.take();
      return f_implies(lhs, implication());
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr f = conjunction();
    while (lex_.peek().kind == Tok::or_op) {
      lex_.take();
      f = f_or(f, conjunction());
    }
    return f;
  }

  FormulaPtr conjunction() {
    FormulaPtr f = until_expr();
    while (lex_.peek().kind == Tok::and_op) {
      lex_.take();
      f = f_and(f, until_expr());
    }
    return f;
  }

  FormulaPtr until_expr() {
    FormulaPtr f = unary();
    while (lex_.peek().kind == Tok::ident && lex_.peek().text == "U") {
      lex_.take();
      MaybeInterval w = maybe_interval();
      f = f_until(w, f, unary());
    }
    return f;
  }

  FormulaPtr unary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::not_op) {
      lex_.take();
      return f_not(unary());
    }
    if (t.kind == Tok::ident && (t.text == "G" || t.text == "F")) {
      bool globally = t.text == "G";
      lex_.take();
      MaybeInterval w = maybe_interval();
      FormulaPtr arg = unary();
      return globally ? f_globally(w, arg) : f_eventually(w, arg);
    }
    return primary();
  }

  FormulaPtr primary() {
    // A comparison can start with '(' just like a nested formula, so try
    // it first and rewind on failure. Only plain syntax mismatches
    // backtrack; UnknownFunction and the like surface to the caller.
    {
      Lexer saved = lex_;
      try {
        return comparison();
      } catch (const Error& e) {
        if (e.code() != Errc::syntax_error) throw;
        lex_ = saved;
      }
    }
    const Token& t = lex_.peek();
    if (t.kind == Tok::lparen) {
      lex_.take();
      FormulaPtr f = implication();
      expect(Tok::rparen, "')'");
      return f;
    }
    if (t.kind == Tok::ident) {
      if (t.text == "true") {
        lex_.take();
        return f_true();
      }
      if (t.text == "false") {
        lex_.take();
        return f_false();
      }
      if (t.text.size() == 2 && t.text[0] == 'T' && t.text[1] >= '1' && t.text[1] <= '5')
        return pattern_shorthand();
      // bare boolean signal
      std::string name = lex_.take().text;
      return f_bool(name);
    }
    lex_.fail("expected a formula");
  }

  FormulaPtr pattern_shorthand() {
    std::string which = lex_.take().text;
    expect(Tok::lparen, "'('");
    FormulaPtr out;
    if (which == "T1") {
      out = pattern_invariance(implication());
    } else if (which == "T3") {
      FormulaPtr psi = implication();
      expect(Tok::comma, "','");
      out = pattern_smoothness(psi, implication());
    } else {
      double d = signed_number();
      if (d < 0) raise(Errc::malformed_interval, which + " duration must be nonnegative");
      expect(Tok::comma, "','");
      FormulaPtr phi = implication();
      if (which == "T2") out = pattern_steady_state(d, phi);
      else if (which == "T4") out = pattern_responsiveness(d, phi);
      else out = pattern_fairness(d, phi);
    }
    expect(Tok::rparen, "')'");
    return out;
  }

  FormulaPtr comparison() {
    MuPtr lhs = sum();
    Rel rel;
    switch (lex_.peek().kind) {
      case Tok::ge: rel = Rel::ge; break;
      case Tok::gt: rel = Rel::gt; break;
      case Tok::le: rel = Rel::le; break;
      case Tok::lt: rel = Rel::lt; break;
      case Tok::eq: rel = Rel::eq; break;
      case Tok::ne: rel = Rel::ne; break;
      default: lex_.fail("expected a relational operator");
    }
    lex_.take();
    MuPtr rhs = sum();
    // fold the right-hand side into mu: l rel r  ==>  (l - r) rel 0
    if (auto* c = std::get_if<MuConst>(&rhs->node); c && c->value == 0.0)
      return f_cmp(lhs, rel);
    return f_cmp(mu_bin('-', lhs, rhs), rel);
  }

  MuPtr sum() {
    MuPtr m = product();
    while (lex_.peek().kind == Tok::plus || lex_.peek().kind == Tok::minus) {
      char op = lex_.take().kind == Tok::plus ? '+' : '-';
      m = mu_bin(op, m, product());
    }
    return m;
  }

  MuPtr product() {
    MuPtr m = factor();
    while (lex_.peek().kind == Tok::star || lex_.peek().kind == Tok::slash) {
      char op = lex_.take().kind == Tok::star ? '*' : '/';
      m = mu_bin(op, m, factor());
    }
    return m;
  }

  MuPtr factor() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::minus) {
      lex_.take();
      MuPtr m = factor();
      if (auto* c = std::get_if<MuConst>(&m->node)) return mu_const(-c->value);
      return mu_bin('-', mu_const(0.0), m);
    }
    if (t.kind == Tok::number) return mu_const(lex_.take().number);
    if (t.kind == Tok::lparen) {
      lex_.take();
      MuPtr m = sum();
      expect(Tok::rparen, "')'");
      return m;
    }
    if (t.kind == Tok::ident) {
      Token id = lex_.take();
      if (lex_.peek().kind == Tok::lparen) {
        MuFn fn;
        if (!is_mu_fn(id.text, fn)) {
          if (is_reserved(id.text)) lex_.fail("'" + id.text + "' is not a term");
          raise(Errc::unknown_function, std::to_string(id.line) + ":" + std::to_string(id.col) +
                                            ": unknown function '" + id.text + "'");
        }
        lex_.take();
        MuPtr arg = sum();
        expect(Tok::rparen, "')'");
        return mu_func(fn, arg);
      }
      if (id.text == "true" || id.text == "false" || id.text == "U")
        lex_.fail("'" + id.text + "' is not a term");
      return mu_signal(id.text);
    }
    lex_.fail("expected a term");
  }

  MaybeInterval maybe_interval() {
    if (lex_.peek().kind != Tok::lbracket) return {};
    lex_.take();
    double lo = signed_number();
    expect(Tok::comma, "','");
    double hi = signed_number();
    expect(Tok::rbracket, "']'");
    return Interval::checked(lo, hi);
  }

  double signed_number() {
    bool neg = false;
    if (lex_.peek().kind == Tok::minus) {
      lex_.take();
      neg = true;
    }
    if (lex_.peek().kind != Tok::number) lex_.fail("expected a number");
    double v = lex_.take().number;
    return neg ? -v : v;
  }

  void expect(Tok k, const char* what) {
    if (lex_.peek().kind != k) lex_.fail(std::string("expected ") + what);
    lex_.take();
  }

  Lexer lex_;
};

}  // namespace stl_parse_detail

/// Parse one formula from concrete syntax, e.g. `G[0,10](x >= 0)`.
inline FormulaPtr parse_stl(const std::string& text) {
  return stl_parse_detail::Parser(text).parse_formula_all();
}

// ---------------------------------------------------------------------------
// Requirement files: one formula per line, '#' comments, optional
// `Name:` prefix, pattern shorthand T1(..)..T5(..).
// ---------------------------------------------------------------------------

struct Requirement {
  std::string name;
  std::string text;
  FormulaPtr surface;
  FormulaPtr core;
};

inline Requirement make_requirement(std::string name, const std::string& text) {
  Requirement r;
  r.name = std::move(name);
  r.text = text;
  r.surface = parse_stl(text);
  r.core = to_core(r.surface);
  return r;
}

inline std::vector<Requirement> parse_requirements(std::istream& in) {
  std::vector<Requirement> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    std::string body = line.substr(b, e - b + 1);

    std::string name = "req" + std::to_string(out.size() + 1);
    // `Name: formula` prefix
    size_t i = 0;
    while (i < body.size() &&
           (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '_'))
      ++i;
    if (i > 0 && i < body.size() && body[i] == ':') {
      name = body.substr(0, i);
      body = body.substr(i + 1);
    }
    try {
      out.push_back(make_requirement(name, body));
    } catch (const Error& err) {
      raise(err.code(), "line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return out;
}

inline std::vector<Requirement> load_requirements(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::parse_error, "cannot open '" + path + "'");
  return parse_requirements(in);
}

}  // namespace stlf
