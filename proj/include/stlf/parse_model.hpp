#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stlf/model.hpp"

namespace stlf {

namespace model_parse_detail {

struct Token {
  enum Kind {
    end, ident, number, prime,
    lparen, rparen, lbracket, rbracket, lbrace, rbrace,
    comma, colon, semi, assign,
    and_op, or_op, not_op,
    eq, ne, le, lt, ge, gt,
    plus, minus, star, slash,
  } kind = end;
  std::string text;
  double num = 0;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(&src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    raise(Errc::syntax_error,
          std::to_string(tok_.line) + ":" + std::to_string(tok_.col) + ": " + msg);
  }

private:
  void advance() {
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

    const std::string& s = src;
    char c = s[pos_];
    auto two = [&](char a, char b) { return c == a && pos_ + 1 < s.size() && s[pos_ + 1] == b; };
    auto emit = [&](Token::Kind k, size_t n) {
      tok_.kind = k;
      tok_.text = s.substr(pos_, n);
      pos_ += n;
      col_ += static_cast<int>(n);
    };

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t b = pos_;
      while (pos_ < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos_])) || s[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::ident;
      tok_.text = s.substr(b, pos_ - b);
      col_ += static_cast<int>(pos_ - b);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[pos_ + 1])))) {
      size_t b = pos_;
      while (pos_ < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos_])) || s[pos_] == '.' ||
              s[pos_] == 'e' || s[pos_] == 'E' ||
              ((s[pos_] == '+' || s[pos_] == '-') && (s[pos_ - 1] == 'e' || s[pos_ - 1] == 'E'))))
        ++pos_;
      tok_.kind = Token::number;
      tok_.text = s.substr(b, pos_ - b);
      tok_.num = parse_double(tok_.text);
      col_ += static_cast<int>(pos_ - b);
      return;
    }
    if (two('&', '&')) return emit(Token::and_op, 2);
    if (two('|', '|')) return emit(Token::or_op, 2);
    if (two('=', '=')) return emit(Token::eq, 2);
    if (two('!', '=')) return emit(Token::ne, 2);
    if (two('<', '=')) return emit(Token::le, 2);
    if (two('>', '=')) return emit(Token::ge, 2);
    switch (c) {
      case '\'': return emit(Token::prime, 1);
      case '(': return emit(Token::lparen, 1);
      case ')': return emit(Token::rparen, 1);
      case '[': return emit(Token::lbracket, 1);
      case ']': return emit(Token::rbracket, 1);
      case '{': return emit(Token::lbrace, 1);
      case '}': return emit(Token::rbrace, 1);
      case ',': return emit(Token::comma, 1);
      case ':': return emit(Token::colon, 1);
      case ';': return emit(Token::semi, 1);
      case '=': return emit(Token::assign, 1);
      case '<': return emit(Token::lt, 1);
      case '>': return emit(Token::gt, 1);
      case '!': return emit(Token::not_op, 1);
      case '+': return emit(Token::plus, 1);
      case '-': return emit(Token::minus, 1);
      case '*': return emit(Token::star, 1);
      case '/': return emit(Token::slash, 1);
    }
    raise(Errc::syntax_error, std::to_string(line_) + ":" + std::to_string(col_) +
                                  ": unexpected character '" + std::string(1, c) + "'");
  }

  const std::string* src_ = nullptr;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

inline bool builtin_of(const std::string& s, ExFn& out) {
  if (s == "sat") out = ExFn::sat;
  else if (s == "min") out = ExFn::min;
  else if (s == "max") out = ExFn::max;
  else if (s == "abs") out = ExFn::abs;
  else if (s == "ite") out = ExFn::ite;
  else if (s == "sqrt") out = ExFn::sqrt;
  else if (s == "sin") out = ExFn::sin;
  else if (s == "cos") out = ExFn::cos;
  else if (s == "exp") out = ExFn::exp;
  else if (s == "log") out = ExFn::log;
  else return false;
  return true;
}

class Parser {
public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ModelIR parse() {
    ModelIR m;
    std::unordered_map<std::string, ExprPtr> updates;
    while (lex_.peek().kind != Token::end) {
      Token head = lex_.take();
      if (head.kind != Token::ident) lex_.fail("expected a declaration");
      if (head.text == "model") {
        m.name = expect_ident("model name");
        semi();
      } else if (head.text == "step") {
        if (lex_.peek().kind != Token::number) lex_.fail("expected the step length");
        m.step = lex_.take().num;
        if (!(m.step > 0)) raise(Errc::parse_error, "step must be > 0");
        semi();
      } else if (head.text == "input") {
        m.inputs.push_back(parse_var_decl());
        semi();
      } else if (head.text == "state") {
        m.states.push_back(parse_state_decl());
        semi();
      } else if (head.text == "output") {
        OutputDecl o;
        o.name = expect_ident("output name");
        expect(Token::assign, "'='");
        o.expr = or_expr();
        semi();
        m.outputs.push_back(std::move(o));
      } else {
        // `name' = expr;`
        if (lex_.peek().kind != Token::prime)
          lex_.fail("unknown declaration '" + head.text + "'");
        lex_.take();
        expect(Token::assign, "'='");
        ExprPtr e = or_expr();
        semi();
        if (updates.count(head.text))
          raise(Errc::parse_error, "duplicate update for '" + head.text + "'");
        updates[head.text] = e;
      }
    }

    for (const auto& s : m.states) {
      auto it = updates.find(s.decl.name);
      if (it == updates.end())
        raise(Errc::parse_error, "state '" + s.decl.name + "' has no update");
      m.updates.push_back(it->second);
      updates.erase(it);
    }
    if (!updates.empty())
      raise(Errc::parse_error, "update for undeclared state '" + updates.begin()->first + "'");

    resolve_names(m);
    validate_model(m);
    return m;
  }

private:
  VarDecl parse_var_decl() {
    VarDecl d;
    d.name = expect_ident("variable name");
    expect(Token::colon, "':'");
    d.kind = parse_kind();
    return d;
  }

  StateDecl parse_state_decl() {
    StateDecl s;
    s.decl = parse_var_decl();
    if (!(lex_.peek().kind == Token::ident && lex_.peek().text == "init"))
      lex_.fail("expected 'init'");
    lex_.take();
    s.init = parse_init_value(s.decl.kind);
    return s;
  }

  Kind parse_kind() {
    std::string k = expect_ident("a kind (real/bool/enum)");
    if (k == "bool") return Kind::boolean();
    if (k == "real") {
      if (lex_.peek().kind != Token::lbracket) return Kind::real();
      lex_.take();
      double lo = signed_number();
      expect(Token::comma, "','");
      double hi = signed_number();
      expect(Token::rbracket, "']'");
      return Kind::real_range(lo, hi);
    }
    if (k == "enum") {
      expect(Token::lbrace, "'{'");
      std::vector<std::string> labels;
      labels.push_back(expect_ident("enum label"));
      while (lex_.peek().kind == Token::comma) {
        lex_.take();
        labels.push_back(expect_ident("enum label"));
      }
      expect(Token::rbrace, "'}'");
      return Kind::enumeration(std::move(labels));
    }
    lex_.fail("unknown kind '" + k + "'");
  }

  double parse_init_value(const Kind& kind) {
    switch (kind.tag) {
      case KindTag::real: return signed_number();
      case KindTag::boolean: {
        std::string v = expect_ident("true or false");
        if (v == "true") return 1.0;
        if (v == "false") return 0.0;
        raise(Errc::parse_error, "boolean init must be true or false");
      }
      case KindTag::enumeration: {
        std::string v = expect_ident("an enum label");
        int idx = kind.enum_index(v);
        if (idx < 0) raise(Errc::parse_error, "'" + v + "' is not a label of this enum");
        return idx;
      }
    }
    return 0;
  }

  // --- expressions -----------------------------------------------------

  ExprPtr or_expr() {
    ExprPtr e = and_expr();
    while (lex_.peek().kind == Token::or_op) {
      lex_.take();
      e = ex_bin(ExOp::or_, e, and_expr());
    }
    return e;
  }

  ExprPtr and_expr() {
    ExprPtr e = not_expr();
    while (lex_.peek().kind == Token::and_op) {
      lex_.take();
      e = ex_bin(ExOp::and_, e, not_expr());
    }
    return e;
  }

  ExprPtr not_expr() {
    if (lex_.peek().kind == Token::not_op) {
      lex_.take();
      return ex_not(not_expr());
    }
    return rel_expr();
  }

  ExprPtr rel_expr() {
    ExprPtr lhs = sum();
    ExOp op;
    switch (lex_.peek().kind) {
      case Token::eq:
      case Token::assign: op = ExOp::eq; break;
      case Token::ne: op = ExOp::ne; break;
      case Token::le: op = ExOp::le; break;
      case Token::lt: op = ExOp::lt; break;
      case Token::ge: op = ExOp::ge; break;
      case Token::gt: op = ExOp::gt; break;
      default: return lhs;
    }
    lex_.take();
    return ex_bin(op, lhs, sum());
  }

  ExprPtr sum() {
    ExprPtr e = product();
    while (lex_.peek().kind == Token::plus || lex_.peek().kind == Token::minus) {
      ExOp op = lex_.take().kind == Token::plus ? ExOp::add : ExOp::sub;
      e = ex_bin(op, e, product());
    }
    return e;
  }

  ExprPtr product() {
    ExprPtr e = unary();
    while (lex_.peek().kind == Token::star || lex_.peek().kind == Token::slash) {
      ExOp op = lex_.take().kind == Token::star ? ExOp::mul : ExOp::div;
      e = ex_bin(op, e, unary());
    }
    return e;
  }

  ExprPtr unary() {
    if (lex_.peek().kind == Token::minus) {
      lex_.take();
      return ex_neg(unary());
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::number) return ex_num(lex_.take().num);
    if (t.kind == Token::lparen) {
      lex_.take();
      ExprPtr e = or_expr();
      expect(Token::rparen, "')'");
      return e;
    }
    if (t.kind == Token::ident) {
      Token id = lex_.take();
      if (id.text == "true") return ex_bool(true);
      if (id.text == "false") return ex_bool(false);
      if (lex_.peek().kind == Token::lparen) {
        ExFn fn;
        if (!builtin_of(id.text, fn))
          raise(Errc::unknown_builtin, std::to_string(id.line) + ":" + std::to_string(id.col) +
                                           ": unknown builtin '" + id.text + "'");
        lex_.take();
        std::vector<ExprPtr> args;
        args.push_back(or_expr());
        while (lex_.peek().kind == Token::comma) {
          lex_.take();
          args.push_back(or_expr());
        }
        expect(Token::rparen, "')'");
        return ex_call(fn, std::move(args));
      }
      return ex_var(id.text);
    }
    lex_.fail("expected an expression");
  }

  // --- name resolution ---------------------------------------------------

  /// Rewrite identifiers after all declarations are known: `dt` becomes
  /// the step constant and enum labels become label literals.
  void resolve_names(ModelIR& m) {
    std::unordered_set<std::string> vars;
    for (const auto& d : m.inputs) vars.insert(d.name);
    for (const auto& d : m.states) vars.insert(d.decl.name);
    for (const auto& o : m.outputs) vars.insert(o.name);
    if (vars.count("dt")) raise(Errc::parse_error, "'dt' is reserved for the step length");

    std::unordered_map<std::string, int> labels;  // label -> index
    auto note_labels = [&](const Kind& k) {
      if (k.tag != KindTag::enumeration) return;
      for (size_t i = 0; i < k.labels.size(); ++i) {
        const std::string& l = k.labels[i];
        if (vars.count(l)) raise(Errc::parse_error, "enum label '" + l + "' clashes with a variable");
        auto [it, fresh] = labels.emplace(l, static_cast<int>(i));
        if (!fresh && it->second != static_cast<int>(i))
          raise(Errc::parse_error, "enum label '" + l + "' reused with a different position");
      }
    };
    for (const auto& d : m.inputs) note_labels(d.kind);
    for (const auto& d : m.states) note_labels(d.decl.kind);

    auto rewrite = [&](auto&& self, const ExprPtr& e) -> ExprPtr {
      if (auto* v = std::get_if<ExVar>(&e->node)) {
        if (v->name == "dt") return ex_num(m.step);
        if (!vars.count(v->name)) {
          auto it = labels.find(v->name);
          if (it != labels.end()) return ex_label(v->name, it->second);
        }
        return e;
      }
      if (auto* n = std::get_if<ExNeg>(&e->node)) return ex_neg(self(self, n->arg));
      if (auto* n = std::get_if<ExNot>(&e->node)) return ex_not(self(self, n->arg));
      if (auto* b = std::get_if<ExBinOp>(&e->node))
        return ex_bin(b->op, self(self, b->lhs), self(self, b->rhs));
      if (auto* c = std::get_if<ExCall>(&e->node)) {
        std::vector<ExprPtr> args;
        for (const auto& a : c->args) args.push_back(self(self, a));
        return ex_call(c->fn, std::move(args));
      }
      return e;
    };
    for (auto& o : m.outputs) o.expr = rewrite(rewrite, o.expr);
    for (auto& u : m.updates) u = rewrite(rewrite, u);
  }

  std::string expect_ident(const char* what) {
    if (lex_.peek().kind != Token::ident) lex_.fail(std::string("expected ") + what);
    return lex_.take().text;
  }

  double signed_number() {
    bool neg = false;
    if (lex_.peek().kind == Token::minus) {
      lex_.take();
      neg = true;
    }
    if (lex_.peek().kind != Token::number) lex_.fail("expected a number");
    double v = lex_.take().num;
    return neg ? -v : v;
  }

  void expect(Token::Kind k, const char* what) {
    if (lex_.peek().kind != k) lex_.fail(std::string("expected ") + what);
    lex_.take();
  }

  void semi() { expect(Token::semi, "';'"); }

  Lexer lex_;
};

}  // namespace model_parse_detail

/// Parse and validate a model from the textual DSL.
inline ModelIR parse_model(const std::string& text) {
  return model_parse_detail::Parser(text).parse();
}

inline ModelIR load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::parse_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace stlf
