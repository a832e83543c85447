#pragma once

// Concrete syntax for process terms.
//
//   process  = term { "|" term }                  (left-associative)
//   term     = "0"
//            | "new" NAME "." term
//            | NAME "(" binder ")" "." term       input
//            | NAME "<" value ">" "." term        output
//            | "(" value value ")"                application
//            | "(" process ")"
//   binder   = NAME | "!" NAME | "#" NAME
//   value    = "*" | NAME | "\" binder "." term | "!" value | "#" value
//            | "(" value ")"
//
// Files may open with `let NAME = <term or value>` definitions; a later
// reference splices the parsed tree verbatim (so a surrounding `new` may
// capture free channels of the definition, which is the intended reading).
// `--` starts a line comment. Parallel composition is not allowed bare in
// prefix continuations or abstraction bodies; parenthesize instead.

#include <fstream>
#include <map>
#include <sstream>

#include "ast.hpp"

namespace softpi {

struct SourcePos {
  int line = 1, col = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string origin, SourcePos pos, const std::string& what)
      : std::runtime_error(origin + ":" + std::to_string(pos.line) + ":" +
                           std::to_string(pos.col) + ": " + what),
        origin_(std::move(origin)),
        pos_(pos) {}
  const std::string& origin() const { return origin_; }
  SourcePos pos() const { return pos_; }

 private:
  std::string origin_;
  SourcePos pos_;
};

namespace detail {

enum class Tok {
  Ident, KwNew, KwLet, Zero, Star, LParen, RParen, LAngle, RAngle,
  Dot, Pipe, Bang, Hash, Lambda, Equals, End
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

inline bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
}

struct Lexer {
  const std::string& src;
  const std::string& origin;
  size_t i = 0;
  SourcePos pos;

  Lexer(const std::string& src_, const std::string& origin_) : src(src_), origin(origin_) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourcePos at = pos;
      if (i >= src.size()) {
        out.push_back({Tok::End, "", at});
        return out;
      }
      char c = src[i];
      if (ident_start(c)) {
        std::string t;
        while (i < src.size() && ident_char(src[i])) t += advance();
        Tok k = t == "new" ? Tok::KwNew : t == "let" ? Tok::KwLet : Tok::Ident;
        out.push_back({k, t, at});
        continue;
      }
      if (c == '0' && (i + 1 >= src.size() || !ident_char(src[i + 1]))) {
        advance();
        out.push_back({Tok::Zero, "0", at});
        continue;
      }
      switch (c) {
        case '*': advance(); out.push_back({Tok::Star, "*", at}); continue;
        case '(': advance(); out.push_back({Tok::LParen, "(", at}); continue;
        case ')': advance(); out.push_back({Tok::RParen, ")", at}); continue;
        case '<': advance(); out.push_back({Tok::LAngle, "<", at}); continue;
        case '>': advance(); out.push_back({Tok::RAngle, ">", at}); continue;
        case '.': advance(); out.push_back({Tok::Dot, ".", at}); continue;
        case '|': advance(); out.push_back({Tok::Pipe, "|", at}); continue;
        case '!': advance(); out.push_back({Tok::Bang, "!", at}); continue;
        case '#': advance(); out.push_back({Tok::Hash, "#", at}); continue;
        case '\\': advance(); out.push_back({Tok::Lambda, "\\", at}); continue;
        case '=': advance(); out.push_back({Tok::Equals, "=", at}); continue;
        default:
          throw ParseError(origin, at, std::string("unexpected character '") + c + "'");
      }
    }
  }

  char advance() {
    char c = src[i++];
    if (c == '\n') { pos.line++; pos.col = 1; } else { pos.col++; }
    return c;
  }

  void skip_space() {
    for (;;) {
      while (i < src.size() && (src[i] == ' ' || src[i] == '\t' || src[i] == '\r' || src[i] == '\n'))
        advance();
      if (i + 1 < src.size() && src[i] == '-' && src[i + 1] == '-') {
        while (i < src.size() && src[i] != '\n') advance();
        continue;
      }
      return;
    }
  }
};

// Internal failure used for backtracking; the deepest failure wins when
// several alternatives are tried.
struct Fail {
  size_t at;
  std::string msg;
};

struct Parser {
  std::vector<Token> toks;
  const std::string& origin;
  size_t i = 0;
  std::map<std::string, ValuePtr> val_defs;
  std::map<std::string, ProcessPtr> proc_defs;
  std::vector<std::string> bound_vars;

  Parser(std::vector<Token> toks_, const std::string& origin_)
      : toks(std::move(toks_)), origin(origin_) {}

  const Token& peek(size_t k = 0) const { return toks[std::min(i + k, toks.size() - 1)]; }
  const Token& next() { return toks[std::min(i++, toks.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const { throw Fail{i, msg}; }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what + ", found '" + show(peek()) + "'");
    next();
  }
  static std::string show(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  bool var_bound(const std::string& n) const {
    for (auto it = bound_vars.rbegin(); it != bound_vars.rend(); ++it)
      if (*it == n) return true;
    return false;
  }

  BinderKind parse_binder(std::string& name) {
    BinderKind k = BinderKind::Linear;
    if (peek().kind == Tok::Bang) { k = BinderKind::Bang; next(); }
    else if (peek().kind == Tok::Hash) { k = BinderKind::Spawn; next(); }
    if (peek().kind != Tok::Ident) fail("expected binder name, found '" + show(peek()) + "'");
    name = next().text;
    return k;
  }

  ValuePtr parse_value() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Star: next(); return unit();
      case Tok::Ident: {
        std::string n = next().text;
        if (!var_bound(n)) {
          auto it = val_defs.find(n);
          if (it != val_defs.end()) return it->second;
          if (proc_defs.count(n)) fail("'" + n + "' names a process, not a value");
        }
        return var(n);
      }
      case Tok::Bang: next(); return box(BoxKind::Bang, parse_value());
      case Tok::Hash: next(); return box(BoxKind::Spawn, parse_value());
      case Tok::Lambda: {
        next();
        std::string n;
        BinderKind k = parse_binder(n);
        expect(Tok::Dot, "'.'");
        bound_vars.push_back(n);
        auto body = parse_term();
        bound_vars.pop_back();
        return abs(k, n, body);
      }
      case Tok::LParen: {
        next();
        auto v = parse_value();
        expect(Tok::RParen, "')'");
        return v;
      }
      default:
        fail("expected a value, found '" + show(t) + "'");
    }
  }

  ProcessPtr parse_term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Zero: next(); return nil();
      case Tok::KwNew: {
        next();
        if (peek().kind != Tok::Ident) fail("expected channel name after 'new'");
        std::string ch = next().text;
        expect(Tok::Dot, "'.'");
        return nu(ch, parse_term());
      }
      case Tok::Ident: {
        std::string n = next().text;
        if (peek().kind == Tok::LParen) {
          next();
          std::string bv;
          BinderKind k = parse_binder(bv);
          expect(Tok::RParen, "')'");
          expect(Tok::Dot, "'.'");
          bound_vars.push_back(bv);
          auto body = parse_term();
          bound_vars.pop_back();
          return input(n, k, bv, body);
        }
        if (peek().kind == Tok::LAngle) {
          next();
          auto v = parse_value();
          expect(Tok::RAngle, "'>'");
          expect(Tok::Dot, "'.'");
          return output(n, v, parse_term());
        }
        if (!var_bound(n)) {
          auto it = proc_defs.find(n);
          if (it != proc_defs.end()) return it->second;
        }
        fail("expected '(' or '<' after channel '" + n + "'");
      }
      case Tok::LParen: {
        next();
        size_t save = i;
        try {
          auto f = parse_value();
          auto a = parse_value();
          expect(Tok::RParen, "')'");
          return app(f, a);
        } catch (const Fail& app_fail) {
          i = save;
          try {
            auto p = parse_process();
            expect(Tok::RParen, "')'");
            return p;
          } catch (const Fail& grp_fail) {
            throw grp_fail.at >= app_fail.at ? grp_fail : app_fail;
          }
        }
      }
      default:
        fail("expected a process, found '" + show(t) + "'");
    }
  }

  ProcessPtr parse_process() {
    auto p = parse_term();
    while (peek().kind == Tok::Pipe) {
      next();
      p = par(p, parse_term());
    }
    return p;
  }

  ProcessPtr parse_program() {
    while (peek().kind == Tok::KwLet) {
      next();
      if (peek().kind != Tok::Ident) fail("expected definition name after 'let'");
      std::string name = next().text;
      expect(Tok::Equals, "'='");
      size_t save = i;
      try {
        auto p = parse_process();
        proc_defs[name] = p;
      } catch (const Fail& proc_fail) {
        i = save;
        try {
          auto v = parse_value();
          val_defs[name] = v;
        } catch (const Fail& val_fail) {
          throw val_fail.at >= proc_fail.at ? val_fail : proc_fail;
        }
      }
    }
    auto main = parse_process();
    if (peek().kind != Tok::End) fail("expected end of input, found '" + show(peek()) + "'");
    return main;
  }

  [[noreturn]] void rethrow(const Fail& f) const {
    throw ParseError(origin, toks[std::min(f.at, toks.size() - 1)].pos, f.msg);
  }
};

}  // namespace detail

// Parses a full program (optional let-definitions followed by one process).
inline ProcessPtr parse_process_text(const std::string& src, const std::string& origin = "<string>") {
  detail::Lexer lex(src, origin);
  detail::Parser p(lex.run(), origin);
  try {
    return p.parse_program();
  } catch (const detail::Fail& f) {
    p.rethrow(f);
  }
}

inline ValuePtr parse_value_text(const std::string& src, const std::string& origin = "<string>") {
  detail::Lexer lex(src, origin);
  detail::Parser p(lex.run(), origin);
  try {
    auto v = p.parse_value();
    if (p.peek().kind != detail::Tok::End)
      p.fail("expected end of input, found '" + detail::Parser::show(p.peek()) + "'");
    return v;
  } catch (const detail::Fail& f) {
    p.rethrow(f);
  }
}

inline ProcessPtr parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, {0, 0}, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_process_text(ss.str(), path);
}

// ---- printing ----------------------------------------------------------

namespace detail {

inline void print_p(const ProcessPtr& p, std::string& out, bool at_par_level);
inline void print_v(const ValuePtr& v, std::string& out);

inline void print_term(const ProcessPtr& p, std::string& out) {
  if (std::holds_alternative<Par>(p->node)) {
    out += '(';
    print_p(p, out, true);
    out += ')';
  } else {
    print_p(p, out, false);
  }
}

inline void print_p(const ProcessPtr& p, std::string& out, bool at_par_level) {
  std::visit(overloaded{[&](const Nil&) { out += '0'; },
                        [&](const Par& n) {
                          print_p(n.left, out, true);
                          out += " | ";
                          print_term(n.right, out);
                        },
                        [&](const Input& n) {
                          out += n.chan;
                          out += '(';
                          if (n.kind == BinderKind::Bang) out += '!';
                          if (n.kind == BinderKind::Spawn) out += '#';
                          out += n.var;
                          out += ").";
                          print_term(n.body, out);
                        },
                        [&](const Output& n) {
                          out += n.chan;
                          out += '<';
                          print_v(n.payload, out);
                          out += ">.";
                          print_term(n.cont, out);
                        },
                        [&](const Restrict& n) {
                          out += "new ";
                          out += n.chan;
                          out += '.';
                          print_term(n.body, out);
                        },
                        [&](const App& n) {
                          out += '(';
                          print_v(n.fun, out);
                          out += ' ';
                          print_v(n.arg, out);
                          out += ')';
                        }},
             p->node);
  (void)at_par_level;
}

inline void print_v(const ValuePtr& v, std::string& out) {
  std::visit(overloaded{[&](const Unit&) { out += '*'; },
                        [&](const Var& n) { out += n.name; },
                        [&](const Abs& n) {
                          out += '\\';
                          if (n.kind == BinderKind::Bang) out += '!';
                          if (n.kind == BinderKind::Spawn) out += '#';
                          out += n.var;
                          out += '.';
                          print_term(n.body, out);
                        },
                        [&](const BoxV& n) {
                          out += n.kind == BoxKind::Bang ? '!' : '#';
                          print_v(n.inner, out);
                        }},
             v->node);
}

}  // namespace detail

inline std::string print_process(const ProcessPtr& p) {
  std::string out;
  detail::print_p(p, out, true);
  return out;
}

inline std::string print_value(const ValuePtr& v) {
  std::string out;
  detail::print_v(v, out);
  return out;
}

}  // namespace softpi
