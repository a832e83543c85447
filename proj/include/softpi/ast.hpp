#pragma once

// Core term representation for the workbench: higher-order processes that
// communicate values over named channels, plus the value sort (unit,
// variables, abstractions, and boxed values used by the resource-aware
// calculi). Terms are immutable and shared; every operation returns fresh
// structure and never mutates its inputs.

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace softpi {

// Binder discipline attached to inputs and abstractions: Linear binds a
// plain variable, Bang binds a duplicable one (written !x), Spawn binds a
// process-typed one (written #x).
enum class BinderKind { Linear, Bang, Spawn };

// Box constructors on values: !V (duplicable) and #V (spawnable).
enum class BoxKind { Bang, Spawn };

struct Process;
struct Value;
using ProcessPtr = std::shared_ptr<const Process>;
using ValuePtr = std::shared_ptr<const Value>;

struct Nil {};
struct Par {
  ProcessPtr left, right;
};
struct Input {
  std::string chan;
  BinderKind kind;
  std::string var;
  ProcessPtr body;
};
struct Output {
  std::string chan;
  ValuePtr payload;
  ProcessPtr cont;
};
struct Restrict {
  std::string chan;
  ProcessPtr body;
};
struct App {
  ValuePtr fun, arg;
};

struct Unit {};
struct Var {
  std::string name;
};
struct Abs {
  BinderKind kind;
  std::string var;
  ProcessPtr body;
};
struct BoxV {
  BoxKind kind;
  ValuePtr inner;
};

struct Process {
  std::variant<Nil, Par, Input, Output, Restrict, App> node;
};

struct Value {
  std::variant<Unit, Var, Abs, BoxV> node;
};

// ---- constructors ----------------------------------------------------

inline ProcessPtr nil() {
  static const ProcessPtr n = std::make_shared<Process>(Process{Nil{}});
  return n;
}
inline ProcessPtr par(ProcessPtr l, ProcessPtr r) {
  return std::make_shared<Process>(Process{Par{std::move(l), std::move(r)}});
}
inline ProcessPtr input(std::string chan, BinderKind k, std::string var, ProcessPtr body) {
  return std::make_shared<Process>(Process{Input{std::move(chan), k, std::move(var), std::move(body)}});
}
inline ProcessPtr output(std::string chan, ValuePtr v, ProcessPtr cont) {
  return std::make_shared<Process>(Process{Output{std::move(chan), std::move(v), std::move(cont)}});
}
inline ProcessPtr nu(std::string chan, ProcessPtr body) {
  return std::make_shared<Process>(Process{Restrict{std::move(chan), std::move(body)}});
}
inline ProcessPtr app(ValuePtr f, ValuePtr a) {
  return std::make_shared<Process>(Process{App{std::move(f), std::move(a)}});
}

inline ValuePtr unit() {
  static const ValuePtr u = std::make_shared<Value>(Value{Unit{}});
  return u;
}
inline ValuePtr var(std::string name) {
  return std::make_shared<Value>(Value{Var{std::move(name)}});
}
inline ValuePtr abs(BinderKind k, std::string var, ProcessPtr body) {
  return std::make_shared<Value>(Value{Abs{k, std::move(var), std::move(body)}});
}
inline ValuePtr box(BoxKind k, ValuePtr inner) {
  return std::make_shared<Value>(Value{BoxV{k, std::move(inner)}});
}

namespace detail {
template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace detail

// ---- structural equality ---------------------------------------------

bool equal(const ProcessPtr& a, const ProcessPtr& b);
bool equal(const ValuePtr& a, const ValuePtr& b);

inline bool equal(const ValuePtr& a, const ValuePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      detail::overloaded{
          [&](const Unit&) { return true; },
          [&](const Var& v) { return v.name == std::get<Var>(b->node).name; },
          [&](const Abs& v) {
            const auto& w = std::get<Abs>(b->node);
            return v.kind == w.kind && v.var == w.var && equal(v.body, w.body);
          },
          [&](const BoxV& v) {
            const auto& w = std::get<BoxV>(b->node);
            return v.kind == w.kind && equal(v.inner, w.inner);
          }},
      a->node);
}

inline bool equal(const ProcessPtr& a, const ProcessPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      detail::overloaded{
          [&](const Nil&) { return true; },
          [&](const Par& p) {
            const auto& q = std::get<Par>(b->node);
            return equal(p.left, q.left) && equal(p.right, q.right);
          },
          [&](const Input& p) {
            const auto& q = std::get<Input>(b->node);
            return p.chan == q.chan && p.kind == q.kind && p.var == q.var && equal(p.body, q.body);
          },
          [&](const Output& p) {
            const auto& q = std::get<Output>(b->node);
            return p.chan == q.chan && equal(p.payload, q.payload) && equal(p.cont, q.cont);
          },
          [&](const Restrict& p) {
            const auto& q = std::get<Restrict>(b->node);
            return p.chan == q.chan && equal(p.body, q.body);
          },
          [&](const App& p) {
            const auto& q = std::get<App>(b->node);
            return equal(p.fun, q.fun) && equal(p.arg, q.arg);
          }},
      a->node);
}

// ---- free names --------------------------------------------------------

namespace detail {

inline void free_vars_p(const ProcessPtr& p, std::set<std::string>& bound, std::set<std::string>& out);

inline void free_vars_v(const ValuePtr& v, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{[&](const Unit&) {},
                        [&](const Var& x) {
                          if (!bound.count(x.name)) out.insert(x.name);
                        },
                        [&](const Abs& a) {
                          bool fresh = bound.insert(a.var).second;
                          free_vars_p(a.body, bound, out);
                          if (fresh) bound.erase(a.var);
                        },
                        [&](const BoxV& b) { free_vars_v(b.inner, bound, out); }},
             v->node);
}

inline void free_vars_p(const ProcessPtr& p, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{[&](const Nil&) {},
                        [&](const Par& n) {
                          free_vars_p(n.left, bound, out);
                          free_vars_p(n.right, bound, out);
                        },
                        [&](const Input& n) {
                          bool fresh = bound.insert(n.var).second;
                          free_vars_p(n.body, bound, out);
                          if (fresh) bound.erase(n.var);
                        },
                        [&](const Output& n) {
                          free_vars_v(n.payload, bound, out);
                          free_vars_p(n.cont, bound, out);
                        },
                        [&](const Restrict& n) { free_vars_p(n.body, bound, out); },
                        [&](const App& n) {
                          free_vars_v(n.fun, bound, out);
                          free_vars_v(n.arg, bound, out);
                        }},
             p->node);
}

inline void free_chans_p(const ProcessPtr& p, std::set<std::string>& bound, std::set<std::string>& out);

inline void free_chans_v(const ValuePtr& v, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{[&](const Unit&) {}, [&](const Var&) {},
                        [&](const Abs& a) { free_chans_p(a.body, bound, out); },
                        [&](const BoxV& b) { free_chans_v(b.inner, bound, out); }},
             v->node);
}

inline void free_chans_p(const ProcessPtr& p, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{[&](const Nil&) {},
                        [&](const Par& n) {
                          free_chans_p(n.left, bound, out);
                          free_chans_p(n.right, bound, out);
                        },
                        [&](const Input& n) {
                          if (!bound.count(n.chan)) out.insert(n.chan);
                          free_chans_p(n.body, bound, out);
                        },
                        [&](const Output& n) {
                          if (!bound.count(n.chan)) out.insert(n.chan);
                          free_chans_v(n.payload, bound, out);
                          free_chans_p(n.cont, bound, out);
                        },
                        [&](const Restrict& n) {
                          bool fresh = bound.insert(n.chan).second;
                          free_chans_p(n.body, bound, out);
                          if (fresh) bound.erase(n.chan);
                        },
                        [&](const App& n) {
                          free_chans_v(n.fun, bound, out);
                          free_chans_v(n.arg, bound, out);
                        }},
             p->node);
}

}  // namespace detail

inline std::set<std::string> free_vars(const ProcessPtr& p) {
  std::set<std::string> bound, out;
  detail::free_vars_p(p, bound, out);
  return out;
}
inline std::set<std::string> free_vars(const ValuePtr& v) {
  std::set<std::string> bound, out;
  detail::free_vars_v(v, bound, out);
  return out;
}
inline std::set<std::string> free_channels(const ProcessPtr& p) {
  std::set<std::string> bound, out;
  detail::free_chans_p(p, bound, out);
  return out;
}
inline std::set<std::string> free_channels(const ValuePtr& v) {
  std::set<std::string> bound, out;
  detail::free_chans_v(v, bound, out);
  return out;
}

// ---- occurrence counting and descriptors -------------------------------

// Where a free occurrence of a variable sits relative to a reference term:
// how many ! boxes and # boxes enclose it, and whether some enclosing input
// listens on a channel from the given input-channel set (restriction-aware).
struct OccurrenceDescriptor {
  int bang_depth = 0;
  int spawn_depth = 0;
  bool under_ic_input = false;
};

namespace detail {

struct OccWalk {
  const std::string& x;
  const std::set<std::string>* ic;
  std::vector<OccurrenceDescriptor>* out;
  int bang = 0, spawn = 0, under_ic = 0;
  std::set<std::string> shadowed_ic;  // restriction-bound names from ic

  OccWalk(const std::string& x_, const std::set<std::string>* ic_,
          std::vector<OccurrenceDescriptor>* out_)
      : x(x_), ic(ic_), out(out_) {}

  bool ic_live(const std::string& chan) const {
    return ic && ic->count(chan) && !shadowed_ic.count(chan);
  }

  void value(const ValuePtr& v) {
    std::visit(overloaded{[&](const Unit&) {},
                          [&](const Var& n) {
                            if (n.name == x)
                              out->push_back({bang, spawn, under_ic > 0});
                          },
                          [&](const Abs& a) {
                            if (a.var != x) process(a.body);
                          },
                          [&](const BoxV& b) {
                            if (b.kind == BoxKind::Bang) ++bang; else ++spawn;
                            value(b.inner);
                            if (b.kind == BoxKind::Bang) --bang; else --spawn;
                          }},
               v->node);
  }

  void process(const ProcessPtr& p) {
    std::visit(overloaded{[&](const Nil&) {},
                          [&](const Par& n) { process(n.left); process(n.right); },
                          [&](const Input& n) {
                            if (n.var == x) return;
                            bool live = ic_live(n.chan);
                            if (live) ++under_ic;
                            process(n.body);
                            if (live) --under_ic;
                          },
                          [&](const Output& n) { value(n.payload); process(n.cont); },
                          [&](const Restrict& n) {
                            bool added = ic && ic->count(n.chan) && shadowed_ic.insert(n.chan).second;
                            process(n.body);
                            if (added) shadowed_ic.erase(n.chan);
                          },
                          [&](const App& n) { value(n.fun); value(n.arg); }},
               p->node);
  }
};

}  // namespace detail

template <class TermPtr>
std::vector<OccurrenceDescriptor> occurrences(const std::string& x, const TermPtr& t,
                                              const std::set<std::string>* ic = nullptr) {
  std::vector<OccurrenceDescriptor> out;
  detail::OccWalk w(x, ic, &out);
  if constexpr (std::is_same_v<TermPtr, ProcessPtr>) w.process(t);
  else w.value(t);
  return out;
}

// Number of free occurrences of x in t.
template <class TermPtr>
int nfo(const std::string& x, const TermPtr& t) {
  return static_cast<int>(occurrences(x, t).size());
}

// ---- substitution -------------------------------------------------------

namespace detail {

inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string c = base + "_" + std::to_string(i);
    if (!avoid.count(c)) return c;
  }
}

struct Subst {
  const std::string& x;
  const ValuePtr& v;
  std::set<std::string> v_vars;
  std::set<std::string> v_chans;

  // Renames the bound variable of a binder when it would capture a free
  // variable of the payload.
  ProcessPtr rename_var_in(const ProcessPtr& body, const std::string& from, const std::string& to);

  ValuePtr value(const ValuePtr& t) {
    return std::visit(
        overloaded{[&](const Unit&) { return t; },
                   [&](const Var& n) { return n.name == x ? v : t; },
                   [&](const Abs& a) {
                     if (a.var == x) return t;
                     std::string bv = a.var;
                     ProcessPtr body = a.body;
                     if (v_vars.count(bv) && nfo(x, body) > 0) {
                       auto avoid = free_vars(body);
                       avoid.insert(v_vars.begin(), v_vars.end());
                       avoid.insert(x);
                       std::string nb = fresh_name(bv, avoid);
                       body = rename_var_in(body, bv, nb);
                       bv = nb;
                     }
                     auto nb = process(body);
                     if (nb.get() == a.body.get() && bv == a.var) return t;
                     return abs(a.kind, bv, nb);
                   },
                   [&](const BoxV& b) {
                     auto ni = value(b.inner);
                     return ni.get() == b.inner.get() ? t : box(b.kind, ni);
                   }},
        t->node);
  }

  ProcessPtr process(const ProcessPtr& t) {
    return std::visit(
        overloaded{[&](const Nil&) { return t; },
                   [&](const Par& n) {
                     auto l = process(n.left), r = process(n.right);
                     if (l.get() == n.left.get() && r.get() == n.right.get()) return t;
                     return par(l, r);
                   },
                   [&](const Input& n) {
                     if (n.var == x) return t;
                     std::string bv = n.var;
                     ProcessPtr body = n.body;
                     if (v_vars.count(bv) && nfo(x, body) > 0) {
                       auto avoid = free_vars(body);
                       avoid.insert(v_vars.begin(), v_vars.end());
                       avoid.insert(x);
                       std::string nb = fresh_name(bv, avoid);
                       body = rename_var_in(body, bv, nb);
                       bv = nb;
                     }
                     auto nb = process(body);
                     if (nb.get() == n.body.get() && bv == n.var) return t;
                     return input(n.chan, n.kind, bv, nb);
                   },
                   [&](const Output& n) {
                     auto np = value(n.payload);
                     auto nc = process(n.cont);
                     if (np.get() == n.payload.get() && nc.get() == n.cont.get()) return t;
                     return output(n.chan, np, nc);
                   },
                   [&](const Restrict& n) {
                     std::string bc = n.chan;
                     ProcessPtr body = n.body;
                     if (v_chans.count(bc) && nfo(x, body) > 0) {
                       auto avoid = free_channels(body);
                       avoid.insert(v_chans.begin(), v_chans.end());
                       std::string nc = fresh_name(bc, avoid);
                       body = rename_chan_in(body, bc, nc);
                       bc = nc;
                     }
                     auto nb = process(body);
                     if (nb.get() == n.body.get() && bc == n.chan) return t;
                     return nu(bc, nb);
                   },
                   [&](const App& n) {
                     auto f = value(n.fun), a = value(n.arg);
                     if (f.get() == n.fun.get() && a.get() == n.arg.get()) return t;
                     return app(f, a);
                   }},
        t->node);
  }

  ProcessPtr rename_chan_in(const ProcessPtr& body, const std::string& from, const std::string& to);
};

// Capture-free renaming of a free variable `from` to a name `to` that is
// fresh for the body; used only by Subst with a verified-fresh target.
inline ProcessPtr rename_var(const ProcessPtr& t, const std::string& from, const std::string& to);
inline ValuePtr rename_var(const ValuePtr& t, const std::string& from, const std::string& to) {
  return std::visit(
      overloaded{[&](const Unit&) { return t; },
                 [&](const Var& n) { return n.name == from ? var(to) : t; },
                 [&](const Abs& a) {
                   if (a.var == from) return t;
                   auto nb = rename_var(a.body, from, to);
                   return nb.get() == a.body.get() ? t : abs(a.kind, a.var, nb);
                 },
                 [&](const BoxV& b) {
                   auto ni = rename_var(b.inner, from, to);
                   return ni.get() == b.inner.get() ? t : box(b.kind, ni);
                 }},
      t->node);
}
inline ProcessPtr rename_var(const ProcessPtr& t, const std::string& from, const std::string& to) {
  return std::visit(
      overloaded{[&](const Nil&) { return t; },
                 [&](const Par& n) {
                   auto l = rename_var(n.left, from, to), r = rename_var(n.right, from, to);
                   if (l.get() == n.left.get() && r.get() == n.right.get()) return t;
                   return par(l, r);
                 },
                 [&](const Input& n) {
                   if (n.var == from) return t;
                   auto nb = rename_var(n.body, from, to);
                   return nb.get() == n.body.get() ? t : input(n.chan, n.kind, n.var, nb);
                 },
                 [&](const Output& n) {
                   auto np = rename_var(n.payload, from, to);
                   auto nc = rename_var(n.cont, from, to);
                   if (np.get() == n.payload.get() && nc.get() == n.cont.get()) return t;
                   return output(n.chan, np, nc);
                 },
                 [&](const Restrict& n) {
                   auto nb = rename_var(n.body, from, to);
                   return nb.get() == n.body.get() ? t : nu(n.chan, nb);
                 },
                 [&](const App& n) {
                   auto f = rename_var(n.fun, from, to), a = rename_var(n.arg, from, to);
                   if (f.get() == n.fun.get() && a.get() == n.arg.get()) return t;
                   return app(f, a);
                 }},
      t->node);
}

inline ProcessPtr rename_chan(const ProcessPtr& t, const std::string& from, const std::string& to);
inline ValuePtr rename_chan(const ValuePtr& t, const std::string& from, const std::string& to) {
  return std::visit(
      overloaded{[&](const Unit&) { return t; }, [&](const Var&) { return t; },
                 [&](const Abs& a) {
                   auto nb = rename_chan(a.body, from, to);
                   return nb.get() == a.body.get() ? t : abs(a.kind, a.var, nb);
                 },
                 [&](const BoxV& b) {
                   auto ni = rename_chan(b.inner, from, to);
                   return ni.get() == b.inner.get() ? t : box(b.kind, ni);
                 }},
      t->node);
}
inline ProcessPtr rename_chan(const ProcessPtr& t, const std::string& from, const std::string& to) {
  return std::visit(
      overloaded{[&](const Nil&) { return t; },
                 [&](const Par& n) {
                   auto l = rename_chan(n.left, from, to), r = rename_chan(n.right, from, to);
                   if (l.get() == n.left.get() && r.get() == n.right.get()) return t;
                   return par(l, r);
                 },
                 [&](const Input& n) {
                   auto nb = rename_chan(n.body, from, to);
                   std::string ch = n.chan == from ? to : n.chan;
                   if (nb.get() == n.body.get() && ch == n.chan) return t;
                   return input(ch, n.kind, n.var, nb);
                 },
                 [&](const Output& n) {
                   auto np = rename_chan(n.payload, from, to);
                   auto nc = rename_chan(n.cont, from, to);
                   std::string ch = n.chan == from ? to : n.chan;
                   if (np.get() == n.payload.get() && nc.get() == n.cont.get() && ch == n.chan) return t;
                   return output(ch, np, nc);
                 },
                 [&](const Restrict& n) {
                   if (n.chan == from) return t;
                   auto nb = rename_chan(n.body, from, to);
                   return nb.get() == n.body.get() ? t : nu(n.chan, nb);
                 },
                 [&](const App& n) {
                   auto f = rename_chan(n.fun, from, to), a = rename_chan(n.arg, from, to);
                   if (f.get() == n.fun.get() && a.get() == n.arg.get()) return t;
                   return app(f, a);
                 }},
      t->node);
}

inline ProcessPtr Subst::rename_var_in(const ProcessPtr& body, const std::string& from,
                                       const std::string& to) {
  return rename_var(body, from, to);
}
inline ProcessPtr Subst::rename_chan_in(const ProcessPtr& body, const std::string& from,
                                        const std::string& to) {
  return rename_chan(body, from, to);
}

}  // namespace detail

// t{v/x}: capture-avoiding substitution of value v for variable x.
inline ProcessPtr substitute(const ProcessPtr& t, const std::string& x, const ValuePtr& v) {
  detail::Subst s{x, v, free_vars(v), free_channels(v)};
  return s.process(t);
}
inline ValuePtr substitute(const ValuePtr& t, const std::string& x, const ValuePtr& v) {
  detail::Subst s{x, v, free_vars(v), free_channels(v)};
  return s.value(t);
}

// ---- alpha canonicalization ---------------------------------------------

namespace detail {

struct AlphaCanon {
  std::string vprefix, cprefix;
  int vcount = 0, ccount = 0;
  std::vector<std::pair<std::string, std::string>> venv, cenv;  // binder stacks

  const std::string* lookup(const std::vector<std::pair<std::string, std::string>>& env,
                            const std::string& n) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == n) return &it->second;
    return nullptr;
  }

  ValuePtr value(const ValuePtr& t) {
    return std::visit(
        overloaded{[&](const Unit&) { return t; },
                   [&](const Var& n) {
                     const std::string* r = lookup(venv, n.name);
                     return r ? var(*r) : t;
                   },
                   [&](const Abs& a) {
                     std::string nn = vprefix + std::to_string(vcount++);
                     venv.emplace_back(a.var, nn);
                     auto body = process(a.body);
                     venv.pop_back();
                     return abs(a.kind, nn, body);
                   },
                   [&](const BoxV& b) { return box(b.kind, value(b.inner)); }},
        t->node);
  }

  ProcessPtr process(const ProcessPtr& t) {
    return std::visit(
        overloaded{[&](const Nil&) { return t; },
                   [&](const Par& n) {
                     auto l = process(n.left);
                     auto r = process(n.right);
                     return par(l, r);
                   },
                   [&](const Input& n) {
                     const std::string* c = lookup(cenv, n.chan);
                     std::string ch = c ? *c : n.chan;
                     std::string nn = vprefix + std::to_string(vcount++);
                     venv.emplace_back(n.var, nn);
                     auto body = process(n.body);
                     venv.pop_back();
                     return input(ch, n.kind, nn, body);
                   },
                   [&](const Output& n) {
                     const std::string* c = lookup(cenv, n.chan);
                     std::string ch = c ? *c : n.chan;
                     auto pv = value(n.payload);
                     return output(ch, pv, process(n.cont));
                   },
                   [&](const Restrict& n) {
                     std::string nn = cprefix + std::to_string(ccount++);
                     cenv.emplace_back(n.chan, nn);
                     auto body = process(n.body);
                     cenv.pop_back();
                     return nu(nn, body);
                   },
                   [&](const App& n) {
                     auto f = value(n.fun);
                     return app(f, value(n.arg));
                   }},
        t->node);
  }
};

inline std::string canon_prefix(const char* base, const std::set<std::string>& free) {
  std::string p = std::string("_") + base;
  for (;;) {
    bool clash = false;
    for (const auto& f : free)
      if (f.rfind(p, 0) == 0) { clash = true; break; }
    if (!clash) return p;
    p = "_" + p;
  }
}

}  // namespace detail

// Renames every binder to a position-indexed canonical name (_v0, _v1, ...
// for variables; _c0, _c1, ... for restricted channels, pre-order,
// left-to-right). Free names are untouched; the prefix grows as needed so
// canonical names never collide with free ones.
template <class TermPtr>
TermPtr alpha_canonicalize(const TermPtr& t) {
  detail::AlphaCanon ac;
  std::set<std::string> free = free_vars(t);
  auto fc = free_channels(t);
  free.insert(fc.begin(), fc.end());
  ac.vprefix = detail::canon_prefix("v", free);
  ac.cprefix = detail::canon_prefix("c", free);
  if constexpr (std::is_same_v<TermPtr, ProcessPtr>) return ac.process(t);
  else return ac.value(t);
}

template <class TermPtr>
bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  return equal(alpha_canonicalize(a), alpha_canonicalize(b));
}

}  // namespace softpi
