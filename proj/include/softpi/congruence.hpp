#pragma once

// Structural congruence via canonical forms.
//
// Congruence is generated by alpha conversion, associativity and
// commutativity of parallel composition, reordering of adjacent
// restrictions, and scope extrusion (new a.(P | Q) == (new a.P) | Q when a
// is not free in Q). There is no garbage collection: P | 0 is NOT congruent
// to P, and new a.0 is not congruent to 0.
//
// The canonical form of a process flattens every parallel level into a
// "soup": restrictions are hoisted to the front (their maximal scope),
// threads are sorted, and binders are renamed canonically (_c0, _c1, ...
// for channels, _v0, _v1, ... for variables, in pre-order over the final
// term; restricted names in first-use order). Sorting initially uses
// name-independent keys (bound names rendered as de Bruijn indices, binders
// of the level under inspection rendered as "?"), then naming and sorting
// are iterated until the printed form reaches a fixpoint.
//
// Two processes are congruent iff their canonical keys are equal. Equal
// keys always imply congruence (every transformation used is itself a
// congruence law); completeness is validated empirically by the rewrite
// oracles in the test suite.

#include "parser.hpp"

namespace softpi {

struct CanonicalProcess {
  std::vector<std::string> restricted;  // canonical names of hoisted restrictions
  std::vector<ProcessPtr> soup;         // sorted canonical threads
  ProcessPtr term;                      // new r0...rk.(t0 | t1 | ...)
  std::string key;                      // printed canonical term
};

namespace detail {

struct CanonLevel;

struct CanonValue {
  // mirrors Value: 0 unit, 1 var, 2 abs, 3 box
  int tag = 0;
  std::string name;                      // var
  BinderKind bkind = BinderKind::Linear; // abs
  BoxKind xkind = BoxKind::Bang;         // box
  std::unique_ptr<CanonLevel> body;      // abs
  std::unique_ptr<CanonValue> inner;     // box
};

struct CanonThread {
  // mirrors non-par non-restrict processes: 0 nil, 1 input, 2 output, 3 app
  int tag = 0;
  std::string chan;
  BinderKind kind = BinderKind::Linear;
  std::string var;
  std::unique_ptr<CanonLevel> sub;  // input body / output continuation
  CanonValue payload;               // output payload
  CanonValue fun, arg;              // app
  std::string key;                  // printed key from the last rebuild
};

struct CanonLevel {
  std::vector<std::string> binders;  // temp names of hoisted restrictions
  std::vector<CanonThread> threads;
};

// ---- phase 1: flatten the alpha-uniquified term ------------------------

struct CanonBuilder {
  CanonValue value(const ValuePtr& v) {
    CanonValue out;
    std::visit(overloaded{[&](const Unit&) { out.tag = 0; },
                          [&](const Var& n) {
                            out.tag = 1;
                            out.name = n.name;
                          },
                          [&](const Abs& a) {
                            out.tag = 2;
                            out.bkind = a.kind;
                            out.name = a.var;
                            out.body = std::make_unique<CanonLevel>(level(a.body));
                          },
                          [&](const BoxV& b) {
                            out.tag = 3;
                            out.xkind = b.kind;
                            out.inner = std::make_unique<CanonValue>(value(b.inner));
                          }},
               v->node);
    return out;
  }

  void collect(const ProcessPtr& p, CanonLevel& lv) {
    std::visit(overloaded{[&](const Nil&) {
                            CanonThread t;
                            t.tag = 0;
                            lv.threads.push_back(std::move(t));
                          },
                          [&](const Par& n) {
                            collect(n.left, lv);
                            collect(n.right, lv);
                          },
                          [&](const Input& n) {
                            CanonThread t;
                            t.tag = 1;
                            t.chan = n.chan;
                            t.kind = n.kind;
                            t.var = n.var;
                            t.sub = std::make_unique<CanonLevel>(level(n.body));
                            lv.threads.push_back(std::move(t));
                          },
                          [&](const Output& n) {
                            CanonThread t;
                            t.tag = 2;
                            t.chan = n.chan;
                            t.payload = value(n.payload);
                            t.sub = std::make_unique<CanonLevel>(level(n.cont));
                            lv.threads.push_back(std::move(t));
                          },
                          [&](const Restrict& n) {
                            lv.binders.push_back(n.chan);
                            collect(n.body, lv);
                          },
                          [&](const App& n) {
                            CanonThread t;
                            t.tag = 3;
                            t.fun = value(n.fun);
                            t.arg = value(n.arg);
                            lv.threads.push_back(std::move(t));
                          }},
               p->node);
  }

  CanonLevel level(const ProcessPtr& p) {
    CanonLevel lv;
    collect(p, lv);
    return lv;
  }
};

inline bool is_temp(const std::string& n) { return !n.empty() && n[0] == '%'; }

// First-use order of a level's restriction binders: scan threads in current
// order (pre-order within each thread), then append never-used binders.
struct FirstUse {
  const std::set<std::string>* mine;
  std::vector<std::string> seen;

  void name(const std::string& n) {
    if (!mine->count(n)) return;
    for (const auto& s : seen)
      if (s == n) return;
    seen.push_back(n);
  }
  void value(const CanonValue& v) {
    if (v.tag == 2) level(*v.body);
    else if (v.tag == 3) value(*v.inner);
  }
  void level(const CanonLevel& lv) {
    for (const auto& t : lv.threads) {
      switch (t.tag) {
        case 0: break;
        case 1: name(t.chan); level(*t.sub); break;
        case 2: name(t.chan); value(t.payload); level(*t.sub); break;
        case 3: value(t.fun); value(t.arg); break;
      }
    }
  }
};

inline std::vector<int> first_use_order(const CanonLevel& lv) {
  std::set<std::string> mine(lv.binders.begin(), lv.binders.end());
  FirstUse fu{&mine, {}};
  fu.level(lv);
  std::vector<int> order;
  std::vector<bool> taken(lv.binders.size(), false);
  for (const auto& n : fu.seen)
    for (size_t i = 0; i < lv.binders.size(); ++i)
      if (!taken[i] && lv.binders[i] == n) {
        order.push_back(static_cast<int>(i));
        taken[i] = true;
      }
  for (size_t i = 0; i < lv.binders.size(); ++i)
    if (!taken[i]) order.push_back(static_cast<int>(i));
  return order;
}

// ---- phase 2: initial name-independent sort -----------------------------

// Renders a thread with bound names as de Bruijn indices and names bound
// outside the thread as "?"; used for the first sort, before any canonical
// names exist.
struct DbKey {
  std::vector<std::string> stack;
  std::string out;

  void name(const std::string& n) {
    if (!is_temp(n)) {
      out += n;
      return;
    }
    for (size_t i = stack.size(); i-- > 0;)
      if (stack[i] == n) {
        out += '@';
        out += std::to_string(stack.size() - 1 - i);
        return;
      }
    out += '?';
  }

  void value(const CanonValue& v) {
    switch (v.tag) {
      case 0: out += '*'; break;
      case 1: name(v.name); break;
      case 2:
        out += '\\';
        out += v.bkind == BinderKind::Bang ? "!" : v.bkind == BinderKind::Spawn ? "#" : "";
        out += '.';
        stack.push_back(v.name);
        level(*v.body);
        stack.pop_back();
        break;
      case 3:
        out += v.xkind == BoxKind::Bang ? '!' : '#';
        value(*v.inner);
        break;
    }
  }

  void thread(const CanonThread& t) {
    switch (t.tag) {
      case 0: out += '0'; break;
      case 1:
        name(t.chan);
        out += '(';
        out += t.kind == BinderKind::Bang ? "!" : t.kind == BinderKind::Spawn ? "#" : "";
        out += ").";
        stack.push_back(t.var);
        level(*t.sub);
        stack.pop_back();
        break;
      case 2:
        name(t.chan);
        out += '<';
        value(t.payload);
        out += ">.";
        level(*t.sub);
        break;
      case 3:
        out += '(';
        value(t.fun);
        out += ' ';
        value(t.arg);
        out += ')';
        break;
    }
  }

  void level(const CanonLevel& lv) {
    out += "nu";
    out += std::to_string(lv.binders.size());
    auto order = first_use_order(lv);
    for (int idx : order) stack.push_back(lv.binders[idx]);
    out += '{';
    for (const auto& t : lv.threads) {
      thread(t);
      out += ';';
    }
    out += '}';
    for (size_t i = 0; i < lv.binders.size(); ++i) stack.pop_back();
  }
};

inline void initial_sort(CanonLevel& lv);

inline void initial_sort_value(CanonValue& v) {
  if (v.tag == 2) initial_sort(*v.body);
  else if (v.tag == 3) initial_sort_value(*v.inner);
}

inline void initial_sort(CanonLevel& lv) {
  for (auto& t : lv.threads) {
    switch (t.tag) {
      case 1: initial_sort(*t.sub); break;
      case 2: initial_sort_value(t.payload); initial_sort(*t.sub); break;
      case 3: initial_sort_value(t.fun); initial_sort_value(t.arg); break;
      default: break;
    }
  }
  for (auto& t : lv.threads) {
    DbKey k;
    k.thread(t);
    t.key = std::move(k.out);
  }
  std::stable_sort(lv.threads.begin(), lv.threads.end(),
                   [](const CanonThread& a, const CanonThread& b) { return a.key < b.key; });
}

// ---- phase 3: naming + sorting to a fixpoint -----------------------------

struct Rebuilder {
  std::string vprefix, cprefix;
  int vc = 0, cc = 0;
  std::map<std::string, std::string> names;

  std::string chan_name(const std::string& n) {
    if (!is_temp(n)) return n;
    auto it = names.find(n);
    return it == names.end() ? n : it->second;
  }

  ValuePtr value(CanonValue& v) {
    switch (v.tag) {
      case 0: return unit();
      case 1: {
        if (!is_temp(v.name)) return var(v.name);
        auto it = names.find(v.name);
        return var(it == names.end() ? v.name : it->second);
      }
      case 2: {
        std::string nn = vprefix + std::to_string(vc++);
        names[v.name] = nn;
        return abs(v.bkind, nn, level(*v.body));
      }
      default:
        return box(v.xkind, value(*v.inner));
    }
  }

  ProcessPtr thread(CanonThread& t) {
    switch (t.tag) {
      case 0: return nil();
      case 1: {
        std::string ch = chan_name(t.chan);
        std::string nn = vprefix + std::to_string(vc++);
        names[t.var] = nn;
        return input(ch, t.kind, nn, level(*t.sub));
      }
      case 2: {
        std::string ch = chan_name(t.chan);
        auto pv = value(t.payload);
        return output(ch, pv, level(*t.sub));
      }
      default: {
        auto f = value(t.fun);
        auto a = value(t.arg);
        return app(f, a);
      }
    }
  }

  ProcessPtr level(CanonLevel& lv) {
    auto order = first_use_order(lv);
    std::vector<std::string> canon_binders;
    for (int idx : order) {
      std::string nn = cprefix + std::to_string(cc++);
      names[lv.binders[idx]] = nn;
      canon_binders.push_back(nn);
    }
    ProcessPtr acc;
    for (auto& t : lv.threads) {
      auto pt = thread(t);
      t.key = print_process(pt);
      acc = acc ? par(acc, pt) : pt;
    }
    for (size_t i = canon_binders.size(); i-- > 0;) acc = nu(canon_binders[i], acc);
    return acc;
  }
};

inline bool resort(CanonLevel& lv);

inline bool resort_value(CanonValue& v) {
  if (v.tag == 2) return resort(*v.body);
  if (v.tag == 3) return resort_value(*v.inner);
  return false;
}

inline bool resort(CanonLevel& lv) {
  bool changed = false;
  if (!std::is_sorted(lv.threads.begin(), lv.threads.end(),
                      [](const CanonThread& a, const CanonThread& b) { return a.key < b.key; })) {
    std::stable_sort(lv.threads.begin(), lv.threads.end(),
                     [](const CanonThread& a, const CanonThread& b) { return a.key < b.key; });
    changed = true;
  }
  for (auto& t : lv.threads) {
    switch (t.tag) {
      case 1: changed |= resort(*t.sub); break;
      case 2: changed |= resort_value(t.payload); changed |= resort(*t.sub); break;
      case 3: changed |= resort_value(t.fun); changed |= resort_value(t.arg); break;
      default: break;
    }
  }
  return changed;
}

}  // namespace detail

inline CanonicalProcess canonical_form(const ProcessPtr& p) {
  // unique temp names first so hoisting and sorting never capture
  detail::AlphaCanon uniq;
  uniq.vprefix = "%v";
  uniq.cprefix = "%c";
  ProcessPtr u = uniq.process(p);

  detail::CanonBuilder builder;
  detail::CanonLevel root = builder.level(u);
  detail::initial_sort(root);

  std::set<std::string> free = free_vars(p);
  auto fc = free_channels(p);
  free.insert(fc.begin(), fc.end());
  std::string vprefix = detail::canon_prefix("v", free);
  std::string cprefix = detail::canon_prefix("c", free);

  ProcessPtr term;
  for (int iter = 0; iter < 8; ++iter) {
    detail::Rebuilder rb;
    rb.vprefix = vprefix;
    rb.cprefix = cprefix;
    term = rb.level(root);
    if (!detail::resort(root)) break;
  }

  CanonicalProcess out;
  out.term = term;
  out.key = print_process(term);
  // peel the rebuilt term back into binder list and sorted soup
  ProcessPtr cur = term;
  while (auto* r = std::get_if<Restrict>(&cur->node)) {
    out.restricted.push_back(r->chan);
    cur = r->body;
  }
  std::vector<ProcessPtr> rev;
  for (;;) {
    if (auto* q = std::get_if<Par>(&cur->node)) {
      rev.push_back(q->right);
      cur = q->left;
    } else {
      rev.push_back(cur);
      break;
    }
  }
  out.soup.assign(rev.rbegin(), rev.rend());
  return out;
}

inline bool congruent(const ProcessPtr& a, const ProcessPtr& b) {
  return canonical_form(a).key == canonical_form(b).key;
}

}  // namespace softpi
