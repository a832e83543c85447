#pragma once

// Resource metrics on terms.
//
// size        AST node count, printer-independent.
// box_depth   deepest nesting of value boxes (! and # combined).
// dup_factor  the duplication potential: for each binder, how many times its
//             variable occurs free in the body; dup_factor is the maximum of
//             those counts and of 1.
// weight_param(t, n)
//             size-like measure where every node under k boxes counts n^k
//             instead of 1; equivalently, boxed content is priced n times.
//             weight_param(t, 1) == size(t).
// weight(t)   weight_param(t, dup_factor(t)).
// webi        weight_param that ignores everything guarded by an input on a
//             designated input channel (restriction-aware).
// pgr         spawn potential: the weight that # boxes can still release;
//             !V scales by n, #V additionally deposits n * weight(V), and
//             input-channel-guarded content counts 0.
// poly_bound  size(t) raised to box_depth(t) + 1, as a big integer.
//
// weight/webi/pgr are computed in checked 64-bit arithmetic and throw
// MetricOverflow if a value would not fit; poly_bound uses big integers.

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

#include "ast.hpp"

namespace softpi {

using BigInt = boost::multiprecision::cpp_int;

class MetricOverflow : public std::overflow_error {
 public:
  MetricOverflow() : std::overflow_error("metric exceeds 64-bit range") {}
};

namespace detail {

inline uint64_t add_ck(uint64_t a, uint64_t b) {
  uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw MetricOverflow();
  return r;
}
inline uint64_t mul_ck(uint64_t a, uint64_t b) {
  uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw MetricOverflow();
  return r;
}

}  // namespace detail

// ---- size ----------------------------------------------------------------

inline uint64_t size(const ProcessPtr& p);
inline uint64_t size(const ValuePtr& v) {
  return std::visit(
      detail::overloaded{[](const Unit&) -> uint64_t { return 1; },
                         [](const Var&) -> uint64_t { return 1; },
                         [](const Abs& a) { return detail::add_ck(1, size(a.body)); },
                         [](const BoxV& b) { return detail::add_ck(1, size(b.inner)); }},
      v->node);
}
inline uint64_t size(const ProcessPtr& p) {
  return std::visit(
      detail::overloaded{
          [](const Nil&) -> uint64_t { return 1; },
          [](const Par& n) { return detail::add_ck(1, detail::add_ck(size(n.left), size(n.right))); },
          [](const Input& n) { return detail::add_ck(1, size(n.body)); },
          [](const Output& n) { return detail::add_ck(1, detail::add_ck(size(n.payload), size(n.cont))); },
          [](const Restrict& n) { return detail::add_ck(1, size(n.body)); },
          [](const App& n) { return detail::add_ck(1, detail::add_ck(size(n.fun), size(n.arg))); }},
      p->node);
}

// ---- box depth -------------------------------------------------------------

inline int box_depth(const ProcessPtr& p);
inline int box_depth(const ValuePtr& v) {
  return std::visit(detail::overloaded{[](const Unit&) { return 0; }, [](const Var&) { return 0; },
                                       [](const Abs& a) { return box_depth(a.body); },
                                       [](const BoxV& b) { return 1 + box_depth(b.inner); }},
                    v->node);
}
inline int box_depth(const ProcessPtr& p) {
  return std::visit(
      detail::overloaded{[](const Nil&) { return 0; },
                         [](const Par& n) { return std::max(box_depth(n.left), box_depth(n.right)); },
                         [](const Input& n) { return box_depth(n.body); },
                         [](const Output& n) { return std::max(box_depth(n.payload), box_depth(n.cont)); },
                         [](const Restrict& n) { return box_depth(n.body); },
                         [](const App& n) { return std::max(box_depth(n.fun), box_depth(n.arg)); }},
      p->node);
}

// ---- duplication factor ----------------------------------------------------

inline int dup_factor(const ProcessPtr& p);
inline int dup_factor(const ValuePtr& v) {
  return std::visit(
      detail::overloaded{[](const Unit&) { return 1; }, [](const Var&) { return 1; },
                         [](const Abs& a) { return std::max(dup_factor(a.body), nfo(a.var, a.body)); },
                         [](const BoxV& b) { return dup_factor(b.inner); }},
      v->node);
}
inline int dup_factor(const ProcessPtr& p) {
  return std::visit(
      detail::overloaded{[](const Nil&) { return 1; },
                         [](const Par& n) { return std::max(dup_factor(n.left), dup_factor(n.right)); },
                         [](const Input& n) { return std::max(dup_factor(n.body), nfo(n.var, n.body)); },
                         [](const Output& n) { return std::max(dup_factor(n.payload), dup_factor(n.cont)); },
                         [](const Restrict& n) { return dup_factor(n.body); },
                         [](const App& n) { return std::max(dup_factor(n.fun), dup_factor(n.arg)); }},
      p->node);
}

// ---- parametric weight -------------------------------------------------------

inline uint64_t weight_param(const ProcessPtr& p, uint64_t n);
inline uint64_t weight_param(const ValuePtr& v, uint64_t n) {
  return std::visit(
      detail::overloaded{
          [](const Unit&) -> uint64_t { return 1; },
          [](const Var&) -> uint64_t { return 1; },
          [&](const Abs& a) { return detail::add_ck(1, weight_param(a.body, n)); },
          [&](const BoxV& b) { return detail::add_ck(1, detail::mul_ck(n, weight_param(b.inner, n))); }},
      v->node);
}
inline uint64_t weight_param(const ProcessPtr& p, uint64_t n) {
  return std::visit(
      detail::overloaded{
          [](const Nil&) -> uint64_t { return 1; },
          [&](const Par& q) {
            return detail::add_ck(1, detail::add_ck(weight_param(q.left, n), weight_param(q.right, n)));
          },
          [&](const Input& q) { return detail::add_ck(1, weight_param(q.body, n)); },
          [&](const Output& q) {
            return detail::add_ck(1, detail::add_ck(weight_param(q.payload, n), weight_param(q.cont, n)));
          },
          [&](const Restrict& q) { return detail::add_ck(1, weight_param(q.body, n)); },
          [&](const App& q) {
            return detail::add_ck(1, detail::add_ck(weight_param(q.fun, n), weight_param(q.arg, n)));
          }},
      p->node);
}

template <class TermPtr>
uint64_t weight(const TermPtr& t) {
  return weight_param(t, static_cast<uint64_t>(dup_factor(t)));
}

// ---- weight with erased input-channel content (webi) ------------------------

namespace detail {

struct Webi {
  const std::set<std::string>& ic;
  uint64_t n;
  std::set<std::string> shadowed;

  Webi(const std::set<std::string>& ic_, uint64_t n_) : ic(ic_), n(n_) {}
  bool live(const std::string& chan) const { return ic.count(chan) && !shadowed.count(chan); }

  uint64_t value(const ValuePtr& v) {
    return std::visit(
        overloaded{[](const Unit&) -> uint64_t { return 1; },
                   [](const Var&) -> uint64_t { return 1; },
                   [&](const Abs& a) { return add_ck(1, process(a.body)); },
                   [&](const BoxV& b) { return add_ck(1, mul_ck(n, value(b.inner))); }},
        v->node);
  }

  uint64_t process(const ProcessPtr& p) {
    return std::visit(
        overloaded{[](const Nil&) -> uint64_t { return 1; },
                   [&](const Par& q) { return add_ck(1, add_ck(process(q.left), process(q.right))); },
                   [&](const Input& q) -> uint64_t {
                     if (live(q.chan)) return 0;
                     return add_ck(1, process(q.body));
                   },
                   [&](const Output& q) { return add_ck(1, add_ck(value(q.payload), process(q.cont))); },
                   [&](const Restrict& q) {
                     bool added = ic.count(q.chan) && shadowed.insert(q.chan).second;
                     uint64_t r = add_ck(1, process(q.body));
                     if (added) shadowed.erase(q.chan);
                     return r;
                   },
                   [&](const App& q) { return add_ck(1, add_ck(value(q.fun), value(q.arg))); }},
        p->node);
  }
};

struct Pgr {
  const std::set<std::string>& ic;
  uint64_t n;
  std::set<std::string> shadowed;

  Pgr(const std::set<std::string>& ic_, uint64_t n_) : ic(ic_), n(n_) {}
  bool live(const std::string& chan) const { return ic.count(chan) && !shadowed.count(chan); }

  uint64_t value(const ValuePtr& v) {
    return std::visit(
        overloaded{[](const Unit&) -> uint64_t { return 0; },
                   [](const Var&) -> uint64_t { return 0; },
                   [&](const Abs& a) { return process(a.body); },
                   [&](const BoxV& b) {
                     uint64_t inner = mul_ck(n, value(b.inner));
                     if (b.kind == BoxKind::Spawn)
                       inner = add_ck(inner, mul_ck(n, weight_param(b.inner, n)));
                     return inner;
                   }},
        v->node);
  }

  uint64_t process(const ProcessPtr& p) {
    return std::visit(
        overloaded{[](const Nil&) -> uint64_t { return 0; },
                   [&](const Par& q) { return add_ck(process(q.left), process(q.right)); },
                   [&](const Input& q) -> uint64_t {
                     if (live(q.chan)) return 0;
                     return process(q.body);
                   },
                   [&](const Output& q) { return add_ck(value(q.payload), process(q.cont)); },
                   [&](const Restrict& q) {
                     bool added = ic.count(q.chan) && shadowed.insert(q.chan).second;
                     uint64_t r = process(q.body);
                     if (added) shadowed.erase(q.chan);
                     return r;
                   },
                   [&](const App& q) { return add_ck(value(q.fun), value(q.arg)); }},
        p->node);
  }
};

}  // namespace detail

template <class TermPtr>
uint64_t webi_param(const TermPtr& t, uint64_t n, const std::set<std::string>& ic) {
  detail::Webi w(ic, n);
  if constexpr (std::is_same_v<TermPtr, ProcessPtr>) return w.process(t);
  else return w.value(t);
}

template <class TermPtr>
uint64_t webi(const TermPtr& t, const std::set<std::string>& ic) {
  return webi_param(t, static_cast<uint64_t>(dup_factor(t)), ic);
}

template <class TermPtr>
uint64_t pgr_param(const TermPtr& t, uint64_t n, const std::set<std::string>& ic) {
  detail::Pgr w(ic, n);
  if constexpr (std::is_same_v<TermPtr, ProcessPtr>) return w.process(t);
  else return w.value(t);
}

template <class TermPtr>
uint64_t pgr(const TermPtr& t, const std::set<std::string>& ic) {
  return pgr_param(t, static_cast<uint64_t>(dup_factor(t)), ic);
}

// ---- polynomial bound --------------------------------------------------------

template <class TermPtr>
BigInt poly_bound(const TermPtr& t) {
  BigInt s = size(t);
  return boost::multiprecision::pow(s, static_cast<unsigned>(box_depth(t) + 1));
}

// ---- snapshot ------------------------------------------------------------------

struct MetricsSnapshot {
  uint64_t size = 0;
  int bd = 0;
  int df = 1;
  uint64_t wei = 0;
  std::optional<uint64_t> webi;
  std::optional<uint64_t> pgr;
  BigInt poly_bound;
};

// The input-channel set is optional: webi and pgr are only meaningful when
// one is in force.
inline MetricsSnapshot measure(const ProcessPtr& p, const std::optional<std::set<std::string>>& ic = {}) {
  MetricsSnapshot m;
  m.size = size(p);
  m.bd = box_depth(p);
  m.df = dup_factor(p);
  m.wei = weight(p);
  m.poly_bound = poly_bound(p);
  if (ic) {
    m.webi = webi(p, *ic);
    m.pgr = pgr(p, *ic);
  }
  return m;
}

}  // namespace softpi
