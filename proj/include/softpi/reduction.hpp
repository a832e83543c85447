#pragma once

// Reduction semantics over canonical soups.
//
// All interaction happens between top-level threads of the canonical form
// (nothing reduces under a prefix, inside a box, or inside an abstraction
// body):
//
//   a<V>.P | a(x).Q    ->  P | Q{V/x}      any payload
//   a<!V>.P | a(!x).Q  ->  P | Q{V/x}      boxed payload, box opened
//   a<#V>.P | a(#x).Q  ->  P | Q{V/x}
//   (\x.P V)           ->  P{V/x}
//   (\!x.P !V)         ->  P{V/x}
//   (\#x.P #V)         ->  P{V/x}
//
// Kind-mismatched pairs (say, a plain payload at a ! input) are not redexes;
// such states are simply stuck. When a communication fires and the output
// continuation is syntactically 0, the dead thread is elided so that a
// process like the replicating OMEGA returns to itself exactly; all other
// nil threads are kept verbatim (there is no garbage collection law).
//
// Reduction is closed under congruence by construction: redexes are located
// in the canonical soup, so congruent processes have the same redexes.

#include <functional>
#include <random>

#include "congruence.hpp"

namespace softpi {

enum class RedexKind { CommLinear, CommBang, CommSpawn, AppLinear, AppBang, AppSpawn };

inline const char* to_string(RedexKind k) {
  switch (k) {
    case RedexKind::CommLinear: return "comm-linear";
    case RedexKind::CommBang: return "comm-bang";
    case RedexKind::CommSpawn: return "comm-spawn";
    case RedexKind::AppLinear: return "app-linear";
    case RedexKind::AppBang: return "app-bang";
    case RedexKind::AppSpawn: return "app-spawn";
  }
  return "?";
}

inline bool is_comm(RedexKind k) {
  return k == RedexKind::CommLinear || k == RedexKind::CommBang || k == RedexKind::CommSpawn;
}

// A redex names the interacting threads by index into the canonical soup,
// which is stable across congruent presentations of the same process.
struct Redex {
  RedexKind kind = RedexKind::CommLinear;
  std::string channel;  // communications only
  int out_index = -1;   // output thread (communications)
  int in_index = -1;    // input thread (communications)
  int app_index = -1;   // application thread
};

namespace detail {

inline bool payload_matches(BinderKind kind, const ValuePtr& v) {
  if (kind == BinderKind::Linear) return true;
  const auto* b = std::get_if<BoxV>(&v->node);
  if (!b) return false;
  return kind == BinderKind::Bang ? b->kind == BoxKind::Bang : b->kind == BoxKind::Spawn;
}

inline RedexKind comm_kind(BinderKind k) {
  switch (k) {
    case BinderKind::Linear: return RedexKind::CommLinear;
    case BinderKind::Bang: return RedexKind::CommBang;
    case BinderKind::Spawn: return RedexKind::CommSpawn;
  }
  return RedexKind::CommLinear;
}
inline RedexKind app_kind(BinderKind k) {
  switch (k) {
    case BinderKind::Linear: return RedexKind::AppLinear;
    case BinderKind::Bang: return RedexKind::AppBang;
    case BinderKind::Spawn: return RedexKind::AppSpawn;
  }
  return RedexKind::AppLinear;
}

inline std::vector<Redex> redexes_of(const CanonicalProcess& cf) {
  std::vector<Redex> out;
  const auto& soup = cf.soup;
  for (int i = 0; i < static_cast<int>(soup.size()); ++i) {
    const auto* o = std::get_if<Output>(&soup[i]->node);
    if (!o) continue;
    for (int j = 0; j < static_cast<int>(soup.size()); ++j) {
      if (j == i) continue;
      const auto* in = std::get_if<Input>(&soup[j]->node);
      if (!in || in->chan != o->chan) continue;
      if (!payload_matches(in->kind, o->payload)) continue;
      Redex r;
      r.kind = comm_kind(in->kind);
      r.channel = o->chan;
      r.out_index = i;
      r.in_index = j;
      out.push_back(r);
    }
  }
  for (int k = 0; k < static_cast<int>(soup.size()); ++k) {
    const auto* a = std::get_if<App>(&soup[k]->node);
    if (!a) continue;
    const auto* f = std::get_if<Abs>(&a->fun->node);
    if (!f || !payload_matches(f->kind, a->arg)) continue;
    Redex r;
    r.kind = app_kind(f->kind);
    r.app_index = k;
    out.push_back(r);
  }
  return out;
}

inline bool same_redex(const Redex& a, const Redex& b) {
  return a.kind == b.kind && a.channel == b.channel && a.out_index == b.out_index &&
         a.in_index == b.in_index && a.app_index == b.app_index;
}

inline ProcessPtr rebuild(const std::vector<std::string>& binders, const std::vector<ProcessPtr>& soup) {
  ProcessPtr acc;
  for (const auto& t : soup) acc = acc ? par(acc, t) : t;
  if (!acc) acc = nil();
  for (size_t i = binders.size(); i-- > 0;) acc = nu(binders[i], acc);
  return acc;
}

inline ProcessPtr step_of(const CanonicalProcess& cf, const Redex& r) {
  std::vector<ProcessPtr> soup = cf.soup;
  if (is_comm(r.kind)) {
    const auto& o = std::get<Output>(soup[r.out_index]->node);
    const auto& in = std::get<Input>(soup[r.in_index]->node);
    ValuePtr payload = o.payload;
    if (r.kind != RedexKind::CommLinear) payload = std::get<BoxV>(payload->node).inner;
    ProcessPtr contractum = substitute(in.body, in.var, payload);
    if (!std::holds_alternative<Nil>(o.cont->node)) contractum = par(o.cont, contractum);
    int lo = std::min(r.out_index, r.in_index), hi = std::max(r.out_index, r.in_index);
    soup.erase(soup.begin() + hi);
    soup.erase(soup.begin() + lo);
    soup.insert(soup.begin() + lo, contractum);
  } else {
    const auto& a = std::get<App>(soup[r.app_index]->node);
    const auto& f = std::get<Abs>(a.fun->node);
    ValuePtr arg = a.arg;
    if (r.kind != RedexKind::AppLinear) arg = std::get<BoxV>(arg->node).inner;
    soup[r.app_index] = substitute(f.body, f.var, arg);
  }
  return rebuild(cf.restricted, soup);
}

}  // namespace detail

// All redexes of p, located in its canonical soup. The process must be
// closed: free variables have no reduction semantics.
inline std::vector<Redex> redexes(const ProcessPtr& p) {
  if (!free_vars(p).empty())
    throw std::invalid_argument("redexes: process has free variables");
  return detail::redexes_of(canonical_form(p));
}

// Fires one redex of p (as reported by redexes) and returns the successor;
// the surrounding soup and restrictions are preserved.
inline ProcessPtr step(const ProcessPtr& p, const Redex& r) {
  if (!free_vars(p).empty())
    throw std::invalid_argument("step: process has free variables");
  CanonicalProcess cf = canonical_form(p);
  for (const auto& cand : detail::redexes_of(cf))
    if (detail::same_redex(cand, r)) return detail::step_of(cf, r);
  throw std::invalid_argument("step: not a redex of this process");
}

// ---- runs ------------------------------------------------------------------

enum class Strategy { First, Random };

struct TraceStep {
  ProcessPtr process;  // state before the step
  Redex chosen;
};

struct Trace {
  std::vector<TraceStep> steps;
  ProcessPtr final;       // state after the last step
  bool exhausted = false; // final has no redex
  bool truncated = false; // max_steps reached first
};

// Runs p under a redex-choice function until no redex applies or max_steps
// is reached. The chooser receives the current redex list and state.
inline Trace run(const ProcessPtr& p,
                 const std::function<size_t(const std::vector<Redex>&, const ProcessPtr&)>& choose,
                 uint64_t max_steps) {
  if (!free_vars(p).empty())
    throw std::invalid_argument("run: process has free variables");
  Trace tr;
  ProcessPtr cur = p;
  for (uint64_t i = 0; i < max_steps; ++i) {
    CanonicalProcess cf = canonical_form(cur);
    auto rs = detail::redexes_of(cf);
    if (rs.empty()) {
      tr.final = cur;
      tr.exhausted = true;
      return tr;
    }
    size_t pick = choose(rs, cur);
    if (pick >= rs.size()) throw std::invalid_argument("run: chooser index out of range");
    tr.steps.push_back({cur, rs[pick]});
    cur = detail::step_of(cf, rs[pick]);
  }
  tr.final = cur;
  tr.truncated = !redexes(cur).empty();
  tr.exhausted = !tr.truncated;
  return tr;
}

inline Trace run(const ProcessPtr& p, Strategy s, uint64_t max_steps, uint64_t seed = 0) {
  if (s == Strategy::First)
    return run(p, [](const std::vector<Redex>&, const ProcessPtr&) -> size_t { return 0; },
               max_steps);
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return run(p,
             [rng](const std::vector<Redex>& rs, const ProcessPtr&) -> size_t {
               return std::uniform_int_distribution<size_t>(0, rs.size() - 1)(*rng);
             },
             max_steps);
}

// ---- state-space exploration -------------------------------------------------

struct GraphNode {
  ProcessPtr process;  // canonical representative
  std::string key;
};

struct GraphEdge {
  int from = 0, to = 0;
  RedexKind kind = RedexKind::CommLinear;
  std::string channel;
};

struct ReductionGraph {
  std::vector<GraphNode> nodes;  // node 0 is the root
  std::vector<GraphEdge> edges;
  bool truncated = false;  // node budget was hit
};

// Breadth-first closure of the reachable state space modulo congruence.
inline ReductionGraph explore(const ProcessPtr& p, size_t node_budget = 10000) {
  if (!free_vars(p).empty())
    throw std::invalid_argument("explore: process has free variables");
  ReductionGraph g;
  std::map<std::string, int> seen;
  std::vector<CanonicalProcess> forms;
  CanonicalProcess root = canonical_form(p);
  seen[root.key] = 0;
  g.nodes.push_back({root.term, root.key});
  forms.push_back(std::move(root));
  for (size_t at = 0; at < forms.size(); ++at) {
    auto rs = detail::redexes_of(forms[at]);
    for (const auto& r : rs) {
      ProcessPtr q = detail::step_of(forms[at], r);
      CanonicalProcess qc = canonical_form(q);
      auto it = seen.find(qc.key);
      int id;
      if (it != seen.end()) {
        id = it->second;
      } else if (g.nodes.size() < node_budget) {
        id = static_cast<int>(g.nodes.size());
        seen[qc.key] = id;
        g.nodes.push_back({qc.term, qc.key});
        forms.push_back(std::move(qc));
      } else {
        g.truncated = true;
        continue;
      }
      g.edges.push_back({static_cast<int>(at), id, r.kind, r.channel});
    }
  }
  return g;
}

}  // namespace softpi
