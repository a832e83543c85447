#pragma once

// Embedding of the unrestricted calculus into the linear one: every binder
// becomes a ! binder and every communicated or applied value is boxed.
//
//   [0] = 0                [P | Q] = [P] | [Q]
//   [a(x).P] = a(!x).[P]   [a<V>.P] = a<![V]>.[P]
//   [new a.P] = new a.[P]  [V W] = ([V] ![W])
//   [*] = *   [x] = x      [\x.P] = \!x.[P]
//
// The image never contains a plain (linear) binder, and reduction steps of
// the source are matched one-for-one by the image: a communication maps to
// a boxed communication, an application to a boxed application.

#include "reduction.hpp"
#include "wellformed.hpp"

namespace softpi {

inline ValuePtr embed_value(const ValuePtr& v);

inline ProcessPtr embed_process(const ProcessPtr& p) {
  return std::visit(
      detail::overloaded{
          [](const Nil&) { return nil(); },
          [](const Par& n) {
            auto l = embed_process(n.left);
            auto r = embed_process(n.right);
            return par(l, r);
          },
          [](const Input& n) {
            if (n.kind != BinderKind::Linear)
              throw std::invalid_argument("embed: input binder is already marked");
            return input(n.chan, BinderKind::Bang, n.var, embed_process(n.body));
          },
          [](const Output& n) {
            auto v = box(BoxKind::Bang, embed_value(n.payload));
            auto k = embed_process(n.cont);
            return output(n.chan, v, k);
          },
          [](const Restrict& n) { return nu(n.chan, embed_process(n.body)); },
          [](const App& n) {
            auto f = embed_value(n.fun);
            auto a = box(BoxKind::Bang, embed_value(n.arg));
            return app(f, a);
          },
      },
      p->node);
}

inline ValuePtr embed_value(const ValuePtr& v) {
  return std::visit(
      detail::overloaded{
          [](const Unit&) { return unit(); },
          [](const Var& n) { return var(n.name); },
          [](const Abs& n) {
            if (n.kind != BinderKind::Linear)
              throw std::invalid_argument("embed: abstraction binder is already marked");
            return abs(BinderKind::Bang, n.var, embed_process(n.body));
          },
          [](const BoxV&) -> ValuePtr { throw std::invalid_argument("embed: value is already boxed"); },
      },
      v->node);
}

// ---- step-for-step simulation check ------------------------------------------

struct SimulationViolation {
  ProcessPtr source;       // source state whose step could not be matched
  Redex redex;             // the unmatched source redex
  ProcessPtr source_next;  // where the source step went
  std::string reason;
};

struct SimulationReport {
  bool ok = true;
  int depth = 0;
  uint64_t states = 0;  // distinct source states visited
  uint64_t edges = 0;   // source steps checked
  std::vector<SimulationViolation> violations;
};

// Breadth-first over the source state space to the given depth: every source
// step P -> Q must be matched by some single image step embed(P) -> R with
// R congruent to embed(Q).
inline SimulationReport check_simulation(const ProcessPtr& p, int depth,
                                         size_t state_budget = 100000) {
  SimulationReport rep;
  rep.depth = depth;
  std::set<std::string> seen;
  std::vector<ProcessPtr> frontier{p};
  seen.insert(canonical_form(p).key);
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<ProcessPtr> next;
    for (const auto& s : frontier) {
      ++rep.states;
      CanonicalProcess sc = canonical_form(s);
      ProcessPtr image = embed_process(s);
      CanonicalProcess ic = canonical_form(image);
      auto image_rs = detail::redexes_of(ic);
      for (const auto& r : detail::redexes_of(sc)) {
        ++rep.edges;
        ProcessPtr q = detail::step_of(sc, r);
        std::string want = canonical_form(embed_process(q)).key;
        bool matched = false;
        for (const auto& ir : image_rs) {
          if (canonical_form(detail::step_of(ic, ir)).key == want) {
            matched = true;
            break;
          }
        }
        if (!matched) {
          rep.ok = false;
          rep.violations.push_back({s, r, q, "no image step reaches the embedded successor"});
        }
        std::string qk = canonical_form(q).key;
        if (!seen.count(qk) && seen.size() < state_budget) {
          seen.insert(qk);
          next.push_back(q);
        }
      }
    }
    frontier = std::move(next);
  }
  return rep;
}

}  // namespace softpi
