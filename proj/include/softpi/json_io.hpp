#pragma once

// JSON views of the library's result types, for the command line tool and
// anything else that wants machine-readable output. Big integers are
// rendered as decimal strings so consumers need no big-number support.

#include <json.hpp>

#include "verifier.hpp"

namespace softpi {

using json = nlohmann::json;

inline void to_json(json& j, const WfFailure& f) {
  j = json{{"path", f.path}, {"site", f.site}, {"reason", f.reason}};
}

inline void to_json(json& j, const BinderInfo& b) {
  j = json{{"var", b.var},
           {"site", b.site},
           {"path", b.path},
           {"class", to_string(b.cls)},
           {"abstraction", b.is_abs}};
}

inline void to_json(json& j, const WfReport& r) {
  j = json{{"ok", r.ok},
           {"calculus", to_string(r.calculus)},
           {"input_channels", r.ic},
           {"binders", r.classifications}};
  if (r.failure) j["failure"] = *r.failure;
}

inline void to_json(json& j, const MetricsSnapshot& m) {
  j = json{{"size", m.size},
           {"box_depth", m.bd},
           {"dup_factor", m.df},
           {"weight", m.wei},
           {"poly_bound", m.poly_bound.str()}};
  if (m.webi) j["webi"] = *m.webi;
  if (m.pgr) j["pgr"] = *m.pgr;
}

inline void to_json(json& j, const Redex& r) {
  j = json{{"kind", to_string(r.kind)}};
  if (is_comm(r.kind)) {
    j["channel"] = r.channel;
    j["out_index"] = r.out_index;
    j["in_index"] = r.in_index;
  } else {
    j["app_index"] = r.app_index;
  }
}

inline void to_json(json& j, const TraceStep& s) {
  j = json{{"process", print_process(s.process)}, {"redex", s.chosen}};
}

inline void to_json(json& j, const Trace& t) {
  j = json{{"steps", t.steps},
           {"final", print_process(t.final)},
           {"exhausted", t.exhausted},
           {"truncated", t.truncated}};
}

inline void to_json(json& j, const GraphNode& n) {
  j = json{{"process", print_process(n.process)}, {"key", n.key}};
}

inline void to_json(json& j, const GraphEdge& e) {
  j = json{{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}};
  if (!e.channel.empty()) j["channel"] = e.channel;
}

inline void to_json(json& j, const ReductionGraph& g) {
  j = json{{"nodes", g.nodes}, {"edges", g.edges}, {"truncated", g.truncated}};
}

inline void to_json(json& j, const SimulationViolation& v) {
  j = json{{"source", print_process(v.source)},
           {"redex", v.redex},
           {"source_next", print_process(v.source_next)},
           {"reason", v.reason}};
}

inline void to_json(json& j, const SimulationReport& r) {
  j = json{{"ok", r.ok},
           {"depth", r.depth},
           {"states", r.states},
           {"edges", r.edges},
           {"violations", r.violations}};
}

inline void to_json(json& j, const InvariantStat& s) {
  j = json{{"checked", s.checked}, {"failed", s.failed}};
}

inline void to_json(json& j, const VerifyFailure& f) {
  j = json{{"invariant", f.invariant}, {"at", f.at_step}, {"detail", f.detail}};
}

inline void to_json(json& j, const VerificationReport& r) {
  j = json{{"ok", r.ok},
           {"calculus", to_string(r.calculus)},
           {"invariants", r.invariants},
           {"failures", r.failures}};
}

// graphviz rendering of an exploration graph
inline std::string to_dot(const ReductionGraph& g) {
  std::string out = "digraph reduction {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    std::string label = print_process(g.nodes[i].process);
    std::string esc;
    for (char c : label) {
      if (c == '"' || c == '\\') esc += '\\';
      esc += c;
    }
    out += "  n" + std::to_string(i) + " [label=\"" + esc + "\"];\n";
  }
  for (const auto& e : g.edges) {
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" +
           to_string(e.kind);
    if (!e.channel.empty()) out += " " + e.channel;
    out += "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace softpi
