#pragma once

// Well-formation checkers for the four calculi handled by the workbench.
//
//   hopi    unrestricted higher-order processes: no boxes, no ! or # binders.
//   lhopi   adds !x binders and !V boxes; plain binders become linear (the
//           bound variable occurs exactly once, outside any box).
//   shopi   same grammar as lhopi but soft: a !-bound variable either occurs
//           any number of times outside boxes (it "dies") or exactly once
//           under exactly one ! box.
//   eshopi  extends shopi with #x binders, #V boxes and a set IC of input
//           channels: outputs on IC channels are forbidden, and a #-bound
//           variable either occurs exactly once under one # box, or once
//           under a # box that is guarded by an IC input plus any number of
//           plain occurrences that branch off above that input.
//
// Restriction shadows membership in IC: under `new a`, the name a is not an
// input channel for the subterm.
//
// Paths locate nodes by child indices from the root: Par 0/1 = left/right,
// Output 0/1 = payload/continuation, App 0/1 = function/argument, and the
// single child of Input, Restrict, Abs and boxes is 0.

#include <optional>

#include "ast.hpp"
#include "parser.hpp"

namespace softpi {

enum class Calculus { Hopi, Lhopi, Shopi, Eshopi };

inline const char* to_string(Calculus c) {
  switch (c) {
    case Calculus::Hopi: return "hopi";
    case Calculus::Lhopi: return "lhopi";
    case Calculus::Shopi: return "shopi";
    case Calculus::Eshopi: return "eshopi";
  }
  return "?";
}

enum class VarClass { LinearCls, BangCls, DiesCls, SangCls, DangCls };

inline const char* to_string(VarClass c) {
  switch (c) {
    case VarClass::LinearCls: return "linear";
    case VarClass::BangCls: return "bang";
    case VarClass::DiesCls: return "dies";
    case VarClass::SangCls: return "sang";
    case VarClass::DangCls: return "dang";
  }
  return "?";
}

struct BinderInfo {
  std::string var;
  BinderKind kind = BinderKind::Linear;
  bool is_abs = false;       // abstraction binder as opposed to input binder
  std::string site;          // e.g. "input a(!x)" or "abstraction \\#x"
  std::vector<int> path;     // path of the binder node from the root
  VarClass cls = VarClass::LinearCls;
};

struct WfFailure {
  std::vector<int> path;
  std::string site;
  std::string reason;
};

struct WfReport {
  bool ok = false;
  Calculus calculus = Calculus::Hopi;
  std::set<std::string> ic;
  std::vector<BinderInfo> classifications;
  std::optional<WfFailure> failure;
};

namespace detail {

// One free occurrence of a tracked variable inside a binder body: box
// depths, the path from the body root, the positions along that path that
// are inputs on live input channels, and the position of the outermost box.
struct OccRec {
  int bang = 0, spawn = 0;
  std::vector<int> path;
  std::vector<int> ic_inputs;
  int box_pos = -1;
};

struct OccCollect {
  const std::string& x;
  const std::set<std::string>& ic;
  std::set<std::string> shadowed;
  std::vector<OccRec>* out;
  int bang = 0, spawn = 0;
  std::vector<int> path;
  std::vector<int> ic_inputs;
  int box_pos = -1;

  OccCollect(const std::string& x_, const std::set<std::string>& ic_,
             std::set<std::string> shadowed_, std::vector<OccRec>* out_)
      : x(x_), ic(ic_), shadowed(std::move(shadowed_)), out(out_) {}

  bool live(const std::string& chan) const { return ic.count(chan) && !shadowed.count(chan); }

  void hit() { out->push_back({bang, spawn, path, ic_inputs, box_pos}); }

  void value(const ValuePtr& v) {
    std::visit(overloaded{[&](const Unit&) {},
                          [&](const Var& n) {
                            if (n.name == x) hit();
                          },
                          [&](const Abs& a) {
                            if (a.var == x) return;
                            path.push_back(0);
                            process(a.body);
                            path.pop_back();
                          },
                          [&](const BoxV& b) {
                            int prev = box_pos;
                            if (bang + spawn == 0) box_pos = static_cast<int>(path.size());
                            if (b.kind == BoxKind::Bang) ++bang; else ++spawn;
                            path.push_back(0);
                            value(b.inner);
                            path.pop_back();
                            if (b.kind == BoxKind::Bang) --bang; else --spawn;
                            box_pos = prev;
                          }},
               v->node);
  }

  void process(const ProcessPtr& p) {
    std::visit(overloaded{[&](const Nil&) {},
                          [&](const Par& n) {
                            path.push_back(0);
                            process(n.left);
                            path.back() = 1;
                            process(n.right);
                            path.pop_back();
                          },
                          [&](const Input& n) {
                            if (n.var == x) return;
                            bool rec = live(n.chan);
                            if (rec) ic_inputs.push_back(static_cast<int>(path.size()));
                            path.push_back(0);
                            process(n.body);
                            path.pop_back();
                            if (rec) ic_inputs.pop_back();
                          },
                          [&](const Output& n) {
                            path.push_back(0);
                            value(n.payload);
                            path.back() = 1;
                            process(n.cont);
                            path.pop_back();
                          },
                          [&](const Restrict& n) {
                            bool added = ic.count(n.chan) && shadowed.insert(n.chan).second;
                            path.push_back(0);
                            process(n.body);
                            path.pop_back();
                            if (added) shadowed.erase(n.chan);
                          },
                          [&](const App& n) {
                            path.push_back(0);
                            value(n.fun);
                            path.back() = 1;
                            value(n.arg);
                            path.pop_back();
                          }},
               p->node);
  }
};

inline int lcp_len(const std::vector<int>& a, const std::vector<int>& b) {
  size_t n = std::min(a.size(), b.size());
  size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return static_cast<int>(i);
}

inline std::string depth_word(const OccRec& r) {
  if (r.bang > 0 && r.spawn > 0) return "under both ! and # boxes";
  if (r.bang + r.spawn > 1) return "under nested boxes";
  if (r.bang == 1) return "under a ! box";
  if (r.spawn == 1) return "under a # box";
  return "outside any box";
}

// Classifies one binder given its occurrence records. Returns the class or
// a failure reason.
inline std::pair<std::optional<VarClass>, std::string> classify(
    Calculus calc, BinderKind kind, const std::string& varname, const std::vector<OccRec>& recs) {
  auto all_plain = [&] {
    for (const auto& r : recs)
      if (r.bang + r.spawn != 0) return false;
    return true;
  };
  auto count_at = [&](int b, int s) {
    int k = 0;
    for (const auto& r : recs)
      if (r.bang == b && r.spawn == s) ++k;
    return k;
  };

  switch (kind) {
    case BinderKind::Linear:
      if (calc == Calculus::Hopi) return {VarClass::LinearCls, ""};
      if (recs.empty()) return {std::nullopt, "linear variable " + varname + " is never used"};
      if (recs.size() > 1)
        return {std::nullopt,
                "linear variable " + varname + " is used " + std::to_string(recs.size()) + " times"};
      if (recs[0].bang + recs[0].spawn != 0)
        return {std::nullopt, "linear variable " + varname + " occurs " + depth_word(recs[0])};
      return {VarClass::LinearCls, ""};

    case BinderKind::Bang:
      if (calc == Calculus::Lhopi) return {VarClass::BangCls, ""};
      // soft calculi: dies (any number of plain occurrences) or bang
      // (exactly one occurrence under exactly one ! box)
      if (all_plain()) return {VarClass::DiesCls, ""};
      if (recs.size() == 1 && recs[0].bang == 1 && recs[0].spawn == 0) return {VarClass::BangCls, ""};
      for (const auto& r : recs)
        if (r.bang + r.spawn > 1 || r.spawn > 0)
          return {std::nullopt, "variable " + varname + " occurs " + depth_word(r)};
      if (count_at(1, 0) > 1)
        return {std::nullopt, "variable " + varname + " occurs under a ! box more than once"};
      return {std::nullopt, "variable " + varname + " occurs both outside and under a ! box"};

    case BinderKind::Spawn: {
      if (recs.empty()) return {std::nullopt, "spawn variable " + varname + " is never used"};
      const OccRec* boxed = nullptr;
      int boxed_count = 0;
      for (const auto& r : recs) {
        if (r.bang == 0 && r.spawn == 1) {
          boxed = &r;
          ++boxed_count;
        } else if (r.bang + r.spawn != 0) {
          return {std::nullopt, "spawn variable " + varname + " occurs " + depth_word(r)};
        }
      }
      if (boxed_count == 0)
        return {std::nullopt, "spawn variable " + varname + " never occurs under a # box"};
      if (boxed_count > 1)
        return {std::nullopt, "spawn variable " + varname + " occurs under a # box more than once"};
      if (recs.size() == 1) return {VarClass::SangCls, ""};
      // The boxed occurrence is shared with plain ones; that is only sound
      // when an input on an input channel promotes the variable between the
      // point where the copies branch off and the box itself.
      for (const auto& r : recs) {
        if (&r == boxed) continue;
        int lca = lcp_len(r.path, boxed->path);
        bool promoted = false;
        for (int q : boxed->ic_inputs)
          if (q > lca && q < boxed->box_pos) { promoted = true; break; }
        if (!promoted)
          return {std::nullopt, "spawn variable " + varname +
                                    " is shared with its # box copy without an input-channel "
                                    "prefix between the branch point and the box"};
      }
      return {VarClass::DangCls, ""};
    }
  }
  return {std::nullopt, "unclassifiable binder"};
}

struct WfWalk {
  Calculus calc;
  const std::set<std::string>& ic;
  WfReport* rep;
  std::set<std::string> shadowed;
  std::vector<int> path;

  WfWalk(Calculus calc_, const std::set<std::string>& ic_, WfReport* rep_)
      : calc(calc_), ic(ic_), rep(rep_) {}

  bool live(const std::string& chan) const { return ic.count(chan) && !shadowed.count(chan); }

  void fail(std::string site, std::string reason) {
    if (rep->failure) return;  // first failure wins
    rep->failure = WfFailure{path, std::move(site), std::move(reason)};
  }

  static std::string binder_mark(BinderKind k) {
    return k == BinderKind::Bang ? "!" : k == BinderKind::Spawn ? "#" : "";
  }

  void binder(const std::string& site, BinderKind kind, bool is_abs, const std::string& var,
              const ProcessPtr& body) {
    if (calc != Calculus::Eshopi && kind == BinderKind::Spawn) {
      fail(site, "# binders do not belong to this calculus");
      return;
    }
    if (calc == Calculus::Hopi && kind != BinderKind::Linear) {
      fail(site, "marked binders do not belong to hopi");
      return;
    }
    if (calc == Calculus::Hopi) return;  // no use discipline, nothing to classify
    std::vector<OccRec> recs;
    detail::OccCollect oc(var, ic, shadowed, &recs);
    oc.process(body);
    auto [cls, reason] = classify(calc, kind, var, recs);
    if (!cls) {
      fail(site, reason);
      return;
    }
    rep->classifications.push_back(BinderInfo{var, kind, is_abs, site, path, *cls});
  }

  void value(const ValuePtr& v) {
    std::visit(overloaded{[&](const Unit&) {}, [&](const Var&) {},
                          [&](const Abs& a) {
                            binder("abstraction \\" + binder_mark(a.kind) + a.var, a.kind, true,
                                   a.var, a.body);
                            path.push_back(0);
                            process(a.body);
                            path.pop_back();
                          },
                          [&](const BoxV& b) {
                            if (calc == Calculus::Hopi) {
                              fail("box", "boxed values do not belong to hopi");
                              return;
                            }
                            if (calc != Calculus::Eshopi && b.kind == BoxKind::Spawn) {
                              fail("box #", "# boxes do not belong to this calculus");
                              return;
                            }
                            path.push_back(0);
                            value(b.inner);
                            path.pop_back();
                          }},
               v->node);
  }

  void process(const ProcessPtr& p) {
    std::visit(overloaded{[&](const Nil&) {},
                          [&](const Par& n) {
                            path.push_back(0);
                            process(n.left);
                            path.back() = 1;
                            process(n.right);
                            path.pop_back();
                          },
                          [&](const Input& n) {
                            binder("input " + n.chan + "(" + binder_mark(n.kind) + n.var + ")",
                                   n.kind, false, n.var, n.body);
                            path.push_back(0);
                            process(n.body);
                            path.pop_back();
                          },
                          [&](const Output& n) {
                            if (calc == Calculus::Eshopi && live(n.chan))
                              fail("output on " + n.chan, "outputs on input channels are forbidden");
                            path.push_back(0);
                            value(n.payload);
                            path.back() = 1;
                            process(n.cont);
                            path.pop_back();
                          },
                          [&](const Restrict& n) {
                            bool added = ic.count(n.chan) && shadowed.insert(n.chan).second;
                            path.push_back(0);
                            process(n.body);
                            path.pop_back();
                            if (added) shadowed.erase(n.chan);
                          },
                          [&](const App& n) {
                            path.push_back(0);
                            value(n.fun);
                            path.back() = 1;
                            value(n.arg);
                            path.pop_back();
                          }},
               p->node);
  }
};

inline WfReport check(Calculus calc, const ProcessPtr& p, const std::set<std::string>& ic) {
  WfReport rep;
  rep.calculus = calc;
  rep.ic = ic;
  detail::WfWalk w(calc, ic, &rep);

  // Free variables are classified against the whole term, like binders
  // without a kind restriction: any class that fits is accepted.
  for (const auto& fv : free_vars(p)) {
    std::vector<OccRec> recs;
    OccCollect oc(fv, ic, {}, &recs);
    oc.process(p);
    if (calc == Calculus::Hopi) continue;
    std::string reason;
    bool okv = false;
    for (BinderKind k : {BinderKind::Linear, BinderKind::Bang, BinderKind::Spawn}) {
      if (calc != Calculus::Eshopi && k == BinderKind::Spawn) continue;
      auto [cls, r] = classify(calc, k, fv, recs);
      if (cls) { okv = true; break; }
      if (reason.empty()) reason = r;
    }
    if (!okv) {
      rep.failure = WfFailure{{}, "free variable " + fv, reason};
      break;
    }
  }

  if (!rep.failure) w.process(p);
  rep.ok = !rep.failure.has_value();
  if (!rep.ok) rep.classifications.clear();
  return rep;
}

}  // namespace detail

inline WfReport check_hopi(const ProcessPtr& p) { return detail::check(Calculus::Hopi, p, {}); }
inline WfReport check_lhopi(const ProcessPtr& p) { return detail::check(Calculus::Lhopi, p, {}); }
inline WfReport check_shopi(const ProcessPtr& p) { return detail::check(Calculus::Shopi, p, {}); }
inline WfReport check_eshopi(const ProcessPtr& p, const std::set<std::string>& ic) {
  return detail::check(Calculus::Eshopi, p, ic);
}

inline WfReport check(const ProcessPtr& p, Calculus c, const std::set<std::string>& ic = {}) {
  switch (c) {
    case Calculus::Hopi: return check_hopi(p);
    case Calculus::Lhopi: return check_lhopi(p);
    case Calculus::Shopi: return check_shopi(p);
    case Calculus::Eshopi: return check_eshopi(p, ic);
  }
  throw std::logic_error("bad calculus");
}

}  // namespace softpi
