#pragma once

// Mechanical checks of the resource-bound guarantees on concrete runs,
// plus the term sources the checks are exercised on: a by-construction
// well-formed random generator, a congruence-law rewriter, and an
// exhaustive enumerator of closed terms.

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "embedding.hpp"
#include "metrics.hpp"

namespace softpi {

// ---- trace verification ------------------------------------------------------

struct InvariantStat {
  uint64_t checked = 0;
  uint64_t failed = 0;
};

struct VerifyFailure {
  std::string invariant;
  uint64_t at_step = 0;  // index of the state (or step) the check failed at
  std::string detail;
};

struct VerificationReport {
  bool ok = true;
  Calculus calculus = Calculus::Hopi;
  std::map<std::string, InvariantStat> invariants;
  std::vector<VerifyFailure> failures;
  static constexpr size_t kMaxRecorded = 32;

  void note(const std::string& inv, uint64_t at, bool pass, const std::string& detail) {
    auto& st = invariants[inv];
    ++st.checked;
    if (!pass) {
      ++st.failed;
      ok = false;
      if (failures.size() < kMaxRecorded) failures.push_back({inv, at, detail});
    }
  }
};

// Checks every guarantee the calculus makes against an actual trace.
//
// All calculi: each state stays well formed (subject reduction), the
// duplication factor never grows, and each state satisfies
// size <= weight <= size^(bd+1).
//
// Both soft calculi: the number of steps is bounded by size(initial)^(bd+1),
// and so is the size of every intermediate state.
//
// Plain soft calculus: weight strictly decreases at every step.
//
// With input channels: the input-discounted weight takes over that role and
// weight + progression never grows; weight itself may bounce back up when a
// spawned copy lands under fresh boxes, so it is not checked for decrease.
inline VerificationReport verify_trace(const Trace& tr, Calculus calc,
                                       const std::set<std::string>& ic = {}) {
  VerificationReport rep;
  rep.calculus = calc;
  std::vector<ProcessPtr> states;
  for (const auto& st : tr.steps) states.push_back(st.process);
  states.push_back(tr.final);

  const bool soft = calc == Calculus::Shopi || calc == Calculus::Eshopi;
  const bool channelled = calc == Calculus::Eshopi;

  std::vector<MetricsSnapshot> ms;
  ms.reserve(states.size());
  for (const auto& s : states)
    ms.push_back(measure(s, channelled ? std::optional<std::set<std::string>>(ic) : std::nullopt));

  for (size_t i = 0; i < states.size(); ++i) {
    auto wf = check(states[i], calc, ic);
    rep.note(i == 0 ? "initial-well-formed" : "subject-reduction", i, wf.ok,
             wf.ok ? "" : wf.failure->site + ": " + wf.failure->reason);
    rep.note("weight-ge-size", i, ms[i].wei >= ms[i].size,
             "wei " + std::to_string(ms[i].wei) + " < size " + std::to_string(ms[i].size));
    rep.note("weight-le-size-pow", i, BigInt(ms[i].wei) <= ms[i].poly_bound,
             "wei " + std::to_string(ms[i].wei) + " > bound " + ms[i].poly_bound.str());
  }

  for (size_t i = 0; i + 1 < states.size(); ++i) {
    const auto &a = ms[i], &b = ms[i + 1];
    rep.note("df-non-increase", i, b.df <= a.df,
             "df " + std::to_string(a.df) + " -> " + std::to_string(b.df));
    if (calc == Calculus::Shopi)
      rep.note("weight-strict-decrease", i, b.wei < a.wei,
               "wei " + std::to_string(a.wei) + " -> " + std::to_string(b.wei));
    if (channelled) {
      rep.note("discounted-weight-strict-decrease", i, *b.webi < *a.webi,
               "webi " + std::to_string(*a.webi) + " -> " + std::to_string(*b.webi));
      rep.note("progression-non-increase", i, *b.pgr <= *a.pgr,
               "pgr " + std::to_string(*a.pgr) + " -> " + std::to_string(*b.pgr));
      BigInt sa = BigInt(a.wei) + BigInt(*a.pgr), sb = BigInt(b.wei) + BigInt(*b.pgr);
      rep.note("weight-plus-progression-non-increase", i, sb <= sa,
               "wei+pgr " + sa.str() + " -> " + sb.str());
    }
  }

  if (soft) {
    const BigInt bound = ms[0].poly_bound;
    rep.note("steps-le-poly-bound", tr.steps.size(), BigInt(tr.steps.size()) <= bound,
             std::to_string(tr.steps.size()) + " steps > bound " + bound.str());
    for (size_t i = 0; i < states.size(); ++i)
      rep.note("size-le-poly-bound", i, BigInt(ms[i].size) <= bound,
               "size " + std::to_string(ms[i].size) + " > bound " + bound.str());
  }
  return rep;
}

// ---- substitution inequalities -----------------------------------------------

// For a communication or application redex with body R, variable x and
// payload V fired inside a state with duplication factor n, substitution
// adds at most one copy's worth of weight per permitted occurrence:
//
//   plain binder   wgt(R{V/x}, m) <= wgt(R, m) +          wgt(V, m)
//   dropped (all plain occurrences)            + nfo(x,R)*wgt(V, m)
//   boxed (single occurrence under !)          +        m*wgt(V, m)
//
// checked at m = n and m = 1. The bounds are claims about disciplined
// binders only: a binder whose occurrences fit none of the three patterns
// (possible in the unrestricted calculi, e.g. a twice-used plain binder or a
// variable both boxed and unboxed) is out of scope and yields nullopt, as do
// spawn redexes, which rearrange boxes instead of copying into them.
struct SubstitutionCheck {
  std::string binder_class;  // "linear" | "dies" | "bang"
  uint64_t df_pre = 1;
  bool ok_at_df = true;
  bool ok_at_one = true;
};

inline std::optional<SubstitutionCheck> check_substitution(const ProcessPtr& state,
                                                           const Redex& r) {
  if (r.kind == RedexKind::CommSpawn || r.kind == RedexKind::AppSpawn) return std::nullopt;
  CanonicalProcess cf = canonical_form(state);
  ProcessPtr body;
  std::string x;
  ValuePtr payload;
  if (is_comm(r.kind)) {
    const auto& in = std::get<Input>(cf.soup.at(r.in_index)->node);
    const auto& out = std::get<Output>(cf.soup.at(r.out_index)->node);
    body = in.body;
    x = in.var;
    payload = r.kind == RedexKind::CommBang ? std::get<BoxV>(out.payload->node).inner : out.payload;
  } else {
    const auto& a = std::get<App>(cf.soup.at(r.app_index)->node);
    const auto& f = std::get<Abs>(a.fun->node);
    body = f.body;
    x = f.var;
    payload = r.kind == RedexKind::AppBang ? std::get<BoxV>(a.arg->node).inner : a.arg;
  }

  SubstitutionCheck chk;
  chk.df_pre = dup_factor(state);
  uint64_t plain = 0, boxed = 0;
  bool deep = false;
  for (const auto& o : occurrences(x, body)) {
    if (o.bang_depth == 0 && o.spawn_depth == 0)
      ++plain;
    else if (o.bang_depth == 1 && o.spawn_depth == 0)
      ++boxed;
    else
      deep = true;
  }
  if (deep) return std::nullopt;
  if (r.kind == RedexKind::CommLinear || r.kind == RedexKind::AppLinear) {
    if (boxed > 0 || plain != 1) return std::nullopt;
    chk.binder_class = "linear";
  } else if (boxed == 0) {
    chk.binder_class = "dies";
  } else if (boxed == 1 && plain == 0) {
    chk.binder_class = "bang";
  } else {
    return std::nullopt;
  }

  auto bound_holds = [&](uint64_t m) {
    uint64_t k = chk.binder_class == "linear" ? 1 : chk.binder_class == "dies" ? plain : m;
    BigInt lhs = BigInt(weight_param(substitute(body, x, payload), m));
    BigInt rhs = BigInt(weight_param(body, m)) + BigInt(k) * BigInt(weight_param(payload, m));
    return lhs <= rhs;
  };
  chk.ok_at_df = bound_holds(chk.df_pre);
  chk.ok_at_one = bound_holds(1);
  return chk;
}

// ---- by-construction fuzzing ---------------------------------------------------

namespace detail {

// Variable states during generation. Must-states carry an undischarged
// obligation and are routed to exactly one branch at every split; may-states
// are free to appear (or not) wherever the state allows.
enum class VS {
  Lin,        // must appear exactly once, outside boxes
  BangPend,   // must appear exactly once, inside a ! box
  SangPend,   // must appear exactly once, inside a # box
  DangAbove,  // SangPend that still needs an input-channel prefix first
  DangBelow,  // past its promoting prefix; must reach a # box
  Dies,       // may appear outside boxes, any count
  FreeBang,   // unrestricted (! binder in the non-soft linear calculus)
  Sprinkle,   // plain copies of a # var on a branch that forked above its prefix
};

inline bool is_must(VS s) {
  return s == VS::Lin || s == VS::BangPend || s == VS::SangPend || s == VS::DangAbove ||
         s == VS::DangBelow;
}

struct VarSlot {
  std::string name;
  VS state;
};
using Scope = std::vector<VarSlot>;

struct GenFail {};

inline int must_cost(VS s) {
  switch (s) {
    case VS::Lin: return 3;        // (x *)
    case VS::BangPend: return 4;   // a<!x>.0
    case VS::SangPend: return 4;   // a<#x>.0
    case VS::DangBelow: return 4;  // a<#x>.0
    case VS::DangAbove: return 5;  // c(!w).a<#x>.0
    default: return 0;
  }
}

inline int min_p(const Scope& sc) {
  int total = 0;
  for (const auto& v : sc) total += must_cost(v.state);
  return total == 0 ? 1 : total;
}

inline int min_v(const Scope& sc) {
  int musts = 0;
  VS only = VS::Dies;
  for (const auto& v : sc)
    if (is_must(v.state)) {
      ++musts;
      only = v.state;
    }
  if (musts == 0) return 1;
  if (musts == 1) {
    if (only == VS::Lin) return 1;
    if (only == VS::BangPend || only == VS::SangPend || only == VS::DangBelow) return 2;
  }
  return 1 + min_p(sc);  // wrap in an abstraction with an obligation-free binder
}

class Fuzzer {
 public:
  Fuzzer(uint64_t seed, Calculus calc, const std::set<std::string>& ic)
      : rng_(seed), calc_(calc), ic_(ic) {
    for (const char* c : {"a", "b", "c"})
      if (!ic_.count(c)) chans_.push_back(c);
    chans_.insert(chans_.end(), ic_.begin(), ic_.end());
    if (out_chans().empty()) chans_.push_back("d");
  }

  ProcessPtr gen(int target) {
    vcount_ = ccount_ = 0;
    return gen_p(target, {});
  }

 private:
  std::mt19937_64 rng_;
  Calculus calc_;
  std::set<std::string> ic_;
  std::vector<std::string> chans_;
  int vcount_ = 0, ccount_ = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool chance(int pct) { return pick(100) < pct; }

  std::vector<std::string> out_chans() const {
    std::vector<std::string> cs;
    for (const auto& c : chans_)
      if (!ic_.count(c)) cs.push_back(c);
    return cs;
  }

  static bool has_must(const Scope& sc) {
    for (const auto& v : sc)
      if (is_must(v.state)) return true;
    return false;
  }

  // Musts go to one side; may-states are shared. A # var still above its
  // prefix may leave plain copies on the branch it does not take.
  void split(const Scope& sc, Scope& l, Scope& r) {
    for (const auto& v : sc) {
      switch (v.state) {
        case VS::Dies:
        case VS::FreeBang:
        case VS::Sprinkle:
          l.push_back(v);
          r.push_back(v);
          break;
        case VS::DangAbove: {
          bool left = chance(50);
          (left ? l : r).push_back(v);
          (left ? r : l).push_back({v.name, VS::Sprinkle});
          break;
        }
        default:
          (chance(50) ? l : r).push_back(v);
          break;
      }
    }
  }

  // Binder alternatives for the current calculus, with the state the new
  // variable starts in.
  std::vector<std::pair<BinderKind, VS>> binder_choices(bool allow_spawn) {
    std::vector<std::pair<BinderKind, VS>> out;
    switch (calc_) {
      case Calculus::Hopi:
        out.push_back({BinderKind::Linear, VS::Dies});  // unrestricted use
        break;
      case Calculus::Lhopi:
        out.push_back({BinderKind::Linear, VS::Lin});
        out.push_back({BinderKind::Bang, VS::FreeBang});
        break;
      case Calculus::Shopi:
        out.push_back({BinderKind::Linear, VS::Lin});
        out.push_back({BinderKind::Bang, chance(65) ? VS::Dies : VS::BangPend});
        break;
      case Calculus::Eshopi:
        out.push_back({BinderKind::Linear, VS::Lin});
        out.push_back({BinderKind::Bang, chance(65) ? VS::Dies : VS::BangPend});
        if (allow_spawn) {
          bool dang = !ic_.empty() && chance(40);
          out.push_back({BinderKind::Spawn, dang ? VS::DangAbove : VS::SangPend});
        }
        break;
    }
    return out;
  }

  ProcessPtr gen_p(int b, const Scope& sc) {
    if (b < min_p(sc)) throw GenFail{};
    bool musts = has_must(sc);
    bool dang_pending = false;
    for (const auto& v : sc) dang_pending |= v.state == VS::DangAbove;

    if (b == 1) {
      if (musts) throw GenFail{};
      return nil();
    }
    for (int attempt = 0; attempt < 6; ++attempt) {
      if (dang_pending && chance(70)) {
        if (auto p = try_input(b, sc, /*force_ic=*/true)) return p;
        continue;
      }
      int w = pick(100);
      if (w < 24) {
        if (auto p = try_input(b, sc, false)) return p;
      } else if (w < 48) {
        if (auto p = try_output(b, sc)) return p;
      } else if (w < 72) {
        if (auto p = try_par(b, sc)) return p;
      } else if (w < 82) {
        if (auto p = try_app(b, sc)) return p;
      } else {
        if (auto p = try_restrict(b, sc)) return p;
      }
    }
    // fall back in a fixed order before giving up on this attempt
    if (auto p = try_input(b, sc, dang_pending)) return p;
    if (auto p = try_output(b, sc)) return p;
    if (auto p = try_par(b, sc)) return p;
    if (auto p = try_app(b, sc)) return p;
    if (auto p = try_restrict(b, sc)) return p;
    throw GenFail{};
  }

  ProcessPtr try_input(int b, const Scope& sc, bool force_ic, const std::string* pin = nullptr,
                       bool force_linear = false) {
    std::string ch;
    if (pin) {
      ch = *pin;
    } else {
      std::vector<std::string> pool = chans_;
      if (force_ic) {
        pool.assign(ic_.begin(), ic_.end());
        if (pool.empty()) return nullptr;
      }
      ch = pool[pick(static_cast<int>(pool.size()))];
    }
    bool promotes = calc_ == Calculus::Eshopi && ic_.count(ch) > 0;

    Scope body = sc;
    if (promotes)
      for (auto& v : body)
        if (v.state == VS::DangAbove) v.state = VS::DangBelow;

    auto choices = binder_choices(/*allow_spawn=*/true);
    if (force_linear)
      choices.assign(
          1, {BinderKind::Linear, calc_ == Calculus::Hopi ? VS::Dies : VS::Lin});
    std::shuffle(choices.begin(), choices.end(), rng_);
    for (const auto& [kind, st] : choices) {
      Scope inner = body;
      std::string x = "v" + std::to_string(vcount_);
      inner.push_back({x, st});
      if (b - 1 < min_p(inner)) continue;
      ++vcount_;
      auto sub = gen_p(b - 1, inner);
      return input(ch, kind, x, sub);
    }
    return nullptr;
  }

  ProcessPtr try_output(int b, const Scope& sc, const std::string* pin = nullptr) {
    auto pool = out_chans();
    if (calc_ != Calculus::Eshopi) pool = chans_;
    if (pool.empty()) return nullptr;
    const std::string& ch = pin ? *pin : pool[pick(static_cast<int>(pool.size()))];
    for (int tries = 0; tries < 4; ++tries) {
      Scope vs, ps;
      split(sc, vs, ps);
      int need_v = min_v(vs), need_p = min_p(ps);
      if (1 + need_v + need_p > b) continue;
      int bv = need_v + pick(b - 1 - need_v - need_p + 1);
      auto payload = gen_v(bv, vs);
      auto cont = gen_p(b - 1 - bv, ps);
      return output(ch, payload, cont);
    }
    return nullptr;
  }

  ProcessPtr try_par(int b, const Scope& sc) {
    for (int tries = 0; tries < 4; ++tries) {
      Scope ls, rs;
      split(sc, ls, rs);
      int need_l = min_p(ls), need_r = min_p(rs);
      if (1 + need_l + need_r > b) continue;
      // seed a matching send/receive pair so runs actually communicate
      if (chance(35) && b >= 7 + need_l + need_r) {
        auto pool = out_chans();
        if (!pool.empty()) {
          const std::string& ch = pool[pick(static_cast<int>(pool.size()))];
          int lo = 2 + need_l, hi = b - 1 - (need_r + 4);
          if (hi >= lo) {
            int bl = lo + pick(hi - lo + 1);
            auto l = try_output(bl, ls, &ch);
            if (l) {
              auto r = try_input(b - 1 - bl, rs, false, &ch, /*force_linear=*/true);
              if (r) return chance(50) ? par(l, r) : par(r, l);
            }
          }
        }
      }
      int bl = need_l + pick(b - 1 - need_l - need_r + 1);
      auto l = gen_p(bl, ls);
      auto r = gen_p(b - 1 - bl, rs);
      return par(l, r);
    }
    return nullptr;
  }

  ProcessPtr try_app(int b, const Scope& sc) {
    for (int tries = 0; tries < 4; ++tries) {
      Scope fs, as;
      split(sc, fs, as);
      int need_f = min_v(fs), need_a = min_v(as);
      if (1 + need_f + need_a > b) continue;
      int bf = need_f + pick(b - 1 - need_f - need_a + 1);
      ValuePtr f;
      // a plain abstraction in function position reduces immediately
      if (bf >= 2 && chance(60)) {
        Scope inner = fs;
        std::string x = "v" + std::to_string(vcount_);
        inner.push_back({x, calc_ == Calculus::Hopi ? VS::Dies : VS::Lin});
        if (bf - 1 >= min_p(inner)) {
          ++vcount_;
          f = abs(BinderKind::Linear, x, gen_p(bf - 1, inner));
        }
      }
      if (!f) f = gen_v(bf, fs);
      auto a = gen_v(b - 1 - bf, as);
      return app(f, a);
    }
    return nullptr;
  }

  ProcessPtr try_restrict(int b, const Scope& sc) {
    if (b - 1 < min_p(sc)) return nullptr;
    std::string ch = "r" + std::to_string(ccount_++);
    chans_.push_back(ch);
    auto body = gen_p(b - 1, sc);
    chans_.pop_back();
    return nu(ch, body);
  }

  ValuePtr gen_v(int b, const Scope& sc) {
    if (b < min_v(sc)) throw GenFail{};
    int musts = 0;
    const VarSlot* lone = nullptr;
    for (const auto& v : sc)
      if (is_must(v.state)) {
        ++musts;
        lone = &v;
      }

    if (b == 1) {
      if (musts == 1 && lone->state == VS::Lin) return var(lone->name);
      if (musts > 0) throw GenFail{};
      std::vector<std::string> usable;
      for (const auto& v : sc)
        if (v.state == VS::Dies || v.state == VS::FreeBang || v.state == VS::Sprinkle)
          usable.push_back(v.name);
      if (!usable.empty() && chance(55)) return var(usable[pick(static_cast<int>(usable.size()))]);
      return unit();
    }

    // boxes discharge pending box obligations wholesale
    bool all_bang = musts > 0, all_spawn = musts > 0;
    for (const auto& v : sc) {
      if (!is_must(v.state)) continue;
      all_bang &= v.state == VS::BangPend;
      all_spawn &= v.state == VS::SangPend || v.state == VS::DangBelow;
    }
    bool can_box = calc_ != Calculus::Hopi;
    if (can_box && (all_bang || all_spawn) && (musts > 0 ? chance(80) : chance(25))) {
      BoxKind bk;
      if (all_bang && musts > 0) {
        bk = BoxKind::Bang;
      } else if (all_spawn && musts > 0) {
        bk = BoxKind::Spawn;
      } else {
        bk = calc_ == Calculus::Eshopi && chance(35) ? BoxKind::Spawn : BoxKind::Bang;
      }
      if (bk == BoxKind::Spawn && calc_ != Calculus::Eshopi) bk = BoxKind::Bang;
      Scope inner;
      for (const auto& v : sc) {
        if (is_must(v.state))
          inner.push_back({v.name, VS::Lin});
        else if (v.state == VS::FreeBang)
          inner.push_back(v);
        // Dies and Sprinkle stay outside boxes
      }
      if (b - 1 >= min_v(inner)) return box(bk, gen_v(b - 1, inner));
    }

    // otherwise an abstraction
    auto choices = binder_choices(/*allow_spawn=*/true);
    std::shuffle(choices.begin(), choices.end(), rng_);
    for (const auto& [kind, st] : choices) {
      Scope inner = sc;
      std::string x = "v" + std::to_string(vcount_);
      inner.push_back({x, st});
      if (b - 1 < min_p(inner)) continue;
      ++vcount_;
      auto body = gen_p(b - 1, inner);
      return abs(kind, x, body);
    }
    throw GenFail{};
  }
};

}  // namespace detail

// Generates a closed process of exactly target_size nodes that the checker
// accepts for the given calculus. The sampler favors obligation-discharging
// shapes and is neither uniform nor complete over the term space; it is a
// coverage tool. Throws std::runtime_error when the retry budget runs out.
inline ProcessPtr fuzz_generate(uint64_t seed, int target_size, Calculus calc,
                                const std::set<std::string>& ic = {}) {
  if (target_size < 1) throw std::invalid_argument("fuzz_generate: size must be positive");
  for (int attempt = 0; attempt < 400; ++attempt) {
    detail::Fuzzer f(seed * 1000003ULL + static_cast<uint64_t>(attempt), calc, ic);
    try {
      ProcessPtr p = f.gen(target_size);
      if (static_cast<int>(size(p)) != target_size) continue;
      if (!check(p, calc, ic).ok) continue;
      return p;
    } catch (const detail::GenFail&) {
    }
  }
  throw std::runtime_error("fuzz_generate: retry budget exhausted for size " +
                           std::to_string(target_size));
}

// ---- congruence rewriting ------------------------------------------------------

namespace detail {

inline void all_names(const ValuePtr& v, std::set<std::string>& vars, std::set<std::string>& chans);
inline void all_names(const ProcessPtr& p, std::set<std::string>& vars,
                      std::set<std::string>& chans) {
  std::visit(overloaded{[&](const Nil&) {},
                        [&](const Par& n) {
                          all_names(n.left, vars, chans);
                          all_names(n.right, vars, chans);
                        },
                        [&](const Input& n) {
                          chans.insert(n.chan);
                          vars.insert(n.var);
                          all_names(n.body, vars, chans);
                        },
                        [&](const Output& n) {
                          chans.insert(n.chan);
                          all_names(n.payload, vars, chans);
                          all_names(n.cont, vars, chans);
                        },
                        [&](const Restrict& n) {
                          chans.insert(n.chan);
                          all_names(n.body, vars, chans);
                        },
                        [&](const App& n) {
                          all_names(n.fun, vars, chans);
                          all_names(n.arg, vars, chans);
                        }},
             p->node);
}
inline void all_names(const ValuePtr& v, std::set<std::string>& vars,
                      std::set<std::string>& chans) {
  std::visit(overloaded{[&](const Unit&) {}, [&](const Var& n) { vars.insert(n.name); },
                        [&](const Abs& n) {
                          vars.insert(n.var);
                          all_names(n.body, vars, chans);
                        },
                        [&](const BoxV& n) { all_names(n.inner, vars, chans); }},
             v->node);
}

using PPut = std::function<ProcessPtr(const ProcessPtr&)>;
using VPut = std::function<ProcessPtr(const ValuePtr&)>;

inline void cong_sites_v(const ValuePtr& v, const VPut& put, std::vector<ProcessPtr>& out);

inline void cong_sites(const ProcessPtr& p, const PPut& put, std::vector<ProcessPtr>& out) {
  std::visit(
      overloaded{
          [&](const Nil&) {},
          [&](const Par& n) {
            out.push_back(put(par(n.right, n.left)));
            if (const auto* l = std::get_if<Par>(&n.left->node)) {
              auto inner = par(l->right, n.right);
              out.push_back(put(par(l->left, inner)));
            }
            if (const auto* r = std::get_if<Par>(&n.right->node)) {
              auto inner = par(n.left, r->left);
              out.push_back(put(par(inner, r->right)));
            }
            if (const auto* l = std::get_if<Restrict>(&n.left->node)) {
              auto fcr = free_channels(n.right);
              if (!fcr.count(l->chan)) out.push_back(put(nu(l->chan, par(l->body, n.right))));
            }
            if (const auto* r = std::get_if<Restrict>(&n.right->node)) {
              auto fcl = free_channels(n.left);
              if (!fcl.count(r->chan)) out.push_back(put(nu(r->chan, par(n.left, r->body))));
            }
            cong_sites(n.left, [&](const ProcessPtr& q) { return put(par(q, n.right)); }, out);
            cong_sites(n.right, [&](const ProcessPtr& q) { return put(par(n.left, q)); }, out);
          },
          [&](const Input& n) {
            cong_sites(n.body,
                       [&](const ProcessPtr& q) { return put(input(n.chan, n.kind, n.var, q)); },
                       out);
          },
          [&](const Output& n) {
            cong_sites_v(n.payload,
                         [&](const ValuePtr& w) { return put(output(n.chan, w, n.cont)); }, out);
            cong_sites(n.cont, [&](const ProcessPtr& q) { return put(output(n.chan, n.payload, q)); },
                       out);
          },
          [&](const Restrict& n) {
            if (const auto* b = std::get_if<Restrict>(&n.body->node))
              out.push_back(put(nu(b->chan, nu(n.chan, b->body))));
            if (const auto* b = std::get_if<Par>(&n.body->node)) {
              if (!free_channels(b->right).count(n.chan))
                out.push_back(put(par(nu(n.chan, b->left), b->right)));
              if (!free_channels(b->left).count(n.chan))
                out.push_back(put(par(b->left, nu(n.chan, b->right))));
            }
            cong_sites(n.body, [&](const ProcessPtr& q) { return put(nu(n.chan, q)); }, out);
          },
          [&](const App& n) {
            cong_sites_v(n.fun, [&](const ValuePtr& w) { return put(app(w, n.arg)); }, out);
            cong_sites_v(n.arg, [&](const ValuePtr& w) { return put(app(n.fun, w)); }, out);
          },
      },
      p->node);
}

inline void cong_sites_v(const ValuePtr& v, const VPut& put, std::vector<ProcessPtr>& out) {
  std::visit(overloaded{
                 [&](const Unit&) {}, [&](const Var&) {},
                 [&](const Abs& n) {
                   cong_sites(n.body,
                              [&](const ProcessPtr& q) { return put(abs(n.kind, n.var, q)); }, out);
                 },
                 [&](const BoxV& n) {
                   cong_sites_v(n.inner, [&](const ValuePtr& w) { return put(box(n.kind, w)); },
                                out);
                 },
             },
             v->node);
}

// binder sites for alpha renaming: rebuilders producing the renamed process
inline void alpha_sites_v(const ValuePtr& v, const VPut& put,
                          std::vector<std::function<ProcessPtr(const std::string&)>>& out);
inline void alpha_sites(const ProcessPtr& p, const PPut& put,
                        std::vector<std::function<ProcessPtr(const std::string&)>>& out) {
  std::visit(
      overloaded{
          [&](const Nil&) {},
          [&](const Par& n) {
            alpha_sites(n.left, [put, n](const ProcessPtr& q) { return put(par(q, n.right)); },
                        out);
            alpha_sites(n.right, [put, n](const ProcessPtr& q) { return put(par(n.left, q)); },
                        out);
          },
          [&](const Input& n) {
            out.push_back([put, n](const std::string& fresh) {
              return put(input(n.chan, n.kind, fresh, rename_var(n.body, n.var, fresh)));
            });
            alpha_sites(n.body,
                        [put, n](const ProcessPtr& q) { return put(input(n.chan, n.kind, n.var, q)); },
                        out);
          },
          [&](const Output& n) {
            alpha_sites_v(n.payload,
                          [put, n](const ValuePtr& w) { return put(output(n.chan, w, n.cont)); },
                          out);
            alpha_sites(n.cont,
                        [put, n](const ProcessPtr& q) { return put(output(n.chan, n.payload, q)); },
                        out);
          },
          [&](const Restrict& n) {
            out.push_back([put, n](const std::string& fresh) {
              return put(nu(fresh, rename_chan(n.body, n.chan, fresh)));
            });
            alpha_sites(n.body, [put, n](const ProcessPtr& q) { return put(nu(n.chan, q)); }, out);
          },
          [&](const App& n) {
            alpha_sites_v(n.fun, [put, n](const ValuePtr& w) { return put(app(w, n.arg)); }, out);
            alpha_sites_v(n.arg, [put, n](const ValuePtr& w) { return put(app(n.fun, w)); }, out);
          },
      },
      p->node);
}
inline void alpha_sites_v(const ValuePtr& v, const VPut& put,
                          std::vector<std::function<ProcessPtr(const std::string&)>>& out) {
  std::visit(overloaded{
                 [&](const Unit&) {}, [&](const Var&) {},
                 [&](const Abs& n) {
                   out.push_back([put, n](const std::string& fresh) {
                     return put(abs(n.kind, fresh, rename_var(n.body, n.var, fresh)));
                   });
                   alpha_sites(n.body,
                               [put, n](const ProcessPtr& q) { return put(abs(n.kind, n.var, q)); },
                               out);
                 },
                 [&](const BoxV& n) {
                   alpha_sites_v(n.inner,
                                 [put, n](const ValuePtr& w) { return put(box(n.kind, w)); }, out);
                 },
             },
             v->node);
}

}  // namespace detail

// Every process one congruence-law application away from p (commutativity,
// associativity, restriction swap, and scope extrusion in both directions,
// applied at any depth). Alpha renamings are drawn separately.
inline std::vector<ProcessPtr> congruence_variants(const ProcessPtr& p) {
  std::vector<ProcessPtr> out;
  detail::cong_sites(p, [](const ProcessPtr& q) { return q; }, out);
  return out;
}

// One random congruence rewrite (a structural law or an alpha renaming).
inline ProcessPtr congruence_rewrite(const ProcessPtr& p, std::mt19937_64& rng) {
  std::vector<std::function<ProcessPtr(const std::string&)>> alphas;
  detail::alpha_sites(p, [](const ProcessPtr& q) { return q; }, alphas);
  auto variants = congruence_variants(p);
  bool want_alpha = !alphas.empty() && (variants.empty() || rng() % 4 == 0);
  if (want_alpha) {
    std::set<std::string> vars, chans;
    detail::all_names(p, vars, chans);
    std::string fresh;
    for (uint64_t k = rng() % 1000;; ++k) {
      fresh = "q" + std::to_string(k);
      if (!vars.count(fresh) && !chans.count(fresh)) break;
    }
    return alphas[rng() % alphas.size()](fresh);
  }
  if (variants.empty()) return p;
  return variants[rng() % variants.size()];
}

// ---- exhaustive enumeration ------------------------------------------------------

namespace detail {

inline std::string enum_var(int i) { return "v" + std::to_string(i); }
inline std::string enum_chan(int c) {
  if (c == 0) return "a";
  if (c == 1) return "b";
  return "r" + std::to_string(c - 2);
}

// The callbacks are type-erased: a generic callback parameter would nest a
// fresh closure type per recursion level and never stop instantiating.
using ProcSink = std::function<bool(const ProcessPtr&)>;
using ValueSink = std::function<bool(const ValuePtr&)>;

inline bool enum_values(int s, int vd, int cd, const ValueSink& f);

// vd in-scope variables, cd bound channels (plus free channels a and b)
inline bool enum_procs(int s, int vd, int cd, const ProcSink& f) {
  if (s < 1) return true;
  if (s == 1) return f(nil());
  // input prefixes
  for (int c = 0; c < 2 + cd; ++c)
    for (BinderKind k : {BinderKind::Linear, BinderKind::Bang, BinderKind::Spawn}) {
      bool go = enum_procs(s - 1, vd + 1, cd, [&](const ProcessPtr& body) {
        return f(input(enum_chan(c), k, enum_var(vd), body));
      });
      if (!go) return false;
    }
  // output prefixes
  for (int c = 0; c < 2 + cd; ++c)
    for (int sv = 1; sv <= s - 2; ++sv) {
      bool go = enum_values(sv, vd, cd, [&](const ValuePtr& pay) {
        return enum_procs(s - 1 - sv, vd, cd, [&](const ProcessPtr& cont) {
          return f(output(enum_chan(c), pay, cont));
        });
      });
      if (!go) return false;
    }
  // restriction
  {
    bool go = enum_procs(s - 1, vd, cd + 1,
                         [&](const ProcessPtr& body) { return f(nu(enum_chan(2 + cd), body)); });
    if (!go) return false;
  }
  // parallel
  for (int sl = 1; sl <= s - 2; ++sl) {
    bool go = enum_procs(sl, vd, cd, [&](const ProcessPtr& l) {
      return enum_procs(s - 1 - sl, vd, cd, [&](const ProcessPtr& r) { return f(par(l, r)); });
    });
    if (!go) return false;
  }
  // application
  for (int sf = 1; sf <= s - 2; ++sf) {
    bool go = enum_values(sf, vd, cd, [&](const ValuePtr& fun) {
      return enum_values(s - 1 - sf, vd, cd, [&](const ValuePtr& arg) { return f(app(fun, arg)); });
    });
    if (!go) return false;
  }
  return true;
}

inline bool enum_values(int s, int vd, int cd, const ValueSink& f) {
  if (s < 1) return true;
  if (s == 1) {
    if (!f(unit())) return false;
    for (int i = 0; i < vd; ++i)
      if (!f(var(enum_var(i)))) return false;
    return true;
  }
  for (BinderKind k : {BinderKind::Linear, BinderKind::Bang, BinderKind::Spawn}) {
    bool go = enum_procs(s - 1, vd + 1, cd,
                         [&](const ProcessPtr& body) { return f(abs(k, enum_var(vd), body)); });
    if (!go) return false;
  }
  for (BoxKind k : {BoxKind::Bang, BoxKind::Spawn}) {
    bool go = enum_values(s - 1, vd, cd, [&](const ValuePtr& v) { return f(box(k, v)); });
    if (!go) return false;
  }
  return true;
}

inline uint64_t count_procs(int s, int vd, int cd);
inline uint64_t count_values(int s, int vd, int cd);

inline std::map<std::tuple<int, int, int>, uint64_t>& count_memo(bool values) {
  static std::map<std::tuple<int, int, int>, uint64_t> procs, vals;
  return values ? vals : procs;
}

inline uint64_t count_procs(int s, int vd, int cd) {
  if (s < 1) return 0;
  if (s == 1) return 1;
  auto key = std::make_tuple(s, vd, cd);
  auto& memo = count_memo(false);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  uint64_t n = 0;
  n += 3ULL * (2 + cd) * count_procs(s - 1, vd + 1, cd);  // inputs
  for (int sv = 1; sv <= s - 2; ++sv)
    n += (2ULL + cd) * count_values(sv, vd, cd) * count_procs(s - 1 - sv, vd, cd);
  n += count_procs(s - 1, vd, cd + 1);
  for (int sl = 1; sl <= s - 2; ++sl)
    n += count_procs(sl, vd, cd) * count_procs(s - 1 - sl, vd, cd);
  for (int sf = 1; sf <= s - 2; ++sf)
    n += count_values(sf, vd, cd) * count_values(s - 1 - sf, vd, cd);
  memo[key] = n;
  return n;
}

inline uint64_t count_values(int s, int vd, int cd) {
  if (s < 1) return 0;
  if (s == 1) return 1ULL + vd;
  auto key = std::make_tuple(s, vd, cd);
  auto& memo = count_memo(true);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  uint64_t n = 3ULL * count_procs(s - 1, vd + 1, cd) + 2ULL * count_values(s - 1, vd, cd);
  memo[key] = n;
  return n;
}

}  // namespace detail

// Streams every closed process of exactly the given size (all binder kinds
// and boxes; free channels drawn from {a, b}; binders named by scope depth,
// so each alpha-class appears exactly once). Stops early when emit returns
// false; the return value says whether the enumeration ran to completion.
inline bool enumerate_closed(int size, const std::function<bool(const ProcessPtr&)>& emit) {
  return detail::enum_procs(size, 0, 0, emit);
}

inline uint64_t count_closed(int size) { return detail::count_procs(size, 0, 0); }

}  // namespace softpi
