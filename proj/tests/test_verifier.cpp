#include <catch_amalgamated.hpp>
#include <softpi/parser.hpp>
#include <softpi/verifier.hpp>

#include "support/rule_search.hpp"

using namespace softpi;

static ProcessPtr P(const std::string& s) { return parse_process_text(s); }

static ProcessPtr corpus(const std::string& name) {
  return parse_file(std::string(SOFTPI_CORPUS_DIR) + "/" + name);
}

TEST_CASE("a plain trace verifies with no soft obligations") {
  auto rep = verify_trace(run(corpus("omega.pi"), Strategy::First, 10), Calculus::Hopi);
  CHECK(rep.ok);
  CHECK(rep.invariants.at("initial-well-formed").checked == 1);
  CHECK(rep.invariants.at("subject-reduction").checked == 10);
  CHECK(rep.invariants.at("weight-ge-size").failed == 0);
  CHECK(rep.invariants.count("weight-strict-decrease") == 0);
  CHECK(rep.invariants.count("steps-le-poly-bound") == 0);
}

TEST_CASE("the boxed duplicator passes as unrestricted and fails as soft") {
  auto tr = run(corpus("omega_bang.pi"), Strategy::First, 6);
  REQUIRE(tr.steps.size() == 6);

  auto linear = verify_trace(tr, Calculus::Lhopi);
  CHECK(linear.ok);

  auto soft = verify_trace(tr, Calculus::Shopi);
  CHECK_FALSE(soft.ok);
  // every state is ill formed as a soft term, and the weight oscillates
  CHECK(soft.invariants.at("initial-well-formed").failed == 1);
  CHECK(soft.invariants.at("subject-reduction").failed == 6);
  CHECK(soft.invariants.at("weight-strict-decrease").failed > 0);
  CHECK_FALSE(soft.failures.empty());
  CHECK(soft.failures.front().invariant == "initial-well-formed");
}

TEST_CASE("spawn communication may raise the weight yet still verifies") {
  // the payload lands both in the plain branch and re-boxed behind the
  // input-channel prefix, so plain weight bounces up; the discounted
  // weight still falls and weight + progression does not grow
  auto p = P("a<#\\!z.((z z) | d<*>.d<*>.d<*>.0)>.0 | a(#x).((x *) | b(!y).c<#x>.0)");
  std::set<std::string> ic = {"b"};
  REQUIRE(check(p, Calculus::Eshopi, ic).ok);

  auto tr = run(p, Strategy::First, 10);
  REQUIRE(tr.steps.size() == 1);
  REQUIRE(tr.steps[0].chosen.kind == RedexKind::CommSpawn);

  auto pre = measure(tr.steps[0].process, ic);
  auto post = measure(tr.final, ic);
  CHECK(pre.wei == 39);
  CHECK(post.wei == 43);  // genuinely larger
  CHECK(*pre.webi == 33);
  CHECK(*post.webi == 15);

  auto rep = verify_trace(tr, Calculus::Eshopi, ic);
  CHECK(rep.ok);
  CHECK(rep.invariants.count("weight-strict-decrease") == 0);
  CHECK(rep.invariants.at("discounted-weight-strict-decrease").failed == 0);
  CHECK(rep.invariants.at("weight-plus-progression-non-increase").failed == 0);
}

TEST_CASE("the channelled server trace satisfies every guarantee") {
  auto tr = run(corpus("server_box.pi"), Strategy::First, 50);
  CHECK(tr.exhausted);
  auto rep = verify_trace(tr, Calculus::Eshopi, {"b"});
  CHECK(rep.ok);
  for (const auto& [name, st] : rep.invariants) {
    CAPTURE(name);
    CHECK(st.failed == 0);
  }
}

TEST_CASE("fuzzed terms hit the requested size and calculus exactly") {
  struct Cfg { Calculus calc; std::set<std::string> ic; };
  const Cfg cfgs[] = {{Calculus::Hopi, {}},
                      {Calculus::Lhopi, {}},
                      {Calculus::Shopi, {}},
                      {Calculus::Eshopi, {"b"}}};
  for (const auto& cfg : cfgs) {
    for (uint64_t seed = 1; seed <= 25; ++seed) {
      auto p = fuzz_generate(seed, 18, cfg.calc, cfg.ic);
      CAPTURE(to_string(cfg.calc), seed);
      CHECK(size(p) == 18);
      CHECK(check(p, cfg.calc, cfg.ic).ok);
      CHECK(free_vars(p).empty());
    }
  }
}

TEST_CASE("fuzzing is reproducible by seed") {
  auto a = fuzz_generate(9, 20, Calculus::Shopi);
  auto b = fuzz_generate(9, 20, Calculus::Shopi);
  CHECK(print_process(a) == print_process(b));
}

TEST_CASE("fuzzed soft traces uphold the soft guarantees") {
  for (uint64_t seed = 100; seed < 140; ++seed) {
    auto p = fuzz_generate(seed, 16, Calculus::Shopi);
    auto rep = verify_trace(run(p, Strategy::Random, 200, seed), Calculus::Shopi);
    CAPTURE(seed, print_process(p));
    CHECK(rep.ok);
  }
}

TEST_CASE("substitution stays within the additive bound for each class") {
  int linear_seen = 0, bang_seen = 0, dies_seen = 0;
  auto probe = [&](const ProcessPtr& p) {
    auto state = p;
    for (int i = 0; i < 50; ++i) {
      auto rs = redexes(state);
      if (rs.empty()) break;
      for (const auto& r : rs) {
        auto chk = check_substitution(state, r);
        if (!chk) continue;
        CAPTURE(chk->binder_class, print_process(state));
        CHECK(chk->ok_at_df);
        CHECK(chk->ok_at_one);
        if (chk->binder_class == "linear") ++linear_seen;
        if (chk->binder_class == "bang") ++bang_seen;
        if (chk->binder_class == "dies") ++dies_seen;
      }
      state = step(state, rs[0]);
    }
  };
  // deterministic single-class probes with a heavy payload
  probe(P("a<\\!w.((w w) | (w *))>.0 | a(x).(x *)"));      // linear
  probe(P("a<!\\!w.((w w) | (w *))>.0 | a(!x).b<!x>.0"));  // bang
  probe(P("a<!\\!w.((w w) | (w *))>.0 | a(!x).((x x))"));  // dies
  probe(corpus("omega_bang.pi"));
  for (uint64_t seed = 300; seed < 330; ++seed)
    probe(fuzz_generate(seed, 16, Calculus::Shopi));
  CHECK(linear_seen >= 1);
  CHECK(bang_seen >= 1);
  CHECK(dies_seen >= 2);  // the duplicator's dropped parameter plus the probe
}

TEST_CASE("undisciplined and spawn redexes get no substitution-bound check") {
  auto spawn = P("a<#*>.0 | a(#x).(x *)");
  auto rs = redexes(spawn);
  REQUIRE(rs.size() == 1);
  CHECK_FALSE(check_substitution(spawn, rs[0]).has_value());

  // a plain binder used twice fits no discipline
  auto twice = P("a<*>.0 | a(x).((x x))");
  CHECK_FALSE(check_substitution(twice, redexes(twice)[0]).has_value());

  // a marked binder both boxed and unboxed fits no discipline
  auto mixed = P("a<!*>.0 | a(!x).(b<!x>.0 | (x *))");
  CHECK_FALSE(check_substitution(mixed, redexes(mixed)[0]).has_value());
}

TEST_CASE("closed term counts match the stream and the pinned table") {
  CHECK(count_closed(1) == 1);
  CHECK(count_closed(2) == 7);
  CHECK(count_closed(3) == 56);
  CHECK(count_closed(4) == 522);
  for (int s = 1; s <= 5; ++s) {
    uint64_t emitted = 0;
    enumerate_closed(s, [&](const ProcessPtr& p) {
      ++emitted;
      if (emitted <= 3) {
        CHECK(size(p) == static_cast<uint64_t>(s));
        CHECK(free_vars(p).empty());
      }
      return true;
    });
    CAPTURE(s);
    CHECK(emitted == count_closed(s));
  }
}

TEST_CASE("the checker agrees with blind rule search on every small closed term") {
  struct Cfg { Calculus calc; std::set<std::string> ic; };
  const Cfg cfgs[] = {{Calculus::Hopi, {}},
                      {Calculus::Lhopi, {}},
                      {Calculus::Shopi, {}},
                      {Calculus::Eshopi, {}},
                      {Calculus::Eshopi, {"b"}}};
  uint64_t compared = 0, accepted = 0;
  for (int s = 1; s <= 5; ++s) {
    enumerate_closed(s, [&](const ProcessPtr& p) {
      for (const auto& cfg : cfgs) {
        bool fast = check(p, cfg.calc, cfg.ic).ok;
        bool slow = rulesearch::derivable(p, cfg.calc, cfg.ic);
        if (fast != slow) {
          CAPTURE(print_process(p), to_string(cfg.calc), cfg.ic.size(), fast, slow);
          REQUIRE(fast == slow);
        }
        ++compared;
        if (fast) ++accepted;
      }
      return true;
    });
  }
  CHECK(compared == 5 * (1 + 7 + 56 + 522 + 5407));
  CHECK(accepted > 0);
}

TEST_CASE("congruence rewriting preserves acceptance in every calculus") {
  std::mt19937_64 rng(5);
  for (uint64_t seed = 50; seed < 60; ++seed) {
    auto p = fuzz_generate(seed, 14, Calculus::Eshopi, {"b"});
    auto q = p;
    for (int i = 0; i < 20; ++i) q = congruence_rewrite(q, rng);
    CHECK(congruent(p, q));
    CHECK(check(q, Calculus::Eshopi, {"b"}).ok);
  }
}
