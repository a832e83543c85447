#include <catch_amalgamated.hpp>
#include <softpi/congruence.hpp>
#include <softpi/metrics.hpp>
#include <softpi/parser.hpp>
#include <softpi/verifier.hpp>

#include <random>

using namespace softpi;

static ProcessPtr P(const std::string& s) { return parse_process_text(s); }

static bool cong(const std::string& a, const std::string& b) {
  return congruent(P(a), P(b));
}

TEST_CASE("parallel composition commutes and reassociates") {
  CHECK(cong("a<*>.0 | b<*>.0", "b<*>.0 | a<*>.0"));
  CHECK(cong("(a<*>.0 | b<*>.0) | c<*>.0", "a<*>.0 | (b<*>.0 | c<*>.0)"));
  CHECK(cong("0 | 0 | a(x).0", "a(x).0 | 0 | 0"));
}

TEST_CASE("renaming bound names is invisible") {
  CHECK(cong("a(x).(x *)", "a(y).(y *)"));
  CHECK(cong("new a.a<*>.0", "new b.b<*>.0"));
  CHECK_FALSE(cong("a(x).(x *)", "b(x).(x *)"));  // free names stay rigid
}

TEST_CASE("adjacent restrictions swap") {
  CHECK(cong("new a.new b.(a<*>.0 | b<*>.0)", "new b.new a.(a<*>.0 | b<*>.0)"));
}

TEST_CASE("restriction scope extrudes over parallel components that ignore it") {
  CHECK(cong("new a.(a<*>.0 | b<*>.0)", "(new a.a<*>.0) | b<*>.0"));
  CHECK(cong("b<*>.0 | new a.a<*>.0", "new a.(b<*>.0 | a<*>.0)"));
  // but not over components that mention the name
  CHECK_FALSE(cong("new a.(a<*>.0 | a(x).0)", "(new a.a<*>.0) | a(x).0"));
}

TEST_CASE("garbage collection laws are not part of the congruence") {
  CHECK_FALSE(cong("a<*>.0 | 0", "a<*>.0"));
  CHECK_FALSE(cong("new a.0", "0"));
  CHECK_FALSE(cong("new a.b<*>.0", "b<*>.0"));  // no vacuous-binder drop
}

TEST_CASE("duplicate parallel threads are kept apart from single ones") {
  CHECK_FALSE(cong("a<*>.0 | a<*>.0", "a<*>.0"));
  CHECK(cong("a<*>.0 | a<*>.0", "a<*>.0 | a<*>.0"));
}

TEST_CASE("congruence does not cross prefix boundaries") {
  // under a prefix the soup is frozen; only alpha applies there
  CHECK(cong("c(z).(a<*>.0 | b<*>.0)", "c(w).(a<*>.0 | b<*>.0)"));
  CHECK(cong("c(z).(a<*>.0 | b<*>.0)", "c(z).(b<*>.0 | a<*>.0)"));
  CHECK_FALSE(cong("c(z).(a<*>.0 | 0)", "c(z).a<*>.0"));
}

TEST_CASE("canonical forms are idempotent and stable") {
  for (const char* name : {"nil.pi", "omega.pi", "server.pi", "omega_bang.pi",
                           "server_bang.pi", "server_box.pi"}) {
    auto p = parse_file(std::string(SOFTPI_CORPUS_DIR) + "/" + name);
    auto c1 = canonical_form(p);
    auto c2 = canonical_form(c1.term);
    CAPTURE(name);
    CHECK(c1.key == c2.key);
    CHECK(size(c1.term) == size(p));  // canonicalization rearranges, never shrinks
  }
}

TEST_CASE("canonical soup splits top-level threads") {
  auto c = canonical_form(P("new a.(b<*>.0 | (a<*>.0 | 0))"));
  CHECK(c.restricted.size() == 1);
  CHECK(c.soup.size() == 3);
}

TEST_CASE("random congruence rewrites preserve the key and all metrics") {
  std::mt19937_64 rng(20260813);
  for (const char* name : {"omega.pi", "server_bang.pi", "server_box.pi"}) {
    auto p = parse_file(std::string(SOFTPI_CORPUS_DIR) + "/" + name);
    auto base = canonical_form(p);
    auto m0 = measure(p);
    auto q = p;
    for (int i = 0; i < 60; ++i) {
      q = congruence_rewrite(q, rng);
      REQUIRE(canonical_form(q).key == base.key);
      auto m1 = measure(q);
      CHECK(m1.size == m0.size);
      CHECK(m1.wei == m0.wei);
      CHECK(m1.df == m0.df);
      CHECK(m1.poly_bound == m0.poly_bound);
    }
  }
}

TEST_CASE("rewrites actually move: most chains visit several distinct terms") {
  std::mt19937_64 rng(7);
  auto p = parse_file(std::string(SOFTPI_CORPUS_DIR) + "/server.pi");
  std::set<std::string> seen;
  auto q = p;
  for (int i = 0; i < 40; ++i) {
    q = congruence_rewrite(q, rng);
    seen.insert(print_process(q));
  }
  CHECK(seen.size() >= 3);
}
