#include <catch_amalgamated.hpp>
#include <softpi/parser.hpp>
#include <softpi/wellformed.hpp>

using namespace softpi;

static ProcessPtr P(const std::string& s) { return parse_process_text(s); }

static ProcessPtr corpus(const std::string& name) {
  return parse_file(std::string(SOFTPI_CORPUS_DIR) + "/" + name);
}

static VarClass class_of(const WfReport& rep, const std::string& var, size_t nth = 0) {
  size_t seen = 0;
  for (const auto& b : rep.classifications)
    if (b.var == var && seen++ == nth) return b.cls;
  FAIL("no binder for " + var);
  return VarClass::LinearCls;
}

TEST_CASE("plain calculus accepts exactly the unmarked grammar") {
  CHECK(check_hopi(corpus("omega.pi")).ok);
  CHECK(check_hopi(corpus("server.pi")).ok);
  CHECK(check_hopi(P("a(x).((x x) | (x *))")).ok);  // no use restrictions
  CHECK_FALSE(check_hopi(P("a(!x).0")).ok);
  CHECK_FALSE(check_hopi(P("a<!*>.0")).ok);
  CHECK_FALSE(check_hopi(P("(\\#x.0 *)")).ok);
  CHECK(check_hopi(P("a(x).0")).classifications.empty());
}

TEST_CASE("linear binders demand exactly one plain use") {
  CHECK(check_lhopi(P("a(x).(x *)")).ok);
  CHECK_FALSE(check_lhopi(P("a(x).0")).ok);            // dropped
  CHECK_FALSE(check_lhopi(P("a(x).((x x))")).ok);      // duplicated
  CHECK_FALSE(check_lhopi(P("a(x).b<!x>.0")).ok);      // crossed into a box
  CHECK(check_lhopi(corpus("omega.pi")).ok == false);  // x used twice
}

TEST_CASE("unrestricted bang variables in the linear calculus") {
  auto rep = check_lhopi(P("a(!x).((x x) | b<!x>.(x *))"));
  REQUIRE(rep.ok);
  CHECK(class_of(rep, "x") == VarClass::BangCls);
  CHECK(check_lhopi(P("a(!x).0")).ok);  // weakening is fine
}

TEST_CASE("the boxed corpus pair separates the linear and soft disciplines") {
  for (const char* name : {"omega_bang.pi", "server_bang.pi"}) {
    auto p = corpus(name);
    CAPTURE(name);
    CHECK(check_lhopi(p).ok);
    auto soft = check_shopi(p);
    REQUIRE_FALSE(soft.ok);
    CHECK(soft.failure->site == "input a(!x)");
    CHECK(soft.failure->reason.find("outside and under") != std::string::npos);
  }
}

TEST_CASE("soft bang binders are either dropped-or-plain or used once boxed") {
  auto dies = check_shopi(P("a(!x).((x x) | (x *))"));
  REQUIRE(dies.ok);
  CHECK(class_of(dies, "x") == VarClass::DiesCls);

  auto bang = check_shopi(P("a(!x).b<!x>.0"));
  REQUIRE(bang.ok);
  CHECK(class_of(bang, "x") == VarClass::BangCls);

  CHECK(check_shopi(P("a(!x).0")).ok);                     // zero uses: weakening
  CHECK_FALSE(check_shopi(P("a(!x).b<!(!x)>.0")).ok);      // too deep
  CHECK_FALSE(check_shopi(P("a(!x).(b<!x>.0 | (x *))")).ok);  // plain and boxed
  CHECK_FALSE(check_shopi(P("a(!x).(b<!x>.c<!x>.0)")).ok);    // boxed twice
}

TEST_CASE("nested box diagnostics name the offending shape") {
  auto deep = check_shopi(P("a(!x).b<!(!x)>.0"));
  REQUIRE_FALSE(deep.ok);
  CHECK(deep.failure->reason.find("nested") != std::string::npos);

  auto mixed = check_eshopi(P("a(!x).b<#(!x)>.0"), {});
  REQUIRE_FALSE(mixed.ok);
  CHECK(mixed.failure->reason.find("both ! and #") != std::string::npos);
}

TEST_CASE("closed nested boxes are fine, only binder crossings fail") {
  CHECK(check_shopi(P("b<!(!*)>.0")).ok);
  CHECK(check_eshopi(P("b<#(!(#*))>.0"), {}).ok);
}

TEST_CASE("spawn constructs exist only in the channelled calculus") {
  CHECK_FALSE(check_shopi(P("a(#x).a<#x>.0")).ok);
  CHECK_FALSE(check_lhopi(P("b<#*>.0")).ok);
  CHECK(check_eshopi(P("a(#x).a<#x>.0"), {}).ok);
}

TEST_CASE("spawn binders need their boxed copy") {
  auto rep = check_eshopi(P("a(#x).b<#x>.0"), {});
  REQUIRE(rep.ok);
  CHECK(class_of(rep, "x") == VarClass::SangCls);
  CHECK_FALSE(check_eshopi(P("a(#x).0"), {}).ok);        // dropped
  CHECK_FALSE(check_eshopi(P("a(#x).(x *)"), {}).ok);    // plain only
  CHECK_FALSE(check_eshopi(P("a(#x).b<!x>.0"), {}).ok);  // wrong box kind
}

TEST_CASE("sharing a spawn variable requires an input-channel prefix between fork and box") {
  const char* shared = "a(#x).((x *) | b(!y).c<#x>.0)";
  auto ok = check_eshopi(P(shared), {"b"});
  REQUIRE(ok.ok);
  CHECK(class_of(ok, "x") == VarClass::DangCls);

  auto no_ic = check_eshopi(P(shared), {});
  REQUIRE_FALSE(no_ic.ok);
  CHECK(no_ic.failure->reason.find("input-channel prefix") != std::string::npos);

  // the prefix must come after the fork: here it guards both branches
  auto above = check_eshopi(P("b(!y).a(#x).((x *) | c<#x>.0)"), {"b"});
  CHECK_FALSE(above.ok);

  // a restriction shadows the channel and disables the promotion
  auto shadowed = check_eshopi(P("a(#x).((x *) | new b.b(!y).c<#x>.0)"), {"b"});
  CHECK_FALSE(shadowed.ok);
}

TEST_CASE("the boxed server corpus term classifies as shared spawn") {
  auto sb = corpus("server_box.pi");
  auto rep = check_eshopi(sb, {"b"});
  REQUIRE(rep.ok);
  // the component is spliced twice, so both x binders appear
  CHECK(class_of(rep, "x", 0) == VarClass::DangCls);
  CHECK(class_of(rep, "x", 1) == VarClass::DangCls);
  CHECK(class_of(rep, "y", 0) == VarClass::BangCls);
  CHECK(class_of(rep, "z", 0) == VarClass::DiesCls);

  auto bare = check_eshopi(sb, {});
  REQUIRE_FALSE(bare.ok);
  CHECK(bare.failure->site.find("a(#x)") != std::string::npos);
}

TEST_CASE("outputs on live input channels are rejected") {
  auto rep = check_eshopi(P("b<*>.0"), {"b"});
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.failure->reason.find("input channels") != std::string::npos);
  CHECK(check_eshopi(P("new b.b<*>.0"), {"b"}).ok);   // shadowed away
  CHECK(check_eshopi(P("b(x).(x *)"), {"b"}).ok);     // inputs are the point
}

TEST_CASE("free variables classify existentially") {
  CHECK(check_lhopi(P("(x *)")).ok);
  CHECK(check_shopi(P("(x *) | (x x)")).ok);       // a dropped-class free variable
  CHECK(check_shopi(P("b<!x>.0")).ok);             // a boxed-class free variable
  CHECK_FALSE(check_shopi(P("b<!x>.(x *)")).ok);   // no class covers both
  CHECK(check_eshopi(P("b<#x>.0"), {}).ok);        // spawn-class free variable
}

TEST_CASE("reports localize the failing binder") {
  auto rep = check_shopi(P("0 | a(!x).(b<!x>.0 | (x *))"));
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.failure->site == "input a(!x)");
  CHECK(rep.failure->path == std::vector<int>{1});
}

TEST_CASE("the calculus dispatcher routes by name") {
  auto p = corpus("omega.pi");
  CHECK(check(p, Calculus::Hopi).ok);
  CHECK_FALSE(check(p, Calculus::Lhopi).ok);
  CHECK(to_string(Calculus::Eshopi) == std::string("eshopi"));
  CHECK(to_string(VarClass::DangCls) == std::string("dang"));
}
