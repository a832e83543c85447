#include <catch_amalgamated.hpp>
#include <fstream>
#include <softpi/parser.hpp>

using namespace softpi;

static ProcessPtr P(const std::string& s) { return parse_process_text(s); }

TEST_CASE("core forms parse") {
  CHECK(std::holds_alternative<Nil>(P("0")->node));
  CHECK(std::holds_alternative<Par>(P("0 | 0")->node));
  CHECK(std::holds_alternative<Restrict>(P("new a.0")->node));
  CHECK(std::holds_alternative<App>(P("(* *)")->node));

  auto& in = std::get<Input>(P("a(#x).0")->node);
  CHECK(in.kind == BinderKind::Spawn);
  auto& out = std::get<Output>(P("a<!*>.b<*>.0")->node);
  CHECK(std::get<BoxV>(out.payload->node).kind == BoxKind::Bang);
  CHECK(std::holds_alternative<Output>(out.cont->node));
}

TEST_CASE("parallel composition is left-associative and grouped by parens") {
  auto p = P("0 | a<*>.0 | 0");
  auto& top = std::get<Par>(p->node);
  CHECK(std::holds_alternative<Par>(top.left->node));
  CHECK(std::holds_alternative<Nil>(top.right->node));

  auto q = P("0 | (a<*>.0 | 0)");
  auto& qt = std::get<Par>(q->node);
  CHECK(std::holds_alternative<Nil>(qt.left->node));
  CHECK(std::holds_alternative<Par>(qt.right->node));
}

TEST_CASE("continuations bind tighter than parallel") {
  // a(x).P | Q splits at the bar, P must be parenthesized to span it
  auto p = P("a(x).0 | b<*>.0");
  CHECK(std::holds_alternative<Par>(p->node));
  auto q = P("a(x).(0 | b<*>.0)");
  CHECK(std::holds_alternative<Input>(q->node));
}

TEST_CASE("values parse standalone") {
  CHECK(std::holds_alternative<Unit>(parse_value_text("*")->node));
  CHECK(std::get<Var>(parse_value_text("x'")->node).name == "x'");
  auto f = parse_value_text("\\!x.(x *)");
  CHECK(std::get<Abs>(f->node).kind == BinderKind::Bang);
  auto b = parse_value_text("#(!*)");
  CHECK(std::get<BoxV>(b->node).kind == BoxKind::Spawn);
}

TEST_CASE("let bindings splice textually and capture") {
  auto spliced = P("let BODY = (x *)\n a(x).BODY");
  auto direct = P("a(x).(x *)");
  CHECK(equal(spliced, direct));  // the binder captures the spliced x

  auto v = P("let F = \\y.0\n (F F)");
  CHECK(equal(v, P("(\\y.0 \\y.0)")));
}

TEST_CASE("comments and whitespace are skipped") {
  auto p = P("-- leading note\n0 | -- middle\n 0 -- trailing");
  CHECK(std::holds_alternative<Par>(p->node));
}

TEST_CASE("printer output reparses to the same tree") {
  const char* samples[] = {
      "0",
      "a(x).((x *) | a<x>.0)",
      "new a.new b.((\\!y.(a(!x).((x (!*)) | b<!x>.0)) (!*)) | 0)",
      "a<#(\\#z.(z *))>.0 | b(#w).(w #*)",
      "((\\x.0 *) | new c.c<\\y.(y *)>.0) | 0",
  };
  for (const char* s : samples) {
    auto p = P(s);
    auto printed = print_process(p);
    CAPTURE(s, printed);
    CHECK(equal(p, P(printed)));
  }
}

TEST_CASE("corpus files parse and round-trip") {
  const char* names[] = {"nil.pi",        "omega.pi",       "server.pi",
                         "omega_bang.pi", "server_bang.pi", "server_box.pi"};
  for (const char* n : names) {
    auto p = parse_file(std::string(SOFTPI_CORPUS_DIR) + "/" + n);
    CAPTURE(n);
    CHECK(equal(p, P(print_process(p))));
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_process_text("0 |\n  a<*>.");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("2:") != std::string::npos);  // second line
  }
  CHECK_THROWS_AS(parse_process_text("new.0"), ParseError);
  CHECK_THROWS_AS(parse_process_text("a(x.0"), ParseError);
  CHECK_THROWS_AS(parse_process_text("(a<*>.0"), ParseError);
  CHECK_THROWS_AS(parse_process_text(""), ParseError);
  CHECK_THROWS_AS(parse_process_text("0 0"), ParseError);
  CHECK_THROWS_AS(parse_value_text("!"), ParseError);
}

TEST_CASE("undefined let names are plain identifiers") {
  // an unbound uppercase name is just a variable
  auto p = P("(FOO *)");
  CHECK(std::get<Var>(std::get<App>(p->node).fun->node).name == "FOO");
}
