#include "doctest.h"

#include "dedalus/datalog_text.hpp"
#include "test_util.hpp"

using namespace dedalus;

TEST_CASE("head annotations are recognized") {
  auto rules = parse_rule_text(
      "p(U) <- e(U).\n"
      "p(U)@next <- p(U).\n"
      "p(U)@X <- e(U), id(X).\n");
  REQUIRE(rules.size() == 3);
  CHECK(rules[0].annotation == HeadAnnotation::None);
  CHECK(rules[1].annotation == HeadAnnotation::Next);
  CHECK(rules[2].annotation == HeadAnnotation::Async);
  CHECK(rules[2].addressee == "X");
}

TEST_CASE("comments and whitespace are skipped") {
  Program p = parse_program("% a comment\n  t(U) <- r(U). % trailing\n");
  CHECK(p.rules().size() == 1);
}

TEST_CASE("numbers parse as timestamps, lowercase identifiers as symbols") {
  auto rules = parse_rule_text("t(U) <- r(U, 3, abc).");
  const Atom& r = rules[0].rule.pos[0];
  CHECK(r.args[1] == Term{Value::ts(3)});
  CHECK(r.args[2] == Term{Value::sym("abc")});
}

TEST_CASE("nullary atoms need parentheses") {
  Program p = parse_program("p() <- q().");
  CHECK(p.rules()[0].head.args.empty());
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_program("t(U) <- r(U)");  // missing period
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }
  CHECK_THROWS_AS(parse_program("T(U) <- r(U)."), ParseError);  // uppercase relation
  CHECK_THROWS_AS(parse_program("t(U) <- r(U,)."), ParseError);
  try {
    parse_program("t(U) <- r(U).\nbroken");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("pure datalog entry point rejects annotations") {
  CHECK_THROWS_AS(parse_program("p(U)@next <- p(U)."), ParseError);
  CHECK_THROWS_AS(parse_program("p(U)@X <- e(U), id(X)."), ParseError);
}

TEST_CASE("print and reparse is the identity on rule sets") {
  Program p = parse_program(
      "t(U,V) <- r(U,V), not s(V).\n"
      "s2(U) <- r(U,U).\n"
      "p() <- q(), not t2().\n");
  Program q = parse_program(print_program(p));
  CHECK(p.rules() == q.rules());
}
