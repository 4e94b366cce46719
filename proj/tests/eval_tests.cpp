#include "doctest.h"

#include <random>

#include "dedalus/datalog_text.hpp"
#include "dedalus/eval.hpp"
#include "test_util.hpp"

using namespace dedalus;

TEST_CASE("immediate consequence adds one round of derived heads") {
  Program p = parse_program("t(U,V) <- r(U,V).");
  Instance j = mk_instance({F("r", "a", "b")});
  CHECK(immediate_consequence(p, j) ==
        mk_instance({F("r", "a", "b"), F("t", "a", "b")}));

  CHECK(immediate_consequence(Program{}, j) == j);

  Program pn = parse_program("t(U,V) <- r(U,V), not s(V).");
  Instance jn = mk_instance({F("r", "a", "b"), F("s", "b")});
  CHECK(immediate_consequence(pn, jn) == jn);  // blocked by s(b)
}

TEST_CASE("one_step returns derived heads only") {
  Program p = parse_program("t(U,V) <- r(U,V).");
  Instance j = mk_instance({F("r", "a", "b")});
  CHECK(one_step(p, j) == mk_instance({F("t", "a", "b")}));
  CHECK(one_step(Program{}, j).empty());
}

TEST_CASE("one_step decomposes immediate consequence") {
  Program p = parse_program(
      "t(U,V) <- r(U,V).\n"
      "q(U) <- r(U,V), not s(U).\n");
  Instance j = mk_instance({F("r", "a", "b"), F("r", "b", "b"), F("s", "a")});
  Instance step = one_step(p, j);
  CHECK(step.subset_of(immediate_consequence(p, j)));
  Instance both = j;
  both.insert_all(step);
  CHECK(immediate_consequence(p, j) == both);
}

TEST_CASE("semi-positive fixpoint computes transitive closure") {
  Program p = parse_program(
      "t(U,V) <- r(U,V).\n"
      "t(U,V) <- t(U,W), r(W,V).\n");
  Instance i = mk_instance({F("r", "a", "b"), F("r", "b", "c")});
  Instance expect = i;
  expect.insert(F("t", "a", "b"));
  expect.insert(F("t", "b", "c"));
  expect.insert(F("t", "a", "c"));
  CHECK(semi_positive_fixpoint(p, i) == expect);
}

TEST_CASE("semi-positive fixpoint on empty input is empty") {
  Program p = parse_program("t(U,V) <- r(U,V).");
  CHECK(semi_positive_fixpoint(p, Instance{}).empty());
}

TEST_CASE("semi-positive negation on edb relations") {
  Program p = parse_program("t(U) <- r(U), not s(U).");
  Instance i = mk_instance({F("r", "a"), F("r", "b"), F("s", "b")});
  Instance expect = i;
  expect.insert(F("t", "a"));
  CHECK(semi_positive_fixpoint(p, i) == expect);
}

TEST_CASE("semi-positive rejects negation on derived relations") {
  Program p = parse_program(
      "t(U) <- r(U).\n"
      "q(U) <- r(U), not t(U).\n");
  CHECK_THROWS_AS(semi_positive_fixpoint(p, mk_instance({F("r", "a")})),
                  NotSemiPositive);
}

TEST_CASE("input is contained in the fixpoint") {
  Program p = parse_program("t(U) <- r(U), not s(U).");
  Instance i = mk_instance({F("r", "a"), F("s", "a"), F("t", "b")});
  CHECK(i.subset_of(semi_positive_fixpoint(p, i)));
}

TEST_CASE("stratification numbers strata from one") {
  Program p = parse_program(
      "t(U) <- r(U).\n"
      "s(U) <- t(U), not q(U).\n"
      "q(U) <- r(U).\n");
  StratumMap sm = stratify(p);
  CHECK(sm == StratumMap{{"q", 1}, {"t", 1}, {"s", 2}});
}

TEST_CASE("negative cycles are reported with a witness") {
  Program p = parse_program("win(U) <- move(U,V), not win(V).");
  try {
    stratify(p);
    FAIL("expected NotStratifiable");
  } catch (const NotStratifiable& e) {
    CHECK(e.cycle == std::vector<std::string>{"win"});
  }
}

TEST_CASE("positive programs live in stratum one") {
  Program p = parse_program(
      "t(U,V) <- r(U,V).\n"
      "s(U) <- t(U,U).\n");
  for (const auto& [rel, stratum] : stratify(p)) CHECK(stratum == 1);
}

TEST_CASE("stratified evaluation of the graph-cover rules") {
  // deductive subset of the vertex-cover corpus program
  Program p = parse_program(
      "marked(V) <- marked(U), r(U,V).\n"
      "vert(U) <- r(U,V).\n"
      "vert(U) <- r(V,U).\n"
      "missing() <- vert(U), not marked(U).\n"
      "covered() <- vert(U), not missing().\n");
  Instance i = mk_instance({F("r", "a", "b"), F("marked", "a")});
  Instance expect = i;
  expect.insert(F("vert", "a"));
  expect.insert(F("vert", "b"));
  expect.insert(F("marked", "b"));
  expect.insert(F("covered"));
  CHECK(stratified_eval(p, i) == expect);
}

TEST_CASE("stratified evaluation trivia") {
  Instance i = mk_instance({F("r", "a")});
  CHECK(stratified_eval(Program{}, i) == i);
  Program p = parse_program("p() <- not q().");
  CHECK(stratified_eval(p, Instance{}) == mk_instance({F("p")}));
}

TEST_CASE("grounding enumerates the active domain") {
  Program p1 = parse_program("p(U) <- r(U).");
  GroundProgram g1 = ground(p1, mk_instance({F("r", "a")}));
  REQUIRE(g1.rules.size() == 1);
  CHECK(g1.rules[0].head == Atom{"p", {Term{Value::sym("a")}}});

  // nullary rules survive an empty input
  Program p2 = parse_program("p() <- q().");
  GroundProgram g2 = ground(p2, Instance{});
  REQUIRE(g2.rules.size() == 1);
  CHECK(g2.rules[0].is_ground());

  // the domain comes from the whole instance, not just matching atoms
  Program p3 = parse_program("p(U) <- r(U), not s(U).");
  GroundProgram g3 = ground(p3, mk_instance({F("r", "a"), F("s", "b")}));
  CHECK(g3.rules.size() == 2);
}

TEST_CASE("reduct drops refuted rules and strips negation") {
  Program p = parse_program("p() <- not q().");

  GroundProgram g = ground(p, Instance{});
  std::vector<Rule> kept = reduct(g, mk_instance({F("p")}));
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].pos.empty());
  CHECK(kept[0].neg.empty());

  CHECK(reduct(g, mk_instance({F("q")})).empty());

  Program pos = parse_program("p(U) <- r(U).");
  GroundProgram gp = ground(pos, mk_instance({F("r", "a")}));
  CHECK(reduct(gp, mk_instance({F("q")})) == gp.rules);
}

TEST_CASE("reduct output never contains negative atoms") {
  Program p = parse_program(
      "p(U) <- r(U), not q(U).\n"
      "q(U) <- r(U), not p(U).\n");
  GroundProgram g = ground(p, mk_instance({F("r", "a"), F("r", "b")}));
  for (const Rule& r : reduct(g, mk_instance({F("p", "a")}))) CHECK(r.neg.empty());
}

TEST_CASE("stable model verdicts on the classic examples") {
  Program p = parse_program("p() <- not q().");
  CHECK(is_stable_model(p, Instance{}, mk_instance({F("p")})).stable);

  Program odd = parse_program("p() <- not p().");
  CHECK(!is_stable_model(odd, Instance{}, mk_instance({F("p")})).stable);
  CHECK(!is_stable_model(odd, Instance{}, Instance{}).stable);
}

TEST_CASE("the stratified model is stable") {
  Program p = parse_program(
      "t(U) <- r(U), not s(U).\n"
      "q(U) <- t(U).\n");
  Instance i = mk_instance({F("r", "a"), F("r", "b"), F("s", "b")});
  Instance m = stratified_eval(p, i);
  StableVerdict v = is_stable_model(p, i, m);
  CHECK(v.stable);
  CHECK(v.missing.empty());
  CHECK(v.extra.empty());
}

TEST_CASE("failed checks report the symmetric difference") {
  Program p = parse_program("p() <- not q().");
  StableVerdict v = is_stable_model(p, Instance{}, mk_instance({F("q")}));
  CHECK(!v.stable);
  CHECK(v.missing == mk_instance({F("q")}));
  CHECK(v.extra.empty());
}

TEST_CASE("fixed-negation fixpoint matches the materialized reduct") {
  Program p = parse_program(
      "p(U) <- r(U), not q(U).\n"
      "q(U) <- r(U), not p(U).\n");
  Instance i = mk_instance({F("r", "a"), F("r", "b")});
  // all 16 candidate extensions of I by p/q facts over {a,b}
  std::vector<Fact> atoms = {F("p", "a"), F("p", "b"), F("q", "a"), F("q", "b")};
  for (unsigned bits = 0; bits < 16; ++bits) {
    Instance m = i;
    for (unsigned k = 0; k < atoms.size(); ++k)
      if (bits & (1u << k)) m.insert(atoms[k]);
    GroundProgram g = ground(p, i);
    Instance direct = semi_positive_fixpoint(Program(reduct(g, m)), i);
    CHECK(fixpoint_with_fixed_negation(p, i, m) == direct);
  }
}
