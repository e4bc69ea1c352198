#include <catch2/catch_amalgamated.hpp>

#include "finsynth/formula.hpp"
#include "finsynth/parser.hpp"
#include "testutil.hpp"

using namespace finsynth;

static const AtomPartition kPQ = testutil::make_atoms({"p", "q"}, {});
static const AtomPartition kYX = testutil::make_atoms({"y"}, {"x"});

TEST_CASE("parse produces the expected AST") {
  Formula f = parse("y U x", kYX);
  REQUIRE(f.op() == Op::Until);
  REQUIRE(f.left().op() == Op::Atom);
  REQUIRE(f.left().atom_name() == "y");
  REQUIRE(f.right().atom_name() == "x");
}

TEST_CASE("negated next normalizes to weak next") {
  Formula f = to_nnf(parse("!X p", kPQ));
  REQUIRE(f.op() == Op::WeakNext);
  REQUIRE(f.left().op() == Op::Not);
  REQUIRE(f.left().left().atom_name() == "p");
}

TEST_CASE("syntax error reports the offending position") {
  try {
    parse("p & | q", kPQ);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.position() == 4);
  }
}

TEST_CASE("undeclared atoms are rejected by name") {
  REQUIRE_THROWS_AS(parse("p & zz", kPQ), UndeclaredAtomError);
}

TEST_CASE("until clause unfolds directly") {
  Formula f = parse("p U q", kPQ);
  FiniteTrace pi{0b01u, 0b11u};  // {p}, {p,q}
  REQUIRE(evaluate(f, kPQ, pi, 0));
}

TEST_CASE("strong next fails at the last position") {
  Formula f = parse("X p", kPQ);
  FiniteTrace pi{0b01u};
  REQUIRE_FALSE(evaluate(f, kPQ, pi, 0));
}

TEST_CASE("weak next holds vacuously at the last position") {
  Formula f = parse("N p", kPQ);
  FiniteTrace pi{0u};
  REQUIRE(evaluate(f, kPQ, pi, 0));
}

TEST_CASE("negated until dualizes to release") {
  Formula f = to_nnf(Formula::negate(parse("p U q", kPQ)));
  REQUIRE(f.op() == Op::Release);
  REQUIRE(f.left().op() == Op::Not);
  REQUIRE(f.left().left().atom_name() == "p");
  REQUIRE(f.right().op() == Op::Not);
  REQUIRE(f.right().left().atom_name() == "q");
}

TEST_CASE("double negation cancels") {
  Formula f = to_nnf(Formula::negate(Formula::negate(parse("p", kPQ))));
  REQUIRE(f.op() == Op::Atom);
  REQUIRE(f.atom_name() == "p");
}

TEST_CASE("nnf preserves semantics on random triples") {
  std::mt19937_64 rng(42);
  int checked = 0;
  while (checked < 1000) {
    Formula f = testutil::random_formula(rng, kYX, 4);
    Formula g = to_nnf(f);
    int len = 1 + static_cast<int>(rng() % 4);
    FiniteTrace pi;
    for (int i = 0; i < len; ++i)
      pi.push_back(static_cast<Letter>(rng() % kYX.num_letters()));
    int pos = static_cast<int>(rng() % pi.size());
    REQUIRE(evaluate(f, kYX, pi, pos) == evaluate(g, kYX, pi, pos));
    ++checked;
  }
}

TEST_CASE("last marks exactly the final position") {
  Formula f = Formula::last();
  testutil::for_all_traces(kYX, 3, [&](const FiniteTrace& pi) {
    for (std::size_t i = 0; i < pi.size(); ++i)
      REQUIRE(evaluate(f, kYX, pi, static_cast<int>(i)) ==
              (i + 1 == pi.size()));
  });
}

TEST_CASE("eventually is until of true") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    Formula body = testutil::random_formula(rng, kPQ, 2);
    Formula ev = Formula::until(Formula::make_true(), body);
    int len = 1 + static_cast<int>(rng() % 4);
    FiniteTrace pi;
    for (int i = 0; i < len; ++i)
      pi.push_back(static_cast<Letter>(rng() % kPQ.num_letters()));
    for (std::size_t i = 0; i < pi.size(); ++i) {
      bool any = false;
      for (std::size_t j = i; j < pi.size(); ++j)
        any = any || evaluate(body, kPQ, pi, static_cast<int>(j));
      REQUIRE(evaluate(ev, kPQ, pi, static_cast<int>(i)) == any);
    }
  }
}

TEST_CASE("pretty-print round-trips through the parser") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 300; ++round) {
    Formula f = testutil::random_formula(rng, kYX, 4);
    Formula g = parse(to_string(f), kYX);
    REQUIRE(f == g);
  }
}

TEST_CASE("evaluate rejects out-of-range positions") {
  FiniteTrace pi{0u};
  REQUIRE_THROWS_AS(evaluate(Formula::make_true(), kPQ, pi, 1),
                    Error);
}
