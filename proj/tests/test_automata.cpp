#include <catch2/catch_amalgamated.hpp>

#include "finsynth/arena_ops.hpp"
#include "finsynth/dfa_build.hpp"
#include "finsynth/games.hpp"
#include "finsynth/parser.hpp"
#include "testutil.hpp"

using namespace finsynth;

static const AtomPartition kP = testutil::make_atoms({"p"}, {});
static const AtomPartition kYX = testutil::make_atoms({"y"}, {"x"});

TEST_CASE("dfa of a single atom has three states") {
  Dfa m = ltlf_to_dfa(parse("p", kP), kP);
  REQUIRE(m.ts.num_states == 3);
  REQUIRE(count(m.finals) == 1);
  testutil::for_all_traces(kP, 4, [&](const FiniteTrace& pi) {
    REQUIRE(m.accepts(pi) == evaluate(parse("p", kP), kP, pi, 0));
  });
}

TEST_CASE("dfa of true is the two-state all-accepting machine") {
  Dfa m = ltlf_to_dfa(Formula::make_true(), kP);
  REQUIRE(m.ts.num_states == 2);
  REQUIRE_FALSE(m.finals[m.ts.initial]);
  REQUIRE(count(m.finals) == 1);
  REQUIRE_FALSE(m.accepts({}));
}

TEST_CASE("dfa of false is a single rejecting state") {
  Dfa m = ltlf_to_dfa(Formula::make_false(), kP);
  REQUIRE(m.ts.num_states == 1);
  REQUIRE(count(m.finals) == 0);
}

TEST_CASE("initial clone for a reentrant initial state") {
  Dfa m = ltlf_to_dfa(parse("F p", kP), kP);
  bool reenters = false;
  for (StateId t : m.ts.delta) reenters = reenters || t == m.ts.initial;
  REQUIRE(reenters);  // the not-yet-p state loops on {}
  Dfa fixed = make_initial_nonreentrant(m);
  REQUIRE(fixed.ts.num_states == m.ts.num_states + 1);
  for (StateId t : fixed.ts.delta) REQUIRE(t != fixed.ts.initial);
  testutil::for_all_traces(kP, 4, [&](const FiniteTrace& pi) {
    REQUIRE(m.accepts(pi) == fixed.accepts(pi));
  });
}

TEST_CASE("nonreentrant adjustment is the identity when compliant") {
  Dfa m = ltlf_to_dfa(parse("p", kP), kP);
  Dfa fixed = make_initial_nonreentrant(m);
  REQUIRE(fixed.ts.num_states == m.ts.num_states);
}

TEST_CASE("one-state dfa of false gets a fresh initial copy") {
  Dfa fixed = make_initial_nonreentrant(ltlf_to_dfa(Formula::make_false(), kP));
  REQUIRE(fixed.ts.num_states == 2);
  REQUIRE(fixed.ts.step(fixed.ts.initial, 0) != fixed.ts.initial);
}

TEST_CASE("safety automaton of globally-p accepts exactly constant-p words") {
  DetAutomaton da = convert_da(PrefixMode::Forall, parse("G p", kP), kP);
  REQUIRE(testutil::lasso_accepts(da, {}, {1}));
  REQUIRE_FALSE(testutil::lasso_accepts(da, {1, 0}, {1}));
  REQUIRE_FALSE(testutil::lasso_accepts(da, {}, {1, 0}));
}

TEST_CASE("safety automaton of a bare atom constrains the first letter only") {
  DetAutomaton da = convert_da(PrefixMode::Forall, parse("p", kP), kP);
  REQUIRE(testutil::lasso_accepts(da, {1}, {0}));
  REQUIRE(testutil::lasso_accepts(da, {}, {1}));
  REQUIRE_FALSE(testutil::lasso_accepts(da, {0}, {1}));
}

TEST_CASE("reach automaton of a bare atom checks the first letter") {
  DetAutomaton da = convert_da(PrefixMode::Exists, parse("p", kP), kP);
  for (Letter a = 0; a < 2; ++a)
    for (Letter b = 0; b < 2; ++b)
      for (Letter c = 0; c < 2; ++c)
        REQUIRE(testutil::lasso_accepts(da, {a, b}, {c}) == (a == 1));
}

TEST_CASE("safety reading of eventually-p rejects the alternating word") {
  // Without the non-reentrant initial state this word is wrongly accepted.
  DetAutomaton da = convert_da(PrefixMode::Forall, parse("F p", kP), kP);
  REQUIRE_FALSE(testutil::lasso_accepts(da, {}, {0, 1}));
  REQUIRE(testutil::lasso_accepts(da, {}, {1}));
}

TEST_CASE("dfa acceptance equals the trace oracle on random formulas") {
  std::mt19937_64 rng(2024);
  AtomPartition atoms = testutil::make_atoms({"p"}, {"q", "r"});
  for (int round = 0; round < 50; ++round) {
    Formula f = testutil::random_formula(rng, atoms, 4);
    Dfa m = ltlf_to_dfa(f, atoms);
    REQUIRE_FALSE(m.finals[m.ts.initial]);
    testutil::for_all_traces(atoms, 3, [&](const FiniteTrace& pi) {
      REQUIRE(m.accepts(pi) == evaluate(f, atoms, pi, 0));
    });
  }
}

TEST_CASE("minimization is a fixpoint") {
  std::mt19937_64 rng(5);
  AtomPartition atoms = testutil::make_atoms({"p", "q"}, {});
  for (int round = 0; round < 30; ++round) {
    Dfa m = ltlf_to_dfa(testutil::random_formula(rng, atoms, 4), atoms);
    REQUIRE(minimize(m).ts.num_states == m.ts.num_states);
  }
}

TEST_CASE("product bounds and identity law") {
  Dfa a = ltlf_to_dfa(parse("p", kP), kP);   // 3 states
  Dfa b = ltlf_to_dfa(Formula::make_true(), kP);  // 2 states
  DerivedArena p = product(a.ts, b.ts);
  REQUIRE(p.ts.num_states <= 6);

  TransitionSystem one;
  one.atoms = kP;
  one.num_states = 1;
  one.initial = 0;
  one.delta.assign(kP.num_letters(), 0);
  DerivedArena q = product(a.ts, one);
  REQUIRE(q.ts.num_states == a.ts.num_states);
  for (StateId s = 0; s < q.ts.num_states; ++s)
    for (Letter z = 0; z < kP.num_letters(); ++z)
      REQUIRE(q.map.coords[q.ts.step(s, z)][0] ==
              a.ts.step(q.map.coords[s][0], z));
}

TEST_CASE("product runs project to component runs") {
  std::mt19937_64 rng(11);
  Dfa a = ltlf_to_dfa(parse("F x", kYX), kYX);
  Dfa b = ltlf_to_dfa(parse("G (y | x)", kYX), kYX);
  DerivedArena p = product(a.ts, b.ts);
  for (int round = 0; round < 100; ++round) {
    int len = 1 + static_cast<int>(rng() % 6);
    StateId qa = a.ts.initial, qb = b.ts.initial, qp = p.ts.initial;
    for (int i = 0; i < len; ++i) {
      Letter z = static_cast<Letter>(rng() % kYX.num_letters());
      qa = a.ts.step(qa, z);
      qb = b.ts.step(qb, z);
      qp = p.ts.step(qp, z);
      REQUIRE(p.map.coords[qp][0] == qa);
      REQUIRE(p.map.coords[qp][1] == qb);
    }
  }
}

TEST_CASE("restriction redirects exits to an absorbing sink") {
  TransitionSystem ts;
  ts.atoms = kP;
  ts.num_states = 2;
  ts.initial = 0;
  ts.delta = {0, 1, 1, 1};  // q0: {}->q0, {p}->q1; q1: ->q1
  StateSet keep = empty_set(2);
  keep[0] = 1;
  DerivedArena r = restrict_to(ts, keep);
  REQUIRE(r.map.bot != kNoState);
  REQUIRE(r.ts.step(0, 1) == r.map.bot);
  for (Letter z = 0; z < 2; ++z)
    REQUIRE(r.ts.step(r.map.bot, z) == r.map.bot);
}

TEST_CASE("restriction to the full state set is a no-op") {
  Dfa a = ltlf_to_dfa(parse("p", kP), kP);
  DerivedArena r = restrict_to(a.ts, full_set(a.ts.num_states));
  REQUIRE(r.ts.num_states == a.ts.num_states);
  REQUIRE(r.map.bot == kNoState);
}

TEST_CASE("restriction to the env region of the globally-p monitor") {
  AtomPartition axOnly = testutil::make_atoms({}, {"p"});
  DetAutomaton da = convert_da(PrefixMode::Forall, parse("G p", axOnly),
                               axOnly);
  SolveResult env = solve_safe(da.ts, da.target, Player::Env);
  REQUIRE(env.winning[da.ts.initial]);
  DerivedArena r = restrict_to(da.ts, env.winning);
  // Inside the region the {p} letter stays put, the {} letter exits.
  REQUIRE(r.ts.step(r.ts.initial, 1) != r.map.bot);
  REQUIRE(r.ts.step(r.ts.initial, 0) == r.map.bot);
}

TEST_CASE("restriction with sinks: v1 empty routes exits to top") {
  TransitionSystem ts;
  ts.atoms = kP;
  ts.num_states = 2;
  ts.initial = 0;
  ts.delta = {0, 1, 1, 1};
  StateSet v0 = empty_set(2);
  v0[0] = 1;
  DerivedArena r = restrict_with_sinks(ts, v0, empty_set(2));
  REQUIRE(r.ts.step(0, 1) == r.map.top);
  REQUIRE(r.ts.step(r.map.top, 0) == r.map.top);
  REQUIRE(r.ts.step(r.map.bot, 1) == r.map.bot);
}

TEST_CASE("restriction with sinks: v0 everything keeps sinks unreachable") {
  Dfa a = ltlf_to_dfa(parse("p", kP), kP);
  DerivedArena r =
      restrict_with_sinks(a.ts, full_set(a.ts.num_states),
                          empty_set(a.ts.num_states));
  for (StateId q = 0; q < a.ts.num_states; ++q)
    for (Letter z = 0; z < kP.num_letters(); ++z)
      REQUIRE_FALSE(r.map.is_sink(r.ts.step(q, z)));
}

TEST_CASE("restriction with sinks routes v1 edges to bottom") {
  TransitionSystem ts;
  ts.atoms = kP;
  ts.num_states = 4;
  ts.initial = 0;
  // q0 -{}-> q1, q0 -{p}-> q2, q1 -> q3 both, q2/q3 self-loop.
  ts.delta = {1, 2, 3, 3, 2, 2, 3, 3};
  StateSet v0 = empty_set(4), v1 = empty_set(4);
  v0[0] = v0[1] = 1;
  v1[3] = 1;
  DerivedArena r = restrict_with_sinks(ts, v0, v1);
  REQUIRE(r.ts.step(0, 1) == r.map.top);   // into q2, outside both
  REQUIRE(r.ts.step(1, 0) == r.map.bot);   // into q3 = v1
  REQUIRE(r.ts.step(1, 1) == r.map.bot);
  REQUIRE(r.ts.step(0, 0) == 1);
}

TEST_CASE("flag construction: empty target never flags") {
  Dfa a = ltlf_to_dfa(parse("p", kP), kP);
  DerivedArena f = flagged(a.ts, empty_set(a.ts.num_states));
  for (StateId q = 0; q < f.ts.num_states; ++q)
    REQUIRE(f.map.flag[q] == 0);
}

TEST_CASE("flag construction: initial target flags everything") {
  Dfa a = ltlf_to_dfa(parse("p", kP), kP);
  StateSet t = empty_set(a.ts.num_states);
  t[a.ts.initial] = 1;
  DerivedArena f = flagged(a.ts, t);
  REQUIRE(f.map.flag[f.ts.initial] == 1);
  for (StateId q = 0; q < f.ts.num_states; ++q) REQUIRE(f.map.flag[q] == 1);
}

TEST_CASE("flag construction on a two-state cycle") {
  TransitionSystem ts;
  ts.atoms = testutil::make_atoms({}, {});
  ts.num_states = 2;
  ts.initial = 0;
  ts.delta = {1, 0};  // single letter, q0 <-> q1
  StateSet t = empty_set(2);
  t[1] = 1;
  DerivedArena f = flagged(ts, t);
  StateId s = f.ts.initial;
  REQUIRE(f.map.flag[s] == 0);
  s = f.ts.step(s, 0);
  REQUIRE(f.map.coords[s][0] == 1);
  REQUIRE(f.map.flag[s] == 1);
  s = f.ts.step(s, 0);
  REQUIRE(f.map.coords[s][0] == 0);
  REQUIRE(f.map.flag[s] == 1);
  s = f.ts.step(s, 0);
  REQUIRE(f.map.coords[s][0] == 1);
  REQUIRE(f.map.flag[s] == 1);
}

TEST_CASE("flags are monotone along random runs") {
  std::mt19937_64 rng(3);
  AtomPartition atoms = testutil::make_atoms({"y"}, {"x"});
  for (int round = 0; round < 20; ++round) {
    TransitionSystem ts = testutil::random_arena(rng, atoms, 6);
    DerivedArena f = flagged(ts, testutil::random_set(rng, 6));
    StateId s = f.ts.initial;
    for (int i = 0; i < 50; ++i) {
      StateId n = f.ts.step(s, static_cast<Letter>(rng() % 4));
      REQUIRE(f.map.flag[n] >= f.map.flag[s]);
      s = n;
    }
  }
}

TEST_CASE("state cap raises a resource error") {
  AtomPartition atoms = testutil::make_atoms({"a", "b", "c", "d"}, {});
  setenv("FINSYNTH_STATE_CAP", "4", 1);
  REQUIRE_THROWS_AS(
      ltlf_to_dfa(parse("F (a & X (b & X (c & X d)))", atoms), atoms),
      ResourceLimitError);
  unsetenv("FINSYNTH_STATE_CAP");
  REQUIRE_NOTHROW(
      ltlf_to_dfa(parse("F (a & X (b & X (c & X d)))", atoms), atoms));
}
