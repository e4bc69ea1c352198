// Shared helpers for the test suite: random formula / arena / spec
// generators and brute-force oracles.

#pragma once

#include <optional>
#include <random>
#include <vector>

#include "finsynth/atoms.hpp"
#include "finsynth/formula.hpp"
#include "finsynth/synthesis.hpp"
#include "finsynth/transition_system.hpp"

namespace testutil {

using namespace finsynth;

inline AtomPartition make_atoms(std::vector<std::string> agent,
                                std::vector<std::string> env) {
  AtomPartition a;
  a.agent = std::move(agent);
  a.env = std::move(env);
  a.validate();
  return a;
}

/// Random formula over the given atoms with bounded operator depth.
inline Formula random_formula(std::mt19937_64& rng, const AtomPartition& atoms,
                              int depth) {
  auto all = [&](std::size_t i) -> Formula {
    if (i < atoms.agent.size()) return Formula::atom(atoms.agent[i]);
    return Formula::atom(atoms.env[i - atoms.agent.size()]);
  };
  const std::size_t n = atoms.agent.size() + atoms.env.size();
  if (depth == 0 || rng() % 5 == 0) {
    switch (rng() % 8) {
      case 0: return Formula::make_true();
      case 1: return Formula::make_false();
      case 2: return Formula::last();
      default: return all(rng() % n);
    }
  }
  switch (rng() % 10) {
    case 0: return Formula::negate(random_formula(rng, atoms, depth - 1));
    case 1:
      return Formula::conj(random_formula(rng, atoms, depth - 1),
                           random_formula(rng, atoms, depth - 1));
    case 2:
      return Formula::disj(random_formula(rng, atoms, depth - 1),
                           random_formula(rng, atoms, depth - 1));
    case 3:
      return Formula::implies(random_formula(rng, atoms, depth - 1),
                              random_formula(rng, atoms, depth - 1));
    case 4: return Formula::next(random_formula(rng, atoms, depth - 1));
    case 5: return Formula::weak_next(random_formula(rng, atoms, depth - 1));
    case 6:
      return Formula::until(random_formula(rng, atoms, depth - 1),
                            random_formula(rng, atoms, depth - 1));
    case 7:
      return Formula::release(random_formula(rng, atoms, depth - 1),
                              random_formula(rng, atoms, depth - 1));
    case 8: return Formula::eventually(random_formula(rng, atoms, depth - 1));
    default: return Formula::globally(random_formula(rng, atoms, depth - 1));
  }
}

/// Calls fn on every trace of length in [1, max_len].
template <typename Fn>
inline void for_all_traces(const AtomPartition& atoms, int max_len, Fn fn) {
  const std::uint32_t letters = atoms.num_letters();
  FiniteTrace trace;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (!trace.empty()) fn(trace);
    if (remaining == 0) return;
    for (Letter z = 0; z < letters; ++z) {
      trace.push_back(z);
      self(self, remaining - 1);
      trace.pop_back();
    }
  };
  rec(rec, max_len);
}

/// Random total transition system over the given atoms, all states kept
/// regardless of reachability (fine for the solvers).
inline TransitionSystem random_arena(std::mt19937_64& rng,
                                     const AtomPartition& atoms,
                                     StateId num_states) {
  TransitionSystem ts;
  ts.atoms = atoms;
  ts.num_states = num_states;
  ts.initial = 0;
  const std::uint32_t letters = atoms.num_letters();
  ts.delta.resize(static_cast<std::size_t>(num_states) * letters);
  for (auto& t : ts.delta) t = static_cast<StateId>(rng() % num_states);
  return ts;
}

inline StateSet random_set(std::mt19937_64& rng, StateId n) {
  StateSet s = empty_set(n);
  for (StateId q = 0; q < n; ++q) s[q] = rng() % 2;
  return s;
}

/// Acceptance of the lasso word u v^omega by a reach / safe automaton.
/// Unrolling |u| + |v| * |Q| steps covers every state of the infinite run.
inline bool lasso_accepts(const DetAutomaton& da, const std::vector<Letter>& u,
                          const std::vector<Letter>& v) {
  StateId q = da.ts.initial;
  bool reach = da.objective == ObjectiveKind::Reach;
  auto check = [&](StateId s) { return da.target[s] != 0; };
  if (!reach && !check(q)) return false;
  if (reach && check(q)) return true;
  std::size_t steps = u.size() + v.size() * (da.ts.num_states + 1);
  for (std::size_t i = 0; i < steps; ++i) {
    Letter z = i < u.size() ? u[i] : v[(i - u.size()) % v.size()];
    q = da.ts.step(q, z);
    if (reach && check(q)) return true;
    if (!reach && !check(q)) return false;
  }
  return !reach;
}

/// Random spec of a given Table-1 shape; shape bits: 1 env_safe,
/// 2 env_reach, 4 task_reach, 8 task_safe.
inline ProblemSpec random_spec(std::mt19937_64& rng,
                               const AtomPartition& atoms, unsigned shape,
                               int depth = 3) {
  ProblemSpec spec;
  spec.atoms = atoms;
  if (shape & 1u) spec.env_safe = random_formula(rng, atoms, depth);
  if (shape & 2u) spec.env_reach = random_formula(rng, atoms, depth);
  if (shape & 4u) spec.task_reach = random_formula(rng, atoms, depth);
  if (shape & 8u) spec.task_safe = random_formula(rng, atoms, depth);
  return spec;
}

}  // namespace testutil
