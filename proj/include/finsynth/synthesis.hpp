/*! \file synthesis.hpp
 *  \brief Synthesis algorithms for reachability/safety tasks under
 *  reachability/safety environment assumptions, plus the dispatcher and
 *  the environment-consistency check.
 */

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finsynth/arena_ops.hpp"
#include "finsynth/atoms.hpp"
#include "finsynth/dfa_build.hpp"
#include "finsynth/formula.hpp"
#include "finsynth/games.hpp"
#include "finsynth/transducer.hpp"
#include "finsynth/transition_system.hpp"

namespace finsynth {

/// Absent components mean `true`.
struct ProblemSpec {
  AtomPartition atoms;
  std::optional<Formula> env_safe;    // phi in "forall phi"
  std::optional<Formula> env_reach;   // phi in "exists phi"
  std::optional<Formula> task_reach;  // phi in "exists phi"
  std::optional<Formula> task_safe;   // phi in "forall phi"

  bool has_env() const { return env_safe || env_reach; }
  bool has_task() const { return task_reach || task_safe; }
};

enum class Verdict { Realizable, Unrealizable, EnvInconsistent };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Realizable: return "Realizable";
    case Verdict::Unrealizable: return "Unrealizable";
    default: return "EnvInconsistent";
  }
}

/// Environment counter-strategy together with the dual game it wins.
struct EnvWitness {
  TransitionSystem arena;
  ObjectiveKind objective;  // the environment's objective
  StateSet target;          // its target / safe set
  SolveResult solve;        // env-protagonist result; arena.initial winning
};

struct Diagnostics {
  std::vector<std::pair<std::string, std::size_t>> entries;
  void add(std::string key, std::size_t v) {
    entries.emplace_back(std::move(key), v);
  }
};

struct SynthesisOutcome {
  Verdict verdict = Verdict::Unrealizable;
  std::optional<MealyStrategy> strategy;
  std::optional<EnvWitness> env_witness;
  Diagnostics diag;
};

namespace detail {

inline Formula or_true(const std::optional<Formula>& f) {
  return f ? *f : Formula::make_true();
}

inline SynthesisOutcome realizable(MealyStrategy s, Diagnostics d) {
  SynthesisOutcome out;
  out.verdict = Verdict::Realizable;
  out.strategy = std::move(s);
  out.diag = std::move(d);
  return out;
}

inline SynthesisOutcome unrealizable(EnvWitness w, Diagnostics d) {
  SynthesisOutcome out;
  out.verdict = Verdict::Unrealizable;
  out.env_witness = std::move(w);
  out.diag = std::move(d);
  return out;
}

inline EnvWitness dual_witness(const TransitionSystem& ts,
                               ObjectiveKind agent_obj,
                               const StateSet& agent_set) {
  EnvWitness w;
  w.arena = ts;
  StateSet bad = complement(agent_set);
  if (agent_obj == ObjectiveKind::Reach) {
    w.objective = ObjectiveKind::Safe;
    w.target = bad;
    w.solve = solve_safe(ts, bad, Player::Env);
  } else {
    w.objective = ObjectiveKind::Reach;
    w.target = bad;
    w.solve = solve_reach(ts, bad, Player::Env);
  }
  return w;
}

}  // namespace detail

/// True iff the environment alone can enforce its own specification.
inline bool check_env_consistency(const ProblemSpec& spec,
                                  EnvPositional* witness = nullptr) {
  if (!spec.has_env()) return true;
  if (!spec.env_reach) {
    DetAutomaton a = convert_da(PrefixMode::Forall, *spec.env_safe, spec.atoms);
    SolveResult r = solve_safe(a.ts, a.target, Player::Env);
    if (!r.winning[a.ts.initial]) return false;
    if (witness) *witness = r.env;
    return true;
  }
  if (!spec.env_safe) {
    DetAutomaton a = convert_da(PrefixMode::Exists, *spec.env_reach, spec.atoms);
    SolveResult r = solve_reach(a.ts, a.target, Player::Env);
    if (!r.winning[a.ts.initial]) return false;
    if (witness) *witness = r.env;
    return true;
  }
  DetAutomaton a1 = convert_da(PrefixMode::Forall, *spec.env_safe, spec.atoms);
  SolveResult s = solve_safe(a1.ts, a1.target, Player::Env);
  if (!s.winning[a1.ts.initial]) return false;
  DerivedArena restr = restrict_to(a1.ts, s.winning);
  DetAutomaton a2 = convert_da(PrefixMode::Exists, *spec.env_reach, spec.atoms);
  DerivedArena p = product(a2.ts, restr.ts);
  StateSet target = empty_set(p.ts.num_states);
  for (StateId q = 0; q < p.ts.num_states; ++q)
    if (a2.target[p.map.coords[q][0]] && p.map.coords[q][1] != restr.map.bot)
      target[q] = 1;
  SolveResult r = solve_reach(p.ts, target, Player::Env);
  if (!r.winning[p.ts.initial]) return false;
  if (witness) *witness = r.env;
  return true;
}

/// Task = exists phi, no environment assumption.
inline SynthesisOutcome alg1_reach(const Formula& task_reach,
                                   const AtomPartition& atoms) {
  Diagnostics d;
  DetAutomaton a = convert_da(PrefixMode::Exists, task_reach, atoms);
  d.add("dfa_states", a.ts.num_states);
  SolveResult r = solve_reach(a.ts, a.target, Player::Agent);
  d.add("fixpoint_iterations", r.iterations);
  if (!r.winning[a.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(a.ts, ObjectiveKind::Reach, a.target),
        std::move(d));
  return detail::realizable(from_positional(a.ts, a.ts.initial, r.agent),
                            std::move(d));
}

/// Task = forall phi, no environment assumption.
inline SynthesisOutcome alg2_safe(const Formula& task_safe,
                                  const AtomPartition& atoms) {
  Diagnostics d;
  DetAutomaton a = convert_da(PrefixMode::Forall, task_safe, atoms);
  d.add("dfa_states", a.ts.num_states);
  SolveResult r = solve_safe(a.ts, a.target, Player::Agent);
  d.add("fixpoint_iterations", r.iterations);
  if (!r.winning[a.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(a.ts, ObjectiveKind::Safe, a.target),
        std::move(d));
  return detail::realizable(from_positional(a.ts, a.ts.initial, r.agent),
                            std::move(d));
}

/// Task = exists phi1 and forall phi2, no environment assumption.
inline SynthesisOutcome alg3_reach_and_safe(const Formula& task_reach,
                                            const Formula& task_safe,
                                            const AtomPartition& atoms) {
  Diagnostics d;
  DetAutomaton a1 = convert_da(PrefixMode::Exists, task_reach, atoms);
  DetAutomaton a2 = convert_da(PrefixMode::Forall, task_safe, atoms);
  d.add("dfa_states_reach", a1.ts.num_states);
  d.add("dfa_states_safe", a2.ts.num_states);

  SolveResult safe2 = solve_safe(a2.ts, a2.target, Player::Agent);
  if (!safe2.winning[a2.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(a2.ts, ObjectiveKind::Safe, a2.target),
        std::move(d));
  DerivedArena restr = restrict_to(a2.ts, safe2.winning);
  DerivedArena p = product(a1.ts, restr.ts);
  d.add("arena_states", p.ts.num_states);

  StateSet target = empty_set(p.ts.num_states);
  for (StateId q = 0; q < p.ts.num_states; ++q)
    if (a1.target[p.map.coords[q][0]] && p.map.coords[q][1] != restr.map.bot)
      target[q] = 1;
  SolveResult reach = solve_reach(p.ts, target, Player::Agent);
  d.add("fixpoint_iterations", safe2.iterations + reach.iterations);
  if (!reach.winning[p.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(p.ts, ObjectiveKind::Reach, target), std::move(d));

  // Follow the attractor while it still makes progress; on and after the
  // target (and off the attractor) fall back to the lifted safe strategy,
  // which keeps the play inside the safe region forever.
  AgentPositional h;
  h.move.assign(p.ts.num_states, 0);
  for (StateId q = 0; q < p.ts.num_states; ++q) {
    if (reach.winning[q] && reach.rank[q] > 0) {
      h.move[q] = reach.agent.move[q];
    } else if (p.map.coords[q][1] != restr.map.bot) {
      h.move[q] = safe2.agent.move[restr.map.coords[p.map.coords[q][1]][0]];
    }
  }
  return detail::realizable(from_positional(p.ts, p.ts.initial, h),
                            std::move(d));
}

/// Task = exists phi, Env = forall phi_e.
inline SynthesisOutcome alg4_reach_under_safeenv(const Formula& task_reach,
                                                 const Formula& env_safe,
                                                 const AtomPartition& atoms) {
  Diagnostics d;
  DetAutomaton a1 = convert_da(PrefixMode::Exists, task_reach, atoms);
  DetAutomaton a2 = convert_da(PrefixMode::Forall, env_safe, atoms);
  d.add("dfa_states_task", a1.ts.num_states);
  d.add("dfa_states_env", a2.ts.num_states);

  SolveResult s2 = solve_safe(a2.ts, a2.target, Player::Env);
  DerivedArena restr = restrict_to(a2.ts, s2.winning);
  DerivedArena p = product(a1.ts, restr.ts);
  d.add("arena_states", p.ts.num_states);

  // Reach the task target inside the env region, or the env deviates.
  StateSet target = empty_set(p.ts.num_states);
  for (StateId q = 0; q < p.ts.num_states; ++q) {
    StateId c2 = p.map.coords[q][1];
    if (c2 == restr.map.bot || a1.target[p.map.coords[q][0]]) target[q] = 1;
  }
  SolveResult r = solve_reach(p.ts, target, Player::Agent);
  d.add("fixpoint_iterations", s2.iterations + r.iterations);
  if (!r.winning[p.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(p.ts, ObjectiveKind::Reach, target), std::move(d));
  return detail::realizable(from_positional(p.ts, p.ts.initial, r.agent),
                            std::move(d));
}

/// Task = forall phi, Env = forall phi_e.
inline SynthesisOutcome alg5_safe_under_safeenv(const Formula& task_safe,
                                                const Formula& env_safe,
                                                const AtomPartition& atoms) {
  Diagnostics d;
  DetAutomaton a1 = convert_da(PrefixMode::Forall, task_safe, atoms);
  DetAutomaton a2 = convert_da(PrefixMode::Forall, env_safe, atoms);
  d.add("dfa_states_task", a1.ts.num_states);
  d.add("dfa_states_env", a2.ts.num_states);

  SolveResult s2 = solve_safe(a2.ts, a2.target, Player::Env);
  DerivedArena restr = restrict_to(a2.ts, s2.winning);
  DerivedArena p = product(a1.ts, restr.ts);
  d.add("arena_states", p.ts.num_states);

  StateSet safeset = empty_set(p.ts.num_states);
  for (StateId q = 0; q < p.ts.num_states; ++q) {
    StateId c2 = p.map.coords[q][1];
    if (c2 == restr.map.bot || a1.target[p.map.coords[q][0]]) safeset[q] = 1;
  }
  SolveResult r = solve_safe(p.ts, safeset, Player::Agent);
  d.add("fixpoint_iterations", s2.iterations + r.iterations);
  if (!r.winning[p.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(p.ts, ObjectiveKind::Safe, safeset), std::move(d));
  return detail::realizable(from_positional(p.ts, p.ts.initial, r.agent),
                            std::move(d));
}

/// Task = exists phi1 and forall phi2, Env = forall phi3.
inline SynthesisOutcome alg6_reachsafe_under_safeenv(const Formula& task_reach,
                                                      const Formula& task_safe,
                                                      const Formula& env_safe,
                                                      const AtomPartition& atoms) {
  Diagnostics d;
  DetAutomaton a1 = convert_da(PrefixMode::Exists, task_reach, atoms);
  DetAutomaton a2 = convert_da(PrefixMode::Forall, task_safe, atoms);
  DetAutomaton a3 = convert_da(PrefixMode::Forall, env_safe, atoms);
  d.add("dfa_states_reach", a1.ts.num_states);
  d.add("dfa_states_safe", a2.ts.num_states);
  d.add("dfa_states_env", a3.ts.num_states);

  SolveResult s3 = solve_safe(a3.ts, a3.target, Player::Env);
  DerivedArena r3 = restrict_to(a3.ts, s3.winning);

  DerivedArena d23 = product(a2.ts, r3.ts);
  StateSet safeset = empty_set(d23.ts.num_states);
  for (StateId q = 0; q < d23.ts.num_states; ++q) {
    StateId c3 = d23.map.coords[q][1];
    if (c3 == r3.map.bot || a2.target[d23.map.coords[q][0]]) safeset[q] = 1;
  }
  SolveResult s2 = solve_safe(d23.ts, safeset, Player::Agent);
  if (!s2.winning[d23.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(d23.ts, ObjectiveKind::Safe, safeset),
        std::move(d));
  DerivedArena r23 = restrict_to(d23.ts, s2.winning);
  DerivedArena full = product(a1.ts, r23.ts);
  d.add("arena_states", full.ts.num_states);

  // q2 coordinates that occur in the agent-safe region.
  StateSet eta = empty_set(a2.ts.num_states);
  for (StateId q = 0; q < d23.ts.num_states; ++q)
    if (s2.winning[q]) eta[d23.map.coords[q][0]] = 1;

  StateSet target = empty_set(full.ts.num_states);
  for (StateId q = 0; q < full.ts.num_states; ++q) {
    StateId c23p = full.map.coords[q][1];
    if (c23p == r23.map.bot) {
      target[q] = 1;
      continue;
    }
    StateId q23 = r23.map.coords[c23p][0];
    StateId q2 = d23.map.coords[q23][0];
    StateId c3 = d23.map.coords[q23][1];
    if (c3 == r3.map.bot) {
      if (eta[q2]) target[q] = 1;
    } else if (a1.target[full.map.coords[q][0]]) {
      target[q] = 1;
    }
  }
  SolveResult reach = solve_reach(full.ts, target, Player::Agent);
  d.add("fixpoint_iterations",
        s3.iterations + s2.iterations + reach.iterations);
  if (!reach.winning[full.ts.initial])
    return detail::unrealizable(
        detail::dual_witness(full.ts, ObjectiveKind::Reach, target),
        std::move(d));

  AgentPositional h;
  h.move.assign(full.ts.num_states, 0);
  for (StateId q = 0; q < full.ts.num_states; ++q) {
    if (reach.winning[q] && reach.rank[q] > 0) {
      h.move[q] = reach.agent.move[q];
    } else {
      StateId c23p = full.map.coords[q][1];
      if (c23p != r23.map.bot)
        h.move[q] = s2.agent.move[r23.map.coords[c23p][0]];
    }
  }
  return detail::realizable(from_positional(full.ts, full.ts.initial, h),
                            std::move(d));
}

/// General case. Env = forall phi1 and exists phi2; Task = exists phi3 and
/// forall phi4. Solves the implication Env -> Task.
inline SynthesisOutcome alg7_general(const Formula& phi1, const Formula& phi2,
                                     const Formula& phi3, const Formula& phi4,
                                     const AtomPartition& atoms) {
  Diagnostics d;
  DetAutomaton a1 =
      convert_da(PrefixMode::Exists, Formula::negate(phi1), atoms);
  DetAutomaton a2 =
      convert_da(PrefixMode::Forall, Formula::negate(phi2), atoms);
  DetAutomaton a3 = convert_da(PrefixMode::Exists, phi3, atoms);
  DetAutomaton a4 = convert_da(PrefixMode::Forall, phi4, atoms);
  d.add("dfa_states_env_safe_neg", a1.ts.num_states);
  d.add("dfa_states_env_reach_neg", a2.ts.num_states);
  d.add("dfa_states_task_reach", a3.ts.num_states);
  d.add("dfa_states_task_safe", a4.ts.num_states);

  DerivedArena dp = product({&a1.ts, &a2.ts, &a3.ts, &a4.ts});
  const StateId np = dp.ts.num_states;
  d.add("arena_states", np);
  StateSet t1 = dp.map.lift(0, a1.target);
  StateSet t2p = dp.map.lift(1, a2.target);
  StateSet t3p = dp.map.lift(2, a3.target);
  StateSet t4p = dp.map.lift(3, a4.target);

  SolveResult sr1 = solve_reach(dp.ts, t1, Player::Agent);
  const StateSet& r1 = sr1.winning;

  DerivedArena dpr = restrict_to(dp.ts, complement(r1));
  // Map product states outside R1 to restricted indices.
  std::vector<StateId> p2r(np, kNoState);
  for (StateId q = 0; q < dpr.ts.num_states; ++q)
    if (!dpr.map.coords[q].empty()) p2r[dpr.map.coords[q][0]] = q;

  // Flag rises on genuinely reaching the task-reach target; the
  // restriction sink stays unflagged (entering it means the agent wins
  // through the environment-safety violation instead).
  StateSet t3r = empty_set(dpr.ts.num_states);
  for (StateId q = 0; q < dpr.ts.num_states; ++q)
    if (!dpr.map.coords[q].empty() && t3p[dpr.map.coords[q][0]]) t3r[q] = 1;
  DerivedArena df = flagged(dpr.ts, t3r);
  const StateId nf = df.ts.num_states;
  d.add("flagged_states", nf);
  // (restricted state, flag) -> flagged index for the reachable pairs.
  std::vector<StateId> rf2f(2 * static_cast<std::size_t>(dpr.ts.num_states),
                            kNoState);
  for (StateId q = 0; q < nf; ++q)
    rf2f[2 * static_cast<std::size_t>(df.map.coords[q][0]) + df.map.flag[q]] =
        q;

  // The restriction sink counts as winning for the remaining solves:
  // reaching it means the agent can switch to the attractor strategy and
  // win outright.
  auto lift_with_sink = [&](const StateSet& on_p) {
    StateSet out = empty_set(nf);
    for (StateId q = 0; q < nf; ++q) {
      StateId rq = df.map.coords[q][0];
      if (rq == dpr.map.bot || on_p[dpr.map.coords[rq][0]]) out[q] = 1;
    }
    return out;
  };
  StateSet t2f = lift_with_sink(t2p);
  StateSet t3f = lift_with_sink(t3p);
  StateSet t4f = lift_with_sink(t4p);
  StateSet t3pure = empty_set(nf);
  for (StateId q = 0; q < nf; ++q) {
    StateId rq = df.map.coords[q][0];
    if (rq != dpr.map.bot && t3p[dpr.map.coords[rq][0]]) t3pure[q] = 1;
  }

  SolveResult s2 = solve_safe(df.ts, t2f, Player::Agent);
  SolveResult s4 = solve_safe(df.ts, t4f, Player::Agent);

  DerivedArena ds4 = restrict_to(df.ts, s4.winning);
  std::vector<StateId> f2s4(nf, kNoState);
  for (StateId q = 0; q < ds4.ts.num_states; ++q)
    if (!ds4.map.coords[q].empty()) f2s4[ds4.map.coords[q][0]] = q;
  StateSet t3s4 = empty_set(ds4.ts.num_states);
  for (StateId q = 0; q < ds4.ts.num_states; ++q)
    if (!ds4.map.coords[q].empty() && t3f[ds4.map.coords[q][0]]) t3s4[q] = 1;
  SolveResult r3s = solve_reach(ds4.ts, t3s4, Player::Agent);
  StateSet r3 = empty_set(nf);
  for (StateId q = 0; q < nf; ++q)
    if (f2s4[q] != kNoState && r3s.winning[f2s4[q]]) r3[q] = 1;

  StateSet v0 = empty_set(nf);
  StateSet v1 = empty_set(nf);
  for (StateId q = 0; q < nf; ++q) {
    bool in_s2 = s2.winning[q], in_s4 = s4.winning[q];
    if (!in_s2 && !in_s4) v0[q] = 1;
    if (in_s4 && t2f[q] && !r3[q] && !in_s2) v0[q] = 1;
    if (in_s4 && !t2f[q] && !r3[q] && !in_s2 && !df.map.flag[q]) v1[q] = 1;
  }
  DerivedArena hat = restrict_with_sinks(df.ts, v0, v1);
  std::vector<StateId> f2hat(nf, kNoState);
  for (StateId q = 0; q < hat.ts.num_states; ++q)
    if (!hat.map.coords[q].empty()) f2hat[hat.map.coords[q][0]] = q;
  StateSet esafe = empty_set(hat.ts.num_states);
  for (StateId q = 0; q < hat.ts.num_states; ++q)
    if (!hat.map.coords[q].empty()) {
      StateId fq = hat.map.coords[q][0];
      if (t2f[fq] && t4f[fq]) esafe[q] = 1;
    }
  esafe[hat.map.top] = 1;
  SolveResult es = solve_safe(hat.ts, esafe, Player::Agent);
  d.add("fixpoint_iterations", sr1.iterations + s2.iterations +
                                   s4.iterations + r3s.iterations +
                                   es.iterations);

  const bool init_in_r1 = r1[dp.ts.initial];
  const StateId init_f = df.ts.initial;
  bool win;
  if (init_in_r1) {
    win = true;
  } else {
    win = s2.winning[init_f] || r3[init_f] || es.winning[hat.ts.initial];
  }
  if (!win) {
    SynthesisOutcome out;
    out.verdict = Verdict::Unrealizable;
    out.diag = std::move(d);
    return out;
  }

  // Combine: finite mode machine over (mode, product state, flag).
  enum Mode : std::uint8_t {
    kEnvSafeBroken,
    kSafe2,
    kReach3,
    kSafe4,
    kExplore,
    kArbitrary
  };
  auto fstate = [&](StateId qp, char b) {
    return rf2f[2 * static_cast<std::size_t>(p2r[qp]) + b];
  };
  auto normalize = [&](Mode m, StateId qp, char b) -> Mode {
    if (r1[qp]) return kEnvSafeBroken;
    StateId s = fstate(qp, b);
    for (;;) {
      if (m == kReach3 && t3pure[s]) {
        m = kSafe4;
        continue;
      }
      if (m == kExplore &&
          !(f2hat[s] != kNoState && es.winning[f2hat[s]])) {
        if (s2.winning[s])
          m = kSafe2;
        else if (r3[s])
          m = kReach3;
        else if (s4.winning[s] && df.map.flag[s])
          m = kSafe4;
        else
          m = kArbitrary;
        if (m == kReach3) continue;
      }
      return m;
    }
  };
  auto output = [&](Mode m, StateId qp, char b) -> Letter {
    switch (m) {
      case kEnvSafeBroken: return sr1.agent.move[qp];
      case kSafe2: return s2.agent.move[fstate(qp, b)];
      case kSafe4: return s4.agent.move[fstate(qp, b)];
      case kReach3: {
        StateId s = f2s4[fstate(qp, b)];
        return s == kNoState ? 0 : r3s.agent.move[s];
      }
      case kExplore: {
        StateId s = f2hat[fstate(qp, b)];
        return s == kNoState ? 0 : es.agent.move[s];
      }
      default: return 0;
    }
  };

  struct Mem {
    Mode mode;
    StateId qp;
    char flag;
    bool operator<(const Mem& o) const {
      if (mode != o.mode) return mode < o.mode;
      if (qp != o.qp) return qp < o.qp;
      return flag < o.flag;
    }
  };
  const int na = static_cast<int>(atoms.agent.size());
  const std::uint32_t nx = atoms.num_env_moves();

  Mode m0;
  if (init_in_r1) {
    m0 = kEnvSafeBroken;
  } else if (s2.winning[init_f]) {
    m0 = kSafe2;
  } else if (r3[init_f]) {
    m0 = kReach3;
  } else {
    m0 = kExplore;
  }
  Mem start{normalize(m0, dp.ts.initial, df.map.flag[init_f]), dp.ts.initial,
            r1[dp.ts.initial] ? char(0) : df.map.flag[init_f]};

  std::map<Mem, std::uint32_t> ids;
  std::vector<Mem> order;
  auto intern = [&](Mem m) {
    auto [it, ins] = ids.emplace(m, static_cast<std::uint32_t>(order.size()));
    if (ins) order.push_back(m);
    return it->second;
  };

  MealyStrategy strat;
  strat.atoms = atoms;
  strat.initial = intern(start);
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    Mem m = order[i];
    Letter y = output(m.mode, m.qp, m.flag);
    strat.output.push_back(y);
    strat.update.emplace_back();
    for (Letter x = 0; x < nx; ++x) {
      Letter z = y | (x << na);
      StateId qp2 = dp.ts.step(m.qp, z);
      char b2 = 0;
      if (!r1[qp2]) {
        StateId s2f = fstate(qp2, m.flag);
        // Recompute the flag through the flagged dynamics.
        b2 = (m.flag || t3r[p2r[qp2]]) ? 1 : 0;
        static_cast<void>(s2f);
      }
      Mode mode2 = (m.mode == kEnvSafeBroken)
                       ? kEnvSafeBroken
                       : normalize(m.mode, qp2, b2);
      strat.update.back().push_back(intern(Mem{mode2, qp2, b2}));
    }
  }
  strat.num_states = static_cast<std::uint32_t>(order.size());
  d.add("strategy_states", strat.num_states);
  return detail::realizable(std::move(strat), std::move(d));
}

/// Dispatcher. Checks environment consistency, then routes the spec shape
/// to its algorithm; any reachability environment component routes to the
/// general algorithm.
inline SynthesisOutcome synthesize(const ProblemSpec& spec) {
  if (!spec.has_task()) throw Error("spec has no task component");
  if (spec.has_env() && !check_env_consistency(spec)) {
    SynthesisOutcome out;
    out.verdict = Verdict::EnvInconsistent;
    return out;
  }
  using detail::or_true;
  if (spec.env_reach)
    return alg7_general(or_true(spec.env_safe), *spec.env_reach,
                        or_true(spec.task_reach), or_true(spec.task_safe),
                        spec.atoms);
  if (spec.env_safe) {
    if (spec.task_reach && spec.task_safe)
      return alg6_reachsafe_under_safeenv(*spec.task_reach, *spec.task_safe,
                                          *spec.env_safe, spec.atoms);
    if (spec.task_reach)
      return alg4_reach_under_safeenv(*spec.task_reach, *spec.env_safe,
                                      spec.atoms);
    return alg5_safe_under_safeenv(*spec.task_safe, *spec.env_safe,
                                   spec.atoms);
  }
  if (spec.task_reach && spec.task_safe)
    return alg3_reach_and_safe(*spec.task_reach, *spec.task_safe, spec.atoms);
  if (spec.task_reach) return alg1_reach(*spec.task_reach, spec.atoms);
  return alg2_safe(*spec.task_safe, spec.atoms);
}

}  // namespace finsynth
