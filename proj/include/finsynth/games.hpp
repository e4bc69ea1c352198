/*! \file games.hpp
 *  \brief Reachability and safety game solvers.
 *
 *  The agent picks Y first, the environment answers with X. Both solvers
 *  are plain fixpoint iterations; moves are extracted per layer with the
 *  numerically smallest qualifying move, so results are reproducible.
 */

#pragma once

#include <vector>

#include "finsynth/atoms.hpp"
#include "finsynth/transition_system.hpp"

namespace finsynth {

enum class Player { Agent, Env };

/// Agent move per state: a Y mask. Arbitrary (smallest) on states where no
/// move qualifies.
struct AgentPositional {
  std::vector<Letter> move;
  Letter operator()(StateId q) const { return move[q]; }
};

/// Environment move per (state, agent move): an X mask, already shifted
/// into letter position so that the combined letter is Y | answer.
struct EnvPositional {
  std::vector<std::vector<Letter>> move;  // [state][Y]
  Letter operator()(StateId q, Letter y) const { return move[q][y]; }
};

struct SolveResult {
  StateSet winning;
  std::vector<std::uint32_t> rank;  // reach: layer; safe: 0 on W, infinity off
  AgentPositional agent;            // filled when protagonist == Agent
  EnvPositional env;                // filled when protagonist == Env
  std::uint32_t iterations = 0;
};

namespace detail {

/// True iff from q the protagonist can force the next state into e.
/// On success reports the protagonist's qualifying move.
inline bool can_force(const TransitionSystem& ts, const StateSet& e,
                      StateId q, Player who, Letter* agent_move) {
  const std::uint32_t ny = ts.atoms.num_agent_moves();
  const std::uint32_t nx = ts.atoms.num_env_moves();
  const int na = static_cast<int>(ts.atoms.agent.size());
  if (who == Player::Agent) {
    for (Letter y = 0; y < ny; ++y) {
      bool all = true;
      for (Letter x = 0; x < nx && all; ++x)
        all = e[ts.step(q, y | (x << na))] != 0;
      if (all) {
        if (agent_move) *agent_move = y;
        return true;
      }
    }
    return false;
  }
  for (Letter y = 0; y < ny; ++y) {
    bool some = false;
    for (Letter x = 0; x < nx && !some; ++x)
      some = e[ts.step(q, y | (x << na))] != 0;
    if (!some) return false;
  }
  return true;
}

/// Environment answer keeping the successor in e, or 0 when none exists.
inline Letter env_answer(const TransitionSystem& ts, const StateSet& e,
                         StateId q, Letter y) {
  const std::uint32_t nx = ts.atoms.num_env_moves();
  const int na = static_cast<int>(ts.atoms.agent.size());
  for (Letter x = 0; x < nx; ++x)
    if (e[ts.step(q, y | (x << na))]) return x << na;
  return 0;
}

}  // namespace detail

/// States from which the agent has a move whose every environment answer
/// lands in e.
inline StateSet pre_agent(const TransitionSystem& ts, const StateSet& e) {
  StateSet out = empty_set(ts.num_states);
  for (StateId q = 0; q < ts.num_states; ++q)
    out[q] = detail::can_force(ts, e, q, Player::Agent, nullptr) ? 1 : 0;
  return out;
}

/// States from which every agent move has an environment answer landing in e.
inline StateSet pre_env(const TransitionSystem& ts, const StateSet& e) {
  StateSet out = empty_set(ts.num_states);
  for (StateId q = 0; q < ts.num_states; ++q)
    out[q] = detail::can_force(ts, e, q, Player::Env, nullptr) ? 1 : 0;
  return out;
}

/// Least fixpoint Z_{i+1} = Z_i ∪ Pre(Z_i) from t, with per-layer ranks and
/// a positional strategy forcing the rank strictly down outside t.
inline SolveResult solve_reach(const TransitionSystem& ts, const StateSet& t,
                               Player who) {
  const std::uint32_t ny = ts.atoms.num_agent_moves();
  SolveResult r;
  r.winning = t;
  r.rank.assign(ts.num_states, kInfiniteRank);
  for (StateId q = 0; q < ts.num_states; ++q)
    if (t[q]) r.rank[q] = 0;
  if (who == Player::Agent)
    r.agent.move.assign(ts.num_states, 0);
  else
    r.env.move.assign(ts.num_states, std::vector<Letter>(ny, 0));

  std::uint32_t layer = 0;
  bool grew = true;
  while (grew) {
    grew = false;
    ++layer;
    StateSet snapshot = r.winning;
    for (StateId q = 0; q < ts.num_states; ++q) {
      if (r.winning[q]) continue;
      Letter y = 0;
      if (detail::can_force(ts, snapshot, q, who, &y)) {
        r.winning[q] = 1;
        r.rank[q] = layer;
        if (who == Player::Agent) {
          r.agent.move[q] = y;
        } else {
          for (Letter ym = 0; ym < ny; ++ym)
            r.env.move[q][ym] = detail::env_answer(ts, snapshot, q, ym);
        }
        grew = true;
      }
    }
    ++r.iterations;
  }
  return r;
}

/// Greatest fixpoint Z_{i+1} = Z_i ∩ Pre(Z_i) inside t, with a strategy
/// keeping every consistent play inside the winning region forever.
inline SolveResult solve_safe(const TransitionSystem& ts, const StateSet& t,
                              Player who) {
  const std::uint32_t ny = ts.atoms.num_agent_moves();
  SolveResult r;
  r.winning = t;
  bool shrank = true;
  while (shrank) {
    shrank = false;
    StateSet snapshot = r.winning;
    for (StateId q = 0; q < ts.num_states; ++q) {
      if (!r.winning[q]) continue;
      if (!detail::can_force(ts, snapshot, q, who, nullptr)) {
        r.winning[q] = 0;
        shrank = true;
      }
    }
    ++r.iterations;
  }
  r.rank.assign(ts.num_states, kInfiniteRank);
  if (who == Player::Agent)
    r.agent.move.assign(ts.num_states, 0);
  else
    r.env.move.assign(ts.num_states, std::vector<Letter>(ny, 0));
  for (StateId q = 0; q < ts.num_states; ++q) {
    if (!r.winning[q]) continue;
    r.rank[q] = 0;
    if (who == Player::Agent) {
      Letter y = 0;
      detail::can_force(ts, r.winning, q, Player::Agent, &y);
      r.agent.move[q] = y;
    } else {
      for (Letter ym = 0; ym < ny; ++ym)
        r.env.move[q][ym] = detail::env_answer(ts, r.winning, q, ym);
    }
  }
  return r;
}

}  // namespace finsynth
