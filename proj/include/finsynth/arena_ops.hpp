/*! \file arena_ops.hpp
 *  \brief Arena constructors: synchronous product, restriction with one or
 *  two sinks, and the flag construction.
 */

#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "finsynth/atoms.hpp"
#include "finsynth/transition_system.hpp"

namespace finsynth {

/// Book-keeping attached to a derived arena: per-state component
/// coordinates, sink identities, and the flag bit of flagged arenas.
struct ProductMap {
  // coords[q] lists one source state per component; empty for sinks.
  std::vector<std::vector<StateId>> coords;
  StateId bot = kNoState;
  StateId top = kNoState;
  std::vector<char> flag;  // per derived state; empty unless flagged

  bool is_sink(StateId q) const { return q == bot || q == top; }

  StateId project(StateId q, std::size_t c) const { return coords[q][c]; }

  /// Derived states whose component-c coordinate lies in `component_set`.
  /// Sinks are never lifted.
  StateSet lift(std::size_t c, const StateSet& component_set) const {
    StateSet out = empty_set(static_cast<StateId>(coords.size()));
    for (StateId q = 0; q < coords.size(); ++q)
      if (!coords[q].empty() && component_set[coords[q][c]]) out[q] = 1;
    return out;
  }
};

struct DerivedArena {
  TransitionSystem ts;
  ProductMap map;
};

/// Synchronous product restricted to tuples reachable from the tuple of
/// initial states.
inline DerivedArena product(const std::vector<const TransitionSystem*>& parts) {
  if (parts.empty()) throw Error("product: no components");
  const AtomPartition& atoms = parts[0]->atoms;
  for (const TransitionSystem* p : parts)
    if (p->atoms.agent != atoms.agent || p->atoms.env != atoms.env)
      throw Error("product: components disagree on atoms");
  const std::uint32_t letters = atoms.num_letters();
  const std::size_t k = parts.size();

  DerivedArena out;
  out.ts.atoms = atoms;

  std::map<std::vector<StateId>, StateId> ids;
  auto intern = [&](std::vector<StateId> tup) {
    auto [it, ins] = ids.emplace(std::move(tup),
                                 static_cast<StateId>(out.map.coords.size()));
    if (ins) out.map.coords.push_back(it->first);
    return it->second;
  };

  std::vector<StateId> start(k);
  for (std::size_t c = 0; c < k; ++c) start[c] = parts[c]->initial;
  out.ts.initial = intern(std::move(start));

  for (StateId q = 0; q < out.map.coords.size(); ++q) {
    const std::vector<StateId> cur = out.map.coords[q];
    for (Letter z = 0; z < letters; ++z) {
      std::vector<StateId> nxt(k);
      for (std::size_t c = 0; c < k; ++c) nxt[c] = parts[c]->step(cur[c], z);
      out.ts.delta.push_back(intern(std::move(nxt)));
    }
  }
  out.ts.num_states = static_cast<StateId>(out.map.coords.size());
  return out;
}

inline DerivedArena product(const TransitionSystem& a,
                            const TransitionSystem& b) {
  return product(std::vector<const TransitionSystem*>{&a, &b});
}

/// Cut the arena down to `keep`; every exit is redirected to an absorbing
/// sink. The sink is dropped again when no transition reaches it. When the
/// initial state is outside `keep` the result is the sink-only system.
inline DerivedArena restrict_to(const TransitionSystem& ts,
                                const StateSet& keep) {
  const std::uint32_t letters = ts.atoms.num_letters();
  DerivedArena out;
  out.ts.atoms = ts.atoms;

  if (!keep[ts.initial]) {
    out.map.bot = 0;
    out.map.coords.push_back({});
    out.ts.num_states = 1;
    out.ts.initial = 0;
    out.ts.delta.assign(letters, 0);
    return out;
  }

  std::vector<StateId> renum(ts.num_states, kNoState);
  for (StateId q = 0; q < ts.num_states; ++q)
    if (keep[q]) {
      renum[q] = static_cast<StateId>(out.map.coords.size());
      out.map.coords.push_back({q});
    }
  const StateId bot = static_cast<StateId>(out.map.coords.size());

  bool sink_used = false;
  for (StateId q = 0; q < ts.num_states; ++q) {
    if (!keep[q]) continue;
    for (Letter z = 0; z < letters; ++z) {
      StateId t = ts.step(q, z);
      if (keep[t]) {
        out.ts.delta.push_back(renum[t]);
      } else {
        out.ts.delta.push_back(bot);
        sink_used = true;
      }
    }
  }
  if (sink_used) {
    out.map.bot = bot;
    out.map.coords.push_back({});
    for (Letter z = 0; z < letters; ++z) out.ts.delta.push_back(bot);
  }
  out.ts.num_states = static_cast<StateId>(out.map.coords.size());
  out.ts.initial = renum[ts.initial];
  return out;
}

/// Keep v0; exits into v1 go to the losing sink and all other exits to the
/// winning sink. Both sinks are always part of the state set.
inline DerivedArena restrict_with_sinks(const TransitionSystem& ts,
                                        const StateSet& v0,
                                        const StateSet& v1) {
  for (StateId q = 0; q < ts.num_states; ++q)
    if (v0[q] && v1[q]) throw Error("restrict_with_sinks: v0 and v1 overlap");
  const std::uint32_t letters = ts.atoms.num_letters();

  DerivedArena out;
  out.ts.atoms = ts.atoms;
  std::vector<StateId> renum(ts.num_states, kNoState);
  for (StateId q = 0; q < ts.num_states; ++q)
    if (v0[q]) {
      renum[q] = static_cast<StateId>(out.map.coords.size());
      out.map.coords.push_back({q});
    }
  const StateId top = static_cast<StateId>(out.map.coords.size());
  const StateId bot = top + 1;
  out.map.top = top;
  out.map.bot = bot;
  out.map.coords.push_back({});
  out.map.coords.push_back({});

  auto image = [&](StateId t) {
    if (v0[t]) return renum[t];
    return v1[t] ? bot : top;
  };

  for (StateId q = 0; q < ts.num_states; ++q) {
    if (!v0[q]) continue;
    for (Letter z = 0; z < letters; ++z)
      out.ts.delta.push_back(image(ts.step(q, z)));
  }
  for (Letter z = 0; z < letters; ++z) out.ts.delta.push_back(top);
  for (Letter z = 0; z < letters; ++z) out.ts.delta.push_back(bot);
  out.ts.num_states = static_cast<StateId>(out.map.coords.size());
  out.ts.initial = image(ts.initial);
  return out;
}

/// Extend the arena with a monotone bit recording whether `t` has been
/// visited. Only reachable (state, flag) pairs are kept.
inline DerivedArena flagged(const TransitionSystem& ts, const StateSet& t) {
  const std::uint32_t letters = ts.atoms.num_letters();
  DerivedArena out;
  out.ts.atoms = ts.atoms;

  // Pair id before pruning: 2q + flag.
  std::vector<StateId> renum(2 * static_cast<std::size_t>(ts.num_states),
                             kNoState);
  auto intern = [&](StateId q, char b) {
    std::size_t pair = 2 * static_cast<std::size_t>(q) + b;
    if (renum[pair] == kNoState) {
      renum[pair] = static_cast<StateId>(out.map.coords.size());
      out.map.coords.push_back({q});
      out.map.flag.push_back(b);
    }
    return renum[pair];
  };

  out.ts.initial = intern(ts.initial, t[ts.initial] ? 1 : 0);
  for (StateId s = 0; s < out.map.coords.size(); ++s) {
    StateId q = out.map.coords[s][0];
    char b = out.map.flag[s];
    for (Letter z = 0; z < letters; ++z) {
      StateId n = ts.step(q, z);
      out.ts.delta.push_back(intern(n, (b || t[n]) ? 1 : 0));
    }
  }
  out.ts.num_states = static_cast<StateId>(out.map.coords.size());
  return out;
}

}  // namespace finsynth
