/*! \file verify.hpp
 *  \brief Independent referee: strategy x monitor product with monotone
 *  flags, cycle analysis, lasso counterexamples, and random simulation.
 *
 *  Two regimes, keyed to the spec shape. With a safety-only environment
 *  (regime A) the environment is restricted to its safe-winning region,
 *  which captures exactly the environments enforcing their specification.
 *  With a reachability environment component (regime B) the product is
 *  unrestricted and reachable cycles are judged by their stable flag
 *  vectors against the implication form of the objective.
 */

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "finsynth/dfa_build.hpp"
#include "finsynth/games.hpp"
#include "finsynth/synthesis.hpp"
#include "finsynth/transducer.hpp"

namespace finsynth {

enum class MonitorRole {
  EnvSafe,      // regime A: forall phi1
  EnvNegReach,  // regime B: exists not-phi1
  EnvNegSafe,   // regime B: forall not-phi2
  TaskReach,    // exists phi3
  TaskSafe      // forall phi4
};

struct MonitorProduct {
  static constexpr std::uint32_t kBlocked = 0xffffffffu;

  struct Component {
    DetAutomaton da;
    MonitorRole role;
  };
  struct Node {
    std::uint32_t m;
    std::vector<StateId> q;
    std::uint8_t flags;  // bit i: component i reached its target (reach)
                         // or left its safe set (safe)
    bool operator<(const Node& o) const {
      if (m != o.m) return m < o.m;
      if (q != o.q) return q < o.q;
      return flags < o.flags;
    }
  };

  MealyStrategy strat;
  bool regime_b = false;
  bool env_vacuous = false;  // regime A: env cannot enforce its own spec
  std::vector<Component> comps;
  int env_idx = -1;  // regime A env component
  StateSet env_region;
  std::vector<Node> nodes;
  std::vector<std::vector<std::uint32_t>> succ;  // [node][X], kBlocked if cut
  std::uint32_t initial = 0;

  int index_of(MonitorRole r) const {
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (comps[i].role == r) return static_cast<int>(i);
    return -1;
  }
  bool flag(std::uint32_t n, int comp) const {
    return comp >= 0 && ((nodes[n].flags >> comp) & 1u);
  }
};

/// Lasso of raw environment moves (X masks, unshifted).
struct Lasso {
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;
};

struct VerifyResult {
  bool pass = true;
  std::optional<Lasso> counterexample;
  std::string reason;
};

inline MonitorProduct build_monitor(const MealyStrategy& s,
                                    const ProblemSpec& spec) {
  if (s.atoms.agent != spec.atoms.agent || s.atoms.env != spec.atoms.env)
    throw Error("verify: strategy and spec disagree on atoms");
  MonitorProduct mp;
  mp.strat = s;
  mp.regime_b = spec.env_reach.has_value();

  if (mp.regime_b) {
    mp.comps.push_back(
        {convert_da(PrefixMode::Exists,
                    Formula::negate(detail::or_true(spec.env_safe)),
                    spec.atoms),
         MonitorRole::EnvNegReach});
    mp.comps.push_back(
        {convert_da(PrefixMode::Forall, Formula::negate(*spec.env_reach),
                    spec.atoms),
         MonitorRole::EnvNegSafe});
    mp.comps.push_back({convert_da(PrefixMode::Exists,
                                   detail::or_true(spec.task_reach),
                                   spec.atoms),
                        MonitorRole::TaskReach});
    mp.comps.push_back({convert_da(PrefixMode::Forall,
                                   detail::or_true(spec.task_safe),
                                   spec.atoms),
                        MonitorRole::TaskSafe});
  } else {
    if (spec.env_safe) {
      mp.comps.push_back(
          {convert_da(PrefixMode::Forall, *spec.env_safe, spec.atoms),
           MonitorRole::EnvSafe});
      mp.env_idx = 0;
    }
    if (spec.task_reach)
      mp.comps.push_back(
          {convert_da(PrefixMode::Exists, *spec.task_reach, spec.atoms),
           MonitorRole::TaskReach});
    if (spec.task_safe)
      mp.comps.push_back(
          {convert_da(PrefixMode::Forall, *spec.task_safe, spec.atoms),
           MonitorRole::TaskSafe});
    if (mp.env_idx >= 0) {
      const DetAutomaton& env = mp.comps[mp.env_idx].da;
      mp.env_region = solve_safe(env.ts, env.target, Player::Env).winning;
      if (!mp.env_region[env.ts.initial]) {
        mp.env_vacuous = true;
        return mp;
      }
    }
  }

  const int na = static_cast<int>(spec.atoms.agent.size());
  const std::uint32_t nx = spec.atoms.num_env_moves();
  const std::size_t k = mp.comps.size();

  auto flags_at = [&](const std::vector<StateId>& q, std::uint8_t prev) {
    std::uint8_t f = prev;
    for (std::size_t i = 0; i < k; ++i) {
      bool in_t = mp.comps[i].da.target[q[i]] != 0;
      bool hit = mp.comps[i].da.objective == ObjectiveKind::Reach ? in_t
                                                                  : !in_t;
      if (hit) f |= std::uint8_t(1u << i);
    }
    return f;
  };

  std::map<MonitorProduct::Node, std::uint32_t> ids;
  auto intern = [&](MonitorProduct::Node n) {
    auto [it, ins] =
        ids.emplace(std::move(n), static_cast<std::uint32_t>(mp.nodes.size()));
    if (ins) mp.nodes.push_back(it->first);
    return it->second;
  };

  MonitorProduct::Node init;
  init.m = s.initial;
  init.q.resize(k);
  for (std::size_t i = 0; i < k; ++i) init.q[i] = mp.comps[i].da.ts.initial;
  init.flags = flags_at(init.q, 0);
  mp.initial = intern(std::move(init));

  for (std::uint32_t n = 0; n < mp.nodes.size(); ++n) {
    const MonitorProduct::Node cur = mp.nodes[n];
    mp.succ.emplace_back(nx, MonitorProduct::kBlocked);
    Letter y = s.output[cur.m];
    for (Letter x = 0; x < nx; ++x) {
      Letter z = y | (x << na);
      MonitorProduct::Node nxt;
      nxt.m = s.step(cur.m, x);
      nxt.q.resize(k);
      for (std::size_t i = 0; i < k; ++i)
        nxt.q[i] = mp.comps[i].da.ts.step(cur.q[i], z);
      if (mp.env_idx >= 0 && !mp.env_region[nxt.q[mp.env_idx]]) continue;
      nxt.flags = flags_at(nxt.q, cur.flags);
      mp.succ[n][x] = intern(std::move(nxt));
    }
  }
  return mp;
}

namespace detail {

/// Iterative Tarjan over allowed product edges; returns per-node SCC ids.
inline std::vector<std::uint32_t> scc_ids(const MonitorProduct& mp,
                                          std::uint32_t* num_sccs) {
  const std::uint32_t n = static_cast<std::uint32_t>(mp.nodes.size());
  const std::uint32_t nx = mp.strat.atoms.num_env_moves();
  constexpr std::uint32_t kUnset = 0xffffffffu;
  std::vector<std::uint32_t> idx(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::uint32_t counter = 0, sccs = 0;

  struct Frame {
    std::uint32_t v;
    Letter x;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (idx[root] != kUnset) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.x < nx) {
        std::uint32_t w = mp.succ[f.v][f.x];
        ++f.x;
        if (w == MonitorProduct::kBlocked) continue;
        if (idx[w] == kUnset) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        std::uint32_t v = f.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == idx[v]) {
          for (;;) {
            std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = sccs;
            if (w == v) break;
          }
          ++sccs;
        }
      }
    }
  }
  if (num_sccs) *num_sccs = sccs;
  return comp;
}

/// Env-letter path from the initial node to `target` via BFS parents.
inline std::vector<Letter> path_to(const MonitorProduct& mp,
                                   std::uint32_t target) {
  const std::uint32_t nx = mp.strat.atoms.num_env_moves();
  std::vector<std::int64_t> parent(mp.nodes.size(), -1);
  std::vector<Letter> via(mp.nodes.size(), 0);
  std::vector<std::uint32_t> queue{mp.initial};
  parent[mp.initial] = static_cast<std::int64_t>(mp.initial);
  for (std::size_t h = 0; h < queue.size(); ++h) {
    std::uint32_t v = queue[h];
    if (v == target) break;
    for (Letter x = 0; x < nx; ++x) {
      std::uint32_t w = mp.succ[v][x];
      if (w == MonitorProduct::kBlocked || parent[w] >= 0) continue;
      parent[w] = v;
      via[w] = x;
      queue.push_back(w);
    }
  }
  std::vector<Letter> path;
  for (std::uint32_t v = target; v != mp.initial;
       v = static_cast<std::uint32_t>(parent[v]))
    path.push_back(via[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

/// Env-letter cycle from `start`, staying inside its SCC when `comp` is
/// given, otherwise through any allowed edges.
inline std::vector<Letter> cycle_from(const MonitorProduct& mp,
                                      std::uint32_t start,
                                      const std::vector<std::uint32_t>* comp) {
  const std::uint32_t nx = mp.strat.atoms.num_env_moves();
  std::vector<std::int64_t> seen_at(mp.nodes.size(), -1);
  std::vector<std::uint32_t> path_nodes{start};
  std::vector<Letter> path_letters;
  seen_at[start] = 0;
  for (;;) {
    std::uint32_t v = path_nodes.back();
    bool moved = false;
    for (Letter x = 0; x < nx; ++x) {
      std::uint32_t w = mp.succ[v][x];
      if (w == MonitorProduct::kBlocked) continue;
      if (comp && (*comp)[w] != (*comp)[start]) continue;
      path_letters.push_back(x);
      if (seen_at[w] >= 0) {
        // Loop found: letters from the first visit of w onward.
        std::vector<Letter> cyc(path_letters.begin() + seen_at[w],
                                path_letters.end());
        return cyc;
      }
      seen_at[w] = static_cast<std::int64_t>(path_letters.size());
      path_nodes.push_back(w);
      moved = true;
      break;
    }
    if (!moved) throw Error("verify: dead end while extracting a cycle");
  }
}

}  // namespace detail

inline VerifyResult verify(const MealyStrategy& s, const ProblemSpec& spec) {
  MonitorProduct mp = build_monitor(s, spec);
  VerifyResult res;
  if (mp.env_vacuous) {
    res.reason = "no environment strategy enforces the assumption";
    return res;
  }
  const int i1 = mp.index_of(MonitorRole::EnvNegReach);
  const int i2 = mp.index_of(MonitorRole::EnvNegSafe);
  const int i3 = mp.index_of(MonitorRole::TaskReach);
  const int i4 = mp.index_of(MonitorRole::TaskSafe);

  if (!mp.regime_b) {
    // Any reachable task-safety violation fails outright.
    if (i4 >= 0) {
      for (std::uint32_t n = 0; n < mp.nodes.size(); ++n) {
        if (!mp.flag(n, i4)) continue;
        res.pass = false;
        res.reason = "task safety violated";
        Lasso l;
        l.prefix = detail::path_to(mp, n);
        l.cycle = detail::cycle_from(mp, n, nullptr);
        res.counterexample = l;
        return res;
      }
    }
    if (i3 >= 0) {
      std::uint32_t nsccs = 0;
      std::vector<std::uint32_t> comp = detail::scc_ids(mp, &nsccs);
      const std::uint32_t nx = mp.strat.atoms.num_env_moves();
      std::vector<char> internal(nsccs, 0);
      for (std::uint32_t n = 0; n < mp.nodes.size(); ++n)
        for (Letter x = 0; x < nx; ++x) {
          std::uint32_t w = mp.succ[n][x];
          if (w != MonitorProduct::kBlocked && comp[w] == comp[n])
            internal[comp[n]] = 1;
        }
      for (std::uint32_t n = 0; n < mp.nodes.size(); ++n) {
        if (!internal[comp[n]] || mp.flag(n, i3)) continue;
        res.pass = false;
        res.reason = "task reachability avoidable forever";
        Lasso l;
        l.prefix = detail::path_to(mp, n);
        l.cycle = detail::cycle_from(mp, n, &comp);
        res.counterexample = l;
        return res;
      }
    }
    return res;
  }

  // Regime B: stable flag vector of some pumpable cycle falsifies
  // (env-safety broken) or (env-reach never met) or (task met).
  std::uint32_t nsccs = 0;
  std::vector<std::uint32_t> comp = detail::scc_ids(mp, &nsccs);
  const std::uint32_t nx = mp.strat.atoms.num_env_moves();
  std::vector<char> internal(nsccs, 0);
  for (std::uint32_t n = 0; n < mp.nodes.size(); ++n)
    for (Letter x = 0; x < nx; ++x) {
      std::uint32_t w = mp.succ[n][x];
      if (w != MonitorProduct::kBlocked && comp[w] == comp[n])
        internal[comp[n]] = 1;
    }
  for (std::uint32_t n = 0; n < mp.nodes.size(); ++n) {
    if (!internal[comp[n]]) continue;
    bool env_broken = mp.flag(n, i1);            // exists not-phi1 met
    bool env_reach_met = mp.flag(n, i2);         // forall not-phi2 violated
    bool task_reach_met = mp.flag(n, i3);
    bool task_safe_broken = mp.flag(n, i4);
    bool satisfied =
        env_broken || !env_reach_met || (task_reach_met && !task_safe_broken);
    if (satisfied) continue;
    res.pass = false;
    res.reason = "implication falsified on a reachable cycle";
    Lasso l;
    l.prefix = detail::path_to(mp, n);
    l.cycle = detail::cycle_from(mp, n, &comp);
    res.counterexample = l;
    return res;
  }
  return res;
}

struct SimReport {
  std::uint32_t episodes = 0;
  std::uint32_t horizon = 0;
  std::uint64_t seed = 0;
  std::size_t violations_uniform = 0;  // episodes with a definitive violation
  std::size_t violations_region = 0;
  std::size_t reach_uniform = 0;  // episodes where the task target was seen
  std::size_t reach_region = 0;
};

/// Random smoke test. "Region" episodes draw environment moves among those
/// allowed by the product (in regime A, the env stays in its safe region);
/// uniform episodes draw any move. A violation is counted only when the
/// property checked by verify in the matching regime is definitively lost.
inline SimReport simulate_random(const MealyStrategy& s,
                                 const ProblemSpec& spec,
                                 std::uint32_t episodes, std::uint32_t horizon,
                                 std::uint64_t seed) {
  if (horizon == 0) throw Error("simulate: horizon must be at least 1");
  SimReport rep;
  rep.episodes = episodes;
  rep.horizon = horizon;
  rep.seed = seed;
  MonitorProduct mp = build_monitor(s, spec);
  if (mp.env_vacuous) return rep;

  const int i1 = mp.index_of(MonitorRole::EnvNegReach);
  const int i2 = mp.index_of(MonitorRole::EnvNegSafe);
  const int i3 = mp.index_of(MonitorRole::TaskReach);
  const int i4 = mp.index_of(MonitorRole::TaskSafe);
  const std::uint32_t nx = s.atoms.num_env_moves();

  // Regime B: nodes from which the env-safety violation can still be
  // reached; a play outside this set with both safety flags raised has
  // definitively falsified the implication.
  std::vector<char> can_reach_escape;
  if (mp.regime_b) {
    can_reach_escape.assign(mp.nodes.size(), 0);
    std::vector<std::vector<std::uint32_t>> preds(mp.nodes.size());
    for (std::uint32_t n = 0; n < mp.nodes.size(); ++n)
      for (Letter x = 0; x < nx; ++x)
        if (mp.succ[n][x] != MonitorProduct::kBlocked)
          preds[mp.succ[n][x]].push_back(n);
    std::vector<std::uint32_t> queue;
    for (std::uint32_t n = 0; n < mp.nodes.size(); ++n)
      if (mp.flag(n, i1)) {
        can_reach_escape[n] = 1;
        queue.push_back(n);
      }
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (std::uint32_t p : preds[queue[h]])
        if (!can_reach_escape[p]) {
          can_reach_escape[p] = 1;
          queue.push_back(p);
        }
  }

  std::mt19937_64 rng(seed);
  for (int mode = 0; mode < 2; ++mode) {
    const bool region = mode == 1;
    for (std::uint32_t e = 0; e < episodes; ++e) {
      std::uint32_t n = mp.initial;
      bool violated = false, reached = i3 >= 0 && mp.flag(mp.initial, i3);
      for (std::uint32_t step = 0; step < horizon; ++step) {
        Letter x;
        if (region) {
          std::vector<Letter> allowed;
          for (Letter c = 0; c < nx; ++c)
            if (mp.succ[n][c] != MonitorProduct::kBlocked) allowed.push_back(c);
          if (allowed.empty()) break;
          x = allowed[rng() % allowed.size()];
        } else {
          x = static_cast<Letter>(rng() % nx);
        }
        std::uint32_t w = mp.succ[n][x];
        if (w == MonitorProduct::kBlocked) {
          // The env left its own region; the play no longer witnesses
          // anything about the agent. Stop the episode.
          break;
        }
        n = w;
        if (i3 >= 0 && mp.flag(n, i3)) reached = true;
        if (mp.regime_b) {
          if (mp.flag(n, i2) && mp.flag(n, i4) && !can_reach_escape[n])
            violated = true;
        } else {
          if (i4 >= 0 && mp.flag(n, i4)) violated = true;
        }
      }
      if (region) {
        rep.violations_region += violated ? 1 : 0;
        rep.reach_region += reached ? 1 : 0;
      } else {
        rep.violations_uniform += violated ? 1 : 0;
        rep.reach_uniform += reached ? 1 : 0;
      }
    }
  }
  return rep;
}

}  // namespace finsynth
