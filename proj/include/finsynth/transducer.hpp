/*! \file transducer.hpp
 *  \brief Finite-state agent strategies (agent moves first) and their
 *  canonical JSON / DOT serialization.
 */

#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsynth/atoms.hpp"
#include "finsynth/games.hpp"
#include "finsynth/transition_system.hpp"

namespace finsynth {

/// Moore-style transducer: the output is attached to the memory state, so
/// the initial output exists before any environment input.
struct MealyStrategy {
  AtomPartition atoms;
  std::uint32_t num_states = 0;
  std::uint32_t initial = 0;
  std::vector<Letter> output;                      // Y mask per state
  std::vector<std::vector<std::uint32_t>> update;  // [state][X mask]

  std::uint32_t step(std::uint32_t m, Letter x_mask) const {
    return update[m][x_mask];
  }
};

struct PlayRecord {
  std::vector<Letter> outputs;  // Y masks, one more than inputs
  std::vector<Letter> inputs;   // raw X masks (unshifted)
  FiniteTrace trace;            // combined letters, |inputs| long
};

/// Strategy induced by a positional function on an arena: memory is the
/// arena state reached so far; only reachable memories are kept.
inline MealyStrategy from_positional(const TransitionSystem& ts, StateId start,
                                     const AgentPositional& f) {
  const std::uint32_t nx = ts.atoms.num_env_moves();
  const int na = static_cast<int>(ts.atoms.agent.size());

  MealyStrategy s;
  s.atoms = ts.atoms;
  std::vector<StateId> renum(ts.num_states, kNoState);
  std::vector<StateId> order;
  auto intern = [&](StateId q) {
    if (renum[q] == kNoState) {
      renum[q] = static_cast<StateId>(order.size());
      order.push_back(q);
    }
    return renum[q];
  };
  s.initial = intern(start);
  for (std::uint32_t m = 0; m < order.size(); ++m) {
    StateId q = order[m];
    s.output.push_back(f(q));
    s.update.emplace_back();
    for (Letter x = 0; x < nx; ++x)
      s.update.back().push_back(intern(ts.step(q, f(q) | (x << na))));
  }
  s.num_states = static_cast<std::uint32_t>(order.size());
  return s;
}

/// Agent-first protocol: emit Y0, read X0, emit Y1, ...
inline PlayRecord run(const MealyStrategy& s,
                      const std::vector<Letter>& env_inputs) {
  const int na = static_cast<int>(s.atoms.agent.size());
  PlayRecord rec;
  rec.inputs = env_inputs;
  std::uint32_t m = s.initial;
  rec.outputs.push_back(s.output[m]);
  for (Letter x : env_inputs) {
    rec.trace.push_back(s.output[m] | (x << na));
    m = s.step(m, x);
    rec.outputs.push_back(s.output[m]);
  }
  return rec;
}

namespace detail {

inline std::string csv_atoms(const std::vector<std::string>& names,
                             Letter mask) {
  std::vector<std::string> on;
  for (std::size_t i = 0; i < names.size(); ++i)
    if ((mask >> i) & 1u) on.push_back(names[i]);
  std::sort(on.begin(), on.end());
  std::string out;
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (i) out += ",";
    out += on[i];
  }
  return out;
}

inline Letter mask_from_csv(const std::vector<std::string>& names,
                            const std::string& csv) {
  Letter mask = 0;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error("strategy document: empty atom name");
    auto it = std::find(names.begin(), names.end(), item);
    if (it == names.end()) throw UndeclaredAtomError(item);
    mask |= 1u << (it - names.begin());
  }
  return mask;
}

}  // namespace detail

inline nlohmann::ordered_json strategy_to_json(const MealyStrategy& s) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["atoms"]["agent"] = s.atoms.agent;
  j["atoms"]["env"] = s.atoms.env;
  j["states"] = s.num_states;
  j["initial"] = s.initial;
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  nlohmann::ordered_json delta = nlohmann::ordered_json::object();
  const std::uint32_t nx = s.atoms.num_env_moves();
  for (std::uint32_t m = 0; m < s.num_states; ++m) {
    std::vector<std::string> ys;
    for (std::size_t i = 0; i < s.atoms.agent.size(); ++i)
      if ((s.output[m] >> i) & 1u) ys.push_back(s.atoms.agent[i]);
    std::sort(ys.begin(), ys.end());
    out[std::to_string(m)] = ys;
    // Keys in lexicographic order of the csv label for byte stability.
    std::map<std::string, std::uint32_t> row;
    for (Letter x = 0; x < nx; ++x)
      row[detail::csv_atoms(s.atoms.env, x)] = s.update[m][x];
    nlohmann::ordered_json jrow = nlohmann::ordered_json::object();
    for (const auto& [k, v] : row) jrow[k] = v;
    delta[std::to_string(m)] = jrow;
  }
  j["output"] = out;
  j["delta"] = delta;
  return j;
}

inline std::string export_strategy(const MealyStrategy& s) {
  return strategy_to_json(s).dump(2) + "\n";
}

inline MealyStrategy import_strategy(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("strategy document: ") + e.what(), 0);
  }
  if (!j.is_object() || !j.contains("version") || j["version"] != 1)
    throw Error("strategy document: unsupported version");
  MealyStrategy s;
  try {
    s.atoms.agent = j.at("atoms").at("agent").get<std::vector<std::string>>();
    s.atoms.env = j.at("atoms").at("env").get<std::vector<std::string>>();
    s.atoms.validate();
    s.num_states = j.at("states").get<std::uint32_t>();
    s.initial = j.at("initial").get<std::uint32_t>();
    if (s.initial >= s.num_states)
      throw Error("strategy document: initial state out of range");
    const std::uint32_t nx = s.atoms.num_env_moves();
    s.output.assign(s.num_states, 0);
    s.update.assign(s.num_states, std::vector<std::uint32_t>(nx, 0));
    std::vector<std::vector<char>> seen(s.num_states,
                                        std::vector<char>(nx, 0));
    for (std::uint32_t m = 0; m < s.num_states; ++m) {
      const std::string key = std::to_string(m);
      for (const auto& name :
           j.at("output").at(key).get<std::vector<std::string>>()) {
        int b = s.atoms.index_of(name);
        if (b < 0 || static_cast<std::size_t>(b) >= s.atoms.agent.size())
          throw Error("strategy document: output atom '" + name +
                      "' is not an agent atom");
        s.output[m] |= 1u << b;
      }
      for (const auto& [csv, tgt] : j.at("delta").at(key).items()) {
        Letter x = detail::mask_from_csv(s.atoms.env, csv);
        std::uint32_t t = tgt.get<std::uint32_t>();
        if (t >= s.num_states)
          throw Error("strategy document: transition target out of range");
        s.update[m][x] = t;
        seen[m][x] = 1;
      }
      for (Letter x = 0; x < nx; ++x)
        if (!seen[m][x])
          throw Error("strategy document: missing transition for state " +
                      key + ", input {" + detail::csv_atoms(s.atoms.env, x) +
                      "}");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("strategy document: ") + e.what());
  }
  return s;
}

inline std::string strategy_to_dot(const MealyStrategy& s) {
  std::ostringstream os;
  os << "digraph strategy {\n  rankdir=LR;\n";
  for (std::uint32_t m = 0; m < s.num_states; ++m) {
    os << "  n" << m << " [label=\"" << m << " / {"
       << detail::csv_atoms(s.atoms.agent, s.output[m]) << "}\"";
    if (m == s.initial) os << ", shape=doublecircle";
    os << "];\n";
  }
  const std::uint32_t nx = s.atoms.num_env_moves();
  for (std::uint32_t m = 0; m < s.num_states; ++m)
    for (Letter x = 0; x < nx; ++x)
      os << "  n" << m << " -> n" << s.update[m][x] << " [label=\"{"
         << detail::csv_atoms(s.atoms.env, x) << "}\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace finsynth
