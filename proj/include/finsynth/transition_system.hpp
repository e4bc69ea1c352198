/*! \file transition_system.hpp
 *  \brief Shared-alphabet deterministic machines: arenas, DFAs, and
 *         deterministic automata with reach/safe objectives.
 */

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "finsynth/atoms.hpp"

namespace finsynth {

/// A set of states, indexed by StateId.
using StateSet = std::vector<char>;

inline StateSet empty_set(std::size_t n) { return StateSet(n, 0); }
inline StateSet full_set(std::size_t n) { return StateSet(n, 1); }
inline std::size_t count(const StateSet& s) {
  std::size_t c = 0;
  for (char b : s) c += (b != 0);
  return c;
}
inline StateSet complement(const StateSet& s) {
  StateSet out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = !s[i];
  return out;
}
inline StateSet set_union(const StateSet& a, const StateSet& b) {
  StateSet out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}
inline StateSet set_intersect(const StateSet& a, const StateSet& b) {
  StateSet out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}
inline StateSet set_minus(const StateSet& a, const StateSet& b) {
  StateSet out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && !b[i];
  return out;
}

/// Deterministic, total transition system over the explicit alphabet
/// 2^(agent atoms + env atoms). delta is stored row-major per state.
struct TransitionSystem {
  AtomPartition atoms;
  StateId num_states = 0;
  StateId initial = 0;
  std::vector<StateId> delta;  // delta[q * num_letters + z]

  std::uint32_t num_letters() const { return atoms.num_letters(); }

  StateId step(StateId q, Letter z) const {
    return delta[static_cast<std::size_t>(q) * num_letters() + z];
  }
  StateId& step_ref(StateId q, Letter z) {
    return delta[static_cast<std::size_t>(q) * num_letters() + z];
  }

  /// Run on a finite word; returns the reached state.
  StateId run(const FiniteTrace& word) const {
    StateId q = initial;
    for (Letter z : word) q = step(q, z);
    return q;
  }

  void check_total() const {
    if (delta.size() != static_cast<std::size_t>(num_states) * num_letters())
      throw Error("transition system is not total");
    for (StateId t : delta)
      if (t >= num_states) throw Error("transition target out of range");
  }
};

struct Dfa {
  TransitionSystem ts;
  StateSet finals;  // indexed by state

  bool accepts(const FiniteTrace& word) const {
    if (word.empty()) return false;  // LTLf languages never contain epsilon
    return finals[ts.run(word)];
  }
};

enum class ObjectiveKind { Reach, Safe };

/// Deterministic automaton on infinite words with a reach(T) or safe(T)
/// objective.
struct DetAutomaton {
  TransitionSystem ts;
  ObjectiveKind objective = ObjectiveKind::Reach;
  StateSet target;
};

/// DOT text, one line per transition, letters as sorted atom sets.
inline void write_dot(std::ostream& os, const TransitionSystem& ts,
                      const StateSet* finals = nullptr,
                      const std::vector<std::string>* labels = nullptr) {
  os << "digraph ts {\n";
  os << "  init [shape=point];\n";
  for (StateId q = 0; q < ts.num_states; ++q) {
    os << "  q" << q << " [label=\""
       << (labels ? (*labels)[q] : std::to_string(q)) << "\""
       << (finals && (*finals)[q] ? ", shape=doublecircle" : ", shape=circle")
       << "];\n";
  }
  os << "  init -> q" << ts.initial << ";\n";
  for (StateId q = 0; q < ts.num_states; ++q)
    for (Letter z = 0; z < ts.num_letters(); ++z)
      os << "  q" << q << " -> q" << ts.step(q, z) << " [label=\""
         << ts.atoms.format_letter(z) << "\"];\n";
  os << "}\n";
}

}  // namespace finsynth
