/*! \file dfa_build.hpp
 *  \brief LTLf-to-DFA compilation and the reach/safe automaton lift.
 *
 *  Pipeline: NNF -> obligation-set NFA (formula progression) -> subset
 *  construction -> partition-refinement minimization. convert_da
 *  additionally clones the initial state when it is re-enterable, which
 *  the safe(F + {initial}) objective of the forall case requires.
 */

#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "finsynth/atoms.hpp"
#include "finsynth/formula.hpp"
#include "finsynth/transition_system.hpp"

namespace finsynth {

inline constexpr std::size_t kDefaultStateCap = 200000;

/// Effective DFA state cap: FINSYNTH_STATE_CAP overrides the default.
inline std::size_t state_cap() {
  if (const char* env = std::getenv("FINSYNTH_STATE_CAP")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultStateCap;
}

namespace detail {

// Interned NNF formulas. Ids >= 0 index the node table; kEndToken marks the
// obligation "the word must end here" produced by weak next.
inline constexpr int kEndToken = -1;

struct NnfNode {
  Op op;            // True, False, Atom, Not(Atom), And, Or, Next,
                    // WeakNext, Until, Release
  int atom_bit;     // for Atom / Not
  int left, right;  // child ids, -1 when unused
  bool operator<(const NnfNode& o) const {
    if (op != o.op) return op < o.op;
    if (atom_bit != o.atom_bit) return atom_bit < o.atom_bit;
    if (left != o.left) return left < o.left;
    return right < o.right;
  }
};

class NnfPool {
public:
  explicit NnfPool(const AtomPartition& atoms) : atoms_(atoms) {}

  int intern(const Formula& f) {
    switch (f.op()) {
      case Op::True:
        return put({Op::True, -1, -1, -1});
      case Op::False:
        return put({Op::False, -1, -1, -1});
      case Op::Atom:
        return put({Op::Atom, bit_of(f), -1, -1});
      case Op::Not:
        return put({Op::Not, bit_of(f.left()), -1, -1});
      case Op::Next:
        return put({Op::Next, -1, intern(f.left()), -1});
      case Op::WeakNext:
        return put({Op::WeakNext, -1, intern(f.left()), -1});
      case Op::And:
        return put({Op::And, -1, intern(f.left()), intern(f.right())});
      case Op::Or:
        return put({Op::Or, -1, intern(f.left()), intern(f.right())});
      case Op::Until:
        return put({Op::Until, -1, intern(f.left()), intern(f.right())});
      case Op::Release:
        return put({Op::Release, -1, intern(f.left()), intern(f.right())});
      default:
        throw Error("intern: formula is not in negation normal form");
    }
  }

  const NnfNode& node(int id) const { return nodes_[id]; }

private:
  int bit_of(const Formula& f) const {
    int b = atoms_.index_of(f.atom_name());
    if (b < 0) throw UndeclaredAtomError(f.atom_name());
    return b;
  }
  int put(NnfNode n) {
    auto [it, inserted] = ids_.emplace(n, static_cast<int>(nodes_.size()));
    if (inserted) nodes_.push_back(n);
    return it->second;
  }

  const AtomPartition& atoms_;
  std::vector<NnfNode> nodes_;
  std::map<NnfNode, int> ids_;
};

// An NFA state is a sorted set of obligations that must hold on the
// remaining suffix. A state accepts (the word may end here) when every
// obligation is the end token.
using Obligations = std::vector<int>;

inline Obligations merged(const Obligations& a, const Obligations& b) {
  Obligations out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

/// Nondeterministic choices of next-step obligations when reading letter z
/// at a position where `id` must hold.
inline void choices(const NnfPool& pool, int id, Letter z,
                    std::vector<Obligations>& out) {
  const NnfNode& n = pool.node(id);
  switch (n.op) {
    case Op::True:
      out.push_back({});
      return;
    case Op::False:
      return;
    case Op::Atom:
      if ((z >> n.atom_bit) & 1u) out.push_back({});
      return;
    case Op::Not:
      if (!((z >> n.atom_bit) & 1u)) out.push_back({});
      return;
    case Op::Next:
      out.push_back({n.left});
      return;
    case Op::WeakNext:
      out.push_back({n.left});
      out.push_back({kEndToken});
      return;
    case Op::And: {
      std::vector<Obligations> ls, rs;
      choices(pool, n.left, z, ls);
      choices(pool, n.right, z, rs);
      for (const auto& l : ls)
        for (const auto& r : rs) out.push_back(merged(l, r));
      return;
    }
    case Op::Or: {
      choices(pool, n.left, z, out);
      choices(pool, n.right, z, out);
      return;
    }
    case Op::Until: {
      // g now, or (f now and U next). U requires a next position.
      choices(pool, n.right, z, out);
      std::vector<Obligations> ls;
      choices(pool, n.left, z, ls);
      for (auto& l : ls) out.push_back(merged(l, {id}));
      return;
    }
    case Op::Release: {
      // g now and (f now, or this is the last position, or R next).
      std::vector<Obligations> gs, fs;
      choices(pool, n.right, z, gs);
      choices(pool, n.left, z, fs);
      for (const auto& g : gs) {
        for (const auto& f : fs) out.push_back(merged(g, f));
        out.push_back(merged(g, {id}));
        out.push_back(merged(g, {kEndToken}));
      }
      return;
    }
    default:
      throw Error("choices: unexpected operator");
  }
}

inline bool obligations_accepting(const Obligations& s) {
  for (int id : s)
    if (id != kEndToken) return false;
  return true;
}

inline void dedup(std::vector<Obligations>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

/// Hopcroft-style partition refinement; same language, minimal state count.
/// The input must be total with all states reachable.
inline Dfa minimize(const Dfa& in) {
  const StateId n = in.ts.num_states;
  const std::uint32_t letters = in.ts.num_letters();

  std::vector<int> block(n);
  for (StateId q = 0; q < n; ++q) block[q] = in.finals[q] ? 1 : 0;
  int num_blocks = 2;
  // A block may be empty (all-final or no-final automata); normalize below.

  bool changed = true;
  while (changed) {
    changed = false;
    // Signature = (block, successor blocks); split blocks by signature.
    std::map<std::vector<int>, int> sig_to_new;
    std::vector<int> next_block(n);
    for (StateId q = 0; q < n; ++q) {
      std::vector<int> sig;
      sig.reserve(letters + 1);
      sig.push_back(block[q]);
      for (Letter z = 0; z < letters; ++z)
        sig.push_back(block[in.ts.step(q, z)]);
      next_block[q] = sig_to_new
                          .emplace(std::move(sig),
                                   static_cast<int>(sig_to_new.size()))
                          .first->second;
    }
    if (static_cast<int>(sig_to_new.size()) != num_blocks) changed = true;
    num_blocks = static_cast<int>(sig_to_new.size());
    block = std::move(next_block);
  }

  // Rebuild with block of the initial state first is unnecessary; keep the
  // discovered numbering and renumber by first occurrence for determinism.
  std::vector<StateId> renum(num_blocks, kNoState);
  StateId fresh = 0;
  std::vector<StateId> rep;  // representative per new id
  for (StateId q = 0; q < n; ++q)
    if (renum[block[q]] == kNoState) {
      renum[block[q]] = fresh++;
      rep.push_back(q);
    }

  Dfa out;
  out.ts.atoms = in.ts.atoms;
  out.ts.num_states = fresh;
  out.ts.initial = renum[block[in.ts.initial]];
  out.ts.delta.resize(static_cast<std::size_t>(fresh) * letters);
  out.finals = empty_set(fresh);
  for (StateId b = 0; b < fresh; ++b) {
    StateId q = rep[b];
    out.finals[b] = in.finals[q];
    for (Letter z = 0; z < letters; ++z)
      out.ts.step_ref(b, z) = renum[block[in.ts.step(q, z)]];
  }
  return out;
}

/// Minimal DFA of the finite-trace language of phi. The empty word is
/// never accepted, so the initial state is never final.
inline Dfa ltlf_to_dfa(const Formula& phi, const AtomPartition& atoms) {
  check_atoms_declared(phi, atoms);
  detail::NnfPool pool(atoms);
  const int root = pool.intern(to_nnf(phi));
  const std::uint32_t letters = atoms.num_letters();
  const std::size_t cap = state_cap();

  using NfaState = detail::Obligations;
  // Subset construction over NFA states (sets of obligation sets).
  using Subset = std::vector<NfaState>;  // sorted, unique

  std::map<Subset, StateId> ids;
  std::vector<Subset> subsets;
  auto intern_subset = [&](Subset s) {
    auto [it, ins] = ids.emplace(std::move(s), static_cast<StateId>(subsets.size()));
    if (ins) {
      subsets.push_back(it->first);
      if (subsets.size() > cap)
        throw ResourceLimitError("DFA state cap exceeded (" +
                                 std::to_string(cap) + ")");
    }
    return it->second;
  };

  // One NFA state stepped on letter z: cross product of per-obligation
  // choices, or nothing when some obligation is violated.
  auto step_nfa_state = [&](const NfaState& s, Letter z,
                            std::vector<NfaState>& succ) {
    std::vector<detail::Obligations> acc{{}};
    for (int id : s) {
      if (id == detail::kEndToken) return;  // word had to end before z
      std::vector<detail::Obligations> ch;
      detail::choices(pool, id, z, ch);
      detail::dedup(ch);
      if (ch.empty()) return;
      std::vector<detail::Obligations> next_acc;
      for (const auto& a : acc)
        for (const auto& c : ch) next_acc.push_back(detail::merged(a, c));
      detail::dedup(next_acc);
      acc = std::move(next_acc);
    }
    for (auto& a : acc) succ.push_back(std::move(a));
  };

  Dfa dfa;
  dfa.ts.atoms = atoms;
  dfa.ts.initial = intern_subset(Subset{NfaState{root}});

  std::vector<StateId> delta;
  for (StateId q = 0; q < subsets.size(); ++q) {
    const Subset current = subsets[q];  // copy: subsets may reallocate
    for (Letter z = 0; z < letters; ++z) {
      std::vector<NfaState> succ;
      for (const NfaState& s : current) step_nfa_state(s, z, succ);
      detail::dedup(succ);
      delta.push_back(intern_subset(std::move(succ)));
    }
  }
  dfa.ts.num_states = static_cast<StateId>(subsets.size());
  dfa.ts.delta = std::move(delta);
  dfa.finals = empty_set(dfa.ts.num_states);
  for (StateId q = 0; q < dfa.ts.num_states; ++q)
    for (const NfaState& s : subsets[q])
      if (detail::obligations_accepting(s)) {
        dfa.finals[q] = 1;
        break;
      }
  dfa.ts.check_total();
  return minimize(dfa);
}

/// Same language; the initial state gains a fresh non-reentrant copy when
/// some transition targets it. Idempotent.
inline Dfa make_initial_nonreentrant(const Dfa& in) {
  bool reentrant = false;
  for (StateId t : in.ts.delta)
    if (t == in.ts.initial) {
      reentrant = true;
      break;
    }
  if (!reentrant) return in;

  Dfa out = in;
  const StateId clone = out.ts.num_states++;
  const std::uint32_t letters = out.ts.atoms.num_letters();
  out.ts.delta.resize(static_cast<std::size_t>(out.ts.num_states) * letters);
  for (Letter z = 0; z < letters; ++z)
    out.ts.step_ref(clone, z) = in.ts.step(in.ts.initial, z);
  out.finals.push_back(in.finals[in.ts.initial]);
  out.ts.initial = clone;
  return out;
}

enum class PrefixMode { Exists, Forall };

/// DA for the reachability property (some prefix satisfies phi) or the
/// safety property (every non-empty prefix satisfies phi).
inline DetAutomaton convert_da(PrefixMode mode, const Formula& phi,
                               const AtomPartition& atoms) {
  Dfa dfa = make_initial_nonreentrant(ltlf_to_dfa(phi, atoms));
  DetAutomaton da;
  da.ts = dfa.ts;
  if (mode == PrefixMode::Exists) {
    da.objective = ObjectiveKind::Reach;
    da.target = dfa.finals;
  } else {
    da.objective = ObjectiveKind::Safe;
    da.target = dfa.finals;
    da.target[da.ts.initial] = 1;  // the empty prefix is not a prefix
  }
  return da;
}

}  // namespace finsynth
