/*! \file atoms.hpp
 *  \brief Partitioned atomic propositions and the explicit letter encoding.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace finsynth {

using Letter = std::uint32_t;   // bitmask over declared atoms; agent bits are low
using StateId = std::uint32_t;

inline constexpr StateId kNoState = static_cast<StateId>(-1);
inline constexpr std::uint32_t kInfiniteRank = static_cast<std::uint32_t>(-1);

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class UndeclaredAtomError : public Error {
public:
  explicit UndeclaredAtomError(const std::string& atom)
      : Error("undeclared atom: " + atom), atom_(atom) {}
  const std::string& atom() const { return atom_; }

private:
  std::string atom_;
};

class ResourceLimitError : public Error {
public:
  using Error::Error;
};

inline bool is_valid_atom_name(const std::string& s) {
  static const char* reserved[] = {"true", "false", "last", "X", "N",
                                   "U",    "R",     "F",    "G"};
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  for (const char* r : reserved)
    if (s == r) return false;
  return true;
}

/// Agent-controlled atoms (Y) followed by environment-controlled atoms (X).
/// Bit i of a Letter corresponds to atom i in that combined order.
struct AtomPartition {
  std::vector<std::string> agent;
  std::vector<std::string> env;

  AtomPartition() = default;
  AtomPartition(std::vector<std::string> agent_atoms,
                std::vector<std::string> env_atoms)
      : agent(std::move(agent_atoms)), env(std::move(env_atoms)) {
    validate();
  }

  void validate() const {
    std::vector<std::string> all;
    all.reserve(agent.size() + env.size());
    for (const auto& a : agent) all.push_back(a);
    for (const auto& a : env) all.push_back(a);
    if (all.size() > 16)
      throw Error("too many atoms for the explicit alphabet (max 16)");
    for (const auto& a : all)
      if (!is_valid_atom_name(a)) throw Error("invalid atom name: " + a);
    auto sorted = all;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error("duplicate atom across the partition");
  }

  std::size_t num_agent() const { return agent.size(); }
  std::size_t num_env() const { return env.size(); }
  std::size_t num_atoms() const { return agent.size() + env.size(); }

  std::uint32_t num_letters() const { return 1u << num_atoms(); }
  std::uint32_t num_agent_moves() const { return 1u << num_agent(); }
  std::uint32_t num_env_moves() const { return 1u << num_env(); }

  /// Index in the combined bit order, or -1 when undeclared.
  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < agent.size(); ++i)
      if (agent[i] == name) return static_cast<int>(i);
    for (std::size_t i = 0; i < env.size(); ++i)
      if (env[i] == name) return static_cast<int>(agent.size() + i);
    return -1;
  }

  const std::string& name(std::size_t bit) const {
    return bit < agent.size() ? agent[bit] : env[bit - agent.size()];
  }

  Letter compose(std::uint32_t agent_move, std::uint32_t env_move) const {
    return agent_move | (env_move << num_agent());
  }
  std::uint32_t agent_part(Letter z) const {
    return z & (num_agent_moves() - 1);
  }
  std::uint32_t env_part(Letter z) const { return z >> num_agent(); }

  bool operator==(const AtomPartition& other) const {
    return agent == other.agent && env == other.env;
  }

  /// Atoms of a letter as sorted names, e.g. "{p,q}".
  std::string format_letter(Letter z) const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < num_atoms(); ++i)
      if (z & (1u << i)) names.push_back(name(i));
    std::sort(names.begin(), names.end());
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += ",";
      out += names[i];
    }
    out += "}";
    return out;
  }
};

/// Non-empty sequences of letters. Emptiness is checked at the use sites
/// that require LTLf traces.
using FiniteTrace = std::vector<Letter>;

}  // namespace finsynth
