/*! \file spec_io.hpp
 *  \brief Problem-spec JSON documents and trace / input files.
 *
 *  Spec document: {"atoms": {"agent": [...], "env": [...]},
 *  "env": {"safe": "...", "reach": "..."}, "task": {...}} with all four
 *  formula strings optional. Trace files: one letter per line as
 *  comma-separated sorted atom names; a blank line is the empty letter.
 */

#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsynth/atoms.hpp"
#include "finsynth/parser.hpp"
#include "finsynth/synthesis.hpp"

namespace finsynth {

inline ProblemSpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spec document: ") + e.what(), 0);
  }
  ProblemSpec spec;
  try {
    spec.atoms.agent =
        j.at("atoms").at("agent").get<std::vector<std::string>>();
    spec.atoms.env = j.at("atoms").at("env").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("spec document: ") + e.what());
  }
  spec.atoms.validate();
  auto read_formula = [&](const char* group,
                          const char* key) -> std::optional<Formula> {
    if (!j.contains(group) || !j[group].contains(key)) return std::nullopt;
    return parse(j[group][key].get<std::string>(), spec.atoms);
  };
  spec.env_safe = read_formula("env", "safe");
  spec.env_reach = read_formula("env", "reach");
  spec.task_reach = read_formula("task", "reach");
  spec.task_safe = read_formula("task", "safe");
  if (!spec.has_task())
    throw Error("spec document: at least one task formula is required");
  return spec;
}

inline ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read spec file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return spec_from_json(buf.str());
}

/// One letter from a csv line of atom names; the empty line is {}.
inline Letter parse_letter_line(const std::string& line,
                                const AtomPartition& atoms) {
  Letter mask = 0;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // Trim surrounding whitespace.
    std::size_t a = item.find_first_not_of(" \t\r");
    if (a == std::string::npos) throw Error("trace file: empty atom name");
    std::size_t b = item.find_last_not_of(" \t\r");
    item = item.substr(a, b - a + 1);
    int bit = atoms.index_of(item);
    if (bit < 0) throw UndeclaredAtomError(item);
    mask |= 1u << bit;
  }
  return mask;
}

/// Format a letter as the trace-file csv line (sorted atom names).
inline std::string format_letter_line(const AtomPartition& atoms,
                                      Letter mask) {
  std::vector<std::string> on;
  for (std::size_t i = 0; i < atoms.agent.size() + atoms.env.size(); ++i)
    if ((mask >> i) & 1u)
      on.push_back(i < atoms.agent.size() ? atoms.agent[i]
                                          : atoms.env[i - atoms.agent.size()]);
  std::sort(on.begin(), on.end());
  std::string out;
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (i) out += ",";
    out += on[i];
  }
  return out;
}

/// Reads a whole trace / input file; every line is one letter.
inline std::vector<Letter> load_letters(const std::string& path,
                                        const AtomPartition& atoms) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read file: " + path);
  std::vector<Letter> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    out.push_back(line.empty() ? 0 : parse_letter_line(line, atoms));
  }
  return out;
}

}  // namespace finsynth
