// Command-line front end: synth / check / dfa / verify / simulate.
// Exit codes: 0 success (Realizable / Pass), 10 Unrealizable / Fail,
// 11 environment inconsistent, 1 usage / parse / resource errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "finsynth/dfa_build.hpp"
#include "finsynth/parser.hpp"
#include "finsynth/spec_io.hpp"
#include "finsynth/synthesis.hpp"
#include "finsynth/transducer.hpp"
#include "finsynth/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 10;
constexpr int kExitEnvInconsistent = 11;
constexpr int kExitError = 1;

void print_stats(const finsynth::Diagnostics& d) {
  for (const auto& [k, v] : d.entries)
    std::cout << "stat " << k << " = " << v << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw finsynth::Error("cannot read file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int report_outcome(const finsynth::SynthesisOutcome& out, bool stats,
                   const std::string& out_file) {
  if (stats) print_stats(out.diag);
  switch (out.verdict) {
    case finsynth::Verdict::Realizable:
      std::cout << "Realizable\n";
      if (!out_file.empty()) {
        std::ofstream f(out_file);
        if (!f) {
          std::cerr << "error: cannot write " << out_file << "\n";
          return kExitError;
        }
        f << finsynth::export_strategy(*out.strategy);
        std::cout << "strategy written to " << out_file << "\n";
      }
      return kExitOk;
    case finsynth::Verdict::Unrealizable:
      std::cout << "Unrealizable\n";
      return kExitNegative;
    default:
      std::cout << "EnvInconsistent\n";
      return kExitEnvInconsistent;
  }
}

void print_lasso(const finsynth::AtomPartition& atoms,
                 const finsynth::Lasso& l) {
  const int na = static_cast<int>(atoms.agent.size());
  std::cout << "counterexample prefix:\n";
  for (finsynth::Letter x : l.prefix)
    std::cout << "  " << finsynth::format_letter_line(atoms, x << na) << "\n";
  std::cout << "counterexample cycle:\n";
  for (finsynth::Letter x : l.cycle)
    std::cout << "  " << finsynth::format_letter_line(atoms, x << na) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis of reachability and safety tasks under "
               "environment specifications, on finite-trace temporal logic"};
  app.require_subcommand(1);

  std::string spec_file, out_file, strategy_file, inputs_file, formula_text;
  std::string format = "dot";
  std::vector<std::string> agent_atoms, env_atoms;
  bool stats = false;
  std::uint32_t steps = 10;
  std::uint64_t seed = 0;

  auto* synth = app.add_subcommand("synth", "synthesize a strategy");
  synth->add_option("spec", spec_file, "problem spec JSON file")->required();
  synth->add_option("-o,--out", out_file, "strategy output file");
  synth->add_flag("--stats", stats, "print diagnostics");

  auto* check = app.add_subcommand("check", "decide realizability only");
  check->add_option("spec", spec_file, "problem spec JSON file")->required();
  check->add_flag("--stats", stats, "print diagnostics");

  auto* dfa = app.add_subcommand("dfa", "compile a formula to a DFA");
  dfa->add_option("formula", formula_text, "formula text")->required();
  dfa->add_option("--agent", agent_atoms, "agent atoms");
  dfa->add_option("--env", env_atoms, "environment atoms");
  dfa->add_option("--format", format, "dot or json")
      ->check(CLI::IsMember({"dot", "json"}));
  dfa->add_flag("--stats", stats, "print state and final counts");

  auto* verify_cmd = app.add_subcommand("verify", "verify a strategy");
  verify_cmd->add_option("strategy", strategy_file, "strategy JSON file")
      ->required();
  verify_cmd->add_option("spec", spec_file, "problem spec JSON file")
      ->required();

  auto* simulate = app.add_subcommand("simulate", "run a strategy");
  simulate->add_option("strategy", strategy_file, "strategy JSON file")
      ->required();
  simulate->add_option("--steps", steps, "number of environment moves");
  simulate->add_option("--seed", seed, "random seed for env inputs");
  simulate->add_option("--env-inputs", inputs_file,
                       "replay recorded env inputs (one letter per line)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth || *check) {
      finsynth::ProblemSpec spec = finsynth::load_spec(spec_file);
      finsynth::SynthesisOutcome out = finsynth::synthesize(spec);
      return report_outcome(out, stats, *synth ? out_file : std::string());
    }

    if (*dfa) {
      finsynth::AtomPartition atoms;
      atoms.agent = agent_atoms;
      atoms.env = env_atoms;
      if (atoms.agent.empty() && atoms.env.empty())
        throw finsynth::Error("declare atoms with --agent / --env");
      atoms.validate();
      finsynth::Formula phi = finsynth::parse(formula_text, atoms);
      finsynth::Dfa m = finsynth::ltlf_to_dfa(phi, atoms);
      if (stats) {
        std::cout << "stat states = " << m.ts.num_states << "\n"
                  << "stat finals = " << finsynth::count(m.finals) << "\n";
      }
      if (format == "dot") {
        finsynth::write_dot(std::cout, m.ts, &m.finals);
      } else {
        nlohmann::ordered_json j;
        j["states"] = m.ts.num_states;
        j["initial"] = m.ts.initial;
        nlohmann::ordered_json finals = nlohmann::ordered_json::array();
        for (finsynth::StateId q = 0; q < m.ts.num_states; ++q)
          if (m.finals[q]) finals.push_back(q);
        j["finals"] = finals;
        nlohmann::ordered_json delta = nlohmann::ordered_json::object();
        for (finsynth::StateId q = 0; q < m.ts.num_states; ++q) {
          nlohmann::ordered_json row = nlohmann::ordered_json::object();
          for (finsynth::Letter z = 0; z < m.ts.num_letters(); ++z)
            row[finsynth::format_letter_line(atoms, z)] = m.ts.step(q, z);
          delta[std::to_string(q)] = row;
        }
        j["delta"] = delta;
        std::cout << j.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (*verify_cmd) {
      finsynth::MealyStrategy s =
          finsynth::import_strategy(read_file(strategy_file));
      finsynth::ProblemSpec spec = finsynth::load_spec(spec_file);
      finsynth::VerifyResult res = finsynth::verify(s, spec);
      if (res.pass) {
        std::cout << "Pass\n";
        return kExitOk;
      }
      std::cout << "Fail: " << res.reason << "\n";
      if (res.counterexample) print_lasso(spec.atoms, *res.counterexample);
      return kExitNegative;
    }

    if (*simulate) {
      finsynth::MealyStrategy s =
          finsynth::import_strategy(read_file(strategy_file));
      const int na = static_cast<int>(s.atoms.agent.size());
      std::vector<finsynth::Letter> xs;
      if (!inputs_file.empty()) {
        for (finsynth::Letter raw :
             finsynth::load_letters(inputs_file, s.atoms)) {
          if (raw & ((1u << na) - 1u))
            throw finsynth::Error(
                "env input file contains an agent-controlled atom");
          xs.push_back(raw >> na);
        }
      } else {
        std::mt19937_64 rng(seed);
        for (std::uint32_t i = 0; i < steps; ++i)
          xs.push_back(static_cast<finsynth::Letter>(
              rng() % s.atoms.num_env_moves()));
      }
      finsynth::PlayRecord rec = finsynth::run(s, xs);
      for (finsynth::Letter z : rec.trace)
        std::cout << finsynth::format_letter_line(s.atoms, z) << "\n";
      std::cout << finsynth::format_letter_line(s.atoms, rec.outputs.back())
                << "\n";
      return kExitOk;
    }
  } catch (const finsynth::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitError;
  } catch (const finsynth::ResourceLimitError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kExitError;
  } catch (const finsynth::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
