#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "unpred/formula.hpp"

namespace unpred {

using DfaState = std::uint32_t;
inline constexpr DfaState kNoState = static_cast<DfaState>(-1);

class AutomatonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic automaton over the explicit alphabet 2^AP. Letters are the
// label bitmasks 0 .. 2^|AP|-1. Hand-built automata may leave transitions
// undefined (kNoState); compile() always yields a complete one.
class Dfa {
 public:
  Dfa(std::size_t num_ap, std::size_t num_states, DfaState initial);

  std::size_t num_ap() const { return num_ap_; }
  std::size_t alphabet_size() const { return std::size_t{1} << num_ap_; }
  std::size_t num_states() const { return accepting_.size(); }
  DfaState initial() const { return initial_; }

  DfaState step(DfaState s, Label a) const;
  void set_transition(DfaState from, Label a, DfaState to);
  bool is_accepting(DfaState s) const { return accepting_.at(s); }
  void set_accepting(DfaState s, bool acc) { accepting_.at(s) = acc; }
  bool is_complete() const;

  DfaState add_state(std::string name = {});
  const std::string& name(DfaState s) const { return names_.at(s); }
  void set_name(DfaState s, std::string n) { names_.at(s) = std::move(n); }

  // Runs from the initial state; false if the run hits an undefined transition.
  bool accepts(const Word& w) const;

 private:
  void check_label(Label a) const;

  std::size_t num_ap_;
  DfaState initial_;
  std::vector<DfaState> delta_;
  std::vector<bool> accepting_;
  std::vector<std::string> names_;
};

// Automaton after the completion/first-acceptance transformation: original
// accepting states lead to an absorbing accepting sink on every letter, and
// undefined moves go to an absorbing rejecting sink.
struct ModifiedDfa {
  Dfa dfa;
  std::vector<bool> f_states;
  DfaState sink_accept;
  DfaState sink_bad;

  bool is_f(DfaState s) const { return f_states.at(s); }
  bool accepts(const Word& w) const { return dfa.accepts(w); }
};

struct CompileOptions {
  std::size_t max_ap = 16;
};

// DFA whose language is exactly the finite words satisfying f under the
// strong finite semantics of holds_on(). States are progression residues,
// numbered in breadth-first order over letters 0..2^|AP|-1.
Dfa compile(const Formula& f, std::size_t num_ap, const CompileOptions& opts = {});
Dfa compile(const Formula& f, const ApUniverse& aps, const CompileOptions& opts = {});

// Language-preserving minimization; drops unreachable states and numbers the
// result breadth-first from the initial state.
Dfa minimize(const Dfa& a);

ModifiedDfa modify(const Dfa& a);

std::string to_dot(const ModifiedDfa& a, const ApUniverse& aps);

}  // namespace unpred
