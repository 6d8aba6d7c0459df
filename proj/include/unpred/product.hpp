#pragma once

#include <string>
#include <vector>

#include "unpred/automata.hpp"
#include "unpred/system.hpp"

namespace unpred {

// Reachable synchronous product of a system with a modified task automaton.
// Product states are sorted by (system state, automaton state) and named
// x1, x2, ...; observations and inputs are those of the system.
struct ProductSystem {
  TransitionSystem ts;
  std::vector<std::pair<StateId, DfaState>> origin;
  std::vector<bool> xf;          // automaton component in F: first completion
  std::vector<bool> xf_or_sink;  // automaton component in F or s_F: completed

  bool is_secret(StateId x) const { return xf.at(x); }
  bool is_done(StateId x) const { return xf_or_sink.at(x); }
  std::size_t num_states() const { return ts.num_states(); }
  // "x3=(3,s2)" style description.
  std::string describe(StateId x, const TransitionSystem& system, const ModifiedDfa& dfa) const;
};

ProductSystem build_product(const TransitionSystem& ts, const ModifiedDfa& a);

Path project_path(const ProductSystem& p, const Path& product_path);

// Inverse of project_path for rooted system paths: re-runs the automaton
// along the labels.
Path lift_path(const ProductSystem& p, const TransitionSystem& system, const ModifiedDfa& a, const Path& path);

std::string to_dot(const ProductSystem& p);

}  // namespace unpred
