#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "unpred/formula.hpp"

namespace unpred {

using StateId = std::uint32_t;
using InputId = std::uint32_t;
using ObsId = std::uint32_t;

// Sorted, duplicate-free.
using StateSet = std::vector<StateId>;

struct Transition {
  StateId from;
  InputId input;
  StateId to;
  friend auto operator<=>(const Transition&, const Transition&) = default;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nondeterministic labeled transition system with an observation map.
// Identifiers are interned to dense integers in declaration order.
class TransitionSystem {
 public:
  struct Spec {
    std::vector<std::string> states;
    std::string initial;
    std::vector<std::string> inputs;
    std::vector<std::tuple<std::string, std::string, std::string>> transitions;
    std::vector<std::string> ap;
    std::vector<std::pair<std::string, std::vector<std::string>>> labels;
    // Empty means identity observation (each state observed as its name).
    std::vector<std::pair<std::string, std::string>> observations;
  };

  TransitionSystem() = default;
  explicit TransitionSystem(const Spec& spec);

  // Direct construction over dense ids; `observation` maps state -> index into obs_names.
  TransitionSystem(std::vector<std::string> state_names, StateId initial, std::vector<std::string> input_names,
                   std::vector<Transition> transitions, ApUniverse ap, std::vector<Label> labels,
                   std::vector<std::string> obs_names, std::vector<ObsId> observation);

  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_inputs() const { return input_names_.size(); }
  std::size_t num_observations() const { return obs_names_.size(); }
  StateId initial() const { return initial_; }

  const std::string& state_name(StateId x) const { return state_names_.at(x); }
  const std::string& input_name(InputId u) const { return input_names_.at(u); }
  const std::string& obs_name(ObsId o) const { return obs_names_.at(o); }
  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<InputId> find_input(std::string_view name) const;
  std::optional<ObsId> find_obs(std::string_view name) const;

  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& input_names() const { return input_names_; }
  const std::vector<std::string>& obs_names() const { return obs_names_; }

  const ApUniverse& ap() const { return ap_; }
  Label label(StateId x) const { return labels_.at(x); }
  ObsId observe(StateId x) const { return observation_.at(x); }
  const std::vector<Transition>& transitions() const { return transitions_; }

  // Successors of a single state under u, sorted.
  const StateSet& successors(StateId x, InputId u) const { return succ_.at(x).at(u); }

  StateSet nx(std::span<const StateId> q, InputId u) const;
  std::vector<InputId> active_inputs(StateId x) const;
  std::vector<ObsId> observe(std::span<const StateId> path) const;

 private:
  void index();

  std::vector<std::string> state_names_;
  StateId initial_ = 0;
  std::vector<std::string> input_names_;
  std::vector<Transition> transitions_;
  ApUniverse ap_;
  std::vector<Label> labels_;
  std::vector<std::string> obs_names_;
  std::vector<ObsId> observation_;
  std::vector<std::vector<StateSet>> succ_;
};

// A run x0 u1 x1 ... un xn.
struct Path {
  std::vector<StateId> states;
  std::vector<InputId> inputs;  // inputs[i] leads from states[i] to states[i+1]

  bool is_valid(const TransitionSystem& ts, bool rooted) const;
};

struct Violation {
  enum class Kind { NotLive, NonUniformControl };
  Kind kind;
  std::vector<StateId> states;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const TransitionSystem& ts);

// Adds an absorbing "stop" state (own observation, empty label) entered by a
// fresh "stop" input from each designated state.
TransitionSystem add_stop_state(const TransitionSystem& ts, std::span<const StateId> from);

StateSet set_union(const StateSet& a, const StateSet& b);

}  // namespace unpred
