#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "unpred/product.hpp"
#include "unpred/verify.hpp"

namespace unpred {

inline constexpr unsigned kMaxHorizon = 63;

// (K+1)-bit prediction; bit i set means "certainly in a secret state in
// exactly i steps". Stored as a machine word, bit i = h[i].
class Prediction {
 public:
  constexpr Prediction() = default;
  constexpr explicit Prediction(std::uint64_t bits) : bits_(bits) {}

  constexpr bool operator[](unsigned i) const { return (bits_ >> i) & 1U; }
  constexpr std::uint64_t bits() const { return bits_; }
  Prediction with(unsigned i, bool v) const {
    return Prediction(v ? bits_ | (std::uint64_t{1} << i) : bits_ & ~(std::uint64_t{1} << i));
  }

  friend constexpr auto operator<=>(Prediction, Prediction) = default;

 private:
  std::uint64_t bits_ = 0;
};

// "0010" style, h[0] first.
std::string to_string(Prediction h, unsigned k);
Prediction parse_prediction(std::string_view bits);

struct AugmentedState {
  StateId state;
  Prediction pred;
  friend auto operator<=>(const AugmentedState&, const AugmentedState&) = default;
};

// Sorted by state; at most one prediction per state.
using Belief = std::vector<AugmentedState>;

StateSet states_of(const Belief& b);
bool is_functional(const Belief& b);
bool is_currently_consistent(const ProductSystem& p, const AugmentedState& a);
// Insecure iff every member predicts a secret state at horizon k.
bool is_secure(const Belief& b, unsigned k);

struct YState {
  Belief belief;
  ObsId obs;
  friend auto operator<=>(const YState&, const YState&) = default;
};

struct ZState {
  Belief belief;
  InputId input;
  friend auto operator<=>(const ZState&, const ZState&) = default;
};

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool one_step_consistent(Prediction h, std::span<const Prediction> successors, unsigned k);

// All Z-states reachable from y under u: successor predictions are currently
// consistent, one-step consistent with every member of y, and secure.
std::vector<ZState> yz_successors(const ProductSystem& p, const YState& y, InputId u, unsigned k);

// Restricts z to the members observed as o; nullopt if none are.
std::optional<YState> zy_successor(const ProductSystem& p, const ZState& z, ObsId o);

std::vector<YState> initial_y_states(const ProductSystem& p, unsigned k);

// Bipartite graph of Y-states (post-observation) and Z-states
// (post-control). Nodes are numbered in canonical (sorted) order.
struct Bts {
  unsigned k = 0;
  std::vector<YState> y;
  std::vector<ZState> z;
  std::vector<std::vector<std::pair<InputId, std::size_t>>> yz;  // sorted
  std::vector<std::vector<std::pair<ObsId, std::size_t>>> zy;    // sorted by observation
  std::vector<std::size_t> initial;                              // sorted

  bool empty() const { return y.empty(); }
  std::optional<std::size_t> find_y(const YState& s) const;
  std::optional<std::size_t> find_z(const ZState& s) const;
};

using Aes = Bts;
using DetBts = Bts;

bool is_complete(const ProductSystem& p, const Bts& t);
bool is_deterministic(const Bts& t);
// Node- and edge-wise inclusion of `sub` in `super`.
bool is_subgraph(const Bts& sub, const Bts& super);

// Forward closure from the initial Y-states before any pruning. Z-states in
// `broken` have a feasible observation leading to an insecure belief.
struct ExploredBts {
  Bts graph;
  std::vector<bool> broken;
};

ExploredBts explore_bts(const ProductSystem& p, unsigned k);

// Removes incomplete nodes until none remain, then keeps what is reachable
// from surviving initial Y-states. `shuffle_seed` randomizes deletion order.
Aes prune_to_complete(const ProductSystem& p, const ExploredBts& raw, std::optional<std::uint64_t> shuffle_seed = {});

Aes build_aes(const ProductSystem& p, unsigned k);

inline constexpr std::uint32_t kInfinity = std::numeric_limits<std::uint32_t>::max();

// Reachability-game levels: 0 on nodes whose states all completed the task,
// kInfinity outside the attractor.
struct Distances {
  std::vector<std::uint32_t> y;
  std::vector<std::uint32_t> z;
};

Distances attractor(const ProductSystem& p, const Aes& aes);

// nullopt when no initial Y-state has finite distance.
std::optional<DetBts> extract(const Aes& aes, const Distances& dist);

// Controller decoded from a deterministic BTS: the input is the one chosen
// at the Y-state reached by the observation sequence.
class Controller {
 public:
  explicit Controller(DetBts bts);

  const DetBts& bts() const { return bts_; }
  std::size_t initial() const { return bts_.initial.front(); }
  InputId input_at(std::size_t y) const { return bts_.yz.at(y).front().first; }
  std::size_t z_after(std::size_t y) const { return bts_.yz.at(y).front().second; }

  // Throws VerifyError(InfeasibleObservation) for sequences the BTS cannot follow.
  std::size_t y_state_for(std::span<const ObsId> obs) const;
  InputId input_for(std::span<const ObsId> obs) const { return input_at(y_state_for(obs)); }

  // Memory = Y-states, plus a leading "start" memory.
  MealyController to_mealy() const;

 private:
  DetBts bts_;
};

Controller decode(const DetBts& t);

struct SynthesisResult {
  Aes aes;
  Distances dist;
  std::optional<Controller> controller;
};

SynthesisResult synthesize(const ProductSystem& p, unsigned k);

std::string to_dot(const Bts& t, const ProductSystem& p, const std::string& name);

}  // namespace unpred
