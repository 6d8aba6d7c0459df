#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "unpred/automata.hpp"
#include "unpred/product.hpp"
#include "unpred/verify.hpp"

namespace unpred {

struct PipelineOptions {
  bool minimize = true;
  bool add_stop = false;  // stop input available from every state
};

// Model, task automaton and their product, built in one go.
struct Pipeline {
  TransitionSystem system;
  Formula formula;
  ModifiedDfa dfa;
  ProductSystem product;
};

Pipeline build_pipeline(TransitionSystem system, std::string_view formula, const PipelineOptions& opts = {});

// Portable bounded draw from a 64-bit Mersenne Twister by rejection
// sampling; std::uniform_int_distribution differs across libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
};

struct SimStep {
  StateId state;  // product state
  ObsId obs;
  std::optional<InputId> input;  // empty on the last step
  bool completes;                // first completion instant
};

// Closed-loop run of `steps` transitions, successors drawn uniformly.
std::vector<SimStep> simulate(const ProductSystem& p, const MealyController& c, std::size_t steps,
                              std::uint64_t seed);

std::string format_trace(const Pipeline& pl, const std::vector<SimStep>& trace);

}  // namespace unpred
