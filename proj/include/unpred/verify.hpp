#pragma once

// Brute-force oracles over the closed loop. Nothing here depends on the
// synthesis machinery; the only inputs are a product system and a
// finite-memory controller.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "unpred/product.hpp"

namespace unpred {

using MemId = std::uint32_t;

// Finite-memory observation-fed controller. The memory is updated with the
// latest observation and the input is read off the updated memory.
struct MealyController {
  std::vector<std::string> memory_names;
  MemId initial = 0;
  std::map<std::pair<MemId, ObsId>, MemId> update;
  std::vector<std::optional<InputId>> output;

  std::optional<MemId> next(MemId m, ObsId o) const;
  std::size_t num_memory() const { return memory_names.size(); }
};

// A controller that only looks at the latest observation.
MealyController memoryless_controller(const TransitionSystem& ts, const std::map<ObsId, InputId>& policy);

class VerifyError : public std::runtime_error {
 public:
  enum class Kind { UndefinedControl, InfeasibleObservation };
  VerifyError(Kind kind, std::vector<ObsId> witness, const std::string& what)
      : std::runtime_error(what), kind_(kind), witness_(std::move(witness)) {}
  Kind kind() const { return kind_; }
  const std::vector<ObsId>& witness() const { return witness_; }

 private:
  Kind kind_;
  std::vector<ObsId> witness_;
};

using ConfigId = std::uint32_t;

// Reachable configurations (product state, memory before observing it).
// Config 0 is the initial one.
struct ClosedLoop {
  struct Config {
    StateId state;
    MemId memory;
    friend auto operator<=>(const Config&, const Config&) = default;
  };
  std::vector<Config> configs;
  std::vector<ObsId> obs;
  std::vector<InputId> input;
  std::vector<std::vector<ConfigId>> succ;  // sorted
  std::vector<bool> secret;
  std::vector<bool> done;

  std::size_t size() const { return configs.size(); }
};

ClosedLoop build_closed_loop(const ProductSystem& p, const MealyController& c);

bool check_live(const ClosedLoop& cl);

struct TaskResult {
  bool ok;
  std::vector<ObsId> witness;  // observations leading into a cycle that never completes the task
};

// Every infinite run completes the task iff the not-yet-completed part of
// the closed loop is acyclic.
TaskResult check_task(const ClosedLoop& cl);

std::vector<ConfigId> reach_exact(const ClosedLoop& cl, std::span<const ConfigId> from, std::size_t steps);

StateSet state_estimate(const ClosedLoop& cl, std::span<const ObsId> obs);

struct UnpredictabilityResult {
  bool ok;
  std::vector<ObsId> witness;  // shortest observation sequence after which completion in K steps is certain
};

// Observer-based check of the K-step reformulation.
UnpredictabilityResult check_unpredictable(const ClosedLoop& cl, unsigned k);

// Bounded check of the original definition, every horizon m in [k, m_max].
bool check_unpredictable_def1(const ClosedLoop& cl, unsigned k, std::size_t m_max);

struct VerificationReport {
  bool live = false;
  bool task = false;
  bool unpredictable = false;
  std::vector<ObsId> task_witness;
  std::vector<ObsId> unpredictable_witness;
  bool ok() const { return live && task && unpredictable; }
};

VerificationReport verify_controller(const ProductSystem& p, const MealyController& c, unsigned k);

// Search over controllers whose memory is the observer belief (set of
// product states consistent with the observations so far).
struct ExhaustiveSearchResult {
  enum class Outcome { Found, NoneFound, Inconclusive };
  Outcome outcome;
  std::uint64_t candidates = 0;
  std::optional<MealyController> controller;
};

ExhaustiveSearchResult exhaustive_controller_search(const ProductSystem& p, unsigned k,
                                                    std::uint64_t cap = 1'000'000);

}  // namespace unpred
