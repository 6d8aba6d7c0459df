#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "unpred/synthesis.hpp"
#include "unpred/verify.hpp"

namespace unpred {

using Json = nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path);
// Writes `text`, appending a newline if it does not already end in one.
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Pretty-printed with sorted keys and a trailing newline.
std::string dump(const Json& j);

// Model format: {states, initial, inputs, transitions: [{from, input, to}],
// ap, labels: {state: [ap]}, observations: {state: obs}}. `observations` is
// optional (identity); unknown fields are rejected.
TransitionSystem model_from_json(const Json& j);
Json model_to_json(const TransitionSystem& ts);
TransitionSystem load_model(const std::filesystem::path& path);

// Node table, edges and initial node of a deterministic BTS. States are
// referenced by product state name, inputs and observations by name.
Json controller_to_json(const Controller& c, const ProductSystem& p);
Controller controller_from_json(const Json& j, const ProductSystem& p);

// Accepts three shapes:
//   {"policy": {obs: input}}                       memoryless
//   {"mealy": {memory, initial, update, output}}   finite memory
//   a serialized controller (has "y_states")
MealyController policy_from_json(const Json& j, const ProductSystem& p);

Json report_to_json(const VerificationReport& r, const TransitionSystem& ts);

}  // namespace unpred
