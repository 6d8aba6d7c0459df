#include "unpred/system.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace unpred {

namespace {

template <typename Names>
std::optional<std::uint32_t> lookup(const Names& names, std::string_view n) {
  auto it = std::find(names.begin(), names.end(), n);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - names.begin());
}

void check_unique(const std::vector<std::string>& names, const char* what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw ModelError(std::string("empty ") + what + " name");
    if (!seen.insert(n).second) throw ModelError(std::string("duplicate ") + what + " '" + n + "'");
  }
}

}  // namespace

TransitionSystem::TransitionSystem(const Spec& spec)
    : state_names_(spec.states), input_names_(spec.inputs) {
  check_unique(state_names_, "state");
  check_unique(input_names_, "input");
  if (state_names_.empty()) throw ModelError("model has no states");
  try {
    ap_ = ApUniverse(spec.ap);
  } catch (const std::invalid_argument& e) {
    throw ModelError(e.what());
  }
  auto state = [&](const std::string& n) {
    auto id = find_state(n);
    if (!id) throw ModelError("unknown state '" + n + "'");
    return *id;
  };
  initial_ = state(spec.initial);
  for (const auto& [from, in, to] : spec.transitions) {
    auto u = find_input(in);
    if (!u) throw ModelError("unknown input '" + in + "'");
    transitions_.push_back({state(from), *u, state(to)});
  }
  labels_.assign(num_states(), Label{});
  std::set<StateId> labeled;
  for (const auto& [x, aps] : spec.labels) {
    StateId id = state(x);
    if (!labeled.insert(id).second) throw ModelError("state '" + x + "' labeled twice");
    for (const auto& p : aps) {
      auto a = ap_.find(p);
      if (!a) throw ModelError("label of '" + x + "' uses unknown proposition '" + p + "'");
      labels_[id] = labels_[id].with(*a);
    }
  }
  if (spec.observations.empty()) {
    obs_names_ = state_names_;
    for (StateId x = 0; x < num_states(); ++x) observation_.push_back(x);
  } else {
    observation_.assign(num_states(), 0);
    std::vector<bool> seen(num_states(), false);
    for (const auto& [x, o] : spec.observations) {
      StateId id = state(x);
      if (seen[id]) throw ModelError("state '" + x + "' observed twice");
      seen[id] = true;
      if (o.empty()) throw ModelError("empty observation symbol for '" + x + "'");
      auto oid = lookup(obs_names_, o);
      if (!oid) {
        oid = static_cast<ObsId>(obs_names_.size());
        obs_names_.push_back(o);
      }
      observation_[id] = *oid;
    }
    for (StateId x = 0; x < num_states(); ++x)
      if (!seen[x]) throw ModelError("state '" + state_names_[x] + "' has no observation");
  }
  index();
}

TransitionSystem::TransitionSystem(std::vector<std::string> state_names, StateId initial,
                                   std::vector<std::string> input_names, std::vector<Transition> transitions,
                                   ApUniverse ap, std::vector<Label> labels, std::vector<std::string> obs_names,
                                   std::vector<ObsId> observation)
    : state_names_(std::move(state_names)),
      initial_(initial),
      input_names_(std::move(input_names)),
      transitions_(std::move(transitions)),
      ap_(std::move(ap)),
      labels_(std::move(labels)),
      obs_names_(std::move(obs_names)),
      observation_(std::move(observation)) {
  if (state_names_.empty()) throw ModelError("model has no states");
  if (initial_ >= num_states()) throw ModelError("initial state out of range");
  if (labels_.size() != num_states() || observation_.size() != num_states())
    throw ModelError("labels/observations must cover every state");
  for (const auto& t : transitions_)
    if (t.from >= num_states() || t.to >= num_states() || t.input >= num_inputs())
      throw ModelError("transition out of range");
  for (ObsId o : observation_)
    if (o >= obs_names_.size()) throw ModelError("observation out of range");
  index();
}

void TransitionSystem::index() {
  std::sort(transitions_.begin(), transitions_.end());
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
  succ_.assign(num_states(), std::vector<StateSet>(num_inputs()));
  for (const auto& t : transitions_) succ_[t.from][t.input].push_back(t.to);
}

std::optional<StateId> TransitionSystem::find_state(std::string_view name) const { return lookup(state_names_, name); }
std::optional<InputId> TransitionSystem::find_input(std::string_view name) const { return lookup(input_names_, name); }
std::optional<ObsId> TransitionSystem::find_obs(std::string_view name) const { return lookup(obs_names_, name); }

StateSet TransitionSystem::nx(std::span<const StateId> q, InputId u) const {
  StateSet out;
  for (StateId x : q) {
    const auto& s = succ_.at(x).at(u);
    out.insert(out.end(), s.begin(), s.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<InputId> TransitionSystem::active_inputs(StateId x) const {
  if (x >= num_states()) throw ModelError("unknown state id " + std::to_string(x));
  std::vector<InputId> out;
  for (InputId u = 0; u < num_inputs(); ++u)
    if (!succ_[x][u].empty()) out.push_back(u);
  return out;
}

std::vector<ObsId> TransitionSystem::observe(std::span<const StateId> path) const {
  std::vector<ObsId> out;
  out.reserve(path.size());
  for (StateId x : path) out.push_back(observe(x));
  return out;
}

bool Path::is_valid(const TransitionSystem& ts, bool rooted) const {
  if (states.empty()) return inputs.empty();
  if (inputs.size() + 1 != states.size()) return false;
  if (rooted && states.front() != ts.initial()) return false;
  for (StateId x : states)
    if (x >= ts.num_states()) return false;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i] >= ts.num_inputs()) return false;
    const auto& s = ts.successors(states[i], inputs[i]);
    if (!std::binary_search(s.begin(), s.end(), states[i + 1])) return false;
  }
  return true;
}

ValidationReport validate(const TransitionSystem& ts) {
  ValidationReport report;
  for (StateId x = 0; x < ts.num_states(); ++x)
    if (ts.active_inputs(x).empty())
      report.violations.push_back(
          {Violation::Kind::NotLive, {x}, "state '" + ts.state_name(x) + "' has no outgoing transition"});

  std::map<ObsId, StateId> first_with_obs;
  for (StateId x = 0; x < ts.num_states(); ++x) {
    auto [it, fresh] = first_with_obs.try_emplace(ts.observe(x), x);
    if (fresh) continue;
    StateId y = it->second;
    if (ts.active_inputs(x) != ts.active_inputs(y))
      report.violations.push_back({Violation::Kind::NonUniformControl,
                                   {y, x},
                                   "states '" + ts.state_name(y) + "' and '" + ts.state_name(x) +
                                       "' share observation '" + ts.obs_name(ts.observe(x)) +
                                       "' but have different active inputs"});
  }
  return report;
}

TransitionSystem add_stop_state(const TransitionSystem& ts, std::span<const StateId> from) {
  auto names = ts.state_names();
  auto inputs = ts.input_names();
  auto obs = ts.obs_names();
  auto fresh = [](const std::vector<std::string>& taken, std::string base) {
    while (std::find(taken.begin(), taken.end(), base) != taken.end()) base += "_";
    return base;
  };
  auto stop = static_cast<StateId>(names.size());
  names.push_back(fresh(names, "stop"));
  auto stop_in = static_cast<InputId>(inputs.size());
  inputs.push_back(fresh(inputs, "stop"));
  auto stop_obs = static_cast<ObsId>(obs.size());
  obs.push_back(fresh(obs, "stop"));

  auto transitions = ts.transitions();
  for (StateId x : from) transitions.push_back({x, stop_in, stop});
  transitions.push_back({stop, stop_in, stop});
  std::vector<Label> labels;
  std::vector<ObsId> observation;
  for (StateId x = 0; x < ts.num_states(); ++x) {
    labels.push_back(ts.label(x));
    observation.push_back(ts.observe(x));
  }
  labels.push_back(Label{});
  observation.push_back(stop_obs);
  return TransitionSystem(std::move(names), ts.initial(), std::move(inputs), std::move(transitions), ts.ap(),
                          std::move(labels), std::move(obs), std::move(observation));
}

StateSet set_union(const StateSet& a, const StateSet& b) {
  StateSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace unpred
