#pragma once

#include <random>
#include <string>
#include <vector>

#include "unpred/pipeline.hpp"
#include "unpred/synthesis.hpp"
#include "unpred/verify.hpp"

namespace fixtures {

using namespace unpred;

inline const char* kTask = "F(p1 & F p2)";

inline TransitionSystem::Spec robot6_spec() {
  TransitionSystem::Spec s;
  s.states = {"1", "2", "3", "4", "5", "6"};
  s.initial = "1";
  s.inputs = {"c1", "c2"};
  s.transitions = {{"1", "c1", "2"}, {"2", "c1", "4"}, {"2", "c1", "5"}, {"2", "c2", "3"},
                   {"3", "c1", "6"}, {"4", "c1", "5"}, {"4", "c1", "6"}, {"4", "c2", "3"},
                   {"5", "c1", "4"}, {"5", "c2", "6"}, {"6", "c1", "6"}};
  s.ap = {"p1", "p2"};
  s.labels = {{"2", {"p1"}}, {"6", {"p2"}}};
  return s;
}

inline TransitionSystem robot6() { return TransitionSystem(robot6_spec()); }

inline Pipeline robot6_pipeline() { return build_pipeline(robot6(), kTask); }

inline StateId px(const ProductSystem& p, const std::string& name) { return *p.ts.find_state(name); }
inline InputId in(const TransitionSystem& ts, const std::string& name) { return *ts.find_input(name); }
inline ObsId ob(const TransitionSystem& ts, const std::string& name) { return *ts.find_obs(name); }

inline std::vector<ObsId> obs_seq(const TransitionSystem& ts, std::initializer_list<const char*> names) {
  std::vector<ObsId> out;
  for (auto n : names) out.push_back(ob(ts, n));
  return out;
}

// Random live system satisfying observation-uniform control: states sharing
// an observation get the same active input set.
inline TransitionSystem random_system(std::mt19937_64& rng, std::size_t max_states, std::size_t max_inputs,
                                      std::size_t num_ap) {
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  const std::size_t n = pick(2, max_states);
  const std::size_t m = pick(1, max_inputs);
  const std::size_t num_obs = pick(1, n);
  std::vector<std::string> states, inputs, obs_names;
  for (std::size_t i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < m; ++i) inputs.push_back("u" + std::to_string(i));
  for (std::size_t i = 0; i < num_obs; ++i) obs_names.push_back("o" + std::to_string(i));
  std::vector<ObsId> observation(n);
  for (std::size_t x = 0; x < n; ++x) observation[x] = static_cast<ObsId>(x < num_obs ? x : pick(0, num_obs - 1));
  // Active input set per observation, nonempty.
  std::vector<std::vector<InputId>> active(num_obs);
  for (auto& a : active) {
    for (InputId u = 0; u < m; ++u)
      if (pick(0, 1)) a.push_back(u);
    if (a.empty()) a.push_back(static_cast<InputId>(pick(0, m - 1)));
  }
  std::vector<Transition> tr;
  for (StateId x = 0; x < n; ++x)
    for (InputId u : active[observation[x]]) {
      std::size_t fan = pick(1, 2);
      for (std::size_t k = 0; k < fan; ++k) tr.push_back({x, u, static_cast<StateId>(pick(0, n - 1))});
    }
  std::vector<std::string> ap_names;
  for (std::size_t i = 0; i < num_ap; ++i) ap_names.push_back("a" + std::to_string(i));
  std::vector<Label> labels(n);
  for (auto& l : labels) l = Label(pick(0, (std::size_t{1} << num_ap) - 1));
  return TransitionSystem(states, 0, inputs, tr, ApUniverse(ap_names), labels, obs_names, observation);
}

// Random formula over atoms a0..a{num_ap-1} as text, depth <= depth.
inline std::string random_formula(std::mt19937_64& rng, std::size_t num_ap, int depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto atom = [&] { return "a" + std::to_string(pick(0, static_cast<int>(num_ap) - 1)); };
  if (depth == 0) {
    switch (pick(0, 4)) {
      case 0: return "true";
      case 1: return "!" + atom();
      default: return atom();
    }
  }
  switch (pick(0, 7)) {
    case 0: return "(" + random_formula(rng, num_ap, depth - 1) + " & " + random_formula(rng, num_ap, depth - 1) + ")";
    case 1: return "(" + random_formula(rng, num_ap, depth - 1) + " | " + random_formula(rng, num_ap, depth - 1) + ")";
    case 2: return "X " + random_formula(rng, num_ap, depth - 1);
    case 3: return "F " + random_formula(rng, num_ap, depth - 1);
    case 4:
    case 5: return "(" + random_formula(rng, num_ap, depth - 1) + " U " + random_formula(rng, num_ap, depth - 1) + ")";
    default: return random_formula(rng, num_ap, 0);
  }
}

// All words of exactly the given length over 2^num_ap letters.
inline std::vector<Word> words_of_length(std::size_t num_ap, std::size_t len) {
  std::vector<Word> out{{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Word> next;
    for (const auto& w : out)
      for (std::uint64_t a = 0; a < (std::uint64_t{1} << num_ap); ++a) {
        auto v = w;
        v.push_back(Label(a));
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}


// Input the reference case-study controller gives after observing the
// region sequence `regions`.
inline std::string expected_case_study_input(const std::vector<std::string>& regions) {
  using V = std::vector<std::string>;
  if (regions == V{"1", "2", "5"} || regions == V{"1", "2", "4", "5"}) return "c2";
  return "c1";
}

// Every observation sequence of length <= max_len the deterministic BTS can
// follow, with the Y-state it ends in.
inline std::vector<std::pair<std::vector<ObsId>, std::size_t>> feasible_sequences(const Controller& c,
                                                                                 std::size_t max_len) {
  const auto& t = c.bts();
  std::vector<std::pair<std::vector<ObsId>, std::size_t>> out{{{t.y[c.initial()].obs}, c.initial()}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].first.size() >= max_len) continue;
    auto [seq, y] = out[i];
    for (auto [o, y2] : t.zy[c.z_after(y)]) {
      auto s = seq;
      s.push_back(o);
      out.push_back({std::move(s), y2});
    }
  }
  return out;
}

// State-estimate equality and prediction soundness along every rooted
// closed-loop path with at most max_len transitions. Returns a description
// of the first violation, empty if none.
inline std::string check_propositions(const ProductSystem& p, const Controller& c, unsigned k, std::size_t max_len) {
  ClosedLoop cl = build_closed_loop(p, c.to_mealy());
  struct Item {
    std::vector<ConfigId> configs;
    std::vector<ObsId> obs;
  };
  std::vector<Item> work{{{0}, {cl.obs[0]}}};
  while (!work.empty()) {
    Item it = std::move(work.back());
    work.pop_back();
    ConfigId last = it.configs.back();
    StateId x = cl.configs[last].state;
    std::size_t y = c.y_state_for(it.obs);
    const Belief& b = c.bts().y[y].belief;
    StateSet est = state_estimate(cl, it.obs);
    if (est != states_of(b)) return "state estimate differs from Y-state belief";
    auto member = std::find_if(b.begin(), b.end(), [x](const AugmentedState& a) { return a.state == x; });
    if (member == b.end()) return "belief misses the current state";
    for (unsigned i = 0; i <= k; ++i) {
      ConfigId from[] = {last};
      auto r = reach_exact(cl, from, i);
      bool all_secret = std::all_of(r.begin(), r.end(), [&](ConfigId d) { return cl.secret[d]; });
      if (member->pred[i] != all_secret) return "prediction bit " + std::to_string(i) + " is wrong";
    }
    if (it.configs.size() > max_len) continue;
    for (ConfigId d : cl.succ[last]) {
      Item next = it;
      next.configs.push_back(d);
      next.obs.push_back(cl.obs[d]);
      work.push_back(std::move(next));
    }
  }
  return {};
}

}  // namespace fixtures
