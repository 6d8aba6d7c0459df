#include "unpred/verify.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace unpred {

std::optional<MemId> MealyController::next(MemId m, ObsId o) const {
  auto it = update.find({m, o});
  if (it == update.end()) return std::nullopt;
  return it->second;
}

MealyController memoryless_controller(const TransitionSystem& ts, const std::map<ObsId, InputId>& policy) {
  MealyController c;
  c.memory_names.push_back("start");
  c.output.push_back(std::nullopt);
  for (ObsId o = 0; o < ts.num_observations(); ++o) {
    c.memory_names.push_back("seen:" + ts.obs_name(o));
    auto it = policy.find(o);
    c.output.push_back(it == policy.end() ? std::nullopt : std::optional<InputId>(it->second));
  }
  for (MemId m = 0; m < c.memory_names.size(); ++m)
    for (ObsId o = 0; o < ts.num_observations(); ++o) c.update[{m, o}] = o + 1;
  return c;
}

namespace {

std::string obs_string(const TransitionSystem& ts, const std::vector<ObsId>& seq) {
  std::string s;
  for (ObsId o : seq) s += (s.empty() ? "" : " ") + ts.obs_name(o);
  return s;
}

std::vector<ObsId> witness_of(const ClosedLoop& cl, const std::vector<ConfigId>& parent, ConfigId c) {
  std::vector<ObsId> seq;
  for (ConfigId cur = c;; cur = parent[cur]) {
    seq.push_back(cl.obs[cur]);
    if (cur == 0) break;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

// Configurations grouped by the observation sequences that reach them.
struct Observer {
  std::vector<std::vector<ConfigId>> states;
  std::vector<std::vector<ObsId>> witness;
};

Observer build_observer(const ClosedLoop& cl) {
  Observer ob;
  if (cl.size() == 0) return ob;
  std::map<std::vector<ConfigId>, std::size_t> index;
  ob.states.push_back({0});
  ob.witness.push_back({cl.obs[0]});
  index.emplace(ob.states[0], 0);
  for (std::size_t i = 0; i < ob.states.size(); ++i) {
    std::map<ObsId, std::set<ConfigId>> by_obs;
    for (ConfigId c : ob.states[i])
      for (ConfigId d : cl.succ[c]) by_obs[cl.obs[d]].insert(d);
    for (auto& [o, set] : by_obs) {
      std::vector<ConfigId> s(set.begin(), set.end());
      if (index.try_emplace(s, ob.states.size()).second) {
        auto w = ob.witness[i];
        w.push_back(o);
        ob.states.push_back(std::move(s));
        ob.witness.push_back(std::move(w));
      }
    }
  }
  return ob;
}

}  // namespace

ClosedLoop build_closed_loop(const ProductSystem& p, const MealyController& c) {
  const auto& ts = p.ts;
  ClosedLoop cl;
  std::map<ClosedLoop::Config, ConfigId> index;
  std::vector<ConfigId> parent;
  auto add = [&](ClosedLoop::Config cfg, ConfigId from) {
    auto [it, fresh] = index.try_emplace(cfg, static_cast<ConfigId>(cl.configs.size()));
    if (fresh) {
      cl.configs.push_back(cfg);
      parent.push_back(from);
    }
    return it->second;
  };
  add({ts.initial(), c.initial}, 0);
  for (ConfigId i = 0; i < cl.configs.size(); ++i) {
    auto [x, m] = cl.configs[i];
    ObsId o = ts.observe(x);
    cl.obs.push_back(o);
    auto m2 = c.next(m, o);
    std::optional<InputId> u;
    if (m2 && *m2 < c.output.size()) u = c.output[*m2];
    if (!u) {
      auto w = witness_of(cl, parent, i);
      throw VerifyError(VerifyError::Kind::UndefinedControl, w,
                        "controller undefined after observing '" + obs_string(ts, w) + "'");
    }
    cl.input.push_back(*u);
    std::vector<ConfigId> succ;
    for (StateId x2 : ts.successors(x, *u)) succ.push_back(add({x2, *m2}, i));
    std::sort(succ.begin(), succ.end());
    cl.succ.push_back(std::move(succ));
  }
  for (const auto& cfg : cl.configs) {
    cl.secret.push_back(p.is_secret(cfg.state));
    cl.done.push_back(p.is_done(cfg.state));
  }
  return cl;
}

bool check_live(const ClosedLoop& cl) {
  return std::all_of(cl.succ.begin(), cl.succ.end(), [](const auto& s) { return !s.empty(); });
}

TaskResult check_task(const ClosedLoop& cl) {
  // Iterative DFS for a cycle among configs that have not completed the task.
  enum Color : std::uint8_t { White, Grey, Black };
  std::vector<Color> color(cl.size(), White);
  std::vector<ConfigId> parent(cl.size(), 0);
  for (ConfigId root = 0; root < cl.size(); ++root) {
    if (cl.done[root] || color[root] != White) continue;
    std::vector<std::pair<ConfigId, std::size_t>> stack{{root, 0}};
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < cl.succ[v].size()) {
        ConfigId w = cl.succ[v][next++];
        if (cl.done[w]) continue;
        if (color[w] == Grey) {
          // Shortest observation sequence reaching the cycle entry w.
          std::vector<ConfigId> bfs_parent(cl.size(), 0);
          std::vector<bool> seen(cl.size(), false);
          std::deque<ConfigId> q{0};
          seen[0] = true;
          while (!q.empty()) {
            ConfigId a = q.front();
            q.pop_front();
            if (a == w) break;
            for (ConfigId b : cl.succ[a])
              if (!seen[b]) {
                seen[b] = true;
                bfs_parent[b] = a;
                q.push_back(b);
              }
          }
          return {false, witness_of(cl, bfs_parent, w)};
        }
        if (color[w] == White) {
          color[w] = Grey;
          stack.push_back({w, 0});
        }
      } else {
        color[v] = Black;
        stack.pop_back();
      }
    }
  }
  return {true, {}};
}

std::vector<ConfigId> reach_exact(const ClosedLoop& cl, std::span<const ConfigId> from, std::size_t steps) {
  std::vector<ConfigId> cur(from.begin(), from.end());
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
  for (std::size_t s = 0; s < steps; ++s) {
    std::set<ConfigId> nxt;
    for (ConfigId c : cur) nxt.insert(cl.succ[c].begin(), cl.succ[c].end());
    cur.assign(nxt.begin(), nxt.end());
  }
  return cur;
}

StateSet state_estimate(const ClosedLoop& cl, std::span<const ObsId> obs) {
  if (obs.empty() || cl.size() == 0 || cl.obs[0] != obs[0])
    throw VerifyError(VerifyError::Kind::InfeasibleObservation, {obs.begin(), obs.end()},
                      "observation sequence is not generated by the closed loop");
  std::set<ConfigId> cur{0};
  for (std::size_t i = 1; i < obs.size(); ++i) {
    std::set<ConfigId> nxt;
    for (ConfigId c : cur)
      for (ConfigId d : cl.succ[c])
        if (cl.obs[d] == obs[i]) nxt.insert(d);
    if (nxt.empty())
      throw VerifyError(VerifyError::Kind::InfeasibleObservation, {obs.begin(), obs.end()},
                        "observation sequence is not generated by the closed loop");
    cur = std::move(nxt);
  }
  std::set<StateId> states;
  for (ConfigId c : cur) states.insert(cl.configs[c].state);
  return {states.begin(), states.end()};
}

UnpredictabilityResult check_unpredictable(const ClosedLoop& cl, unsigned k) {
  Observer ob = build_observer(cl);
  for (std::size_t i = 0; i < ob.states.size(); ++i) {
    auto r = reach_exact(cl, ob.states[i], k);
    bool escapes = std::any_of(r.begin(), r.end(), [&](ConfigId c) { return !cl.secret[c]; });
    if (!escapes) return {false, ob.witness[i]};
  }
  return {true, {}};
}

bool check_unpredictable_def1(const ClosedLoop& cl, unsigned k, std::size_t m_max) {
  Observer ob = build_observer(cl);
  for (const auto& s : ob.states) {
    std::vector<ConfigId> r = s;
    for (std::size_t m = 0; m <= m_max; ++m) {
      if (m >= k && std::all_of(r.begin(), r.end(), [&](ConfigId c) { return cl.secret[c]; })) return false;
      r = reach_exact(cl, r, 1);
    }
  }
  return true;
}

VerificationReport verify_controller(const ProductSystem& p, const MealyController& c, unsigned k) {
  ClosedLoop cl = build_closed_loop(p, c);
  VerificationReport r;
  r.live = check_live(cl);
  auto task = check_task(cl);
  r.task = task.ok;
  r.task_witness = task.witness;
  auto unp = check_unpredictable(cl, k);
  r.unpredictable = unp.ok;
  r.unpredictable_witness = unp.witness;
  return r;
}

ExhaustiveSearchResult exhaustive_controller_search(const ProductSystem& p, unsigned k, std::uint64_t cap) {
  const auto& ts = p.ts;
  // Every observer belief reachable under some choice of inputs.
  std::vector<StateSet> beliefs{{ts.initial()}};
  std::map<StateSet, MemId> index{{beliefs[0], 0}};
  std::vector<std::vector<InputId>> choices;
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    auto active = ts.active_inputs(beliefs[i].front());
    choices.push_back(active);
    for (InputId u : active) {
      std::map<ObsId, StateSet> split;
      for (StateId x : ts.nx(beliefs[i], u)) split[ts.observe(x)].push_back(x);
      for (auto& [o, b] : split)
        if (index.try_emplace(b, static_cast<MemId>(beliefs.size())).second) beliefs.push_back(b);
    }
  }

  ExhaustiveSearchResult result{ExhaustiveSearchResult::Outcome::NoneFound, 1, std::nullopt};
  for (const auto& c : choices) {
    if (c.empty()) return {ExhaustiveSearchResult::Outcome::NoneFound, 0, std::nullopt};
    result.candidates *= c.size();
    if (result.candidates > cap)
      return {ExhaustiveSearchResult::Outcome::Inconclusive, result.candidates, std::nullopt};
  }

  // Memory 0 is "nothing observed yet"; memory i+1 is belief i.
  std::vector<std::size_t> pick(beliefs.size(), 0);
  for (std::uint64_t n = 0; n < result.candidates; ++n) {
    MealyController mc;
    mc.memory_names.push_back("start");
    mc.output.push_back(std::nullopt);
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
      std::string name = "{";
      for (StateId x : beliefs[i]) name += (name.size() > 1 ? "," : "") + ts.state_name(x);
      mc.memory_names.push_back(name + "}");
      mc.output.push_back(choices[i][pick[i]]);
    }
    mc.update[{0, ts.observe(ts.initial())}] = 1;
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
      std::map<ObsId, StateSet> split;
      for (StateId x : ts.nx(beliefs[i], choices[i][pick[i]])) split[ts.observe(x)].push_back(x);
      for (auto& [o, b] : split) mc.update[{static_cast<MemId>(i + 1), o}] = index.at(b) + 1;
    }
    if (verify_controller(p, mc, k).ok()) {
      result.outcome = ExhaustiveSearchResult::Outcome::Found;
      result.controller = std::move(mc);
      return result;
    }
    for (std::size_t i = 0; i < pick.size(); ++i) {
      if (++pick[i] < choices[i].size()) break;
      pick[i] = 0;
    }
  }
  return result;
}

}  // namespace unpred
