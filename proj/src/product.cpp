#include "unpred/product.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace unpred {

ProductSystem build_product(const TransitionSystem& ts, const ModifiedDfa& a) {
  if (a.dfa.num_ap() != ts.ap().size())
    throw ModelError("alphabet mismatch: automaton over " + std::to_string(a.dfa.num_ap()) +
                     " propositions, system over " + std::to_string(ts.ap().size()));
  using Pair = std::pair<StateId, DfaState>;
  const Dfa& dfa = a.dfa;

  std::map<Pair, std::size_t> seen;
  std::vector<Pair> found;
  Pair init{ts.initial(), dfa.step(dfa.initial(), ts.label(ts.initial()))};
  seen.emplace(init, 0);
  found.push_back(init);
  for (std::size_t i = 0; i < found.size(); ++i) {
    auto [x, s] = found[i];
    for (InputId u = 0; u < ts.num_inputs(); ++u)
      for (StateId x2 : ts.successors(x, u)) {
        Pair next{x2, dfa.step(s, ts.label(x2))};
        if (seen.try_emplace(next, found.size()).second) found.push_back(next);
      }
  }

  std::vector<Pair> sorted = found;
  std::sort(sorted.begin(), sorted.end());
  std::map<Pair, StateId> id;
  for (std::size_t i = 0; i < sorted.size(); ++i) id.emplace(sorted[i], static_cast<StateId>(i));

  std::vector<std::string> names;
  std::vector<Transition> transitions;
  std::vector<Label> labels;
  std::vector<ObsId> observation;
  ProductSystem p;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto [x, s] = sorted[i];
    names.push_back("x" + std::to_string(i + 1));
    labels.push_back(ts.label(x));
    observation.push_back(ts.observe(x));
    p.xf.push_back(a.is_f(s));
    p.xf_or_sink.push_back(a.is_f(s) || s == a.sink_accept);
    for (InputId u = 0; u < ts.num_inputs(); ++u)
      for (StateId x2 : ts.successors(x, u))
        transitions.push_back({static_cast<StateId>(i), u, id.at({x2, dfa.step(s, ts.label(x2))})});
  }
  p.origin = sorted;
  p.ts = TransitionSystem(std::move(names), id.at(init), ts.input_names(), std::move(transitions), ts.ap(),
                          std::move(labels), ts.obs_names(), std::move(observation));
  return p;
}

std::string ProductSystem::describe(StateId x, const TransitionSystem& system, const ModifiedDfa& dfa) const {
  auto [sx, s] = origin.at(x);
  std::string aut = s == dfa.sink_accept ? "s_F" : s == dfa.sink_bad ? "s_B" : "s" + std::to_string(s + 1);
  return ts.state_name(x) + "=(" + system.state_name(sx) + "," + aut + ")";
}

Path project_path(const ProductSystem& p, const Path& product_path) {
  Path out;
  out.inputs = product_path.inputs;
  for (StateId x : product_path.states) out.states.push_back(p.origin.at(x).first);
  return out;
}

Path lift_path(const ProductSystem& p, const TransitionSystem& system, const ModifiedDfa& a, const Path& path) {
  Path out;
  out.inputs = path.inputs;
  if (path.states.empty()) return out;
  DfaState s = a.dfa.initial();
  for (StateId x : path.states) {
    s = a.dfa.step(s, system.label(x));
    auto it = std::lower_bound(p.origin.begin(), p.origin.end(), std::make_pair(x, s));
    if (it == p.origin.end() || *it != std::make_pair(x, s))
      throw ModelError("path leaves the reachable product");
    out.states.push_back(static_cast<StateId>(it - p.origin.begin()));
  }
  return out;
}

std::string to_dot(const ProductSystem& p) {
  std::ostringstream os;
  os << "digraph product {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (StateId x = 0; x < p.num_states(); ++x) {
    os << "  x" << x << " [label=\"" << p.ts.state_name(x) << "\", shape=box";
    if (p.is_secret(x)) os << ", peripheries=2";
    if (p.is_done(x)) os << ", style=filled, fillcolor=lightgray";
    os << "];\n";
  }
  os << "  __start -> x" << p.ts.initial() << ";\n";
  for (const auto& t : p.ts.transitions())
    os << "  x" << t.from << " -> x" << t.to << " [label=\"" << p.ts.input_name(t.input) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace unpred
