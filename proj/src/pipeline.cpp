#include "unpred/pipeline.hpp"

#include <limits>
#include <sstream>

namespace unpred {

Pipeline build_pipeline(TransitionSystem system, std::string_view formula, const PipelineOptions& opts) {
  if (opts.add_stop) {
    std::vector<StateId> all(system.num_states());
    for (StateId x = 0; x < all.size(); ++x) all[x] = x;
    system = add_stop_state(system, all);
  }
  Formula f = parse(formula, system.ap());
  Dfa dfa = compile(f, system.ap());
  if (opts.minimize) dfa = minimize(dfa);
  ModifiedDfa m = modify(dfa);
  ProductSystem p = build_product(system, m);
  return {std::move(system), std::move(f), std::move(m), std::move(p)};
}

Rng::Rng(std::uint64_t seed) : gen_(seed) {}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;  // largest multiple of n, minus one
  std::uint64_t v;
  do v = gen_();
  while (v > limit);
  return v % n;
}

std::vector<SimStep> simulate(const ProductSystem& p, const MealyController& c, std::size_t steps,
                              std::uint64_t seed) {
  const auto& ts = p.ts;
  Rng rng(seed);
  std::vector<SimStep> trace;
  StateId x = ts.initial();
  MemId m = c.initial;
  std::vector<ObsId> seen;
  bool completed = false;
  for (std::size_t i = 0;; ++i) {
    SimStep s{x, ts.observe(x), std::nullopt, !completed && p.is_secret(x)};
    completed = completed || p.is_done(x);
    seen.push_back(s.obs);
    trace.push_back(s);
    if (i == steps) break;
    auto m2 = c.next(m, s.obs);
    if (!m2 || *m2 >= c.output.size() || !c.output[*m2])
      throw VerifyError(VerifyError::Kind::UndefinedControl, seen, "controller undefined during simulation");
    InputId u = *c.output[*m2];
    const auto& succ = ts.successors(x, u);
    if (succ.empty()) break;
    trace.back().input = u;
    x = succ[rng.below(succ.size())];
    m = *m2;
  }
  return trace;
}

std::string format_trace(const Pipeline& pl, const std::vector<SimStep>& trace) {
  const auto& ts = pl.product.ts;
  std::ostringstream os;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& s = trace[i];
    os << i << "  " << pl.product.describe(s.state, pl.system, pl.dfa) << "  obs=" << ts.obs_name(s.obs);
    if (s.input) os << "  input=" << ts.input_name(*s.input);
    if (s.completes) os << "  [task complete]";
    os << "\n";
  }
  return os.str();
}

}  // namespace unpred
