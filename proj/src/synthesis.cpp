#include "unpred/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>

namespace unpred {

namespace {

void check_horizon(unsigned k) {
  if (k > kMaxHorizon)
    throw SynthesisError("horizon K=" + std::to_string(k) + " exceeds the supported maximum " +
                         std::to_string(kMaxHorizon));
}

std::uint64_t prediction_mask(unsigned k) {
  return k >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << (k + 1)) - 1;
}

template <typename T>
std::optional<std::size_t> find_sorted(const std::vector<T>& v, const T& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || !(*it == x)) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

// Inputs active at every member (they coincide when the observation-uniform
// control assumption holds).
std::vector<InputId> common_inputs(const ProductSystem& p, const Belief& b) {
  if (b.empty()) return {};
  auto out = p.ts.active_inputs(b.front().state);
  for (const auto& a : b) {
    auto act = p.ts.active_inputs(a.state);
    std::vector<InputId> keep;
    std::set_intersection(out.begin(), out.end(), act.begin(), act.end(), std::back_inserter(keep));
    out = std::move(keep);
  }
  return out;
}

}  // namespace

std::string to_string(Prediction h, unsigned k) {
  std::string s;
  for (unsigned i = 0; i <= k; ++i) s += h[i] ? '1' : '0';
  return s;
}

Prediction parse_prediction(std::string_view bits) {
  if (bits.empty() || bits.size() > kMaxHorizon + 1) throw SynthesisError("bad prediction length");
  Prediction h;
  for (unsigned i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw SynthesisError("prediction must be a 0/1 string");
    h = h.with(i, bits[i] == '1');
  }
  return h;
}

StateSet states_of(const Belief& b) {
  StateSet s;
  for (const auto& a : b) s.push_back(a.state);
  return s;
}

bool is_functional(const Belief& b) {
  for (std::size_t i = 1; i < b.size(); ++i)
    if (b[i].state == b[i - 1].state) return false;
  return true;
}

bool is_currently_consistent(const ProductSystem& p, const AugmentedState& a) {
  return a.pred[0] == p.is_secret(a.state);
}

bool is_secure(const Belief& b, unsigned k) {
  return std::any_of(b.begin(), b.end(), [k](const AugmentedState& a) { return !a.pred[k]; });
}

bool one_step_consistent(Prediction h, std::span<const Prediction> successors, unsigned k) {
  check_horizon(k);
  const std::uint64_t mask = prediction_mask(k);
  if ((h.bits() & ~mask) != 0) throw SynthesisError("prediction length mismatch");
  for (Prediction s : successors)
    if ((s.bits() & ~mask) != 0) throw SynthesisError("prediction length mismatch");
  if (successors.empty()) throw SynthesisError("one-step consistency needs a nonempty successor set");
  for (unsigned i = 1; i <= k; ++i) {
    if (h[i]) {
      if (!std::all_of(successors.begin(), successors.end(), [i](Prediction s) { return s[i - 1]; })) return false;
    } else {
      if (!std::any_of(successors.begin(), successors.end(), [i](Prediction s) { return !s[i - 1]; })) return false;
    }
  }
  return true;
}

std::vector<ZState> yz_successors(const ProductSystem& p, const YState& y, InputId u, unsigned k) {
  check_horizon(k);
  const auto& ts = p.ts;
  if (y.belief.empty() || u >= ts.num_inputs()) return {};
  const StateSet succ = ts.nx(states_of(y.belief), u);
  const std::size_t n = succ.size();
  if (n == 0) return {};
  if (n >= 25) throw SynthesisError("successor belief too large to enumerate");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  // Successor mask of each member of y, over positions in `succ`.
  std::vector<std::uint64_t> member_mask;
  for (const auto& a : y.belief) {
    std::uint64_t m = 0;
    for (StateId x : ts.successors(a.state, u))
      m |= std::uint64_t{1} << (std::lower_bound(succ.begin(), succ.end(), x) - succ.begin());
    if (m == 0) return {};
    member_mask.push_back(m);
  }

  // Column j holds bit j of every successor's prediction. Column 0 is fixed
  // by current consistency; column j < k is constrained by bit j+1 of the
  // members; column k is free.
  auto column_ok = [&](unsigned j, std::uint64_t col) {
    if (j >= k) return true;
    for (std::size_t m = 0; m < y.belief.size(); ++m) {
      std::uint64_t zeros = member_mask[m] & ~col;
      if (y.belief[m].pred[j + 1] ? zeros != 0 : zeros == 0) return false;
    }
    return true;
  };
  std::vector<std::vector<std::uint64_t>> columns(k + 1);
  std::uint64_t col0 = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (p.is_secret(succ[i])) col0 |= std::uint64_t{1} << i;
  if (!column_ok(0, col0)) return {};
  columns[0].push_back(col0);
  for (unsigned j = 1; j <= k; ++j) {
    for (std::uint64_t c = 0; c <= full; ++c)
      if (column_ok(j, c)) columns[j].push_back(c);
    if (columns[j].empty()) return {};
  }
  // Secure: not every successor predicts a secret state at horizon k.
  std::erase(columns[k], full);
  if (columns[k].empty()) return {};

  std::vector<ZState> out;
  std::vector<std::size_t> pick(k + 1, 0);
  for (;;) {
    ZState z{{}, u};
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t bits = 0;
      for (unsigned j = 0; j <= k; ++j)
        if ((columns[j][pick[j]] >> i) & 1U) bits |= std::uint64_t{1} << j;
      z.belief.push_back({succ[i], Prediction(bits)});
    }
    out.push_back(std::move(z));
    unsigned j = 0;
    while (j <= k && ++pick[j] == columns[j].size()) pick[j++] = 0;
    if (j > k) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<YState> zy_successor(const ProductSystem& p, const ZState& z, ObsId o) {
  YState y{{}, o};
  for (const auto& a : z.belief)
    if (p.ts.observe(a.state) == o) y.belief.push_back(a);
  if (y.belief.empty()) return std::nullopt;
  return y;
}

std::vector<YState> initial_y_states(const ProductSystem& p, unsigned k) {
  check_horizon(k);
  const StateId x0 = p.ts.initial();
  std::vector<YState> out;
  const std::uint64_t free_bits = k >= 63 ? ~std::uint64_t{0} >> 1 : (std::uint64_t{1} << k) - 1;
  if (k > 24) throw SynthesisError("horizon too large to enumerate initial predictions");
  for (std::uint64_t rest = 0; rest <= free_bits; ++rest) {
    Prediction h((rest << 1) | (p.is_secret(x0) ? 1U : 0U));
    Belief b{{x0, h}};
    if (is_secure(b, k)) out.push_back({std::move(b), p.ts.observe(x0)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> Bts::find_y(const YState& s) const { return find_sorted(y, s); }
std::optional<std::size_t> Bts::find_z(const ZState& s) const { return find_sorted(z, s); }

bool is_complete(const ProductSystem& p, const Bts& t) {
  for (const auto& edges : t.yz)
    if (edges.empty()) return false;
  for (std::size_t i = 0; i < t.z.size(); ++i)
    for (const auto& a : t.z[i].belief) {
      ObsId o = p.ts.observe(a.state);
      bool defined = std::any_of(t.zy[i].begin(), t.zy[i].end(), [o](const auto& e) { return e.first == o; });
      if (!defined) return false;
    }
  return true;
}

bool is_deterministic(const Bts& t) {
  if (t.initial.size() != 1) return false;
  return std::all_of(t.yz.begin(), t.yz.end(), [](const auto& e) { return e.size() == 1; });
}

bool is_subgraph(const Bts& sub, const Bts& super) {
  for (std::size_t i = 0; i < sub.y.size(); ++i) {
    auto j = super.find_y(sub.y[i]);
    if (!j) return false;
    for (auto [u, zi] : sub.yz[i]) {
      auto zj = super.find_z(sub.z[zi]);
      if (!zj) return false;
      if (!std::binary_search(super.yz[*j].begin(), super.yz[*j].end(), std::make_pair(u, *zj))) return false;
    }
  }
  for (std::size_t i = 0; i < sub.z.size(); ++i) {
    auto j = super.find_z(sub.z[i]);
    if (!j) return false;
    for (auto [o, yi] : sub.zy[i]) {
      auto yj = super.find_y(sub.y[yi]);
      if (!yj || !std::binary_search(super.zy[*j].begin(), super.zy[*j].end(), std::make_pair(o, *yj))) return false;
    }
  }
  for (std::size_t i : sub.initial) {
    auto j = super.find_y(sub.y[i]);
    if (!j || !std::binary_search(super.initial.begin(), super.initial.end(), *j)) return false;
  }
  return true;
}

namespace {

// Renumbers kept nodes in canonical order and drops edges to removed nodes.
Bts canonical_subgraph(const Bts& g, const std::vector<bool>& keep_y, const std::vector<bool>& keep_z) {
  std::vector<std::size_t> y_order, z_order;
  for (std::size_t i = 0; i < g.y.size(); ++i)
    if (keep_y[i]) y_order.push_back(i);
  for (std::size_t i = 0; i < g.z.size(); ++i)
    if (keep_z[i]) z_order.push_back(i);
  std::sort(y_order.begin(), y_order.end(), [&](std::size_t a, std::size_t b) { return g.y[a] < g.y[b]; });
  std::sort(z_order.begin(), z_order.end(), [&](std::size_t a, std::size_t b) { return g.z[a] < g.z[b]; });
  constexpr std::size_t kGone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> y_new(g.y.size(), kGone), z_new(g.z.size(), kGone);
  for (std::size_t i = 0; i < y_order.size(); ++i) y_new[y_order[i]] = i;
  for (std::size_t i = 0; i < z_order.size(); ++i) z_new[z_order[i]] = i;

  Bts out;
  out.k = g.k;
  for (std::size_t i : y_order) {
    out.y.push_back(g.y[i]);
    std::vector<std::pair<InputId, std::size_t>> edges;
    for (auto [u, z] : g.yz[i])
      if (z_new[z] != kGone) edges.push_back({u, z_new[z]});
    std::sort(edges.begin(), edges.end());
    out.yz.push_back(std::move(edges));
  }
  for (std::size_t i : z_order) {
    out.z.push_back(g.z[i]);
    std::vector<std::pair<ObsId, std::size_t>> edges;
    for (auto [o, y] : g.zy[i])
      if (y_new[y] != kGone) edges.push_back({o, y_new[y]});
    out.zy.push_back(std::move(edges));
  }
  for (std::size_t i : g.initial)
    if (y_new[i] != kGone) out.initial.push_back(y_new[i]);
  std::sort(out.initial.begin(), out.initial.end());
  return out;
}

}  // namespace

ExploredBts explore_bts(const ProductSystem& p, unsigned k) {
  check_horizon(k);
  ExploredBts raw;
  Bts& g = raw.graph;
  g.k = k;
  std::map<YState, std::size_t> y_index;
  std::map<ZState, std::size_t> z_index;
  auto intern_y = [&](YState s) {
    auto [it, fresh] = y_index.try_emplace(s, g.y.size());
    if (fresh) {
      g.y.push_back(std::move(s));
      g.yz.emplace_back();
    }
    return it->second;
  };
  for (auto& y0 : initial_y_states(p, k)) g.initial.push_back(intern_y(std::move(y0)));

  for (std::size_t yi = 0; yi < g.y.size(); ++yi) {
    const YState y = g.y[yi];
    for (InputId u : common_inputs(p, y.belief)) {
      for (auto& z : yz_successors(p, y, u, k)) {
        auto [it, fresh] = z_index.try_emplace(z, g.z.size());
        std::size_t zi = it->second;
        g.yz[yi].push_back({u, zi});
        if (!fresh) continue;
        g.z.push_back(z);
        g.zy.emplace_back();
        raw.broken.push_back(false);
        std::vector<ObsId> seen;
        for (const auto& a : z.belief) seen.push_back(p.ts.observe(a.state));
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (ObsId o : seen) {
          auto next = zy_successor(p, z, o);
          if (!is_secure(next->belief, k)) {
            raw.broken[zi] = true;
            continue;
          }
          std::size_t target = intern_y(std::move(*next));
          g.zy[zi].push_back({o, target});
        }
      }
    }
  }
  return raw;
}

Aes prune_to_complete(const ProductSystem& p, const ExploredBts& raw, std::optional<std::uint64_t> shuffle_seed) {
  (void)p;
  const Bts& g = raw.graph;
  const std::size_t ny = g.y.size(), nz = g.z.size();
  std::vector<bool> alive_y(ny, true), alive_z(nz, true);
  std::vector<std::vector<std::size_t>> y_preds(ny), z_preds(nz);  // Z-preds of a Y, Y-preds of a Z
  for (std::size_t y = 0; y < ny; ++y)
    for (auto [u, z] : g.yz[y]) z_preds[z].push_back(y);
  for (std::size_t z = 0; z < nz; ++z)
    for (auto [o, y] : g.zy[z]) y_preds[y].push_back(z);

  // Worklist entries: node id, with Z-states offset by ny.
  std::vector<std::size_t> work(ny + nz);
  for (std::size_t i = 0; i < work.size(); ++i) work[i] = i;
  std::mt19937_64 rng(shuffle_seed.value_or(0));
  if (shuffle_seed) std::shuffle(work.begin(), work.end(), rng);
  std::deque<std::size_t> queue(work.begin(), work.end());

  auto y_complete = [&](std::size_t y) {
    return std::any_of(g.yz[y].begin(), g.yz[y].end(), [&](const auto& e) { return alive_z[e.second]; });
  };
  auto z_complete = [&](std::size_t z) {
    return !raw.broken[z] &&
           std::all_of(g.zy[z].begin(), g.zy[z].end(), [&](const auto& e) { return alive_y[e.second]; });
  };
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    std::vector<std::size_t> affected;
    if (n < ny) {
      if (!alive_y[n] || y_complete(n)) continue;
      alive_y[n] = false;
      for (std::size_t z : y_preds[n]) affected.push_back(ny + z);
    } else {
      std::size_t z = n - ny;
      if (!alive_z[z] || z_complete(z)) continue;
      alive_z[z] = false;
      for (std::size_t y : z_preds[z]) affected.push_back(y);
    }
    if (shuffle_seed) std::shuffle(affected.begin(), affected.end(), rng);
    queue.insert(queue.end(), affected.begin(), affected.end());
  }

  // Keep the part reachable from surviving initial Y-states.
  std::vector<bool> keep_y(ny, false), keep_z(nz, false);
  std::deque<std::size_t> bfs;
  for (std::size_t y : g.initial)
    if (alive_y[y]) {
      keep_y[y] = true;
      bfs.push_back(y);
    }
  while (!bfs.empty()) {
    std::size_t y = bfs.front();
    bfs.pop_front();
    for (auto [u, z] : g.yz[y]) {
      if (!alive_z[z] || keep_z[z]) continue;
      keep_z[z] = true;
      for (auto [o, y2] : g.zy[z])
        if (!keep_y[y2]) {
          keep_y[y2] = true;
          bfs.push_back(y2);
        }
    }
  }
  return canonical_subgraph(g, keep_y, keep_z);
}

Aes build_aes(const ProductSystem& p, unsigned k) { return prune_to_complete(p, explore_bts(p, k)); }

Distances attractor(const ProductSystem& p, const Aes& aes) {
  Distances d{std::vector<std::uint32_t>(aes.y.size(), kInfinity), std::vector<std::uint32_t>(aes.z.size(), kInfinity)};
  auto all_done = [&](const Belief& b) {
    return std::all_of(b.begin(), b.end(), [&](const AugmentedState& a) { return p.is_done(a.state); });
  };
  for (std::size_t i = 0; i < aes.y.size(); ++i)
    if (all_done(aes.y[i].belief)) d.y[i] = 0;
  for (std::size_t i = 0; i < aes.z.size(); ++i)
    if (all_done(aes.z[i].belief)) d.z[i] = 0;

  // Level k+1 is computed from level k on both sides simultaneously.
  for (std::uint32_t level = 0;; ++level) {
    std::vector<std::size_t> new_y, new_z;
    for (std::size_t i = 0; i < aes.y.size(); ++i) {
      if (d.y[i] != kInfinity) continue;
      if (std::any_of(aes.yz[i].begin(), aes.yz[i].end(), [&](const auto& e) { return d.z[e.second] <= level; }))
        new_y.push_back(i);
    }
    for (std::size_t i = 0; i < aes.z.size(); ++i) {
      if (d.z[i] != kInfinity) continue;
      if (std::all_of(aes.zy[i].begin(), aes.zy[i].end(), [&](const auto& e) { return d.y[e.second] <= level; }))
        new_z.push_back(i);
    }
    if (new_y.empty() && new_z.empty()) break;
    for (std::size_t i : new_y) d.y[i] = level + 1;
    for (std::size_t i : new_z) d.z[i] = level + 1;
  }
  return d;
}

std::optional<DetBts> extract(const Aes& aes, const Distances& dist) {
  std::optional<std::size_t> y0;
  for (std::size_t i : aes.initial)
    if (dist.y[i] != kInfinity) {
      y0 = i;
      break;
    }
  if (!y0) return std::nullopt;

  std::vector<bool> keep_y(aes.y.size(), false), keep_z(aes.z.size(), false);
  std::vector<std::pair<InputId, std::size_t>> choice(aes.y.size());
  std::deque<std::size_t> frontier{*y0};
  keep_y[*y0] = true;
  while (!frontier.empty()) {
    std::size_t y = frontier.front();
    frontier.pop_front();
    // Smallest (distance, canonical Z-state); from a target every successor
    // is a target as well, so this also keeps target states live.
    const auto& edges = aes.yz[y];
    if (edges.empty()) throw SynthesisError("AES contains an incomplete Y-state");
    auto best = *std::min_element(edges.begin(), edges.end(), [&](const auto& a, const auto& b) {
      return std::tie(dist.z[a.second], a.second) < std::tie(dist.z[b.second], b.second);
    });
    if (dist.z[best.second] == kInfinity || (dist.y[y] != 0 && dist.z[best.second] >= dist.y[y]))
      throw SynthesisError("distance does not decrease along the extracted strategy");
    choice[y] = best;
    if (keep_z[best.second]) continue;
    keep_z[best.second] = true;
    for (auto [o, y2] : aes.zy[best.second])
      if (!keep_y[y2]) {
        keep_y[y2] = true;
        frontier.push_back(y2);
      }
  }

  Bts restricted = aes;
  restricted.initial = {*y0};
  for (std::size_t y = 0; y < aes.y.size(); ++y)
    restricted.yz[y] = keep_y[y] ? std::vector<std::pair<InputId, std::size_t>>{choice[y]}
                                 : std::vector<std::pair<InputId, std::size_t>>{};
  return canonical_subgraph(restricted, keep_y, keep_z);
}

// ---------------------------------------------------------------------------

Controller::Controller(DetBts bts) : bts_(std::move(bts)) {
  if (!is_deterministic(bts_)) throw SynthesisError("controller requires a deterministic BTS");
}

std::size_t Controller::y_state_for(std::span<const ObsId> obs) const {
  auto infeasible = [&] {
    return VerifyError(VerifyError::Kind::InfeasibleObservation, {obs.begin(), obs.end()},
                       "observation sequence is not accepted by the controller");
  };
  std::size_t y = initial();
  if (obs.empty() || obs.front() != bts_.y[y].obs) throw infeasible();
  for (std::size_t i = 1; i < obs.size(); ++i) {
    const auto& edges = bts_.zy[z_after(y)];
    auto it = std::find_if(edges.begin(), edges.end(), [&](const auto& e) { return e.first == obs[i]; });
    if (it == edges.end()) throw infeasible();
    y = it->second;
  }
  return y;
}

MealyController Controller::to_mealy() const {
  MealyController m;
  m.memory_names.push_back("start");
  m.output.push_back(std::nullopt);
  for (std::size_t y = 0; y < bts_.y.size(); ++y) {
    m.memory_names.push_back("y" + std::to_string(y));
    m.output.push_back(input_at(y));
  }
  m.initial = 0;
  m.update[{0, bts_.y[initial()].obs}] = static_cast<MemId>(initial() + 1);
  for (std::size_t y = 0; y < bts_.y.size(); ++y)
    for (auto [o, y2] : bts_.zy[z_after(y)]) m.update[{static_cast<MemId>(y + 1), o}] = static_cast<MemId>(y2 + 1);
  return m;
}

Controller decode(const DetBts& t) { return Controller(t); }

SynthesisResult synthesize(const ProductSystem& p, unsigned k) {
  SynthesisResult r{build_aes(p, k), {}, std::nullopt};
  r.dist = attractor(p, r.aes);
  if (auto t = extract(r.aes, r.dist)) r.controller.emplace(std::move(*t));
  return r;
}

std::string to_dot(const Bts& t, const ProductSystem& p, const std::string& name) {
  auto belief = [&](const Belief& b) {
    std::string s;
    for (const auto& a : b) s += (s.empty() ? "" : "\\n") + p.ts.state_name(a.state) + ":" + to_string(a.pred, t.k);
    return s;
  };
  std::ostringstream os;
  os << "digraph " << name << " {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < t.y.size(); ++i)
    os << "  y" << i << " [shape=circle, label=\"" << belief(t.y[i].belief) << "\"];\n";
  for (std::size_t i = 0; i < t.z.size(); ++i)
    os << "  z" << i << " [shape=box, label=\"" << belief(t.z[i].belief) << "\"];\n";
  for (std::size_t i : t.initial) os << "  __start" << i << " [shape=point];\n  __start" << i << " -> y" << i << ";\n";
  for (std::size_t i = 0; i < t.y.size(); ++i)
    for (auto [u, z] : t.yz[i]) os << "  y" << i << " -> z" << z << " [label=\"" << p.ts.input_name(u) << "\"];\n";
  for (std::size_t i = 0; i < t.z.size(); ++i)
    for (auto [o, y] : t.zy[i]) os << "  z" << i << " -> y" << y << " [label=\"" << p.ts.obs_name(o) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace unpred
