#include "unpred/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace unpred {

Dfa::Dfa(std::size_t num_ap, std::size_t num_states, DfaState initial)
    : num_ap_(num_ap),
      initial_(initial),
      delta_(num_states << num_ap, kNoState),
      accepting_(num_states, false),
      names_(num_states) {
  if (num_ap >= 32) throw AutomatonError("alphabet too large");
  if (num_states > 0 && initial >= num_states) throw AutomatonError("initial state out of range");
}

void Dfa::check_label(Label a) const {
  if (a.bits() >= alphabet_size())
    throw AutomatonError("label outside alphabet: " + std::to_string(a.bits()));
}

DfaState Dfa::step(DfaState s, Label a) const {
  check_label(a);
  return delta_.at((std::size_t{s} << num_ap_) + a.bits());
}

void Dfa::set_transition(DfaState from, Label a, DfaState to) {
  check_label(a);
  if (to != kNoState && to >= num_states()) throw AutomatonError("transition target out of range");
  delta_.at((std::size_t{from} << num_ap_) + a.bits()) = to;
}

bool Dfa::is_complete() const {
  return std::none_of(delta_.begin(), delta_.end(), [](DfaState s) { return s == kNoState; });
}

DfaState Dfa::add_state(std::string name) {
  auto id = static_cast<DfaState>(num_states());
  delta_.resize(delta_.size() + alphabet_size(), kNoState);
  accepting_.push_back(false);
  names_.push_back(std::move(name));
  return id;
}

bool Dfa::accepts(const Word& w) const {
  DfaState s = initial_;
  for (Label a : w) {
    s = step(s, a);
    if (s == kNoState) return false;
  }
  return accepting_.at(s);
}

// ---------------------------------------------------------------------------
// Progression-based compilation

namespace {

using Clause = std::vector<int>;  // conjunction of leaf ids, sorted
using Dnf = std::vector<Clause>;  // disjunction, sorted, absorbed

const Dnf kTrue{Clause{}};
const Dnf kFalse{};

class Compiler {
 public:
  Compiler(std::size_t num_ap, const ApUniverse& aps) : num_ap_(num_ap), aps_(aps) {
    leaves_.push_back(Formula::truth());  // id 0: "at least one more letter"
  }

  Dfa run(const Formula& f) {
    std::map<Dnf, DfaState> index;
    std::vector<Dnf> residues;
    auto intern = [&](Dnf d) {
      auto [it, fresh] = index.try_emplace(d, static_cast<DfaState>(residues.size()));
      if (fresh) residues.push_back(std::move(d));
      return it->second;
    };
    intern(to_dnf(f));
    std::vector<std::vector<DfaState>> delta;
    for (std::size_t i = 0; i < residues.size(); ++i) {
      std::vector<DfaState> row(std::size_t{1} << num_ap_);
      for (std::uint64_t a = 0; a < row.size(); ++a) row[a] = intern(progress(residues[i], Label(a)));
      delta.push_back(std::move(row));
    }
    Dfa out(num_ap_, residues.size(), 0);
    for (DfaState s = 0; s < residues.size(); ++s) {
      for (std::uint64_t a = 0; a < delta[s].size(); ++a) out.set_transition(s, Label(a), delta[s][a]);
      out.set_accepting(s, accepts_empty(residues[s]));
      out.set_name(s, describe(residues[s]));
    }
    return out;
  }

 private:
  enum : int { kNonEmpty = 0 };

  static std::string key(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::True: return "T";
      case K::Atom: return "a" + std::to_string(f.ap());
      case K::NegAtom: return "n" + std::to_string(f.ap());
      case K::And: return "&(" + key(f.lhs()) + "," + key(f.rhs()) + ")";
      case K::Or: return "|(" + key(f.lhs()) + "," + key(f.rhs()) + ")";
      case K::Next: return "X(" + key(f.sub()) + ")";
      case K::Until: return "U(" + key(f.lhs()) + "," + key(f.rhs()) + ")";
      case K::Eventually: return "F(" + key(f.sub()) + ")";
    }
    return {};
  }

  int leaf(const Formula& f) {
    auto [it, fresh] = leaf_index_.try_emplace(key(f), static_cast<int>(leaves_.size()));
    if (fresh) leaves_.push_back(f);
    return it->second;
  }

  static Dnf simplify(Dnf d) {
    for (auto& c : d) {
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    std::sort(d.begin(), d.end(), [](const Clause& a, const Clause& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    d.erase(std::unique(d.begin(), d.end()), d.end());
    Dnf kept;
    for (auto& c : d) {
      bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
        return std::includes(c.begin(), c.end(), k.begin(), k.end());
      });
      if (!absorbed) kept.push_back(std::move(c));
    }
    std::sort(kept.begin(), kept.end());
    return kept;
  }

  Dnf conj(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& x : a)
      for (const auto& y : b) {
        Clause c = x;
        c.insert(c.end(), y.begin(), y.end());
        if (!contradictory(c)) out.push_back(std::move(c));
      }
    return simplify(std::move(out));
  }

  static Dnf disj(Dnf a, const Dnf& b) {
    a.insert(a.end(), b.begin(), b.end());
    return simplify(std::move(a));
  }

  // A clause requiring both p and !p at the current position is unsatisfiable.
  bool contradictory(const Clause& c) const {
    for (int x : c) {
      const Formula& fx = leaves_[x];
      if (x == kNonEmpty || fx.kind() != Formula::Kind::Atom) continue;
      for (int y : c)
        if (y != kNonEmpty && leaves_[y].kind() == Formula::Kind::NegAtom && leaves_[y].ap() == fx.ap())
          return true;
    }
    return false;
  }

  Dnf to_dnf(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::True: return kTrue;
      case K::And: return conj(to_dnf(f.lhs()), to_dnf(f.rhs()));
      case K::Or: return disj(to_dnf(f.lhs()), to_dnf(f.rhs()));
      case K::Eventually: return to_dnf(Formula::until(Formula::truth(), f.sub()));
      default: return Dnf{Clause{leaf(f)}};
    }
  }

  Dnf progress_leaf(int id, Label a) {
    if (id == kNonEmpty) return kTrue;
    auto memo_key = std::make_pair(id, a.bits());
    if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    Formula f = leaves_[id];
    Dnf out;
    switch (f.kind()) {
      case Formula::Kind::Atom: out = a.has(f.ap()) ? kTrue : kFalse; break;
      case Formula::Kind::NegAtom: out = a.has(f.ap()) ? kFalse : kTrue; break;
      case Formula::Kind::Next: {
        // X g needs a further letter even when g holds on the empty suffix.
        out = to_dnf(f.sub());
        for (auto& c : out)
          if (c.empty()) c.push_back(kNonEmpty);
        out = simplify(std::move(out));
        break;
      }
      case Formula::Kind::Until: {
        Dnf now = progress(to_dnf(f.rhs()), a);
        Dnf later = conj(progress(to_dnf(f.lhs()), a), Dnf{Clause{id}});
        out = disj(std::move(now), later);
        break;
      }
      default: throw AutomatonError("unexpected leaf in progression");
    }
    memo_.emplace(memo_key, out);
    return out;
  }

  Dnf progress(const Dnf& d, Label a) {
    Dnf out;
    for (const auto& c : d) {
      Dnf acc = kTrue;
      for (int id : c) {
        acc = conj(acc, progress_leaf(id, a));
        if (acc.empty()) break;
      }
      out.insert(out.end(), acc.begin(), acc.end());
    }
    return simplify(std::move(out));
  }

  // Every leaf fails on the empty word, so only the empty clause accepts.
  static bool accepts_empty(const Dnf& d) { return !d.empty() && d.front().empty(); }

  std::string describe(const Dnf& d) const {
    if (d.empty()) return "false";
    std::ostringstream os;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i) os << " | ";
      if (d[i].empty()) os << "true";
      for (std::size_t j = 0; j < d[i].size(); ++j) {
        if (j) os << " & ";
        int id = d[i][j];
        os << (id == kNonEmpty ? std::string("X true") : to_string(leaves_[id], aps_));
      }
    }
    return os.str();
  }

  std::size_t num_ap_;
  const ApUniverse& aps_;
  std::vector<Formula> leaves_;
  std::map<std::string, int> leaf_index_;
  std::map<std::pair<int, std::uint64_t>, Dnf> memo_;
};

ApUniverse default_universe(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("a" + std::to_string(i));
  return ApUniverse(std::move(names));
}

void check_atoms(const Formula& f, std::size_t num_ap) {
  using K = Formula::Kind;
  if ((f.kind() == K::Atom || f.kind() == K::NegAtom) && f.ap() >= num_ap)
    throw AutomatonError("formula uses a proposition outside the alphabet");
  switch (f.kind()) {
    case K::And:
    case K::Or:
    case K::Until:
      check_atoms(f.lhs(), num_ap);
      check_atoms(f.rhs(), num_ap);
      break;
    case K::Next:
    case K::Eventually:
      check_atoms(f.sub(), num_ap);
      break;
    default:
      break;
  }
}

}  // namespace

Dfa compile(const Formula& f, const ApUniverse& aps, const CompileOptions& opts) {
  if (aps.size() > opts.max_ap)
    throw AutomatonError("alphabet too large: " + std::to_string(aps.size()) + " propositions (limit " +
                         std::to_string(opts.max_ap) + ")");
  check_atoms(f, aps.size());
  return Compiler(aps.size(), aps).run(normalize(f));
}

Dfa compile(const Formula& f, std::size_t num_ap, const CompileOptions& opts) {
  if (num_ap > opts.max_ap)
    throw AutomatonError("alphabet too large: " + std::to_string(num_ap) + " propositions (limit " +
                         std::to_string(opts.max_ap) + ")");
  return compile(f, default_universe(num_ap), opts);
}

// ---------------------------------------------------------------------------

Dfa minimize(const Dfa& a) {
  const std::size_t sigma = a.alphabet_size();
  // Reachable states, breadth-first.
  std::vector<DfaState> order;
  std::vector<bool> seen(a.num_states(), false);
  if (a.num_states() > 0) {
    order.push_back(a.initial());
    seen[a.initial()] = true;
  }
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::uint64_t c = 0; c < sigma; ++c) {
      DfaState t = a.step(order[i], Label(c));
      if (t != kNoState && !seen[t]) {
        seen[t] = true;
        order.push_back(t);
      }
    }

  // Moore refinement; undefined transitions behave like a shared dead class.
  std::vector<int> cls(a.num_states(), -1);
  for (DfaState s : order) cls[s] = a.is_accepting(s) ? 1 : 0;
  std::size_t num_classes = 0;
  for (;;) {
    std::map<std::vector<int>, int> sigs;
    std::vector<int> next(a.num_states(), -1);
    for (DfaState s : order) {
      std::vector<int> sig{cls[s]};
      for (std::uint64_t c = 0; c < sigma; ++c) {
        DfaState t = a.step(s, Label(c));
        sig.push_back(t == kNoState ? -1 : cls[t]);
      }
      auto [it, _] = sigs.try_emplace(sig, static_cast<int>(sigs.size()));
      next[s] = it->second;
    }
    cls = std::move(next);
    if (sigs.size() == num_classes) break;
    num_classes = sigs.size();
  }

  // Renumber classes breadth-first from the initial class; bfs[n] is a
  // representative old state of new state n.
  std::vector<DfaState> bfs;
  std::map<int, DfaState> ids;
  if (!order.empty()) {
    ids[cls[a.initial()]] = 0;
    bfs.push_back(a.initial());
  }
  for (std::size_t i = 0; i < bfs.size(); ++i)
    for (std::uint64_t c = 0; c < sigma; ++c) {
      DfaState t = a.step(bfs[i], Label(c));
      if (t == kNoState) continue;
      if (ids.try_emplace(cls[t], static_cast<DfaState>(bfs.size())).second) bfs.push_back(t);
    }

  Dfa out(a.num_ap(), bfs.size(), 0);
  for (DfaState n = 0; n < bfs.size(); ++n) {
    out.set_accepting(n, a.is_accepting(bfs[n]));
    out.set_name(n, a.name(bfs[n]));
    for (std::uint64_t c = 0; c < sigma; ++c) {
      DfaState t = a.step(bfs[n], Label(c));
      out.set_transition(n, Label(c), t == kNoState ? kNoState : ids.at(cls[t]));
    }
  }
  return out;
}

ModifiedDfa modify(const Dfa& a) {
  const std::size_t n = a.num_states();
  Dfa out(a.num_ap(), n, a.num_states() ? a.initial() : 0);
  for (DfaState s = 0; s < n; ++s) out.set_name(s, a.name(s));
  DfaState s_f = out.add_state("s_F");
  DfaState s_b = out.add_state("s_B");
  std::vector<bool> f_states(n + 2, false);
  for (std::uint64_t c = 0; c < a.alphabet_size(); ++c) {
    Label l(c);
    for (DfaState s = 0; s < n; ++s) {
      if (a.is_accepting(s)) {
        out.set_transition(s, l, s_f);
      } else {
        DfaState t = a.step(s, l);
        out.set_transition(s, l, t == kNoState ? s_b : t);
      }
    }
    out.set_transition(s_f, l, s_f);
    out.set_transition(s_b, l, s_b);
  }
  for (DfaState s = 0; s < n; ++s) {
    f_states[s] = a.is_accepting(s);
    out.set_accepting(s, a.is_accepting(s));
  }
  out.set_accepting(s_f, true);
  return ModifiedDfa{std::move(out), std::move(f_states), s_f, s_b};
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const ModifiedDfa& m, const ApUniverse& aps) {
  const Dfa& a = m.dfa;
  std::ostringstream os;
  os << "digraph dfa {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (DfaState s = 0; s < a.num_states(); ++s) {
    std::string label = s == m.sink_accept ? "s_F" : s == m.sink_bad ? "s_B" : "s" + std::to_string(s + 1);
    os << "  s" << s << " [label=\"" << label << "\"";
    if (s == m.sink_accept)
      os << ", shape=doublecircle";
    else if (s == m.sink_bad)
      os << ", shape=circle, style=dashed";
    else if (m.is_f(s))
      os << ", shape=circle, peripheries=2";
    else
      os << ", shape=circle";
    if (!a.name(s).empty() && s != m.sink_accept && s != m.sink_bad)
      os << ", tooltip=\"" << dot_escape(a.name(s)) << "\"";
    os << "];\n";
  }
  os << "  __start -> s" << a.initial() << ";\n";
  for (DfaState s = 0; s < a.num_states(); ++s) {
    std::map<DfaState, std::vector<std::string>> grouped;
    for (std::uint64_t c = 0; c < a.alphabet_size(); ++c) {
      DfaState t = a.step(s, Label(c));
      if (t != kNoState) grouped[t].push_back(to_string(Label(c), aps));
    }
    for (const auto& [t, labels] : grouped) {
      os << "  s" << s << " -> s" << t << " [label=\"";
      if (labels.size() == a.alphabet_size()) {
        os << "*";
      } else {
        for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? " " : "") << labels[i];
      }
      os << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace unpred
