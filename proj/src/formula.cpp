#include "unpred/formula.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace unpred {

ApUniverse::ApUniverse(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!is_identifier(n)) throw std::invalid_argument("invalid atomic proposition name '" + n + "'");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate atomic proposition '" + n + "'");
  }
}

std::optional<ApId> ApUniverse::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ApId>(it - names_.begin());
}

bool ApUniverse::is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

std::string to_string(Label l, const ApUniverse& aps) {
  std::string out = "{";
  bool first = true;
  for (ApId i = 0; i < aps.size(); ++i) {
    if (!l.has(i)) continue;
    if (!first) out += ",";
    out += aps.name(i);
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Formula

Formula Formula::make(Kind kind, ApId ap, std::vector<Formula> children) {
  return Formula(std::make_shared<const Node>(Node{kind, ap, std::move(children)}));
}

Formula Formula::truth() {
  static const Formula t = make(Kind::True, 0, {});
  return t;
}
Formula Formula::atom(ApId ap) { return make(Kind::Atom, ap, {}); }
Formula Formula::neg_atom(ApId ap) { return make(Kind::NegAtom, ap, {}); }
Formula Formula::conj(Formula lhs, Formula rhs) { return make(Kind::And, 0, {std::move(lhs), std::move(rhs)}); }
Formula Formula::disj(Formula lhs, Formula rhs) { return make(Kind::Or, 0, {std::move(lhs), std::move(rhs)}); }
Formula Formula::next(Formula sub) { return make(Kind::Next, 0, {std::move(sub)}); }
Formula Formula::until(Formula lhs, Formula rhs) { return make(Kind::Until, 0, {std::move(lhs), std::move(rhs)}); }
Formula Formula::eventually(Formula sub) { return make(Kind::Eventually, 0, {std::move(sub)}); }

std::size_t Formula::depth() const {
  std::size_t d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.depth());
  return node_->children.empty() ? 0 : d + 1;
}

bool Formula::is_normalized() const {
  if (kind() == Kind::Eventually) return false;
  return std::all_of(node_->children.begin(), node_->children.end(),
                     [](const Formula& c) { return c.is_normalized(); });
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if ((a.kind() == Formula::Kind::Atom || a.kind() == Formula::Kind::NegAtom) && a.ap() != b.ap()) return false;
  return a.node_->children == b.node_->children;
}

Formula normalize(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::Atom:
    case K::NegAtom:
      return f;
    case K::And:
      return Formula::conj(normalize(f.lhs()), normalize(f.rhs()));
    case K::Or:
      return Formula::disj(normalize(f.lhs()), normalize(f.rhs()));
    case K::Next:
      return Formula::next(normalize(f.sub()));
    case K::Until:
      return Formula::until(normalize(f.lhs()), normalize(f.rhs()));
    case K::Eventually:
      return Formula::until(Formula::truth(), normalize(f.sub()));
  }
  return f;
}

std::string to_string(const Formula& f, const ApUniverse& aps) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return "true";
    case K::Atom: return aps.name(f.ap());
    case K::NegAtom: return "!" + aps.name(f.ap());
    case K::And: return "(" + to_string(f.lhs(), aps) + " & " + to_string(f.rhs(), aps) + ")";
    case K::Or: return "(" + to_string(f.lhs(), aps) + " | " + to_string(f.rhs(), aps) + ")";
    case K::Next: return "X " + to_string(f.sub(), aps);
    case K::Until: return "(" + to_string(f.lhs(), aps) + " U " + to_string(f.rhs(), aps) + ")";
    case K::Eventually: return "F " + to_string(f.sub(), aps);
  }
  return {};
}

FormulaError::FormulaError(Kind kind, std::size_t position, std::string detail)
    : std::runtime_error([&] {
        const char* what = kind == Kind::Syntax        ? "syntax error"
                           : kind == Kind::UnknownAtom ? "unknown atom"
                                                       : "negation of non-atom";
        return std::string(what) + " at position " + std::to_string(position) + ": " + detail;
      }()),
      kind_(kind),
      position_(position),
      detail_(std::move(detail)) {}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ApUniverse& aps) : text_(text), aps_(aps) {}

  Formula run() {
    Formula f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("end of input");
    return f;
  }

 private:
  enum class Tok { End, Ident, LParen, RParen, Bang, Amp, Bar, Other };

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // Classifies the next token without consuming it; identifiers (including the
  // keywords X, F, U, true) are returned in `word`.
  Tok peek(std::string_view* word = nullptr) {
    skip_ws();
    if (pos_ >= text_.size()) return Tok::End;
    char c = text_[pos_];
    switch (c) {
      case '(': return Tok::LParen;
      case ')': return Tok::RParen;
      case '!': return Tok::Bang;
      case '&': return Tok::Amp;
      case '|': return Tok::Bar;
      default: break;
    }
    auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u) || c == '_') {
      std::size_t end = pos_ + 1;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
      if (word) *word = text_.substr(pos_, end - pos_);
      return Tok::Ident;
    }
    return Tok::Other;
  }

  [[noreturn]] void fail(const std::string& expected) {
    std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    throw FormulaError(FormulaError::Kind::Syntax, pos_, "expected " + expected + ", found " + found);
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (peek() == Tok::Bar) {
      ++pos_;
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (peek() == Tok::Amp) {
      ++pos_;
      f = Formula::conj(f, parse_until());
    }
    return f;
  }

  Formula parse_until() {
    Formula f = parse_unary();
    std::string_view w;
    if (peek(&w) == Tok::Ident && w == "U") {
      pos_ += 1;
      return Formula::until(f, parse_until());
    }
    return f;
  }

  Formula parse_unary() {
    std::string_view w;
    Tok t = peek(&w);
    std::size_t start = pos_;
    switch (t) {
      case Tok::Bang: {
        ++pos_;
        Formula sub = parse_unary();
        if (sub.kind() != Formula::Kind::Atom)
          throw FormulaError(FormulaError::Kind::NegationOfNonAtom, start,
                             "'!' may only be applied to an atomic proposition");
        return Formula::neg_atom(sub.ap());
      }
      case Tok::LParen: {
        ++pos_;
        Formula f = parse_or();
        if (peek() != Tok::RParen) fail("')'");
        ++pos_;
        return f;
      }
      case Tok::Ident: {
        pos_ += w.size();
        if (w == "X") return Formula::next(parse_unary());
        if (w == "F") return Formula::until(Formula::truth(), parse_unary());
        if (w == "true") return Formula::truth();
        if (w == "U") {
          pos_ = start;
          fail("formula");
        }
        auto id = aps_.find(w);
        if (!id) throw FormulaError(FormulaError::Kind::UnknownAtom, start, std::string(w));
        return Formula::atom(*id);
      }
      default:
        fail("formula");
    }
  }

  std::string_view text_;
  const ApUniverse& aps_;
  std::size_t pos_ = 0;
};

bool holds_at(const Word& w, std::size_t i, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::Atom: return i < w.size() && w[i].has(f.ap());
    case K::NegAtom: return i < w.size() && !w[i].has(f.ap());
    case K::And: return holds_at(w, i, f.lhs()) && holds_at(w, i, f.rhs());
    case K::Or: return holds_at(w, i, f.lhs()) || holds_at(w, i, f.rhs());
    case K::Next: return i + 1 < w.size() && holds_at(w, i + 1, f.sub());
    case K::Until:
      for (std::size_t j = i; j < w.size(); ++j) {
        if (holds_at(w, j, f.rhs())) return true;
        if (!holds_at(w, j, f.lhs())) return false;
      }
      return false;
    case K::Eventually:
      for (std::size_t j = i; j < w.size(); ++j)
        if (holds_at(w, j, f.sub())) return true;
      return false;
  }
  return false;
}

}  // namespace

Formula parse(std::string_view text, const ApUniverse& aps) {
  for (std::size_t i = 0; i < text.size(); ++i)
    if (static_cast<unsigned char>(text[i]) > 0x7f)
      throw FormulaError(FormulaError::Kind::Syntax, i, "non-ASCII character");
  return Parser(text, aps).run();
}

bool holds_on(const Word& w, const Formula& f) { return holds_at(w, 0, f); }

bool is_minimal_good_prefix(const Word& w, const Formula& f) {
  if (!holds_on(w, f)) return false;
  for (std::size_t n = 0; n < w.size(); ++n) {
    Word prefix(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n));
    if (holds_on(prefix, f)) return false;
  }
  return true;
}

}  // namespace unpred
