#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace unpred {

using ApId = std::size_t;

// Ordered set of atomic proposition names. The position of a name is the
// bit it occupies in a Label.
class ApUniverse {
 public:
  ApUniverse() = default;
  explicit ApUniverse(std::vector<std::string> names);

  std::optional<ApId> find(std::string_view name) const;
  const std::string& name(ApId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  static bool is_identifier(std::string_view s);

 private:
  std::vector<std::string> names_;
};

// A subset of the AP universe, bit i set iff proposition i holds.
class Label {
 public:
  constexpr Label() = default;
  constexpr explicit Label(std::uint64_t bits) : bits_(bits) {}

  constexpr bool has(ApId ap) const { return (bits_ >> ap) & 1U; }
  constexpr std::uint64_t bits() const { return bits_; }
  Label with(ApId ap) const { return Label(bits_ | (std::uint64_t{1} << ap)); }

  friend constexpr auto operator<=>(Label, Label) = default;

 private:
  std::uint64_t bits_ = 0;
};

using Word = std::vector<Label>;

std::string to_string(Label l, const ApUniverse& aps);

// Immutable scLTL syntax tree. Negation can only be built on atoms.
class Formula {
 public:
  enum class Kind { True, Atom, NegAtom, And, Or, Next, Until, Eventually };

  static Formula truth();
  static Formula atom(ApId ap);
  static Formula neg_atom(ApId ap);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula next(Formula sub);
  static Formula until(Formula lhs, Formula rhs);
  static Formula eventually(Formula sub);

  Kind kind() const { return node_->kind; }
  ApId ap() const { return node_->ap; }
  const Formula& lhs() const { return node_->children.at(0); }
  const Formula& rhs() const { return node_->children.at(1); }
  const Formula& sub() const { return node_->children.at(0); }

  std::size_t depth() const;
  bool is_normalized() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    ApId ap = 0;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Kind kind, ApId ap, std::vector<Formula> children);

  std::shared_ptr<const Node> node_;
};

// Rewrites every Eventually(f) as Until(True, f).
Formula normalize(const Formula& f);

// Fully parenthesized rendering accepted back by parse().
std::string to_string(const Formula& f, const ApUniverse& aps);

class FormulaError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownAtom, NegationOfNonAtom };

  FormulaError(Kind kind, std::size_t position, std::string detail);

  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::size_t position_;
  std::string detail_;
};

// Grammar (ASCII, whitespace insignificant):
//   formula := and { "|" and }
//   and     := until { "&" until }
//   until   := unary [ "U" until ]
//   unary   := "!" atom | "X" unary | "F" unary | atom | "true" | "(" formula ")"
// The result is normalized.
Formula parse(std::string_view text, const ApUniverse& aps);

// Strong finite-word semantics: atoms need position 0 to exist, Next needs
// position 1, Until needs a witness inside the word.
bool holds_on(const Word& w, const Formula& f);

bool is_minimal_good_prefix(const Word& w, const Formula& f);

}  // namespace unpred
