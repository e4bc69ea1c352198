/*! \file formula.hpp
 *  \brief LTLf formula trees, finite-trace evaluation, negation normal form.
 */

#pragma once

#include <cassert>
#include <memory>
#include <string>
#include <utility>

#include "finsynth/atoms.hpp"

namespace finsynth {

enum class Op {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Next,
  WeakNext,
  Until,
  Release,
  Eventually,
  Globally,
  Last,
};

class Formula {
public:
  Formula() = default;

  Op op() const { return node_->op; }
  const std::string& atom_name() const { return node_->name; }
  Formula left() const { return Formula(node_->left); }
  Formula right() const { return Formula(node_->right); }
  bool valid() const { return node_ != nullptr; }

  static Formula make_true() { return leaf(Op::True); }
  static Formula make_false() { return leaf(Op::False); }
  static Formula last() { return leaf(Op::Last); }
  static Formula atom(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Atom;
    n->name = std::move(name);
    return Formula(std::move(n));
  }
  static Formula negate(Formula f) { return unary(Op::Not, std::move(f)); }
  static Formula next(Formula f) { return unary(Op::Next, std::move(f)); }
  static Formula weak_next(Formula f) {
    return unary(Op::WeakNext, std::move(f));
  }
  static Formula eventually(Formula f) {
    return unary(Op::Eventually, std::move(f));
  }
  static Formula globally(Formula f) {
    return unary(Op::Globally, std::move(f));
  }
  static Formula conj(Formula a, Formula b) {
    return binary(Op::And, std::move(a), std::move(b));
  }
  static Formula disj(Formula a, Formula b) {
    return binary(Op::Or, std::move(a), std::move(b));
  }
  static Formula implies(Formula a, Formula b) {
    return binary(Op::Implies, std::move(a), std::move(b));
  }
  static Formula iff(Formula a, Formula b) {
    return binary(Op::Iff, std::move(a), std::move(b));
  }
  static Formula until(Formula a, Formula b) {
    return binary(Op::Until, std::move(a), std::move(b));
  }
  static Formula release(Formula a, Formula b) {
    return binary(Op::Release, std::move(a), std::move(b));
  }

  bool operator==(const Formula& other) const {
    return structurally_equal(*this, other);
  }
  bool operator!=(const Formula& other) const { return !(*this == other); }

private:
  struct Node {
    Op op = Op::True;
    std::string name;
    std::shared_ptr<const Node> left, right;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Formula leaf(Op op) {
    auto n = std::make_shared<Node>();
    n->op = op;
    return Formula(std::move(n));
  }
  static Formula unary(Op op, Formula f) {
    assert(f.valid());
    auto n = std::make_shared<Node>();
    n->op = op;
    n->left = f.node_;
    return Formula(std::move(n));
  }
  static Formula binary(Op op, Formula a, Formula b) {
    assert(a.valid() && b.valid());
    auto n = std::make_shared<Node>();
    n->op = op;
    n->left = a.node_;
    n->right = b.node_;
    return Formula(std::move(n));
  }

  static bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
      case Op::True:
      case Op::False:
      case Op::Last:
        return true;
      case Op::Atom:
        return a.atom_name() == b.atom_name();
      case Op::Not:
      case Op::Next:
      case Op::WeakNext:
      case Op::Eventually:
      case Op::Globally:
        return structurally_equal(a.left(), b.left());
      default:
        return structurally_equal(a.left(), b.left()) &&
               structurally_equal(a.right(), b.right());
    }
  }

  std::shared_ptr<const Node> node_;
};

inline bool is_unary(Op op) {
  return op == Op::Not || op == Op::Next || op == Op::WeakNext ||
         op == Op::Eventually || op == Op::Globally;
}
inline bool is_binary(Op op) {
  return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Iff ||
         op == Op::Until || op == Op::Release;
}

/// Checks every atom against the partition; throws UndeclaredAtomError.
inline void check_atoms_declared(const Formula& f, const AtomPartition& atoms) {
  switch (f.op()) {
    case Op::Atom:
      if (atoms.index_of(f.atom_name()) < 0)
        throw UndeclaredAtomError(f.atom_name());
      return;
    case Op::True:
    case Op::False:
    case Op::Last:
      return;
    default:
      check_atoms_declared(f.left(), atoms);
      if (is_binary(f.op())) check_atoms_declared(f.right(), atoms);
  }
}

/// pi, i |= f per the finite-trace semantics. Derived operators are
/// evaluated by their defining clauses directly.
inline bool evaluate(const Formula& f, const AtomPartition& atoms,
                     const FiniteTrace& pi, std::size_t i) {
  if (pi.empty()) throw Error("evaluate: empty trace");
  if (i >= pi.size()) throw Error("evaluate: position index out of range");
  const std::size_t n = pi.size();
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Last:
      return i == n - 1;
    case Op::Atom: {
      int bit = atoms.index_of(f.atom_name());
      if (bit < 0) throw UndeclaredAtomError(f.atom_name());
      return (pi[i] >> bit) & 1u;
    }
    case Op::Not:
      return !evaluate(f.left(), atoms, pi, i);
    case Op::And:
      return evaluate(f.left(), atoms, pi, i) &&
             evaluate(f.right(), atoms, pi, i);
    case Op::Or:
      return evaluate(f.left(), atoms, pi, i) ||
             evaluate(f.right(), atoms, pi, i);
    case Op::Implies:
      return !evaluate(f.left(), atoms, pi, i) ||
             evaluate(f.right(), atoms, pi, i);
    case Op::Iff:
      return evaluate(f.left(), atoms, pi, i) ==
             evaluate(f.right(), atoms, pi, i);
    case Op::Next:
      return i + 1 < n && evaluate(f.left(), atoms, pi, i + 1);
    case Op::WeakNext:
      return i + 1 >= n || evaluate(f.left(), atoms, pi, i + 1);
    case Op::Eventually:
      for (std::size_t j = i; j < n; ++j)
        if (evaluate(f.left(), atoms, pi, j)) return true;
      return false;
    case Op::Globally:
      for (std::size_t j = i; j < n; ++j)
        if (!evaluate(f.left(), atoms, pi, j)) return false;
      return true;
    case Op::Until:
      for (std::size_t j = i; j < n; ++j) {
        if (evaluate(f.right(), atoms, pi, j)) return true;
        if (!evaluate(f.left(), atoms, pi, j)) return false;
      }
      return false;
    case Op::Release:
      // g at every position up to and including the first position with f,
      // or g everywhere.
      for (std::size_t j = i; j < n; ++j) {
        if (!evaluate(f.right(), atoms, pi, j)) return false;
        if (evaluate(f.left(), atoms, pi, j)) return true;
      }
      return true;
  }
  return false;  // unreachable
}

namespace detail {
inline Formula nnf_impl(const Formula& f, bool negated);
}

/// Negation normal form: Not only over Atom, with derived operators
/// expanded to the {And,Or,Next,WeakNext,Until,Release} core.
inline Formula to_nnf(const Formula& f) { return detail::nnf_impl(f, false); }

namespace detail {
inline Formula nnf_impl(const Formula& f, bool neg) {
  switch (f.op()) {
    case Op::True:
      return neg ? Formula::make_false() : Formula::make_true();
    case Op::False:
      return neg ? Formula::make_true() : Formula::make_false();
    case Op::Atom:
      return neg ? Formula::negate(f) : f;
    case Op::Last:
      // last = N false; !last = X true
      return neg ? Formula::next(Formula::make_true())
                 : Formula::weak_next(Formula::make_false());
    case Op::Not:
      return nnf_impl(f.left(), !neg);
    case Op::And:
      return neg ? Formula::disj(nnf_impl(f.left(), true),
                                 nnf_impl(f.right(), true))
                 : Formula::conj(nnf_impl(f.left(), false),
                                 nnf_impl(f.right(), false));
    case Op::Or:
      return neg ? Formula::conj(nnf_impl(f.left(), true),
                                 nnf_impl(f.right(), true))
                 : Formula::disj(nnf_impl(f.left(), false),
                                 nnf_impl(f.right(), false));
    case Op::Implies:
      return neg ? Formula::conj(nnf_impl(f.left(), false),
                                 nnf_impl(f.right(), true))
                 : Formula::disj(nnf_impl(f.left(), true),
                                 nnf_impl(f.right(), false));
    case Op::Iff: {
      // a <-> b  =  (a & b) | (!a & !b)
      Formula both = Formula::conj(nnf_impl(f.left(), neg),
                                   nnf_impl(f.right(), false));
      Formula neither = Formula::conj(nnf_impl(f.left(), !neg),
                                      nnf_impl(f.right(), true));
      return Formula::disj(std::move(both), std::move(neither));
    }
    case Op::Next:
      return neg ? Formula::weak_next(nnf_impl(f.left(), true))
                 : Formula::next(nnf_impl(f.left(), false));
    case Op::WeakNext:
      return neg ? Formula::next(nnf_impl(f.left(), true))
                 : Formula::weak_next(nnf_impl(f.left(), false));
    case Op::Until:
      return neg ? Formula::release(nnf_impl(f.left(), true),
                                    nnf_impl(f.right(), true))
                 : Formula::until(nnf_impl(f.left(), false),
                                  nnf_impl(f.right(), false));
    case Op::Release:
      return neg ? Formula::until(nnf_impl(f.left(), true),
                                  nnf_impl(f.right(), true))
                 : Formula::release(nnf_impl(f.left(), false),
                                    nnf_impl(f.right(), false));
    case Op::Eventually:
      // F f = true U f, G f = false R f
      return neg ? Formula::release(Formula::make_false(),
                                    nnf_impl(f.left(), true))
                 : Formula::until(Formula::make_true(),
                                  nnf_impl(f.left(), false));
    case Op::Globally:
      return neg ? Formula::until(Formula::make_true(),
                                  nnf_impl(f.left(), true))
                 : Formula::release(Formula::make_false(),
                                    nnf_impl(f.left(), false));
  }
  return f;  // unreachable
}
}  // namespace detail

namespace detail {
// Precedence levels for printing; higher binds tighter.
inline int precedence(Op op) {
  switch (op) {
    case Op::Iff:
      return 1;
    case Op::Implies:
      return 2;
    case Op::Or:
      return 3;
    case Op::And:
      return 4;
    case Op::Until:
    case Op::Release:
      return 5;
    default:
      return 6;
  }
}

inline void print_impl(const Formula& f, int parent_prec, std::string& out) {
  const int prec = precedence(f.op());
  auto paren = [&](auto&& body) {
    const bool need = prec < parent_prec;
    if (need) out += "(";
    body();
    if (need) out += ")";
  };
  switch (f.op()) {
    case Op::True:
      out += "true";
      return;
    case Op::False:
      out += "false";
      return;
    case Op::Last:
      out += "last";
      return;
    case Op::Atom:
      out += f.atom_name();
      return;
    case Op::Not:
    case Op::Next:
    case Op::WeakNext:
    case Op::Eventually:
    case Op::Globally: {
      const char* sym = f.op() == Op::Not         ? "!"
                        : f.op() == Op::Next      ? "X "
                        : f.op() == Op::WeakNext  ? "N "
                        : f.op() == Op::Eventually ? "F "
                                                   : "G ";
      out += sym;
      print_impl(f.left(), 6, out);
      return;
    }
    default: {
      const char* sym = f.op() == Op::And       ? " & "
                        : f.op() == Op::Or      ? " | "
                        : f.op() == Op::Implies ? " -> "
                        : f.op() == Op::Iff     ? " <-> "
                        : f.op() == Op::Until   ? " U "
                                                : " R ";
      paren([&] {
        // All binary operators parse right-associatively.
        print_impl(f.left(), prec + 1, out);
        out += sym;
        print_impl(f.right(), prec, out);
      });
      return;
    }
  }
}
}  // namespace detail

/// Concrete syntax accepted back by parse().
inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print_impl(f, 0, out);
  return out;
}

}  // namespace finsynth
