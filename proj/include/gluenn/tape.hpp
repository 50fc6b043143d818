#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gluenn/common.hpp"

namespace gluenn::ad {

// Reverse-mode tape over scalar primitives. Each node stores up to two
// parents with the local partial derivatives evaluated at record time;
// replaying adjoints in reverse order gives the exact gradient of a
// recorded scalar with respect to every leaf. Leaves must be created
// before any dependent arithmetic (parameters first, by convention).
class Tape {
 public:
  struct Node {
    std::int32_t a = -1;
    std::int32_t b = -1;
    double wa = 0.0;
    double wb = 0.0;
  };

  std::int32_t leaf() {
    nodes_.push_back(Node{});
    ++num_leaves_;
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t record(std::int32_t a, double wa, std::int32_t b, double wb) {
    nodes_.push_back(Node{a, b, wa, wb});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t num_leaves() const { return num_leaves_; }

  // Drops all nodes but keeps capacity; leaves must be re-created.
  void clear() {
    nodes_.clear();
    num_leaves_ = 0;
  }

  // Adjoint sweep seeded at `root`. Returns adjoints of the first
  // `num_leaves()` nodes (the leaves, in creation order).
  std::vector<double> gradient(std::int32_t root) const {
    if (root < 0 || root >= static_cast<std::int32_t>(nodes_.size()))
      throw AutodiffError("tape gradient: root is not a tape node");
    adj_.assign(nodes_.size(), 0.0);
    adj_[static_cast<std::size_t>(root)] = 1.0;
    for (std::int32_t i = root; i >= 0; --i) {
      const double g = adj_[static_cast<std::size_t>(i)];
      if (g == 0.0) continue;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.a >= 0) adj_[static_cast<std::size_t>(n.a)] += n.wa * g;
      if (n.b >= 0) adj_[static_cast<std::size_t>(n.b)] += n.wb * g;
    }
    return std::vector<double>(adj_.begin(), adj_.begin() + static_cast<std::ptrdiff_t>(num_leaves_));
  }

 private:
  std::vector<Node> nodes_;
  std::size_t num_leaves_ = 0;
  mutable std::vector<double> adj_;
};

// A scalar living on a tape. id < 0 marks a constant (not tracked);
// arithmetic between constants folds without recording nodes.
struct Var {
  double v = 0.0;
  std::int32_t id = -1;
  Tape* tape = nullptr;

  Var() = default;
  Var(double value) : v(value) {}  // implicit constant lift
  Var(double value, std::int32_t node_id, Tape* t) : v(value), id(node_id), tape(t) {}

  bool is_const() const { return id < 0; }
};

inline Var make_leaf(Tape& tape, double value) { return Var(value, tape.leaf(), &tape); }

namespace detail {
inline Tape* tape_of(const Var& x, const Var& y) { return x.tape ? x.tape : y.tape; }
}  // namespace detail

inline Var operator+(const Var& x, const Var& y) {
  if (x.is_const() && y.is_const()) return Var(x.v + y.v);
  Tape* t = detail::tape_of(x, y);
  return Var(x.v + y.v, t->record(x.id, 1.0, y.id, 1.0), t);
}

inline Var operator-(const Var& x, const Var& y) {
  if (x.is_const() && y.is_const()) return Var(x.v - y.v);
  Tape* t = detail::tape_of(x, y);
  return Var(x.v - y.v, t->record(x.id, 1.0, y.id, -1.0), t);
}

inline Var operator-(const Var& x) {
  if (x.is_const()) return Var(-x.v);
  return Var(-x.v, x.tape->record(x.id, -1.0, -1, 0.0), x.tape);
}

inline Var operator*(const Var& x, const Var& y) {
  if (x.is_const() && y.is_const()) return Var(x.v * y.v);
  Tape* t = detail::tape_of(x, y);
  return Var(x.v * y.v, t->record(x.id, y.v, y.id, x.v), t);
}

inline Var operator/(const Var& x, const Var& y) {
  const double q = x.v / y.v;
  if (x.is_const() && y.is_const()) return Var(q);
  Tape* t = detail::tape_of(x, y);
  return Var(q, t->record(x.id, 1.0 / y.v, y.id, -q / y.v), t);
}

inline Var& operator+=(Var& x, const Var& y) { return x = x + y; }
inline Var& operator-=(Var& x, const Var& y) { return x = x - y; }
inline Var& operator*=(Var& x, const Var& y) { return x = x * y; }

namespace detail {
inline Var unary(const Var& x, double value, double dfdx) {
  if (x.is_const()) return Var(value);
  return Var(value, x.tape->record(x.id, dfdx, -1, 0.0), x.tape);
}
}  // namespace detail

inline Var exp(const Var& x) {
  const double e = std::exp(x.v);
  return detail::unary(x, e, e);
}

inline Var log(const Var& x) { return detail::unary(x, std::log(x.v), 1.0 / x.v); }

inline Var sin(const Var& x) { return detail::unary(x, std::sin(x.v), std::cos(x.v)); }

inline Var cos(const Var& x) { return detail::unary(x, std::cos(x.v), -std::sin(x.v)); }

inline Var tanh(const Var& x) {
  const double th = std::tanh(x.v);
  return detail::unary(x, th, 1.0 - th * th);
}

inline Var pow(const Var& x, double p) {
  return detail::unary(x, std::pow(x.v, p), p * std::pow(x.v, p - 1.0));
}

inline Var sqrt(const Var& x) {
  const double s = std::sqrt(x.v);
  return detail::unary(x, s, 0.5 / s);
}

// Subgradient at 0 is taken as 0.
inline Var abs(const Var& x) {
  const double s = x.v > 0.0 ? 1.0 : (x.v < 0.0 ? -1.0 : 0.0);
  return detail::unary(x, std::abs(x.v), s);
}

inline double value_of(const Var& x) { return x.v; }
inline double value_of(double x) { return x; }

// Gradient of a recorded scalar with respect to a parameter vector laid
// out as the tape's leaves. The leaf count must match the parameter
// count (layout mismatch is a hard error).
inline std::vector<double> grad_params(const Tape& tape, const Var& loss, std::size_t num_params) {
  if (tape.num_leaves() != num_params)
    throw AutodiffError("grad_params: tape has " + std::to_string(tape.num_leaves()) +
                        " leaves but params has " + std::to_string(num_params) + " entries");
  if (loss.is_const())
    throw AutodiffError("grad_params: loss was not recorded on the tape");
  return tape.gradient(loss.id);
}

}  // namespace gluenn::ad
