#pragma once

#include <span>
#include <string>
#include <vector>

#include "gluenn/arch.hpp"
#include "gluenn/dual2.hpp"
#include "gluenn/tape.hpp"

namespace gluenn {

using ad::Dual2;

// Coefficient values and their first/second input derivatives at a point,
// keyed by trunk label.
struct CoefficientBundle {
  std::vector<std::string> labels;
  std::vector<Dual2<double>> c;

  const Dual2<double>& at(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return c[i];
    throw Error("CoefficientBundle: no trunk labeled '" + label + "'");
  }
};

namespace detail {

// Input seed through the transform chain rule: components are
// (u(x), du/dx, d2u/dx2), which Dual2 arithmetic then composes exactly.
template <class S>
Dual2<S> transform_seed(const ArchSpec& arch, double x) {
  switch (arch.input_transform) {
    case InputTransform::identity:
      return Dual2<S>(S(x), S(1.0), S(0.0));
    case InputTransform::scaled:
      return Dual2<S>(S(x / arch.x_ref), S(1.0 / arch.x_ref), S(0.0));
    case InputTransform::log_scaled:
      return Dual2<S>(S(std::log(x / arch.x_ref)), S(1.0 / x), S(-1.0 / (x * x)));
  }
  throw Error("unknown input transform");
}

template <class S>
void check_layer_finite(const std::vector<Dual2<S>>& act, const LayerShape& ls) {
  for (const auto& a : act) {
    if (!is_finite(ad::value_of(a.v)) || !is_finite(ad::value_of(a.d1)) || !is_finite(ad::value_of(a.d2)))
      throw AutodiffError("non-finite activation in " + ls.name);
  }
}

template <class S>
void apply_layer(const LayerShape& ls, std::span<const S> params,
                 const std::vector<Dual2<S>>& in, std::vector<Dual2<S>>& out) {
  out.resize(static_cast<std::size_t>(ls.out));
  for (int r = 0; r < ls.out; ++r) {
    Dual2<S> acc = Dual2<S>::constant(params[ls.b_offset + static_cast<std::size_t>(r)]);
    const std::size_t row = ls.w_offset + static_cast<std::size_t>(r * ls.in);
    for (int c = 0; c < ls.in; ++c) acc = acc + params[row + static_cast<std::size_t>(c)] * in[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = ls.activated ? tanh(acc) : acc;
  }
  check_layer_finite(out, ls);
}

}  // namespace detail

// Forward pass returning one Dual2 per trunk (value + input derivatives),
// generic over the scalar type: S = double evaluates, S = ad::Var records
// the computation for parameter gradients.
template <class S>
std::vector<Dual2<S>> forward_network(const ArchSpec& arch, const ParamLayout& layout,
                                      std::span<const S> params, double x) {
  std::vector<Dual2<S>> cur{detail::transform_seed<S>(arch, x)}, nxt;
  for (const auto& ls : layout.head) {
    detail::apply_layer(ls, params, cur, nxt);
    cur.swap(nxt);
  }
  std::vector<Dual2<S>> features = cur;
  std::vector<Dual2<S>> outputs;
  outputs.reserve(layout.trunks.size());
  for (const auto& trunk : layout.trunks) {
    cur = features;
    for (const auto& ls : trunk) {
      detail::apply_layer(ls, params, cur, nxt);
      cur.swap(nxt);
    }
    outputs.push_back(cur[0]);
  }
  return outputs;
}

// Exact value and first/second x-derivatives of every trunk output.
inline std::vector<Dual2<double>> eval_with_input_derivs(const NetworkParams& params,
                                                         const ArchSpec& arch, double x) {
  if (!is_finite(x)) throw Error("eval_with_input_derivs: x must be finite");
  const ParamLayout layout = make_layout(arch);
  if (params.size() != layout.total) throw AutodiffError("params layout mismatch with arch");
  return forward_network<double>(arch, layout, std::span<const double>(params.flat), x);
}

inline CoefficientBundle forward_coeffs(const NetworkParams& params, const ArchSpec& arch,
                                        double x) {
  CoefficientBundle bundle;
  bundle.c = eval_with_input_derivs(params, arch, x);
  bundle.labels.reserve(arch.trunks.size());
  for (const auto& t : arch.trunks) bundle.labels.push_back(t.label);
  return bundle;
}

// Lifts the flat parameter vector onto a tape as leaves (in canonical
// flat order) so a recorded loss can be differentiated by grad_params.
inline std::vector<ad::Var> make_taped_params(ad::Tape& tape, const NetworkParams& params) {
  std::vector<ad::Var> vars;
  vars.reserve(params.size());
  for (double p : params.flat) vars.push_back(ad::make_leaf(tape, p));
  return vars;
}

}  // namespace gluenn
