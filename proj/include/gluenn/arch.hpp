#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gluenn/common.hpp"
#include "gluenn/rng.hpp"

namespace gluenn {

enum class InputTransform { identity, scaled, log_scaled };

enum class Activation { tanh };

struct TrunkSpec {
  std::vector<int> hidden;
  std::string label;
};

// Head-trunk coefficient network layout: one shared head maps the
// (transformed) input to a feature vector, and each trunk maps that
// feature vector to one scalar coefficient function. Hidden layers are
// activated; the head output layer and every trunk output layer are
// linear.
struct ArchSpec {
  InputTransform input_transform = InputTransform::identity;
  double x_ref = 1.0;  // reference scale for scaled / log_scaled
  std::vector<int> head_hidden;
  int head_output = 0;
  std::vector<TrunkSpec> trunks;
  Activation activation = Activation::tanh;
};

// One dense layer inside the canonical flat parameter vector. Weights
// are row-major (out x in) at `w_offset`, biases follow at `b_offset`.
struct LayerShape {
  int in = 0;
  int out = 0;
  std::size_t w_offset = 0;
  std::size_t b_offset = 0;
  bool activated = false;
  std::string name;
};

struct ParamLayout {
  std::vector<LayerShape> head;                   // head layers in order
  std::vector<std::vector<LayerShape>> trunks;    // per trunk, in order
  std::size_t total = 0;
};

inline void validate_arch(const ArchSpec& arch) {
  auto check_width = [](int w, const std::string& where) {
    if (w <= 0) throw Error("arch: zero or negative width in " + where);
  };
  for (int w : arch.head_hidden) check_width(w, "head hidden layers");
  check_width(arch.head_output, "head output");
  if (arch.trunks.empty()) throw Error("arch: at least one trunk required");
  for (std::size_t t = 0; t < arch.trunks.size(); ++t) {
    for (int w : arch.trunks[t].hidden) check_width(w, "trunk " + arch.trunks[t].label);
    if (arch.trunks[t].label.empty()) throw Error("arch: trunk label must be nonempty");
    for (std::size_t u = 0; u < t; ++u)
      if (arch.trunks[u].label == arch.trunks[t].label)
        throw Error("arch: duplicate trunk label '" + arch.trunks[t].label + "'");
  }
  if ((arch.input_transform == InputTransform::scaled ||
       arch.input_transform == InputTransform::log_scaled) &&
      arch.x_ref == 0.0)
    throw Error("arch: x_ref must be nonzero for scaled transforms");
}

// Canonical flat index: head layers first, then each trunk's layers in
// declared order; within a layer, row-major weights then biases.
inline ParamLayout make_layout(const ArchSpec& arch) {
  validate_arch(arch);
  ParamLayout layout;
  std::size_t offset = 0;
  auto add_layer = [&offset](std::vector<LayerShape>& dst, int in, int out, bool activated,
                             std::string name) {
    LayerShape ls;
    ls.in = in;
    ls.out = out;
    ls.w_offset = offset;
    ls.b_offset = offset + static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
    ls.activated = activated;
    ls.name = std::move(name);
    offset = ls.b_offset + static_cast<std::size_t>(out);
    dst.push_back(std::move(ls));
  };

  int prev = 1;
  for (std::size_t i = 0; i < arch.head_hidden.size(); ++i) {
    add_layer(layout.head, prev, arch.head_hidden[i], true, "head hidden " + std::to_string(i));
    prev = arch.head_hidden[i];
  }
  add_layer(layout.head, prev, arch.head_output, false, "head output");

  layout.trunks.resize(arch.trunks.size());
  for (std::size_t t = 0; t < arch.trunks.size(); ++t) {
    const TrunkSpec& ts = arch.trunks[t];
    prev = arch.head_output;
    for (std::size_t i = 0; i < ts.hidden.size(); ++i) {
      add_layer(layout.trunks[t], prev, ts.hidden[i], true,
                "trunk " + ts.label + " hidden " + std::to_string(i));
      prev = ts.hidden[i];
    }
    add_layer(layout.trunks[t], prev, 1, false, "trunk " + ts.label + " output");
  }
  layout.total = offset;
  return layout;
}

// All weights and biases of head + trunks, flat-indexable for gradient
// descent.
struct NetworkParams {
  std::vector<double> flat;
  std::size_t size() const { return flat.size(); }
};

// Structured view used by flatten/unflatten round-trip checks.
struct LayerParams {
  std::vector<std::vector<double>> w;  // [out][in]
  std::vector<double> b;
};

inline std::vector<LayerParams> unflatten(const ArchSpec& arch, const NetworkParams& params) {
  const ParamLayout layout = make_layout(arch);
  if (params.size() != layout.total) throw Error("unflatten: parameter length mismatch");
  std::vector<LayerParams> out;
  auto grab = [&](const LayerShape& ls) {
    LayerParams lp;
    lp.w.assign(static_cast<std::size_t>(ls.out), std::vector<double>(static_cast<std::size_t>(ls.in)));
    for (int r = 0; r < ls.out; ++r)
      for (int c = 0; c < ls.in; ++c)
        lp.w[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            params.flat[ls.w_offset + static_cast<std::size_t>(r * ls.in + c)];
    lp.b.assign(params.flat.begin() + static_cast<std::ptrdiff_t>(ls.b_offset),
                params.flat.begin() + static_cast<std::ptrdiff_t>(ls.b_offset) + ls.out);
    out.push_back(std::move(lp));
  };
  for (const auto& ls : layout.head) grab(ls);
  for (const auto& trunk : layout.trunks)
    for (const auto& ls : trunk) grab(ls);
  return out;
}

inline NetworkParams flatten(const ArchSpec& arch, const std::vector<LayerParams>& layers) {
  const ParamLayout layout = make_layout(arch);
  NetworkParams params;
  params.flat.assign(layout.total, 0.0);
  std::size_t li = 0;
  auto put = [&](const LayerShape& ls) {
    const LayerParams& lp = layers.at(li++);
    for (int r = 0; r < ls.out; ++r)
      for (int c = 0; c < ls.in; ++c)
        params.flat[ls.w_offset + static_cast<std::size_t>(r * ls.in + c)] =
            lp.w[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    for (int r = 0; r < ls.out; ++r)
      params.flat[ls.b_offset + static_cast<std::size_t>(r)] = lp.b[static_cast<std::size_t>(r)];
  };
  for (const auto& ls : layout.head) put(ls);
  for (const auto& trunk : layout.trunks)
    for (const auto& ls : trunk) put(ls);
  return params;
}

// Glorot-style uniform init from the counter-based RNG; biases zero.
inline NetworkParams build_network(const ArchSpec& arch, std::uint64_t seed) {
  const ParamLayout layout = make_layout(arch);
  NetworkParams params;
  params.flat.assign(layout.total, 0.0);
  auto init_layer = [&](const LayerShape& ls) {
    const double limit = std::sqrt(6.0 / static_cast<double>(ls.in + ls.out));
    const std::size_t nw = static_cast<std::size_t>(ls.in) * static_cast<std::size_t>(ls.out);
    for (std::size_t i = 0; i < nw; ++i)
      params.flat[ls.w_offset + i] = uniform_sym(seed, ls.w_offset + i, limit);
  };
  for (const auto& ls : layout.head) init_layer(ls);
  for (const auto& trunk : layout.trunks)
    for (const auto& ls : trunk) init_layer(ls);
  return params;
}

}  // namespace gluenn
