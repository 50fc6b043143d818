#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "gluenn/arch.hpp"
#include "gluenn/network.hpp"

namespace gluenn {

// Batched head-trunk evaluation over a fixed set of points, carrying
// `depth` streams per activation: (value, d/dx, d2/dx2) seeded through the
// input transform. Backward propagates adjoints of the trunk output
// streams to the flat parameter gradient. This is the trainer's gradient
// route; it is checked against the scalar tape in the test suite.
class BatchNet {
 public:
  using Mat = Eigen::MatrixXd;
  using ConstW = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using MutW = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  BatchNet(const ArchSpec& arch, std::vector<double> points, int depth)
      : arch_(arch), layout_(make_layout(arch)), points_(std::move(points)), depth_(depth) {
    const auto n = static_cast<Eigen::Index>(points_.size());
    for (int s = 0; s < depth_; ++s) input_[static_cast<std::size_t>(s)].resize(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto seed = detail::transform_seed<double>(arch_, points_[static_cast<std::size_t>(i)]);
      input_[0](0, i) = seed.v;
      if (depth_ > 1) input_[1](0, i) = seed.d1;
      if (depth_ > 2) input_[2](0, i) = seed.d2;
    }
    head_.resize(layout_.head.size());
    trunks_.resize(layout_.trunks.size());
    for (std::size_t t = 0; t < layout_.trunks.size(); ++t)
      trunks_[t].resize(layout_.trunks[t].size());
  }

  int depth() const { return depth_; }
  std::size_t num_points() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }

  void forward(const NetworkParams& params) {
    if (params.size() != layout_.total) throw AutodiffError("params layout mismatch with arch");
    const double* p = params.flat.data();
    const std::array<Mat, 3>* cur = &input_;
    for (std::size_t l = 0; l < layout_.head.size(); ++l) {
      layer_forward(layout_.head[l], p, cur->data(), head_[l]);
      cur = &head_[l].a;
    }
    const std::array<Mat, 3>* features = cur;
    for (std::size_t t = 0; t < trunks_.size(); ++t) {
      cur = features;
      for (std::size_t l = 0; l < trunks_[t].size(); ++l) {
        layer_forward(layout_.trunks[t][l], p, cur->data(), trunks_[t][l]);
        cur = &trunks_[t][l].a;
      }
    }
  }

  // Trunk output streams after forward(); stream s of trunk t is a 1 x N row.
  double out(std::size_t trunk, int stream, std::size_t point) const {
    return trunks_[trunk].back().a[static_cast<std::size_t>(stream)](0, static_cast<Eigen::Index>(point));
  }

  // seeds[t][s](0, i): adjoint of trunk t output stream s at point i.
  // Adds the parameter gradient into grad (size = flat parameter count).
  void backward(const NetworkParams& params, std::vector<std::array<Mat, 3>>& seeds,
                std::vector<double>& grad) {
    const double* p = params.flat.data();
    const auto n = static_cast<Eigen::Index>(points_.size());
    std::array<Mat, 3> head_adj;
    for (int s = 0; s < depth_; ++s) {
      head_adj[static_cast<std::size_t>(s)].resize(layout_.head.back().out, n);
      head_adj[static_cast<std::size_t>(s)].setZero();
    }
    std::array<Mat, 3> cur_adj, prev_adj;
    for (std::size_t t = 0; t < trunks_.size(); ++t) {
      for (int s = 0; s < depth_; ++s) cur_adj[static_cast<std::size_t>(s)] = seeds[t][static_cast<std::size_t>(s)];
      for (std::size_t l = trunks_[t].size(); l-- > 0;) {
        const std::array<Mat, 3>* below =
            (l == 0) ? &head_[layout_.head.size() - 1].a : &trunks_[t][l - 1].a;
        layer_backward(layout_.trunks[t][l], p, trunks_[t][l], below->data(), cur_adj, prev_adj,
                       grad);
        cur_adj.swap(prev_adj);
      }
      for (int s = 0; s < depth_; ++s) head_adj[static_cast<std::size_t>(s)] += cur_adj[static_cast<std::size_t>(s)];
    }
    cur_adj.swap(head_adj);
    for (std::size_t l = layout_.head.size(); l-- > 0;) {
      const std::array<Mat, 3>* below = (l == 0) ? &input_ : &head_[l - 1].a;
      layer_backward(layout_.head[l], p, head_[l], below->data(), cur_adj, prev_adj, grad);
      cur_adj.swap(prev_adj);
    }
  }

  const ParamLayout& layout() const { return layout_; }

 private:
  struct LayerCache {
    std::array<Mat, 3> a;  // post-activation streams
    Mat z1, z2;            // pre-activation derivative streams (activated layers)
  };

  void layer_forward(const LayerShape& ls, const double* p, const Mat* in, LayerCache& cache) {
    ConstW w(p + ls.w_offset, ls.out, ls.in);
    Eigen::Map<const Eigen::VectorXd> b(p + ls.b_offset, ls.out);
    cache.a[0].noalias() = w * in[0];
    cache.a[0].colwise() += b;
    for (int s = 1; s < depth_; ++s) cache.a[static_cast<std::size_t>(s)].noalias() = w * in[static_cast<std::size_t>(s)];
    if (!ls.activated) return;
    if (depth_ > 1) cache.z1 = cache.a[1];
    if (depth_ > 2) cache.z2 = cache.a[2];
    Mat& t = cache.a[0];
    t = t.array().tanh().matrix();
    if (depth_ > 1) {
      const auto tp = (1.0 - t.array().square());  // tanh'
      cache.a[1] = (tp * cache.z1.array()).matrix();
      if (depth_ > 2)
        cache.a[2] = (-2.0 * t.array() * tp * cache.z1.array().square() + tp * cache.z2.array()).matrix();
    }
  }

  void layer_backward(const LayerShape& ls, const double* p, const LayerCache& cache,
                      const Mat* below, std::array<Mat, 3>& out_adj, std::array<Mat, 3>& in_adj,
                      std::vector<double>& grad) {
    // activation backward: out_adj becomes the pre-activation adjoint in place
    if (ls.activated) {
      const auto t = cache.a[0].array();  // tanh(z)
      const auto tp = 1.0 - t.square();
      if (depth_ == 1) {
        out_adj[0] = (out_adj[0].array() * tp).matrix();
      } else {
        const auto tpp = -2.0 * t * tp;
        const auto z1 = cache.z1.array();
        Mat zbar0, zbar1, zbar2;
        if (depth_ > 2) {
          const auto tppp = -2.0 * tp * tp - 2.0 * t * tpp;
          const auto z2 = cache.z2.array();
          zbar2 = (tp * out_adj[2].array()).matrix();
          zbar1 = (tp * out_adj[1].array() + 2.0 * tpp * z1 * out_adj[2].array()).matrix();
          zbar0 = (tp * out_adj[0].array() + tpp * z1 * out_adj[1].array() +
                   (tppp * z1.square() + tpp * z2) * out_adj[2].array())
                      .matrix();
          out_adj[2].swap(zbar2);
        } else {
          zbar1 = (tp * out_adj[1].array()).matrix();
          zbar0 = (tp * out_adj[0].array() + tpp * z1 * out_adj[1].array()).matrix();
        }
        out_adj[0].swap(zbar0);
        out_adj[1].swap(zbar1);
      }
    }
    ConstW w(p + ls.w_offset, ls.out, ls.in);
    MutW wbar(grad.data() + ls.w_offset, ls.out, ls.in);
    Eigen::Map<Eigen::VectorXd> bbar(grad.data() + ls.b_offset, ls.out);
    for (int s = 0; s < depth_; ++s) {
      wbar.noalias() += out_adj[static_cast<std::size_t>(s)] * below[s].transpose();
      in_adj[static_cast<std::size_t>(s)].noalias() = w.transpose() * out_adj[static_cast<std::size_t>(s)];
    }
    bbar.noalias() += out_adj[0].rowwise().sum();
  }

  ArchSpec arch_;
  ParamLayout layout_;
  std::vector<double> points_;
  int depth_;
  std::array<Mat, 3> input_;
  std::vector<LayerCache> head_;
  std::vector<std::vector<LayerCache>> trunks_;
};

}  // namespace gluenn
