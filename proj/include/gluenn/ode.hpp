#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gluenn/common.hpp"

namespace gluenn {

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

enum class OdeMode { rk45, implicit_trapezoidal };

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  OdeMode mode = OdeMode::rk45;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2000000;
};

// Ground-truth trajectory: accepted integrator nodes plus a cubic Hermite
// dense evaluator. Evaluation at a stored node reproduces the stored value
// exactly.
struct OracleSolution {
  std::vector<double> t;                // ascending
  std::vector<std::vector<double>> y;   // y[node][component]
  std::vector<std::vector<double>> dy;  // rhs at node
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  int dim = 0;

  double t_min() const { return t.front(); }
  double t_max() const { return t.back(); }

  std::vector<double> eval(double at) const {
    std::vector<double> out(static_cast<std::size_t>(dim));
    eval_into(at, out);
    return out;
  }

  double eval_component(double at, int component) const {
    return eval(at)[static_cast<std::size_t>(component)];
  }

  void eval_into(double at, std::span<double> out) const {
    if (at < t.front() - 1e-12 || at > t.back() + 1e-12)
      throw OdeError("dense evaluation outside the integrated span");
    auto it = std::lower_bound(t.begin(), t.end(), at);
    if (it != t.end() && *it == at) {
      const std::size_t i = static_cast<std::size_t>(it - t.begin());
      for (int c = 0; c < dim; ++c) out[static_cast<std::size_t>(c)] = y[i][static_cast<std::size_t>(c)];
      return;
    }
    std::size_t hi = static_cast<std::size_t>(it - t.begin());
    if (hi == 0) hi = 1;
    if (hi >= t.size()) hi = t.size() - 1;
    const std::size_t lo = hi - 1;
    const double h = t[hi] - t[lo];
    const double s = (at - t[lo]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    for (int c = 0; c < dim; ++c) {
      const std::size_t cc = static_cast<std::size_t>(c);
      out[cc] = h00 * y[lo][cc] + h10 * h * dy[lo][cc] + h01 * y[hi][cc] + h11 * h * dy[hi][cc];
    }
  }
};

namespace detail_ode {

inline double error_norm(std::span<const double> err, std::span<const double> y0,
                         std::span<const double> y1, double rel_tol, double abs_tol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double scale = abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double e = err[i] / scale;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace detail_ode

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) and an A-stable
// adaptive implicit trapezoidal scheme for stiff problems. Supports
// integration in either time direction; nodes are stored ascending.
inline OracleSolution integrate_ode(const OdeRhs& rhs, std::vector<double> y0, double t0,
                                    double t1, const OdeOptions& opt = {}) {
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0)) throw OdeError("tolerances must be positive");
  if (t0 == t1) throw OdeError("empty integration span");
  const int n = static_cast<int>(y0.size());
  const std::size_t nz = y0.size();
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  OracleSolution sol;
  sol.dim = n;
  sol.rel_tol = opt.rel_tol;
  sol.abs_tol = opt.abs_tol;

  std::vector<double> f0(nz);
  rhs(t0, y0, f0);
  sol.t.push_back(t0);
  sol.y.push_back(y0);
  sol.dy.push_back(f0);

  double h = std::min(span / 100.0, opt.max_step);
  double t = t0;
  std::vector<double> y = y0;
  long steps = 0;

  auto push_node = [&](double tn, const std::vector<double>& yn, const std::vector<double>& fn) {
    sol.t.push_back(tn);
    sol.y.push_back(yn);
    sol.dy.push_back(fn);
  };

  if (opt.mode == OdeMode::rk45) {
    using namespace detail_ode;
    std::vector<double> k1 = f0, k2(nz), k3(nz), k4(nz), k5(nz), k6(nz), k7(nz), ytmp(nz),
        ynew(nz), err(nz);
    while (dir * (t1 - t) > 0.0) {
      if (++steps > opt.max_steps)
        throw OdeError("step budget exhausted; if the problem is stiff use the implicit mode");
      h = std::min(h, opt.max_step);
      if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
      const double hs = dir * h;
      if (std::abs(hs) <= std::abs(t) * 1e-15)
        throw OdeError("step size underflow at t = " + fmt17(t) +
                       "; if the problem is stiff use the implicit mode");

      for (std::size_t i = 0; i < nz; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
      rhs(t + c2 * hs, ytmp, k2);
      for (std::size_t i = 0; i < nz; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
      rhs(t + c3 * hs, ytmp, k3);
      for (std::size_t i = 0; i < nz; ++i)
        ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      rhs(t + c4 * hs, ytmp, k4);
      for (std::size_t i = 0; i < nz; ++i)
        ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs(t + c5 * hs, ytmp, k5);
      for (std::size_t i = 0; i < nz; ++i)
        ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      rhs(t + hs, ytmp, k6);
      for (std::size_t i = 0; i < nz; ++i)
        ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      rhs(t + hs, ynew, k7);
      for (std::size_t i = 0; i < nz; ++i)
        err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

      const double norm = detail_ode::error_norm(err, y, ynew, opt.rel_tol, opt.abs_tol);
      if (norm <= 1.0) {
        t += hs;
        y = ynew;
        k1 = k7;  // FSAL
        push_node(t, y, k1);
      }
      const double factor = 0.9 * std::pow(std::max(norm, 1e-10), -0.2);
      h *= std::clamp(factor, 0.2, 5.0);
    }
  } else {
    // implicit trapezoidal with step-doubling error control
    std::vector<double> fy(nz);
    auto newton_solve = [&](double tn, const std::vector<double>& yn,
                            const std::vector<double>& fn, double hstep,
                            std::vector<double>& out) {
      // solve g(z) = z - yn - h/2 (fn + f(tn + h, z)) = 0
      const double th = tn + hstep;
      Eigen::VectorXd z(n);
      std::vector<double> fz(nz), g(nz), ypred(nz);
      for (std::size_t i = 0; i < nz; ++i) z(static_cast<Eigen::Index>(i)) = yn[i] + hstep * fn[i];
      for (int it = 0; it < 12; ++it) {
        std::vector<double> zt(z.data(), z.data() + n);
        rhs(th, zt, fz);
        double gnorm = 0.0;
        for (std::size_t i = 0; i < nz; ++i) {
          g[i] = zt[i] - yn[i] - 0.5 * hstep * (fn[i] + fz[i]);
          gnorm = std::max(gnorm, std::abs(g[i]) / (opt.abs_tol + opt.rel_tol * std::abs(zt[i])));
        }
        if (gnorm < 1e-3) {
          out = zt;
          return true;
        }
        // numerical Jacobian of f at z
        Eigen::MatrixXd jac(n, n);
        std::vector<double> f2(nz);
        for (int c = 0; c < n; ++c) {
          const std::size_t cc = static_cast<std::size_t>(c);
          const double save = zt[cc];
          const double dz = 1e-8 * std::max(1.0, std::abs(save));
          zt[cc] = save + dz;
          rhs(th, zt, f2);
          zt[cc] = save;
          for (int r = 0; r < n; ++r)
            jac(r, c) = (f2[static_cast<std::size_t>(r)] - fz[static_cast<std::size_t>(r)]) / dz;
        }
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - 0.5 * hstep * jac;
        Eigen::VectorXd gv(n);
        for (std::size_t i = 0; i < nz; ++i) gv(static_cast<Eigen::Index>(i)) = g[i];
        z -= m.partialPivLu().solve(gv);
      }
      return false;
    };

    std::vector<double> fn = f0, yfull(nz), yhalf(nz), ymid(nz), fmid(nz), err(nz);
    while (dir * (t1 - t) > 0.0) {
      if (++steps > opt.max_steps) throw OdeError("implicit step budget exhausted");
      h = std::min(h, opt.max_step);
      if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
      const double hs = dir * h;
      if (std::abs(hs) <= std::abs(t) * 1e-15)
        throw OdeError("implicit step size underflow at t = " + fmt17(t));

      bool ok = newton_solve(t, y, fn, hs, yfull);
      if (ok) ok = newton_solve(t, y, fn, 0.5 * hs, ymid);
      if (ok) {
        rhs(t + 0.5 * hs, ymid, fmid);
        ok = newton_solve(t + 0.5 * hs, ymid, fmid, 0.5 * hs, yhalf);
      }
      if (!ok) {
        h *= 0.25;
        continue;
      }
      for (std::size_t i = 0; i < nz; ++i) err[i] = (yhalf[i] - yfull[i]) / 3.0;
      const double norm = detail_ode::error_norm(err, y, yhalf, opt.rel_tol, opt.abs_tol);
      if (norm <= 1.0) {
        t += hs;
        y = yhalf;
        rhs(t, y, fn);
        push_node(t, y, fn);
      }
      const double factor = 0.9 * std::pow(std::max(norm, 1e-10), -1.0 / 3.0);
      h *= std::clamp(factor, 0.2, 4.0);
    }
  }

  if (dir < 0.0) {
    std::reverse(sol.t.begin(), sol.t.end());
    std::reverse(sol.y.begin(), sol.y.end());
    std::reverse(sol.dy.begin(), sol.dy.end());
  }
  return sol;
}

}  // namespace gluenn
