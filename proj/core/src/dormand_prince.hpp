// Copyright 2026 The reigate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dormand-Prince 5(4) with FSAL, error per component measured against
// kLocalShare * (abs_tol + rel_tol * max(|y|, |y_new|)) in the max norm.
// Local errors add up over thousands of steps; a tenth of the nominal
// tolerance per step keeps the global error within ~10x the tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "reigate/common.hpp"
#include "reigate/lindblad.hpp"

namespace reigate::detail {

inline constexpr double kLocalShare = 0.1;

using Batch = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct NoObserver {
  void operator()(double, const Batch&) const {}
};

class DormandPrince {
 public:
  explicit DormandPrince(const IntegratorSettings& s) : s_(s) {}

  /// Integrates y from t0 to t1 in place. Returns the last accepted step so a
  /// caller may reuse it as a hint.
  template <class Rhs, class Observer = NoObserver>
  double integrate(Rhs&& rhs, double t0, double t1, Batch& y, IntegrationStats& stats,
                   double h_hint = 0.0, Observer&& observe = {}) const {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double span = t1 - t0;
    if (!(span > 0.0)) return h_hint;
    const double h_max = s_.max_step_us > 0.0 ? std::min(s_.max_step_us, span) : span;

    const auto rows = y.rows();
    const auto cols = y.cols();
    Batch k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols), k5(rows, cols),
        k6(rows, cols), k7(rows, cols), tmp(rows, cols), ynew(rows, cols);

    double t = t0;
    rhs(t, y, k1);
    ++stats.rhs_evaluations;

    double h = h_hint > 0.0 ? std::min(h_hint, h_max) : initial_step(rhs, t, y, k1, h_max, stats);
    bool last_rejected = false;

    while (t < t1) {
      if (stats.accepted + stats.rejected >= s_.max_steps) {
        throw IntegrationError("integrator: maximum step count exceeded");
      }
      bool final_step = false;
      if (t + h >= t1 || t + 1.01 * h >= t1) {
        h = t1 - t;
        final_step = true;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        throw IntegrationError("integrator: step size underflow");
      }

      tmp = y + (h * a21) * k1;
      rhs(t + c2 * h, tmp, k2);
      tmp = y + h * (a31 * k1 + a32 * k2);
      rhs(t + c3 * h, tmp, k3);
      tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs(t + c4 * h, tmp, k4);
      tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs(t + c5 * h, tmp, k5);
      tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs(t + h, tmp, k6);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double t_new = final_step ? t1 : t + h;
      rhs(t_new, ynew, k7);
      stats.rhs_evaluations += 6;

      // tmp <- local error estimate
      tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double err = error_norm(tmp, y, ynew);

      if (err <= 1.0) {
        ++stats.accepted;
        t = t_new;
        y.swap(ynew);
        k1.swap(k7);
        observe(t, y);
        double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 5.0);
        if (!final_step) h = std::min(h * factor, h_max);
        last_rejected = false;
      } else {
        ++stats.rejected;
        const double factor = std::max(0.2, 0.9 * std::pow(err, -0.2));
        h *= factor;
        last_rejected = true;
      }
    }
    return h;
  }

 private:
  static double sq(const Complex& z) { return z.real() * z.real() + z.imag() * z.imag(); }

  double error_norm(const Batch& e, const Batch& y0, const Batch& y1) const {
    double worst = 0.0;
    const Complex* pe = e.data();
    const Complex* p0 = y0.data();
    const Complex* p1 = y1.data();
    const auto n = e.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double big = std::sqrt(std::max(sq(p0[i]), sq(p1[i])));
      const double scale = kLocalShare * (s_.abs_tol + s_.rel_tol * big);
      worst = std::max(worst, sq(pe[i]) / (scale * scale));
    }
    return std::sqrt(worst);
  }

  template <class Rhs>
  double initial_step(Rhs& rhs, double t, const Batch& y, const Batch& f0, double h_max,
                      IntegrationStats& stats) const {
    auto scaled = [&](const Batch& v) {
      double m = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        m = std::max(m, std::abs(v.data()[i]) /
                            (s_.abs_tol + s_.rel_tol * std::abs(y.data()[i])));
      }
      return m;
    };
    const double d0 = scaled(y);
    const double d1 = scaled(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, h_max);
    Batch y1 = y + h0 * f0;
    Batch f1(y.rows(), y.cols());
    rhs(t + h0, y1, f1);
    ++stats.rhs_evaluations;
    const double d2 = scaled(f1 - f0) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, h_max});
  }

  IntegratorSettings s_;
};

}  // namespace reigate::detail
