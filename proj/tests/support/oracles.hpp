// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Independent reference implementations used only as test oracles. These are
// deliberately written in the most literal form possible and must not share
// code with the library paths they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace testsupport {

// Definitional O(N^4) DCT-II with JPEG normalization:
//   F(u,v) = 1/4 C(u) C(v) sum_x sum_y f(x,y) cos((2x+1)u pi/16) cos((2y+1)v pi/16)
inline std::array<double, 64> dct_reference(const std::array<double, 64>& f) {
  const double pi = std::acos(-1.0);
  std::array<double, 64> F{};
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double acc = 0;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          acc += f[y * 8 + x] * std::cos((2 * x + 1) * u * pi / 16.0) *
                 std::cos((2 * y + 1) * v * pi / 16.0);
      const double cu = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      const double cv = v == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      F[v * 8 + u] = 0.25 * cu * cv * acc;
    }
  return F;
}

inline std::array<double, 64> idct_reference(const std::array<double, 64>& F) {
  const double pi = std::acos(-1.0);
  std::array<double, 64> f{};
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double acc = 0;
      for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
          const double cu = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
          const double cv = v == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
          acc += cu * cv * F[v * 8 + u] * std::cos((2 * x + 1) * u * pi / 16.0) *
                 std::cos((2 * y + 1) * v * pi / 16.0);
        }
      f[y * 8 + x] = 0.25 * acc;
    }
  return f;
}

// Brute-force separable median: horizontal pass over the input, then a
// vertical pass over the intermediate, replicated borders, recomputed from
// scratch at every pixel.
inline std::vector<std::uint8_t> separable_median_reference(
    const std::vector<std::uint8_t>& in, int w, int h, int window) {
  const int r = window / 2;
  auto clampi = [](int v, int lo, int hi) { return std::min(std::max(v, lo), hi); };
  std::vector<std::uint8_t> horiz(in.size()), out(in.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::vector<std::uint8_t> vals;
      for (int d = -r; d <= r; ++d)
        vals.push_back(in[static_cast<std::size_t>(y) * w + clampi(x + d, 0, w - 1)]);
      std::sort(vals.begin(), vals.end());
      horiz[static_cast<std::size_t>(y) * w + x] = vals[vals.size() / 2];
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::vector<std::uint8_t> vals;
      for (int d = -r; d <= r; ++d)
        vals.push_back(horiz[static_cast<std::size_t>(clampi(y + d, 0, h - 1)) * w + x]);
      std::sort(vals.begin(), vals.end());
      out[static_cast<std::size_t>(y) * w + x] = vals[vals.size() / 2];
    }
  return out;
}

// Closed-form symmetric 3x3 eigensolve via the characteristic polynomial
// (trigonometric form for the depressed cubic). Returns eigenvalues sorted
// descending with matching unit eigenvectors.
struct Eigen3 {
  std::array<double, 3> values;
  std::array<std::array<double, 3>, 3> vectors;  // vectors[k] pairs values[k]
};

inline Eigen3 eigen3_reference(const std::array<std::array<double, 3>, 3>& m) {
  const double a = m[0][0], b = m[1][1], c = m[2][2];
  const double d = m[0][1], e = m[1][2], f = m[0][2];
  // char poly: -l^3 + tr l^2 - m2 l + det = 0
  const double tr = a + b + c;
  const double m2 = a * b + b * c + a * c - d * d - e * e - f * f;
  const double det = a * (b * c - e * e) - d * (d * c - e * f) + f * (d * e - b * f);

  // depressed cubic t^3 + pt + q with l = t + tr/3
  const double p = m2 - tr * tr / 3.0;
  const double q = -2.0 * tr * tr * tr / 27.0 + tr * m2 / 3.0 - det;
  std::array<double, 3> lambda{};
  if (p > -1e-30) {  // p <= 0 for symmetric input; near-zero means triple root
    lambda = {tr / 3.0, tr / 3.0, tr / 3.0};
  } else {
    const double sp = std::sqrt(-4.0 * p / 3.0);
    double arg = 3.0 * q / (p * sp);
    arg = std::clamp(arg, -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    const double pi = std::acos(-1.0);
    for (int k = 0; k < 3; ++k)
      lambda[k] = tr / 3.0 + sp * std::cos(phi - 2.0 * pi * k / 3.0);
  }
  std::sort(lambda.begin(), lambda.end(), std::greater<>());

  Eigen3 out;
  out.values = lambda;
  for (int k = 0; k < 3; ++k) {
    // Null-space of (M - lambda I) via cross products of its rows.
    const double l = lambda[k];
    std::array<std::array<double, 3>, 3> r = {{{a - l, d, f}, {d, b - l, e}, {f, e, c - l}}};
    auto cross = [](const std::array<double, 3>& u, const std::array<double, 3>& v) {
      return std::array<double, 3>{u[1] * v[2] - u[2] * v[1],
                                   u[2] * v[0] - u[0] * v[2],
                                   u[0] * v[1] - u[1] * v[0]};
    };
    std::array<std::array<double, 3>, 3> cands = {cross(r[0], r[1]), cross(r[0], r[2]),
                                                  cross(r[1], r[2])};
    std::array<double, 3> best{};
    double best_norm = -1;
    for (const auto& cand : cands) {
      const double n = cand[0] * cand[0] + cand[1] * cand[1] + cand[2] * cand[2];
      if (n > best_norm) {
        best_norm = n;
        best = cand;
      }
    }
    if (best_norm < 1e-30) {
      // repeated eigenvalue; pick an axis orthogonal to already-found vectors
      best = {k == 0 ? 1.0 : 0.0, k == 1 ? 1.0 : 0.0, k == 2 ? 1.0 : 0.0};
      best_norm = 1.0;
    }
    const double n = std::sqrt(best_norm);
    for (int i = 0; i < 3; ++i) out.vectors[k][i] = best[i] / n;
  }
  return out;
}

}  // namespace testsupport
