// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Manipulated-region localization. Four deterministic per-pixel analyses,
// each producing a heatmap, plus an Otsu-threshold verdict that turns a
// heatmap into a suspicious-region mask and a ratio score.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "imgtrace/codec.hpp"
#include "imgtrace/errors.hpp"

namespace imgtrace::analysis {

struct Heatmap {
  enum class Norm { Raw, MinMax };
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, non-negative
  Norm normalization = Norm::Raw;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

  double mean() const {
    if (values.empty()) return 0.0;
    double sum = 0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
};

struct RegionVerdict {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> suspicious_mask;  // Otsu mask of the heatmap
  double score = 0.0;
  double threshold_used = 0.0;
};

// BT.601 luminance as an 8-bit plane, same weights the codec uses.
inline codec::Plane luminance_plane(const codec::PixelImage& img) {
  if (img.color_space == codec::ColorSpace::Grayscale) return img.planes[0];
  codec::Plane out{img.width, img.height,
                   std::vector<std::uint8_t>(
                       static_cast<std::size_t>(img.width) * img.height)};
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double v = 0.299 * img.planes[0].at(x, y) +
                       0.587 * img.planes[1].at(x, y) +
                       0.114 * img.planes[2].at(x, y);
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Error Level Analysis

inline Heatmap ela(const codec::PixelImage& img, int quality = 95,
                   double amplification = 20.0) {
  if (quality < 1 || quality > 100 || amplification <= 0)
    raise(Errc::InvalidArgument, "ela parameters out of range");
  codec::EncodeParams params;
  params.quality = quality;
  params.subsampling = codec::Subsampling::S444;
  const auto recompressed = codec::decode(codec::encode(img, params));

  Heatmap h;
  h.width = img.width;
  h.height = img.height;
  h.values.resize(static_cast<std::size_t>(img.width) * img.height);
  const std::size_t channels = img.planes.size();
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0;
      for (std::size_t c = 0; c < channels; ++c)
        acc += std::abs(static_cast<double>(img.planes[c].at(x, y)) -
                        static_cast<double>(recompressed.planes[c].at(x, y)));
      h.at(x, y) = std::min(255.0, amplification * acc / static_cast<double>(channels));
    }
  return h;
}

// ---------------------------------------------------------------------------
// Noise analysis (separable median residual)

// Separable median: a horizontal pass of length `window` over the luminance,
// then a vertical pass over that result. Row-then-column order is normative;
// borders replicate.
inline codec::Plane separable_median(const codec::Plane& in, int window) {
  if (window < 3 || window % 2 == 0)
    raise(Errc::InvalidArgument, "median window must be an odd integer >= 3");
  if (window > in.width || window > in.height)
    raise(Errc::WindowTooLarge, "median window exceeds image dimension");
  const int r = window / 2;
  codec::Plane horiz = in, out = in;
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(window));
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      for (int d = -r; d <= r; ++d)
        buf[d + r] = in.at(std::clamp(x + d, 0, in.width - 1), y);
      std::nth_element(buf.begin(), buf.begin() + r, buf.end());
      horiz.at(x, y) = buf[r];
    }
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      for (int d = -r; d <= r; ++d)
        buf[d + r] = horiz.at(x, std::clamp(y + d, 0, in.height - 1));
      std::nth_element(buf.begin(), buf.begin() + r, buf.end());
      out.at(x, y) = buf[r];
    }
  return out;
}

inline Heatmap noise_analysis(const codec::PixelImage& img, int window = 3) {
  const codec::Plane lum = luminance_plane(img);
  const codec::Plane filtered = separable_median(lum, window);
  Heatmap h;
  h.width = img.width;
  h.height = img.height;
  h.values.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      h.at(x, y) = std::abs(static_cast<double>(lum.at(x, y)) -
                            static_cast<double>(filtered.at(x, y)));
  return h;
}

// ---------------------------------------------------------------------------
// Luminance gradient

inline Heatmap luminance_gradient(const codec::PixelImage& img) {
  const codec::Plane lum = luminance_plane(img);
  Heatmap h;
  h.width = img.width;
  h.height = img.height;
  h.values.resize(static_cast<std::size_t>(img.width) * img.height);
  auto l = [&](int x, int y) { return static_cast<double>(lum.at(x, y)); };
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double gx, gy;
      if (img.width == 1)
        gx = 0;
      else if (x == 0)
        gx = l(1, y) - l(0, y);
      else if (x == img.width - 1)
        gx = l(x, y) - l(x - 1, y);
      else
        gx = (l(x + 1, y) - l(x - 1, y)) / 2.0;
      if (img.height == 1)
        gy = 0;
      else if (y == 0)
        gy = l(x, 1) - l(x, 0);
      else if (y == img.height - 1)
        gy = l(x, y) - l(x, y - 1);
      else
        gy = (l(x, y + 1) - l(x, y - 1)) / 2.0;
      h.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  return h;
}

// ---------------------------------------------------------------------------
// PCA projection

struct EigenDecomposition {
  std::array<double, 3> values{};                    // sorted descending
  std::array<std::array<double, 3>, 3> vectors{};    // vectors[k] <-> values[k]
};

// Cyclic Jacobi rotations; plenty for a symmetric 3x3.
inline EigenDecomposition jacobi_eigen3(std::array<std::array<double, 3>, 3> a,
                                        double tol = 1e-9) {
  std::array<std::array<double, 3>, 3> v = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < tol) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a[p][q]) < tol * 1e-3) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < 3; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (int i = 0; i < 3; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (int i = 0; i < 3; ++i) {
          const double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
  }
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a[i][i] > a[j][j]; });
  EigenDecomposition out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = a[order[k]][order[k]];
    for (int i = 0; i < 3; ++i) out.vectors[k][i] = v[i][order[k]];
  }
  return out;
}

// Mean and population covariance of the per-pixel RGB vectors.
inline void rgb_statistics(const codec::PixelImage& img, std::array<double, 3>& mean,
                           std::array<std::array<double, 3>, 3>& cov) {
  const double n = static_cast<double>(img.width) * img.height;
  mean = {0, 0, 0};
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) mean[c] += img.planes[c].at(x, y);
  for (int c = 0; c < 3; ++c) mean[c] /= n;
  for (auto& row : cov) row = {0, 0, 0};
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const std::array<double, 3> d = {img.planes[0].at(x, y) - mean[0],
                                       img.planes[1].at(x, y) - mean[1],
                                       img.planes[2].at(x, y) - mean[2]};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cov[i][j] += d[i] * d[j];
    }
  for (auto& row : cov)
    for (auto& cell : row) cell /= n;
}

inline Heatmap pca_projection(const codec::PixelImage& img, int component = 1) {
  if (img.color_space != codec::ColorSpace::Rgb || img.planes.size() != 3)
    raise(Errc::InvalidArgument, "pca_projection expects an RGB image");
  if (component < 1 || component > 3)
    raise(Errc::InvalidArgument, "component must be 1..3");

  std::array<double, 3> mean;
  std::array<std::array<double, 3>, 3> cov;
  rgb_statistics(img, mean, cov);
  const auto eig = jacobi_eigen3(cov);

  // Components beyond the covariance rank carry no signal.
  const double rank_eps = 1e-9 * std::max(1.0, eig.values[0]);
  if (eig.values[component - 1] <= rank_eps)
    raise(Errc::DegenerateCovariance,
          "component " + std::to_string(component) + " is beyond covariance rank");

  std::array<double, 3> axis = eig.vectors[component - 1];
  // Sign convention: the largest-magnitude loading is positive.
  int arg = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(axis[i]) > std::abs(axis[arg])) arg = i;
  if (axis[arg] < 0)
    for (auto& a : axis) a = -a;

  Heatmap h;
  h.width = img.width;
  h.height = img.height;
  h.normalization = Heatmap::Norm::MinMax;
  h.values.resize(static_cast<std::size_t>(img.width) * img.height);
  double lo = 1e300, hi = -1e300;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double proj = std::abs((img.planes[0].at(x, y) - mean[0]) * axis[0] +
                                   (img.planes[1].at(x, y) - mean[1]) * axis[1] +
                                   (img.planes[2].at(x, y) - mean[2]) * axis[2]);
      h.at(x, y) = proj;
      lo = std::min(lo, proj);
      hi = std::max(hi, proj);
    }
  if (hi > lo)
    for (auto& v : h.values) v = (v - lo) / (hi - lo);
  else
    for (auto& v : h.values) v = 0.0;
  return h;
}

// ---------------------------------------------------------------------------
// Verdict

// Otsu threshold over a 256-bin histogram of the heat values. Returns the
// value-domain threshold; a flat heatmap yields its single value (and an
// empty strict-greater mask).
inline double otsu_threshold(const Heatmap& h) {
  double lo = 1e300, hi = -1e300;
  for (double v : h.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (h.values.empty() || hi <= lo) return hi;
  std::array<std::size_t, 256> hist{};
  const double scale = 255.0 / (hi - lo);
  for (double v : h.values) {
    int bin = static_cast<int>((v - lo) * scale);
    hist[std::clamp(bin, 0, 255)]++;
  }
  const double total = static_cast<double>(h.values.size());
  double sum_all = 0;
  for (int i = 0; i < 256; ++i) sum_all += i * static_cast<double>(hist[i]);
  double w0 = 0, sum0 = 0, best = -1;
  int best_bin = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += static_cast<double>(hist[t]);
    if (w0 == 0) continue;
    const double w1 = total - w0;
    if (w1 == 0) break;
    sum0 += t * static_cast<double>(hist[t]);
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_bin = t;
    }
  }
  return lo + (best_bin + 0.5) / scale;
}

// Without a mask: unsupervised mode, score over the Otsu mask itself. With a
// mask (evaluation mode): score = mean heat inside / mean heat outside the
// given region, epsilon-guarded.
inline RegionVerdict verdict_from_heatmap(
    const Heatmap& h, std::optional<std::span<const std::uint8_t>> mask = std::nullopt) {
  constexpr double kEpsilon = 1e-6;
  if (mask && mask->size() != h.values.size())
    raise(Errc::DimensionMismatch, "evaluation mask does not match heatmap");

  RegionVerdict v;
  v.width = h.width;
  v.height = h.height;
  v.threshold_used = otsu_threshold(h);
  v.suspicious_mask.resize(h.values.size());
  for (std::size_t i = 0; i < h.values.size(); ++i)
    v.suspicious_mask[i] = h.values[i] > v.threshold_used ? 1 : 0;

  auto ratio = [&](auto inside) {
    double sum_in = 0, sum_out = 0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < h.values.size(); ++i) {
      if (inside(i)) {
        sum_in += h.values[i];
        ++n_in;
      } else {
        sum_out += h.values[i];
        ++n_out;
      }
    }
    const double mean_in = n_in ? sum_in / static_cast<double>(n_in) : 0.0;
    const double mean_out = n_out ? sum_out / static_cast<double>(n_out) : 0.0;
    return mean_in / std::max(mean_out, kEpsilon);
  };

  if (mask) {
    v.score = ratio([&](std::size_t i) { return (*mask)[i] != 0; });
  } else {
    v.score = ratio([&](std::size_t i) { return v.suspicious_mask[i] != 0; });
  }
  return v;
}

// 8-bit view of a heatmap for PNG/PNM export.
inline std::vector<std::uint8_t> heatmap_to_gray8(const Heatmap& h) {
  std::vector<std::uint8_t> out(h.values.size());
  const double scale = h.normalization == Heatmap::Norm::MinMax ? 255.0 : 1.0;
  for (std::size_t i = 0; i < h.values.size(); ++i)
    out[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(h.values[i] * scale), 0L, 255L));
  return out;
}

}  // namespace imgtrace::analysis
