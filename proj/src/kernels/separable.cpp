#include "psyscale/kernels/separable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace psyscale::kernels {

namespace {

inline std::ptrdiff_t clamp_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

inline void horizontal_row(const double* src, double* dst, std::ptrdiff_t width,
                           std::span<const double> taps) {
  const auto r = static_cast<std::ptrdiff_t>(taps.size() / 2);
  for (std::ptrdiff_t x = 0; x < width; ++x) {
    double acc = 0.0;
    for (std::ptrdiff_t t = -r; t <= r; ++t) {
      acc += taps[static_cast<std::size_t>(t + r)] * src[clamp_index(x + t, width)];
    }
    dst[x] = acc;
  }
}

inline void vertical_row(const double* src, double* dst, std::ptrdiff_t y, std::ptrdiff_t width,
                         std::ptrdiff_t height, std::span<const double> taps) {
  const auto r = static_cast<std::ptrdiff_t>(taps.size() / 2);
  for (std::ptrdiff_t x = 0; x < width; ++x) {
    double acc = 0.0;
    for (std::ptrdiff_t t = -r; t <= r; ++t) {
      acc += taps[static_cast<std::size_t>(t + r)] * src[clamp_index(y + t, height) * width + x];
    }
    dst[y * width + x] = acc;
  }
}

}  // namespace

std::vector<double> gaussian_taps(double sigma) {
  const auto r = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
  double total = 0.0;
  for (std::ptrdiff_t t = -r; t <= r; ++t) {
    const double w = std::exp(-0.5 * static_cast<double>(t * t) / (sigma * sigma));
    taps[static_cast<std::size_t>(t + r)] = w;
    total += w;
  }
  for (auto& w : taps) w /= total;
  return taps;
}

namespace serial {

std::vector<double> separable_convolve(std::span<const double> pixels, std::size_t width,
                                       std::size_t height, std::span<const double> taps) {
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  std::vector<double> tmp(pixels.size());
  std::vector<double> out(pixels.size());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    horizontal_row(pixels.data() + y * w, tmp.data() + y * w, w, taps);
  }
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    vertical_row(tmp.data(), out.data(), y, w, h, taps);
  }
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> separable_convolve(std::span<const double> pixels, std::size_t width,
                                       std::size_t height, std::span<const double> taps) {
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  std::vector<double> tmp(pixels.size());
  std::vector<double> out(pixels.size());
  const double* src = pixels.data();
  double* mid = tmp.data();
  double* dst = out.data();
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      horizontal_row(src + y * w, mid + y * w, w, taps);
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      vertical_row(mid, dst, y, w, h, taps);
    }
  }
  return out;
}

}  // namespace parallel

}  // namespace psyscale::kernels
