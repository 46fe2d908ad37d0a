#include "psyscale/stimuli/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "psyscale/error.hpp"
#include "psyscale/kernels/separable.hpp"

namespace psyscale {

GrayImage to_grayscale(const RgbImage& rgb) {
  if (!rgb.red.same_shape(rgb.green) || !rgb.red.same_shape(rgb.blue)) {
    throw Error(ErrorCode::MalformedImage, "RGB channel planes differ in size");
  }
  std::vector<double> out(rgb.red.size());
  const auto r = rgb.red.pixels();
  const auto g = rgb.green.pixels();
  const auto b = rgb.blue.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp((r[i] + g[i] + b[i]) / 3.0, 0.0, 1.0);
  }
  return GrayImage(rgb.red.width(), rgb.red.height(), std::move(out));
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidParameter, "blur sigma must be > 0");
  }
  const auto taps = kernels::gaussian_taps(sigma);
  auto out = kernels::parallel::separable_convolve(img.pixels(), img.width(), img.height(), taps);
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage alpha_blend(const GrayImage& a, const GrayImage& b, double alpha) {
  if (!a.same_shape(b)) throw Error(ErrorCode::MalformedImage, "blend inputs differ in size");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "alpha must lie in [0,1]");
  }
  if (alpha == 0.0) return a;
  if (alpha == 1.0) return b;
  std::vector<double> out(a.size());
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(pa[i] * (1.0 - alpha) + pb[i] * alpha, 0.0, 1.0);
  }
  return GrayImage(a.width(), a.height(), std::move(out));
}

GrayImage preprocess(const RgbImage& rgb, double sigma) {
  return gaussian_blur(to_grayscale(rgb), sigma);
}

}  // namespace psyscale
