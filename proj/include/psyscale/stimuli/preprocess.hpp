#pragma once

#include "psyscale/stimuli/image.hpp"

namespace psyscale {

inline constexpr double kDefaultBlurSigma = 3.0;

/// (R + G + B) / 3 per pixel. Throws MalformedImage on mismatched planes.
GrayImage to_grayscale(const RgbImage& rgb);

/// Separable Gaussian blur, radius ceil(3 sigma), edge replication. Throws
/// InvalidParameter for sigma <= 0.
GrayImage gaussian_blur(const GrayImage& img, double sigma = kDefaultBlurSigma);

/// a (1 - alpha) + b alpha. alpha == 0 and alpha == 1 return the respective
/// input bit-exactly. Throws MalformedImage on a size mismatch and
/// InvalidParameter for alpha outside [0, 1].
GrayImage alpha_blend(const GrayImage& a, const GrayImage& b, double alpha);

/// The fixed preprocessing order: grayscale, then blur.
GrayImage preprocess(const RgbImage& rgb, double sigma = kDefaultBlurSigma);

}  // namespace psyscale
