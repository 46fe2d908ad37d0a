#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psyscale::kernels {

/// Sampled Gaussian truncated at radius ceil(3 sigma), normalized to sum 1.
/// Returns 2r+1 taps, centre at index r.
std::vector<double> gaussian_taps(double sigma);

// Separable 2-D convolution (horizontal pass, then vertical) with edge
// replication at the borders. Both variants perform identical arithmetic in
// identical order per output pixel, so their results are bit-identical.

namespace serial {
std::vector<double> separable_convolve(std::span<const double> pixels, std::size_t width,
                                       std::size_t height, std::span<const double> taps);
}  // namespace serial

namespace parallel {
std::vector<double> separable_convolve(std::span<const double> pixels, std::size_t width,
                                       std::size_t height, std::span<const double> taps);
}  // namespace parallel

}  // namespace psyscale::kernels
