#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace psyscale::kernels {

/// Complex Gabor kernel K(u) = envelope(u) * exp(i k.u), with its complex mean
/// removed (so every real phase kernel Re(exp(i phi) K) is DC-free) and
/// normalized to unit L2 norm. Taps are row-major over (2r+1) x (2r+1).
struct ComplexKernel {
  int radius = 0;
  std::vector<std::complex<double>> taps;

  std::complex<double> at(int du, int dv) const {
    const int side = 2 * radius + 1;
    return taps[static_cast<std::size_t>((dv + radius) * side + (du + radius))];
  }
};

/// Builds the kernel for one (orientation, wavelength). `envelope_ratio` is the
/// envelope sigma as a fraction of the wavelength; `aspect_ratio` gamma scales
/// the cross-orientation axis as in exp(-(x'^2 + gamma^2 y'^2) / (2 s^2)).
/// The radius is ceil(3 * s / min(gamma, 1)).
ComplexKernel make_gabor_kernel(double orientation, double wavelength, double envelope_ratio,
                                double aspect_ratio);

/// Per-pixel quadrature energy sqrt(sum_phi (I * Re(exp(i phi) K))^2) for one
/// kernel, row-major, same size as the image. Borders use edge replication.

namespace serial {
/// Direct spatial convolution, one phase kernel at a time. Reference path.
std::vector<double> gabor_energy(std::span<const double> pixels, std::size_t width,
                                 std::size_t height, const ComplexKernel& kernel,
                                 std::span<const double> phases);
}  // namespace serial

namespace parallel {

/// FFT convolution over an edge-replicated pad, one complex convolution per
/// kernel, with kernels processed in parallel. Kernel spectra are computed once
/// per bank for a fixed image size.
class GaborEnergyBank {
 public:
  GaborEnergyBank(std::vector<ComplexKernel> kernels, std::size_t width, std::size_t height);
  ~GaborEnergyBank();
  GaborEnergyBank(const GaborEnergyBank&) = delete;
  GaborEnergyBank& operator=(const GaborEnergyBank&) = delete;
  GaborEnergyBank(GaborEnergyBank&&) noexcept;
  GaborEnergyBank& operator=(GaborEnergyBank&&) noexcept;

  std::size_t width() const;
  std::size_t height() const;
  std::size_t size() const;

  /// Energy maps, one per kernel in construction order.
  std::vector<std::vector<double>> energy(std::span<const double> pixels,
                                          std::span<const double> phases) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace parallel

}  // namespace psyscale::kernels
