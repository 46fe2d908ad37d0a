#include "psyscale/kernels/gabor_energy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "psyscale/error.hpp"

namespace psyscale::kernels {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer allocate(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

inline std::ptrdiff_t clamp_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

}  // namespace

ComplexKernel make_gabor_kernel(double orientation, double wavelength, double envelope_ratio,
                                double aspect_ratio) {
  if (!(wavelength > 0.0) || !(envelope_ratio > 0.0) || !(aspect_ratio > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "Gabor wavelength, envelope and aspect must be > 0");
  }
  const double s = envelope_ratio * wavelength;
  const double k = 2.0 * std::numbers::pi / wavelength;
  const double c = std::cos(orientation);
  const double sn = std::sin(orientation);
  ComplexKernel kernel;
  kernel.radius = static_cast<int>(std::ceil(3.0 * s / std::min(aspect_ratio, 1.0)));
  const int side = 2 * kernel.radius + 1;
  kernel.taps.resize(static_cast<std::size_t>(side * side));

  std::complex<double> mean = 0.0;
  for (int dv = -kernel.radius; dv <= kernel.radius; ++dv) {
    for (int du = -kernel.radius; du <= kernel.radius; ++du) {
      const double xr = du * c + dv * sn;
      const double yr = -du * sn + dv * c;
      const double env = std::exp(-(xr * xr + aspect_ratio * aspect_ratio * yr * yr) / (2.0 * s * s));
      const auto value = env * std::polar(1.0, k * xr);
      kernel.taps[static_cast<std::size_t>((dv + kernel.radius) * side + (du + kernel.radius))] = value;
      mean += value;
    }
  }
  mean /= static_cast<double>(kernel.taps.size());
  double norm2 = 0.0;
  for (auto& t : kernel.taps) {
    t -= mean;
    norm2 += std::norm(t);
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& t : kernel.taps) t *= scale;
  return kernel;
}

namespace serial {

std::vector<double> gabor_energy(std::span<const double> pixels, std::size_t width,
                                 std::size_t height, const ComplexKernel& kernel,
                                 std::span<const double> phases) {
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  const int r = kernel.radius;
  std::vector<double> energy(pixels.size(), 0.0);
  std::vector<double> real_taps(kernel.taps.size());
  for (double phi : phases) {
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    for (std::size_t t = 0; t < kernel.taps.size(); ++t) {
      real_taps[t] = cp * kernel.taps[t].real() - sp * kernel.taps[t].imag();
    }
    const int side = 2 * r + 1;
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int dv = -r; dv <= r; ++dv) {
          const auto sy = clamp_index(y - dv, h);
          for (int du = -r; du <= r; ++du) {
            const auto sx = clamp_index(x - du, w);
            acc += pixels[static_cast<std::size_t>(sy * w + sx)] *
                   real_taps[static_cast<std::size_t>((dv + r) * side + (du + r))];
          }
        }
        energy[static_cast<std::size_t>(y * w + x)] += acc * acc;
      }
    }
  }
  for (auto& e : energy) e = std::sqrt(e);
  return energy;
}

}  // namespace serial

namespace parallel {

namespace {

// Smallest n' >= n with no prime factor above 7; FFTW is slow on large primes.
std::size_t fft_friendly(std::size_t n) {
  for (;; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

}  // namespace

struct GaborEnergyBank::Impl {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t pad = 0;
  std::size_t padded_width = 0;
  std::size_t padded_height = 0;
  std::vector<FftwBuffer> spectra;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  std::size_t padded_size() const { return padded_width * padded_height; }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }
};

GaborEnergyBank::GaborEnergyBank(std::vector<ComplexKernel> kernels, std::size_t width,
                                 std::size_t height)
    : impl_(std::make_unique<Impl>()) {
  if (kernels.empty()) throw Error(ErrorCode::InvalidParameter, "empty Gabor bank");
  auto& s = *impl_;
  s.width = width;
  s.height = height;
  for (const auto& k : kernels) s.pad = std::max(s.pad, static_cast<std::size_t>(k.radius));
  // Any extra margin beyond the kernel radius is edge-replicated like the rest.
  s.padded_width = fft_friendly(width + 2 * s.pad);
  s.padded_height = fft_friendly(height + 2 * s.pad);
  const std::size_t n = s.padded_size();

  auto in = allocate(n);
  auto out = allocate(n);
  {
    std::lock_guard lock(planner_mutex());
    s.forward = fftw_plan_dft_2d(static_cast<int>(s.padded_height), static_cast<int>(s.padded_width),
                                 in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_2d(static_cast<int>(s.padded_height), static_cast<int>(s.padded_width),
                                  in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  const auto ph = static_cast<std::ptrdiff_t>(s.padded_height);
  const auto pw = static_cast<std::ptrdiff_t>(s.padded_width);
  for (const auto& k : kernels) {
    std::fill_n(&in[0][0], 2 * n, 0.0);
    for (int dv = -k.radius; dv <= k.radius; ++dv) {
      for (int du = -k.radius; du <= k.radius; ++du) {
        const auto row = (dv % ph + ph) % ph;
        const auto col = (du % pw + pw) % pw;
        const auto tap = k.at(du, dv);
        in[row * pw + col][0] = tap.real();
        in[row * pw + col][1] = tap.imag();
      }
    }
    auto spectrum = allocate(n);
    fftw_execute_dft(s.forward, in.get(), spectrum.get());
    s.spectra.push_back(std::move(spectrum));
  }
}

GaborEnergyBank::~GaborEnergyBank() = default;
GaborEnergyBank::GaborEnergyBank(GaborEnergyBank&&) noexcept = default;
GaborEnergyBank& GaborEnergyBank::operator=(GaborEnergyBank&&) noexcept = default;

std::size_t GaborEnergyBank::width() const { return impl_->width; }
std::size_t GaborEnergyBank::height() const { return impl_->height; }
std::size_t GaborEnergyBank::size() const { return impl_->spectra.size(); }

std::vector<std::vector<double>> GaborEnergyBank::energy(std::span<const double> pixels,
                                                         std::span<const double> phases) const {
  const auto& s = *impl_;
  if (pixels.size() != s.width * s.height) {
    throw Error(ErrorCode::MalformedImage, "image size does not match the Gabor bank");
  }
  const std::size_t n = s.padded_size();
  const auto w = static_cast<std::ptrdiff_t>(s.width);
  const auto h = static_cast<std::ptrdiff_t>(s.height);
  const auto pad = static_cast<std::ptrdiff_t>(s.pad);
  const auto pw = static_cast<std::ptrdiff_t>(s.padded_width);
  const auto ph = static_cast<std::ptrdiff_t>(s.padded_height);

  auto padded = allocate(n);
  for (std::ptrdiff_t py = 0; py < ph; ++py) {
    const auto sy = clamp_index(py - pad, h);
    for (std::ptrdiff_t px = 0; px < pw; ++px) {
      padded[py * pw + px][0] = pixels[static_cast<std::size_t>(sy * w + clamp_index(px - pad, w))];
      padded[py * pw + px][1] = 0.0;
    }
  }
  auto image_spectrum = allocate(n);
  fftw_execute_dft(s.forward, padded.get(), image_spectrum.get());

  std::vector<double> cos_phi(phases.size());
  std::vector<double> sin_phi(phases.size());
  for (std::size_t p = 0; p < phases.size(); ++p) {
    cos_phi[p] = std::cos(phases[p]);
    sin_phi[p] = std::sin(phases[p]);
  }

  const auto n_kernels = static_cast<std::ptrdiff_t>(s.spectra.size());
  std::vector<std::vector<double>> maps(s.spectra.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  const fftw_complex* image_hat = image_spectrum.get();

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t kidx = 0; kidx < n_kernels; ++kidx) {
    auto product = allocate(n);
    auto response = allocate(n);
    const fftw_complex* kernel_hat = s.spectra[static_cast<std::size_t>(kidx)].get();
    for (std::size_t t = 0; t < n; ++t) {
      const double ar = image_hat[t][0];
      const double ai = image_hat[t][1];
      const double br = kernel_hat[t][0];
      const double bi = kernel_hat[t][1];
      product[t][0] = ar * br - ai * bi;
      product[t][1] = ar * bi + ai * br;
    }
    fftw_execute_dft(s.backward, product.get(), response.get());

    std::vector<double> map(s.width * s.height);
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        const auto idx = (y + pad) * pw + (x + pad);
        const double re = response[idx][0] * inv_n;
        const double im = response[idx][1] * inv_n;
        double e = 0.0;
        for (std::size_t p = 0; p < cos_phi.size(); ++p) {
          const double v = cos_phi[p] * re - sin_phi[p] * im;
          e += v * v;
        }
        map[static_cast<std::size_t>(y * w + x)] = std::sqrt(e);
      }
    }
    maps[static_cast<std::size_t>(kidx)] = std::move(map);
  }
  return maps;
}

}  // namespace parallel

}  // namespace psyscale::kernels
