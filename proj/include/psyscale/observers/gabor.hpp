#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "psyscale/json.hpp"
#include "psyscale/kernels/gabor_energy.hpp"
#include "psyscale/stimuli/image.hpp"

namespace psyscale {

struct GaborBankConfig {
  std::vector<double> orientations;  // radians; 0 responds to vertical gratings
  std::vector<double> wavelengths;   // pixels
  std::vector<double> phase_offsets;  // radians
  double envelope_ratio = 0.56;
  double aspect_ratio = 0.5;
  std::size_t pool_rows = 8;
  std::size_t pool_cols = 8;

  /// 4 orientations x wavelengths {4, 8, 16} x quadrature phases, 8x8 pooling.
  static GaborBankConfig defaults();

  /// Throws InvalidParameter on empty lists, non-positive wavelengths or
  /// ratios, or a zero pooling grid.
  void validate() const;
  std::size_t dim() const {
    return wavelengths.size() * orientations.size() * pool_rows * pool_cols;
  }
  /// Kernels in feature order: wavelength-major, orientation-minor.
  std::vector<kernels::ComplexKernel> make_kernels() const;
  int max_radius() const;
};

Json to_json(const GaborBankConfig& config);
GaborBankConfig gabor_config_from_json(const Json& j);

/// Quadrature-energy features average-pooled onto the configured grid. Pool
/// cell (r, c) covers rows [floor(r H / R), floor((r+1) H / R)) and likewise
/// for columns. Kernel spectra are cached per image size, so one extractor
/// should be reused across images. Thread-safe.
class GaborFeatureExtractor {
 public:
  explicit GaborFeatureExtractor(GaborBankConfig config = GaborBankConfig::defaults());

  const GaborBankConfig& config() const { return config_; }

  /// Throws InvalidParameter if the image is smaller than the largest kernel
  /// footprint (2 r + 1) or than the pooling grid.
  std::vector<double> features(const GrayImage& img) const;

 private:
  const kernels::parallel::GaborEnergyBank& bank_for(std::size_t width, std::size_t height) const;

  GaborBankConfig config_;
  std::vector<kernels::ComplexKernel> kernels_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::size_t, std::size_t>,
                   std::unique_ptr<kernels::parallel::GaborEnergyBank>>
      banks_;
};

/// One-shot convenience wrapper around GaborFeatureExtractor.
std::vector<double> gabor_features(const GrayImage& img,
                                   const GaborBankConfig& config = GaborBankConfig::defaults());

}  // namespace psyscale
