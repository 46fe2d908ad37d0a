#include "psyscale/observers/gabor.hpp"

#include <algorithm>
#include <numbers>

#include "psyscale/error.hpp"

namespace psyscale {

GaborBankConfig GaborBankConfig::defaults() {
  GaborBankConfig c;
  const double pi = std::numbers::pi;
  c.orientations = {0.0, pi / 4, pi / 2, 3 * pi / 4};
  c.wavelengths = {4.0, 8.0, 16.0};
  c.phase_offsets = {0.0, pi / 2};
  return c;
}

void GaborBankConfig::validate() const {
  if (orientations.empty() || wavelengths.empty() || phase_offsets.empty()) {
    throw Error(ErrorCode::InvalidParameter, "Gabor bank lists must be non-empty");
  }
  for (double w : wavelengths) {
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidParameter, "wavelengths must be > 0");
  }
  if (!(envelope_ratio > 0.0) || !(aspect_ratio > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "envelope and aspect ratios must be > 0");
  }
  if (pool_rows == 0 || pool_cols == 0) {
    throw Error(ErrorCode::InvalidParameter, "pooling grid must be at least 1x1");
  }
}

std::vector<kernels::ComplexKernel> GaborBankConfig::make_kernels() const {
  validate();
  std::vector<kernels::ComplexKernel> out;
  for (double w : wavelengths) {
    for (double o : orientations) {
      out.push_back(kernels::make_gabor_kernel(o, w, envelope_ratio, aspect_ratio));
    }
  }
  return out;
}

int GaborBankConfig::max_radius() const {
  int r = 0;
  for (const auto& k : make_kernels()) r = std::max(r, k.radius);
  return r;
}

Json to_json(const GaborBankConfig& c) {
  Json j;
  j["orientations"] = c.orientations;
  j["wavelengths"] = c.wavelengths;
  j["phase_offsets"] = c.phase_offsets;
  j["envelope_ratio"] = c.envelope_ratio;
  j["aspect_ratio"] = c.aspect_ratio;
  j["pool_grid"] = Json::array({c.pool_rows, c.pool_cols});
  return j;
}

GaborBankConfig gabor_config_from_json(const Json& j) {
  auto c = GaborBankConfig::defaults();
  try {
    if (j.contains("orientations")) c.orientations = j["orientations"].get<std::vector<double>>();
    if (j.contains("wavelengths")) c.wavelengths = j["wavelengths"].get<std::vector<double>>();
    if (j.contains("phase_offsets")) c.phase_offsets = j["phase_offsets"].get<std::vector<double>>();
    if (j.contains("envelope_ratio")) c.envelope_ratio = j["envelope_ratio"].get<double>();
    if (j.contains("aspect_ratio")) c.aspect_ratio = j["aspect_ratio"].get<double>();
    if (j.contains("pool_grid")) {
      const auto& g = j["pool_grid"];
      if (g.size() != 2) throw Error(ErrorCode::ParseError, "pool_grid needs two entries");
      c.pool_rows = g[0].get<std::size_t>();
      c.pool_cols = g[1].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("Gabor config: ") + e.what());
  }
  c.validate();
  return c;
}

GaborFeatureExtractor::GaborFeatureExtractor(GaborBankConfig config)
    : config_(std::move(config)), kernels_(config_.make_kernels()) {}

const kernels::parallel::GaborEnergyBank& GaborFeatureExtractor::bank_for(std::size_t width,
                                                                          std::size_t height) const {
  std::lock_guard lock(mutex_);
  auto& slot = banks_[{width, height}];
  if (!slot) slot = std::make_unique<kernels::parallel::GaborEnergyBank>(kernels_, width, height);
  return *slot;
}

std::vector<double> GaborFeatureExtractor::features(const GrayImage& img) const {
  int radius = 0;
  for (const auto& k : kernels_) radius = std::max(radius, k.radius);
  const auto footprint = static_cast<std::size_t>(2 * radius + 1);
  if (img.width() < footprint || img.height() < footprint) {
    throw Error(ErrorCode::InvalidParameter,
                "image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    " is smaller than the largest Gabor kernel (" + std::to_string(footprint) + " px)");
  }
  if (img.width() < config_.pool_cols || img.height() < config_.pool_rows) {
    throw Error(ErrorCode::InvalidParameter, "image is smaller than the pooling grid");
  }

  const auto maps = bank_for(img.width(), img.height()).energy(img.pixels(), config_.phase_offsets);
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t rows = config_.pool_rows;
  const std::size_t cols = config_.pool_cols;
  std::vector<double> out;
  out.reserve(config_.dim());
  for (const auto& map : maps) {
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t y0 = r * h / rows;
      const std::size_t y1 = (r + 1) * h / rows;
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t x0 = c * w / cols;
        const std::size_t x1 = (c + 1) * w / cols;
        double acc = 0.0;
        for (std::size_t y = y0; y < y1; ++y) {
          for (std::size_t x = x0; x < x1; ++x) acc += map[y * w + x];
        }
        out.push_back(acc / static_cast<double>((y1 - y0) * (x1 - x0)));
      }
    }
  }
  return out;
}

std::vector<double> gabor_features(const GrayImage& img, const GaborBankConfig& config) {
  return GaborFeatureExtractor(config).features(img);
}

}  // namespace psyscale
