#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psyscale {

/// Row-major grayscale image with intensities in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
  /// Throws MalformedImage if the pixel count does not match or a value lies
  /// outside [0, 1].
  GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }
  std::span<double> row(std::size_t y) { return {pixels_.data() + y * width_, width_}; }
  std::span<const double> row(std::size_t y) const { return {pixels_.data() + y * width_, width_}; }

  bool same_shape(const GrayImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

/// Three channel planes, each in [0, 1].
struct RgbImage {
  GrayImage red;
  GrayImage green;
  GrayImage blue;
};

/// Row-major binary object mask (true = object).
class ObjectMask {
 public:
  ObjectMask() = default;
  ObjectMask(std::size_t width, std::size_t height, std::vector<bool> bits);
  ObjectMask(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool at(std::size_t x, std::size_t y) const { return bits_[y * width_ + x]; }
  void set(std::size_t x, std::size_t y, bool value) { bits_[y * width_ + x] = value; }
  const std::vector<bool>& bits() const { return bits_; }
  std::size_t count() const;

  bool operator==(const ObjectMask&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<bool> bits_;
};

}  // namespace psyscale
