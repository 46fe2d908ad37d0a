#include "psyscale/stimuli/image.hpp"

#include <algorithm>
#include <string>

#include "psyscale/error.hpp"

namespace psyscale {

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), pixels_(width * height, fill) {
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw Error(ErrorCode::MalformedImage, "fill value outside [0,1]");
  }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != width_ * height_) {
    throw Error(ErrorCode::MalformedImage, "pixel count " + std::to_string(pixels_.size()) +
                                               " does not match " + std::to_string(width_) + "x" +
                                               std::to_string(height_));
  }
  if (!std::all_of(pixels_.begin(), pixels_.end(), [](double v) { return v >= 0.0 && v <= 1.0; })) {
    throw Error(ErrorCode::MalformedImage, "pixel value outside [0,1]");
  }
}

ObjectMask::ObjectMask(std::size_t width, std::size_t height, std::vector<bool> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != width_ * height_) {
    throw Error(ErrorCode::MalformedImage, "mask bit count does not match its dimensions");
  }
}

ObjectMask::ObjectMask(std::size_t width, std::size_t height)
    : width_(width), height_(height), bits_(width * height, false) {}

std::size_t ObjectMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

}  // namespace psyscale
