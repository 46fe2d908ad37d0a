#pragma once

#include <exception>
#include <mutex>

namespace psyscale {

/// Exceptions must not escape an OpenMP region. Loop bodies run through
/// capture(), and the first failure is rethrown after the region ends.
class ExceptionSink {
 public:
  template <typename F>
  void capture(F&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace psyscale
