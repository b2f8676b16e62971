#pragma once

#include <array>
#include <mutex>
#include <numbers>
#include <optional>
#include <variant>

#include "dpbench/precision_lab.hpp"

namespace dpbench::render {

// Orbit camera around `target`. Elevation stays strictly inside (-pi/2, pi/2)
// so the view basis never degenerates.
struct CameraState {
  double azimuth = 0.6;
  double elevation = 0.4;
  double distance = 4.0;
  std::array<double, 3> target{0.0, 0.0, 0.0};

  friend bool operator==(const CameraState&, const CameraState&) = default;
};

inline constexpr double kMaxElevation = std::numbers::pi / 2.0 - 1e-3;
inline constexpr double kRadiansPerPixel = 0.005;
inline constexpr double kScrollFactor = 1.1;

struct DragEvent {
  double dx_pixels = 0.0;
  double dy_pixels = 0.0;
};

// Positive steps move the camera in (distance shrinks), negative steps out.
struct ScrollEvent {
  double steps = 0.0;
};

using InputEvent = std::variant<DragEvent, ScrollEvent>;

/// Pure: returns the state after applying one input event.
CameraState camera_update(const CameraState& state, const InputEvent& event);

void validate(const CameraState& state);

/// Vulkan-convention projection (y down, depth in [0,1]) times a look-at view,
/// computed in binary64.
Mat4 camera_mvp(const CameraState& state, double aspect, double fov_y_radians = std::numbers::pi / 4.0);

/// Camera framing the bounding box of a dataset.
CameraState frame_dataset(const Dataset& dataset);

// Latest-value-wins handoff from an input thread to the render thread.
class CameraMailbox {
 public:
  void post(const CameraState& state) {
    std::lock_guard lock(mutex_);
    pending_ = state;
  }
  std::optional<CameraState> take() {
    std::lock_guard lock(mutex_);
    auto out = pending_;
    pending_.reset();
    return out;
  }

 private:
  std::mutex mutex_;
  std::optional<CameraState> pending_;
};

}  // namespace dpbench::render
