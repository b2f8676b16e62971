#include "dpbench/render/camera.hpp"

#include <algorithm>
#include <cmath>

#include "dpbench/errors.hpp"

namespace dpbench::render {

CameraState camera_update(const CameraState& state, const InputEvent& event) {
  CameraState next = state;
  if (const auto* drag = std::get_if<DragEvent>(&event)) {
    next.azimuth = state.azimuth + drag->dx_pixels * kRadiansPerPixel;
    next.elevation = std::clamp(state.elevation + drag->dy_pixels * kRadiansPerPixel, -kMaxElevation, kMaxElevation);
  } else if (const auto* scroll = std::get_if<ScrollEvent>(&event)) {
    // Dividing for "in" and multiplying for "out" by the same power keeps an
    // in/out pair within one rounding of the original distance.
    if (scroll->steps > 0.0) {
      next.distance = state.distance / std::pow(kScrollFactor, scroll->steps);
    } else if (scroll->steps < 0.0) {
      next.distance = state.distance * std::pow(kScrollFactor, -scroll->steps);
    }
  }
  return next;
}

void validate(const CameraState& state) {
  if (!(state.distance > 0.0) || !std::isfinite(state.distance)) throw ValidationError("camera: distance must be > 0");
  if (!(std::fabs(state.elevation) < std::numbers::pi / 2.0)) {
    throw ValidationError("camera: elevation must lie inside (-pi/2, pi/2)");
  }
}

namespace {

using V3 = std::array<double, 3>;

V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
V3 normalize(const V3& v) {
  const double n = std::sqrt(dot(v, v));
  return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

Mat4 camera_mvp(const CameraState& s, double aspect, double fov_y) {
  validate(s);
  const V3 eye{s.target[0] + s.distance * std::cos(s.elevation) * std::cos(s.azimuth),
               s.target[1] + s.distance * std::sin(s.elevation),
               s.target[2] + s.distance * std::cos(s.elevation) * std::sin(s.azimuth)};
  const V3 f = normalize(sub(s.target, eye));
  const V3 r = normalize(cross(f, V3{0.0, 1.0, 0.0}));
  const V3 u = cross(r, f);

  Mat4 view = identity_matrix();
  view[0] = r[0], view[4] = r[1], view[8] = r[2];
  view[1] = u[0], view[5] = u[1], view[9] = u[2];
  view[2] = -f[0], view[6] = -f[1], view[10] = -f[2];
  view[12] = -dot(r, eye);
  view[13] = -dot(u, eye);
  view[14] = dot(f, eye);

  const double near = s.distance * 0.01;
  const double far = s.distance * 100.0;
  const double g = 1.0 / std::tan(fov_y / 2.0);
  Mat4 proj{};
  proj[0] = g / aspect;
  proj[5] = -g;  // Vulkan clip space has y pointing down
  proj[10] = far / (near - far);
  proj[11] = -1.0;
  proj[14] = near * far / (near - far);
  return proj * view;
}

CameraState frame_dataset(const Dataset& dataset) {
  CameraState s;
  if (dataset.points.empty()) return s;
  const DatasetStats stats = dataset_stats(dataset);
  double radius = 0.0;
  for (std::size_t d = 0; d < stats.bbox.size(); ++d) {
    s.target[d] = 0.5 * (stats.bbox[d].min + stats.bbox[d].max);
    radius = std::max(radius, 0.5 * (stats.bbox[d].max - stats.bbox[d].min));
  }
  if (dataset.dims == 2) {
    s.azimuth = std::numbers::pi / 2.0;  // look down -z onto the xy plane
    s.elevation = 0.0;
  }
  s.distance = std::max(radius, 1e-6) * 3.0;
  return s;
}

}  // namespace dpbench::render
