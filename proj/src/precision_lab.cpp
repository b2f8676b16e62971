#include "dpbench/precision_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dpbench/errors.hpp"

namespace dpbench {

Mat4 identity_matrix() { return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}; }

Mat4 translation_matrix(double dx, double dy, double dz) {
  Mat4 m = identity_matrix();
  m[12] = dx;
  m[13] = dy;
  m[14] = dz;
  return m;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[k * 4 + r] * b[c * 4 + k];
      out[c * 4 + r] = s;
    }
  return out;
}

TransformStack TransformStack::identity(int width, int height) { return {identity_matrix(), width, height}; }

TransformStack TransformStack::translated(double offset, int width, int height) {
  return {translation_matrix(offset, offset, offset), width, height};
}

void TransformStack::validate() const {
  for (double v : mvp)
    if (!std::isfinite(v)) throw ValidationError("transform stack: mvp has a non-finite entry");
  if (viewport_width <= 0 || viewport_height <= 0) throw ValidationError("transform stack: viewport must be positive");
}

PreparedStack::PreparedStack(const TransformStack& s) : stack(s) {
  stack.validate();
  for (std::size_t i = 0; i < 16; ++i) {
    mvp32[i] = static_cast<float>(s.mvp[i]);
    mvp_df64[i] = df64::split(s.mvp[i]);
  }
}

Vec4 transform_point(const PointRecord& p, const PreparedStack& t, Precision precision) {
  Vec4 out{};
  switch (precision) {
    case Precision::Binary32: {
      const float x = static_cast<float>(p.coords[0]);
      const float y = static_cast<float>(p.coords[1]);
      const float z = static_cast<float>(p.coords[2]);
      const auto& m = t.mvp32;
      for (int r = 0; r < 4; ++r) {
        const float v = m[r] * x + m[4 + r] * y + m[8 + r] * z + m[12 + r];
        out[r] = static_cast<double>(v);
      }
      return out;
    }
    case Precision::Df64: {
      const Df64 x = df64::split(p.coords[0]);
      const Df64 y = df64::split(p.coords[1]);
      const Df64 z = df64::split(p.coords[2]);
      const auto& m = t.mvp_df64;
      for (int r = 0; r < 4; ++r) {
        const Df64 v = m[r] * x + m[4 + r] * y + m[8 + r] * z + m[12 + r];
        out[r] = df64::to_f64(v);
      }
      return out;
    }
    case Precision::Binary64:
      break;
  }
  const auto& m = t.stack.mvp;
  const double x = p.coords[0], y = p.coords[1], z = p.coords[2];
  for (int r = 0; r < 4; ++r) out[r] = m[r] * x + m[4 + r] * y + m[8 + r] * z + m[12 + r];
  return out;
}

Vec4 transform_point(const PointRecord& p, const TransformStack& t, Precision precision) {
  return transform_point(p, PreparedStack(t), precision);
}

std::uint64_t ulp_distance(float a, float b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("ulp_distance: operands must be finite");
  auto key = [](float f) -> std::int64_t {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    const auto magnitude = static_cast<std::int64_t>(bits & 0x7fffffffu);
    return (bits & 0x80000000u) ? -magnitude : magnitude;
  };
  const std::int64_t d = key(a) - key(b);
  return static_cast<std::uint64_t>(d < 0 ? -d : d);
}

namespace {

struct PointError {
  bool skipped = true;
  double ndc = 0.0;
  double pixel = 0.0;
  std::uint64_t ulps = 0;
};

std::uint64_t narrowed_ulps(double value, double reference) {
  const float a = static_cast<float>(value), b = static_cast<float>(reference);
  if (!std::isfinite(a) || !std::isfinite(b)) return 0;
  return ulp_distance(a, b);
}

PointError point_error(const PointRecord& p, const PreparedStack& t, Precision precision) {
  PointError e;
  const Vec4 got = transform_point(p, t, precision);
  const Vec4 ref = transform_point(p, t, Precision::Binary64);
  if (std::fabs(got[3]) < kDegenerateW || std::fabs(ref[3]) < kDegenerateW) return e;
  const double gx = got[0] / got[3], gy = got[1] / got[3];
  const double rx = ref[0] / ref[3], ry = ref[1] / ref[3];
  const double dx = std::fabs(gx - rx), dy = std::fabs(gy - ry);
  if (!std::isfinite(dx) || !std::isfinite(dy)) return e;
  e.skipped = false;
  e.ndc = std::max(dx, dy);
  e.pixel = std::max(dx * t.stack.viewport_width / 2.0, dy * t.stack.viewport_height / 2.0);
  e.ulps = std::max(narrowed_ulps(gx, rx), narrowed_ulps(gy, ry));
  return e;
}

}  // namespace

ErrorReport error_report(const Dataset& dataset, const TransformStack& t, Precision precision, Exec exec) {
  if (dataset.points.empty()) throw ValidationError("error_report: dataset is empty");
  const PreparedStack prepared(t);
  const auto n = static_cast<std::int64_t>(dataset.points.size());

  double max_ndc = 0.0, max_pixel = 0.0, sum_sq = 0.0;
  std::uint64_t max_ulps = 0;
  std::size_t samples = 0, skipped = 0;

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(max : max_ndc, max_pixel, max_ulps) \
    reduction(+ : sum_sq, samples, skipped)
    for (std::int64_t i = 0; i < n; ++i) {
      const PointError e = point_error(dataset.points[static_cast<std::size_t>(i)], prepared, precision);
      if (e.skipped) {
        ++skipped;
        continue;
      }
      ++samples;
      max_ndc = std::max(max_ndc, e.ndc);
      max_pixel = std::max(max_pixel, e.pixel);
      max_ulps = std::max(max_ulps, e.ulps);
      sum_sq += e.ndc * e.ndc;
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      const PointError e = point_error(dataset.points[static_cast<std::size_t>(i)], prepared, precision);
      if (e.skipped) {
        ++skipped;
        continue;
      }
      ++samples;
      max_ndc = std::max(max_ndc, e.ndc);
      max_pixel = std::max(max_pixel, e.pixel);
      max_ulps = std::max(max_ulps, e.ulps);
      sum_sq += e.ndc * e.ndc;
    }
  }

  ErrorReport r;
  r.max_abs_ndc_error = max_ndc;
  r.max_pixel_error = max_pixel;
  r.max_ulp_distance = max_ulps;
  r.sample_count = samples;
  r.skipped_count = skipped;
  // Clamp guards the last-bit rounding of sqrt(mean) against the max.
  r.rms_ndc_error = samples ? std::min(std::sqrt(sum_sq / static_cast<double>(samples)), max_ndc) : 0.0;
  return r;
}

std::string error_report_csv_header() {
  return "precision,max_abs_ndc_error,rms_ndc_error,max_pixel_error,max_ulp_distance,sample_count,skipped_count";
}

std::string error_report_csv_row(Precision precision, const ErrorReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%llu,%zu,%zu", std::string(to_string(precision)).c_str(),
                r.max_abs_ndc_error, r.rms_ndc_error, r.max_pixel_error,
                static_cast<unsigned long long>(r.max_ulp_distance), r.sample_count, r.skipped_count);
  return buf;
}

double collapse_ratio(const MandelbrotView& view, Precision precision) {
  view.validate();
  std::size_t collapsed = 0;
  double prev = mandelbrot_coordinate(view.center_re, view.zoom, view.width, 0, precision);
  for (int i = 1; i < view.width; ++i) {
    const double cur = mandelbrot_coordinate(view.center_re, view.zoom, view.width, i, precision);
    if (std::bit_cast<std::uint64_t>(cur) == std::bit_cast<std::uint64_t>(prev)) ++collapsed;
    prev = cur;
  }
  return static_cast<double>(collapsed) / static_cast<double>(view.width - 1);
}

Image mandelbrot_image(const EscapeGrid& grid) {
  Image img(grid.width, grid.width, 3);
  const double max_it = grid.max_iterations;
  for (int row = 0; row < grid.width; ++row) {
    const int y = grid.width - 1 - row;
    for (int col = 0; col < grid.width; ++col) {
      std::uint8_t* px = img.at(col, y);
      if (!grid.escaped_at(row, col)) {
        px[0] = px[1] = px[2] = 0;
        continue;
      }
      const double t = grid.at(row, col) / max_it;  // in (0, 1]
      px[0] = static_cast<std::uint8_t>(std::lround(255.0 * t * t));
      px[1] = static_cast<std::uint8_t>(std::lround(255.0 * t));
      px[2] = static_cast<std::uint8_t>(std::lround(255.0 * std::sqrt(t)));
    }
  }
  return img;
}

Image mandelbrot_image(const MandelbrotView& view, Precision precision, Exec exec) {
  return mandelbrot_image(mandelbrot_grid(view, precision, exec));
}

void render_mandelbrot_image(const MandelbrotView& view, Precision precision, std::ostream& sink) {
  write_ppm(mandelbrot_image(view, precision), sink);
}

}  // namespace dpbench
