#pragma once

// CPU-side measurement of the precision gap between binary32, emulated df64
// and native binary64 vertex transforms, plus the Mandelbrot zoom study.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "dpbench/dataset.hpp"
#include "dpbench/df64.hpp"
#include "dpbench/exec.hpp"
#include "dpbench/fractal_gen.hpp"
#include "dpbench/image.hpp"
#include "dpbench/precision.hpp"

namespace dpbench {

// Column-major like GLSL: element (row r, column c) lives at [c * 4 + r].
using Mat4 = std::array<double, 16>;
using Vec4 = std::array<double, 4>;

Mat4 identity_matrix();
Mat4 translation_matrix(double dx, double dy, double dz);
Mat4 operator*(const Mat4& a, const Mat4& b);

struct TransformStack {
  Mat4 mvp = identity_matrix();
  int viewport_width = 1024;
  int viewport_height = 1024;

  static TransformStack identity(int width = 1024, int height = 1024);
  /// Pure translation; the "far-translated" stack uses an offset of 1e6 on
  /// every axis.
  static TransformStack translated(double offset, int width = 1024, int height = 1024);

  void validate() const;
};

/// A stack with its matrix entries narrowed and split once, the way the GPU
/// path uploads constants once per frame.
struct PreparedStack {
  TransformStack stack;
  std::array<float, 16> mvp32{};
  std::array<Df64, 16> mvp_df64{};

  explicit PreparedStack(const TransformStack& s);
};

Vec4 transform_point(const PointRecord& p, const TransformStack& t, Precision precision);
Vec4 transform_point(const PointRecord& p, const PreparedStack& t, Precision precision);

struct ErrorReport {
  double max_abs_ndc_error = 0.0;
  double rms_ndc_error = 0.0;
  double max_pixel_error = 0.0;
  std::uint64_t max_ulp_distance = 0;
  std::size_t sample_count = 0;
  std::size_t skipped_count = 0;  // points with |w| below the degenerate cutoff
};

inline constexpr double kDegenerateW = 1e-300;

/// Distance between a and b on the monotone integer mapping of binary32
/// (adjacent values are 1 apart; +0 and -0 coincide). NaN or infinity raise
/// DomainError.
std::uint64_t ulp_distance(float a, float b);

/// Compares each point's transform in `precision` against the binary64
/// reference after perspective divide. Per-point error is the larger of the
/// x and y NDC deviations; pixel error scales it by half the viewport.
ErrorReport error_report(const Dataset& dataset, const TransformStack& t, Precision precision,
                         Exec exec = Exec::Parallel);

std::string error_report_csv_header();
std::string error_report_csv_row(Precision precision, const ErrorReport& r);

/// Fraction of horizontally adjacent sample pairs whose real coordinates are
/// bit-identical in `precision`.
double collapse_ratio(const MandelbrotView& view, Precision precision);

/// Maps an escape grid through the fixed ramp: points that never escaped are
/// black, escaped points brighten monotonically with their iteration count.
/// Image row 0 is the top (largest imaginary part).
Image mandelbrot_image(const EscapeGrid& grid);
Image mandelbrot_image(const MandelbrotView& view, Precision precision, Exec exec = Exec::Parallel);
void render_mandelbrot_image(const MandelbrotView& view, Precision precision, std::ostream& sink);

}  // namespace dpbench
