#pragma once

// Dataset generators: unique random 2D points, the Mandelbrot escape grid and
// four 3D fractal point clouds. Every generator is a pure function of its
// parameters (plus seed) and returns points in lattice/recursion order, so the
// OpenMP and serial paths are bit-identical.

#include <array>
#include <cstdint>
#include <vector>

#include "dpbench/dataset.hpp"
#include "dpbench/exec.hpp"
#include "dpbench/precision.hpp"

namespace dpbench {

using Vec3 = std::array<double, 3>;

struct MandelbrotView {
  double center_re = -0.7436450;
  double center_im = 0.13182590;
  double zoom = 0.1;  // half-width of the complex window
  int width = 512;
  int max_iterations = 256;

  void validate() const;
};

// width x width samples, row-major with row index along the imaginary axis.
struct EscapeGrid {
  int width = 0;
  int max_iterations = 0;
  std::vector<std::uint32_t> iterations;  // escape iteration, or max_iterations
  std::vector<std::uint8_t> escaped;      // 1 when |z|^2 exceeded 4

  std::uint32_t at(int row, int col) const { return iterations[static_cast<std::size_t>(row) * width + col]; }
  bool escaped_at(int row, int col) const { return escaped[static_cast<std::size_t>(row) * width + col] != 0; }
};

struct MandelbulbParams {
  int max_iterations = 12;
  double bailout = 4.0;  // compared against the squared radius
  double power = 8.0;
  int resolution = 64;  // samples per axis, inclusive lattice
  double x_min = -1.2, x_max = 1.2;
  double y_min = -1.2, y_max = 1.2;
  double z_min = -1.2, z_max = 1.2;

  void validate() const;
};

struct Quaternion {
  double x = 0.0, y = 0.0, z = 0.0, w = 0.0;
};

Quaternion operator*(const Quaternion& a, const Quaternion& b);  // Hamilton product
Quaternion operator+(const Quaternion& a, const Quaternion& b);
double norm(const Quaternion& q);

struct JuliaParams {
  Quaternion c{-0.2, 0.6, 0.2, 0.2};
  int max_iter = 32;
  double threshold = 4.0;
  // Lattice index runs over [-resolution, resolution] per axis and maps to
  // coordinate extent * index / resolution.
  int resolution = 32;
  double extent = 1.5;

  void validate() const;
};

struct MengerParams {
  int max_iterations = 3;
  double cube_size = 1.0;
  Vec3 origin{0.0, 0.0, 0.0};
  bool dedup = false;

  void validate() const;
};

struct SierpinskiParams {
  int n = 5;
  std::array<Vec3, 4> vertices{Vec3{1.0, 1.0, 1.0}, Vec3{1.0, -1.0, -1.0}, Vec3{-1.0, 1.0, -1.0},
                               Vec3{-1.0, -1.0, 1.0}};

  void validate() const;
};

inline constexpr int kMaxMengerDepth = 6;
inline constexpr int kMaxSierpinskiDepth = 10;

enum class Palette { Spectral, Grayscale };

Dataset gen_random_2d(std::size_t count, std::uint64_t seed);

/// Sample coordinate for lattice index `index`, computed in the given
/// precision and widened to binary64.
double mandelbrot_coordinate(double center, double zoom, int width, int index, Precision precision);

EscapeGrid mandelbrot_grid(const MandelbrotView& view, Precision precision, Exec exec = Exec::Parallel);

/// Lattice coordinate i of `resolution` inclusive samples over [lo, hi].
double lattice_coordinate(double lo, double hi, int resolution, int i);

Dataset mandelbulb_points(const MandelbulbParams& p, Exec exec = Exec::Parallel);
Dataset julia_quat_points(const JuliaParams& p, Exec exec = Exec::Parallel);
Dataset menger_points(const MengerParams& p, Exec exec = Exec::Parallel);
Dataset sierpinski_points(const SierpinskiParams& p, Exec exec = Exec::Parallel);

/// Leaf counts of the recursive generators (20^n cubes, 4^n tetrahedra).
std::uint64_t menger_leaf_count(int depth);
std::uint64_t sierpinski_leaf_count(int depth);

/// Deterministic coloring from escape counts when present, otherwise from the
/// normalized coordinate position. A degenerate range maps to the ramp start.
Dataset colorize(Dataset dataset, Palette palette = Palette::Spectral);

std::array<double, 3> palette_color(Palette palette, double t);

}  // namespace dpbench
