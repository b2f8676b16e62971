#include "dpbench/fractal_gen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <tuple>

#include "dpbench/df64.hpp"
#include "dpbench/errors.hpp"

namespace dpbench {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Concatenates per-slice outputs in slice order so the result never depends
// on which thread produced which slice.
template <typename Slice>
void concat_slices(std::vector<Slice>& slices, Dataset& out) {
  std::size_t total = 0;
  for (const auto& s : slices) total += s.points.size();
  out.points.reserve(total);
  bool with_counts = false;
  for (const auto& s : slices) with_counts = with_counts || !s.counts.empty();
  if (with_counts) out.escape_counts.reserve(total);
  for (auto& s : slices) {
    out.points.insert(out.points.end(), s.points.begin(), s.points.end());
    if (with_counts) out.escape_counts.insert(out.escape_counts.end(), s.counts.begin(), s.counts.end());
  }
}

struct Slice {
  std::vector<PointRecord> points;
  std::vector<std::uint32_t> counts;
};

PointRecord make_point(double x, double y, double z) {
  PointRecord p;
  p.coords = {x, y, z};
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter validation

void MandelbrotView::validate() const {
  if (!(zoom > 0.0) || !std::isfinite(zoom)) throw ValidationError("mandelbrot: zoom must be > 0");
  if (width < 2) throw ValidationError("mandelbrot: width must be >= 2");
  if (max_iterations < 1) throw ValidationError("mandelbrot: max_iterations must be >= 1");
  if (!std::isfinite(center_re) || !std::isfinite(center_im)) {
    throw ValidationError("mandelbrot: center must be finite");
  }
}

void MandelbulbParams::validate() const {
  if (!(bailout > 0.0)) throw ValidationError("mandelbulb: bailout must be > 0");
  if (resolution < 2) throw ValidationError("mandelbulb: resolution must be >= 2");
  if (max_iterations < 0) throw ValidationError("mandelbulb: max_iterations must be >= 0");
  if (!(x_min < x_max) || !(y_min < y_max) || !(z_min < z_max)) {
    throw ValidationError("mandelbulb: each axis needs min < max");
  }
}

void JuliaParams::validate() const {
  if (!(threshold > 0.0)) throw ValidationError("julia: threshold must be > 0");
  if (resolution < 1) throw ValidationError("julia: resolution must be >= 1");
  if (max_iter < 0) throw ValidationError("julia: max_iter must be >= 0");
  if (!(extent > 0.0)) throw ValidationError("julia: extent must be > 0");
}

void MengerParams::validate() const {
  if (max_iterations < 0) throw ValidationError("menger: max_iterations must be >= 0");
  if (max_iterations > kMaxMengerDepth) {
    throw CapacityError("menger: depth " + std::to_string(max_iterations) + " exceeds the supported maximum of " +
                        std::to_string(kMaxMengerDepth));
  }
  if (!(cube_size > 0.0)) throw ValidationError("menger: cube_size must be > 0");
}

void SierpinskiParams::validate() const {
  if (n < 0) throw ValidationError("sierpinski: n must be >= 0");
  if (n > kMaxSierpinskiDepth) {
    throw CapacityError("sierpinski: depth " + std::to_string(n) + " exceeds the supported maximum of " +
                        std::to_string(kMaxSierpinskiDepth));
  }
  const auto& [a, b, c, d] = vertices;
  const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 w{d[0] - a[0], d[1] - a[1], d[2] - a[2]};
  const double det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
                     u[2] * (v[0] * w[1] - v[1] * w[0]);
  if (det == 0.0 || !std::isfinite(det)) throw ValidationError("sierpinski: vertices are not affinely independent");
}

// ---------------------------------------------------------------------------
// Random 2D

Dataset gen_random_2d(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ValidationError("random2d: count must be >= 1");
  std::mt19937_64 rng(seed);
  // 53 random bits scaled into [0,1), mapped to [-1,1) exactly; -1 is redrawn.
  auto draw = [&rng] {
    for (;;) {
      const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
      const double x = 2.0 * u - 1.0;
      if (x > -1.0) return x;
    }
  };

  Dataset out;
  out.dims = 2;
  out.name = "random2d";
  out.source = "random2d count=" + std::to_string(count) + " seed=" + std::to_string(seed);
  out.points.resize(count);
  for (auto& p : out.points) {
    p.coords[0] = draw();
    p.coords[1] = draw();
  }

  // Rejection-resample duplicates; the earliest occurrence keeps its value.
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::size_t>;
  std::vector<Key> keys(count);
  for (;;) {
    for (std::size_t i = 0; i < count; ++i) {
      keys[i] = {std::bit_cast<std::uint64_t>(out.points[i].coords[0]),
                 std::bit_cast<std::uint64_t>(out.points[i].coords[1]), i};
    }
    std::sort(keys.begin(), keys.end());
    std::vector<std::size_t> dupes;
    for (std::size_t i = 1; i < count; ++i) {
      if (std::get<0>(keys[i]) == std::get<0>(keys[i - 1]) && std::get<1>(keys[i]) == std::get<1>(keys[i - 1])) {
        dupes.push_back(std::get<2>(keys[i]));
      }
    }
    if (dupes.empty()) break;
    std::sort(dupes.begin(), dupes.end());
    for (std::size_t idx : dupes) {
      out.points[idx].coords[0] = draw();
      out.points[idx].coords[1] = draw();
    }
  }
  return colorize(std::move(out));
}

// ---------------------------------------------------------------------------
// Mandelbrot

double mandelbrot_coordinate(double center, double zoom, int width, int index, Precision precision) {
  switch (precision) {
    case Precision::Binary32: {
      const float step = 2.0f * static_cast<float>(zoom) / static_cast<float>(width);
      const float offset = (static_cast<float>(index) - static_cast<float>(width) / 2.0f) * step;
      return static_cast<double>(static_cast<float>(center) + offset);
    }
    case Precision::Df64: {
      const Df64 step = df64::split(2.0 * zoom) / df64::split(static_cast<double>(width));
      const Df64 offset =
          (df64::split(static_cast<double>(index)) - df64::split(static_cast<double>(width) / 2.0)) * step;
      return df64::to_f64(df64::split(center) + offset);
    }
    case Precision::Binary64:
      break;
  }
  const double step = 2.0 * zoom / static_cast<double>(width);
  return center + (static_cast<double>(index) - static_cast<double>(width) / 2.0) * step;
}

EscapeGrid mandelbrot_grid(const MandelbrotView& view, Precision precision, Exec exec) {
  view.validate();
  const int w = view.width;
  std::vector<double> re(static_cast<std::size_t>(w)), im(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) {
    re[static_cast<std::size_t>(i)] = mandelbrot_coordinate(view.center_re, view.zoom, w, i, precision);
    im[static_cast<std::size_t>(i)] = mandelbrot_coordinate(view.center_im, view.zoom, w, i, precision);
  }

  EscapeGrid grid;
  grid.width = w;
  grid.max_iterations = view.max_iterations;
  const std::size_t cells = static_cast<std::size_t>(w) * static_cast<std::size_t>(w);
  grid.iterations.assign(cells, 0);
  grid.escaped.assign(cells, 0);
  const int max_it = view.max_iterations;

  auto row_kernel = [&](int row) {
    const double ci = im[static_cast<std::size_t>(row)];
    for (int col = 0; col < w; ++col) {
      const double cr = re[static_cast<std::size_t>(col)];
      double zr = 0.0, zi = 0.0;
      std::uint32_t n = static_cast<std::uint32_t>(max_it);
      std::uint8_t esc = 0;
      for (int it = 1; it <= max_it; ++it) {
        const double nzr = zr * zr - zi * zi + cr;
        zi = 2.0 * zr * zi + ci;
        zr = nzr;
        if (zr * zr + zi * zi > 4.0) {
          n = static_cast<std::uint32_t>(it);
          esc = 1;
          break;
        }
      }
      const std::size_t idx = static_cast<std::size_t>(row) * w + col;
      grid.iterations[idx] = n;
      grid.escaped[idx] = esc;
    }
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int row = 0; row < w; ++row) row_kernel(row);
  } else {
    for (int row = 0; row < w; ++row) row_kernel(row);
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Mandelbulb

double lattice_coordinate(double lo, double hi, int resolution, int i) {
  return std::lerp(lo, hi, static_cast<double>(i) / static_cast<double>(resolution - 1));
}

namespace {

bool mandelbulb_member(double x, double y, double z, const MandelbulbParams& p) {
  double zx = x, zy = y, zz = z;
  int iteration = 0;
  while (iteration < p.max_iterations && (zx * zx + zy * zy + zz * zz) < p.bailout) {
    const double r = std::sqrt(zx * zx + zy * zy + zz * zz);
    const double theta = std::atan2(std::sqrt(zx * zx + zy * zy), zz);
    const double phi = std::atan2(zy, zx);
    const double new_r = std::pow(r, p.power);
    const double new_theta = theta * p.power;
    const double new_phi = phi * p.power;
    zx = new_r * std::sin(new_theta) * std::cos(new_phi) + x;
    zy = new_r * std::sin(new_theta) * std::sin(new_phi) + y;
    zz = new_r * std::cos(new_theta) + z;
    ++iteration;
  }
  return iteration == p.max_iterations;
}

Slice mandelbulb_slice(const MandelbulbParams& p, int i) {
  Slice s;
  const double x = lattice_coordinate(p.x_min, p.x_max, p.resolution, i);
  for (int j = 0; j < p.resolution; ++j) {
    const double y = lattice_coordinate(p.y_min, p.y_max, p.resolution, j);
    for (int k = 0; k < p.resolution; ++k) {
      const double z = lattice_coordinate(p.z_min, p.z_max, p.resolution, k);
      if (mandelbulb_member(x, y, z, p)) s.points.push_back(make_point(x, y, z));
    }
  }
  return s;
}

}  // namespace

Dataset mandelbulb_points(const MandelbulbParams& p, Exec exec) {
  p.validate();
  std::vector<Slice> slices(static_cast<std::size_t>(p.resolution));
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < p.resolution; ++i) slices[static_cast<std::size_t>(i)] = mandelbulb_slice(p, i);
  } else {
    for (int i = 0; i < p.resolution; ++i) slices[static_cast<std::size_t>(i)] = mandelbulb_slice(p, i);
  }
  Dataset out;
  out.dims = 3;
  out.name = "mandelbulb";
  out.source = "mandelbulb power=" + fmt_double(p.power) + " bailout=" + fmt_double(p.bailout) +
               " resolution=" + std::to_string(p.resolution) + " iterations=" + std::to_string(p.max_iterations);
  concat_slices(slices, out);
  if (out.points.empty()) return out;
  return colorize(std::move(out));
}

// ---------------------------------------------------------------------------
// Quaternion Julia

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
          a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z};
}

Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z, a.w + b.w};
}

double norm(const Quaternion& q) { return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z + q.w * q.w); }

namespace {

Slice julia_slice(const JuliaParams& p, int i) {
  Slice s;
  const double res = static_cast<double>(p.resolution);
  const double x = p.extent * (static_cast<double>(i) / res);
  for (int j = -p.resolution; j <= p.resolution; ++j) {
    const double y = p.extent * (static_cast<double>(j) / res);
    for (int k = -p.resolution; k <= p.resolution; ++k) {
      const double z = p.extent * (static_cast<double>(k) / res);
      Quaternion q{x, y, z, 0.0};
      int n = 0;
      while (n < p.max_iter && norm(q) < p.threshold) {
        q = q * q + p.c;
        ++n;
      }
      if (norm(q) >= p.threshold) {
        s.points.push_back(make_point(x, y, z));
        s.counts.push_back(static_cast<std::uint32_t>(n));
      }
    }
  }
  return s;
}

}  // namespace

Dataset julia_quat_points(const JuliaParams& p, Exec exec) {
  p.validate();
  const int span = 2 * p.resolution + 1;
  std::vector<Slice> slices(static_cast<std::size_t>(span));
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int s = 0; s < span; ++s) slices[static_cast<std::size_t>(s)] = julia_slice(p, s - p.resolution);
  } else {
    for (int s = 0; s < span; ++s) slices[static_cast<std::size_t>(s)] = julia_slice(p, s - p.resolution);
  }
  Dataset out;
  out.dims = 3;
  out.name = "julia";
  out.source = "julia c=(" + fmt_double(p.c.x) + "," + fmt_double(p.c.y) + "," + fmt_double(p.c.z) + "," +
               fmt_double(p.c.w) + ") resolution=" + std::to_string(p.resolution) +
               " max_iter=" + std::to_string(p.max_iter);
  concat_slices(slices, out);
  if (out.points.empty()) return out;
  return colorize(std::move(out));
}

// ---------------------------------------------------------------------------
// Menger sponge

std::uint64_t menger_leaf_count(int depth) {
  std::uint64_t n = 1;
  for (int i = 0; i < depth; ++i) n *= 20;
  return n;
}

std::uint64_t sierpinski_leaf_count(int depth) { return std::uint64_t{1} << (2 * depth); }

namespace {

struct Triple {
  int i, j, k;
};

std::vector<Triple> menger_kept_subcubes() {
  std::vector<Triple> kept;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (!((i == 1 && j == 1) || (i == 1 && k == 1) || (j == 1 && k == 1))) kept.push_back({i, j, k});
  return kept;
}

void emit_cube_corners(double x, double y, double z, double size, std::vector<PointRecord>& out) {
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) out.push_back(make_point(x + a * size, y + b * size, z + c * size));
}

void menger_recurse(double x, double y, double z, double size, int iteration, int max_iterations,
                    std::vector<PointRecord>& out) {
  if (iteration == max_iterations) {
    emit_cube_corners(x, y, z, size, out);
    return;
  }
  const double new_size = size / 3.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (!((i == 1 && j == 1) || (i == 1 && k == 1) || (j == 1 && k == 1)))
          menger_recurse(x + i * new_size, y + j * new_size, z + k * new_size, new_size, iteration + 1,
                         max_iterations, out);
}

// Removes bit-identical repeats, keeping first occurrences in order.
void dedup_points(std::vector<PointRecord>& points) {
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::size_t>;
  std::vector<Key> keys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    keys[i] = {std::bit_cast<std::uint64_t>(points[i].coords[0]), std::bit_cast<std::uint64_t>(points[i].coords[1]),
               std::bit_cast<std::uint64_t>(points[i].coords[2]), i};
  }
  std::sort(keys.begin(), keys.end());
  std::vector<std::uint8_t> keep(points.size(), 1);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (std::get<0>(keys[i]) == std::get<0>(keys[i - 1]) && std::get<1>(keys[i]) == std::get<1>(keys[i - 1]) &&
        std::get<2>(keys[i]) == std::get<2>(keys[i - 1])) {
      keep[std::get<3>(keys[i])] = 0;
    }
  }
  std::size_t w = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (keep[i]) points[w++] = points[i];
  points.resize(w);
}

}  // namespace

Dataset menger_points(const MengerParams& p, Exec exec) {
  p.validate();
  Dataset out;
  out.dims = 3;
  out.name = "menger";
  out.source = "menger iterations=" + std::to_string(p.max_iterations) + " size=" + fmt_double(p.cube_size);
  const std::uint64_t leaves = menger_leaf_count(p.max_iterations);

  if (exec == Exec::Serial) {
    out.points.reserve(leaves * 8);
    menger_recurse(p.origin[0], p.origin[1], p.origin[2], p.cube_size, 0, p.max_iterations, out.points);
  } else {
    // Leaf index digits (base 20, most significant first) select the kept
    // subcube at each level; positions accumulate with the same operation
    // sequence as the recursion.
    static const std::vector<Triple> kept = menger_kept_subcubes();
    out.points.resize(leaves * 8);
    const auto n_leaves = static_cast<std::int64_t>(leaves);
#pragma omp parallel for schedule(static)
    for (std::int64_t leaf = 0; leaf < n_leaves; ++leaf) {
      double x = p.origin[0], y = p.origin[1], z = p.origin[2], size = p.cube_size;
      std::uint64_t divisor = leaves / 20;
      auto rem = static_cast<std::uint64_t>(leaf);
      for (int level = 0; level < p.max_iterations; ++level) {
        const Triple& t = kept[rem / divisor];
        rem %= divisor;
        divisor /= 20;
        const double new_size = size / 3.0;
        x = x + t.i * new_size;
        y = y + t.j * new_size;
        z = z + t.k * new_size;
        size = new_size;
      }
      std::size_t o = static_cast<std::size_t>(leaf) * 8;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) out.points[o++] = make_point(x + a * size, y + b * size, z + c * size);
    }
  }
  if (p.dedup) dedup_points(out.points);
  return colorize(std::move(out));
}

// ---------------------------------------------------------------------------
// Sierpinski tetrahedron

namespace {

using Tetra = std::array<Vec3, 4>;

Vec3 midpoint(const Vec3& a, const Vec3& b) {
  return {(a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5, (a[2] + b[2]) * 0.5};
}

// Child c keeps vertex c and takes the midpoints of the three edges incident
// to it.
Tetra corner_child(const Tetra& t, int c) {
  Tetra child;
  for (int v = 0; v < 4; ++v) child[v] = (v == c) ? t[v] : midpoint(t[c], t[v]);
  return child;
}

void sierpinski_recurse(const Tetra& t, int depth, std::vector<PointRecord>& out) {
  if (depth == 0) {
    for (const auto& v : t) out.push_back(make_point(v[0], v[1], v[2]));
    return;
  }
  for (int c = 0; c < 4; ++c) sierpinski_recurse(corner_child(t, c), depth - 1, out);
}

}  // namespace

Dataset sierpinski_points(const SierpinskiParams& p, Exec exec) {
  p.validate();
  Dataset out;
  out.dims = 3;
  out.name = "sierpinski";
  out.source = "sierpinski iterations=" + std::to_string(p.n);
  const std::uint64_t leaves = sierpinski_leaf_count(p.n);
  if (exec == Exec::Serial) {
    out.points.reserve(leaves * 4);
    sierpinski_recurse(p.vertices, p.n, out.points);
  } else {
    out.points.resize(leaves * 4);
    const auto n_leaves = static_cast<std::int64_t>(leaves);
#pragma omp parallel for schedule(static)
    for (std::int64_t leaf = 0; leaf < n_leaves; ++leaf) {
      Tetra t = p.vertices;
      for (int level = p.n - 1; level >= 0; --level) {
        const int c = static_cast<int>((static_cast<std::uint64_t>(leaf) >> (2 * level)) & 3u);
        t = corner_child(t, c);
      }
      std::size_t o = static_cast<std::size_t>(leaf) * 4;
      for (const auto& v : t) out.points[o++] = make_point(v[0], v[1], v[2]);
    }
  }
  return colorize(std::move(out));
}

// ---------------------------------------------------------------------------
// Coloring

std::array<double, 3> palette_color(Palette palette, double t) {
  t = std::clamp(t, 0.0, 1.0);
  if (palette == Palette::Grayscale) return {t, t, t};
  // Hue ramp from blue (240 deg) down to red (0 deg) at full saturation/value.
  const double h = (1.0 - t) * 4.0;  // sextant units, 0..4
  const int sector = std::min(static_cast<int>(h), 3);
  const double f = h - sector;
  switch (sector) {
    case 0: return {1.0, f, 0.0};        // red -> yellow
    case 1: return {1.0 - f, 1.0, 0.0};  // yellow -> green
    case 2: return {0.0, 1.0, f};        // green -> cyan
    default: return {0.0, 1.0 - f, 1.0};  // cyan -> blue
  }
}

Dataset colorize(Dataset dataset, Palette palette) {
  if (dataset.points.empty()) throw ValidationError("colorize: dataset is empty");
  const auto n = static_cast<std::int64_t>(dataset.points.size());

  if (!dataset.escape_counts.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(dataset.escape_counts.begin(), dataset.escape_counts.end());
    const double lo = *lo_it, range = static_cast<double>(*hi_it) - lo;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const double t = range > 0.0 ? (dataset.escape_counts[static_cast<std::size_t>(i)] - lo) / range : 0.0;
      dataset.points[static_cast<std::size_t>(i)].color = palette_color(palette, t);
    }
    return dataset;
  }

  std::array<double, 3> lo{}, hi{};
  for (int d = 0; d < dataset.dims; ++d) {
    lo[d] = hi[d] = dataset.points[0].coords[d];
    for (const auto& p : dataset.points) {
      lo[d] = std::min(lo[d], p.coords[d]);
      hi[d] = std::max(hi[d], p.coords[d]);
    }
  }
  const int dims = dataset.dims;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& p = dataset.points[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (int d = 0; d < dims; ++d) {
      const double range = hi[d] - lo[d];
      if (range > 0.0) sum += (p.coords[d] - lo[d]) / range;
    }
    p.color = palette_color(palette, sum / dims);
  }
  return dataset;
}

}  // namespace dpbench
