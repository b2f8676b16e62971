#include "dpbench/fractal_gen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "dpbench/errors.hpp"
#include "support/fractal_oracles.hpp"

using namespace dpbench;

namespace {

using Coord = std::tuple<double, double, double>;

std::vector<Coord> coords_of(const Dataset& ds) {
  std::vector<Coord> out;
  for (const auto& p : ds.points) out.emplace_back(p.coords[0], p.coords[1], p.coords[2]);
  return out;
}

}  // namespace

// --- random 2D ------------------------------------------------------------

TEST(Random2d, UniqueAndInOpenInterval) {
  const Dataset ds = gen_random_2d(10000, 7);
  ASSERT_EQ(ds.points.size(), 10000u);
  EXPECT_EQ(ds.dims, 2);
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (const auto& p : ds.points) {
    EXPECT_GT(p.coords[0], -1.0);
    EXPECT_LT(p.coords[0], 1.0);
    EXPECT_GT(p.coords[1], -1.0);
    EXPECT_LT(p.coords[1], 1.0);
    seen.emplace(std::bit_cast<std::uint64_t>(p.coords[0]), std::bit_cast<std::uint64_t>(p.coords[1]));
  }
  EXPECT_EQ(seen.size(), ds.points.size());
}

TEST(Random2d, SinglePoint) {
  const Dataset ds = gen_random_2d(1, 1);
  ASSERT_EQ(ds.points.size(), 1u);
  EXPECT_LT(std::fabs(ds.points[0].coords[0]), 1.0);
  EXPECT_LT(std::fabs(ds.points[0].coords[1]), 1.0);
}

TEST(Random2d, DeterministicPerSeed) {
  EXPECT_TRUE(bit_identical(gen_random_2d(5000, 42), gen_random_2d(5000, 42)));
  EXPECT_FALSE(bit_identical(gen_random_2d(5000, 42), gen_random_2d(5000, 43)));
}

TEST(Random2d, ZeroCountRejected) { EXPECT_THROW(gen_random_2d(0, 1), ValidationError); }

// --- Mandelbrot -------------------------------------------------------------

TEST(Mandelbrot, OriginIsInSet) {
  MandelbrotView v{0.0, 0.0, 2.0, 64, 100};
  const EscapeGrid g = mandelbrot_grid(v, Precision::Binary64);
  EXPECT_EQ(mandelbrot_coordinate(0.0, 2.0, 64, 32, Precision::Binary64), 0.0);
  EXPECT_EQ(g.at(32, 32), 100u);
  EXPECT_FALSE(g.escaped_at(32, 32));
}

TEST(Mandelbrot, FarPointEscapesAtFirstIteration) {
  MandelbrotView v{3.0, 0.0, 1e-3, 16, 50};
  const EscapeGrid g = mandelbrot_grid(v, Precision::Binary64);
  EXPECT_EQ(g.at(8, 8), 1u);
  EXPECT_TRUE(g.escaped_at(8, 8));
}

TEST(Mandelbrot, Binary64GridMatchesPerPixelOracle) {
  MandelbrotView v;
  v.width = 96;
  v.zoom = 1e-2;
  const EscapeGrid g = mandelbrot_grid(v, Precision::Binary64);
  for (int row = 0; row < v.width; ++row) {
    for (int col = 0; col < v.width; ++col) {
      const double step = 2.0 * v.zoom / v.width;
      const double cr = v.center_re + (col - v.width / 2.0) * step;
      const double ci = v.center_im + (row - v.width / 2.0) * step;
      double zr = 0, zi = 0;
      std::uint32_t n = v.max_iterations;
      for (int it = 1; it <= v.max_iterations; ++it) {
        const double t = zr * zr - zi * zi + cr;
        zi = 2 * zr * zi + ci;
        zr = t;
        if (zr * zr + zi * zi > 4.0) {
          n = it;
          break;
        }
      }
      ASSERT_EQ(g.at(row, col), n) << row << "," << col;
    }
  }
}

TEST(Mandelbrot, Binary32CoordinatesAreBinary32Values) {
  for (int i = 0; i < 512; ++i) {
    const double c = mandelbrot_coordinate(-0.7436450, 1e-6, 512, i, Precision::Binary32);
    EXPECT_EQ(static_cast<double>(static_cast<float>(c)), c);
  }
}

TEST(Mandelbrot, ParallelMatchesSerial) {
  for (const Precision p : {Precision::Binary32, Precision::Df64, Precision::Binary64}) {
    MandelbrotView v;
    v.width = 128;
    v.zoom = 1e-4;
    const EscapeGrid a = mandelbrot_grid(v, p, Exec::Serial);
    const EscapeGrid b = mandelbrot_grid(v, p, Exec::Parallel);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.escaped, b.escaped);
  }
}

TEST(Mandelbrot, InvalidViews) {
  EXPECT_THROW(mandelbrot_grid(MandelbrotView{0, 0, 0.0, 64, 10}, Precision::Binary64), ValidationError);
  EXPECT_THROW(mandelbrot_grid(MandelbrotView{0, 0, 1.0, 1, 10}, Precision::Binary64), ValidationError);
  EXPECT_THROW(mandelbrot_grid(MandelbrotView{0, 0, 1.0, 64, 0}, Precision::Binary64), ValidationError);
}

// --- Mandelbulb ---------------------------------------------------------------

TEST(Mandelbulb, OriginAlwaysInSet) {
  for (double power : {2.0, 3.0, 8.0}) {
    MandelbulbParams p;
    p.power = power;
    p.resolution = 3;  // lattice {-1.2, 0, 1.2}
    const Dataset ds = mandelbulb_points(p);
    const auto pts = coords_of(ds);
    EXPECT_NE(std::find(pts.begin(), pts.end(), Coord{0.0, 0.0, 0.0}), pts.end());
  }
}

TEST(Mandelbulb, PointsOutsideBailoutExcluded) {
  MandelbulbParams p;
  p.resolution = 16;
  for (const auto& pt : mandelbulb_points(p).points) {
    const auto& c = pt.coords;
    EXPECT_LT(c[0] * c[0] + c[1] * c[1] + c[2] * c[2], p.bailout);
  }
}

TEST(Mandelbulb, MatchesLatticeOracleAtResolution32) {
  MandelbulbParams p;
  p.resolution = 32;
  const Dataset ds = mandelbulb_points(p);
  std::vector<Coord> want;
  for (int i = 0; i < p.resolution; ++i)
    for (int j = 0; j < p.resolution; ++j)
      for (int k = 0; k < p.resolution; ++k) {
        const double n = p.resolution - 1;
        const double x = std::lerp(p.x_min, p.x_max, i / n);
        const double y = std::lerp(p.y_min, p.y_max, j / n);
        const double z = std::lerp(p.z_min, p.z_max, k / n);
        if (oracle::bulb_member(x, y, z, p.max_iterations, p.bailout, p.power)) want.emplace_back(x, y, z);
      }
  EXPECT_FALSE(want.empty());
  EXPECT_EQ(coords_of(ds), want);
}

TEST(Mandelbulb, LatticeIsInclusive) {
  EXPECT_EQ(lattice_coordinate(-1.2, 1.2, 64, 0), -1.2);
  EXPECT_EQ(lattice_coordinate(-1.2, 1.2, 64, 63), 1.2);
}

TEST(Mandelbulb, EmptyResultIsNotAnError) {
  MandelbulbParams p;
  p.bailout = 1e-9;
  p.resolution = 4;  // lattice excludes the origin
  const Dataset ds = mandelbulb_points(p);
  EXPECT_TRUE(ds.points.empty());
}

TEST(Mandelbulb, InvalidParams) {
  MandelbulbParams p;
  p.resolution = 1;
  EXPECT_THROW(mandelbulb_points(p), ValidationError);
  p = {};
  p.x_min = 2.0;
  EXPECT_THROW(mandelbulb_points(p), ValidationError);
  p = {};
  p.bailout = 0.0;
  EXPECT_THROW(mandelbulb_points(p), ValidationError);
}

// --- quaternion Julia -----------------------------------------------------------

TEST(Julia, HamiltonProductBasis) {
  const Quaternion i{1, 0, 0, 0}, j{0, 1, 0, 0}, k{0, 0, 1, 0};
  const Quaternion ij = i * j;
  EXPECT_EQ(std::make_tuple(ij.x, ij.y, ij.z, ij.w), std::make_tuple(0.0, 0.0, 1.0, 0.0));
  const Quaternion ii = i * i;
  EXPECT_EQ(ii.w, -1.0);
  const Quaternion ijk = ij * k;
  EXPECT_EQ(ijk.w, -1.0);
}

TEST(Julia, ZeroConstantKeepsOriginBounded) {
  JuliaParams p;
  p.c = {0, 0, 0, 0};
  p.resolution = 4;
  const auto pts = coords_of(julia_quat_points(p));
  EXPECT_EQ(std::find(pts.begin(), pts.end(), Coord{0.0, 0.0, 0.0}), pts.end());
}

TEST(Julia, EscapeAtEntryHasCountZero) {
  JuliaParams p;
  p.resolution = 2;
  p.extent = 5.0;
  const Dataset ds = julia_quat_points(p);
  const auto pts = coords_of(ds);
  const auto it = std::find(pts.begin(), pts.end(), Coord{5.0, 5.0, 5.0});
  ASSERT_NE(it, pts.end());
  EXPECT_EQ(ds.escape_counts[static_cast<std::size_t>(it - pts.begin())], 0u);
}

TEST(Julia, MatchesLatticeOracleAtResolution32) {
  JuliaParams p;  // c = (-0.2, 0.6, 0.2, 0.2), threshold 4, max_iter 32
  ASSERT_EQ(p.resolution, 32);
  const Dataset ds = julia_quat_points(p);
  std::vector<Coord> want;
  std::vector<std::uint32_t> counts;
  for (int i = -p.resolution; i <= p.resolution; ++i)
    for (int j = -p.resolution; j <= p.resolution; ++j)
      for (int k = -p.resolution; k <= p.resolution; ++k) {
        const double x = p.extent * (static_cast<double>(i) / p.resolution);
        const double y = p.extent * (static_cast<double>(j) / p.resolution);
        const double z = p.extent * (static_cast<double>(k) / p.resolution);
        bool escaped = false;
        const int n = oracle::julia_escape(x, y, z, p, escaped);
        if (escaped) {
          want.emplace_back(x, y, z);
          counts.push_back(static_cast<std::uint32_t>(n));
        }
      }
  EXPECT_FALSE(want.empty());
  EXPECT_EQ(coords_of(ds), want);
  EXPECT_EQ(ds.escape_counts, counts);
}

// --- Menger -------------------------------------------------------------------

TEST(Menger, KeepsTwentyOfTwentySeven) {
  int kept = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const int centred = (i == 1) + (j == 1) + (k == 1);
        kept += centred < 2;
      }
  EXPECT_EQ(kept, 20);
  EXPECT_EQ(menger_leaf_count(1), 20u);
}

TEST(Menger, CountLaw) {
  std::uint64_t cubes = 1;
  for (int n = 0; n <= 3; ++n) {
    MengerParams p;
    p.max_iterations = n;
    const Dataset ds = menger_points(p);
    EXPECT_EQ(menger_leaf_count(n), cubes);
    EXPECT_EQ(ds.points.size(), 8 * cubes) << n;
    cubes *= 20;
  }
}

TEST(Menger, CornersInsideRootCube) {
  MengerParams p;
  p.max_iterations = 2;
  p.origin = {1.0, -2.0, 0.5};
  p.cube_size = 3.0;
  for (const auto& pt : menger_points(p).points)
    for (int d = 0; d < 3; ++d) {
      EXPECT_GE(pt.coords[d], p.origin[d]);
      EXPECT_LE(pt.coords[d], p.origin[d] + p.cube_size);
    }
}

TEST(Menger, DepthOneCornersOnThirdsLattice) {
  MengerParams p;
  p.max_iterations = 1;
  p.cube_size = 3.0;
  const Dataset ds = menger_points(p);
  const auto pts = coords_of(ds);
  const std::set<Coord> unique(pts.begin(), pts.end());
  std::set<Coord> want;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if ((i == 1) + (j == 1) + (k == 1) >= 2) continue;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) want.emplace(i + a, j + b, k + c);
      }
  EXPECT_EQ(unique, want);
  p.dedup = true;
  EXPECT_EQ(menger_points(p).points.size(), want.size());
}

TEST(Menger, TooDeepIsCapacityError) {
  MengerParams p;
  p.max_iterations = kMaxMengerDepth + 1;
  EXPECT_THROW(menger_points(p), CapacityError);
}

// --- Sierpinski -----------------------------------------------------------------

TEST(Sierpinski, CountLaw) {
  for (int n = 0; n <= 5; ++n) {
    SierpinskiParams p;
    p.n = n;
    const Dataset ds = sierpinski_points(p);
    const std::uint64_t tetra = std::uint64_t{1} << (2 * n);
    EXPECT_EQ(sierpinski_leaf_count(n), tetra);
    EXPECT_EQ(ds.points.size(), 4 * tetra);
  }
}

TEST(Sierpinski, DepthOneMatchesMidpointConstruction) {
  SierpinskiParams p;
  p.n = 1;
  const auto& v = p.vertices;
  auto mid = [&](int a, int b) {
    return Coord{(v[a][0] + v[b][0]) / 2, (v[a][1] + v[b][1]) / 2, (v[a][2] + v[b][2]) / 2};
  };
  std::vector<Coord> want;
  for (int c = 0; c < 4; ++c)
    for (int w = 0; w < 4; ++w) want.push_back(w == c ? Coord{v[c][0], v[c][1], v[c][2]} : mid(c, w));
  EXPECT_EQ(coords_of(sierpinski_points(p)), want);
}

TEST(Sierpinski, PointsInsideRootHull) {
  SierpinskiParams p;
  p.n = 4;
  // Root vertices (+-1) with even sign parity: the hull is |x|+|y|+|z| style
  // half-spaces; check via barycentric coordinates.
  const auto& v = p.vertices;
  for (const auto& pt : sierpinski_points(p).points) {
    // Solve pt = v0 + a(v1-v0) + b(v2-v0) + c(v3-v0) with Cramer's rule.
    double m[3][3], r[3];
    for (int d = 0; d < 3; ++d) {
      m[d][0] = v[1][d] - v[0][d];
      m[d][1] = v[2][d] - v[0][d];
      m[d][2] = v[3][d] - v[0][d];
      r[d] = pt.coords[d] - v[0][d];
    }
    auto det3 = [](double a[3][3]) {
      return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
             a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double det = det3(m);
    double bary[4];
    double sum = 0.0;
    for (int col = 0; col < 3; ++col) {
      double t[3][3];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) t[a][b] = (b == col) ? r[a] : m[a][b];
      bary[col + 1] = det3(t) / det;
      sum += bary[col + 1];
    }
    bary[0] = 1.0 - sum;
    for (double b : bary) EXPECT_GE(b, -1e-12);
  }
}

TEST(Sierpinski, Errors) {
  SierpinskiParams p;
  p.n = kMaxSierpinskiDepth + 1;
  EXPECT_THROW(sierpinski_points(p), CapacityError);
  p = {};
  p.vertices[3] = p.vertices[0];
  EXPECT_THROW(sierpinski_points(p), ValidationError);
}

// --- parallel/serial and determinism ------------------------------------------

TEST(Generators, ParallelMatchesSerialBitwise) {
  MandelbulbParams mb;
  mb.resolution = 24;
  EXPECT_TRUE(bit_identical(mandelbulb_points(mb, Exec::Serial), mandelbulb_points(mb, Exec::Parallel)));
  JuliaParams jp;
  jp.resolution = 12;
  EXPECT_TRUE(bit_identical(julia_quat_points(jp, Exec::Serial), julia_quat_points(jp, Exec::Parallel)));
  MengerParams mp;
  mp.max_iterations = 3;
  mp.cube_size = 0.7;
  EXPECT_TRUE(bit_identical(menger_points(mp, Exec::Serial), menger_points(mp, Exec::Parallel)));
  SierpinskiParams sp;
  sp.n = 6;
  EXPECT_TRUE(bit_identical(sierpinski_points(sp, Exec::Serial), sierpinski_points(sp, Exec::Parallel)));
}

TEST(Generators, RepeatedRunsIdentical) {
  JuliaParams jp;
  jp.resolution = 10;
  EXPECT_TRUE(bit_identical(julia_quat_points(jp), julia_quat_points(jp)));
  EXPECT_TRUE(bit_identical(menger_points({}), menger_points({})));
}

// --- colorize -----------------------------------------------------------------

TEST(Colorize, SinglePointGetsRampStart) {
  Dataset ds;
  ds.points.resize(1);
  ds.points[0].coords = {0.3, -0.2, 5.0};
  const Dataset c = colorize(ds);
  const auto start = palette_color(Palette::Spectral, 0.0);
  EXPECT_EQ(c.points[0].color, start);
  EXPECT_EQ(start, (std::array<double, 3>{0.0, 0.0, 1.0}));
}

TEST(Colorize, IdempotentAndInRange) {
  const Dataset ds = gen_random_2d(2000, 3);
  const Dataset once = colorize(ds);
  EXPECT_TRUE(bit_identical(once, colorize(once)));
  for (const Palette pal : {Palette::Spectral, Palette::Grayscale}) {
    for (const auto& p : colorize(ds, pal).points)
      for (double ch : p.color) {
        EXPECT_GE(ch, 0.0);
        EXPECT_LE(ch, 1.0);
      }
  }
}

TEST(Colorize, PaletteEndpoints) {
  EXPECT_EQ(palette_color(Palette::Spectral, 1.0), (std::array<double, 3>{1.0, 0.0, 0.0}));
  EXPECT_EQ(palette_color(Palette::Grayscale, 0.25), (std::array<double, 3>{0.25, 0.25, 0.25}));
  EXPECT_EQ(palette_color(Palette::Spectral, -3.0), palette_color(Palette::Spectral, 0.0));
}

TEST(Colorize, EmptyRejected) { EXPECT_THROW(colorize(Dataset{}), ValidationError); }
