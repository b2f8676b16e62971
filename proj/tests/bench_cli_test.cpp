#include "dpbench/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dpbench/bench_report.hpp"
#include "dpbench/dataset_io.hpp"
#include "dpbench/errors.hpp"
#include "dpbench/fractal_gen.hpp"
#include "support/glb_builder.hpp"

using namespace dpbench;
namespace fs = std::filesystem;

namespace {

struct Result {
  int rc = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("dpbench_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "dpbench");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write_bytes(const std::string& name, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }

  fs::path dir_;
};

}  // namespace

TEST(CliExitCodes, MapErrorKinds) {
  EXPECT_EQ(cli::exit_code_for(UsageError("x")), cli::kExitUsage);
  EXPECT_EQ(cli::exit_code_for(IoError("x")), cli::kExitIo);
  EXPECT_EQ(cli::exit_code_for(ParseError("x")), cli::kExitData);
  EXPECT_EQ(cli::exit_code_for(SchemaError("x")), cli::kExitData);
  EXPECT_EQ(cli::exit_code_for(ValidationError("x")), cli::kExitData);
  EXPECT_EQ(cli::exit_code_for(DeviceError("x")), cli::kExitDevice);
  EXPECT_EQ(cli::exit_code_for(FeatureError("x")), cli::kExitDevice);
  EXPECT_EQ(cli::exit_code_for(ShaderError("x")), cli::kExitDevice);
  EXPECT_EQ(cli::exit_code_for(std::runtime_error("x")), cli::kExitFailure);
}

TEST_F(Cli, NoSubcommandIsUsageError) {
  EXPECT_EQ(run({}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).rc, cli::kExitUsage);
}

TEST_F(Cli, HelpAndVersion) {
  const Result h = run({"--help"});
  EXPECT_EQ(h.rc, 0);
  EXPECT_NE(h.out.find("generate"), std::string::npos);
  const Result v = run({"--version"});
  EXPECT_EQ(v.rc, 0);
  EXPECT_NE(v.out.find(tool_version()), std::string::npos);
}

// --- generate -----------------------------------------------------------------

TEST_F(Cli, GenerateRandom2dMatchesLibrary) {
  const Result r = run({"generate", "random2d", "--count", "10000", "--seed", "7", "-o", path("r.csv")});
  ASSERT_EQ(r.rc, 0) << r.err;
  const Dataset ds = read_csv_file(path("r.csv"));
  EXPECT_EQ(ds.points.size(), 10000u);
  EXPECT_TRUE(bit_identical(ds, gen_random_2d(10000, 7)));
  EXPECT_NE(r.out.find("10000 points"), std::string::npos);
}

TEST_F(Cli, GenerateMengerDefaults) {
  ASSERT_EQ(run({"generate", "menger", "-o", path("m.csv")}).rc, 0);
  EXPECT_EQ(lines_of(slurp(path("m.csv"))).size(), 64001u);  // header + 8 * 20^3 corners
}

TEST_F(Cli, GenerateDefaultOutputName) {
  const fs::path cwd = fs::current_path();
  fs::current_path(dir_);
  const Result r = run({"generate", "sierpinski", "--iterations", "2"});
  fs::current_path(cwd);
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(read_csv_file(dir_ / "sierpinski.csv").points.size(), 16u * 4u);
}

TEST_F(Cli, GenerateUnknownGeneratorListsValidOnes) {
  const Result r = run({"generate", "bogus", "-o", path("b.csv")});
  EXPECT_EQ(r.rc, cli::kExitUsage);
  for (const char* g : {"random2d", "mandelbulb", "julia", "menger", "sierpinski"}) {
    EXPECT_NE(r.err.find(g), std::string::npos) << g;
  }
  EXPECT_FALSE(fs::exists(path("b.csv")));
}

TEST_F(Cli, GenerateBadPaletteAndUnwritableOutput) {
  EXPECT_EQ(run({"generate", "random2d", "--palette", "neon", "-o", path("x.csv")}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"generate", "random2d", "-o", path("missing_dir/x.csv")}).rc, cli::kExitIo);
}

TEST_F(Cli, GenerateGrayscalePalette) {
  ASSERT_EQ(run({"generate", "mandelbulb", "--resolution", "16", "--palette", "grayscale", "-o", path("g.csv")}).rc, 0);
  const Dataset ds = read_csv_file(path("g.csv"));
  ASSERT_FALSE(ds.points.empty());
  for (const auto& p : ds.points) {
    EXPECT_EQ(p.color[0], p.color[1]);
    EXPECT_EQ(p.color[1], p.color[2]);
  }
}

// --- convert ------------------------------------------------------------------

TEST_F(Cli, ConvertGlbFixture) {
  fixture::GlbPrimitive prim;
  prim.positions = {{0.0f, 0.0f, 0.0f}, {1.0f, 2.0f, 3.0f}, {-0.5f, 0.25f, 8.0f}};
  write_bytes("model.glb", fixture::build_glb({prim}));
  const Result r = run({"convert", path("model.glb")});
  ASSERT_EQ(r.rc, 0) << r.err;
  const Dataset ds = read_csv_file(path("model.csv"));
  ASSERT_EQ(ds.points.size(), 3u);
  EXPECT_EQ(ds.points[2].coords, (std::array<double, 3>{-0.5, 0.25, 8.0}));
}

TEST_F(Cli, ConvertConcatenatesPrimitives) {
  fixture::GlbPrimitive a, b;
  a.positions = {{1.0f, 1.0f, 1.0f}};
  b.positions = {{2.0f, 2.0f, 2.0f}, {3.0f, 3.0f, 3.0f}};
  write_bytes("two.glb", fixture::build_glb({a, b}));
  ASSERT_EQ(run({"convert", path("two.glb"), path("two_out.csv")}).rc, 0);
  const Dataset ds = read_csv_file(path("two_out.csv"));
  ASSERT_EQ(ds.points.size(), 3u);
  EXPECT_EQ(ds.points[0].coords[0], 1.0);
  EXPECT_EQ(ds.points[2].coords[0], 3.0);
}

TEST_F(Cli, ConvertRejectsNonGlb) {
  write_bytes("fake.glb", {'n', 'o', 't', ' ', 'a', ' ', 'g', 'l', 'b', 0, 0, 0});
  const Result r = run({"convert", path("fake.glb")});
  EXPECT_EQ(r.rc, cli::kExitData);
  EXPECT_NE(r.err.find("fake.glb"), std::string::npos);
  EXPECT_EQ(run({"convert", path("absent.glb")}).rc, cli::kExitIo);
}

// --- analyze ------------------------------------------------------------------

TEST_F(Cli, AnalyzeIdentityOnExactLatticeIsErrorFree) {
  ASSERT_EQ(run({"generate", "menger", "--size", "9", "--iterations", "2", "-o", path("m.csv")}).rc, 0);
  const Result r = run({"analyze", path("m.csv"), "-o", path("report.csv")});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto rows = lines_of(slurp(path("report.csv")));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].rfind("binary32,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("df64,", 0), 0u);
  EXPECT_NE(r.out.find("max 0 px"), std::string::npos) << r.out;
}

TEST_F(Cli, AnalyzeFarOffsetShowsDf64Advantage) {
  ASSERT_EQ(run({"generate", "random2d", "--count", "2000", "-o", path("r.csv")}).rc, 0);
  ASSERT_EQ(run({"analyze", path("r.csv"), "--offset", "1e6", "-o", path("far.csv")}).rc, 0);
  const auto rows = lines_of(slurp(path("far.csv")));
  ASSERT_EQ(rows.size(), 3u);
  const auto header = lines_of(slurp(path("far.csv")))[0];
  // max_pixel_error column
  auto column = [&](const std::string& row, const std::string& name) {
    std::vector<std::string> h, v;
    std::string cell;
    for (std::istringstream s(header); std::getline(s, cell, ',');) h.push_back(cell);
    for (std::istringstream s(row); std::getline(s, cell, ',');) v.push_back(cell);
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] == name) return std::stod(v.at(i));
    ADD_FAILURE() << "no column " << name << " in " << header;
    return 0.0;
  };
  const double b32 = column(rows[1], "max_pixel_error");
  const double df = column(rows[2], "max_pixel_error");
  EXPECT_GT(b32, 1.0);
  EXPECT_LE(df * 1e3, b32);
}

TEST_F(Cli, AnalyzeMissingFileIsIoError) {
  EXPECT_EQ(run({"analyze", path("nope.csv")}).rc, cli::kExitIo);
}

// --- bench --------------------------------------------------------------------

TEST_F(Cli, BenchWritesCsvAndMarkdown) {
  ASSERT_EQ(run({"generate", "random2d", "--count", "5000", "-o", path("pts.csv")}).rc, 0);
  ASSERT_EQ(run({"generate", "sierpinski", "--iterations", "3", "-o", path("tet.csv")}).rc, 0);
  // Mixed dims need separate invocations; 2D first.
  const Result r = run({"bench", path("pts.csv"), "--frames", "3", "--width", "128", "--height", "128", "-o",
                        path("bench.csv")});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto rows = lines_of(slurp(path("bench.csv")));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "dataset,vertex_count,variant,gpu_render_ms_median,fps,status,device,tool_version,timestamp");
  EXPECT_EQ(rows[1].rfind("pts,5000,emulated64,", 0), 0u) << rows[1];
  EXPECT_EQ(rows[2].rfind("pts,5000,native64,", 0), 0u) << rows[2];
  const std::string md = slurp(path("bench.md"));
  EXPECT_NE(md.find("Rendering Time (milliseconds)"), std::string::npos);
  EXPECT_NE(md.find("5000 vertices of pts"), std::string::npos);

  ASSERT_EQ(run({"bench", path("tet.csv"), "--frames", "2", "--width", "64", "--height", "64", "--variants",
                 "emulated64-pairwise", "-o", path("tet_bench.csv"), "--markdown", path("tet.md")})
                .rc,
            0);
  const auto tet = lines_of(slurp(path("tet_bench.csv")));
  ASSERT_EQ(tet.size(), 2u);
  EXPECT_EQ(tet[1].rfind("tet,256,emulated64-pairwise,", 0), 0u) << tet[1];
  EXPECT_TRUE(fs::exists(path("tet.md")));
}

TEST_F(Cli, BenchUnsupportedVariantWarnsAndSucceeds) {
  ASSERT_EQ(run({"generate", "random2d", "--count", "100", "-o", path("p.csv")}).rc, 0);
  ::setenv("DPBENCH_DEVICE_INDEX", "1", 1);
  const Result r = run({"bench", path("p.csv"), "--frames", "2", "--width", "32", "--height", "32", "-o",
                        path("b.csv")});
  ::unsetenv("DPBENCH_DEVICE_INDEX");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto rows = lines_of(slurp(path("b.csv")));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NE(rows[1].find(",ok,"), std::string::npos) << rows[1];
  EXPECT_EQ(rows[2].rfind("p,100,native64,,,unsupported,", 0), 0u) << rows[2];
}

TEST_F(Cli, BenchArgumentErrors) {
  ASSERT_EQ(run({"generate", "random2d", "--count", "10", "-o", path("p.csv")}).rc, 0);
  EXPECT_EQ(run({"bench", path("p.csv"), "--frames", "0", "-o", path("b.csv")}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"bench", path("p.csv"), "--variants", "fp16", "-o", path("b.csv")}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"bench", path("p.csv"), "--device-index", "9", "-o", path("b.csv")}).rc, cli::kExitDevice);
  EXPECT_EQ(run({"bench", path("p.csv"), "--no-headless", "-o", path("b.csv")}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"bench", path("p.csv"), "--shader-dir", path("no_shaders"), "--frames", "1", "-o", path("b.csv")}).rc,
            cli::kExitDevice);
}

TEST_F(Cli, ConfigFilePresetsFlagsAndCommandLineWins) {
  {
    std::ofstream cfg(dir_ / "dpbench.toml");
    cfg << "[generate]\ncount = 123\nseed = 9\n";
  }
  ASSERT_EQ(run({"--config", path("dpbench.toml"), "generate", "random2d", "-o", path("a.csv")}).rc, 0);
  EXPECT_TRUE(bit_identical(read_csv_file(path("a.csv")), gen_random_2d(123, 9)));
  ASSERT_EQ(
      run({"--config", path("dpbench.toml"), "generate", "random2d", "--count", "50", "-o", path("b.csv")}).rc, 0);
  EXPECT_TRUE(bit_identical(read_csv_file(path("b.csv")), gen_random_2d(50, 9)));
}

// --- mandelbrot ---------------------------------------------------------------

TEST_F(Cli, MandelbrotImagesAndCollapseTable) {
  const std::string out = path("mb");
  const Result r = run({"mandelbrot", "-o", out});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto rows = lines_of(slurp(fs::path(out) / "collapse.csv"));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "precision,zoom,width,collapse_ratio,image");
  int images = 0;
  for (const auto& e : fs::directory_iterator(out)) images += e.path().extension() == ".ppm";
  EXPECT_EQ(images, 6);
  EXPECT_EQ(rows[1], "binary32,0.1,512,0,mandelbrot_binary32_zoom0.1.ppm");
  EXPECT_EQ(rows[2], "binary64,0.1,512,0,mandelbrot_binary64_zoom0.1.ppm");
  EXPECT_EQ(rows[6], "binary64,1e-06,512,0,mandelbrot_binary64_zoom1e-06.ppm");
  const double deep32 = std::stod(rows[5].substr(rows[5].find(",512,") + 5));
  EXPECT_GE(deep32, 0.9);

  const std::string first = slurp(fs::path(out) / "mandelbrot_binary32_zoom1e-06.ppm");
  ASSERT_EQ(run({"mandelbrot", "-o", out}).rc, 0);
  EXPECT_EQ(slurp(fs::path(out) / "mandelbrot_binary32_zoom1e-06.ppm"), first);
}

TEST_F(Cli, MandelbrotPngAndBadFormat) {
  ASSERT_EQ(run({"mandelbrot", "--width", "32", "--zooms", "0.5", "--precisions", "df64", "--format", "png", "-o",
                 path("png")})
                .rc,
            0);
  const std::string png = slurp(fs::path(path("png")) / "mandelbrot_df64_zoom0.5.png");
  EXPECT_EQ(png.substr(1, 3), "PNG");
  EXPECT_EQ(run({"mandelbrot", "--format", "gif", "-o", path("gif")}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"mandelbrot", "--width", "0", "-o", path("zero")}).rc, cli::kExitData);
}

// --- view ---------------------------------------------------------------------

TEST_F(Cli, ViewNeedsAWindowSystem) {
  ASSERT_EQ(run({"generate", "random2d", "--count", "10", "-o", path("p.csv")}).rc, 0);
  const Result r = run({"view", path("p.csv")});
  EXPECT_EQ(r.rc, cli::kExitDevice);
  EXPECT_NE(r.err.find("--headless"), std::string::npos);
}
