#include "dpbench/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dpbench/bench_report.hpp"
#include "dpbench/dataset_io.hpp"
#include "dpbench/errors.hpp"
#include "dpbench/fractal_gen.hpp"
#include "dpbench/precision_lab.hpp"

namespace dpbench::cli {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e)) {
    return kExitData;
  }
  if (dynamic_cast<const DeviceError*>(&e) || dynamic_cast<const FeatureError*>(&e) ||
      dynamic_cast<const ShaderError*>(&e)) {
    return kExitDevice;
  }
  return kExitFailure;
}

namespace {

constexpr const char* kGenerators = "random2d, mandelbulb, julia, menger, sierpinski";

struct GenerateArgs {
  std::string generator;
  std::string out;
  std::size_t count = 10000;
  std::uint64_t seed = 1;
  std::optional<int> iterations;
  std::optional<int> resolution;
  double power = 8.0;
  double bailout = 4.0;
  double extent = 1.5;
  double size = 1.0;
  std::string palette = "spectral";
};

struct ConvertArgs {
  std::string in;
  std::string out;
};

struct AnalyzeArgs {
  std::string dataset;
  double offset = 0.0;
  int width = 1024;
  int height = 1024;
  std::string out = "error_report.csv";
};

struct BenchArgs {
  std::vector<std::string> datasets;
  std::vector<std::string> variants{"emulated64", "native64"};
  std::size_t frames = 30;
  int width = 1024;
  int height = 1024;
  std::string out = "bench_report.csv";
  std::string markdown;
  bool headless = true;
  bool wall_clock = false;
  std::optional<std::size_t> device_index;
  std::string shader_dir;
};

struct MandelbrotArgs {
  std::vector<double> zooms{1e-1, 1e-4, 1e-6};
  std::vector<std::string> precisions{"binary32", "binary64"};
  double center_re = MandelbrotView{}.center_re;
  double center_im = MandelbrotView{}.center_im;
  int width = 512;
  int max_iterations = 256;
  std::string out_dir = "mandelbrot";
  std::string format = "ppm";
};

struct ViewArgs {
  std::string dataset;
  std::string variant = "native64";
  std::optional<std::size_t> device_index;
};

void print_stats(std::ostream& out, const Dataset& ds, const std::string& path) {
  const DatasetStats st = dataset_stats(ds);
  static const char* axes = "xyz";
  out << "wrote " << st.count << " points (" << ds.dims << "D) to " << path << "\n";
  for (std::size_t d = 0; d < st.bbox.size(); ++d) {
    out << "  " << axes[d] << " in [" << st.bbox[d].min << ", " << st.bbox[d].max << "]\n";
  }
  out << "  checksum " << std::hex << std::setw(16) << std::setfill('0') << st.checksum << std::dec
      << std::setfill(' ') << "\n";
}

Dataset load_dataset(const std::string& path) {
  if (fs::path(path).extension() == ".glb") return extract_points_from_glb_file(path);
  return read_csv_file(path);
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  Dataset ds;
  const Palette palette = a.palette == "grayscale"  ? Palette::Grayscale
                          : a.palette == "spectral" ? Palette::Spectral
                                                    : throw UsageError("unknown palette '" + a.palette +
                                                                       "' (expected spectral or grayscale)");
  if (a.generator == "random2d") {
    ds = gen_random_2d(a.count, a.seed);
  } else if (a.generator == "mandelbulb") {
    MandelbulbParams p;
    p.max_iterations = a.iterations.value_or(p.max_iterations);
    p.resolution = a.resolution.value_or(p.resolution);
    p.power = a.power;
    p.bailout = a.bailout;
    ds = mandelbulb_points(p);
  } else if (a.generator == "julia") {
    JuliaParams p;
    p.max_iter = a.iterations.value_or(p.max_iter);
    p.resolution = a.resolution.value_or(p.resolution);
    p.threshold = a.bailout;
    p.extent = a.extent;
    ds = julia_quat_points(p);
  } else if (a.generator == "menger") {
    MengerParams p;
    p.max_iterations = a.iterations.value_or(p.max_iterations);
    p.cube_size = a.size;
    ds = menger_points(p);
  } else if (a.generator == "sierpinski") {
    SierpinskiParams p;
    p.n = a.iterations.value_or(p.n);
    ds = sierpinski_points(p);
  } else {
    throw UsageError("unknown generator '" + a.generator + "'; valid generators: " + kGenerators);
  }
  if (palette != Palette::Spectral) ds = colorize(std::move(ds), palette);
  const std::string path = a.out.empty() ? a.generator + ".csv" : a.out;
  write_csv_file(ds, path);
  print_stats(out, ds, path);
  return kExitOk;
}

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  Dataset ds;
  try {
    ds = extract_points_from_glb_file(a.in);
  } catch (const ParseError& e) {
    throw ParseError(a.in + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(a.in + ": " + e.what());
  }
  const std::string path = a.out.empty() ? fs::path(a.in).replace_extension(".csv").string() : a.out;
  write_csv_file(ds, path);
  print_stats(out, ds, path);
  return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const Dataset ds = load_dataset(a.dataset);
  const TransformStack stack = a.offset == 0.0 ? TransformStack::identity(a.width, a.height)
                                               : TransformStack::translated(a.offset, a.width, a.height);
  const ErrorReport r32 = error_report(ds, stack, Precision::Binary32);
  const ErrorReport rdf = error_report(ds, stack, Precision::Df64);

  std::ofstream file(a.out);
  if (!file) throw IoError("cannot write '" + a.out + "'");
  file << error_report_csv_header() << '\n'
       << error_report_csv_row(Precision::Binary32, r32) << '\n'
       << error_report_csv_row(Precision::Df64, rdf) << '\n';
  if (!file) throw IoError("write failed for '" + a.out + "'");

  out << "transform error vs binary64, " << ds.points.size() << " points, offset " << a.offset << ", viewport "
      << a.width << "x" << a.height << "\n";
  for (const auto& [p, r] : {std::pair{Precision::Binary32, r32}, std::pair{Precision::Df64, rdf}}) {
    out << "  " << std::setw(8) << to_string(p) << ": max " << r.max_pixel_error << " px, max ndc "
        << r.max_abs_ndc_error << ", rms ndc " << r.rms_ndc_error << ", max ulp " << r.max_ulp_distance
        << ", skipped " << r.skipped_count << "\n";
  }
  out << "report written to " << a.out << "\n";
  return kExitOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.frames == 0) throw UsageError("--frames must be at least 1");
  if (a.datasets.empty()) throw UsageError("bench needs at least one dataset");
  if (!a.headless) throw UsageError("bench renders offscreen only; drop --no-headless");
  std::vector<render::VariantKind> variants;
  for (const auto& v : a.variants) variants.push_back(render::parse_variant(v));

  std::vector<NamedDataset> datasets;
  for (const auto& path : a.datasets) datasets.push_back({fs::path(path).stem().string(), load_dataset(path)});

  render::ContextOptions opts;
  opts.device_index = a.device_index;
  opts.use_timestamps = !a.wall_clock;
  if (!a.shader_dir.empty()) opts.shader_dir = a.shader_dir;
  const render::Context ctx = render::init_context(opts);

  const BenchReport report = run_bench(ctx, datasets, variants, a.frames, {a.width, a.height});
  for (const auto& row : report.rows) {
    if (!row.supported) err << "warning: " << row.dataset << " / " << render::to_string(row.variant) << ": " << row.note << "\n";
  }

  const std::string md_path = a.markdown.empty() ? fs::path(a.out).replace_extension(".md").string() : a.markdown;
  for (const auto& [path, text] : {std::pair{a.out, bench_report_csv(report)}, std::pair{md_path, bench_report_markdown(report)}}) {
    std::ofstream f(path);
    if (!f || !(f << text)) throw IoError("cannot write '" + path + "'");
  }
  out << bench_report_markdown(report) << "\nreport written to " << a.out << " and " << md_path << "\n";
  return kExitOk;
}

int cmd_mandelbrot(const MandelbrotArgs& a, std::ostream& out) {
  ImageFormat format;
  if (a.format == "ppm") {
    format = ImageFormat::Ppm;
  } else if (a.format == "png") {
    format = ImageFormat::Png;
  } else {
    throw UsageError("unknown image format '" + a.format + "' (expected ppm or png)");
  }
  std::vector<Precision> precisions;
  for (const auto& p : a.precisions) precisions.push_back(parse_precision(p));

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create '" + a.out_dir + "': " + ec.message());

  std::ostringstream csv;
  csv << "precision,zoom,width,collapse_ratio,image\n";
  for (const double zoom : a.zooms) {
    for (const Precision p : precisions) {
      MandelbrotView view;
      view.center_re = a.center_re;
      view.center_im = a.center_im;
      view.zoom = zoom;
      view.width = a.width;
      view.max_iterations = a.max_iterations;
      view.validate();
      const std::string file = "mandelbrot_" + std::string(to_string(p)) + "_zoom" + shortest(zoom) + "." + a.format;
      write_image(mandelbrot_image(view, p), fs::path(a.out_dir) / file, format);
      const double ratio = collapse_ratio(view, p);
      csv << to_string(p) << ',' << shortest(zoom) << ',' << a.width << ',' << shortest(ratio) << ',' << file << '\n';
      out << std::setw(8) << to_string(p) << " zoom " << std::setw(6) << shortest(zoom) << "  collapse "
          << std::fixed << std::setprecision(4) << ratio << std::defaultfloat << "  " << file << "\n";
    }
  }
  const fs::path csv_path = fs::path(a.out_dir) / "collapse.csv";
  std::ofstream f(csv_path);
  if (!f || !(f << csv.str())) throw IoError("cannot write '" + csv_path.string() + "'");
  return kExitOk;
}

int cmd_view(const ViewArgs& a, std::ostream& out) {
  const Dataset ds = load_dataset(a.dataset);
  const auto variant = render::PipelineVariant::make(render::parse_variant(a.variant), ds.dims);
  render::ContextOptions opts;
  opts.headless = false;
  opts.device_index = a.device_index;
  const render::Context ctx = render::init_context(opts);
  const auto pipeline = render::build_pipeline(ctx, variant);
  (void)pipeline;
  out << "viewing " << ds.points.size() << " points\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emulated vs native double-precision point-cloud benchmark", "dpbench"};
  app.set_version_flag("--version", tool_version());
  app.set_config("--config", "", "TOML file pre-setting any flag (command line wins)");
  app.require_subcommand(1, 1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a dataset CSV");
  g->add_option("generator", gen.generator, std::string("One of: ") + kGenerators)->required();
  g->add_option("-o,--out", gen.out, "Output CSV (default <generator>.csv)");
  g->add_option("--count", gen.count, "random2d: number of points")->capture_default_str();
  g->add_option("--seed", gen.seed, "random2d: RNG seed")->capture_default_str();
  g->add_option("--iterations", gen.iterations,
                "Iteration budget (mandelbulb 12, julia 32) or recursion depth (menger 3, sierpinski 5)");
  g->add_option("--resolution", gen.resolution, "Lattice samples per axis (mandelbulb 64) or half-count (julia 32)");
  g->add_option("--power", gen.power, "mandelbulb: exponent")->capture_default_str();
  g->add_option("--bailout", gen.bailout, "mandelbulb/julia: squared-radius escape threshold")->capture_default_str();
  g->add_option("--extent", gen.extent, "julia: lattice half-extent")->capture_default_str();
  g->add_option("--size", gen.size, "menger: root cube edge length")->capture_default_str();
  g->add_option("--palette", gen.palette, "spectral or grayscale")->capture_default_str();

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert", "Extract the points of a GLB model into CSV");
  c->add_option("input", conv.in, "GLB file")->required();
  c->add_option("output", conv.out, "CSV file (default: input with .csv extension)");

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "Transform-error report for binary32 and df64 against binary64");
  a->add_option("dataset", an.dataset, "CSV or GLB dataset")->required();
  a->add_option("--offset", an.offset, "Translation applied on every axis (0 = identity)")->capture_default_str();
  a->add_option("--width", an.width, "Viewport width")->capture_default_str();
  a->add_option("--height", an.height, "Viewport height")->capture_default_str();
  a->add_option("-o,--out", an.out, "Report CSV")->capture_default_str();

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "Render-time and framerate report per dataset and variant");
  b->add_option("datasets", be.datasets, "CSV or GLB datasets, in report order")->required();
  b->add_option("--variants", be.variants, "emulated64, native64, emulated64-pairwise")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("--frames", be.frames, "Frames measured per row (median reported)")->capture_default_str();
  b->add_option("--width", be.width, "Render target width")->capture_default_str();
  b->add_option("--height", be.height, "Render target height")->capture_default_str();
  b->add_option("-o,--out", be.out, "Report CSV")->capture_default_str();
  b->add_option("--markdown", be.markdown, "Markdown table (default: report path with .md)");
  b->add_flag("--headless,!--no-headless", be.headless, "Offscreen rendering (the only mode bench supports)");
  b->add_flag("--wall-clock", be.wall_clock, "Time frames with the host clock instead of device timestamps");
  b->add_option("--device-index", be.device_index, "Device override (also DPBENCH_DEVICE_INDEX)");
  b->add_option("--shader-dir", be.shader_dir, "Directory holding SPIR-V modules to validate and load");

  MandelbrotArgs mb;
  auto* m = app.add_subcommand("mandelbrot", "Escape-time images and coordinate collapse per precision");
  m->add_option("--zooms", mb.zooms, "Half-widths of the complex window")->delimiter(',')->capture_default_str();
  m->add_option("--precisions", mb.precisions, "binary32, df64, binary64")->delimiter(',')->capture_default_str();
  m->add_option("--center-re", mb.center_re, "Real part of the view center")->capture_default_str();
  m->add_option("--center-im", mb.center_im, "Imaginary part of the view center")->capture_default_str();
  m->add_option("--width", mb.width, "Image width and height in pixels")->capture_default_str();
  m->add_option("--max-iterations", mb.max_iterations, "Iteration budget")->capture_default_str();
  m->add_option("-o,--out-dir", mb.out_dir, "Output directory")->capture_default_str();
  m->add_option("--format", mb.format, "ppm or png")->capture_default_str();

  ViewArgs vw;
  auto* v = app.add_subcommand("view", "Interactive orbit-camera viewer");
  v->add_option("dataset", vw.dataset, "CSV or GLB dataset")->required();
  v->add_option("--variant", vw.variant, "native64 or emulated64")->capture_default_str();
  v->add_option("--device-index", vw.device_index, "Device override (also DPBENCH_DEVICE_INDEX)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*c) return cmd_convert(conv, out);
    if (*a) return cmd_analyze(an, out);
    if (*b) return cmd_bench(be, out, err);
    if (*m) return cmd_mandelbrot(mb, out);
    if (*v) return cmd_view(vw, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace dpbench::cli
