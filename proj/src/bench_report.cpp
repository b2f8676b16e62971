#include "dpbench/bench_report.hpp"

#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "dpbench/errors.hpp"

#ifndef DPBENCH_VERSION
#define DPBENCH_VERSION "unknown"
#endif

namespace dpbench {

void BenchReport::validate() const {
  for (const auto& row : rows) {
    if (!row.supported) continue;
    if (!(row.gpu_render_ms > 0.0) || !(row.fps > 0.0) || !std::isfinite(row.gpu_render_ms) || !std::isfinite(row.fps)) {
      throw ValidationError("bench report: row '" + row.dataset + "' has non-positive timing");
    }
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string tool_version() { return DPBENCH_VERSION; }

BenchReport run_bench(const render::Context& ctx, const std::vector<NamedDataset>& datasets,
                      const std::vector<render::VariantKind>& variants, std::size_t frames, render::Extent extent) {
  if (frames == 0) throw UsageError("frames must be at least 1");
  BenchReport report;
  report.device = ctx.describe();
  report.timestamp = utc_timestamp();
  report.tool_version = tool_version();
  report.frames = frames;
  report.timing_source =
      ctx.timestamps_enabled() ? render::TimingSource::DeviceTimestamps : render::TimingSource::WallClock;

  for (const auto kind : variants) {
    for (const auto& [name, ds] : datasets) {
      BenchRow row;
      row.dataset = name;
      row.vertex_count = dataset_stats(ds).count;
      row.variant = kind;
      try {
        const auto variant = render::PipelineVariant::make(kind, ds.dims);
        const auto pipeline = render::build_pipeline(ctx, variant);
        const auto buffer = render::upload_dataset(ctx, ds, variant);
        const auto metrics = render::render_and_measure(ctx, pipeline, buffer, render::frame_dataset(ds), frames, extent);
        row.gpu_render_ms = metrics.gpu_render_ms;
        row.fps = metrics.fps;
      } catch (const FeatureError& e) {
        row.supported = false;
        row.note = e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.validate();
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string bench_report_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "dataset,vertex_count,variant,gpu_render_ms_median,fps,status,device,tool_version,timestamp\n";
  os << std::fixed;
  for (const auto& r : report.rows) {
    os << csv_field(r.dataset) << ',' << r.vertex_count << ',' << render::to_string(r.variant) << ',';
    if (r.supported) {
      os << std::setprecision(3) << r.gpu_render_ms << ',' << std::setprecision(1) << r.fps << ",ok,";
    } else {
      os << ",,unsupported,";
    }
    os << csv_field(report.device) << ',' << report.tool_version << ',' << report.timestamp << '\n';
  }
  return os.str();
}

std::string bench_report_markdown(const BenchReport& report) {
  std::ostringstream os;
  os << "# Render benchmark\n\n"
     << "- device: " << report.device << "\n"
     << "- tool version: " << report.tool_version << "\n"
     << "- timestamp: " << report.timestamp << "\n"
     << "- rendering time: median of " << report.frames << " frames ("
     << (report.timing_source == render::TimingSource::DeviceTimestamps ? "device timestamps" : "wall clock")
     << ")\n";
  os << std::fixed;
  std::string current;
  for (const auto& r : report.rows) {
    const std::string variant(render::to_string(r.variant));
    if (variant != current) {
      current = variant;
      os << "\n## " << variant << "\n\n"
         << "| Dataset Information | Rendering Time (milliseconds) | Framerate (fps) |\n"
         << "|---|---|---|\n";
    }
    os << "| " << r.vertex_count << " vertices of " << r.dataset << " | ";
    if (r.supported) {
      os << std::setprecision(2) << r.gpu_render_ms << " | " << std::setprecision(0) << r.fps << " |\n";
    } else {
      os << "unsupported | unsupported |\n";
    }
  }
  return os.str();
}

}  // namespace dpbench
