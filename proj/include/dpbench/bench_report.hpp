#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dpbench/render/engine.hpp"

namespace dpbench {

struct BenchRow {
  std::string dataset;
  std::size_t vertex_count = 0;
  render::VariantKind variant = render::VariantKind::Emulated64;
  bool supported = true;
  double gpu_render_ms = 0.0;  // median over the measured frames
  double fps = 0.0;
  std::string note;  // reason when unsupported
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string device;
  std::string timestamp;  // UTC, ISO 8601
  std::string tool_version;
  std::size_t frames = 0;
  render::TimingSource timing_source = render::TimingSource::DeviceTimestamps;

  /// Supported rows need positive ms and fps.
  void validate() const;
};

struct NamedDataset {
  std::string name;
  Dataset dataset;
};

/// Rows are grouped by variant (in the order given), datasets in input order
/// within each group. A variant the device cannot build yields unsupported
/// rows instead of an error.
BenchReport run_bench(const render::Context& ctx, const std::vector<NamedDataset>& datasets,
                      const std::vector<render::VariantKind>& variants, std::size_t frames,
                      render::Extent extent = {});

std::string bench_report_csv(const BenchReport& report);
std::string bench_report_markdown(const BenchReport& report);

std::string utc_timestamp();
std::string tool_version();

}  // namespace dpbench
