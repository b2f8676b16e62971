#pragma once

// Point-cloud rendering through two interchangeable pipeline variants:
// native fp64 (binary64 attributes, binary64 push-constant matrix) and
// emulated df64 (high/low binary32 attribute pairs, binary32 matrix).
//
// The execution backend is a software rasterizer that runs the vertex and
// fragment programs of each variant with the same arithmetic a GPU would use
// (binary32 clip positions, flat point primitives, RGBA8 attachment, LESS
// depth test). It exposes the device capabilities a Vulkan physical device
// would, so feature gating and buffer layouts behave identically.

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dpbench/dataset.hpp"
#include "dpbench/exec.hpp"
#include "dpbench/image.hpp"
#include "dpbench/render/camera.hpp"

namespace dpbench::render {

enum class VariantKind {
  Native64,
  Emulated64,
  // Extension: emulated pairs combined with df64 arithmetic in the vertex
  // stage before the final narrowing.
  Emulated64Pairwise,
};

std::string_view to_string(VariantKind kind);
VariantKind parse_variant(std::string_view text);

enum class AttribFormat { R32G32_SFLOAT, R32G32B32_SFLOAT, R64G64_SFLOAT, R64G64B64_SFLOAT };

std::uint32_t format_bytes(AttribFormat f);
/// Input locations consumed; 64-bit three-component formats take two.
std::uint32_t format_slots(AttribFormat f);

struct VertexAttribute {
  std::string name;
  std::uint32_t location = 0;
  AttribFormat format = AttribFormat::R32G32B32_SFLOAT;
  std::uint32_t offset = 0;
};

inline constexpr const char* kFeatureShaderFloat64 = "shaderFloat64";
inline constexpr const char* kFeatureVertexAttribute64 = "vertexAttribute64bit";

struct PipelineVariant {
  VariantKind kind = VariantKind::Emulated64;
  int dims = 3;
  std::vector<VertexAttribute> vertex_layout;
  std::uint32_t stride = 0;
  std::uint32_t push_constant_size = 0;
  std::vector<std::string> required_device_features;

  /// Layout for `dims`-component positions. Emulated: highPos, lowPos,
  /// highColor, lowColor at locations 0..3. Native: pos at 0, color at the
  /// next free location (2 for 3D positions, 1 for 2D).
  static PipelineVariant make(VariantKind kind, int dims);
};

enum class DeviceType { Discrete, Integrated, Cpu };

struct DeviceCaps {
  std::string name;
  DeviceType type = DeviceType::Cpu;
  bool shader_float64 = true;
  bool vertex_attribute_64bit = true;
  std::uint32_t max_push_constants_size = 128;
  bool timestamp_queries = true;
  double timestamp_period_ns = 1.0;
  std::uint64_t max_allocation_bytes = std::uint64_t{4} << 30;
};

/// Devices visible to this build, in enumeration order.
std::vector<DeviceCaps> enumerate_devices();

/// Preference: discrete > integrated > cpu, then 64-bit shader float support.
std::size_t select_device(const std::vector<DeviceCaps>& devices);

inline constexpr const char* kDeviceIndexEnv = "DPBENCH_DEVICE_INDEX";

struct ContextOptions {
  bool headless = true;
  std::optional<std::size_t> device_index;  // overrides env and preference
  std::optional<DeviceCaps> device;         // inject a device description directly
  std::optional<std::filesystem::path> shader_dir;
  bool use_timestamps = true;
};

struct RenderPass {
  std::uint32_t id = 0;
};

class Context {
 public:
  const DeviceCaps& device() const noexcept { return device_; }
  bool headless() const noexcept { return headless_; }
  std::uint32_t graphics_queue_family() const noexcept { return 0; }
  bool timestamps_enabled() const noexcept { return timestamps_; }
  const std::optional<std::filesystem::path>& shader_dir() const noexcept { return shader_dir_; }
  std::shared_ptr<const RenderPass> render_pass() const noexcept { return render_pass_; }
  std::string describe() const;

 private:
  friend Context init_context(const ContextOptions& options);
  DeviceCaps device_;
  bool headless_ = true;
  bool timestamps_ = true;
  std::optional<std::filesystem::path> shader_dir_;
  std::shared_ptr<const RenderPass> render_pass_;
};

/// Headless contexts render to an offscreen attachment. Windowed mode needs a
/// window system, which this build does not link; requesting it raises
/// DeviceError with guidance.
Context init_context(const ContextOptions& options = {});

struct ShaderModule {
  std::string name;
  std::vector<std::uint32_t> words;  // empty for built-in programs
};

struct Pipeline {
  PipelineVariant variant;
  bool depth_test = true;
  std::shared_ptr<const RenderPass> render_pass;
  ShaderModule vertex;
  ShaderModule fragment;
};

/// Shader file names expected under the shader directory.
std::string shader_file_name(VariantKind kind, bool vertex_stage);

/// Checks the SPIR-V module header (magic, version <= 1.6, word alignment).
std::vector<std::uint32_t> load_spirv(const std::filesystem::path& path, const std::string& module_name);

/// Depth test is enabled for 3D layouts. Throws FeatureError when the device
/// lacks a required feature or the push-constant block exceeds its limit,
/// ShaderError when a SPIR-V module is invalid.
Pipeline build_pipeline(const Context& ctx, const PipelineVariant& variant);

struct VertexBuffer {
  VariantKind kind = VariantKind::Emulated64;
  int dims = 3;
  std::uint32_t stride = 0;
  std::size_t vertex_count = 0;
  std::vector<std::byte> memory;  // device-local contents

  std::size_t byte_size() const noexcept { return memory.size(); }
};

/// Packs through a staging copy. Emulated layouts store the df64 split of
/// every coordinate and color channel; native layouts store binary64 values
/// verbatim. Exceeding the device allocation limit raises CapacityError.
VertexBuffer upload_dataset(const Context& ctx, const Dataset& dataset, const PipelineVariant& variant);

struct Extent {
  int width = 1024;
  int height = 1024;
};

enum class TimingSource { DeviceTimestamps, WallClock };

struct FrameMetrics {
  double gpu_render_ms = 0.0;  // median of per-frame draw durations
  double fps = 0.0;            // frames / wall time of the measurement window
  std::size_t frame_index = 0;
  std::size_t draw_vertex_count = 0;
  TimingSource timing_source = TimingSource::DeviceTimestamps;
};

// Single-producer snapshot of the latest metrics for a reader thread.
class MetricsSnapshot {
 public:
  void publish(const FrameMetrics& m) {
    std::lock_guard lock(mutex_);
    latest_ = m;
  }
  std::optional<FrameMetrics> read() const {
    std::lock_guard lock(mutex_);
    return latest_;
  }

 private:
  mutable std::mutex mutex_;
  std::optional<FrameMetrics> latest_;
};

inline constexpr std::array<std::uint8_t, 4> kBackground{0, 0, 0, 255};

struct DrawStats {
  std::size_t vertices_submitted = 0;
  std::size_t fragments_written = 0;
};

/// Records and executes one draw of the whole buffer into `target` (RGBA8,
/// cleared to the background). Push constants are narrowed from `mvp` per
/// the variant. Vertex shading runs under `exec`; rasterization is in
/// primitive order, so output is deterministic.
DrawStats draw(const Pipeline& pipeline, const VertexBuffer& buffer, const Mat4& mvp, Image& target,
               Exec exec = Exec::Parallel);

FrameMetrics render_and_measure(const Context& ctx, const Pipeline& pipeline, const VertexBuffer& buffer,
                                const CameraState& camera, std::size_t frames, Extent extent = {},
                                MetricsSnapshot* snapshot = nullptr);

Image offscreen_capture(const Context& ctx, const Pipeline& pipeline, const VertexBuffer& buffer,
                        const CameraState& camera, Extent resolution);

}  // namespace dpbench::render
