#include "dpbench/render/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dpbench/df64.hpp"
#include "dpbench/errors.hpp"

namespace dpbench::render {

std::string_view to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::Native64: return "native64";
    case VariantKind::Emulated64: return "emulated64";
    case VariantKind::Emulated64Pairwise: return "emulated64-pairwise";
  }
  return "unknown";
}

VariantKind parse_variant(std::string_view text) {
  if (text == "native64" || text == "native") return VariantKind::Native64;
  if (text == "emulated64" || text == "emulated") return VariantKind::Emulated64;
  if (text == "emulated64-pairwise" || text == "pairwise") return VariantKind::Emulated64Pairwise;
  throw UsageError("unknown variant '" + std::string(text) + "' (expected native64, emulated64 or emulated64-pairwise)");
}

std::uint32_t format_bytes(AttribFormat f) {
  switch (f) {
    case AttribFormat::R32G32_SFLOAT: return 8;
    case AttribFormat::R32G32B32_SFLOAT: return 12;
    case AttribFormat::R64G64_SFLOAT: return 16;
    case AttribFormat::R64G64B64_SFLOAT: return 24;
  }
  return 0;
}

std::uint32_t format_slots(AttribFormat f) { return f == AttribFormat::R64G64B64_SFLOAT ? 2 : 1; }

PipelineVariant PipelineVariant::make(VariantKind kind, int dims) {
  if (dims != 2 && dims != 3) throw ValidationError("pipeline variant: dims must be 2 or 3");
  PipelineVariant v;
  v.kind = kind;
  v.dims = dims;
  if (kind == VariantKind::Native64) {
    const auto pos_fmt = dims == 3 ? AttribFormat::R64G64B64_SFLOAT : AttribFormat::R64G64_SFLOAT;
    v.vertex_layout = {{"pos", 0, pos_fmt, 0},
                       {"color", format_slots(pos_fmt), AttribFormat::R64G64B64_SFLOAT, format_bytes(pos_fmt)}};
    v.stride = format_bytes(pos_fmt) + 24;
    v.push_constant_size = 128;  // dmat4
    v.required_device_features = {kFeatureShaderFloat64, kFeatureVertexAttribute64};
  } else {
    const auto pos_fmt = dims == 3 ? AttribFormat::R32G32B32_SFLOAT : AttribFormat::R32G32_SFLOAT;
    const std::uint32_t pb = format_bytes(pos_fmt);
    v.vertex_layout = {{"highPos", 0, pos_fmt, 0},
                       {"lowPos", 1, pos_fmt, pb},
                       {"highColor", 2, AttribFormat::R32G32B32_SFLOAT, 2 * pb},
                       {"lowColor", 3, AttribFormat::R32G32B32_SFLOAT, 2 * pb + 12}};
    v.stride = 2 * pb + 24;
    // mat4, or a high/low mat4 pair for the pairwise extension.
    v.push_constant_size = kind == VariantKind::Emulated64 ? 64 : 128;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Devices and context

std::vector<DeviceCaps> enumerate_devices() {
  DeviceCaps full;
  full.name = "dpbench software rasterizer (fp64)";
  DeviceCaps fp32;
  fp32.name = "dpbench software rasterizer (fp32-only)";
  fp32.shader_float64 = false;
  fp32.vertex_attribute_64bit = false;
  return {full, fp32};
}

std::size_t select_device(const std::vector<DeviceCaps>& devices) {
  if (devices.empty()) throw DeviceError("no rendering device available");
  auto rank = [](const DeviceCaps& d) {
    const int type_rank = d.type == DeviceType::Discrete ? 0 : d.type == DeviceType::Integrated ? 1 : 2;
    return type_rank * 2 + (d.shader_float64 ? 0 : 1);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < devices.size(); ++i)
    if (rank(devices[i]) < rank(devices[best])) best = i;
  return best;
}

std::string Context::describe() const {
  std::ostringstream os;
  os << device_.name << " [fp64=" << (device_.shader_float64 ? "yes" : "no")
     << ", timestamps=" << (timestamps_ ? "yes" : "no") << ", push_constants=" << device_.max_push_constants_size
     << "B]";
  return os.str();
}

Context init_context(const ContextOptions& options) {
  if (!options.headless) {
    throw DeviceError(
        "windowed rendering needs a window system, and this build has none; "
        "run `dpbench bench --headless` (or offscreen capture) instead");
  }
  Context ctx;
  if (options.device) {
    ctx.device_ = *options.device;
  } else {
    const auto devices = enumerate_devices();
    std::optional<std::size_t> index = options.device_index;
    if (!index) {
      if (const char* env = std::getenv(kDeviceIndexEnv); env && *env) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0') throw DeviceError(std::string(kDeviceIndexEnv) + " must be an integer");
        index = static_cast<std::size_t>(v);
      }
    }
    if (index && *index >= devices.size()) {
      throw DeviceError("device index " + std::to_string(*index) + " out of range (" +
                        std::to_string(devices.size()) + " devices)");
    }
    ctx.device_ = devices[index ? *index : select_device(devices)];
  }
  ctx.headless_ = true;
  ctx.timestamps_ = options.use_timestamps && ctx.device_.timestamp_queries;
  ctx.shader_dir_ = options.shader_dir;
  ctx.render_pass_ = std::make_shared<RenderPass>(RenderPass{1});
  return ctx;
}

// ---------------------------------------------------------------------------
// Pipelines

std::string shader_file_name(VariantKind kind, bool vertex_stage) {
  std::string base(to_string(kind));
  std::replace(base.begin(), base.end(), '-', '_');
  return base + (vertex_stage ? ".vert.spv" : ".frag.spv");
}

std::vector<std::uint32_t> load_spirv(const std::filesystem::path& path, const std::string& module_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ShaderError(module_name + ": cannot open '" + path.string() + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0 || bytes.size() < 20) {
    throw ShaderError(module_name + ": not a SPIR-V module (size " + std::to_string(bytes.size()) + " bytes)");
  }
  std::vector<std::uint32_t> words(bytes.size() / 4);
  std::memcpy(words.data(), bytes.data(), bytes.size());
  if (words[0] != 0x07230203u) throw ShaderError(module_name + ": bad SPIR-V magic number");
  const std::uint32_t version = words[1];
  if ((version & 0xff0000ffu) != 0 || version > 0x00010600u) {
    throw ShaderError(module_name + ": unsupported SPIR-V version word " + std::to_string(version));
  }
  if (words[3] == 0) throw ShaderError(module_name + ": SPIR-V id bound is zero");
  return words;
}

Pipeline build_pipeline(const Context& ctx, const PipelineVariant& variant) {
  const DeviceCaps& dev = ctx.device();
  for (const auto& feature : variant.required_device_features) {
    const bool ok = (feature == kFeatureShaderFloat64 && dev.shader_float64) ||
                    (feature == kFeatureVertexAttribute64 && dev.vertex_attribute_64bit);
    if (!ok) {
      throw FeatureError("device '" + dev.name + "' lacks " + feature + " required by the " +
                         std::string(to_string(variant.kind)) +
                         " pipeline; use the emulated64 variant or pick another device with " + kDeviceIndexEnv);
    }
  }
  if (variant.push_constant_size > dev.max_push_constants_size) {
    throw FeatureError("push-constant block of " + std::to_string(variant.push_constant_size) +
                       " bytes exceeds the device limit of " + std::to_string(dev.max_push_constants_size));
  }

  Pipeline p;
  p.variant = variant;
  p.depth_test = variant.dims == 3;
  p.render_pass = ctx.render_pass();
  p.vertex.name = shader_file_name(variant.kind, true);
  p.fragment.name = shader_file_name(variant.kind, false);
  if (ctx.shader_dir()) {
    p.vertex.words = load_spirv(*ctx.shader_dir() / p.vertex.name, p.vertex.name);
    p.fragment.words = load_spirv(*ctx.shader_dir() / p.fragment.name, p.fragment.name);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Vertex buffers

namespace {

template <typename T>
void put(std::byte*& dst, T value) {
  std::memcpy(dst, &value, sizeof value);
  dst += sizeof value;
}

template <typename T>
T get(const std::byte* src) {
  T v;
  std::memcpy(&v, src, sizeof v);
  return v;
}

}  // namespace

VertexBuffer upload_dataset(const Context& ctx, const Dataset& dataset, const PipelineVariant& variant) {
  if (dataset.points.empty()) throw ValidationError("upload_dataset: dataset is empty");
  if (dataset.dims != variant.dims) {
    throw ValidationError("upload_dataset: dataset has " + std::to_string(dataset.dims) +
                          " dims but the pipeline layout expects " + std::to_string(variant.dims));
  }
  const std::uint64_t bytes = static_cast<std::uint64_t>(dataset.points.size()) * variant.stride;
  if (bytes > ctx.device().max_allocation_bytes) {
    throw CapacityError("vertex buffer allocation of " + std::to_string(bytes) + " bytes exceeds the device limit of " +
                        std::to_string(ctx.device().max_allocation_bytes));
  }

  std::vector<std::byte> staging(static_cast<std::size_t>(bytes));
  const int dims = dataset.dims;
  const auto n = static_cast<std::int64_t>(dataset.points.size());
  const bool native = variant.kind == VariantKind::Native64;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const PointRecord& p = dataset.points[static_cast<std::size_t>(i)];
    std::byte* dst = staging.data() + static_cast<std::size_t>(i) * variant.stride;
    if (native) {
      for (int d = 0; d < dims; ++d) put(dst, p.coords[d]);
      for (double c : p.color) put(dst, c);
    } else {
      Df64 pos[3], col[3];
      for (int d = 0; d < dims; ++d) pos[d] = df64::split(p.coords[d]);
      for (int c = 0; c < 3; ++c) col[c] = df64::split(p.color[c]);
      for (int d = 0; d < dims; ++d) put(dst, pos[d].high);
      for (int d = 0; d < dims; ++d) put(dst, pos[d].low);
      for (int c = 0; c < 3; ++c) put(dst, col[c].high);
      for (int c = 0; c < 3; ++c) put(dst, col[c].low);
    }
  }

  VertexBuffer buf;
  buf.kind = variant.kind;
  buf.dims = dims;
  buf.stride = variant.stride;
  buf.vertex_count = dataset.points.size();
  buf.memory = std::move(staging);  // staging -> device-local copy
  return buf;
}

// ---------------------------------------------------------------------------
// Drawing

namespace {

struct Fragment {
  std::int64_t pixel = -1;
  float depth = 0.0f;
  std::array<std::uint8_t, 4> rgba{};
};

struct PushConstants {
  std::array<float, 16> mvp32{};
  std::array<float, 16> mvp32_low{};
  std::array<double, 16> mvp64{};
};

PushConstants make_push_constants(VariantKind kind, const Mat4& mvp) {
  PushConstants pc;
  for (std::size_t i = 0; i < 16; ++i) {
    if (kind == VariantKind::Native64) {
      pc.mvp64[i] = mvp[i];
    } else if (kind == VariantKind::Emulated64) {
      pc.mvp32[i] = static_cast<float>(mvp[i]);
    } else {
      const Df64 s = df64::split(mvp[i]);
      pc.mvp32[i] = s.high;
      pc.mvp32_low[i] = s.low;
    }
  }
  return pc;
}

std::uint8_t to_unorm8(float c) {
  if (!(c > 0.0f)) return 0;
  if (c >= 1.0f) return 255;
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

struct VertexOut {
  std::array<float, 4> clip{};
  std::array<float, 3> color{};
};

VertexOut shade_vertex(VariantKind kind, int dims, const std::byte* v, const PushConstants& pc) {
  VertexOut out;
  if (kind == VariantKind::Native64) {
    double pos[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < dims; ++d) pos[d] = get<double>(v + 8 * d);
    const auto& m = pc.mvp64;
    for (int r = 0; r < 4; ++r) {
      out.clip[r] = static_cast<float>(m[r] * pos[0] + m[4 + r] * pos[1] + m[8 + r] * pos[2] + m[12 + r]);
    }
    // flat dvec3 color narrowed at the fragment output
    for (int c = 0; c < 3; ++c) out.color[c] = static_cast<float>(get<double>(v + 8 * dims + 8 * c));
    return out;
  }

  const std::size_t pb = 4 * static_cast<std::size_t>(dims);
  float hi[3] = {0.0f, 0.0f, 0.0f}, lo[3] = {0.0f, 0.0f, 0.0f};
  for (int d = 0; d < dims; ++d) {
    hi[d] = get<float>(v + 4 * d);
    lo[d] = get<float>(v + pb + 4 * d);
  }
  for (int c = 0; c < 3; ++c) {
    const float hc = get<float>(v + 2 * pb + 4 * c);
    const float lc = get<float>(v + 2 * pb + 12 + 4 * c);
    out.color[c] = hc + lc;
  }

  if (kind == VariantKind::Emulated64) {
    // gl_Position = mvp * vec4(highPos + lowPos, 1.0)
    const float x = hi[0] + lo[0], y = hi[1] + lo[1], z = hi[2] + lo[2];
    const auto& m = pc.mvp32;
    for (int r = 0; r < 4; ++r) out.clip[r] = m[r] * x + m[4 + r] * y + m[8 + r] * z + m[12 + r];
    return out;
  }

  const Df64 x{hi[0], lo[0]}, y{hi[1], lo[1]}, z{hi[2], lo[2]};
  for (int r = 0; r < 4; ++r) {
    const Df64 m0{pc.mvp32[r], pc.mvp32_low[r]}, m1{pc.mvp32[4 + r], pc.mvp32_low[4 + r]};
    const Df64 m2{pc.mvp32[8 + r], pc.mvp32_low[8 + r]}, m3{pc.mvp32[12 + r], pc.mvp32_low[12 + r]};
    const Df64 acc = m0 * x + m1 * y + m2 * z + m3;
    out.clip[r] = acc.high + acc.low;
  }
  return out;
}

Fragment rasterize(const VertexOut& v, int width, int height) {
  Fragment f;
  const float w = v.clip[3];
  if (!(w > 0.0f)) return f;
  const float x = v.clip[0], y = v.clip[1], z = v.clip[2];
  if (!(x >= -w && x <= w && y >= -w && y <= w && z >= 0.0f && z <= w)) return f;
  const float nx = x / w, ny = y / w;
  const float fx = (nx * 0.5f + 0.5f) * static_cast<float>(width);
  const float fy = (ny * 0.5f + 0.5f) * static_cast<float>(height);
  const int px = std::clamp(static_cast<int>(std::floor(fx)), 0, width - 1);
  const int py = std::clamp(static_cast<int>(std::floor(fy)), 0, height - 1);
  f.pixel = static_cast<std::int64_t>(py) * width + px;
  f.depth = z / w;
  f.rgba = {to_unorm8(v.color[0]), to_unorm8(v.color[1]), to_unorm8(v.color[2]), 255};
  return f;
}

void clear(Image& target) {
  for (std::size_t i = 0; i < target.pixels.size(); i += 4) {
    std::memcpy(target.pixels.data() + i, kBackground.data(), 4);
  }
}

}  // namespace

DrawStats draw(const Pipeline& pipeline, const VertexBuffer& buffer, const Mat4& mvp, Image& target, Exec exec) {
  if (buffer.kind != pipeline.variant.kind || buffer.dims != pipeline.variant.dims ||
      buffer.stride != pipeline.variant.stride) {
    throw ValidationError("draw: vertex buffer layout does not match the pipeline");
  }
  if (target.channels != 4 || target.width <= 0 || target.height <= 0) {
    throw ValidationError("draw: target must be a non-empty RGBA8 image");
  }
  const PushConstants pc = make_push_constants(buffer.kind, mvp);
  const auto n = static_cast<std::int64_t>(buffer.vertex_count);
  std::vector<Fragment> frags(buffer.vertex_count);
  const int w = target.width, h = target.height;

  auto shade = [&](std::int64_t i) {
    const std::byte* v = buffer.memory.data() + static_cast<std::size_t>(i) * buffer.stride;
    frags[static_cast<std::size_t>(i)] = rasterize(shade_vertex(buffer.kind, buffer.dims, v, pc), w, h);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) shade(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) shade(i);
  }

  DrawStats stats;
  stats.vertices_submitted = buffer.vertex_count;
  std::vector<float> depth;
  if (pipeline.depth_test) depth.assign(static_cast<std::size_t>(w) * h, 1.0f);
  for (const Fragment& f : frags) {
    if (f.pixel < 0) continue;
    const auto idx = static_cast<std::size_t>(f.pixel);
    if (pipeline.depth_test) {
      if (!(f.depth < depth[idx])) continue;
      depth[idx] = f.depth;
    }
    std::memcpy(target.pixels.data() + idx * 4, f.rgba.data(), 4);
    ++stats.fragments_written;
  }
  return stats;
}

FrameMetrics render_and_measure(const Context& ctx, const Pipeline& pipeline, const VertexBuffer& buffer,
                                const CameraState& camera, std::size_t frames, Extent extent,
                                MetricsSnapshot* snapshot) {
  if (frames == 0) throw ValidationError("render_and_measure: frames must be >= 1");
  if (extent.width <= 0 || extent.height <= 0) throw ValidationError("render_and_measure: empty extent");
  using clock = std::chrono::steady_clock;
  const double aspect = static_cast<double>(extent.width) / extent.height;
  Image target(extent.width, extent.height, 4);
  std::vector<double> frame_ms;
  frame_ms.reserve(frames);
  FrameMetrics m;
  m.timing_source = ctx.timestamps_enabled() ? TimingSource::DeviceTimestamps : TimingSource::WallClock;

  const auto window_start = clock::now();
  for (std::size_t f = 0; f < frames; ++f) {
    const auto frame_start = clock::now();
    clear(target);
    const Mat4 mvp = camera_mvp(camera, aspect);  // pushed every frame
    const auto draw_begin = clock::now();         // timestamp: top of pipe
    const DrawStats stats = draw(pipeline, buffer, mvp, target);
    const auto draw_end = clock::now();  // timestamp: bottom of pipe
    double ms;
    if (m.timing_source == TimingSource::DeviceTimestamps) {
      const auto ticks = std::chrono::duration_cast<std::chrono::nanoseconds>(draw_end - draw_begin).count();
      ms = static_cast<double>(ticks) * ctx.device().timestamp_period_ns * 1e-6;
    } else {
      ms = std::chrono::duration<double, std::milli>(draw_end - frame_start).count();
    }
    // Clock granularity can report zero for trivially small draws.
    frame_ms.push_back(std::max(ms, 1e-6));
    m.frame_index = f + 1;
    m.draw_vertex_count = stats.vertices_submitted;
    if (snapshot) {
      FrameMetrics partial = m;
      partial.gpu_render_ms = frame_ms.back();
      const double elapsed = std::chrono::duration<double>(clock::now() - window_start).count();
      partial.fps = static_cast<double>(f + 1) / std::max(elapsed, 1e-9);
      snapshot->publish(partial);
    }
  }
  const double window_s = std::chrono::duration<double>(clock::now() - window_start).count();

  std::sort(frame_ms.begin(), frame_ms.end());
  const std::size_t mid = frame_ms.size() / 2;
  m.gpu_render_ms = frame_ms.size() % 2 ? frame_ms[mid] : 0.5 * (frame_ms[mid - 1] + frame_ms[mid]);
  m.fps = static_cast<double>(frames) / std::max(window_s, 1e-9);
  if (snapshot) snapshot->publish(m);
  return m;
}

Image offscreen_capture(const Context& ctx, const Pipeline& pipeline, const VertexBuffer& buffer,
                        const CameraState& camera, Extent resolution) {
  (void)ctx;
  if (resolution.width <= 0 || resolution.height <= 0) throw ValidationError("offscreen_capture: empty resolution");
  Image target(resolution.width, resolution.height, 4);
  clear(target);
  draw(pipeline, buffer, camera_mvp(camera, static_cast<double>(resolution.width) / resolution.height), target);
  return target;
}

}  // namespace dpbench::render
