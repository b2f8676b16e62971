#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include <json.hpp>

#include "dpbench/dataset_io.hpp"
#include "dpbench/errors.hpp"
#include "dpbench/fractal_gen.hpp"

namespace dpbench {

namespace {

using json = nlohmann::json;

constexpr std::uint32_t kGlbMagic = 0x46546C67;  // "glTF"
constexpr std::uint32_t kChunkJson = 0x4E4F534A;  // "JSON"
constexpr std::uint32_t kChunkBin = 0x004E4942;   // "BIN\0"

constexpr int kUnsignedByte = 5121;
constexpr int kUnsignedShort = 5123;
constexpr int kFloat = 5126;

std::uint32_t read_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw ParseError("glb: truncated at byte " + std::to_string(offset));
  return static_cast<std::uint32_t>(bytes[offset]) | (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) | (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

float read_f32(const std::uint8_t* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                       (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

int component_bytes(int component_type) {
  switch (component_type) {
    case kUnsignedByte: return 1;
    case kUnsignedShort: return 2;
    case kFloat: return 4;
    default: throw SchemaError("glb: unsupported accessor componentType " + std::to_string(component_type));
  }
}

int type_components(const std::string& type) {
  if (type == "SCALAR") return 1;
  if (type == "VEC2") return 2;
  if (type == "VEC3") return 3;
  if (type == "VEC4") return 4;
  throw SchemaError("glb: unsupported accessor type " + type);
}

// Strided read-only view over one accessor's elements in the BIN chunk.
struct AccessorView {
  const std::uint8_t* base = nullptr;
  std::size_t count = 0;
  std::size_t stride = 0;
  int components = 0;
  int component_type = 0;
  bool normalized = false;

  double component(std::size_t element, int c) const {
    const std::uint8_t* p = base + element * stride + static_cast<std::size_t>(c) * component_bytes(component_type);
    switch (component_type) {
      case kFloat: return static_cast<double>(read_f32(p));
      case kUnsignedByte: return normalized ? p[0] / 255.0 : p[0];
      case kUnsignedShort: {
        const unsigned v = static_cast<unsigned>(p[0]) | (static_cast<unsigned>(p[1]) << 8);
        return normalized ? v / 65535.0 : v;
      }
    }
    return 0.0;
  }
};

AccessorView resolve_accessor(const json& doc, std::size_t index, std::span<const std::uint8_t> bin) {
  const json& accessors = doc.at("accessors");
  if (index >= accessors.size()) throw SchemaError("glb: accessor index " + std::to_string(index) + " out of range");
  const json& acc = accessors[index];
  if (!acc.contains("bufferView")) throw SchemaError("glb: sparse or view-less accessors are not supported");
  const json& view = doc.at("bufferViews").at(acc.at("bufferView").get<std::size_t>());
  if (view.value("buffer", 0) != 0) throw SchemaError("glb: only the embedded binary buffer is supported");

  AccessorView out;
  out.count = acc.at("count").get<std::size_t>();
  out.component_type = acc.at("componentType").get<int>();
  out.components = type_components(acc.at("type").get<std::string>());
  out.normalized = acc.value("normalized", false);
  const std::size_t element_bytes = static_cast<std::size_t>(component_bytes(out.component_type)) * out.components;
  out.stride = view.value("byteStride", std::size_t{0});
  if (out.stride == 0) out.stride = element_bytes;

  const std::size_t view_offset = view.value("byteOffset", std::size_t{0});
  const std::size_t view_length = view.at("byteLength").get<std::size_t>();
  const std::size_t acc_offset = acc.value("byteOffset", std::size_t{0});
  if (view_offset + view_length > bin.size()) throw ParseError("glb: bufferView exceeds the binary chunk");
  if (out.count > 0 && acc_offset + (out.count - 1) * out.stride + element_bytes > view_length) {
    throw ParseError("glb: accessor " + std::to_string(index) + " exceeds its bufferView");
  }
  out.base = bin.data() + view_offset + acc_offset;
  return out;
}

}  // namespace

Dataset extract_points_from_glb(std::span<const std::uint8_t> bytes, std::string name) {
  if (bytes.size() < 12 || read_u32(bytes, 0) != kGlbMagic) throw ParseError("glb: missing glTF magic");
  if (read_u32(bytes, 4) != 2) throw ParseError("glb: unsupported container version");
  const std::uint32_t total = read_u32(bytes, 8);
  if (total > bytes.size()) throw ParseError("glb: declared length exceeds input");

  std::size_t offset = 12;
  const std::uint32_t json_len = read_u32(bytes, offset);
  if (read_u32(bytes, offset + 4) != kChunkJson) throw ParseError("glb: first chunk is not JSON");
  offset += 8;
  if (offset + json_len > total) throw ParseError("glb: JSON chunk truncated");
  json doc;
  try {
    doc = json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                      bytes.begin() + static_cast<std::ptrdiff_t>(offset + json_len));
  } catch (const json::exception& e) {
    throw ParseError(std::string("glb: invalid JSON chunk: ") + e.what());
  }
  offset += json_len;

  std::span<const std::uint8_t> bin;
  if (offset + 8 <= total) {
    const std::uint32_t bin_len = read_u32(bytes, offset);
    if (read_u32(bytes, offset + 4) != kChunkBin) throw ParseError("glb: second chunk is not BIN");
    offset += 8;
    if (offset + bin_len > total) throw ParseError("glb: BIN chunk truncated");
    bin = bytes.subspan(offset, bin_len);
  }

  if (!doc.contains("meshes") || doc["meshes"].empty()) throw SchemaError("glb: no meshes");

  Dataset out;
  out.dims = 3;
  out.name = std::move(name);
  out.source = "glb";
  std::vector<std::uint8_t> has_color;
  bool any_color = false;
  try {
    for (const json& mesh : doc["meshes"]) {
      for (const json& prim : mesh.value("primitives", json::array())) {
        const json attrs = prim.value("attributes", json::object());
        if (!attrs.contains("POSITION")) continue;
        const AccessorView pos = resolve_accessor(doc, attrs["POSITION"].get<std::size_t>(), bin);
        if (pos.components != 3 || pos.component_type != kFloat) {
          throw SchemaError("glb: POSITION must be a float VEC3 accessor");
        }
        std::optional<AccessorView> col;
        if (attrs.contains("COLOR_0")) {
          col = resolve_accessor(doc, attrs["COLOR_0"].get<std::size_t>(), bin);
          if (col->components < 3 || col->count != pos.count) throw SchemaError("glb: COLOR_0 does not match POSITION");
          if (col->component_type != kFloat && !col->normalized) {
            throw SchemaError("glb: integer COLOR_0 must be normalized");
          }
          any_color = true;
        }
        for (std::size_t i = 0; i < pos.count; ++i) {
          PointRecord p;
          for (int c = 0; c < 3; ++c) p.coords[c] = pos.component(i, c);
          if (col) {
            for (int c = 0; c < 3; ++c) p.color[c] = std::clamp(col->component(i, c), 0.0, 1.0);
          }
          out.points.push_back(p);
          has_color.push_back(col ? 1 : 0);
        }
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("glb: malformed glTF document: ") + e.what());
  }
  if (out.points.empty()) throw SchemaError("glb: no mesh primitive carries a POSITION accessor");

  if (!any_color) return colorize(std::move(out));
  // Mixed files: primitives lacking COLOR_0 take palette colors.
  Dataset painted = colorize(out);
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (!has_color[i]) out.points[i].color = painted.points[i].color;
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

Dataset extract_points_from_glb(std::istream& source, std::string name) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  return extract_points_from_glb(std::span<const std::uint8_t>(bytes), std::move(name));
}

Dataset extract_points_from_glb_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  Dataset d = extract_points_from_glb(std::span<const std::uint8_t>(bytes), path.stem().string());
  d.source = path.string();
  return d;
}

}  // namespace dpbench
