#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dpbench {

// One point: 2 or 3 binary64 coordinates (unused z is 0) and an RGB color in
// [0,1]. The owning Dataset decides how many coordinates are meaningful.
struct PointRecord {
  std::array<double, 3> coords{};
  std::array<double, 3> color{};

  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

struct Dataset {
  int dims = 3;
  std::vector<PointRecord> points;
  std::string source;
  std::string name;
  // Per-point escape iteration for escape-time generators; empty otherwise.
  std::vector<std::uint32_t> escape_counts;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

struct AxisBounds {
  double min = 0.0;
  double max = 0.0;
};

struct DatasetStats {
  std::size_t count = 0;
  std::vector<AxisBounds> bbox;  // one entry per dimension
  std::uint64_t checksum = 0;
};

/// Throws ValidationError if dims is not 2 or 3, a color channel is outside
/// [0,1], a coordinate is non-finite, or an unused z is nonzero.
void validate(const Dataset& dataset, bool require_nonempty = true);

/// Count, exact bbox and an order-sensitive FNV-1a checksum over the bit
/// patterns of every coordinate and color channel.
DatasetStats dataset_stats(const Dataset& dataset);

bool bit_identical(const Dataset& a, const Dataset& b);

}  // namespace dpbench
