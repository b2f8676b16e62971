#include "dpbench/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "dpbench/errors.hpp"

namespace dpbench {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
}

}  // namespace

void validate(const Dataset& dataset, bool require_nonempty) {
  if (dataset.dims != 2 && dataset.dims != 3) {
    throw ValidationError("dataset dims must be 2 or 3, got " + std::to_string(dataset.dims));
  }
  if (require_nonempty && dataset.points.empty()) {
    throw ValidationError("dataset '" + dataset.name + "' is empty");
  }
  if (!dataset.escape_counts.empty() && dataset.escape_counts.size() != dataset.points.size()) {
    throw ValidationError("escape count list does not match point count");
  }
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    const auto& p = dataset.points[i];
    for (int d = 0; d < 3; ++d) {
      if (!std::isfinite(p.coords[d])) {
        throw ValidationError("point " + std::to_string(i) + " has a non-finite coordinate");
      }
    }
    if (dataset.dims == 2 && p.coords[2] != 0.0) {
      throw ValidationError("point " + std::to_string(i) + " has z set in a 2D dataset");
    }
    for (double c : p.color) {
      if (!(c >= 0.0 && c <= 1.0)) {
        throw ValidationError("point " + std::to_string(i) + " has a color channel outside [0,1]");
      }
    }
  }
}

DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats stats;
  stats.count = dataset.points.size();
  stats.bbox.assign(static_cast<std::size_t>(dataset.dims), AxisBounds{});
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, static_cast<std::uint64_t>(dataset.dims));
  bool first = true;
  for (const auto& p : dataset.points) {
    for (int d = 0; d < dataset.dims; ++d) {
      auto& b = stats.bbox[static_cast<std::size_t>(d)];
      if (first) {
        b.min = b.max = p.coords[d];
      } else {
        b.min = std::min(b.min, p.coords[d]);
        b.max = std::max(b.max, p.coords[d]);
      }
      fnv_mix(h, std::bit_cast<std::uint64_t>(p.coords[d]));
    }
    for (double c : p.color) fnv_mix(h, std::bit_cast<std::uint64_t>(c));
    first = false;
  }
  stats.checksum = h;
  return stats;
}

bool bit_identical(const Dataset& a, const Dataset& b) {
  if (a.dims != b.dims || a.points.size() != b.points.size()) return false;
  static_assert(sizeof(PointRecord) == 6 * sizeof(double));
  return a.points.empty() ||
         std::memcmp(a.points.data(), b.points.data(), a.points.size() * sizeof(PointRecord)) == 0;
}

}  // namespace dpbench
