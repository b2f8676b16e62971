#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "dpbench/dataset_io.hpp"
#include "dpbench/errors.hpp"

namespace dpbench {

namespace {

constexpr std::string_view kHeader2d = "x,y,r,g,b";
constexpr std::string_view kHeader3d = "x,y,z,r,g,b";
constexpr std::size_t kFlushBytes = 1 << 16;

void append_double(std::string& buf, double v) {
  char tmp[32];
  const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
  buf.append(tmp, res.ptr);
}

void flush(std::string& buf, std::ostream& sink) {
  sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!sink) throw IoError("csv: write to sink failed");
  buf.clear();
}

}  // namespace

std::size_t write_csv(const Dataset& dataset, std::ostream& sink) {
  validate(dataset);
  std::string buf;
  buf.reserve(kFlushBytes + 256);
  buf.append(dataset.dims == 2 ? kHeader2d : kHeader3d);
  buf.push_back('\n');
  for (const auto& p : dataset.points) {
    for (int d = 0; d < dataset.dims; ++d) {
      append_double(buf, p.coords[d]);
      buf.push_back(',');
    }
    append_double(buf, p.color[0]);
    buf.push_back(',');
    append_double(buf, p.color[1]);
    buf.push_back(',');
    append_double(buf, p.color[2]);
    buf.push_back('\n');
    if (buf.size() >= kFlushBytes) flush(buf, sink);
  }
  flush(buf, sink);
  sink.flush();
  if (!sink) throw IoError("csv: flush failed");
  return dataset.points.size();
}

std::size_t write_csv_file(const Dataset& dataset, const std::filesystem::path& path) {
  validate(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return write_csv(dataset, out);
}

Dataset read_csv(std::istream& source, std::string name) {
  Dataset out;
  out.name = std::move(name);
  out.source = "csv";

  std::string line;
  if (!std::getline(source, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line == kHeader2d) {
    out.dims = 2;
  } else if (line == kHeader3d) {
    out.dims = 3;
  } else {
    throw SchemaError("line 1: unrecognized header '" + line + "' (expected x,y[,z],r,g,b)");
  }
  const std::size_t columns = static_cast<std::size_t>(out.dims) + 3;

  long line_no = 1;
  double values[6];
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    for (;;) {
      const char* comma = static_cast<const char*>(std::memchr(p, ',', static_cast<std::size_t>(end - p)));
      const char* field_end = comma ? comma : end;
      if (col < columns) {
        double v = 0.0;
        const auto res = std::from_chars(p, field_end, v);
        if (res.ec != std::errc{} || res.ptr != field_end || !std::isfinite(v)) {
          throw ParseError("column " + std::to_string(col + 1) + ": '" + std::string(p, field_end) +
                               "' is not a finite number",
                           line_no);
        }
        values[col] = v;
      }
      ++col;
      if (!comma) break;
      p = comma + 1;
    }
    if (col != columns) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                        " columns, found " + std::to_string(col));
    }
    PointRecord rec;
    for (int d = 0; d < out.dims; ++d) rec.coords[d] = values[d];
    for (int c = 0; c < 3; ++c) {
      const double v = values[out.dims + c];
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError("color channel outside [0,1]", line_no);
      rec.color[c] = v;
    }
    out.points.push_back(rec);
  }
  if (source.bad()) throw IoError("csv: read failure after line " + std::to_string(line_no));
  return out;
}

Dataset read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Dataset d = read_csv(in, path.stem().string());
  d.source = path.string();
  return d;
}

}  // namespace dpbench
