#include "regmetrics/cloud_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "regmetrics/errors.h"

namespace regmetrics {
namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParseError,
              "line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string_view strip_comment(std::string_view line) {
  const std::size_t hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

double to_double(std::string_view token, std::size_t line_no) {
  // from_chars rejects a leading '+'.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    parse_fail(line_no, "bad number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    parse_fail(line_no, "non-finite coordinate '" + std::string(token) + "'");
  }
  return value;
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  }
  return out;
}

PointCloud read_xyz(std::istream& in) {
  std::vector<Point3> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(strip_comment(line));
    if (tokens.empty()) continue;
    if (tokens.size() < 3) parse_fail(line_no, "expected x y z");
    points.emplace_back(to_double(tokens[0], line_no),
                        to_double(tokens[1], line_no),
                        to_double(tokens[2], line_no));
  }
  if (points.empty()) parse_fail(line_no, "no points in xyz input");
  return PointCloud(std::move(points));
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

PointCloud read_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || split_ws(line) != std::vector<std::string_view>{"ply"}) {
    parse_fail(line_no, "missing 'ply' magic");
  }
  std::vector<PlyElement> elements;
  bool have_format = false;
  for (;;) {
    if (!next_line()) parse_fail(line_no, "header ended without end_header");
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "end_header") break;
    if (tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 2) parse_fail(line_no, "incomplete format line");
      if (tokens[1] != "ascii") {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "binary PLY ('" + std::string(tokens[1]) +
                        "') is not supported; convert to ascii");
      }
      have_format = true;
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) parse_fail(line_no, "malformed element line");
      PlyElement element;
      element.name = std::string(tokens[1]);
      element.count = static_cast<std::size_t>(to_double(tokens[2], line_no));
      elements.push_back(std::move(element));
    } else if (tokens[0] == "property") {
      if (elements.empty()) parse_fail(line_no, "property before element");
      PlyProperty prop;
      if (tokens.size() >= 2 && tokens[1] == "list") {
        if (tokens.size() != 5) parse_fail(line_no, "malformed list property");
        prop.is_list = true;
        prop.name = std::string(tokens[4]);
      } else {
        if (tokens.size() != 3) parse_fail(line_no, "malformed property");
        prop.name = std::string(tokens[2]);
      }
      elements.back().properties.push_back(std::move(prop));
    } else {
      parse_fail(line_no, "unknown header keyword '" + std::string(tokens[0]) + "'");
    }
  }
  if (!have_format) parse_fail(line_no, "missing format line");

  for (const PlyElement& element : elements) {
    if (element.name != "vertex") {
      // One instance per line in ascii PLY.
      for (std::size_t i = 0; i < element.count; ++i) {
        if (!next_line()) parse_fail(line_no, "truncated '" + element.name + "' data");
      }
      continue;
    }
    int slot[3] = {-1, -1, -1};
    for (std::size_t p = 0; p < element.properties.size(); ++p) {
      const PlyProperty& prop = element.properties[p];
      for (int axis = 0; axis < 3; ++axis) {
        if (prop.name == std::string(1, static_cast<char>('x' + axis))) {
          if (prop.is_list) parse_fail(line_no, "list-typed coordinate");
          slot[axis] = static_cast<int>(p);
        }
      }
    }
    if (slot[0] < 0 || slot[1] < 0 || slot[2] < 0) {
      parse_fail(line_no, "vertex element lacks x, y or z");
    }
    std::vector<Point3> points;
    points.reserve(element.count);
    for (std::size_t i = 0; i < element.count; ++i) {
      if (!next_line()) parse_fail(line_no, "truncated vertex data");
      const auto tokens = split_ws(line);
      // Walk properties, expanding list counts, to find coordinate tokens.
      std::size_t cursor = 0;
      double coords[3] = {0.0, 0.0, 0.0};
      for (std::size_t p = 0; p < element.properties.size(); ++p) {
        if (cursor >= tokens.size()) parse_fail(line_no, "too few values");
        if (element.properties[p].is_list) {
          const auto len = static_cast<std::size_t>(to_double(tokens[cursor], line_no));
          cursor += 1 + len;
          continue;
        }
        for (int axis = 0; axis < 3; ++axis) {
          if (slot[axis] == static_cast<int>(p)) {
            coords[axis] = to_double(tokens[cursor], line_no);
          }
        }
        ++cursor;
      }
      points.emplace_back(coords[0], coords[1], coords[2]);
    }
    if (points.empty()) parse_fail(line_no, "PLY has no vertices");
    return PointCloud(std::move(points));
  }
  parse_fail(line_no, "PLY has no vertex element");
}

}  // namespace

CloudFormat parse_cloud_format(std::string_view name) {
  if (name == "xyz") return CloudFormat::kXyzAscii;
  if (name == "ply") return CloudFormat::kPlyAscii;
  throw Error(ErrorCode::kUnsupportedFormat,
              "unknown cloud format '" + std::string(name) + "'");
}

CloudFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".ply" ? CloudFormat::kPlyAscii : CloudFormat::kXyzAscii;
}

PointCloud read_cloud(std::istream& in, CloudFormat format) {
  return format == CloudFormat::kPlyAscii ? read_ply(in) : read_xyz(in);
}

PointCloud parse_cloud_file(const std::filesystem::path& path,
                            CloudFormat format) {
  std::ifstream in = open_input(path);
  return read_cloud(in, format);
}

void write_cloud(std::ostream& out, const PointCloud& cloud,
                 CloudFormat format) {
  if (format == CloudFormat::kPlyAscii) {
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\n"
           "end_header\n";
  }
  for (const Point3& p : cloud.points()) {
    out << format17(p.x()) << ' ' << format17(p.y()) << ' ' << format17(p.z())
        << '\n';
  }
}

void write_cloud_file(const std::filesystem::path& path,
                      const PointCloud& cloud, CloudFormat format) {
  std::ofstream out = open_output(path);
  write_cloud(out, cloud, format);
}

CorrespondenceSet read_correspondences(std::istream& in) {
  CorrespondenceSet corrs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(strip_comment(line));
    if (tokens.empty()) continue;
    if (tokens.size() != 6) parse_fail(line_no, "expected sx sy sz tx ty tz");
    double v[6];
    for (int i = 0; i < 6; ++i) v[i] = to_double(tokens[static_cast<std::size_t>(i)], line_no);
    corrs.push_back({Point3(v[0], v[1], v[2]), Point3(v[3], v[4], v[5])});
  }
  return corrs;
}

CorrespondenceSet parse_correspondence_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_correspondences(in);
}

void write_correspondences(std::ostream& out, const CorrespondenceSet& corrs) {
  for (const Correspondence& c : corrs) {
    out << format17(c.source.x()) << ' ' << format17(c.source.y()) << ' '
        << format17(c.source.z()) << ' ' << format17(c.target.x()) << ' '
        << format17(c.target.y()) << ' ' << format17(c.target.z()) << '\n';
  }
}

RigidTransform read_transform(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (std::string_view token : split_ws(strip_comment(line))) {
      values.push_back(to_double(token, line_no));
    }
  }
  if (values.size() != 12 && values.size() != 16) {
    parse_fail(line_no, "transform needs 12 or 16 numbers, got " +
                            std::to_string(values.size()));
  }
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rotation(r, c) = values[static_cast<std::size_t>(4 * r + c)];
    translation[r] = values[static_cast<std::size_t>(4 * r + 3)];
  }
  if (!is_rotation(rotation, 1e-6)) {
    parse_fail(line_no, "rotation block is not in SO(3)");
  }
  if (!is_rotation(rotation)) {
    // Project text-rounded rotations back onto SO(3).
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(
        rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rotation = svd.matrixU() * svd.matrixV().transpose();
  }
  return RigidTransform(rotation, translation);
}

RigidTransform parse_transform_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_transform(in);
}

void write_transform(std::ostream& out, const RigidTransform& transform) {
  const Eigen::Matrix<double, 3, 4> m = transform.matrix3x4();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      out << (c ? " " : "") << format17(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace regmetrics
