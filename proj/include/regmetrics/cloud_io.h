#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "regmetrics/geometry.h"
#include "regmetrics/metrics.h"

namespace regmetrics {

enum class CloudFormat { kXyzAscii, kPlyAscii };

// "xyz" or "ply"; kUnsupportedFormat otherwise.
CloudFormat parse_cloud_format(std::string_view name);

// .ply -> PLY, anything else -> XYZ.
CloudFormat format_from_extension(const std::filesystem::path& path);

// xyz-ascii: one "x y z" per line (further columns ignored), '#' starts a
// comment, blank lines skipped. ply-ascii: x, y, z of the vertex element;
// other elements and properties are skipped; binary PLY is rejected with
// kUnsupportedFormat. Malformed input throws kParseError naming the line; an
// empty result is a kParseError too.
PointCloud read_cloud(std::istream& in, CloudFormat format);
PointCloud parse_cloud_file(const std::filesystem::path& path,
                            CloudFormat format);

// Coordinates written with 17 significant digits, so reading back is exact.
void write_cloud(std::ostream& out, const PointCloud& cloud,
                 CloudFormat format);
void write_cloud_file(const std::filesystem::path& path,
                      const PointCloud& cloud, CloudFormat format);

// Correspondences: "sx sy sz tx ty tz" per line, '#' comments.
CorrespondenceSet read_correspondences(std::istream& in);
CorrespondenceSet parse_correspondence_file(const std::filesystem::path& path);
void write_correspondences(std::ostream& out, const CorrespondenceSet& corrs);

// Transform as 3 or 4 rows of 4 numbers ([R | t], optional 0 0 0 1 row).
RigidTransform read_transform(std::istream& in);
RigidTransform parse_transform_file(const std::filesystem::path& path);
void write_transform(std::ostream& out, const RigidTransform& transform);

}  // namespace regmetrics
