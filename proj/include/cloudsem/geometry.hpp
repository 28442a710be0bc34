#pragma once

#include "cloudsem/pointcloud.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cloudsem {

// Axis-aligned detection result. `length` is the larger horizontal extent and
// `width` the smaller one, independent of which axis each lies along.
struct BoundingBox {
    std::string id;
    Aabb box;
    std::vector<std::uint32_t> point_indices;

    double height() const { return box.extent_z(); }
    double length() const { return std::max(box.extent_x(), box.extent_y()); }
    double width() const { return std::min(box.extent_x(), box.extent_y()); }
    Point3 centroid() const { return box.center(); }
};

struct Line3 {
    Point3 anchor;
    Point3 direction; // unit, sign canonicalized (largest-magnitude component positive)
    std::vector<std::uint32_t> inlier_indices;
    double rms_residual = 0.0;
};

struct DetectParams {
    double ground_percentile = 0.05;
    double cell_size = 0.5;           // m, clustering grid
    std::size_t min_points_per_cluster = 30;
    double min_height = 0.3;          // m
    double merge_gap = 0.5;           // m, horizontal gap below which clusters merge
    double vertical_aspect_min = 2.0; // height / max(length,width)
    double horizontal_aspect_max = 2.0;
    std::size_t min_cell_points = 3;  // cells with fewer above-ground points are noise
    double ground_band = 0.2;         // m above estimated ground dropped before clustering

    void validate() const;
};

struct RansacParams {
    std::size_t iterations = 500;
    double inlier_threshold = 0.05; // m
    std::size_t min_inliers = 20;
    std::uint64_t rng_seed = 1;

    void validate() const;
};

// Returns the ground_percentile quantile of all z values. Throws EmptyCloud.
double estimate_ground_z(const PointCloud& cloud, const DetectParams& params);

// Grid-clustering detector for tall, slender structures. Drops the ground
// band, clusters the rest on the 2D (x,y) occupancy grid (8-connectivity,
// then merges clusters whose horizontal point gap <= merge_gap), keeps
// clusters with enough points, height >= min_height and
// height / max(length,width) >= vertical_aspect_min. Output is ordered by
// ascending (centroid.x, centroid.y) with ids vbb_0001, vbb_0002, ...
std::vector<BoundingBox> detect_vertical_elements(const PointCloud& cloud,
                                                  const DetectParams& params);

// Same clustering; keeps flat clusters instead: height <= min_height and
// max(length,width) / height >= 1 / horizontal_aspect_max. Ids hbb_0001, ...
std::vector<BoundingBox> detect_horizontal_elements(const PointCloud& cloud,
                                                    const DetectParams& params);

// Greedy sequential RANSAC line extraction over the given candidate points.
// Deterministic for a fixed seed. Throws TooFewPoints if fewer than 2
// candidates are supplied.
std::vector<Line3> ransac_lines(const PointCloud& cloud,
                                const std::vector<std::uint32_t>& point_indices,
                                const RansacParams& params, std::size_t max_lines);

// Number of near-vertical lines (|direction.z| >= cos 10°) ransac_lines finds
// among the box's supporting points.
std::size_t count_vertical_lines(const BoundingBox& bb, const PointCloud& cloud,
                                 const RansacParams& params);

double point_line_distance(const Point3& p, const Point3& anchor, const Point3& unit_dir);

} // namespace cloudsem
