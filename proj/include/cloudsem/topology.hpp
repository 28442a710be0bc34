#pragma once

#include "cloudsem/geometry.hpp"

namespace cloudsem {

struct TopologyParams {
    double touch_eps = 0.10;            // m
    double distance_tol_fraction = 0.10;
    double perpendicular_tol = 10.0;    // degrees
    double footprint_overlap_min = 0.25;

    void validate() const;
};

// Ground-plane (x,y) distance between box centers. Heights never enter the
// track-layout distances.
double centroid_distance(const BoundingBox& a, const BoundingBox& b);

// |centroid_distance - d| <= distance_tol_fraction * d. Throws InvalidDistance
// unless d > 0.
bool is_distant_from(const BoundingBox& a, const BoundingBox& b, double d,
                     const TopologyParams& params);

// Closed boxes overlap on all three axes.
bool intersects(const BoundingBox& a, const BoundingBox& b);

// Interiors disjoint and the Euclidean gap between the boxes <= touch_eps.
bool touches(const BoundingBox& a, const BoundingBox& b, const TopologyParams& params);

bool is_connected(const BoundingBox& a, const BoundingBox& b, const TopologyParams& params);

// "a sits above b": a.min.z >= b.max.z - touch_eps and the ground-plane
// footprints overlap by at least footprint_overlap_min of the smaller one.
bool upper(const BoundingBox& a, const BoundingBox& b, const TopologyParams& params);

// Angle between the lines is within perpendicular_tol of 90°.
bool perpendicular(const Line3& l1, const Line3& l2, const TopologyParams& params);

// Euclidean distance between two closed boxes (0 when they overlap).
double box_gap_distance(const Aabb& a, const Aabb& b);

} // namespace cloudsem
