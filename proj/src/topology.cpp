#include "cloudsem/topology.hpp"

#include "cloudsem/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cloudsem {

void TopologyParams::validate() const {
    if (!(touch_eps > 0.0 && perpendicular_tol > 0.0)) throw SpecError("tolerances must be > 0");
    if (!(distance_tol_fraction > 0.0 && distance_tol_fraction <= 1.0))
        throw SpecError("distance_tol_fraction must be in (0,1]");
    if (!(footprint_overlap_min > 0.0 && footprint_overlap_min <= 1.0))
        throw SpecError("footprint_overlap_min must be in (0,1]");
}

double centroid_distance(const BoundingBox& a, const BoundingBox& b) {
    Point3 ca = a.centroid(), cb = b.centroid();
    return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

bool is_distant_from(const BoundingBox& a, const BoundingBox& b, double d,
                     const TopologyParams& params) {
    if (!(d > 0.0)) throw InvalidDistance();
    return std::abs(centroid_distance(a, b) - d) <= params.distance_tol_fraction * d;
}

namespace {

// Per-axis signed gap: positive when separated, negative when overlapping.
double axis_gap(double amin, double amax, double bmin, double bmax) {
    return std::max(bmin - amax, amin - bmax);
}

bool interiors_intersect(const Aabb& a, const Aabb& b) {
    return a.min.x < b.max.x && b.min.x < a.max.x && a.min.y < b.max.y && b.min.y < a.max.y &&
           a.min.z < b.max.z && b.min.z < a.max.z;
}

} // namespace

double box_gap_distance(const Aabb& a, const Aabb& b) {
    double gx = std::max(0.0, axis_gap(a.min.x, a.max.x, b.min.x, b.max.x));
    double gy = std::max(0.0, axis_gap(a.min.y, a.max.y, b.min.y, b.max.y));
    double gz = std::max(0.0, axis_gap(a.min.z, a.max.z, b.min.z, b.max.z));
    return std::sqrt(gx * gx + gy * gy + gz * gz);
}

bool intersects(const BoundingBox& a, const BoundingBox& b) {
    const Aabb& x = a.box;
    const Aabb& y = b.box;
    return x.min.x <= y.max.x && y.min.x <= x.max.x && x.min.y <= y.max.y && y.min.y <= x.max.y &&
           x.min.z <= y.max.z && y.min.z <= x.max.z;
}

bool touches(const BoundingBox& a, const BoundingBox& b, const TopologyParams& params) {
    if (interiors_intersect(a.box, b.box)) return false;
    return box_gap_distance(a.box, b.box) <= params.touch_eps;
}

bool is_connected(const BoundingBox& a, const BoundingBox& b, const TopologyParams& params) {
    return intersects(a, b) || touches(a, b, params);
}

bool upper(const BoundingBox& a, const BoundingBox& b, const TopologyParams& params) {
    if (a.box.min.z < b.box.max.z - params.touch_eps) return false;
    double ox = std::min(a.box.max.x, b.box.max.x) - std::max(a.box.min.x, b.box.min.x);
    double oy = std::min(a.box.max.y, b.box.max.y) - std::max(a.box.min.y, b.box.min.y);
    if (ox < 0.0 || oy < 0.0) return false; // footprints must meet (closed)
    double overlap = std::max(0.0, ox) * std::max(0.0, oy);
    double area_a = a.box.extent_x() * a.box.extent_y();
    double area_b = b.box.extent_x() * b.box.extent_y();
    return overlap >= params.footprint_overlap_min * std::min(area_a, area_b);
}

bool perpendicular(const Line3& l1, const Line3& l2, const TopologyParams& params) {
    double c = std::clamp(std::abs(dot(l1.direction, l2.direction)), 0.0, 1.0);
    double angle_deg = std::acos(c) * 180.0 / M_PI; // in [0, 90]
    return std::abs(90.0 - angle_deg) <= params.perpendicular_tol;
}

} // namespace cloudsem
