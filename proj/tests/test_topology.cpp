#include "cloudsem/errors.hpp"
#include "cloudsem/topology.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cloudsem;

namespace {

BoundingBox make_box(Point3 min, Point3 max, std::string id = "b") {
    BoundingBox bb;
    bb.id = std::move(id);
    bb.box = {min, max};
    return bb;
}

BoundingBox unit_box_at(double cx, double cy, double cz = 0.5) {
    return make_box({cx - 0.5, cy - 0.5, cz - 0.5}, {cx + 0.5, cy + 0.5, cz + 0.5});
}

Line3 line_along(Point3 dir) {
    Line3 l;
    l.direction = dir * (1.0 / norm(dir));
    return l;
}

} // namespace

TEST_CASE("centroid distance is a ground-plane metric") {
    CHECK(centroid_distance(unit_box_at(0, 0), unit_box_at(50, 0)) == 50.0);
    BoundingBox self = unit_box_at(3, 4, 100.0); // z must not contribute
    CHECK(centroid_distance(self, self) == 0.0);
    CHECK(centroid_distance(unit_box_at(3, 4), unit_box_at(0, 0)) == 5.0);
}

TEST_CASE("is_distant_from applies the fractional tolerance") {
    TopologyParams params;
    CHECK(is_distant_from(unit_box_at(0, 0), unit_box_at(50, 0), 50, params));
    CHECK_FALSE(is_distant_from(unit_box_at(0, 0), unit_box_at(56, 0), 50, params));
    CHECK(is_distant_from(unit_box_at(0, 0), unit_box_at(1000, 0), 1000, params));
    CHECK_THROWS_AS(is_distant_from(unit_box_at(0, 0), unit_box_at(1, 0), 0.0, params),
                    InvalidDistance);
}

TEST_CASE("intersects uses closed boxes") {
    BoundingBox a = unit_box_at(0, 0);
    CHECK(intersects(a, a));
    BoundingBox face = make_box({0.5, -0.5, 0}, {1.5, 0.5, 1}); // shares the x = 0.5 face
    CHECK(intersects(a, face));
    CHECK_FALSE(intersects(a, unit_box_at(10, 0)));
}

TEST_CASE("touches wants disjoint interiors within the gap tolerance") {
    TopologyParams params;
    BoundingBox a = unit_box_at(0, 0);
    BoundingBox near = make_box({0.55, -0.5, 0}, {1.55, 0.5, 1}); // 0.05 gap
    CHECK(touches(a, near, params));
    CHECK_FALSE(touches(a, a, params)); // overlapping interiors
    CHECK_FALSE(touches(a, unit_box_at(2.0, 0), params)); // 1 m apart
}

TEST_CASE("is_connected is intersects or touches") {
    TopologyParams params;
    BoundingBox pole = make_box({-0.15, -0.15, 0}, {0.15, 0.15, 5});
    BoundingBox cabinet = make_box({-0.2, 0.15, 0}, {0.2, 0.55, 0.45}); // gap 0 at the base
    CHECK(is_connected(pole, cabinet, params));
    CHECK(is_connected(pole, pole, params));
    CHECK_FALSE(is_connected(pole, unit_box_at(5, 0), params));
}

TEST_CASE("upper needs vertical separation and footprint overlap") {
    TopologyParams params;
    BoundingBox top = make_box({0, 0, 2}, {1, 1, 3});
    BoundingBox bottom = make_box({0, 0, 0}, {1, 1, 1});
    CHECK(upper(top, bottom, params));
    CHECK_FALSE(upper(bottom, top, params));
    BoundingBox offset = make_box({5, 5, 2}, {6, 6, 3});
    CHECK_FALSE(upper(offset, bottom, params));
}

TEST_CASE("perpendicular compares the acute angle to 90 degrees") {
    TopologyParams params;
    CHECK(perpendicular(line_along({0, 0, 1}), line_along({1, 0, 0}), params));
    CHECK_FALSE(perpendicular(line_along({0, 0, 1}), line_along({0, 0, 1}), params));
    CHECK_FALSE(perpendicular(line_along({0, 0, 1}), line_along({1, 0, 1}), params)); // 45°
}

TEST_CASE("symmetry and antisymmetry on random boxes") {
    TopologyParams params;
    std::mt19937_64 rng(23);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * (double)(rng() >> 11) * 0x1.0p-53;
    };
    auto random_box = [&] {
        Point3 a{u(0, 4), u(0, 4), u(0, 4)};
        Point3 b{a.x + u(0.1, 2), a.y + u(0.1, 2), a.z + u(0.1, 2)};
        return make_box(a, b);
    };
    for (int i = 0; i < 300; ++i) {
        BoundingBox a = random_box(), b = random_box();
        CHECK(intersects(a, b) == intersects(b, a));
        CHECK(touches(a, b, params) == touches(b, a, params));
        CHECK(is_connected(a, b, params) == is_connected(b, a, params));
        CHECK(is_distant_from(a, b, 2.0, params) == is_distant_from(b, a, 2.0, params));
    }
}

TEST_CASE("touching boxes have disjoint interiors; separated uppers are antisymmetric") {
    TopologyParams params;
    std::mt19937_64 rng(29);
    auto u = [&](double lo, double hi) {
        return lo + (hi - lo) * (double)(rng() >> 11) * 0x1.0p-53;
    };
    auto random_box = [&] {
        Point3 a{u(0, 3), u(0, 3), u(0, 3)};
        Point3 b{a.x + u(0.1, 2), a.y + u(0.1, 2), a.z + u(0.1, 2)};
        return make_box(a, b);
    };
    for (int i = 0; i < 300; ++i) {
        BoundingBox a = random_box(), b = random_box();
        if (touches(a, b, params)) {
            bool interiors = a.box.min.x < b.box.max.x && b.box.min.x < a.box.max.x &&
                             a.box.min.y < b.box.max.y && b.box.min.y < a.box.max.y &&
                             a.box.min.z < b.box.max.z && b.box.min.z < a.box.max.z;
            CHECK_FALSE(interiors);
        }
        if (upper(a, b, params) && a.box.min.z > b.box.max.z + params.touch_eps)
            CHECK_FALSE(upper(b, a, params));
    }
}

TEST_CASE("centroid distance is symmetric and triangular") {
    std::mt19937_64 rng(31);
    auto u = [&] { return (double)(rng() >> 11) * 0x1.0p-53 * 10.0; };
    for (int i = 0; i < 200; ++i) {
        BoundingBox a = unit_box_at(u(), u());
        BoundingBox b = unit_box_at(u(), u());
        BoundingBox c = unit_box_at(u(), u());
        CHECK(centroid_distance(a, b) == centroid_distance(b, a));
        CHECK(centroid_distance(a, c) <=
              centroid_distance(a, b) + centroid_distance(b, c) + 1e-12);
    }
}
