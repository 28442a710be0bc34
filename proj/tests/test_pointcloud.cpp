#include "cloudsem/errors.hpp"
#include "cloudsem/pointcloud.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace cloudsem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

} // namespace

TEST_CASE("load_xyz reads plain triples in order") {
    auto path = write_temp("pc_basic.xyz", "0 0 0\n1 2 3\n");
    PointCloud cloud = load_xyz(path);
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points[0] == Point3{0, 0, 0});
    CHECK(cloud.points[1] == Point3{1, 2, 3});
    CHECK(cloud.source_path == path);
}

TEST_CASE("load_xyz skips comments and blank lines") {
    auto path = write_temp("pc_comment.xyz", "# hdr\n\n0 0 0\n");
    CHECK(load_xyz(path).size() == 1);
}

TEST_CASE("load_xyz reports arity violations with the line number") {
    auto path = write_temp("pc_bad.xyz", "0 0\n");
    try {
        load_xyz(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }
}

TEST_CASE("load_xyz rejects non-finite values and missing files") {
    CHECK_THROWS_AS(load_xyz("/nonexistent/file.xyz"), IoError);
    auto path = write_temp("pc_nan.xyz", "0 0 nan\n");
    CHECK_THROWS_AS(load_xyz(path), ParseError);
}

TEST_CASE("load_xyz ignores trailing intensity columns") {
    auto path = write_temp("pc_intensity.xyz", "1 2 3 200 0.5\n");
    PointCloud cloud = load_xyz(path);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0] == Point3{1, 2, 3});
}

TEST_CASE("cloud_bounds is the tight componentwise box") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 2, 3}};
    Aabb box = cloud_bounds(cloud);
    CHECK(box.min == Point3{0, 0, 0});
    CHECK(box.max == Point3{1, 2, 3});

    cloud.points = {{5, 5, 5}};
    box = cloud_bounds(cloud);
    CHECK(box.min == box.max);

    CHECK_THROWS_AS(cloud_bounds(PointCloud{}), EmptyCloud);
}

TEST_CASE("cloud_bounds matches brute force on random points and ignores order") {
    std::mt19937_64 rng(7);
    auto u = [&] { return (double)(rng() >> 11) * 0x1.0p-53; };
    PointCloud cloud;
    for (int i = 0; i < 1000; ++i) cloud.points.push_back({u(), u(), u()});

    Aabb expect{cloud.points[0], cloud.points[0]};
    for (const Point3& p : cloud.points) expect.expand(p);
    CHECK(cloud_bounds(cloud) == expect);
    CHECK(expect.min.x >= 0.0);
    CHECK(expect.max.z <= 1.0);

    PointCloud shuffled = cloud;
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    CHECK(cloud_bounds(shuffled) == expect);
}

TEST_CASE("build_index partitions points into floor-based cells") {
    PointCloud cloud;
    cloud.points = {{0.5, 0.5, 0.5}, {1.5, 0.5, 0.5}};
    CHECK(build_index(cloud, 1.0).cells().size() == 2);
    CHECK(build_index(cloud, 10.0).cells().size() == 1);
    CHECK_THROWS_AS(build_index(cloud, 0.0), InvalidCellSize);
}

TEST_CASE("every point lands in exactly one cell") {
    std::mt19937_64 rng(11);
    auto u = [&] { return (double)(rng() >> 11) * 0x1.0p-53 * 20.0 - 10.0; };
    PointCloud cloud;
    for (int i = 0; i < 2000; ++i) cloud.points.push_back({u(), u(), u()});
    GridIndex index = build_index(cloud, 1.7);
    std::vector<int> seen(cloud.size(), 0);
    for (const auto& [cell, indices] : index.cells())
        for (auto i : indices) seen[i] += 1;
    for (int count : seen) CHECK(count == 1);
}

TEST_CASE("query_box equals a linear scan") {
    std::mt19937_64 rng(3);
    auto u = [&] { return (double)(rng() >> 11) * 0x1.0p-53 * 10.0; };
    PointCloud cloud;
    for (int i = 0; i < 500; ++i) cloud.points.push_back({u(), u(), u()});
    GridIndex index = build_index(cloud, 1.0);

    Aabb all = cloud_bounds(cloud);
    CHECK(query_box(index, cloud, all).size() == cloud.size());

    Aabb nowhere{{100, 100, 100}, {101, 101, 101}};
    CHECK(query_box(index, cloud, nowhere).empty());

    for (int trial = 0; trial < 20; ++trial) {
        Point3 a{u(), u(), u()}, b{u(), u(), u()};
        Aabb box{{std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)},
                 {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}};
        std::vector<std::uint32_t> expect;
        for (std::uint32_t i = 0; i < cloud.size(); ++i)
            if (box.contains(cloud.points[i])) expect.push_back(i);
        CHECK(query_box(index, cloud, box) == expect);
    }
}
