#include "cloudsem/pointcloud.hpp"

#include "cloudsem/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cloudsem {

Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Point3 operator*(const Point3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

void Aabb::expand(const Point3& p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    min.z = std::min(min.z, p.z);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
    max.z = std::max(max.z, p.z);
}

namespace {

bool parse_three_reals(std::string_view line, double out[3]) {
    const char* p = line.data();
    const char* end = p + line.size();
    for (int i = 0; i < 3; ++i) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p == end) return false;
        auto [next, ec] = std::from_chars(p, end, out[i]);
        if (ec != std::errc{} || next == p) return false;
        p = next;
    }
    // trailing columns are allowed and ignored
    return true;
}

PointCloud parse_xyz_impl(std::istream& in, const std::string& origin) {
    PointCloud cloud;
    cloud.source_path = origin;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        auto first = view.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        if (view[first] == '#') continue;
        double v[3];
        if (!parse_three_reals(view, v))
            throw ParseError("expected three numeric fields, got \"" + line + "\"", line_no);
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]))
            throw ParseError("non-finite coordinate", line_no);
        cloud.points.push_back({v[0], v[1], v[2]});
    }
    return cloud;
}

} // namespace

PointCloud load_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open point cloud file: " + path);
    return parse_xyz_impl(in, path);
}

PointCloud parse_xyz(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    return parse_xyz_impl(in, origin);
}

Aabb cloud_bounds(const PointCloud& cloud) {
    if (cloud.empty()) throw EmptyCloud();
    Aabb box{cloud.points.front(), cloud.points.front()};
    for (const Point3& p : cloud.points) box.expand(p);
    return box;
}

GridIndex::CellKey GridIndex::cell_of(const Point3& p) const {
    return {(std::int64_t)std::floor(p.x / cell_size_),
            (std::int64_t)std::floor(p.y / cell_size_),
            (std::int64_t)std::floor(p.z / cell_size_)};
}

GridIndex build_index(const PointCloud& cloud, double cell_size) {
    if (!(cell_size > 0.0)) throw InvalidCellSize();
    GridIndex index;
    index.cell_size_ = cell_size;
    for (std::uint32_t i = 0; i < cloud.points.size(); ++i)
        index.cells_[index.cell_of(cloud.points[i])].push_back(i);
    return index;
}

std::vector<std::uint32_t> query_box(const GridIndex& index, const PointCloud& cloud,
                                     const Aabb& box) {
    std::vector<std::uint32_t> result;
    const double cs = index.cell_size();
    const auto lo = index.cell_of(box.min);
    const auto hi = index.cell_of(box.max);
    (void)cs;
    for (std::int64_t cx = lo.x; cx <= hi.x; ++cx)
        for (std::int64_t cy = lo.y; cy <= hi.y; ++cy)
            for (std::int64_t cz = lo.z; cz <= hi.z; ++cz) {
                auto it = index.cells().find({cx, cy, cz});
                if (it == index.cells().end()) continue;
                for (std::uint32_t i : it->second)
                    if (box.contains(cloud.points[i])) result.push_back(i);
            }
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace cloudsem
