#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace cloudsem {

// Coordinates are meters. z is up; x is the along-track axis by convention.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Point3&, const Point3&) = default;
};

Point3 operator+(const Point3& a, const Point3& b);
Point3 operator-(const Point3& a, const Point3& b);
Point3 operator*(const Point3& a, double s);
double dot(const Point3& a, const Point3& b);
double norm(const Point3& a);

struct Aabb {
    Point3 min;
    Point3 max;

    // Closed containment: points on a face are inside.
    bool contains(const Point3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
               p.z >= min.z && p.z <= max.z;
    }

    double extent_x() const { return max.x - min.x; }
    double extent_y() const { return max.y - min.y; }
    double extent_z() const { return max.z - min.z; }
    Point3 center() const {
        return {(min.x + max.x) / 2, (min.y + max.y) / 2, (min.z + max.z) / 2};
    }
    void expand(const Point3& p);

    friend bool operator==(const Aabb&, const Aabb&) = default;
};

struct PointCloud {
    std::vector<Point3> points;
    std::string source_path;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

// Reads an ASCII XYZ file: one "x y z" triple per line, '#' starts a comment,
// blank lines are skipped. Extra columns (intensity, color) are ignored.
PointCloud load_xyz(const std::string& path);

// Parses XYZ text directly; `origin` names the source in error messages.
PointCloud parse_xyz(const std::string& text, const std::string& origin = "<memory>");

// Minimal axis-aligned box containing every point. Throws EmptyCloud.
Aabb cloud_bounds(const PointCloud& cloud);

// Uniform grid over the cloud. A point lands in cell floor(p.c / cell_size)
// per axis; every point is in exactly one cell.
class GridIndex {
public:
    struct CellKey {
        std::int64_t x = 0, y = 0, z = 0;
        friend bool operator==(const CellKey&, const CellKey&) = default;
    };
    struct CellKeyHash {
        std::size_t operator()(const CellKey& k) const {
            std::uint64_t h = 1469598103934665603ull;
            for (std::uint64_t v : {(std::uint64_t)k.x, (std::uint64_t)k.y, (std::uint64_t)k.z}) {
                h ^= v;
                h *= 1099511628211ull;
            }
            return (std::size_t)h;
        }
    };

    double cell_size() const { return cell_size_; }
    const std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash>& cells() const {
        return cells_;
    }

    CellKey cell_of(const Point3& p) const;

private:
    friend GridIndex build_index(const PointCloud&, double);
    double cell_size_ = 1.0;
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> cells_;
};

// Throws InvalidCellSize unless cell_size > 0.
GridIndex build_index(const PointCloud& cloud, double cell_size);

// Indices of all points inside the closed box, ascending. The index must have
// been built from this cloud.
std::vector<std::uint32_t> query_box(const GridIndex& index, const PointCloud& cloud,
                                     const Aabb& box);

} // namespace cloudsem
