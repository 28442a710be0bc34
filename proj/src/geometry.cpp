#include "cloudsem/geometry.hpp"

#include "cloudsem/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace cloudsem {

void DetectParams::validate() const {
    if (!(ground_percentile > 0.0 && ground_percentile < 1.0))
        throw SpecError("ground_percentile must be in (0,1)");
    if (!(cell_size > 0.0)) throw InvalidCellSize();
    if (min_points_per_cluster < 1) throw SpecError("min_points_per_cluster must be >= 1");
    if (!(min_height > 0.0 && merge_gap > 0.0)) throw SpecError("lengths must be > 0");
    if (min_cell_points < 1) throw SpecError("min_cell_points must be >= 1");
}

void RansacParams::validate() const {
    if (iterations < 1) throw SpecError("iterations must be >= 1");
    if (!(inlier_threshold > 0.0)) throw SpecError("inlier_threshold must be > 0");
}

double estimate_ground_z(const PointCloud& cloud, const DetectParams& params) {
    if (cloud.empty()) throw EmptyCloud();
    params.validate();
    std::vector<double> zs(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) zs[i] = cloud.points[i].z;
    std::size_t k = (std::size_t)std::floor(params.ground_percentile * (double)(zs.size() - 1));
    std::nth_element(zs.begin(), zs.begin() + k, zs.end());
    return zs[k];
}

namespace {

struct Cell {
    std::int64_t x, y;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

struct Cluster {
    std::vector<std::uint32_t> indices;
};

// Shared steps (1)-(3): ground removal and 2D occupancy clustering.
std::vector<Cluster> cluster_above_ground(const PointCloud& cloud, const DetectParams& params,
                                          double ground_z) {
    std::map<Cell, std::vector<std::uint32_t>> cells;
    for (std::uint32_t i = 0; i < cloud.points.size(); ++i) {
        const Point3& p = cloud.points[i];
        if (p.z - ground_z < params.ground_band) continue;
        Cell c{(std::int64_t)std::floor(p.x / params.cell_size),
               (std::int64_t)std::floor(p.y / params.cell_size)};
        cells[c].push_back(i);
    }
    // Sparse cells are treated as noise and take no part in clustering.
    for (auto it = cells.begin(); it != cells.end();)
        it = (it->second.size() < params.min_cell_points) ? cells.erase(it) : std::next(it);

    std::vector<Cell> keys;
    keys.reserve(cells.size());
    for (const auto& [c, pts] : cells) keys.push_back(c);
    std::map<Cell, std::size_t> cell_id;
    for (std::size_t i = 0; i < keys.size(); ++i) cell_id[keys[i]] = i;

    DisjointSet ds(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                if (dx == 0 && dy == 0) continue;
                auto it = cell_id.find({keys[i].x + dx, keys[i].y + dy});
                if (it != cell_id.end()) ds.unite(i, it->second);
            }

    // Merge components whose minimal horizontal point gap is <= merge_gap.
    // Only cell pairs within merge_gap of each other can contribute.
    const int reach = (int)std::ceil(params.merge_gap / params.cell_size) + 1;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (int dx = -reach; dx <= reach; ++dx)
            for (int dy = -reach; dy <= reach; ++dy) {
                auto it = cell_id.find({keys[i].x + dx, keys[i].y + dy});
                if (it == cell_id.end() || it->second <= i) continue;
                std::size_t j = it->second;
                if (ds.find(i) == ds.find(j)) continue;
                double best = std::numeric_limits<double>::infinity();
                for (std::uint32_t a : cells[keys[i]])
                    for (std::uint32_t b : cells[keys[j]]) {
                        double ddx = cloud.points[a].x - cloud.points[b].x;
                        double ddy = cloud.points[a].y - cloud.points[b].y;
                        best = std::min(best, std::hypot(ddx, ddy));
                        if (best <= params.merge_gap) break;
                    }
                if (best <= params.merge_gap) ds.unite(i, j);
            }
    }

    std::map<std::size_t, Cluster> grouped;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto& cl = grouped[ds.find(i)];
        const auto& pts = cells[keys[i]];
        cl.indices.insert(cl.indices.end(), pts.begin(), pts.end());
    }
    std::vector<Cluster> result;
    for (auto& [root, cl] : grouped) {
        std::sort(cl.indices.begin(), cl.indices.end());
        result.push_back(std::move(cl));
    }
    return result;
}

std::vector<BoundingBox> detect_elements(const PointCloud& cloud, const DetectParams& params,
                                         bool vertical) {
    if (cloud.empty()) throw EmptyCloud();
    params.validate();
    double ground_z = estimate_ground_z(cloud, params);
    std::vector<BoundingBox> out;
    for (Cluster& cl : cluster_above_ground(cloud, params, ground_z)) {
        if (cl.indices.size() < params.min_points_per_cluster) continue;
        Aabb box{cloud.points[cl.indices[0]], cloud.points[cl.indices[0]]};
        for (std::uint32_t i : cl.indices) box.expand(cloud.points[i]);
        double h = box.extent_z();
        double horiz = std::max(box.extent_x(), box.extent_y());
        bool keep;
        if (vertical)
            keep = h >= params.min_height &&
                   (horiz == 0.0 || h / horiz >= params.vertical_aspect_min);
        else
            keep = h <= params.min_height &&
                   (h == 0.0 || horiz / h >= 1.0 / params.horizontal_aspect_max);
        if (!keep) continue;
        BoundingBox bb;
        bb.box = box;
        bb.point_indices = std::move(cl.indices);
        out.push_back(std::move(bb));
    }
    std::sort(out.begin(), out.end(), [](const BoundingBox& a, const BoundingBox& b) {
        Point3 ca = a.centroid(), cb = b.centroid();
        if (ca.x != cb.x) return ca.x < cb.x;
        return ca.y < cb.y;
    });
    const char* prefix = vertical ? "vbb" : "hbb";
    for (std::size_t i = 0; i < out.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s_%04zu", prefix, i + 1);
        out[i].id = buf;
    }
    return out;
}

// Largest-eigenvalue eigenvector of a symmetric 3x3 matrix (cyclic Jacobi).
std::array<double, 3> principal_axis(double m[3][3]) {
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(m[0][1]) + std::abs(m[0][2]) + std::abs(m[1][2]);
        if (off < 1e-14) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(m[p][q]) < 1e-18) continue;
                double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < 3; ++k) {
                    double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < 3; ++k) {
                    double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for (int k = 0; k < 3; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (m[i][i] > m[best][best]) best = i;
    return {v[0][best], v[1][best], v[2][best]};
}

Point3 canonical_direction(Point3 d) {
    double n = norm(d);
    if (n == 0.0) return {0, 0, 1};
    d = d * (1.0 / n);
    int axis = 0;
    double mag = std::abs(d.x);
    if (std::abs(d.y) > mag) { axis = 1; mag = std::abs(d.y); }
    if (std::abs(d.z) > mag) axis = 2;
    double comp = axis == 0 ? d.x : axis == 1 ? d.y : d.z;
    if (comp < 0.0) d = d * -1.0;
    return d;
}

} // namespace

double point_line_distance(const Point3& p, const Point3& anchor, const Point3& unit_dir) {
    Point3 rel = p - anchor;
    double along = dot(rel, unit_dir);
    Point3 perp = rel - unit_dir * along;
    return norm(perp);
}

std::vector<BoundingBox> detect_vertical_elements(const PointCloud& cloud,
                                                  const DetectParams& params) {
    return detect_elements(cloud, params, true);
}

std::vector<BoundingBox> detect_horizontal_elements(const PointCloud& cloud,
                                                    const DetectParams& params) {
    return detect_elements(cloud, params, false);
}

std::vector<Line3> ransac_lines(const PointCloud& cloud,
                                const std::vector<std::uint32_t>& point_indices,
                                const RansacParams& params, std::size_t max_lines) {
    if (point_indices.size() < 2) throw TooFewPoints("need at least 2 candidate points");
    params.validate();
    std::mt19937_64 rng(params.rng_seed);
    auto pick = [&rng](std::size_t n) { return (std::size_t)(rng() % n); };

    std::vector<std::uint32_t> remaining = point_indices;
    std::sort(remaining.begin(), remaining.end());
    std::vector<Line3> lines;

    while (lines.size() < max_lines && remaining.size() >= 2 &&
           remaining.size() >= params.min_inliers) {
        std::size_t best_count = 0;
        Point3 best_anchor{}, best_dir{};
        for (std::size_t it = 0; it < params.iterations; ++it) {
            std::size_t ia = pick(remaining.size());
            std::size_t ib = pick(remaining.size());
            if (ia == ib) continue;
            const Point3& a = cloud.points[remaining[ia]];
            const Point3& b = cloud.points[remaining[ib]];
            Point3 d = b - a;
            double n = norm(d);
            if (n < 1e-12) continue;
            d = d * (1.0 / n);
            std::size_t count = 0;
            for (std::uint32_t idx : remaining)
                if (point_line_distance(cloud.points[idx], a, d) <= params.inlier_threshold)
                    ++count;
            if (count > best_count) {
                best_count = count;
                best_anchor = a;
                best_dir = d;
            }
        }
        if (best_count < params.min_inliers) break;

        std::vector<std::uint32_t> inliers;
        for (std::uint32_t idx : remaining)
            if (point_line_distance(cloud.points[idx], best_anchor, best_dir) <=
                params.inlier_threshold)
                inliers.push_back(idx);

        // Least squares: line through the inlier centroid along the principal
        // direction of the inlier scatter.
        Point3 mean{};
        for (std::uint32_t idx : inliers) mean = mean + cloud.points[idx];
        mean = mean * (1.0 / (double)inliers.size());
        double cov[3][3] = {};
        for (std::uint32_t idx : inliers) {
            Point3 r = cloud.points[idx] - mean;
            double rr[3] = {r.x, r.y, r.z};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) cov[i][j] += rr[i] * rr[j];
        }
        auto axis = principal_axis(cov);
        Point3 dir = canonical_direction({axis[0], axis[1], axis[2]});

        Line3 line;
        line.anchor = mean;
        line.direction = dir;
        double sum_sq = 0.0;
        for (std::uint32_t idx : inliers) {
            double d = point_line_distance(cloud.points[idx], mean, dir);
            if (d <= params.inlier_threshold) {
                line.inlier_indices.push_back(idx);
                sum_sq += d * d;
            }
        }
        if (line.inlier_indices.size() < params.min_inliers) break;
        line.rms_residual = std::sqrt(sum_sq / (double)line.inlier_indices.size());
        lines.push_back(line);

        std::vector<std::uint32_t> next;
        std::set_difference(remaining.begin(), remaining.end(), line.inlier_indices.begin(),
                            line.inlier_indices.end(), std::back_inserter(next));
        remaining = std::move(next);
    }
    return lines;
}

std::size_t count_vertical_lines(const BoundingBox& bb, const PointCloud& cloud,
                                 const RansacParams& params) {
    if (bb.point_indices.size() < 2) throw TooFewPoints("bounding box has fewer than 2 points");
    const double cos10 = std::cos(10.0 * M_PI / 180.0);
    std::size_t count = 0;
    for (const Line3& line : ransac_lines(cloud, bb.point_indices, params, 8))
        if (std::abs(line.direction.z) >= cos10) ++count;
    return count;
}

} // namespace cloudsem
