#pragma once

#include "cloudsem/geometry.hpp"
#include "cloudsem/rules.hpp"
#include "cloudsem/topology.hpp"

#include <map>
#include <optional>
#include <string>

namespace cloudsem {

// Shared state for one annotation run: detection parameters, the runtime
// geometry behind KB individuals, and the memo tables that keep generator
// built-ins side-effect free after their first evaluation.
struct EvalContext {
    DetectParams detect;
    RansacParams ransac;
    TopologyParams topology;

    std::map<std::string, BoundingBox> geometry;      // individual -> detected box
    std::map<std::string, std::string> geometry_source; // individual -> cloud path
    std::map<std::string, PointCloud> cloud_cache;    // path -> loaded cloud
    std::map<std::string, double> ground_cache;       // path -> estimated ground z
    std::map<std::string, std::vector<Ground>> generator_memo;
    std::map<std::string, std::optional<Line3>> line_cache; // individual -> principal line

    std::size_t next_vertical_id = 1;
    std::size_t next_horizontal_id = 1;

    const PointCloud& cloud(const std::string& path);
    double ground_z(const std::string& path);
    const BoundingBox& box_of(const std::string& individual) const; // throws NoGeometry
    // Principal RANSAC line of the individual's supporting points, or nullopt
    // when no line reaches min_inliers.
    const std::optional<Line3>& line_of(const std::string& individual);
};

// Registry with the comparison family (swrlb:), the 3D processing generators
// (3D_swrlb_Processing:) and the topologic predicates (3D_swrlb_Topology:),
// including the alias spellings the rule files use.
BuiltInRegistry make_standard_registry();

// Data property on the Scene individual naming its point-cloud file.
inline constexpr const char* kScenePointCloudProp = "hasPointCloudFile";

} // namespace cloudsem
