#include "cloudsem/builtins.hpp"

#include "cloudsem/errors.hpp"

#include <cmath>
#include <cstdio>

namespace cloudsem {

const PointCloud& EvalContext::cloud(const std::string& path) {
    auto it = cloud_cache.find(path);
    if (it == cloud_cache.end()) it = cloud_cache.emplace(path, load_xyz(path)).first;
    return it->second;
}

double EvalContext::ground_z(const std::string& path) {
    auto it = ground_cache.find(path);
    if (it == ground_cache.end())
        it = ground_cache.emplace(path, estimate_ground_z(cloud(path), detect)).first;
    return it->second;
}

const BoundingBox& EvalContext::box_of(const std::string& individual) const {
    auto it = geometry.find(individual);
    if (it == geometry.end())
        throw NoGeometry("individual " + individual + " has no resolvable geometry");
    return it->second;
}

const std::optional<Line3>& EvalContext::line_of(const std::string& individual) {
    auto it = line_cache.find(individual);
    if (it != line_cache.end()) return it->second;
    const BoundingBox& bb = box_of(individual);
    std::optional<Line3> line;
    auto src = geometry_source.find(individual);
    if (src != geometry_source.end() && bb.point_indices.size() >= 2) {
        auto lines = ransac_lines(cloud(src->second), bb.point_indices, ransac, 1);
        if (!lines.empty()) line = lines.front();
    }
    return line_cache.emplace(individual, std::move(line)).first->second;
}

namespace {

double numeric_arg(const Name& builtin, const Ground& g) {
    if (!g.is_number())
        throw TypeMismatch("built-in " + builtin + " expects a numeric argument, got " +
                           g.to_string());
    return g.value().number();
}

const BoundingBox& box_arg(EvalContext& ctx, const Name& builtin, const Ground& g) {
    if (!g.is_individual())
        throw NoGeometry("built-in " + builtin + " expects an individual, got " + g.to_string());
    return ctx.box_of(g.name());
}

void register_comparison(BuiltInRegistry& reg, const Name& name, const std::vector<Name>& aliases,
                         bool (*cmp)(double, double)) {
    reg.register_builtin(name, 2, BuiltInKind::Predicate, aliases, BuiltInFamily::Comparison);
    reg.set_predicate(name, [name, cmp](EvalContext&, KnowledgeBase&,
                                        const std::vector<Ground>& args) {
        return cmp(numeric_arg(name, args[0]), numeric_arg(name, args[1]));
    });
}

// Runs a detector once per (built-in, path), asserts the Table-1 class fact
// plus the geometry data facts for every box, and replays the same bindings
// on any later evaluation.
std::vector<Ground> run_detection(EvalContext& ctx, KnowledgeBase& kb, const Name& builtin,
                                  const std::vector<Ground>& rest, bool vertical) {
    if (!rest[0].is_text())
        throw TypeMismatch("built-in " + builtin + " expects a cloud path, got " +
                           rest[0].to_string());
    const std::string& path = rest[0].value().text();
    std::string memo_key = builtin + "\x1f" + path;
    auto memo = ctx.generator_memo.find(memo_key);
    if (memo != ctx.generator_memo.end()) return memo->second;

    const PointCloud& cloud = ctx.cloud(path);
    double ground = ctx.ground_z(path);
    std::vector<BoundingBox> boxes =
        vertical ? detect_vertical_elements(cloud, ctx.detect)
                 : detect_horizontal_elements(cloud, ctx.detect);

    std::vector<Ground> results;
    for (BoundingBox& bb : boxes) {
        char buf[32];
        std::size_t& counter = vertical ? ctx.next_vertical_id : ctx.next_horizontal_id;
        std::snprintf(buf, sizeof(buf), "%s_%04zu", vertical ? "vbb" : "hbb", counter++);
        bb.id = buf;
        const std::string& name = bb.id;

        kb.assert_class(name, vertical ? "Vertical_BoundingBox" : "Horizontal_BoundingBox");
        // Heights are measured from the estimated ground, not from the box
        // bottom, so the ground band dropped before clustering does not
        // shorten the object.
        kb.assert_data(name, "height", Value(bb.box.max.z - ground));
        kb.assert_data(name, "length", Value(bb.length()));
        kb.assert_data(name, "width", Value(bb.width()));
        Point3 c = bb.centroid();
        kb.assert_data(name, "cx", Value(c.x));
        kb.assert_data(name, "cy", Value(c.y));
        kb.assert_data(name, "cz", Value(c.z));
        kb.assert_object(name, "hasGeometry", name);

        ctx.geometry_source[name] = path;
        ctx.geometry[name] = std::move(bb);
        results.push_back(Ground::individual(name));
    }
    ctx.generator_memo[memo_key] = results;
    return results;
}

} // namespace

BuiltInRegistry make_standard_registry() {
    BuiltInRegistry reg;

    register_comparison(reg, "swrlb:moreThan", {"swrlb:greaterThan"},
                        [](double a, double b) { return a > b; });
    register_comparison(reg, "swrlb:lessThan", {}, [](double a, double b) { return a < b; });
    register_comparison(reg, "swrlb:greaterThanOrEqual", {},
                        [](double a, double b) { return a >= b; });
    register_comparison(reg, "swrlb:lessThanOrEqual", {},
                        [](double a, double b) { return a <= b; });
    register_comparison(reg, "swrlb:equal", {}, [](double a, double b) { return a == b; });

    const Name vert = "3D_swrlb_Processing:VerticalElementDetection";
    reg.register_builtin(vert, 2, BuiltInKind::Generator,
                         {"3Dswrlb:VerticalElementDetection",
                          "3DProcessing_swrlb:VerticalElementDetection"},
                         BuiltInFamily::Processing);
    reg.set_generator(vert, [vert](EvalContext& ctx, KnowledgeBase& kb,
                                   const std::vector<Ground>& rest) {
        return run_detection(ctx, kb, vert, rest, true);
    });

    const Name horiz = "3D_swrlb_Processing:HorizontalElementDetection";
    reg.register_builtin(horiz, 2, BuiltInKind::Generator,
                         {"3Dswrlb:HorizontalElementDetection",
                          "3DProcessing_swrlb:HorizontalElementDetection"},
                         BuiltInFamily::Processing);
    reg.set_generator(horiz, [horiz](EvalContext& ctx, KnowledgeBase& kb,
                                     const std::vector<Ground>& rest) {
        return run_detection(ctx, kb, horiz, rest, false);
    });

    auto topo_pred = [&reg](const Name& local, const std::vector<Name>& aliases, auto fn) {
        Name canonical = "3D_swrlb_Topology:" + local;
        reg.register_builtin(canonical, 2, BuiltInKind::Predicate, aliases,
                             BuiltInFamily::Topology);
        reg.set_predicate(canonical, [canonical, fn](EvalContext& ctx, KnowledgeBase&,
                                                     const std::vector<Ground>& args) {
            return fn(ctx, box_arg(ctx, canonical, args[0]), box_arg(ctx, canonical, args[1]));
        });
    };
    topo_pred("Upper", {}, [](EvalContext& ctx, const BoundingBox& a, const BoundingBox& b) {
        return upper(a, b, ctx.topology);
    });
    topo_pred("Intersect", {}, [](EvalContext&, const BoundingBox& a, const BoundingBox& b) {
        return intersects(a, b);
    });
    topo_pred("Touch", {"3D_swrlb_Topology:touch", "touch"},
              [](EvalContext& ctx, const BoundingBox& a, const BoundingBox& b) {
                  return touches(a, b, ctx.topology);
              });
    topo_pred("isConnected", {"isConnected"},
              [](EvalContext& ctx, const BoundingBox& a, const BoundingBox& b) {
                  return is_connected(a, b, ctx.topology);
              });

    const Name perp = "3D_swrlb_Topology:Perpendicular";
    reg.register_builtin(perp, 2, BuiltInKind::Predicate, {"Perpendicular"},
                         BuiltInFamily::Topology);
    reg.set_predicate(perp, [perp](EvalContext& ctx, KnowledgeBase&,
                                   const std::vector<Ground>& args) {
        for (const Ground& g : args)
            if (!g.is_individual())
                throw NoGeometry("built-in " + perp + " expects individuals");
        const auto& l1 = ctx.line_of(args[0].name());
        const auto& l2 = ctx.line_of(args[1].name());
        if (!l1 || !l2) return false;
        return perpendicular(*l1, *l2, ctx.topology);
    });

    const Name dist = "3D_swrlb_Topology:hasDistanceFrom";
    reg.register_builtin(dist, 3, BuiltInKind::Predicate,
                         {"3D_swrlb_Topology:isDistantfrom", "hasDistanceFrom", "isDistantfrom"},
                         BuiltInFamily::Topology);
    reg.set_predicate(dist, [dist](EvalContext& ctx, KnowledgeBase&,
                                   const std::vector<Ground>& args) {
        const BoundingBox& a = box_arg(ctx, dist, args[0]);
        const BoundingBox& b = box_arg(ctx, dist, args[1]);
        return is_distant_from(a, b, numeric_arg(dist, args[2]), ctx.topology);
    });

    return reg;
}

} // namespace cloudsem
