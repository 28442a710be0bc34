#include "cloudsem/railway.hpp"

#include "cloudsem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace cloudsem::railway {

// --- Schema -----------------------------------------------------------------

void install_schema(KnowledgeBase& kb) {
    kb.declare_class("Algorithm");
    kb.declare_class("Geometry");
    kb.declare_class("DomainConcept");
    kb.declare_class("Characteristics");
    kb.declare_class("Scene");

    kb.declare_class("Vertical_BoundingBox", Name("Geometry"));
    kb.declare_class("Horizontal_BoundingBox", Name("Geometry"));

    kb.declare_class("Signals", Name("DomainConcept"));
    kb.declare_class("Primary_signal", Name("Signals"));
    kb.declare_class("Main_Signal", Name("Primary_signal"));
    kb.declare_class("Distant_Signal", Name("Primary_signal"));
    kb.declare_class("Secondary_signal", Name("Signals"));
    kb.declare_class("Vorsignalbake", Name("Secondary_signal"));
    kb.declare_class("Breakpoint_table", Name("Secondary_signal"));
    kb.declare_class("Chess_board", Name("Secondary_signal"));
    kb.declare_class("Mast", Name("DomainConcept"));
    kb.declare_class("BigMast", Name("Mast"));
    kb.declare_class("NormalMast", Name("Mast"));
    kb.declare_class("Schaltanlage", Name("DomainConcept"));
    kb.declare_class("Schalthouse", Name("Schaltanlage"));
    kb.declare_class("SchaltSchrack", Name("Schaltanlage"));

    kb.declare_object_property("hasTopologicRelation");
    kb.declare_object_property("IsDeseignedFor");
    kb.declare_object_property("hasGeometry");
    kb.declare_object_property("hasCharacteristics");
}

std::vector<Name> domain_leaf_classes(const KnowledgeBase& kb) {
    std::vector<Name> leaves;
    for (const Name& cls : kb.subclasses_of("DomainConcept")) {
        if (cls == "DomainConcept") continue;
        if (kb.subclasses_of(cls).size() == 1) leaves.push_back(cls);
    }
    std::sort(leaves.begin(), leaves.end());
    return leaves;
}

// --- Geometric ranges ----------------------------------------------------------

GeometricRanges GeometricRanges::defaults(double zeta) {
    GeometricRanges r;
    r.zeta = zeta;
    auto between = [](double lo, double hi) { return Interval{lo, hi, false, false}; };
    auto more_than = [](double lo) { return Interval{lo, 1e300, true, false}; };
    auto less_than = [](double hi) { return Interval{-1e300, hi, false, true}; };
    auto close_to_zero = [&] { return Interval{-1e300, zeta, false, false}; };

    r.by_class["Main_Signal"] = {between(4, 6), {}, {}};
    r.by_class["Distant_Signal"] = {between(4, 6), {}, {}};
    r.by_class["Vorsignalbake"] = {between(1.5, 2.5), {}, close_to_zero()};
    r.by_class["Breakpoint_table"] = {between(1, 2), between(1, 1.5), close_to_zero()};
    r.by_class["Chess_board"] = {between(1, 1.5), close_to_zero(), close_to_zero()};
    r.by_class["BigMast"] = {more_than(6), {}, {}};
    r.by_class["NormalMast"] = {between(5, 6), close_to_zero(), {}};
    r.by_class["Schalthouse"] = {less_than(1), {}, {}};
    r.by_class["SchaltSchrack"] = {less_than(0.5), {}, {}};
    return r;
}

// --- Rule pack -------------------------------------------------------------------

std::string ruleset_text(double zeta) {
    std::string z = format_number(zeta);
    std::ostringstream out;
    out <<
        "# Railway annotation rules.\n"
        "# 1. Detection: populate bounding boxes from the scene's point cloud.\n"
        "detect_vertical: Scene(?s) ^ hasPointCloudFile(?s, ?dir) ^ "
        "3D_swrlb_Processing:VerticalElementDetection(?v, ?dir) -> Vertical_BoundingBox(?v)\n"
        "detect_horizontal: Scene(?s) ^ hasPointCloudFile(?s, ?dir) ^ "
        "3D_swrlb_Processing:HorizontalElementDetection(?h, ?dir) -> Horizontal_BoundingBox(?h)\n"
        "\n"
        "# 2. Geometric classification bands (heights above estimated ground).\n"
        "mast_altitude: Vertical_BoundingBox(?v) ^ height(?v, ?alt) ^ swrlb:moreThan(?alt, 6) "
        "-> Mast(?v)\n"
        "big_mast: Vertical_BoundingBox(?v) ^ height(?v, ?alt) ^ swrlb:moreThan(?alt, 6) "
        "-> BigMast(?v)\n";
    out << "normal_mast: Vertical_BoundingBox(?v) ^ height(?v, ?h) ^ "
           "swrlb:greaterThanOrEqual(?h, 5) ^ swrlb:lessThanOrEqual(?h, 6) ^ length(?v, ?l) ^ "
           "swrlb:lessThanOrEqual(?l, " << z << ") -> NormalMast(?v)\n";
    out << "vorsignalbake: Vertical_BoundingBox(?v) ^ height(?v, ?h) ^ "
           "swrlb:greaterThanOrEqual(?h, 1.5) ^ swrlb:lessThanOrEqual(?h, 2.5) ^ width(?v, ?w) ^ "
           "swrlb:lessThanOrEqual(?w, " << z << ") -> Vorsignalbake(?v)\n";
    out << "breakpoint_table: Vertical_BoundingBox(?v) ^ height(?v, ?h) ^ "
           "swrlb:greaterThanOrEqual(?h, 1) ^ swrlb:lessThanOrEqual(?h, 2) ^ length(?v, ?l) ^ "
           "swrlb:greaterThanOrEqual(?l, 1) ^ swrlb:lessThanOrEqual(?l, 1.5) ^ width(?v, ?w) ^ "
           "swrlb:lessThanOrEqual(?w, " << z << ") -> Breakpoint_table(?v)\n";
    out << "chess_board: Vertical_BoundingBox(?v) ^ height(?v, ?h) ^ "
           "swrlb:greaterThanOrEqual(?h, 1) ^ swrlb:lessThanOrEqual(?h, 1.5) ^ length(?v, ?l) ^ "
           "swrlb:lessThanOrEqual(?l, " << z << ") ^ width(?v, ?w) ^ "
           "swrlb:lessThanOrEqual(?w, " << z << ") -> Chess_board(?v)\n";
    out << "schalthouse: Horizontal_BoundingBox(?b) ^ height(?b, ?h) ^ swrlb:lessThan(?h, 1) ^ "
           "swrlb:greaterThanOrEqual(?h, 0.5) -> Schalthouse(?b)\n"
           "schaltschrack: Horizontal_BoundingBox(?b) ^ height(?b, ?h) ^ "
           "swrlb:lessThan(?h, 0.5) -> SchaltSchrack(?b)\n";
    // A primary signal carries its electricity box at the base; merged into
    // one detection it widens the footprint past zeta, which separates the
    // signals from the slender masts in the shared height band.
    out << "signal_candidate: Vertical_BoundingBox(?v) ^ height(?v, ?h) ^ "
           "swrlb:greaterThanOrEqual(?h, 4) ^ swrlb:lessThanOrEqual(?h, 6) ^ length(?v, ?l) ^ "
           "swrlb:moreThan(?l, " << z << ") -> Primary_signal(?v)\n";
    out <<
        "\n"
        "# 3. Topological refinement.\n"
        "signal_pair_1000: Primary_signal(?a) ^ Primary_signal(?b) ^ "
        "3D_swrlb_Topology:hasDistanceFrom(?a, ?b, 1000) ^ cx(?a, ?xa) ^ cx(?b, ?xb) ^ "
        "swrlb:lessThan(?xa, ?xb) -> Distant_Signal(?a) ^ Main_Signal(?b) ^ "
        "hasDistanceFrom_1000(?a, ?b)\n"
        "signal_pair_700: Primary_signal(?a) ^ Primary_signal(?b) ^ "
        "3D_swrlb_Topology:hasDistanceFrom(?a, ?b, 700) ^ cx(?a, ?xa) ^ cx(?b, ?xb) ^ "
        "swrlb:lessThan(?xa, ?xb) -> Distant_Signal(?a) ^ Main_Signal(?b) ^ "
        "hasDistanceFrom_700(?a, ?b)\n"
        "bake_chain_75: Vorsignalbake(?a) ^ Vorsignalbake(?b) ^ "
        "3D_swrlb_Topology:hasDistanceFrom(?a, ?b, 75) ^ cx(?a, ?xa) ^ cx(?b, ?xb) ^ "
        "swrlb:lessThan(?xa, ?xb) -> hasDistanceFrom_75(?a, ?b)\n"
        "bake_to_distant_100: Vorsignalbake(?a) ^ Distant_Signal(?b) ^ "
        "3D_swrlb_Topology:hasDistanceFrom(?a, ?b, 100) -> hasDistanceFrom_100(?a, ?b)\n"
        "mast_chain_50: Mast(?a) ^ Vertical_BoundingBox(?b) ^ "
        "3D_swrlb_Topology:hasDistanceFrom(?a, ?b, 50) -> Mast(?b) ^ hasDistanceFrom_50(?a, ?b)\n"
        "signal_by_cabinet: Vertical_BoundingBox(?v) ^ height(?v, ?h) ^ "
        "swrlb:greaterThanOrEqual(?h, 4) ^ swrlb:lessThanOrEqual(?h, 6) ^ Schaltanlage(?c) ^ "
        "3D_swrlb_Topology:isConnected(?v, ?c) ^ 3D_swrlb_Topology:Upper(?v, ?c) -> "
        "Primary_signal(?v) ^ isConnected(?v, ?c) ^ Upper(?v, ?c)\n";
    return out.str();
}

// --- Pipeline ----------------------------------------------------------------------

AnnotateResult annotate_scene(const std::string& cloud_path, EvalContext& ctx,
                              const std::vector<Rule>& rules, const BuiltInRegistry& registry) {
    AnnotateResult result;
    install_schema(result.kb);
    result.kb.assert_class("scene_0001", "Scene");
    result.kb.assert_data("scene_0001", kScenePointCloudProp, Value(cloud_path));
    result.report = run_fixpoint(result.kb, rules, registry, ctx);
    result.report.conflicts = resolve_conflicts(result.kb);
    return result;
}

namespace {

bool topology_support(const KnowledgeBase& kb, const Name& ind, const Name& leaf) {
    std::vector<Name> props;
    if (leaf == "Main_Signal" || leaf == "Distant_Signal")
        props = {"hasDistanceFrom_1000", "hasDistanceFrom_700", "isConnected"};
    else if (leaf == "BigMast" || leaf == "NormalMast")
        props = {"hasDistanceFrom_50"};
    else if (leaf == "Vorsignalbake")
        props = {"hasDistanceFrom_75", "hasDistanceFrom_100"};
    else
        return false;
    for (const auto& f : kb.object_facts())
        for (const Name& p : props)
            if (f.prop == p && (f.subj == ind || f.obj == ind)) return true;
    return false;
}

std::optional<double> stored(const KnowledgeBase& kb, const Name& ind, const Name& prop) {
    for (const Value& v : kb.values_of(ind, prop))
        if (v.is_number()) return v.number();
    return std::nullopt;
}

} // namespace

std::vector<ConflictRecord> resolve_conflicts(KnowledgeBase& kb, const GeometricRanges& ranges) {
    std::vector<ConflictRecord> conflicts;
    std::vector<Name> leaves = domain_leaf_classes(kb);

    for (const Name& ind : kb.all_individuals()) {
        std::vector<Name> labels;
        for (const Name& cls : kb.classes_of(ind))
            if (std::binary_search(leaves.begin(), leaves.end(), cls)) labels.push_back(cls);
        if (labels.size() < 2) continue;

        auto h = stored(kb, ind, "height");
        auto l = stored(kb, ind, "length");
        auto w = stored(kb, ind, "width");
        auto in = [](const Interval& iv, const std::optional<double>& v) {
            return !iv.constrained() || (v && iv.contains(*v));
        };

        struct Evidence {
            bool geo_complete = false;
            bool extra = false; // satisfied constraints beyond the height band
        };
        std::map<Name, Evidence> evidence;
        for (const Name& label : labels) {
            Evidence ev;
            auto it = ranges.by_class.find(label);
            const ClassRanges cr = it == ranges.by_class.end() ? ClassRanges{} : it->second;
            bool hl = in(cr.height, h), ll = in(cr.length, l), wl = in(cr.width, w);
            ev.geo_complete = hl && ll && wl;
            bool beyond_height =
                (cr.length.constrained() || cr.width.constrained()) && ll && wl && ev.geo_complete;
            ev.extra = beyond_height || topology_support(kb, ind, label);
            evidence[label] = ev;
        }

        bool any_strong = false;
        for (const Name& label : labels)
            if (evidence[label].geo_complete && evidence[label].extra) any_strong = true;

        std::vector<Name> kept;
        for (const Name& label : labels) {
            if (any_strong && !evidence[label].extra)
                kb.retract_class(ind, label);
            else
                kept.push_back(label);
        }
        if (kept.size() >= 2) conflicts.push_back({ind, kept});
    }
    return conflicts;
}

// --- Synthetic scenes -----------------------------------------------------------------

namespace {

// Portable deterministic samplers; the standard distributions are
// implementation-defined, which would break byte-identical regeneration.
struct Sampler {
    std::mt19937_64 rng;
    bool have_spare = false;
    double spare = 0.0;

    explicit Sampler(std::uint64_t seed) : rng(seed) {}

    double uniform() { return (double)(rng() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal(double sigma) {
        if (sigma <= 0.0) return 0.0;
        if (have_spare) {
            have_spare = false;
            return spare * sigma;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 1e-300);
        double u2 = uniform();
        double mag = std::sqrt(-2.0 * std::log(u1));
        spare = mag * std::sin(2.0 * M_PI * u2);
        have_spare = true;
        return mag * std::cos(2.0 * M_PI * u2) * sigma;
    }
};

} // namespace

void SceneSpec::validate() const {
    if (!(length_m > 0.0) || !(width_m > 0.0)) throw SpecError("track dimensions must be > 0");
    if (noise_sigma_m < 0.0) throw SpecError("noise_sigma_m must be >= 0");
    if (outlier_fraction < 0.0) throw SpecError("outlier_fraction must be >= 0");
    if (!(density_ppm2 > 0.0)) throw SpecError("density_ppm2 must be > 0");
    for (const SceneObject& o : objects) {
        if (o.x < 0.0 || o.x > length_m)
            throw SpecError("object position " + format_number(o.x) + " outside track");
        if (std::abs(o.y) > width_m / 2.0)
            throw SpecError("object offset " + format_number(o.y) + " outside strip");
    }
}

SceneSpec SceneSpec::parse(const std::string& text) {
    SceneSpec spec;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "length_m") spec.length_m = std::stod(value);
            else if (key == "width_m") spec.width_m = std::stod(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else if (key == "noise_sigma_m") spec.noise_sigma_m = std::stod(value);
            else if (key == "outlier_fraction") spec.outlier_fraction = std::stod(value);
            else if (key == "density_ppm2") spec.density_ppm2 = std::stod(value);
            else if (key == "object") {
                auto at = value.find('@');
                if (at == std::string::npos) throw ParseError("object needs kind@x[,y]", line_no);
                SceneObject obj;
                obj.kind = trim(value.substr(0, at));
                std::string coords = value.substr(at + 1);
                auto comma = coords.find(',');
                obj.x = std::stod(trim(coords.substr(0, comma)));
                if (comma != std::string::npos) obj.y = std::stod(trim(coords.substr(comma + 1)));
                spec.objects.push_back(obj);
            } else {
                throw ParseError("unknown key \"" + key + "\"", line_no);
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("bad value for " + key + ": \"" + value + "\"", line_no);
        }
    }
    spec.validate();
    return spec;
}

namespace {

void emit(std::string& out, double x, double y, double z) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.4f %.4f %.4f\n", x, y, z);
    out += buf;
}

// Vertical cylinder surface, base on the ground.
std::size_t sample_cylinder(std::string& out, Sampler& s, double cx, double cy, double radius,
                            double height, double density, double sigma) {
    std::size_t n = (std::size_t)std::llround(2.0 * M_PI * radius * height * density);
    for (std::size_t i = 0; i < n; ++i) {
        double phi = s.uniform(0.0, 2.0 * M_PI);
        double z = s.uniform(0.0, height);
        emit(out, cx + radius * std::cos(phi) + s.normal(sigma),
             cy + radius * std::sin(phi) + s.normal(sigma), z + s.normal(sigma));
    }
    return n;
}

// Axis-aligned box: four side faces plus the top, base on the ground.
std::size_t sample_box(std::string& out, Sampler& s, double cx, double cy, double ex, double ey,
                       double height, double density, double sigma) {
    std::size_t total = 0;
    double x0 = cx - ex / 2, x1 = cx + ex / 2;
    double y0 = cy - ey / 2, y1 = cy + ey / 2;
    auto face = [&](double area, auto point) {
        std::size_t n = (std::size_t)std::llround(area * density);
        total += n;
        for (std::size_t i = 0; i < n; ++i) {
            auto [px, py, pz] = point();
            emit(out, px + s.normal(sigma), py + s.normal(sigma), pz + s.normal(sigma));
        }
    };
    face(ex * height, [&] { return std::tuple{s.uniform(x0, x1), y0, s.uniform(0.0, height)}; });
    face(ex * height, [&] { return std::tuple{s.uniform(x0, x1), y1, s.uniform(0.0, height)}; });
    face(ey * height, [&] { return std::tuple{x0, s.uniform(y0, y1), s.uniform(0.0, height)}; });
    face(ey * height, [&] { return std::tuple{x1, s.uniform(y0, y1), s.uniform(0.0, height)}; });
    face(ex * ey, [&] { return std::tuple{s.uniform(x0, x1), s.uniform(y0, y1), height}; });
    return total;
}

// Thin plate standing on the ground: both large faces.
std::size_t sample_plate(std::string& out, Sampler& s, double cx, double cy, double ex, double ey,
                         double height, double density, double sigma) {
    std::size_t total = 0;
    double y0 = cy - ey / 2, y1 = cy + ey / 2;
    for (double fy : {y0, y1}) {
        std::size_t n = (std::size_t)std::llround(ex * height * density);
        total += n;
        for (std::size_t i = 0; i < n; ++i)
            emit(out, cx - ex / 2 + s.uniform(0.0, ex) + s.normal(sigma), fy + s.normal(sigma),
                 s.uniform(0.0, height) + s.normal(sigma));
    }
    return total;
}

struct Dim {
    double h, ex, ey;
};

} // namespace

GeneratedScene generate_scene(const SceneSpec& spec) {
    spec.validate();
    GeneratedScene scene;
    install_schema(scene.truth);
    Sampler s(spec.seed);
    double sigma = spec.noise_sigma_m;
    double density = spec.density_ppm2;
    std::string& out = scene.xyz_text;
    out += "# synthetic railway scene, seed " + std::to_string(spec.seed) + "\n";

    std::size_t object_points = 0;
    double max_height = 2.0;
    int counter = 0;

    for (const SceneObject& obj : spec.objects) {
        ++counter;
        char ind_buf[32];
        std::snprintf(ind_buf, sizeof(ind_buf), "t_%04d", counter);
        std::string ind = ind_buf;

        Name cls;
        Dim dim{};
        if (obj.kind == "normal_mast" || obj.kind == "mast") {
            cls = "NormalMast";
            dim = {5.5, 0.24, 0.24};
            object_points += sample_cylinder(out, s, obj.x, obj.y, 0.12, dim.h, density, sigma);
        } else if (obj.kind == "big_mast") {
            cls = "BigMast";
            dim = {7.0, 0.3, 0.3};
            object_points += sample_cylinder(out, s, obj.x, obj.y, 0.15, dim.h, density, sigma);
        } else if (obj.kind == "main_signal" || obj.kind == "distant_signal") {
            cls = obj.kind == "main_signal" ? "Main_Signal" : "Distant_Signal";
            // Pole with the small electricity box abutting its base on +y.
            object_points += sample_cylinder(out, s, obj.x, obj.y, 0.125, 4.7, density, sigma);
            object_points +=
                sample_box(out, s, obj.x, obj.y + 0.325, 0.4, 0.4, 0.45, density, sigma);
            dim = {4.7, 0.4, 0.65};
        } else if (obj.kind == "vorsignalbake") {
            cls = "Vorsignalbake";
            dim = {2.0, 0.5, 0.08};
            object_points += sample_plate(out, s, obj.x, obj.y, 0.5, 0.08, dim.h, density, sigma);
        } else if (obj.kind == "schaltschrack") {
            cls = "SchaltSchrack";
            dim = {0.38, 1.0, 1.0};
            object_points += sample_box(out, s, obj.x, obj.y, 1.0, 1.0, dim.h, density, sigma);
        } else if (obj.kind == "schalthouse") {
            cls = "Schalthouse";
            dim = {0.85, 1.5, 1.5};
            object_points += sample_box(out, s, obj.x, obj.y, 1.5, 1.5, dim.h, density, sigma);
        } else {
            throw SpecError("unknown object kind \"" + obj.kind + "\"");
        }
        max_height = std::max(max_height, dim.h);

        scene.truth.assert_class(ind, cls);
        scene.truth.assert_data(ind, "cx", Value(obj.x));
        scene.truth.assert_data(ind, "cy", Value(obj.y));
        scene.truth.assert_data(ind, "cz", Value(dim.h / 2));
        scene.truth.assert_data(ind, "height", Value(dim.h));
        scene.truth.assert_data(ind, "length", Value(std::max(dim.ex, dim.ey)));
        scene.truth.assert_data(ind, "width", Value(std::min(dim.ex, dim.ey)));
    }

    // Ground strip.
    std::size_t ground_n =
        (std::size_t)std::llround(spec.length_m * spec.width_m * density);
    for (std::size_t i = 0; i < ground_n; ++i)
        emit(out, s.uniform(0.0, spec.length_m),
             s.uniform(-spec.width_m / 2, spec.width_m / 2), s.normal(sigma));

    // Clutter, uniform in the scene box.
    std::size_t outlier_n =
        (std::size_t)std::llround(spec.outlier_fraction * (double)object_points);
    for (std::size_t i = 0; i < outlier_n; ++i)
        emit(out, s.uniform(0.0, spec.length_m),
             s.uniform(-spec.width_m / 2, spec.width_m / 2), s.uniform(0.0, max_height));

    return scene;
}

void write_scene_files(const SceneSpec& spec, const std::string& out_prefix) {
    GeneratedScene scene = generate_scene(spec);
    {
        std::ofstream xyz(out_prefix + ".xyz", std::ios::binary);
        if (!xyz) throw IoError("cannot write " + out_prefix + ".xyz");
        xyz << scene.xyz_text;
    }
    std::ofstream kb(out_prefix + ".truth.kb", std::ios::binary);
    if (!kb) throw IoError("cannot write " + out_prefix + ".truth.kb");
    kb << scene.truth.dump();
}

// --- Evaluation -----------------------------------------------------------------------

bool EvalResult::meets(double min_precision, double min_recall) const {
    for (const auto& [cls, score] : per_class)
        if (score.precision < min_precision || score.recall < min_recall) return false;
    return true;
}

namespace {

struct EvalObject {
    Name id;
    double cx = 0.0, cy = 0.0;
};

std::map<Name, std::vector<EvalObject>> objects_by_leaf(const KnowledgeBase& kb) {
    std::map<Name, std::vector<EvalObject>> result;
    std::vector<Name> leaves = domain_leaf_classes(kb);
    for (const Name& ind : kb.all_individuals()) {
        auto cx = stored(kb, ind, "cx");
        auto cy = stored(kb, ind, "cy");
        if (!cx || !cy) continue;
        for (const Name& cls : kb.classes_of(ind))
            if (std::binary_search(leaves.begin(), leaves.end(), cls))
                result[cls].push_back({ind, *cx, *cy});
    }
    return result;
}

} // namespace

EvalResult evaluate(const KnowledgeBase& pred, const KnowledgeBase& truth) {
    EvalResult result;
    auto pred_objs = objects_by_leaf(pred);
    auto truth_objs = objects_by_leaf(truth);

    std::set<Name> classes;
    for (const auto& [cls, v] : pred_objs) classes.insert(cls);
    for (const auto& [cls, v] : truth_objs) classes.insert(cls);

    for (const Name& cls : classes) {
        const auto& preds = pred_objs[cls];
        const auto& truths = truth_objs[cls];
        ClassScore score;
        score.pred_count = preds.size();
        score.truth_count = truths.size();

        struct Pair {
            double dist;
            std::size_t p, t;
        };
        std::vector<Pair> pairs;
        for (std::size_t p = 0; p < preds.size(); ++p)
            for (std::size_t t = 0; t < truths.size(); ++t) {
                double d = std::hypot(preds[p].cx - truths[t].cx, preds[p].cy - truths[t].cy);
                if (d <= 1.0) pairs.push_back({d, p, t});
            }
        std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
            if (a.dist != b.dist) return a.dist < b.dist;
            if (preds[a.p].id != preds[b.p].id) return preds[a.p].id < preds[b.p].id;
            return truths[a.t].id < truths[b.t].id;
        });
        std::vector<bool> p_used(preds.size()), t_used(truths.size());
        for (const Pair& pr : pairs) {
            if (p_used[pr.p] || t_used[pr.t]) continue;
            p_used[pr.p] = t_used[pr.t] = true;
            ++score.matched;
            result.matches.push_back({preds[pr.p].id, truths[pr.t].id, cls, pr.dist});
        }
        score.zero_predictions = preds.empty();
        score.precision = preds.empty() ? 1.0 : (double)score.matched / (double)preds.size();
        score.recall = truths.empty() ? 1.0 : (double)score.matched / (double)truths.size();
        result.per_class[cls] = score;
    }
    return result;
}

} // namespace cloudsem::railway
