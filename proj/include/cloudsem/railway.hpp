#pragma once

#include "cloudsem/builtins.hpp"
#include "cloudsem/kb.hpp"
#include "cloudsem/rules.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cloudsem::railway {

// --- Schema -----------------------------------------------------------------

// Declares the Deutsche Bahn taxonomy (Scene, Algorithm, Characteristics,
// Geometry with the two bounding-box classes, DomainConcept with the signal /
// mast / Schaltanlage trees) plus the four general object properties.
// Idempotent; throws CycleError when the KB already disagrees.
void install_schema(KnowledgeBase& kb);

// Leaf classes below DomainConcept in this KB's taxonomy; sorted.
std::vector<Name> domain_leaf_classes(const KnowledgeBase& kb);

// --- Geometric ranges --------------------------------------------------------

struct Interval {
    double lo = -1e300;
    double hi = 1e300;
    bool lo_strict = false;
    bool hi_strict = false;

    bool constrained() const { return lo > -1e300 || hi < 1e300; }
    bool contains(double v) const {
        if (lo_strict ? v <= lo : v < lo) return false;
        if (hi_strict ? v >= hi : v > hi) return false;
        return true;
    }
};

struct ClassRanges {
    Interval height, length, width;
};

// Height/length/width bands per leaf class. `zeta` is the "close to zero"
// threshold separating plates and poles from wider structures.
struct GeometricRanges {
    double zeta = 0.5;
    std::map<Name, ClassRanges> by_class;

    static GeometricRanges defaults(double zeta = 0.5);
};

// --- Rule pack ---------------------------------------------------------------

// The shipped annotation rules: detection, geometric classification bands,
// then the topological refinements (signal pairing at 1000 m / 700 m, the
// Vorsignalbake chain, mast propagation at 50 m, and the connected-cabinet
// signal discriminator). Parses cleanly against make_standard_registry().
std::string ruleset_text(double zeta = 0.5);

// --- Pipeline ----------------------------------------------------------------

struct AnnotateResult {
    KnowledgeBase kb;
    AnnotationReport report;
};

// Full pipeline: installs the schema, creates a Scene individual pointing at
// the cloud file, runs the rules to fixpoint, then resolves conflicting leaf
// labels. Conflicts are recorded in the report, never fatal.
AnnotateResult annotate_scene(const std::string& cloud_path, EvalContext& ctx,
                              const std::vector<Rule>& rules, const BuiltInRegistry& registry);

// Applies the specificity policy to individuals holding two or more leaf
// labels: a label whose full geometric constraint set is satisfied and that
// has support beyond the height band drops labels matched on height alone;
// remaining ties keep every label and emit a conflict record.
std::vector<ConflictRecord> resolve_conflicts(KnowledgeBase& kb,
                                              const GeometricRanges& ranges = GeometricRanges::defaults());

// --- Synthetic scenes ---------------------------------------------------------

struct SceneObject {
    std::string kind; // normal_mast, big_mast, main_signal, distant_signal,
                      // vorsignalbake, schaltschrack, schalthouse (mast = normal_mast)
    double x = 0.0;   // along-track position, m
    double y = 0.0;   // lateral offset, m
};

struct SceneSpec {
    double length_m = 500.0;
    double width_m = 16.0;
    std::uint64_t seed = 1;
    double noise_sigma_m = 0.0;
    double outlier_fraction = 0.0; // of the object sample count
    double density_ppm2 = 60.0;    // surface sampling density
    std::vector<SceneObject> objects;

    static SceneSpec parse(const std::string& text);
    void validate() const;
};

struct GeneratedScene {
    std::string xyz_text;
    KnowledgeBase truth;
};

// Deterministic per seed; the truth KB carries exact (noise-free) positions
// and nominal dimensions.
GeneratedScene generate_scene(const SceneSpec& spec);

// Writes <prefix>.xyz and <prefix>.truth.kb.
void write_scene_files(const SceneSpec& spec, const std::string& out_prefix);

// --- Evaluation ----------------------------------------------------------------

struct ClassScore {
    std::size_t truth_count = 0;
    std::size_t pred_count = 0;
    std::size_t matched = 0;
    double precision = 1.0; // 1.0 by convention when there are no predictions
    double recall = 1.0;
    bool zero_predictions = false;
};

struct MatchRecord {
    Name pred_id, truth_id, cls;
    double distance = 0.0;
};

struct EvalResult {
    std::map<Name, ClassScore> per_class;
    std::vector<MatchRecord> matches;

    bool meets(double min_precision, double min_recall) const;
};

// Greedy nearest-centroid matching within 1.0 m ground-plane distance;
// classes must agree at the taxonomy leaf.
EvalResult evaluate(const KnowledgeBase& pred, const KnowledgeBase& truth);

} // namespace cloudsem::railway
