// Command-line pipeline driver: detect / annotate / export / generate / eval.
#include "cloudsem/builtins.hpp"
#include "cloudsem/errors.hpp"
#include "cloudsem/railway.hpp"
#include "cloudsem/vrml.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace cloudsem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

// key = value parameter file; --set flags override it, defaults fill the rest.
void apply_params(EvalContext& ctx, const std::map<std::string, double>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "ground_percentile") ctx.detect.ground_percentile = value;
        else if (key == "cell_size") ctx.detect.cell_size = value;
        else if (key == "min_points_per_cluster") ctx.detect.min_points_per_cluster = (std::size_t)value;
        else if (key == "min_height") ctx.detect.min_height = value;
        else if (key == "merge_gap") ctx.detect.merge_gap = value;
        else if (key == "vertical_aspect_min") ctx.detect.vertical_aspect_min = value;
        else if (key == "horizontal_aspect_max") ctx.detect.horizontal_aspect_max = value;
        else if (key == "min_cell_points") ctx.detect.min_cell_points = (std::size_t)value;
        else if (key == "ground_band") ctx.detect.ground_band = value;
        else if (key == "ransac_iterations") ctx.ransac.iterations = (std::size_t)value;
        else if (key == "inlier_threshold") ctx.ransac.inlier_threshold = value;
        else if (key == "min_inliers") ctx.ransac.min_inliers = (std::size_t)value;
        else if (key == "rng_seed") ctx.ransac.rng_seed = (std::uint64_t)value;
        else if (key == "touch_eps") ctx.topology.touch_eps = value;
        else if (key == "distance_tol_fraction") ctx.topology.distance_tol_fraction = value;
        else if (key == "perpendicular_tol") ctx.topology.perpendicular_tol = value;
        else if (key == "footprint_overlap_min") ctx.topology.footprint_overlap_min = value;
        else throw SpecError("unknown parameter \"" + key + "\"");
    }
}

std::map<std::string, double> parse_param_text(const std::string& text, const std::string& origin) {
    std::map<std::string, double> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ": expected key = value", line_no);
        std::istringstream key_in(line.substr(0, eq));
        std::string key;
        key_in >> key;
        try {
            kv[key] = std::stod(line.substr(eq + 1));
        } catch (const std::exception&) {
            throw ParseError(origin + ": bad numeric value for " + key, line_no);
        }
    }
    return kv;
}

EvalContext make_context(const std::string& params_path, const std::vector<std::string>& sets) {
    EvalContext ctx;
    if (!params_path.empty()) apply_params(ctx, parse_param_text(read_file(params_path), params_path));
    std::map<std::string, double> overrides;
    for (const std::string& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw SpecError("--set expects key=value, got \"" + s + "\"");
        overrides[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    }
    apply_params(ctx, overrides);
    return ctx;
}

// Detectors only: schema plus the geometry facts the processing built-ins
// would assert, no rules.
int run_detect(const std::string& cloud_path, const std::string& out_path, EvalContext& ctx) {
    KnowledgeBase kb;
    railway::install_schema(kb);
    BuiltInRegistry registry = make_standard_registry();
    for (const char* name :
         {"3D_swrlb_Processing:VerticalElementDetection",
          "3D_swrlb_Processing:HorizontalElementDetection"}) {
        const BuiltInDef* def = registry.find(name);
        def->generate(ctx, kb, {Ground::literal(Value(cloud_path))});
    }
    write_file(out_path, kb.dump());
    return 0;
}

int run_annotate(const std::string& cloud_path, const std::string& rules_path,
                 const std::string& out_path, EvalContext& ctx) {
    BuiltInRegistry registry = make_standard_registry();
    std::vector<Rule> rules = parse_ruleset(read_file(rules_path), registry);
    railway::AnnotateResult result = railway::annotate_scene(cloud_path, ctx, rules, registry);
    write_file(out_path, result.kb.dump());
    std::cerr << "annotate: " << result.report.iterations << " passes, "
              << result.report.facts_added << " facts added, " << result.report.conflicts.size()
              << " conflicts\n";
    for (const auto& c : result.report.conflicts) {
        std::cerr << "conflict: " << c.individual << " kept";
        for (const auto& l : c.labels) std::cerr << " " << l;
        std::cerr << "\n";
    }
    return 0;
}

int run_eval(const std::string& pred_path, const std::string& truth_path) {
    KnowledgeBase pred = KnowledgeBase::load(read_file(pred_path));
    KnowledgeBase truth = KnowledgeBase::load(read_file(truth_path));
    railway::EvalResult result = railway::evaluate(pred, truth);
    std::printf("%-18s %6s %6s %8s %10s %8s\n", "class", "truth", "pred", "matched", "precision",
                "recall");
    for (const auto& [cls, score] : result.per_class) {
        std::printf("%-18s %6zu %6zu %8zu %10.2f %8.2f%s\n", cls.c_str(), score.truth_count,
                    score.pred_count, score.matched, score.precision, score.recall,
                    score.zero_predictions ? "  (no predictions)" : "");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-driven object detection and annotation in 3D point clouds"};
    app.require_subcommand(1);

    std::string cloud, out, rules_path, params, kb_path, colors_path, pred_path, truth_path,
        spec_path, out_prefix;
    std::vector<std::string> sets;

    CLI::App* detect = app.add_subcommand("detect", "run the box detectors, dump a geometry KB");
    detect->add_option("--cloud", cloud, "XYZ point cloud file")->required();
    detect->add_option("--out", out, "output KB dump")->required();
    detect->add_option("--params", params, "parameter file (key = value)");
    detect->add_option("--set", sets, "override a single parameter (key=value)");

    CLI::App* annotate = app.add_subcommand("annotate", "full detection + rule annotation pipeline");
    annotate->add_option("--cloud", cloud, "XYZ point cloud file")->required();
    annotate->add_option("--rules", rules_path, "rule pack file")->required();
    annotate->add_option("--out", out, "output KB dump")->required();
    annotate->add_option("--params", params, "parameter file (key = value)");
    annotate->add_option("--set", sets, "override a single parameter (key=value)");

    CLI::App* exportv = app.add_subcommand("export", "emit a colored VRML scene from a KB dump");
    exportv->add_option("--kb", kb_path, "KB dump file")->required();
    exportv->add_option("--out", out, "output VRML file")->required();
    exportv->add_option("--colors", colors_path, "color override file");

    CLI::App* generate = app.add_subcommand("generate", "synthesize a scene + truth KB");
    generate->add_option("--spec", spec_path, "scene spec file")->required();
    generate->add_option("--out-prefix", out_prefix, "output prefix")->required();

    CLI::App* eval = app.add_subcommand("eval", "per-class precision/recall of pred vs truth");
    eval->add_option("--pred", pred_path, "predicted KB dump")->required();
    eval->add_option("--truth", truth_path, "truth KB dump")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // help goes to stdout, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the diagnostic and usage hint to stderr
        return 1;
    }

    try {
        if (detect->parsed()) {
            EvalContext ctx = make_context(params, sets);
            return run_detect(cloud, out, ctx);
        }
        if (annotate->parsed()) {
            EvalContext ctx = make_context(params, sets);
            return run_annotate(cloud, rules_path, out, ctx);
        }
        if (exportv->parsed()) {
            KnowledgeBase kb = KnowledgeBase::load(read_file(kb_path));
            ColorMap colors = colors_path.empty()
                                  ? ColorMap::defaults()
                                  : ColorMap::load(read_file(colors_path));
            write_file(out, export_vrml(kb, colors));
            return 0;
        }
        if (generate->parsed()) {
            railway::SceneSpec spec = railway::SceneSpec::parse(read_file(spec_path));
            railway::write_scene_files(spec, out_prefix);
            return 0;
        }
        if (eval->parsed()) return run_eval(pred_path, truth_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
