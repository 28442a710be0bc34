#include "cloudsem/builtins.hpp"
#include "cloudsem/errors.hpp"
#include "cloudsem/railway.hpp"
#include "cloudsem/vrml.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cloudsem;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

KnowledgeBase big_mast_kb() {
    KnowledgeBase kb;
    railway::install_schema(kb);
    kb.assert_class("vbb_0001", "Vertical_BoundingBox");
    kb.assert_class("vbb_0001", "BigMast");
    kb.assert_data("vbb_0001", "cx", Value(5.0));
    kb.assert_data("vbb_0001", "cy", Value(0.0));
    kb.assert_data("vbb_0001", "cz", Value(3.5));
    kb.assert_data("vbb_0001", "height", Value(7.0));
    kb.assert_data("vbb_0001", "length", Value(0.3));
    kb.assert_data("vbb_0001", "width", Value(0.3));
    kb.assert_object("vbb_0001", "hasGeometry", "vbb_0001");
    return kb;
}

} // namespace

TEST_CASE("a BigMast exports as a blue DEF box") {
    std::string vrml = export_vrml(big_mast_kb());
    CHECK(vrml.rfind("#VRML V2.0 utf8\n", 0) == 0);
    CHECK(vrml.find("DEF vbb_0001 Transform") != std::string::npos);
    CHECK(vrml.find("diffuseColor 0 0 1") != std::string::npos);
    CHECK(vrml.find("translation 5 0 3.5") != std::string::npos);
    CHECK(vrml.find("Box { size 0.3 0.3 7 }") != std::string::npos);
}

TEST_CASE("an empty KB exports the header only") {
    KnowledgeBase kb;
    CHECK(export_vrml(kb) == "#VRML V2.0 utf8\n");
}

TEST_CASE("unclassified boxes fall back to gray") {
    KnowledgeBase kb;
    railway::install_schema(kb);
    kb.assert_class("vbb_0001", "Vertical_BoundingBox");
    for (const char* prop : {"cx", "cy", "cz", "height", "length", "width"})
        kb.assert_data("vbb_0001", prop, Value(1.0));
    CHECK(export_vrml(kb).find("diffuseColor 0.5 0.5 0.5") != std::string::npos);
}

TEST_CASE("classified individuals without geometry are an error") {
    KnowledgeBase kb;
    railway::install_schema(kb);
    kb.assert_class("ghost", "Mast");
    CHECK_THROWS_AS(export_vrml(kb), MissingGeometry);
}

TEST_CASE("export is byte-deterministic and covers each individual once") {
    KnowledgeBase kb = big_mast_kb();
    kb.assert_class("vbb_0002", "Vertical_BoundingBox");
    for (const char* prop : {"cx", "cy", "cz", "height", "length", "width"})
        kb.assert_data("vbb_0002", prop, Value(2.0));
    std::string once = export_vrml(kb);
    CHECK(once == export_vrml(kb));
    CHECK(once.find("DEF vbb_0001 ") != std::string::npos);
    CHECK(once.find("DEF vbb_0002 ") != std::string::npos);
    CHECK(once.find("DEF vbb_0001 ") == once.rfind("DEF vbb_0001 "));
    CHECK(once.find("DEF vbb_0001 ") < once.find("DEF vbb_0002 "));
}

TEST_CASE("color overrides replace defaults") {
    ColorMap map = ColorMap::load("BigMast 0.1 0.2 0.3\n");
    CHECK(map.colors.at("BigMast") == std::array<double, 3>{0.1, 0.2, 0.3});
    CHECK(map.colors.at("Main_Signal") == std::array<double, 3>{1, 0, 0});
    CHECK_THROWS_AS(ColorMap::load("BigMast 2 0 0\n"), ParseError);
    std::string vrml = export_vrml(big_mast_kb(), map);
    CHECK(vrml.find("diffuseColor 0.1 0.2 0.3") != std::string::npos);
}

// --- CLI end-to-end ------------------------------------------------------------

namespace {

int run_cli(const std::string& args, std::string* out_text = nullptr) {
    const char* bin = std::getenv("CLOUDSEM_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "CLOUDSEM_BIN not set (run via ctest)");
    std::string capture = temp_path("cli_stdout.txt");
    std::string cmd = std::string(bin) + " " + args + " >" + capture + " 2>" + capture + ".err";
    int status = std::system(cmd.c_str());
    if (out_text) *out_text = slurp(capture);
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("cli pipeline: generate, annotate, export, eval") {
    std::string spec_path = temp_path("cli_scene.spec");
    std::ofstream(spec_path) << "length_m = 120\n"
                                "width_m = 12\n"
                                "seed = 31\n"
                                "noise_sigma_m = 0.0\n"
                                "outlier_fraction = 0.0\n"
                                "density_ppm2 = 80\n"
                                "object = big_mast@40, 2\n"
                                "object = schaltschrack@80, -3\n";
    std::string prefix = temp_path("cli_scene");
    CHECK(run_cli("generate --spec " + spec_path + " --out-prefix " + prefix) == 0);
    CHECK(std::filesystem::exists(prefix + ".xyz"));
    CHECK(std::filesystem::exists(prefix + ".truth.kb"));

    std::string rules_path = temp_path("cli_rules.rules");
    std::ofstream(rules_path) << railway::ruleset_text();
    std::string kb_path = temp_path("cli_scene.kb");
    CHECK(run_cli("annotate --cloud " + prefix + ".xyz --rules " + rules_path + " --out " +
                  kb_path) == 0);

    KnowledgeBase kb = KnowledgeBase::load(slurp(kb_path));
    CHECK(kb.individuals_of("BigMast").size() == 1);
    CHECK(kb.individuals_of("SchaltSchrack").size() == 1);

    std::string vrml_path = temp_path("cli_scene.wrl");
    CHECK(run_cli("export --kb " + kb_path + " --out " + vrml_path) == 0);
    std::string vrml = slurp(vrml_path);
    CHECK(vrml.rfind("#VRML V2.0 utf8\n", 0) == 0);
    CHECK(vrml.find("diffuseColor 0 0 1") != std::string::npos);  // mast
    CHECK(vrml.find("diffuseColor 0 1 0") != std::string::npos);  // cabinet

    std::string table;
    CHECK(run_cli("eval --pred " + prefix + ".truth.kb --truth " + prefix + ".truth.kb", &table) ==
          0);
    CHECK(table.find("1.00") != std::string::npos);

    // detect-only dump loads back and contains a vertical box
    std::string det_path = temp_path("cli_detect.kb");
    CHECK(run_cli("detect --cloud " + prefix + ".xyz --out " + det_path) == 0);
    KnowledgeBase det = KnowledgeBase::load(slurp(det_path));
    CHECK(det.individuals_of("Vertical_BoundingBox").size() == 1);
}

TEST_CASE("cli exit codes: usage errors are 1, processing errors are 2") {
    CHECK(run_cli("annotate --no-such-flag") == 1);
    CHECK(run_cli("") == 1);
    std::string rules_path = temp_path("cli_rules2.rules");
    std::ofstream(rules_path) << railway::ruleset_text();
    CHECK(run_cli("annotate --cloud /missing.xyz --rules " + rules_path + " --out " +
                  temp_path("x.kb")) == 2);
}

TEST_CASE("annotate output reloads identically (pipeline round-trip)") {
    railway::SceneSpec spec;
    spec.length_m = 60;
    spec.width_m = 10;
    spec.seed = 77;
    spec.density_ppm2 = 60;
    spec.objects.push_back({"mast", 20, 0});
    spec.objects.push_back({"mast", 40, 0}); // hmm: 20 m apart, no chain rule fires
    std::string prefix = temp_path("roundtrip_scene");
    railway::write_scene_files(spec, prefix);

    EvalContext ctx;
    BuiltInRegistry registry = make_standard_registry();
    auto rules = parse_ruleset(railway::ruleset_text(), registry);
    railway::AnnotateResult result = railway::annotate_scene(prefix + ".xyz", ctx, rules, registry);

    KnowledgeBase reloaded = KnowledgeBase::load(result.kb.dump());
    CHECK(reloaded == result.kb);
    CHECK(reloaded.dump() == result.kb.dump());
}
