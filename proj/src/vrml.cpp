#include "cloudsem/vrml.hpp"

#include "cloudsem/errors.hpp"

#include <optional>
#include <sstream>

namespace cloudsem {

ColorMap ColorMap::defaults() {
    ColorMap map;
    map.colors["Mast"] = {0, 0, 1};
    map.colors["BigMast"] = {0, 0, 1};
    map.colors["NormalMast"] = {0, 0, 1};
    map.colors["Main_Signal"] = {1, 0, 0};
    map.colors["Distant_Signal"] = {1, 0.5, 0};
    map.colors["Vorsignalbake"] = {1, 1, 0};
    map.colors["Breakpoint_table"] = {1, 1, 0};
    map.colors["Chess_board"] = {1, 1, 0};
    map.colors["Schalthouse"] = {0, 1, 0};
    map.colors["SchaltSchrack"] = {0, 1, 0};
    map.colors["Vertical_BoundingBox"] = {0.5, 0.5, 0.5};
    map.colors["Horizontal_BoundingBox"] = {0.5, 0.5, 0.5};
    return map;
}

ColorMap ColorMap::load(const std::string& text, ColorMap base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string cls;
        double r, g, b;
        if (!(fields >> cls >> r >> g >> b))
            throw ParseError("expected \"<ClassName> r g b\"", line_no);
        if (r < 0 || r > 1 || g < 0 || g > 1 || b < 0 || b > 1)
            throw ParseError("color components must be in [0,1]", line_no);
        base.colors[cls] = {r, g, b};
    }
    return base;
}

namespace {

std::optional<double> stored_number(const KnowledgeBase& kb, const Name& ind, const Name& prop) {
    for (const Value& v : kb.values_of(ind, prop))
        if (v.is_number()) return v.number();
    return std::nullopt;
}

// Most specific class: deepest in the taxonomy, ties broken alphabetically.
Name most_specific_class(const KnowledgeBase& kb, const Name& ind) {
    Name best;
    int best_depth = -1;
    for (const Name& cls : kb.classes_of(ind)) {
        int depth = kb.class_depth(cls);
        if (depth > best_depth || (depth == best_depth && cls < best)) {
            best = cls;
            best_depth = depth;
        }
    }
    return best;
}

} // namespace

std::string export_vrml(const KnowledgeBase& kb, const ColorMap& colors) {
    std::ostringstream out;
    out << "#VRML V2.0 utf8\n";
    for (const Name& ind : kb.all_individuals()) {
        auto cx = stored_number(kb, ind, "cx");
        auto cy = stored_number(kb, ind, "cy");
        auto cz = stored_number(kb, ind, "cz");
        auto h = stored_number(kb, ind, "height");
        auto l = stored_number(kb, ind, "length");
        auto w = stored_number(kb, ind, "width");
        bool has_geometry = cx && cy && cz && h && l && w;
        if (!has_geometry) {
            bool classified = false;
            for (const Name& cls : kb.classes_of(ind))
                if (cls != "DomainConcept" && kb.is_subclass_of(cls, "DomainConcept"))
                    classified = true;
            if (classified)
                throw MissingGeometry("individual " + ind +
                                      " is classified but has no geometry facts");
            continue;
        }
        std::array<double, 3> rgb{0.5, 0.5, 0.5};
        Name cls = most_specific_class(kb, ind);
        if (auto it = colors.colors.find(cls); it != colors.colors.end()) rgb = it->second;

        out << "DEF " << ind << " Transform {\n";
        out << "  translation " << format_number(*cx) << " " << format_number(*cy) << " "
            << format_number(*cz) << "\n";
        out << "  children [\n";
        out << "    Shape {\n";
        out << "      appearance Appearance { material Material { diffuseColor "
            << format_number(rgb[0]) << " " << format_number(rgb[1]) << " "
            << format_number(rgb[2]) << " } }\n";
        out << "      geometry Box { size " << format_number(*l) << " " << format_number(*w)
            << " " << format_number(*h) << " }\n";
        out << "    }\n";
        out << "  ]\n";
        out << "}\n";
    }
    return out.str();
}

} // namespace cloudsem
