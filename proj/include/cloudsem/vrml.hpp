#pragma once

#include "cloudsem/kb.hpp"

#include <array>
#include <map>
#include <string>

namespace cloudsem {

// Leaf class -> RGB in [0,1]. The colour of an exported box encodes its most
// specific class; unclassified bounding boxes fall back to gray.
struct ColorMap {
    std::map<Name, std::array<double, 3>> colors;

    static ColorMap defaults();
    // Override file: one "<ClassName> r g b" per line, '#' comments.
    static ColorMap load(const std::string& text, ColorMap base = defaults());
};

// Emits a VRML 2.0 scene: one "DEF <individual> Transform" per
// geometry-bearing individual (translation = stored centroid, Box size =
// stored length/width/height), in sorted id order. Byte-deterministic.
// Throws MissingGeometry for individuals classified under DomainConcept that
// lack geometry data facts.
std::string export_vrml(const KnowledgeBase& kb, const ColorMap& colors = ColorMap::defaults());

} // namespace cloudsem
