#include "cloudsem/errors.hpp"
#include "cloudsem/kb.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace cloudsem;

TEST_CASE("subclass closure makes members visible at every level") {
    KnowledgeBase kb;
    kb.declare_class("DomainConcept");
    kb.declare_class("Schaltanlage", Name("DomainConcept"));
    kb.declare_class("SchaltSchrack", Name("Schaltanlage"));
    kb.assert_class("box1", "SchaltSchrack");
    for (const char* cls : {"SchaltSchrack", "Schaltanlage", "DomainConcept"})
        CHECK(kb.individuals_of(cls) == std::vector<Name>{"box1"});
}

TEST_CASE("cycles are rejected, redeclaration is a no-op") {
    KnowledgeBase kb;
    kb.declare_class("B");
    kb.declare_class("A", Name("B"));
    CHECK_THROWS_AS(kb.declare_class("B", Name("A")), CycleError);
    kb.declare_class("A", Name("B")); // same edge again
    CHECK(kb.all_classes() == std::vector<Name>{"A", "B"});
}

TEST_CASE("assertions are sets") {
    KnowledgeBase kb;
    CHECK(kb.assert_class("vbb_0001", "Vertical_BoundingBox"));
    CHECK_FALSE(kb.assert_class("vbb_0001", "Vertical_BoundingBox"));
    CHECK(kb.individuals_of("Vertical_BoundingBox") == std::vector<Name>{"vbb_0001"});

    CHECK(kb.assert_object("s1", "hasDistanceFrom_1000", "s2"));
    CHECK_FALSE(kb.assert_object("s1", "hasDistanceFrom_1000", "s2"));
    CHECK(kb.objects_of("s1", "hasDistanceFrom_1000") == std::vector<Name>{"s2"});

    CHECK(kb.assert_data("vbb_0001", "height", Value(7.2)));
    CHECK_FALSE(kb.assert_data("vbb_0001", "height", Value(7.2)));
    CHECK(kb.values_of("vbb_0001", "height") == std::vector<Value>{Value(7.2)});
}

TEST_CASE("unknown names give empty query results") {
    KnowledgeBase kb;
    CHECK(kb.individuals_of("Nothing").empty());
    CHECK(kb.values_of("nobody", "height").empty());
    CHECK(kb.objects_of("nobody", "rel").empty());
}

TEST_CASE("individuals_of equals a brute-force closure on a random KB") {
    std::mt19937_64 rng(99);
    KnowledgeBase kb;
    std::vector<Name> classes;
    for (int i = 0; i < 12; ++i) {
        Name cls = "C" + std::to_string(i);
        if (i == 0 || rng() % 3 == 0)
            kb.declare_class(cls);
        else
            kb.declare_class(cls, classes[rng() % classes.size()]);
        classes.push_back(cls);
    }
    for (int i = 0; i < 100; ++i)
        kb.assert_class("ind" + std::to_string(rng() % 20), classes[rng() % classes.size()]);

    // Oracle: repeatedly propagate members child -> parent until stable.
    std::map<Name, std::set<Name>> members;
    for (const Name& cls : classes)
        for (const Name& ind : kb.all_individuals())
            if (kb.has_class(ind, cls)) members[cls].insert(ind);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Name& cls : classes) {
            auto parent = kb.parent_of(cls);
            if (!parent) continue;
            for (const Name& ind : members[cls])
                changed |= members[*parent].insert(ind).second;
        }
    }
    for (const Name& cls : classes) {
        std::vector<Name> expect(members[cls].begin(), members[cls].end());
        CHECK(kb.individuals_of(cls) == expect);
    }
}

TEST_CASE("dump/load round-trips and is canonical") {
    KnowledgeBase kb;
    kb.declare_class("DomainConcept");
    kb.declare_class("Mast", Name("DomainConcept"));
    kb.declare_object_property("hasGeometry");
    kb.assert_class("m1", "Mast");
    kb.assert_data("m1", "height", Value(7.25));
    kb.assert_data("m1", "label", Value("ein \"Mast\""));
    kb.assert_object("m1", "hasGeometry", "m1");

    std::string text = kb.dump();
    KnowledgeBase loaded = KnowledgeBase::load(text);
    CHECK(loaded == kb);
    CHECK(loaded.dump() == text);

    // Same facts inserted in a different order give a byte-identical dump.
    KnowledgeBase other;
    other.assert_object("m1", "hasGeometry", "m1");
    other.assert_data("m1", "label", Value("ein \"Mast\""));
    other.assert_data("m1", "height", Value(7.25));
    other.assert_class("m1", "Mast");
    other.declare_class("Mast", Name("DomainConcept"));
    other.declare_object_property("hasGeometry");
    CHECK(other.dump() == text);
}

TEST_CASE("round-trip property on random KBs") {
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 25; ++round) {
        KnowledgeBase kb;
        int n_classes = 1 + (int)(rng() % 5);
        for (int i = 0; i < n_classes; ++i) {
            if (i == 0)
                kb.declare_class("K0");
            else
                kb.declare_class("K" + std::to_string(i), "K" + std::to_string(rng() % i));
        }
        int n_facts = (int)(rng() % 50);
        for (int i = 0; i < n_facts; ++i) {
            Name a = "i" + std::to_string(rng() % 8);
            Name b = "i" + std::to_string(rng() % 8);
            switch (rng() % 4) {
            case 0: kb.assert_class(a, "K" + std::to_string(rng() % n_classes)); break;
            case 1: kb.assert_object(a, "p" + std::to_string(rng() % 3), b); break;
            case 2: kb.assert_data(a, "d", Value((double)(rng() % 100000) / 777.0)); break;
            default: kb.assert_data(a, "t", Value("text " + std::to_string(rng() % 5))); break;
            }
        }
        KnowledgeBase loaded = KnowledgeBase::load(kb.dump());
        CHECK(loaded == kb);
        CHECK(loaded.dump() == kb.dump());
    }
}

TEST_CASE("empty KB dumps to schema lines only") {
    KnowledgeBase kb;
    CHECK(kb.dump().empty());
    kb.declare_class("Scene");
    CHECK(kb.dump() == "decl Scene\n");
}

TEST_CASE("load reports malformed lines") {
    try {
        KnowledgeBase::load("class x\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }
    CHECK_THROWS_AS(KnowledgeBase::load("data a b notanumber\n"), ParseError);
    CHECK_THROWS_AS(KnowledgeBase::load("subclass A B\nsubclass B A\n"), ParseError);
}

TEST_CASE("numeric values serialize with at most 6 decimals") {
    CHECK(format_number(50.0) == "50");
    CHECK(format_number(7.2) == "7.2");
    CHECK(format_number(0.123456789) == "0.123457");
    CHECK(Value(1.0000000001) == Value(1.0)); // quantized on construction
}
