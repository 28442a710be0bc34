#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cloudsem {

// Names are flat strings, optionally carrying a "prefix:" namespace
// (e.g. "Mast", "3D_swrlb_Topology:Upper"). Never empty, no whitespace.
using Name = std::string;

// A data-property value: a real (stored quantized to 6 decimal places so
// dump/load is lossless) or a piece of text.
class Value {
public:
    Value() : v_(0.0) {}
    Value(double d);
    Value(const std::string& s) : v_(s) {}
    Value(const char* s) : v_(std::string(s)) {}

    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }
    double number() const { return std::get<double>(v_); }
    const std::string& text() const { return std::get<std::string>(v_); }

    friend bool operator==(const Value&, const Value&) = default;
    friend auto operator<=>(const Value&, const Value&) = default;

    // Canonical text form: numbers with up to 6 decimals, text double-quoted.
    std::string to_string() const;

private:
    std::variant<double, std::string> v_;
};

// Formats a real with at most 6 decimal places, trailing zeros trimmed.
std::string format_number(double d);

// In-memory knowledge base: class taxonomy (a DAG under subClassOf),
// individuals, and three kinds of facts. Unknown names are auto-declared on
// first use; there is no closed schema.
class KnowledgeBase {
public:
    struct ObjFact {
        Name subj, prop, obj;
        friend auto operator<=>(const ObjFact&, const ObjFact&) = default;
    };
    struct DataFact {
        Name subj, prop;
        Value value;
        friend auto operator<=>(const DataFact&, const DataFact&) = default;
    };

    // Declares a class, optionally under a parent. Rejects edges that would
    // make subClassOf cyclic (CycleError); redeclaration is a no-op.
    void declare_class(const Name& cls, const std::optional<Name>& parent = std::nullopt);
    void declare_object_property(const Name& prop);

    // Each assert_* returns true iff the fact was newly added.
    bool assert_class(const Name& individual, const Name& cls);
    bool assert_object(const Name& subj, const Name& prop, const Name& obj);
    bool assert_data(const Name& subj, const Name& prop, const Value& value);

    // Removes a direct class assertion (used by conflict resolution, never by
    // the rule engine). Returns true iff the fact existed.
    bool retract_class(const Name& individual, const Name& cls);

    bool has_class(const Name& individual, const Name& cls) const;
    bool has_object(const Name& subj, const Name& prop, const Name& obj) const;
    bool has_data(const Name& subj, const Name& prop, const Value& value) const;
    bool is_declared_class(const Name& cls) const { return classes_.count(cls) > 0; }
    bool is_individual(const Name& n) const { return individuals_.count(n) > 0; }

    // Members of `cls` and of every transitive subclass; sorted, no duplicates.
    std::vector<Name> individuals_of(const Name& cls) const;
    // Direct class assertions of one individual; sorted.
    std::vector<Name> classes_of(const Name& individual) const;
    std::vector<Value> values_of(const Name& individual, const Name& prop) const;
    std::vector<Name> objects_of(const Name& subj, const Name& prop) const;

    // cls plus all transitive subclasses; sorted.
    std::vector<Name> subclasses_of(const Name& cls) const;
    // Direct parent, if any.
    std::optional<Name> parent_of(const Name& cls) const;
    // Distance from a root class (root = 0); used to pick most-specific labels.
    int class_depth(const Name& cls) const;
    bool is_subclass_of(const Name& cls, const Name& ancestor) const;

    std::vector<Name> all_classes() const;
    std::vector<Name> all_individuals() const;
    std::vector<Name> declared_object_properties() const;
    const std::set<ObjFact>& object_facts() const { return obj_facts_; }
    const std::set<DataFact>& data_facts() const { return data_facts_; }
    const std::map<Name, std::set<Name>>& class_facts() const { return class_facts_; }

    // Total number of stored facts (class + object + data assertions).
    std::size_t fact_count() const;

    // Canonical line-based serialization; two KBs with equal content produce
    // byte-identical dumps. See the file-format notes in the README.
    std::string dump() const;
    static KnowledgeBase load(const std::string& text);

    friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);

private:
    void touch_individual(const Name& n);
    bool reaches(const Name& from, const Name& target) const;

    std::set<Name> classes_;
    std::map<Name, Name> parent_;      // child -> parent subClassOf edges
    std::set<Name> object_properties_; // explicitly declared properties
    std::set<Name> individuals_;
    std::map<Name, std::set<Name>> class_facts_; // individual -> direct classes
    std::set<ObjFact> obj_facts_;
    std::set<DataFact> data_facts_;
};

} // namespace cloudsem
