#pragma once

#include "cloudsem/kb.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cloudsem {

struct EvalContext;

// A term of a rule atom: "?x", an individual name, or a literal.
struct Term {
    enum class Kind { Variable, Individual, Number, Text };
    Kind kind = Kind::Individual;
    std::string name; // variable name (without '?') or individual name
    Value literal;

    static Term variable(std::string n) { return {Kind::Variable, std::move(n), {}}; }
    static Term individual(std::string n) { return {Kind::Individual, std::move(n), {}}; }
    static Term number(double d) { return {Kind::Number, {}, Value(d)}; }
    static Term text(std::string s) { return {Kind::Text, {}, Value(std::move(s))}; }

    friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
    enum class Kind { Class, Property, BuiltIn };
    Kind kind = Kind::Class;
    Name pred; // class name, property name, or canonical built-in name
    std::vector<Term> terms;

    friend bool operator==(const Atom&, const Atom&) = default;
};

// A horn rule: every consequent variable must be bound in the antecedent, and
// the consequent never contains built-in atoms (topologic built-ins written
// there are rewritten to their correspondent object property at parse time).
struct Rule {
    std::string label;
    std::vector<Atom> antecedent;
    std::vector<Atom> consequent;

    friend bool operator==(const Rule&, const Rule&) = default;
};

// A bound value during evaluation: an individual or a literal.
class Ground {
public:
    enum class Kind { Individual, Literal };

    static Ground individual(Name n) {
        Ground g;
        g.kind_ = Kind::Individual;
        g.name_ = std::move(n);
        return g;
    }
    static Ground literal(Value v) {
        Ground g;
        g.kind_ = Kind::Literal;
        g.value_ = std::move(v);
        return g;
    }

    bool is_individual() const { return kind_ == Kind::Individual; }
    bool is_number() const { return kind_ == Kind::Literal && value_.is_number(); }
    bool is_text() const { return kind_ == Kind::Literal && value_.is_text(); }
    const Name& name() const { return name_; }
    const Value& value() const { return value_; }

    std::string to_string() const { return is_individual() ? name_ : value_.to_string(); }

    friend bool operator==(const Ground&, const Ground&) = default;
    friend auto operator<=>(const Ground&, const Ground&) = default;

private:
    Kind kind_ = Kind::Individual;
    Name name_;
    Value value_;
};

using Binding = std::map<std::string, Ground>;

enum class BuiltInKind { Predicate, Generator };
enum class BuiltInFamily { Comparison, Processing, Topology, Other };

struct BuiltInDef {
    Name canonical;
    std::size_t arity = 0;
    BuiltInKind kind = BuiltInKind::Predicate;
    BuiltInFamily family = BuiltInFamily::Other;
    // Predicates: every argument arrives bound.
    std::function<bool(EvalContext&, KnowledgeBase&, const std::vector<Ground>&)> predicate;
    // Generators: arguments after the first arrive bound; the returned values
    // bind the first argument, one result binding each.
    std::function<std::vector<Ground>(EvalContext&, KnowledgeBase&, const std::vector<Ground>&)>
        generate;
};

class BuiltInRegistry {
public:
    // Registers under the canonical name plus every alias. Throws
    // DuplicateBuiltIn when any of the names is already taken.
    void register_builtin(const Name& canonical, std::size_t arity, BuiltInKind kind,
                          const std::vector<Name>& aliases = {},
                          BuiltInFamily family = BuiltInFamily::Other);

    void set_predicate(const Name& canonical,
                       std::function<bool(EvalContext&, KnowledgeBase&, const std::vector<Ground>&)> fn);
    void set_generator(const Name& canonical,
                       std::function<std::vector<Ground>(EvalContext&, KnowledgeBase&,
                                                         const std::vector<Ground>&)> fn);

    // Looks a name up as canonical or alias; nullptr when unknown.
    const BuiltInDef* find(const Name& name) const;
    bool is_builtin_namespace(const std::string& prefix) const {
        return namespaces_.count(prefix) > 0;
    }

private:
    std::map<Name, Name> alias_to_canonical_;
    std::map<Name, BuiltInDef> defs_;
    std::set<std::string> namespaces_;
};

// --- Parsing ---------------------------------------------------------------

// Grammar (one rule per line in rule files):
//   rule  := [label ":"] atoms ("->" | "→") atoms
//   atoms := atom { "^" atom }
//   atom  := name "(" term { "," term } ")"
//   term  := "?"ident | number | quoted-text | name
//   name  := [prefix ":"] ident
Rule parse_rule(const std::string& text, const BuiltInRegistry& registry);
std::vector<Rule> parse_ruleset(const std::string& text, const BuiltInRegistry& registry);

std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const Rule& rule); // parses back to an identical AST

// --- Evaluation ------------------------------------------------------------

struct ConflictRecord {
    Name individual;
    std::vector<Name> labels;
};

struct AnnotationReport {
    std::size_t iterations = 0;  // passes run, including the final empty one
    std::size_t facts_added = 0; // total KB fact growth
    std::vector<std::size_t> facts_per_pass;
    std::map<std::string, std::size_t> rule_bindings; // label -> bindings matched
    std::map<std::string, std::size_t> rule_facts;    // label -> facts contributed
    std::vector<ConflictRecord> conflicts;
};

// Evaluates the antecedent left to right against the KB. Generator built-ins
// may assert new facts (memoized, so re-evaluation is side-effect free).
// Bindings come back in lexicographic order of the bound values.
std::vector<Binding> match_antecedent(KnowledgeBase& kb, const Rule& rule,
                                      const BuiltInRegistry& registry, EvalContext& ctx);

// Naive forward chaining to fixpoint: passes over the rules in order,
// instantiating consequents for every binding, until a pass adds nothing.
// Monotone; facts are only ever added.
AnnotationReport run_fixpoint(KnowledgeBase& kb, const std::vector<Rule>& rules,
                              const BuiltInRegistry& registry, EvalContext& ctx);

} // namespace cloudsem
