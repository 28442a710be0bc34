#include "cloudsem/rules.hpp"

#include "cloudsem/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace cloudsem {

// --- Registry ---------------------------------------------------------------

void BuiltInRegistry::register_builtin(const Name& canonical, std::size_t arity, BuiltInKind kind,
                                       const std::vector<Name>& aliases, BuiltInFamily family) {
    if (alias_to_canonical_.count(canonical))
        throw DuplicateBuiltIn("built-in already registered: " + canonical);
    for (const Name& a : aliases)
        if (alias_to_canonical_.count(a)) throw DuplicateBuiltIn("built-in already registered: " + a);
    BuiltInDef def;
    def.canonical = canonical;
    def.arity = arity;
    def.kind = kind;
    def.family = family;
    defs_[canonical] = std::move(def);
    alias_to_canonical_[canonical] = canonical;
    for (const Name& a : aliases) alias_to_canonical_[a] = canonical;
    auto note_namespace = [this](const Name& n) {
        auto pos = n.find(':');
        if (pos != std::string::npos) namespaces_.insert(n.substr(0, pos));
    };
    note_namespace(canonical);
    for (const Name& a : aliases) note_namespace(a);
}

void BuiltInRegistry::set_predicate(
    const Name& canonical,
    std::function<bool(EvalContext&, KnowledgeBase&, const std::vector<Ground>&)> fn) {
    defs_.at(canonical).predicate = std::move(fn);
}

void BuiltInRegistry::set_generator(
    const Name& canonical,
    std::function<std::vector<Ground>(EvalContext&, KnowledgeBase&, const std::vector<Ground>&)> fn) {
    defs_.at(canonical).generate = std::move(fn);
}

const BuiltInDef* BuiltInRegistry::find(const Name& name) const {
    auto it = alias_to_canonical_.find(name);
    if (it == alias_to_canonical_.end()) return nullptr;
    return &defs_.at(it->second);
}

// --- Lexer -------------------------------------------------------------------

namespace {

enum class Tok { Ident, Var, Number, Text, LParen, RParen, Comma, Caret, Arrow, Colon, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    int pos = 0;
};

bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        int pos = (int)i + 1;
        if (c == '(') { tokens.push_back({Tok::LParen, "(", 0, pos}); ++i; continue; }
        if (c == ')') { tokens.push_back({Tok::RParen, ")", 0, pos}); ++i; continue; }
        if (c == ',') { tokens.push_back({Tok::Comma, ",", 0, pos}); ++i; continue; }
        if (c == '^') { tokens.push_back({Tok::Caret, "^", 0, pos}); ++i; continue; }
        if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            tokens.push_back({Tok::Arrow, "->", 0, pos});
            i += 2;
            continue;
        }
        // UTF-8 arrow U+2192
        if ((unsigned char)c == 0xE2 && i + 2 < s.size() && (unsigned char)s[i + 1] == 0x86 &&
            (unsigned char)s[i + 2] == 0x92) {
            tokens.push_back({Tok::Arrow, "->", 0, pos});
            i += 3;
            continue;
        }
        if (c == '?') {
            std::size_t start = ++i;
            while (i < s.size() && ident_char(s[i])) ++i;
            if (i == start) throw SyntaxError("expected variable name after '?'", 0);
            tokens.push_back({Tok::Var, s.substr(start, i - start), 0, pos});
            continue;
        }
        if (c == '"') {
            std::string text;
            ++i;
            while (i < s.size() && s[i] != '"') {
                if (s[i] == '\\' && i + 1 < s.size()) ++i;
                text += s[i++];
            }
            if (i >= s.size()) throw SyntaxError("unterminated string literal", 0);
            ++i;
            tokens.push_back({Tok::Text, text, 0, pos});
            continue;
        }
        if (std::isdigit((unsigned char)c) ||
            ((c == '-' || c == '+') && i + 1 < s.size() && std::isdigit((unsigned char)s[i + 1]))) {
            std::size_t start = i;
            if (c == '-' || c == '+') ++i;
            while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
            if (i < s.size() && s[i] == '.') {
                ++i;
                while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
            }
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t save = i++;
                if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
                if (i < s.size() && std::isdigit((unsigned char)s[i])) {
                    while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
                } else {
                    i = save;
                }
            }
            // An identifier may start with digits ("3Dswrlb"); if letters
            // follow the digit run, re-scan the whole thing as a name.
            if (i < s.size() && ident_char(s[i]) && !std::isdigit((unsigned char)s[i])) {
                i = start;
                std::size_t st = i;
                while (i < s.size() && ident_char(s[i])) ++i;
                std::string name = s.substr(st, i - st);
                if (i < s.size() && s[i] == ':' && i + 1 < s.size() && ident_char(s[i + 1])) {
                    std::size_t st2 = ++i;
                    while (i < s.size() && ident_char(s[i])) ++i;
                    name += ":" + s.substr(st2, i - st2);
                }
                tokens.push_back({Tok::Ident, name, 0, pos});
                continue;
            }
            tokens.push_back({Tok::Number, s.substr(start, i - start),
                              std::stod(s.substr(start, i - start)), pos});
            continue;
        }
        if (ident_char(c)) {
            std::size_t start = i;
            while (i < s.size() && ident_char(s[i])) ++i;
            std::string name = s.substr(start, i - start);
            // Glue "prefix:local" into one name token when the colon is
            // immediately followed by a name character.
            if (i < s.size() && s[i] == ':' && i + 1 < s.size() && ident_char(s[i + 1])) {
                std::size_t st2 = ++i;
                while (i < s.size() && ident_char(s[i])) ++i;
                name += ":" + s.substr(st2, i - st2);
            }
            tokens.push_back({Tok::Ident, name, 0, pos});
            continue;
        }
        if (c == ':') {
            tokens.push_back({Tok::Colon, ":", 0, pos});
            ++i;
            continue;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", 0);
    }
    tokens.push_back({Tok::End, "", 0, (int)s.size() + 1});
    return tokens;
}

// --- Parser ------------------------------------------------------------------

class RuleParser {
public:
    RuleParser(std::vector<Token> tokens, const BuiltInRegistry& registry)
        : toks_(std::move(tokens)), reg_(registry) {}

    Rule parse(const std::string& default_label) {
        Rule rule;
        rule.label = take_label().value_or(default_label);
        rule.antecedent = parse_atoms();
        expect(Tok::Arrow, "'->'");
        rule.consequent = parse_atoms();
        expect(Tok::End, "end of rule");
        rewrite_consequent(rule);
        check_safety(rule);
        return rule;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    void expect(Tok kind, const std::string& what) {
        if (peek().kind != kind)
            throw SyntaxError("expected " + what + " at position " + std::to_string(peek().pos) +
                              ", found \"" + peek().text + "\"");
        next();
    }

    // A leading "ident:" is a rule label unless it spells a namespaced
    // built-in name. "label: Atom(..." lexes as Ident Colon; "ns:atom(..."
    // lexes as one glued Ident, which we split when it is not a built-in and
    // its prefix is not a built-in namespace.
    std::optional<std::string> take_label() {
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) {
            std::string label = next().text;
            next();
            return label;
        }
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen) {
            const std::string& name = peek().text;
            auto colon = name.find(':');
            if (colon != std::string::npos && !reg_.find(name) &&
                !reg_.is_builtin_namespace(name.substr(0, colon))) {
                std::string label = name.substr(0, colon);
                toks_[pos_].text = name.substr(colon + 1);
                return label;
            }
        }
        return std::nullopt;
    }

    std::vector<Atom> parse_atoms() {
        std::vector<Atom> atoms;
        atoms.push_back(parse_atom());
        while (peek().kind == Tok::Caret) {
            next();
            atoms.push_back(parse_atom());
        }
        return atoms;
    }

    Atom parse_atom() {
        if (peek().kind != Tok::Ident)
            throw SyntaxError("expected predicate name at position " + std::to_string(peek().pos) +
                              ", found \"" + peek().text + "\"");
        std::string name = next().text;
        expect(Tok::LParen, "'('");
        std::vector<Term> terms;
        terms.push_back(parse_term());
        while (peek().kind == Tok::Comma) {
            next();
            terms.push_back(parse_term());
        }
        expect(Tok::RParen, "')'");

        Atom atom;
        atom.terms = std::move(terms);
        if (const BuiltInDef* def = reg_.find(name)) {
            if (atom.terms.size() != def->arity)
                throw ArityError("built-in " + def->canonical + " expects " +
                                 std::to_string(def->arity) + " arguments, got " +
                                 std::to_string(atom.terms.size()));
            atom.kind = Atom::Kind::BuiltIn;
            atom.pred = def->canonical;
            return atom;
        }
        if (atom.terms.size() == 1) {
            atom.kind = Atom::Kind::Class;
        } else if (atom.terms.size() == 2) {
            atom.kind = Atom::Kind::Property;
        } else {
            throw SyntaxError("predicate " + name + " has arity " +
                              std::to_string(atom.terms.size()) +
                              " but is not a registered built-in");
        }
        atom.pred = name;
        return atom;
    }

    Term parse_term() {
        Token t = next();
        switch (t.kind) {
        case Tok::Var: return Term::variable(t.text);
        case Tok::Number: return Term::number(t.number);
        case Tok::Text: return Term::text(t.text);
        case Tok::Ident: return Term::individual(t.text);
        default:
            throw SyntaxError("expected term at position " + std::to_string(t.pos) + ", found \"" +
                              t.text + "\"");
        }
    }

    // Topologic built-ins written in a consequent store their correspondent
    // object property instead; other built-ins are not allowed there.
    void rewrite_consequent(Rule& rule) {
        for (Atom& atom : rule.consequent) {
            if (atom.kind != Atom::Kind::BuiltIn) continue;
            const BuiltInDef* def = reg_.find(atom.pred);
            if (!def || def->family != BuiltInFamily::Topology)
                throw SyntaxError("built-in " + atom.pred + " is not allowed in a consequent");
            auto colon = def->canonical.find(':');
            std::string local =
                colon == std::string::npos ? def->canonical : def->canonical.substr(colon + 1);
            if (atom.terms.size() == 3) {
                if (atom.terms[2].kind != Term::Kind::Number)
                    throw SyntaxError("consequent " + local + " needs a numeric distance");
                local += "_" + format_number(atom.terms[2].literal.number());
                atom.terms.pop_back();
            }
            atom.kind = Atom::Kind::Property;
            atom.pred = local;
        }
    }

    void check_safety(const Rule& rule) {
        std::set<std::string> bound;
        for (const Atom& atom : rule.antecedent)
            for (const Term& t : atom.terms)
                if (t.kind == Term::Kind::Variable) bound.insert(t.name);
        for (const Atom& atom : rule.consequent)
            for (const Term& t : atom.terms)
                if (t.kind == Term::Kind::Variable && !bound.count(t.name))
                    throw SafetyError("consequent variable ?" + t.name +
                                      " is not bound in the antecedent");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const BuiltInRegistry& reg_;
};

} // namespace

Rule parse_rule(const std::string& text, const BuiltInRegistry& registry) {
    RuleParser parser(lex(text), registry);
    return parser.parse("r1");
}

std::vector<Rule> parse_ruleset(const std::string& text, const BuiltInRegistry& registry) {
    std::vector<Rule> rules;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            RuleParser parser(lex(line), registry);
            rules.push_back(parser.parse("r" + std::to_string(line_no)));
        } catch (const SyntaxError& e) {
            throw SyntaxError(e.what(), line_no);
        }
    }
    return rules;
}

// --- Pretty printing ---------------------------------------------------------

std::string to_string(const Term& term) {
    switch (term.kind) {
    case Term::Kind::Variable: return "?" + term.name;
    case Term::Kind::Individual: return term.name;
    default: return term.literal.to_string();
    }
}

std::string to_string(const Atom& atom) {
    std::string out = atom.pred + "(";
    for (std::size_t i = 0; i < atom.terms.size(); ++i) {
        if (i) out += ", ";
        out += to_string(atom.terms[i]);
    }
    return out + ")";
}

std::string to_string(const Rule& rule) {
    std::string out = rule.label + ": ";
    for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
        if (i) out += " ^ ";
        out += to_string(rule.antecedent[i]);
    }
    out += " -> ";
    for (std::size_t i = 0; i < rule.consequent.size(); ++i) {
        if (i) out += " ^ ";
        out += to_string(rule.consequent[i]);
    }
    return out;
}

// --- Evaluation ---------------------------------------------------------------

namespace {

// Class membership including the subclass closure.
bool member_of(const KnowledgeBase& kb, const Name& individual, const Name& cls) {
    for (const Name& c : kb.classes_of(individual))
        if (c == cls || kb.is_subclass_of(c, cls)) return true;
    return false;
}

std::optional<Ground> term_ground(const Term& t, const Binding& binding) {
    switch (t.kind) {
    case Term::Kind::Variable: {
        auto it = binding.find(t.name);
        if (it == binding.end()) return std::nullopt;
        return it->second;
    }
    case Term::Kind::Individual: return Ground::individual(t.name);
    default: return Ground::literal(t.literal);
    }
}

void extend_class_atom(const KnowledgeBase& kb, const Atom& atom, const Binding& binding,
                       std::vector<Binding>& out) {
    const Term& t = atom.terms[0];
    auto ground = term_ground(t, binding);
    if (ground) {
        if (ground->is_individual() && member_of(kb, ground->name(), atom.pred))
            out.push_back(binding);
        return;
    }
    for (const Name& ind : kb.individuals_of(atom.pred)) {
        Binding b = binding;
        b[t.name] = Ground::individual(ind);
        out.push_back(std::move(b));
    }
}

void extend_property_atom(const KnowledgeBase& kb, const Atom& atom, const Binding& binding,
                          std::vector<Binding>& out) {
    const Term& ts = atom.terms[0];
    const Term& to = atom.terms[1];
    auto gs = term_ground(ts, binding);
    auto go = term_ground(to, binding);

    auto emit = [&](const Name& subj, const Ground& obj) {
        Binding b = binding;
        if (!gs) b[ts.name] = Ground::individual(subj);
        if (!go) b[to.name] = obj;
        out.push_back(std::move(b));
    };

    if (gs && !gs->is_individual()) return; // literals cannot be subjects

    for (const auto& f : kb.object_facts()) {
        if (f.prop != atom.pred) continue;
        if (gs && f.subj != gs->name()) continue;
        Ground obj = Ground::individual(f.obj);
        if (go && !(obj == *go)) continue;
        emit(f.subj, obj);
    }
    for (const auto& f : kb.data_facts()) {
        if (f.prop != atom.pred) continue;
        if (gs && f.subj != gs->name()) continue;
        Ground obj = Ground::literal(f.value);
        if (go && !(obj == *go)) continue;
        emit(f.subj, obj);
    }
}

void extend_builtin_atom(KnowledgeBase& kb, const Atom& atom, const BuiltInDef& def,
                         const Binding& binding, EvalContext& ctx, const std::string& rule_label,
                         std::vector<Binding>& out) {
    std::vector<std::optional<Ground>> args(atom.terms.size());
    for (std::size_t i = 0; i < atom.terms.size(); ++i) args[i] = term_ground(atom.terms[i], binding);

    auto require_bound = [&](std::size_t from) {
        for (std::size_t i = from; i < args.size(); ++i)
            if (!args[i])
                throw UnboundBuiltInArg("rule " + rule_label + ": built-in " + def.canonical +
                                        " reached with unbound argument ?" + atom.terms[i].name);
    };

    if (def.kind == BuiltInKind::Predicate) {
        require_bound(0);
        std::vector<Ground> ground;
        for (auto& a : args) ground.push_back(*a);
        if (def.predicate(ctx, kb, ground)) out.push_back(binding);
        return;
    }

    // Generator: binds its first argument only.
    require_bound(1);
    std::vector<Ground> rest;
    for (std::size_t i = 1; i < args.size(); ++i) rest.push_back(*args[i]);
    std::vector<Ground> results = def.generate(ctx, kb, rest);
    if (args[0]) {
        for (const Ground& r : results)
            if (r == *args[0]) {
                out.push_back(binding);
                return;
            }
        return;
    }
    for (const Ground& r : results) {
        Binding b = binding;
        b[atom.terms[0].name] = r;
        out.push_back(std::move(b));
    }
}

std::vector<std::string> variables_in_order(const Rule& rule) {
    std::vector<std::string> vars;
    std::set<std::string> seen;
    for (const Atom& atom : rule.antecedent)
        for (const Term& t : atom.terms)
            if (t.kind == Term::Kind::Variable && seen.insert(t.name).second)
                vars.push_back(t.name);
    return vars;
}

} // namespace

std::vector<Binding> match_antecedent(KnowledgeBase& kb, const Rule& rule,
                                      const BuiltInRegistry& registry, EvalContext& ctx) {
    std::vector<Binding> bindings{Binding{}};
    for (const Atom& atom : rule.antecedent) {
        std::vector<Binding> next;
        for (const Binding& b : bindings) {
            switch (atom.kind) {
            case Atom::Kind::Class: extend_class_atom(kb, atom, b, next); break;
            case Atom::Kind::Property: extend_property_atom(kb, atom, b, next); break;
            case Atom::Kind::BuiltIn: {
                const BuiltInDef* def = registry.find(atom.pred);
                if (!def) throw Error("unregistered built-in: " + atom.pred);
                extend_builtin_atom(kb, atom, *def, b, ctx, rule.label, next);
                break;
            }
            }
        }
        bindings = std::move(next);
        if (bindings.empty()) break;
    }

    // Canonical order: lexicographic over the bound values, variables taken in
    // order of first appearance in the antecedent.
    std::vector<std::string> vars = variables_in_order(rule);
    std::sort(bindings.begin(), bindings.end(), [&vars](const Binding& a, const Binding& b) {
        for (const std::string& v : vars) {
            auto ia = a.find(v);
            auto ib = b.find(v);
            bool ha = ia != a.end(), hb = ib != b.end();
            if (ha != hb) return hb;
            if (!ha) continue;
            if (ia->second != ib->second) return ia->second < ib->second;
        }
        return false;
    });
    bindings.erase(std::unique(bindings.begin(), bindings.end()), bindings.end());
    return bindings;
}

namespace {

std::size_t instantiate_consequent(KnowledgeBase& kb, const Rule& rule, const Binding& binding) {
    std::size_t added = 0;
    for (const Atom& atom : rule.consequent) {
        if (atom.kind == Atom::Kind::Class) {
            auto g = term_ground(atom.terms[0], binding);
            if (!g || !g->is_individual())
                throw TypeMismatch("rule " + rule.label + ": class atom " + atom.pred +
                                   " needs an individual");
            added += kb.assert_class(g->name(), atom.pred) ? 1 : 0;
        } else if (atom.kind == Atom::Kind::Property) {
            auto gs = term_ground(atom.terms[0], binding);
            auto go = term_ground(atom.terms[1], binding);
            if (!gs || !go || !gs->is_individual())
                throw TypeMismatch("rule " + rule.label + ": property atom " + atom.pred +
                                   " needs an individual subject");
            if (go->is_individual())
                added += kb.assert_object(gs->name(), atom.pred, go->name()) ? 1 : 0;
            else
                added += kb.assert_data(gs->name(), atom.pred, go->value()) ? 1 : 0;
        } else {
            throw Error("rule " + rule.label + ": built-in atom left in consequent");
        }
    }
    return added;
}

} // namespace

AnnotationReport run_fixpoint(KnowledgeBase& kb, const std::vector<Rule>& rules,
                              const BuiltInRegistry& registry, EvalContext& ctx) {
    AnnotationReport report;
    while (true) {
        std::size_t pass_added = 0;
        for (const Rule& rule : rules) {
            std::size_t before = kb.fact_count();
            std::vector<Binding> bindings = match_antecedent(kb, rule, registry, ctx);
            report.rule_bindings[rule.label] += bindings.size();
            for (const Binding& b : bindings) instantiate_consequent(kb, rule, b);
            std::size_t after = kb.fact_count();
            report.rule_facts[rule.label] += after - before;
            pass_added += after - before;
        }
        report.iterations += 1;
        report.facts_per_pass.push_back(pass_added);
        report.facts_added += pass_added;
        if (pass_added == 0) break;
    }
    return report;
}

} // namespace cloudsem
