#include "cloudsem/kb.hpp"

#include "cloudsem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

namespace cloudsem {

Value::Value(double d) {
    // Quantize so that serialization with 6 decimals is lossless.
    v_ = std::round(d * 1e6) / 1e6;
}

std::string format_number(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", d);
    std::string s(buf);
    auto pos = s.find_last_not_of('0');
    if (s[pos] == '.') --pos;
    s.erase(pos + 1);
    if (s == "-0") s = "0";
    return s;
}

namespace {

std::string quote_text(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string Value::to_string() const {
    if (is_number()) return format_number(number());
    return quote_text(text());
}

void KnowledgeBase::touch_individual(const Name& n) { individuals_.insert(n); }

bool KnowledgeBase::reaches(const Name& from, const Name& target) const {
    Name cur = from;
    while (true) {
        if (cur == target) return true;
        auto it = parent_.find(cur);
        if (it == parent_.end()) return false;
        cur = it->second;
    }
}

void KnowledgeBase::declare_class(const Name& cls, const std::optional<Name>& parent) {
    classes_.insert(cls);
    if (!parent) return;
    classes_.insert(*parent);
    auto it = parent_.find(cls);
    if (it != parent_.end()) {
        if (it->second == *parent) return;
        throw CycleError("class " + cls + " already has parent " + it->second);
    }
    if (reaches(*parent, cls))
        throw CycleError("edge " + cls + " -> " + *parent + " would create a cycle");
    parent_[cls] = *parent;
}

void KnowledgeBase::declare_object_property(const Name& prop) { object_properties_.insert(prop); }

bool KnowledgeBase::assert_class(const Name& individual, const Name& cls) {
    classes_.insert(cls);
    touch_individual(individual);
    return class_facts_[individual].insert(cls).second;
}

bool KnowledgeBase::assert_object(const Name& subj, const Name& prop, const Name& obj) {
    touch_individual(subj);
    touch_individual(obj);
    return obj_facts_.insert({subj, prop, obj}).second;
}

bool KnowledgeBase::assert_data(const Name& subj, const Name& prop, const Value& value) {
    touch_individual(subj);
    return data_facts_.insert({subj, prop, value}).second;
}

bool KnowledgeBase::retract_class(const Name& individual, const Name& cls) {
    auto it = class_facts_.find(individual);
    if (it == class_facts_.end()) return false;
    return it->second.erase(cls) > 0;
}

bool KnowledgeBase::has_class(const Name& individual, const Name& cls) const {
    auto it = class_facts_.find(individual);
    return it != class_facts_.end() && it->second.count(cls) > 0;
}

bool KnowledgeBase::has_object(const Name& subj, const Name& prop, const Name& obj) const {
    return obj_facts_.count({subj, prop, obj}) > 0;
}

bool KnowledgeBase::has_data(const Name& subj, const Name& prop, const Value& value) const {
    return data_facts_.count({subj, prop, value}) > 0;
}

std::vector<Name> KnowledgeBase::subclasses_of(const Name& cls) const {
    std::set<Name> seen;
    std::deque<Name> queue{cls};
    while (!queue.empty()) {
        Name cur = queue.front();
        queue.pop_front();
        if (!seen.insert(cur).second) continue;
        for (const auto& [child, parent] : parent_)
            if (parent == cur) queue.push_back(child);
    }
    return {seen.begin(), seen.end()};
}

std::optional<Name> KnowledgeBase::parent_of(const Name& cls) const {
    auto it = parent_.find(cls);
    if (it == parent_.end()) return std::nullopt;
    return it->second;
}

int KnowledgeBase::class_depth(const Name& cls) const {
    int depth = 0;
    Name cur = cls;
    for (auto it = parent_.find(cur); it != parent_.end(); it = parent_.find(cur)) {
        cur = it->second;
        ++depth;
    }
    return depth;
}

bool KnowledgeBase::is_subclass_of(const Name& cls, const Name& ancestor) const {
    return reaches(cls, ancestor);
}

std::vector<Name> KnowledgeBase::individuals_of(const Name& cls) const {
    std::set<Name> result;
    for (const Name& c : subclasses_of(cls))
        for (const auto& [ind, classes] : class_facts_)
            if (classes.count(c)) result.insert(ind);
    return {result.begin(), result.end()};
}

std::vector<Name> KnowledgeBase::classes_of(const Name& individual) const {
    auto it = class_facts_.find(individual);
    if (it == class_facts_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::vector<Value> KnowledgeBase::values_of(const Name& individual, const Name& prop) const {
    std::vector<Value> result;
    for (const auto& f : data_facts_)
        if (f.subj == individual && f.prop == prop) result.push_back(f.value);
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<Name> KnowledgeBase::objects_of(const Name& subj, const Name& prop) const {
    std::vector<Name> result;
    for (const auto& f : obj_facts_)
        if (f.subj == subj && f.prop == prop) result.push_back(f.obj);
    return result; // set ordering keeps this sorted
}

std::vector<Name> KnowledgeBase::all_classes() const { return {classes_.begin(), classes_.end()}; }

std::vector<Name> KnowledgeBase::all_individuals() const {
    return {individuals_.begin(), individuals_.end()};
}

std::vector<Name> KnowledgeBase::declared_object_properties() const {
    return {object_properties_.begin(), object_properties_.end()};
}

std::size_t KnowledgeBase::fact_count() const {
    std::size_t n = obj_facts_.size() + data_facts_.size();
    for (const auto& [ind, classes] : class_facts_) n += classes.size();
    return n;
}

std::string KnowledgeBase::dump() const {
    std::ostringstream out;
    // Classes that appear in no subclass line still need declaring.
    std::set<Name> in_edges;
    for (const auto& [child, parent] : parent_) {
        in_edges.insert(child);
        in_edges.insert(parent);
    }
    for (const Name& c : classes_)
        if (!in_edges.count(c)) out << "decl " << c << "\n";
    for (const auto& [child, parent] : parent_) out << "subclass " << child << " " << parent << "\n";
    for (const Name& p : object_properties_) out << "propdecl " << p << "\n";
    for (const auto& [ind, classes] : class_facts_)
        for (const Name& c : classes) out << "class " << ind << " " << c << "\n";
    for (const auto& f : obj_facts_) out << "obj " << f.subj << " " << f.prop << " " << f.obj << "\n";
    for (const auto& f : data_facts_)
        out << "data " << f.subj << " " << f.prop << " " << f.value.to_string() << "\n";
    return out.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        if (line[i] == '"') {
            std::string s;
            ++i;
            while (i < line.size() && line[i] != '"') {
                if (line[i] == '\\' && i + 1 < line.size()) ++i;
                s += line[i++];
            }
            if (i >= line.size()) return {}; // unterminated quote
            ++i;
            fields.push_back("\"" + s); // marker for "was quoted"
        } else {
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
            fields.push_back(line.substr(start, i - start));
        }
    }
    return fields;
}

} // namespace

KnowledgeBase KnowledgeBase::load(const std::string& text) {
    KnowledgeBase kb;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = split_fields(line);
        if (fields.empty()) throw ParseError("malformed line", line_no);
        const std::string& kind = fields[0];
        try {
            if (kind == "decl" && fields.size() == 2) {
                kb.declare_class(fields[1]);
            } else if (kind == "subclass" && fields.size() == 3) {
                kb.declare_class(fields[1], fields[2]);
            } else if (kind == "propdecl" && fields.size() == 2) {
                kb.declare_object_property(fields[1]);
            } else if (kind == "class" && fields.size() == 3) {
                kb.assert_class(fields[1], fields[2]);
            } else if (kind == "obj" && fields.size() == 4) {
                kb.assert_object(fields[1], fields[2], fields[3]);
            } else if (kind == "data" && fields.size() == 4) {
                const std::string& raw = fields[3];
                if (!raw.empty() && raw[0] == '"')
                    kb.assert_data(fields[1], fields[2], Value(raw.substr(1)));
                else {
                    try {
                        std::size_t used = 0;
                        double d = std::stod(raw, &used);
                        if (used != raw.size()) throw std::invalid_argument(raw);
                        kb.assert_data(fields[1], fields[2], Value(d));
                    } catch (const std::exception&) {
                        throw ParseError("bad numeric value \"" + raw + "\"", line_no);
                    }
                }
            } else {
                throw ParseError("unrecognized fact line \"" + line + "\"", line_no);
            }
        } catch (const CycleError& e) {
            throw ParseError(std::string("cycle in taxonomy: ") + e.what(), line_no);
        }
    }
    return kb;
}

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    return a.classes_ == b.classes_ && a.parent_ == b.parent_ &&
           a.object_properties_ == b.object_properties_ && a.individuals_ == b.individuals_ &&
           a.class_facts_ == b.class_facts_ && a.obj_facts_ == b.obj_facts_ &&
           a.data_facts_ == b.data_facts_;
}

} // namespace cloudsem
