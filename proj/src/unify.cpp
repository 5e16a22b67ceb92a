#include "ordo/unify.hpp"

namespace ordo {

const Term* Substitution::lookup(const std::string& var) const {
    auto it = map.find(var);
    return it == map.end() ? nullptr : &it->second;
}

std::string Substitution::str() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [v, t] : map) {
        if (!first) s += ", ";
        first = false;
        s += v + "->" + t.name;
    }
    return s + "}";
}

Term apply(const Substitution& s, const Term& t) {
    if (!t.is_var()) return t;
    const Term* r = s.lookup(t.name);
    return r ? *r : t;
}

Literal apply(const Substitution& s, const Literal& l) {
    Literal out = l;
    for (auto& a : out.args) a = apply(s, a);
    return out;
}

Clause apply(const Substitution& s, const Clause& c) {
    Clause out;
    out.reserve(c.size());
    for (const auto& l : c) out.push_back(apply(s, l));
    return out;
}

namespace {

/// Resolve a term through the partial binding until fixed (terms are flat,
/// so chains are variable-to-variable and end at a constant or free var).
Term walk(const std::map<std::string, Term>& m, Term t) {
    while (t.is_var()) {
        auto it = m.find(t.name);
        if (it == m.end()) return t;
        t = it->second;
    }
    return t;
}

}  // namespace

std::optional<Substitution> unify(const Literal& a, const Literal& b) {
    if (a.positive != b.positive || a.pred != b.pred ||
        a.args.size() != b.args.size())
        return std::nullopt;
    std::map<std::string, Term> m;
    for (size_t i = 0; i < a.args.size(); ++i) {
        Term x = walk(m, a.args[i]);
        Term y = walk(m, b.args[i]);
        if (x == y) continue;
        if (x.is_var())
            m[x.name] = y;
        else if (y.is_var())
            m[y.name] = x;
        else
            return std::nullopt;  // distinct constants
    }
    // path-compress so the result is idempotent
    Substitution out;
    for (const auto& [v, t] : m) {
        Term r = walk(m, t);
        if (!(r.is_var() && r.name == v)) out.map[v] = r;
    }
    return out;
}

Substitution compose(const Substitution& a, const Substitution& b) {
    Substitution out;
    for (const auto& [v, t] : a.map) {
        Term r = apply(b, t);
        if (!(r.is_var() && r.name == v)) out.map[v] = r;
    }
    for (const auto& [v, t] : b.map)
        if (!a.contains(v)) out.map[v] = t;
    return out;
}

}  // namespace ordo
