#include "ordo/bottomup.hpp"

#include <algorithm>

namespace ordo {

namespace {

// bind literal args against a ground tuple, extending `b`; false on clash
bool match(const Literal& l, const std::vector<std::string>& tuple,
           std::map<std::string, std::string>& b, std::vector<std::string>& added) {
    if (l.args.size() != tuple.size()) return false;
    for (size_t i = 0; i < l.args.size(); ++i) {
        const Term& t = l.args[i];
        if (!t.is_var()) {
            if (t.name != tuple[i]) return false;
            continue;
        }
        auto it = b.find(t.name);
        if (it == b.end()) {
            b.emplace(t.name, tuple[i]);
            added.push_back(t.name);
        } else if (it->second != tuple[i]) {
            return false;
        }
    }
    return true;
}

void unbind(std::map<std::string, std::string>& b,
            const std::vector<std::string>& added) {
    for (const auto& v : added) b.erase(v);
}

// enumerate all ground bindings of the positive literals, left to right
void join(const FactStore& store, const std::vector<const Literal*>& lits, size_t at,
          std::map<std::string, std::string>& b,
          const std::function<void(const std::map<std::string, std::string>&)>& emit) {
    if (at == lits.size()) {
        emit(b);
        return;
    }
    const Literal& l = *lits[at];
    auto it = store.find(l.pred);
    if (it == store.end()) return;
    for (const auto& tuple : it->second) {
        std::vector<std::string> added;
        if (match(l, tuple, b, added)) join(store, lits, at + 1, b, emit);
        unbind(b, added);
    }
}

}  // namespace

FactStore saturate(const KnowledgeBase& kb) {
    FactStore store;
    for (const auto& pred : kb.predicate_names()) {
        auto& tuples = store[pred];
        for (const auto& f : kb.facts(pred)) {
            std::vector<std::string> t;
            for (const auto& a : f.args) t.push_back(a.name);
            tuples.insert(std::move(t));
        }
        if (kb.is_transitive(pred)) {
            // close the stored edges under composition
            bool changed = true;
            while (changed) {
                changed = false;
                std::vector<std::vector<std::string>> fresh;
                for (const auto& t : tuples)
                    for (const auto& u : tuples)
                        if (t[1] == u[0]) {
                            std::vector<std::string> nt{t[0], u[1]};
                            if (!tuples.count(nt)) fresh.push_back(std::move(nt));
                        }
                for (auto& t : fresh)
                    if (tuples.insert(std::move(t)).second) changed = true;
            }
        }
    }
    // naive fixpoint over the rules (antecedents are all positive)
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& r : kb.all_rules()) {
            std::vector<const Literal*> lits;
            for (const auto& l : r.antecedent) lits.push_back(&l);
            std::map<std::string, std::string> b;
            std::vector<std::vector<std::string>> fresh;
            join(store, lits, 0, b,
                 [&](const std::map<std::string, std::string>& bind) {
                     std::vector<std::string> t;
                     for (const auto& a : r.consequent.args)
                         t.push_back(a.is_var() ? bind.at(a.name) : a.name);
                     if (!store[r.consequent.pred].count(t))
                         fresh.push_back(std::move(t));
                 });
            auto& tuples = store[r.consequent.pred];
            for (auto& t : fresh)
                if (tuples.insert(std::move(t)).second) changed = true;
        }
    }
    return store;
}

std::vector<Substitution> bottomup_answers(const KnowledgeBase& kb,
                                           const Clause& query) {
    return bottomup_answers(kb, query, saturate(kb));
}

std::vector<Substitution> bottomup_answers(const KnowledgeBase& kb,
                                           const Clause& query,
                                           const FactStore& store) {
    std::vector<const Literal*> pos;
    std::vector<const Literal*> neg;
    for (const auto& l : query) (l.positive ? pos : neg).push_back(&l);

    std::set<std::string> var_names;
    std::vector<Term> qvars;
    for (const auto& l : query)
        for (const auto& t : l.args)
            if (t.is_var() && var_names.insert(t.name).second) qvars.push_back(t);

    std::map<std::string, Substitution> out;
    std::map<std::string, std::string> b;
    join(store, pos, 0, b, [&](const std::map<std::string, std::string>& bind) {
        for (const Literal* l : neg) {
            Literal g = *l;
            g.positive = true;
            for (auto& a : g.args) {
                if (!a.is_var()) continue;
                auto it = bind.find(a.name);
                if (it == bind.end()) return;  // never grounded: no contribution
                a.name = it->second;
            }
            for (const auto& f : kb.facts(g.pred))
                if (f == g) return;  // stored fact contradicts the negation
        }
        Substitution s;
        for (const auto& v : qvars) {
            auto it = bind.find(v.name);
            if (it == bind.end()) return;  // var only in negatives: non-ground
            s.map[v.name] = Term{it->second};
        }
        out.emplace(s.str(), std::move(s));
    });
    std::vector<Substitution> res;
    for (auto& [k, v] : out) res.push_back(std::move(v));
    return res;
}

}  // namespace ordo
