#include "ordo/kb.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace ordo {

bool Literal::ground() const {
    for (const auto& t : args)
        if (t.is_var()) return false;
    return true;
}

bool Literal::operator==(const Literal& o) const {
    return positive == o.positive && pred == o.pred && args == o.args;
}

std::string Literal::str() const {
    std::string s;
    if (!positive) s += "(not ";
    s += "(" + pred;
    for (const auto& t : args) s += " " + t.name;
    s += ")";
    if (!positive) s += ")";
    return s;
}

std::string clause_str(const Clause& c) {
    std::string s;
    for (size_t i = 0; i < c.size(); ++i) {
        if (i) s += " ";
        s += c[i].str();
    }
    return s;
}

std::vector<Term> Rule::vars() const {
    std::vector<Term> out;
    auto add = [&out](const Literal& l) {
        for (const auto& t : l.args) {
            if (!t.is_var()) continue;
            if (std::find(out.begin(), out.end(), t) == out.end())
                out.push_back(t);
        }
    };
    for (const auto& l : antecedent) add(l);
    add(consequent);
    return out;
}

// ---------------------------------------------------------------- Taxonomy

void Taxonomy::add_isa(const std::string& term, const std::string& cname) {
    auto& v = isa_[term];
    if (std::find(v.begin(), v.end(), cname) == v.end()) v.push_back(cname);
}

void Taxonomy::add_genls(const std::string& sub, const std::string& super) {
    auto& v = genls_[sub];
    if (std::find(v.begin(), v.end(), super) == v.end()) v.push_back(super);
    genls_.try_emplace(super);  // register the super side as a known concept
}

void Taxonomy::set_generality(const std::string& term, long g) { gen_[term] = g; }

void Taxonomy::reach(const std::string& start, std::set<std::string>& out) const {
    // reflexive-transitive closure over genls; the visited set makes
    // cycles (and shared diamonds) harmless
    std::vector<std::string> stack{start};
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (!out.insert(cur).second) continue;
        auto it = genls_.find(cur);
        if (it == genls_.end()) continue;
        for (const auto& up : it->second) stack.push_back(up);
    }
}

bool Taxonomy::holds_isa(const std::string& term, const std::string& cname) const {
    auto it = isa_.find(term);
    if (it == isa_.end()) return false;
    // early-exit walk instead of materializing the closure
    std::set<std::string> seen;
    std::vector<std::string> stack(it->second.begin(), it->second.end());
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (cur == cname) return true;
        if (!seen.insert(cur).second) continue;
        auto g = genls_.find(cur);
        if (g == genls_.end()) continue;
        for (const auto& up : g->second) stack.push_back(up);
    }
    return false;
}

std::vector<std::string> Taxonomy::generalizations(const std::string& term) const {
    auto it = isa_.find(term);
    if (it == isa_.end()) return {};
    std::set<std::string> acc;
    for (const auto& c : it->second) reach(c, acc);
    return {acc.begin(), acc.end()};  // std::set iterates in name order
}

long Taxonomy::term_generality(const std::string& term) const {
    auto it = gen_.find(term);
    return it == gen_.end() ? 0 : it->second;
}

bool Taxonomy::concept_declared(const std::string& name) const {
    return genls_.count(name) || gen_.count(name);
}

// ---------------------------------------------------------- KnowledgeBase

PredicateInfo& KnowledgeBase::pred(const std::string& name) {
    auto it = preds_.find(name);
    if (it == preds_.end()) {
        it = preds_.emplace(name, PredicateInfo{}).first;
        it->second.name = name;
        pred_order_.push_back(name);
    }
    return it->second;
}

long KnowledgeBase::num_gafs(const std::string& p) const {
    auto it = preds_.find(p);
    return it == preds_.end() ? 0 : static_cast<long>(it->second.facts.size());
}

long KnowledgeBase::num_rules(const std::string& p) const {
    auto it = preds_.find(p);
    return it == preds_.end() ? 0 : static_cast<long>(it->second.rules.size());
}

bool KnowledgeBase::is_procedural(const std::string& p) const {
    auto it = preds_.find(p);
    return it != preds_.end() && it->second.procedural;
}

const std::set<int>* KnowledgeBase::transitive_positions(const std::string& p) const {
    auto it = preds_.find(p);
    if (it == preds_.end() || it->second.transitive_pos.empty()) return nullptr;
    return &it->second.transitive_pos;
}

bool KnowledgeBase::is_transitive(const std::string& p) const {
    return transitive_positions(p) != nullptr;
}

const std::vector<Literal>& KnowledgeBase::facts(const std::string& p) const {
    static const std::vector<Literal> kEmpty;
    ++fact_scans_;
    auto it = preds_.find(p);
    return it == preds_.end() ? kEmpty : it->second.facts;
}

std::vector<const Rule*> KnowledgeBase::rules_for(const std::string& p) const {
    std::vector<const Rule*> out;
    auto it = preds_.find(p);
    if (it == preds_.end()) return out;
    out.reserve(it->second.rules.size());
    for (int idx : it->second.rules) out.push_back(&rules_[idx]);
    return out;
}

const Rule* KnowledgeBase::rule_by_id(const std::string& id) const {
    for (const auto& r : rules_)
        if (r.id == id) return &r;
    return nullptr;
}

std::vector<std::string> KnowledgeBase::predicate_names() const {
    return pred_order_;
}

std::vector<std::pair<std::string, std::string>> KnowledgeBase::transitive_pairs(
    const std::string& p, const std::string* first, const std::string* second) const {
    std::vector<std::pair<std::string, std::string>> out;
    auto it = preds_.find(p);
    if (it == preds_.end()) return out;
    ++fact_scans_;

    // forward / reverse adjacency in load order
    std::map<std::string, std::vector<std::string>> fwd, rev;
    std::vector<std::string> sources;
    for (const auto& f : it->second.facts) {
        const std::string& a = f.args[0].name;
        const std::string& b = f.args[1].name;
        fwd[a].push_back(b);
        rev[b].push_back(a);
        if (std::find(sources.begin(), sources.end(), a) == sources.end())
            sources.push_back(a);
    }
    auto bfs = [](const std::map<std::string, std::vector<std::string>>& adj,
                  const std::string& from) {
        std::vector<std::string> reached, queue{from};
        std::set<std::string> seen;
        size_t qi = 0;
        while (qi < queue.size()) {
            std::string cur = queue[qi++];
            auto a = adj.find(cur);
            if (a == adj.end()) continue;
            for (const auto& nxt : a->second) {
                if (seen.insert(nxt).second) {
                    reached.push_back(nxt);
                    queue.push_back(nxt);
                }
            }
        }
        return reached;  // >= 1 step away from `from`, BFS order
    };

    if (first && second) {
        for (const auto& r : bfs(fwd, *first))
            if (r == *second) {
                out.emplace_back(*first, *second);
                break;
            }
    } else if (first) {
        for (const auto& r : bfs(fwd, *first)) out.emplace_back(*first, r);
    } else if (second) {
        for (const auto& r : bfs(rev, *second)) out.emplace_back(r, *second);
    } else {
        for (const auto& s : sources)
            for (const auto& r : bfs(fwd, s)) out.emplace_back(s, r);
    }
    return out;
}

// ------------------------------------------------------------------- load

Literal parse_literal(const Sexpr& e) {
    if (e.is_atom) throw ParseError("literal must be a list", e.line);
    if (e.size() == 2 && e.at(0).is_atom && e.at(0).atom == "not") {
        Literal l = parse_literal(e.at(1));
        if (!l.positive) throw ParseError("double negation", e.line);
        l.positive = false;
        return l;
    }
    if (e.size() < 2) throw ParseError("literal needs a predicate and arguments", e.line);
    Literal l;
    if (!e.at(0).is_atom) throw ParseError("predicate must be an atom", e.line);
    l.pred = e.at(0).atom;
    for (size_t i = 1; i < e.size(); ++i) {
        if (!e.at(i).is_atom) throw ParseError("term must be an atom", e.line);
        l.args.push_back(Term{e.at(i).atom});
    }
    return l;
}

namespace {

void check_arity(std::map<std::string, std::pair<int, int>>& seen,
                 const std::string& pred, int arity, int line) {
    auto it = seen.find(pred);
    if (it == seen.end()) {
        seen[pred] = {arity, line};
        return;
    }
    if (it->second.first != arity)
        throw KbError("line " + std::to_string(line) + ": arity conflict for '" +
                      pred + "' (" + std::to_string(arity) + " vs " +
                      std::to_string(it->second.first) + " at line " +
                      std::to_string(it->second.second) + ")");
}

}  // namespace

KnowledgeBase load_kb(const std::string& text) {
    KnowledgeBase kb;
    std::vector<Sexpr> forms = parse_sexprs(text);

    std::map<std::string, std::pair<int, int>> arity_seen;  // pred -> (arity, line)
    std::vector<std::pair<std::string, int>> isa_checks;    // concept, line
    std::set<std::string> rule_ids;

    for (const auto& f : forms) {
        const std::string& h = f.head();
        if (h == "fact") {
            if (f.size() != 2) throw ParseError("fact takes one literal", f.line);
            Literal l = parse_literal(f.at(1));
            if (!l.positive) throw KbError("line " + std::to_string(f.line) +
                                           ": facts must be positive");
            if (!l.ground()) throw KbError("line " + std::to_string(f.line) +
                                           ": facts must be ground");
            if (l.pred == "isa" || l.pred == "genls")
                throw KbError("line " + std::to_string(f.line) + ": use (" + l.pred +
                              " ...) statements; they are mirrored into the fact store");
            check_arity(arity_seen, l.pred, static_cast<int>(l.args.size()), f.line);
            kb.pred(l.pred).facts.push_back(l);
        } else if (h == "rule") {
            if (f.size() < 4) throw ParseError("rule needs id, ante, conseq", f.line);
            Rule r;
            size_t idx = 1;
            r.id = f.at(idx++).atom;
            if (f.at(idx).is_atom && f.at(idx).atom == "nonhorn") {
                r.horn = false;
                ++idx;
            }
            const Sexpr& ante = f.at(idx++);
            const Sexpr& conseq = f.at(idx++);
            if (ante.is_atom || ante.head() != "ante")
                throw ParseError("expected (ante ...)", f.line);
            if (conseq.is_atom || conseq.head() != "conseq")
                throw ParseError("expected (conseq ...)", f.line);
            for (size_t i = 1; i < ante.size(); ++i) {
                Literal l = parse_literal(ante.at(i));
                if (!l.positive)
                    throw KbError("line " + std::to_string(f.line) +
                                  ": negative literal in rule antecedent");
                check_arity(arity_seen, l.pred, static_cast<int>(l.args.size()), f.line);
                r.antecedent.push_back(std::move(l));
            }
            if (r.antecedent.empty())
                throw KbError("line " + std::to_string(f.line) + ": empty antecedent");
            if (conseq.size() != 2) throw ParseError("conseq takes one literal", f.line);
            r.consequent = parse_literal(conseq.at(1));
            if (!r.consequent.positive)
                throw KbError("line " + std::to_string(f.line) +
                              ": negative rule consequent");
            check_arity(arity_seen, r.consequent.pred,
                        static_cast<int>(r.consequent.args.size()), f.line);
            if (!rule_ids.insert(r.id).second)
                throw KbError("line " + std::to_string(f.line) + ": duplicate rule id '" +
                              r.id + "'");
            // range restriction: consequent variables must occur in the antecedent
            for (const auto& t : r.consequent.args) {
                if (!t.is_var()) continue;
                bool found = false;
                for (const auto& a : r.antecedent)
                    for (const auto& at : a.args)
                        if (at == t) found = true;
                if (!found)
                    throw KbError("line " + std::to_string(f.line) + ": consequent variable " +
                                  t.name + " not bound by the antecedent");
            }
            kb.rules_.push_back(std::move(r));
        } else if (h == "isa") {
            if (f.size() != 3) throw ParseError("isa takes term and concept", f.line);
            kb.tax_.add_isa(f.at(1).atom, f.at(2).atom);
            isa_checks.emplace_back(f.at(2).atom, f.line);
            check_arity(arity_seen, "isa", 2, f.line);
            kb.pred("isa").facts.push_back(
                Literal{"isa", {Term{f.at(1).atom}, Term{f.at(2).atom}}, true});
        } else if (h == "genls") {
            if (f.size() != 3) throw ParseError("genls takes two concepts", f.line);
            kb.tax_.add_genls(f.at(1).atom, f.at(2).atom);
            check_arity(arity_seen, "genls", 2, f.line);
            kb.pred("genls").facts.push_back(
                Literal{"genls", {Term{f.at(1).atom}, Term{f.at(2).atom}}, true});
        } else if (h == "generality") {
            if (f.size() != 3) throw ParseError("generality takes term and count", f.line);
            kb.tax_.set_generality(f.at(1).atom, std::stol(f.at(2).atom));
        } else if (h == "transitive") {
            if (f.size() != 3) throw ParseError("transitive takes pred and argpos", f.line);
            int pos = std::stoi(f.at(2).atom);
            if (pos < 1) throw KbError("line " + std::to_string(f.line) +
                                       ": argument positions are 1-based");
            kb.pred(f.at(1).atom).transitive_pos.insert(pos);
        } else if (h == "procedural") {
            if (f.size() != 2) throw ParseError("procedural takes a predicate", f.line);
            kb.pred(f.at(1).atom).procedural = true;
        } else if (h == "arity") {
            if (f.size() != 3) throw ParseError("arity takes pred and count", f.line);
            check_arity(arity_seen, f.at(1).atom, std::stoi(f.at(2).atom), f.line);
        } else {
            throw ParseError("unknown statement '" + h + "'", f.line);
        }
    }

    // post-read validation, so statement order never matters
    for (const auto& [cname, line] : isa_checks)
        if (!kb.tax_.concept_declared(cname))
            throw KbError("line " + std::to_string(line) + ": isa edge to undeclared concept '" +
                          cname + "' (declare it with genls or generality)");
    for (size_t i = 0; i < kb.rules_.size(); ++i) {
        const Rule& r = kb.rules_[i];
        if (r.consequent.pred == "isa" || r.consequent.pred == "genls")
            throw KbError("rule '" + r.id +
                          "': isa/genls are taxonomy statements and may not be derived");
        kb.pred(r.consequent.pred).rules.push_back(static_cast<int>(i));
    }
    for (const auto& name : kb.pred_order_) {
        const PredicateInfo& pi = kb.preds_.at(name);
        if (pi.transitive_pos.empty()) continue;
        int arity = arity_seen.count(name) ? arity_seen[name].first : -1;
        if (arity != -1 && arity != 2)
            throw KbError("transitive predicate '" + name + "' must be binary");
        for (int pos : pi.transitive_pos)
            if (pos > 2)
                throw KbError("transitive position out of range for '" + name + "'");
        if (!pi.rules.empty())
            throw KbError("transitive predicate '" + name +
                          "' may not be a rule consequent (closure runs over stored facts)");
    }
    return kb;
}

KnowledgeBase load_kb_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw KbError("cannot open KB file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_kb(ss.str());
}

void save_kb(const KnowledgeBase& kb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw KbError("cannot write KB file: " + path);
    const Taxonomy& t = kb.tax_;
    for (const auto& [sub, supers] : t.genls_edges())
        for (const auto& s : supers) out << "(genls " << sub << " " << s << ")\n";
    for (const auto& [term, cs] : t.isa_edges())
        for (const auto& c : cs) out << "(isa " << term << " " << c << ")\n";
    for (const auto& [term, g] : t.generality_map())
        out << "(generality " << term << " " << g << ")\n";
    for (const auto& name : kb.pred_order_) {
        const PredicateInfo& pi = kb.preds_.at(name);
        if (pi.procedural) out << "(procedural " << name << ")\n";
        for (int pos : pi.transitive_pos)
            out << "(transitive " << name << " " << pos << ")\n";
    }
    for (const auto& name : kb.pred_order_) {
        if (name == "isa" || name == "genls") continue;  // mirrored from taxonomy
        const PredicateInfo& pi = kb.preds_.at(name);
        for (const auto& f : pi.facts) out << "(fact " << f.str() << ")\n";
    }
    for (const auto& r : kb.rules_) {
        out << "(rule " << r.id;
        if (!r.horn) out << " nonhorn";
        out << " (ante";
        for (const auto& a : r.antecedent) out << " " << a.str();
        out << ") (conseq " << r.consequent.str() << "))\n";
    }
}

}  // namespace ordo
