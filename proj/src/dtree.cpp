#include "ordo/dtree.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <sstream>

namespace ordo {

DecisionTree DecisionTree::make_leaf(bool accept) {
    DecisionTree t;
    t.leaf = true;
    t.accept = accept;
    return t;
}

DecisionTree DecisionTree::make_branch(RestrictionCondition test, DecisionTree and_child,
                                       DecisionTree or_child) {
    DecisionTree t;
    t.leaf = false;
    t.test = std::move(test);
    t.and_child = std::make_unique<DecisionTree>(std::move(and_child));
    t.or_child = std::make_unique<DecisionTree>(std::move(or_child));
    return t;
}

std::string DecisionTree::str() const {
    if (leaf) return accept ? "(leaf accept)" : "(leaf reject)";
    return "(branch " + test.variable + " " + test.concept_name + " " +
           and_child->str() + " " + or_child->str() + ")";
}

bool tree_equal(const DecisionTree& a, const DecisionTree& b) {
    if (a.leaf != b.leaf) return false;
    if (a.leaf) return a.accept == b.accept;
    return a.test.variable == b.test.variable &&
           a.test.concept_name == b.test.concept_name &&
           tree_equal(*a.and_child, *b.and_child) && tree_equal(*a.or_child, *b.or_child);
}

TrainingSet generate_training_set(const KnowledgeBase& kb, const Rule& rule,
                                  double budget_secs, long max_tuples) {
    TrainingSet ts;
    ts.rule_id = rule.id;
    SearchConfig cfg;
    cfg.cutoff_secs = budget_secs;
    cfg.max_nodes = 500000;
    cfg.max_answers = max_tuples;
    SearchResult r = answer_query(kb, rule.antecedent, cfg, {depth_module(1.0)});
    if (max_tuples > 0 && static_cast<long>(r.answers.size()) > max_tuples)
        r.answers.resize(max_tuples);
    ts.tuples = std::move(r.answers);
    return ts;
}

namespace {

CoverResult best_cover_idx(const KnowledgeBase& kb,
                           const std::vector<Substitution>& tuples,
                           const std::vector<int>& idx,
                           const std::vector<std::string>& vars) {
    const Taxonomy& tax = kb.taxonomy();
    CoverResult best;
    long best_cov = 0;
    long best_gen = 0;
    for (const auto& var : vars) {
        // generalization sets of this variable's bindings over the subset
        std::vector<std::vector<std::string>> gens;
        gens.reserve(idx.size());
        std::set<std::string> candidates;
        for (int i : idx) {
            const Term* t = tuples[i].lookup(var);
            std::vector<std::string> g;
            if (t && !t->is_var()) g = tax.generalizations(t->name);
            for (const auto& c : g) candidates.insert(c);
            gens.push_back(std::move(g));
        }
        for (const auto& c : candidates) {
            std::vector<int> covered;
            for (size_t k = 0; k < idx.size(); ++k)
                if (std::binary_search(gens[k].begin(), gens[k].end(), c))
                    covered.push_back(idx[k]);
            long cov = static_cast<long>(covered.size());
            long gen = tax.term_generality(c);
            bool better = false;
            if (!best.found) {
                better = true;
            } else if (cov != best_cov) {
                better = cov > best_cov;
            } else if (gen != best_gen) {
                better = gen < best_gen;
            } else if (c != best.concept_name) {
                better = c < best.concept_name;
            }  // same cover/generality/name under an earlier var: keep it
            if (better) {
                best.found = true;
                best.variable = var;
                best.concept_name = c;
                best.covered = std::move(covered);
                best_cov = cov;
                best_gen = gen;
            }
        }
    }
    return best;
}

DecisionTree grow(const KnowledgeBase& kb, const std::vector<Substitution>& tuples,
                  const std::vector<int>& idx, const std::vector<std::string>& vars,
                  double threshold, std::vector<int>* accepted, int depth,
                  int max_depth) {
    assert(depth <= max_depth);
    (void)max_depth;
    if (idx.empty() || static_cast<double>(idx.size()) < threshold)
        return DecisionTree::make_leaf(false);
    auto accept_here = [&] {
        if (accepted) accepted->insert(accepted->end(), idx.begin(), idx.end());
        return DecisionTree::make_leaf(true);
    };
    if (vars.empty()) return accept_here();
    CoverResult best = best_cover_idx(kb, tuples, idx, vars);
    if (!best.found) return accept_here();
    std::vector<int> uncovered;
    std::set_difference(idx.begin(), idx.end(), best.covered.begin(),
                        best.covered.end(), std::back_inserter(uncovered));
    std::vector<std::string> rest;
    for (const auto& v : vars)
        if (v != best.variable) rest.push_back(v);
    DecisionTree and_child = grow(kb, tuples, best.covered, rest, threshold, accepted,
                                  depth + 1, max_depth);
    DecisionTree or_child =
        grow(kb, tuples, uncovered, vars, threshold, accepted, depth + 1, max_depth);
    return DecisionTree::make_branch(
        RestrictionCondition{best.variable, best.concept_name}, std::move(and_child),
        std::move(or_child));
}

}  // namespace

CoverResult best_covering_generalization(const KnowledgeBase& kb,
                                         const std::vector<Substitution>& tuples,
                                         const std::vector<std::string>& vars) {
    std::vector<int> idx(tuples.size());
    for (size_t i = 0; i < tuples.size(); ++i) idx[i] = static_cast<int>(i);
    return best_cover_idx(kb, tuples, idx, vars);
}

DecisionTree create_tree(const KnowledgeBase& kb, const TrainingSet& training,
                         const std::vector<std::string>& vars, double stop_fraction,
                         std::vector<int>* accepted) {
    if (accepted) accepted->clear();
    if (training.tuples.empty()) return DecisionTree::make_leaf(false);
    std::vector<int> idx(training.tuples.size());
    for (size_t i = 0; i < training.tuples.size(); ++i) idx[i] = static_cast<int>(i);
    double threshold = stop_fraction * static_cast<double>(training.tuples.size());
    int max_depth = static_cast<int>(vars.size() + training.tuples.size()) + 1;
    DecisionTree t =
        grow(kb, training.tuples, idx, vars, threshold, accepted, 0, max_depth);
    if (accepted) std::sort(accepted->begin(), accepted->end());
    return t;
}

bool satisfies(const KnowledgeBase& kb, const DecisionTree& tree,
               const Substitution& theta) {
    const DecisionTree* cur = &tree;
    while (!cur->leaf) {
        const Term* t = theta.lookup(cur->test.variable);
        bool pass = true;  // unbound: optimistic
        if (t && !t->is_var())
            pass = kb.taxonomy().holds_isa(t->name, cur->test.concept_name);
        cur = pass ? cur->and_child.get() : cur->or_child.get();
    }
    return cur->accept;
}

double f_dt(const KnowledgeBase& kb, const SearchGraph& g, const SearchNode& n,
            const std::map<std::string, DecisionTree>& trees, size_t max_sets) {
    auto sets = link_sets_to_root(g, n.id, max_sets);
    double total = 0;
    for (const auto& p : sets) {
        if (p.empty()) continue;
        double hits = 0;
        for (int li : p) {
            const TransformationLink& l = g.tlinks[li];
            auto it = trees.find(l.rule->id);
            if (it == trees.end() || satisfies(kb, it->second, l.substitution))
                hits += 1.0;
        }
        total += hits / static_cast<double>(p.size());
    }
    return total;
}

// ---------------------------------------------------------------- model io

void save_trees(const std::map<std::string, DecisionTree>& trees,
                const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "; decision trees: (tree RULE-ID expr), expr = (leaf accept|reject)\n";
    os << ";                 | (branch ?var concept <and-expr> <or-expr>)\n";
    for (const auto& [id, t] : trees) os << "(tree " << id << " " << t.str() << ")\n";
}

namespace {

DecisionTree tree_from_sexpr(const Sexpr& e, const KnowledgeBase* kb) {
    if (e.is_atom || e.size() < 1 || !e.at(0).is_atom)
        throw KbError("malformed tree expression at line " + std::to_string(e.line));
    const std::string& h = e.head();
    if (h == "leaf") {
        if (e.size() != 2 || !e.at(1).is_atom)
            throw KbError("leaf takes accept|reject, line " + std::to_string(e.line));
        const std::string& v = e.at(1).atom;
        if (v != "accept" && v != "reject")
            throw KbError("leaf takes accept|reject, line " + std::to_string(e.line));
        return DecisionTree::make_leaf(v == "accept");
    }
    if (h == "branch") {
        if (e.size() != 5 || !e.at(1).is_atom || !e.at(2).is_atom)
            throw KbError("branch takes ?var concept and-expr or-expr, line " +
                          std::to_string(e.line));
        const std::string& var = e.at(1).atom;
        const std::string& cname = e.at(2).atom;
        if (var.empty() || var[0] != '?')
            throw KbError("branch variable must start with '?', line " +
                          std::to_string(e.line));
        if (kb && !kb->taxonomy().concept_declared(cname))
            throw KbError("tree concept '" + cname + "' not in taxonomy, line " +
                          std::to_string(e.line));
        return DecisionTree::make_branch(RestrictionCondition{var, cname},
                                         tree_from_sexpr(e.at(3), kb),
                                         tree_from_sexpr(e.at(4), kb));
    }
    throw KbError("unknown tree node '" + h + "' at line " + std::to_string(e.line));
}

}  // namespace

std::map<std::string, DecisionTree> load_trees(const std::string& path,
                                               const KnowledgeBase* kb) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    std::map<std::string, DecisionTree> out;
    for (const Sexpr& e : parse_sexprs(buf.str())) {
        if (e.is_atom || e.size() != 3 || !e.at(0).is_atom || e.head() != "tree" ||
            !e.at(1).is_atom)
            throw KbError("expected (tree RULE-ID expr) at line " +
                          std::to_string(e.line));
        if (!out.emplace(e.at(1).atom, tree_from_sexpr(e.at(2), kb)).second)
            throw KbError("duplicate tree for rule " + e.at(1).atom + ", line " +
                          std::to_string(e.line));
    }
    return out;
}

}  // namespace ordo
