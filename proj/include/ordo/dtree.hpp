#pragma once

#include <map>
#include <memory>

#include "ordo/search.hpp"

namespace ordo {

/// Sort test `x : tau`: the binding of `variable` must be (transitively) an
/// instance of the concept.
struct RestrictionCondition {
    std::string variable;
    std::string concept_name;
};

/// Per-rule tree of restriction conditions. Leaves carry accept/reject; a
/// branch routes a substitution to `and_child` when its test passes (and-path
/// conjunctions accumulate down that side) and to `or_child` otherwise. The
/// whole tree encodes a disjunction of conjunctive restriction conditions.
struct DecisionTree {
    bool leaf = true;
    bool accept = false;  // leaf payload
    RestrictionCondition test;
    std::unique_ptr<DecisionTree> and_child, or_child;

    static DecisionTree make_leaf(bool accept);
    static DecisionTree make_branch(RestrictionCondition test, DecisionTree and_child,
                                    DecisionTree or_child);
    std::string str() const;  // (leaf accept) | (branch ?var concept <and> <or>)
};

bool tree_equal(const DecisionTree& a, const DecisionTree& b);

/// Successful ground bindings for one rule, each over all of the rule's
/// variables.
struct TrainingSet {
    std::string rule_id;
    std::vector<Substitution> tuples;
};

/// Runs the rule's antecedent as a query and keeps the ground answers.
/// Either budget disables at <= 0; both together stop at whichever is first.
TrainingSet generate_training_set(const KnowledgeBase& kb, const Rule& rule,
                                  double budget_secs, long max_tuples);

/// Result of the branching-test search. `covered` holds indices into the
/// tuple list passed in, in ascending order; `found` is false when every
/// binding of every candidate variable has an empty generalization set.
struct CoverResult {
    bool found = false;
    std::string variable;
    std::string concept_name;
    std::vector<int> covered;
};

/// Most specific maximally covering generalization over the given variables:
/// maximum cover first, then lowest stored generality, then concept name,
/// then the variables' list order.
CoverResult best_covering_generalization(const KnowledgeBase& kb,
                                         const std::vector<Substitution>& tuples,
                                         const std::vector<std::string>& vars);

constexpr double kStopFraction = 0.05;
constexpr size_t kMinTrainingTuples = 5;

/// Top-down induction: branch on the best covering generalization, recurse
/// and-side on the covered tuples without the branched variable, or-side on
/// the remainder with all variables. A subset smaller than stop_fraction of
/// the *original* set becomes a reject leaf; exhausted variables or no
/// available test become an accept leaf. When `accepted` is non-null it
/// receives the indices of tuples that end in accept leaves, ascending.
DecisionTree create_tree(const KnowledgeBase& kb, const TrainingSet& training,
                         const std::vector<std::string>& vars, double stop_fraction,
                         std::vector<int>* accepted = nullptr);

/// Walks theta down the tree: a bound variable takes the and-side iff its
/// value is an instance of the test concept; an unbound variable passes
/// optimistically. Returns the reached leaf's accept flag.
bool satisfies(const KnowledgeBase& kb, const DecisionTree& tree,
               const Substitution& theta);

/// Semantic-context score of a node: over every distinct transformation-link
/// set p from the root, add (1/|p|) * sum of I(link substitution, rule tree)
/// across p, where I is `satisfies` and rules without a tree pass with 1.
/// The root (one empty set) scores 0.
double f_dt(const KnowledgeBase& kb, const SearchGraph& g, const SearchNode& n,
            const std::map<std::string, DecisionTree>& trees,
            size_t max_sets = 200000);

/// Tree model file: one `(tree RULE-ID <expr>)` per rule, round-trip stable.
void save_trees(const std::map<std::string, DecisionTree>& trees,
                const std::string& path);
std::map<std::string, DecisionTree> load_trees(const std::string& path,
                                               const KnowledgeBase* kb = nullptr);

}  // namespace ordo
