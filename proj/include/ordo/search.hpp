#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <queue>
#include <unordered_map>

#include "ordo/unify.hpp"

namespace ordo {

/// Rule back-chaining edge. `substitution` is the unifier projected onto the
/// rule's *original* variable names, frozen when the link is created — this
/// is what restriction-condition trees are evaluated against.
struct TransformationLink {
    int from = -1, to = -1;
    const Rule* rule = nullptr;
    Substitution substitution;
    int seq = -1;  // global creation index across both link kinds
};

/// Fact-resolution edge (also used for transitive-closure expansions and for
/// closed-world resolution of ground negative literals; `fact` then carries
/// the resolved literal itself).
struct RestrictionLink {
    int from = -1, to = -1;
    Literal fact;
    Substitution substitution;
    int seq = -1;
};

struct SearchNode {
    int id = -1;
    Clause clause;          // remaining goal, substitutions applied eagerly
    Substitution binding;   // accumulated from the root
    int depth = 0;          // min transformation links to the root
    std::vector<int> in_t, in_r, out_t, out_r;  // link indices by kind
    long answers_below = 0;
    bool expanded = false;
    bool is_answer = false;
    double score = 0;       // net heuristic score, set when (re)enqueued
    uint64_t version = 0;   // bumped when score is recomputed
    int selected_literal = -1;
};

/// Plain node/link storage; ids are creation timestamps and every link goes
/// from a lower id to a higher id, so the graph is a DAG.
struct SearchGraph {
    Clause query;
    std::vector<Term> query_vars;
    std::vector<SearchNode> nodes;
    std::vector<TransformationLink> tlinks;
    std::vector<RestrictionLink> rlinks;
    int link_seq = 0;

    int add_node(Clause clause, Substitution binding, int depth);
    int add_tlink(int from, int to, const Rule* rule, Substitution subst);
    int add_rlink(int from, int to, Literal fact, Substitution subst);
    const SearchNode& root() const { return nodes.front(); }
};

struct HeuristicModule {
    std::string name;
    double weight = 0;
    std::function<double(const SearchGraph&, const SearchNode&)> scorer;
};

/// Weighted sum over modules; zero-weight modules are never evaluated, so an
/// ablated run is bit-identical with or without models loaded.
double net_score(const SearchGraph& g, const SearchNode& n,
                 const std::vector<HeuristicModule>& modules);

struct SearchConfig {
    double cutoff_secs = 5.0;    // <= 0 disables the wall clock cutoff
    long max_nodes = 50000;      // created-node budget; <= 0 disables
    int max_depth = 25;          // transformation depth; children beyond are pruned
    long max_answers = 0;        // stop after this many distinct answers; 0 = all
    uint64_t probe_seed = 0;     // seeds per-node probe walks
    int probe_max_steps = 30;
    size_t max_path_sets = 200000;  // safety cap for link-set enumeration
};

struct SearchStats {
    long nodes_expanded = 0;
    long nodes_created = 0;
    long links_created = 0;
    long answer_events = 0;      // completed derivations (answer nodes)
    size_t answers = 0;          // distinct ground answers
    long first_answer_expansion = -1;  // expansion count when the first landed
    double wall_ms = 0;
    std::string cutoff = "exhausted";  // exhausted | time | nodes | answers
    std::string str() const;
};

struct SearchResult {
    std::vector<Substitution> answers;  // canonical order
    SearchStats stats;
};

/// One child produced by resolving the selected literal of a clause.
/// Shared between committed expansion and non-committing probe walks.
struct ChildSpec {
    bool transformation = false;
    const Rule* rule = nullptr;   // transformation
    Literal fact;                 // restriction / transitive / negative
    Substitution mgu;             // raw unifier, already applied to `clause`
    Substitution link_subst;      // projected (rule vars / literal vars)
    Clause clause;
    int depth = 0;
};

/// Index of the literal to resolve next: fewest matching facts+rules wins,
/// ties to the lowest index. Non-ground negatives are deferred; -1 when only
/// those remain (dead node).
int select_literal(const KnowledgeBase& kb, const Clause& clause);

/// All children of a clause at `depth` (restrictions, then transformations,
/// then transitive expansions, in KB load order). `rename_tag` suffixes rule
/// variables for standardizing apart. Pure: no graph mutation.
std::vector<ChildSpec> generate_children(const KnowledgeBase& kb, const Clause& clause,
                                         int depth, const SearchConfig& cfg,
                                         const std::string& rename_tag);

/// Every distinct sequence of transformation links on a root-to-node path
/// (restriction links traversed but not recorded), each ordered root-first.
/// Throws std::runtime_error past cfg-style `max_sets`.
std::vector<std::vector<int>> link_sets_to_root(const SearchGraph& g, int node,
                                                size_t max_sets = 200000);

/// Increment answers_below on the answer node and every ancestor, once each.
void mark_success(SearchGraph& g, int answer_node);

/// Best-first backward chainer over a set-of-support frontier.
class Searcher {
  public:
    Searcher(const KnowledgeBase& kb, Clause query, SearchConfig cfg,
             std::vector<HeuristicModule> modules);

    /// Expands the best frontier node. False once done or cut off.
    bool step();
    SearchResult result();
    SearchResult run();

    const SearchGraph& graph() const { return graph_; }
    SearchGraph& graph() { return graph_; }
    const SearchStats& stats() const { return stats_; }
    const std::vector<int>& expansion_order() const { return expansion_order_; }

  private:
    const KnowledgeBase& kb_;
    SearchConfig cfg_;
    std::vector<HeuristicModule> modules_;
    SearchGraph graph_;
    SearchStats stats_;
    std::vector<int> expansion_order_;
    std::unordered_map<std::string, int> memo_;
    std::map<std::string, Substitution> answers_;  // canonical str -> subst
    std::chrono::steady_clock::time_point t0_;
    bool finished_ = false;

    struct QEntry {
        double score;
        uint64_t version;
        int id;
        bool operator<(const QEntry& o) const {
            if (score != o.score) return score < o.score;  // max-heap on score
            return id > o.id;                              // then FIFO
        }
    };
    std::priority_queue<QEntry> frontier_;

    void expand(int id);
    void enqueue(int id);
    void rescore(int id);
    void relax_depth(int id);
    void record_answer(int node_id);
    std::string memo_key(const Substitution& binding, const Clause& clause) const;
};

/// Convenience wrapper: build a Searcher and run it to completion.
SearchResult answer_query(const KnowledgeBase& kb, const Clause& query,
                          const SearchConfig& cfg,
                          const std::vector<HeuristicModule>& modules);

/// The default module: scores a node by minus its depth, so ties fall back
/// to breadth-first, FIFO within a depth.
HeuristicModule depth_module(double weight = 1.0);

/// Projection of a node binding onto the query variables; nullopt when any
/// query variable is still unbound (non-ground).
std::optional<Substitution> project_answer(const std::vector<Term>& query_vars,
                                           const Substitution& binding);

}  // namespace ordo
