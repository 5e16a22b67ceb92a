#pragma once

#include <cstdint>
#include <map>

#include "ordo/dtree.hpp"
#include "ordo/regression.hpp"
#include "ordo/search.hpp"
#include "ordo/synth.hpp"

namespace ordo {

/// Net-score weights: w0 scales the depth preference, w1 the tree score,
/// w2 the answerability score.
struct Weights {
    double w0 = 1.0;
    double w1 = 10.0;
    double w2 = 10.0;
};

/// Frontier modules for an ablation mode: "baseline" (depth only), "dt"
/// (depth + semantic-context trees), "sl" (depth + learned answerability),
/// "dt+sl" (all three). The KB, trees, and model must outlive the returned
/// modules; modes that do not use trees/model may pass null, modes that need
/// them throw std::invalid_argument when they are missing. A node whose
/// link-set enumeration overflows cfg.max_path_sets scores 0 in the dt term
/// (ranked last there) rather than aborting the search.
std::vector<HeuristicModule> make_modules(
    const std::string& mode, const KnowledgeBase& kb, const SearchConfig& cfg,
    const std::map<std::string, DecisionTree>* trees,
    const RegressionModel* model, const Weights& w = {});

/// Every KB rule trained in sequence; rules whose antecedent produced fewer
/// than the minimum training tuples within the budget are listed untrained.
struct TreeTrainingReport {
    std::map<std::string, DecisionTree> trees;
    std::vector<std::string> untrained;
    int rules = 0;
    std::string str() const;
};
TreeTrainingReport train_all_trees(const KnowledgeBase& kb, double budget_secs,
                                   long max_tuples = 200);

/// Run every query under the depth-only ordering with the given config,
/// reservoir-sample round(sample_rate * N) nodes of each finished graph
/// (seeded by `seed` and the query index), and emit one row per sampled
/// node: features 1-45 plus feature 46 = answers_below after the run.
Dataset collect_dataset(const KnowledgeBase& kb,
                        const std::vector<QueryCase>& queries,
                        double sample_rate, const SearchConfig& cfg,
                        std::uint64_t seed);

/// Raw per-query, per-mode outcome.
struct QueryOutcome {
    std::string query_id;
    std::string cls;
    std::string mode;
    int set = 0;
    bool answered = false;
    long answers = 0;
    long nodes_expanded = 0;
    double ms = 0;
    std::string cutoff;
};

/// One aggregated report row (a test set under one mode).
struct ModeRow {
    std::string set;
    std::string mode;
    int queries = 0;
    int answered = 0;
    double pct_answered = 0;
    double improvement = 0;  // answered delta vs the set's baseline row, in %
    long nodes_expanded = 0;
    double total_secs = 0;
    double speedup = 1;           // baseline total time / this row's
    std::vector<double> query_ms; // per-query times (percentile source)
};

/// Table-style ablation report: rows grouped per test set (plus an "all"
/// aggregate), one row per mode. The plain csv() carries only deterministic
/// columns; wall-clock columns live in timing_csv() so report files can be
/// compared byte-for-byte across runs.
struct BenchmarkReport {
    std::vector<std::string> modes;
    std::vector<ModeRow> rows;
    std::vector<QueryOutcome> outcomes;
    std::string text_table() const;
    std::string csv() const;
    std::string timing_csv() const;
};

/// Runs every query under every mode with identical cutoffs; "answered"
/// means at least one answer arrived inside the cutoff, so searches stop at
/// their first answer. Improvement and speedup are relative to the same
/// set's baseline row (first requested mode when "baseline" is absent).
BenchmarkReport run_benchmark(const KnowledgeBase& kb,
                              const std::vector<QueryCase>& queries,
                              const std::vector<std::string>& modes,
                              const SearchConfig& cfg,
                              const std::map<std::string, DecisionTree>* trees,
                              const RegressionModel* model,
                              const Weights& w = {});

/// Success = answers_below > 0. Depth and literal-count tables hold
/// (nodes, successes) pairs indexed by depth / clause size; transformation
/// links are bucketed into ten equal id ranges (a partition of [0, max id])
/// with per-bucket totals and success counts (a link succeeds when its
/// target node does).
struct SuccessStats {
    std::vector<long> depth_nodes, depth_success;
    std::vector<long> lit_nodes, lit_success;
    long bucket_width = 0;
    std::vector<long> bucket_links, bucket_success;
    std::string str() const;
};
SuccessStats success_stats(const std::vector<const SearchGraph*>& graphs);

}  // namespace ordo
