#pragma once

#include <array>

#include "ordo/search.hpp"

namespace ordo {

constexpr int kNumFeatures = 46;

/// 46 meta-features of a search node, 1-indexed accessors. `present` is the
/// missing-value mask: a missing feature is skipped by normalization and
/// serialized as an empty CSV cell. Feature 46 (number of answers) is the
/// regression target, filled only by the data-collection pipeline.
struct FeatureVector {
    std::array<double, kNumFeatures> v{};
    std::array<bool, kNumFeatures> present{};

    double get(int i) const { return v[i - 1]; }
    bool has(int i) const { return present[i - 1]; }
    void set(int i, double x) {
        v[i - 1] = x;
        present[i - 1] = true;
    }
    void clear(int i) {
        v[i - 1] = 0;
        present[i - 1] = false;
    }

    /// Canonical feature names, CSV header order.
    static const std::array<std::string, kNumFeatures>& names();
};

/// Descriptive statistics of one non-committing random walk below a node,
/// plus the committed-graph parent-successor union. `has_stats` is false for
/// a dead origin (no children): the walk statistics are missing and only the
/// tree-size estimate (= 1) is meaningful.
struct ProbeStats {
    bool has_stats = false;
    double mean_tlinks = 0;      // transformation links from the root, mean
    double mean_literals = 0;
    double median_out_degree = 0;
    double max_out_degree = 0;
    double median_vars = 0;
    double median_depth = 0;
    double knuth_estimate = 1;   // 1 + b1 + b1*b2 + ...
    long parent_successor_union = 0;
};

/// Instrumentation for cost-tier checks: how many probe walks ran and how
/// many KB fact-list scans were served while extracting.
struct FeatureCounters {
    long probes = 0;
    uint64_t fact_scans = 0;
};

/// Overrides the uniform random child choice in `probe`: called with the
/// out-degree, returns the child index. Lets tests enumerate every path.
using ProbeChooser = std::function<size_t(size_t)>;

/// Sum over the distinct predicates of the clause of log10(1 + NumRules(p)).
double fan_out_score(const KnowledgeBase& kb, const Clause& clause);

/// Product over the distinct predicates of literals containing at least one
/// variable of log10(1 + TermGenerality(p)); empty product = 1.
double generality_estimate(const KnowledgeBase& kb, const Clause& clause);

/// One random path from `n`, expanding children lazily (never touching the
/// committed graph), until a leaf or cfg.probe_max_steps expansions. The walk
/// is seeded by cfg.probe_seed mixed with the node id unless `chooser` is
/// given. Knuth's estimate treats the out-degrees b1..bk observed along the
/// path as if the whole tree branched that way.
ProbeStats probe(const SearchGraph& g, const SearchNode& n, const KnowledgeBase& kb,
                 const SearchConfig& cfg, const ProbeChooser* chooser = nullptr);

/// Fills features 1-45 (46 stays missing here). `need` selects features when
/// given (1-indexed at need[i-1]); unneeded expensive groups are skipped, so
/// cheap-only extraction runs no probe and no fact scan. `counters`
/// accumulates instrumentation; `chooser` is forwarded to `probe`.
FeatureVector extract_features(const SearchGraph& g, const SearchNode& n,
                               const KnowledgeBase& kb, const SearchConfig& cfg,
                               const std::array<bool, kNumFeatures>* need = nullptr,
                               FeatureCounters* counters = nullptr,
                               const ProbeChooser* chooser = nullptr);

/// CSV: 46 columns in canonical order, missing = empty cell.
std::string feature_csv_header();
std::string feature_csv_row(const FeatureVector& f);
FeatureVector feature_row_from_csv(const std::string& line);

}  // namespace ordo
