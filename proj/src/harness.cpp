#include "ordo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ordo {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    size_t i = static_cast<size_t>(p * (v.size() - 1) + 0.5);
    return v[i];
}

}  // namespace

std::vector<HeuristicModule> make_modules(
    const std::string& mode, const KnowledgeBase& kb, const SearchConfig& cfg,
    const std::map<std::string, DecisionTree>* trees,
    const RegressionModel* model, const Weights& w) {
    std::vector<HeuristicModule> mods;
    mods.push_back(depth_module(w.w0));
    bool want_dt = mode == "dt" || mode == "dt+sl";
    bool want_sl = mode == "sl" || mode == "dt+sl";
    if (!want_dt && !want_sl && mode != "baseline")
        throw std::invalid_argument("unknown mode '" + mode + "'");
    if (want_dt) {
        if (!trees) throw std::invalid_argument("mode '" + mode + "' needs trees");
        const KnowledgeBase* k = &kb;
        size_t cap = cfg.max_path_sets;
        mods.push_back({"dt", w.w1,
                        [k, trees, cap](const SearchGraph& g, const SearchNode& n) {
                            // heavily shared subgoals can make the link-set
                            // enumeration explode; an un-scorable node ranks
                            // last within this term instead of killing the run
                            try {
                                return f_dt(*k, g, n, *trees, cap);
                            } catch (const std::runtime_error&) {
                                return 0.0;
                            }
                        }});
    }
    if (want_sl) {
        if (!model) throw std::invalid_argument("mode '" + mode + "' needs a model");
        const KnowledgeBase* k = &kb;
        SearchConfig c = cfg;
        mods.push_back({"sl", w.w2,
                        [k, model, c](const SearchGraph& g, const SearchNode& n) {
                            return f_sl(g, n, *k, c, *model);
                        }});
    }
    return mods;
}

std::string TreeTrainingReport::str() const {
    std::ostringstream out;
    out << "trees trained: " << trees.size() << "/" << rules;
    if (!untrained.empty()) {
        out << "\nuntrained (below tuple threshold):";
        for (const auto& id : untrained) out << " " << id;
    }
    out << "\n";
    return out.str();
}

TreeTrainingReport train_all_trees(const KnowledgeBase& kb, double budget_secs,
                                   long max_tuples) {
    TreeTrainingReport rep;
    for (const Rule& r : kb.all_rules()) {
        ++rep.rules;
        TrainingSet ts = generate_training_set(kb, r, budget_secs, max_tuples);
        if (ts.tuples.size() < kMinTrainingTuples) {
            rep.untrained.push_back(r.id);
            continue;
        }
        std::vector<std::string> vars;
        for (const Term& t : r.vars()) vars.push_back(t.name);
        rep.trees.emplace(r.id, create_tree(kb, ts, vars, kStopFraction));
    }
    return rep;
}

Dataset collect_dataset(const KnowledgeBase& kb,
                        const std::vector<QueryCase>& queries,
                        double sample_rate, const SearchConfig& cfg,
                        std::uint64_t seed) {
    if (!(sample_rate > 0) || sample_rate > 1)
        throw std::invalid_argument("sample_rate must be in (0, 1]");
    Dataset d;
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        const QueryCase& qc = queries[qi];
        std::vector<HeuristicModule> mods{depth_module(1.0)};
        Searcher s(kb, qc.query, cfg, mods);
        s.run();
        const SearchGraph& g = s.graph();

        size_t n = g.nodes.size();
        size_t k = static_cast<size_t>(std::llround(sample_rate * n));
        if (k == 0) k = 1;
        if (k > n) k = n;
        // reservoir (algorithm R) over nodes in id order
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (qi + 1)));
        std::vector<size_t> res;
        res.reserve(k);
        for (size_t i = 0; i < n; ++i) {
            if (i < k) {
                res.push_back(i);
            } else {
                size_t j = static_cast<size_t>(rng() % (i + 1));
                if (j < k) res[j] = i;
            }
        }
        std::sort(res.begin(), res.end());

        for (size_t idx : res) {
            const SearchNode& node = g.nodes[idx];
            DataRow row;
            row.query_id = qc.id;
            row.node_id = node.id;
            row.x = extract_features(g, node, kb, cfg);
            row.x.set(46, static_cast<double>(node.answers_below));
            d.rows.push_back(std::move(row));
        }
    }
    return d;
}

BenchmarkReport run_benchmark(const KnowledgeBase& kb,
                              const std::vector<QueryCase>& queries,
                              const std::vector<std::string>& modes,
                              const SearchConfig& cfg,
                              const std::map<std::string, DecisionTree>* trees,
                              const RegressionModel* model, const Weights& w) {
    if (modes.empty()) throw std::invalid_argument("no modes requested");
    BenchmarkReport rep;
    rep.modes = modes;

    std::vector<int> sets;
    for (const auto& q : queries)
        if (std::find(sets.begin(), sets.end(), q.set) == sets.end())
            sets.push_back(q.set);
    std::sort(sets.begin(), sets.end());

    // rows laid out set-major, mode-minor; "all" aggregate rows at the end
    auto set_label = [](int s) { return "set" + std::to_string(s); };
    std::map<std::pair<std::string, std::string>, ModeRow> acc;

    SearchConfig run_cfg = cfg;
    run_cfg.max_answers = 1;  // answered = first answer inside the cutoff

    for (const auto& mode : modes) {
        std::vector<HeuristicModule> mods =
            make_modules(mode, kb, cfg, trees, model, w);
        for (const auto& qc : queries) {
            Searcher s(kb, qc.query, run_cfg, mods);
            SearchResult r = s.run();

            QueryOutcome o;
            o.query_id = qc.id;
            o.cls = qc.cls;
            o.mode = mode;
            o.set = qc.set;
            o.answered = r.stats.answers > 0;
            o.answers = r.stats.answers;
            o.nodes_expanded = r.stats.nodes_expanded;
            o.ms = r.stats.wall_ms;
            o.cutoff = r.stats.cutoff;
            rep.outcomes.push_back(o);

            for (const std::string& lbl : {set_label(qc.set), std::string("all")}) {
                ModeRow& row = acc[{lbl, mode}];
                row.set = lbl;
                row.mode = mode;
                ++row.queries;
                if (o.answered) ++row.answered;
                row.nodes_expanded += o.nodes_expanded;
                row.total_secs += o.ms / 1000.0;
                row.query_ms.push_back(o.ms);
            }
        }
    }

    std::string ref_mode = modes.front();
    if (std::find(modes.begin(), modes.end(), std::string("baseline")) !=
        modes.end())
        ref_mode = "baseline";

    std::vector<std::string> labels;
    for (int s : sets) labels.push_back(set_label(s));
    labels.push_back("all");
    for (const auto& lbl : labels) {
        const ModeRow& base = acc.at({lbl, ref_mode});
        for (const auto& mode : modes) {
            ModeRow row = acc.at({lbl, mode});
            row.pct_answered =
                row.queries ? 100.0 * row.answered / row.queries : 0.0;
            if (mode == ref_mode) {
                row.improvement = 0.0;
                row.speedup = 1.0;
            } else {
                row.improvement = 100.0 * (row.answered - base.answered) /
                                  std::max(base.answered, 1);
                row.speedup = row.total_secs > 0
                                  ? base.total_secs / row.total_secs
                                  : 0.0;
            }
            rep.rows.push_back(std::move(row));
        }
    }
    return rep;
}

std::string BenchmarkReport::text_table() const {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-9s %8s %9s %7s %7s %12s %10s %8s\n",
                  "set", "mode", "queries", "answered", "%ans", "impr%",
                  "nodes", "secs", "speedup");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line,
                      "%-6s %-9s %8d %9d %7.2f %7.2f %12ld %10.3f %8.2f\n",
                      r.set.c_str(), r.mode.c_str(), r.queries, r.answered,
                      r.pct_answered, r.improvement, r.nodes_expanded,
                      r.total_secs, r.speedup);
        out << line;
    }
    return out.str();
}

std::string BenchmarkReport::csv() const {
    std::ostringstream out;
    out << "set,mode,queries,answered,pct_answered,improvement_pct,nodes_expanded\n";
    for (const auto& r : rows)
        out << r.set << "," << r.mode << "," << r.queries << "," << r.answered
            << "," << fmt("%.2f", r.pct_answered) << ","
            << fmt("%.2f", r.improvement) << "," << r.nodes_expanded << "\n";
    return out.str();
}

std::string BenchmarkReport::timing_csv() const {
    std::ostringstream out;
    out << "set,mode,total_secs,mean_ms,p50_ms,p90_ms,speedup\n";
    for (const auto& r : rows) {
        double mean =
            r.query_ms.empty()
                ? 0.0
                : std::accumulate(r.query_ms.begin(), r.query_ms.end(), 0.0) /
                      r.query_ms.size();
        out << r.set << "," << r.mode << "," << fmt("%.3f", r.total_secs) << ","
            << fmt("%.3f", mean) << "," << fmt("%.3f", percentile(r.query_ms, 0.5))
            << "," << fmt("%.3f", percentile(r.query_ms, 0.9)) << ","
            << fmt("%.2f", r.speedup) << "\n";
    }
    return out.str();
}

SuccessStats success_stats(const std::vector<const SearchGraph*>& graphs) {
    SuccessStats st;
    auto bump = [](std::vector<long>& v, size_t i) {
        if (v.size() <= i) v.resize(i + 1, 0);
        ++v[i];
    };
    long max_seq = 0;
    for (const SearchGraph* g : graphs)
        for (const auto& l : g->tlinks) max_seq = std::max<long>(max_seq, l.seq);

    const int nbuckets = 10;
    st.bucket_width = max_seq / nbuckets + 1;
    st.bucket_links.assign(nbuckets, 0);
    st.bucket_success.assign(nbuckets, 0);

    for (const SearchGraph* g : graphs) {
        for (const auto& n : g->nodes) {
            bool ok = n.answers_below > 0;
            bump(st.depth_nodes, static_cast<size_t>(n.depth));
            if (ok) bump(st.depth_success, static_cast<size_t>(n.depth));
            size_t lits = n.clause.size();
            bump(st.lit_nodes, lits);
            if (ok) bump(st.lit_success, lits);
        }
        for (const auto& l : g->tlinks) {
            size_t b = static_cast<size_t>(l.seq / st.bucket_width);
            ++st.bucket_links[b];
            if (g->nodes[static_cast<size_t>(l.to)].answers_below > 0)
                ++st.bucket_success[b];
        }
    }
    st.depth_success.resize(st.depth_nodes.size(), 0);
    st.lit_success.resize(st.lit_nodes.size(), 0);
    return st;
}

std::string SuccessStats::str() const {
    std::ostringstream out;
    char line[128];
    out << "P(success | depth)\n";
    for (size_t d = 0; d < depth_nodes.size(); ++d) {
        double p = depth_nodes[d] ? double(depth_success[d]) / depth_nodes[d] : 0;
        std::snprintf(line, sizeof line, "  depth %2zu  nodes %8ld  p %.4f\n", d,
                      depth_nodes[d], p);
        out << line;
    }
    out << "P(success | literals)\n";
    for (size_t n = 0; n < lit_nodes.size(); ++n) {
        double p = lit_nodes[n] ? double(lit_success[n]) / lit_nodes[n] : 0;
        std::snprintf(line, sizeof line, "  literals %2zu  nodes %8ld  p %.4f\n",
                      n, lit_nodes[n], p);
        out << line;
    }
    out << "successful transformation links by id range\n";
    for (size_t b = 0; b < bucket_links.size(); ++b) {
        std::snprintf(line, sizeof line,
                      "  [%6ld, %6ld)  links %8ld  successful %8ld\n",
                      static_cast<long>(b) * bucket_width,
                      static_cast<long>(b + 1) * bucket_width, bucket_links[b],
                      bucket_success[b]);
        out << line;
    }
    return out.str();
}

}  // namespace ordo
