#include "ordo/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

namespace ordo {

const std::array<std::string, kNumFeatures>& FeatureVector::names() {
    static const std::array<std::string, kNumFeatures> kNames = {
        "num_variables",
        "num_literals",
        "num_fully_unbound_literals",
        "single_literal_query",
        "multi_literal_query",
        "fully_bound_query",
        "partially_bound_query",
        "fully_unbound_single_literal_query",
        "depth",
        "num_transformation_links",
        "num_restriction_links",
        "fan_out_score",
        "num_recursive_rules",
        "generality_estimate_unbound",
        "min_term_generality",
        "num_gafs_single_literal",
        "min_num_gafs",
        "generality_fully_unbound_single",
        "open_transitive_positions",
        "open_transitive_positions_multivar",
        "open_genls_disjoint_positions",
        "probe_mean_transformation_links",
        "probe_mean_literals",
        "probe_median_out_degree",
        "probe_max_out_degree",
        "probe_median_variables",
        "parent_successor_union",
        "probe_median_depth",
        "knuth_estimate",
        "ratio_vars_literals",
        "ratio_pos_neg",
        "abs_positives_minus_one",
        "num_literals_sq",
        "num_variables_sq",
        "depth_sq",
        "num_transformation_links_sq",
        "ratio_vars_literals_sq",
        "parent_successor_union_sq",
        "depth_x_translinks",
        "depth_x_parent_successor_union",
        "depth_x_knuth_estimate",
        "single_literal_x_open_transitive",
        "min_term_generality_x_single_literal",
        "generality_unbound_x_multi_literal",
        "procedural_single_literal",
        "num_answers",
    };
    return kNames;
}

namespace {

long distinct_vars(const Clause& c) {
    std::set<std::string> vs;
    for (const auto& l : c)
        for (const auto& t : l.args)
            if (t.is_var()) vs.insert(t.name);
    return static_cast<long>(vs.size());
}

// at least one argument and every argument a variable
bool fully_unbound(const Literal& l) {
    if (l.args.empty()) return false;
    for (const auto& t : l.args)
        if (!t.is_var()) return false;
    return true;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    if (n == 0) return 0;
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0 : s / static_cast<double>(xs.size());
}

}  // namespace

double fan_out_score(const KnowledgeBase& kb, const Clause& clause) {
    std::set<std::string> preds;
    for (const auto& l : clause) preds.insert(l.pred);
    double s = 0;
    for (const auto& p : preds)
        s += std::log10(1.0 + static_cast<double>(kb.num_rules(p)));
    return s;
}

double generality_estimate(const KnowledgeBase& kb, const Clause& clause) {
    std::set<std::string> preds;
    for (const auto& l : clause) {
        bool open = false;
        for (const auto& t : l.args)
            if (t.is_var()) {
                open = true;
                break;
            }
        if (open) preds.insert(l.pred);
    }
    double prod = 1;
    for (const auto& p : preds)
        prod *= std::log10(1.0 + static_cast<double>(kb.taxonomy().term_generality(p)));
    return prod;
}

ProbeStats probe(const SearchGraph& g, const SearchNode& n, const KnowledgeBase& kb,
                 const SearchConfig& cfg, const ProbeChooser* chooser) {
    ProbeStats st;

    // committed-graph neighborhood: every successor of every parent
    std::set<int> uni;
    auto parents_of = [&](const SearchNode& x, std::set<int>& out) {
        for (int li : x.in_t) out.insert(g.tlinks[li].from);
        for (int li : x.in_r) out.insert(g.rlinks[li].from);
    };
    std::set<int> parents;
    parents_of(n, parents);
    for (int p : parents) {
        for (int li : g.nodes[p].out_t) uni.insert(g.tlinks[li].to);
        for (int li : g.nodes[p].out_r) uni.insert(g.rlinks[li].to);
    }
    st.parent_successor_union = static_cast<long>(uni.size());

    std::mt19937_64 rng(cfg.probe_seed ^
                        (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(n.id + 1)));
    std::vector<double> tlinks, lits, vars, depths, outdeg;
    Clause cur = n.clause;
    int depth = n.depth;
    double prod = 1;
    st.knuth_estimate = 1;
    for (int step = 0; step < cfg.probe_max_steps; ++step) {
        auto kids = generate_children(kb, cur, depth, cfg, "p" + std::to_string(step));
        outdeg.push_back(static_cast<double>(kids.size()));
        if (kids.empty()) break;
        prod *= static_cast<double>(kids.size());
        st.knuth_estimate += prod;
        size_t pick;
        if (chooser && *chooser)
            pick = (*chooser)(kids.size());
        else
            pick = std::uniform_int_distribution<size_t>(0, kids.size() - 1)(rng);
        ChildSpec& c = kids[pick];
        cur = std::move(c.clause);
        depth = c.depth;
        tlinks.push_back(static_cast<double>(depth));
        lits.push_back(static_cast<double>(cur.size()));
        vars.push_back(static_cast<double>(distinct_vars(cur)));
        depths.push_back(static_cast<double>(depth));
    }
    if (!tlinks.empty()) {
        st.has_stats = true;
        st.mean_tlinks = mean(tlinks);
        st.mean_literals = mean(lits);
        st.median_out_degree = median(outdeg);
        st.max_out_degree = *std::max_element(outdeg.begin(), outdeg.end());
        st.median_vars = median(vars);
        st.median_depth = median(depths);
    }
    return st;
}

FeatureVector extract_features(const SearchGraph& g, const SearchNode& n,
                               const KnowledgeBase& kb, const SearchConfig& cfg,
                               const std::array<bool, kNumFeatures>* need,
                               FeatureCounters* counters,
                               const ProbeChooser* chooser) {
    uint64_t scans0 = kb.fact_scans();
    auto needed = [&](int i) { return !need || (*need)[i - 1]; };
    FeatureVector f;
    const Clause& c = n.clause;

    // --- problem size and type
    long nvars = distinct_vars(c);
    long nlits = static_cast<long>(c.size());
    long nfull = 0;
    bool any_ground_arg = false;
    long npos = 0, nneg = 0;
    for (const auto& l : c) {
        if (fully_unbound(l)) ++nfull;
        for (const auto& t : l.args)
            if (!t.is_var()) any_ground_arg = true;
        (l.positive ? npos : nneg)++;
    }
    f.set(1, static_cast<double>(nvars));
    f.set(2, static_cast<double>(nlits));
    f.set(3, static_cast<double>(nfull));
    f.set(4, nlits == 1 ? 1 : 0);
    f.set(5, nlits > 1 ? 1 : 0);
    f.set(6, nvars == 0 ? 1 : 0);
    f.set(7, (nvars > 0 && any_ground_arg) ? 1 : 0);
    f.set(8, (nlits == 1 && nfull == 1) ? 1 : 0);

    // --- problem state
    f.set(9, static_cast<double>(n.depth));
    {
        // ancestry closure over both link kinds; count links by kind
        std::set<int> seen_nodes, t_in, r_in;
        std::vector<int> stack{n.id};
        seen_nodes.insert(n.id);
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            for (int li : g.nodes[id].in_t) {
                t_in.insert(li);
                if (seen_nodes.insert(g.tlinks[li].from).second)
                    stack.push_back(g.tlinks[li].from);
            }
            for (int li : g.nodes[id].in_r) {
                r_in.insert(li);
                if (seen_nodes.insert(g.rlinks[li].from).second)
                    stack.push_back(g.rlinks[li].from);
            }
        }
        f.set(10, static_cast<double>(t_in.size()));
        f.set(11, static_cast<double>(r_in.size()));
    }
    if (needed(12)) f.set(12, fan_out_score(kb, c));
    {
        // creation path = chain of first in-links (lowest seq)
        std::map<std::string, int> uses;
        int cur = n.id;
        while (true) {
            const SearchNode& x = g.nodes[cur];
            int best_seq = -1, from = -1;
            const Rule* rule = nullptr;
            if (!x.in_t.empty()) {
                const auto& l = g.tlinks[x.in_t.front()];
                best_seq = l.seq;
                from = l.from;
                rule = l.rule;
            }
            if (!x.in_r.empty()) {
                const auto& l = g.rlinks[x.in_r.front()];
                if (best_seq < 0 || l.seq < best_seq) {
                    best_seq = l.seq;
                    from = l.from;
                    rule = nullptr;
                }
            }
            if (from < 0) break;
            if (rule) uses[rule->id]++;
            cur = from;
        }
        long rec = 0;
        for (const auto& [id, k] : uses)
            if (k >= 2) ++rec;
        f.set(13, static_cast<double>(rec));
    }

    // --- knowledge level
    if (needed(14) || needed(44)) f.set(14, generality_estimate(kb, c));
    {
        bool have = false;
        long mn = 0;
        for (const auto& l : c)
            for (const auto& t : l.args)
                if (!t.is_var()) {
                    long tg = kb.taxonomy().term_generality(t.name);
                    if (!have || tg < mn) mn = tg;
                    have = true;
                }
        if (have) f.set(15, static_cast<double>(mn));
    }
    if (nlits == 1) f.set(16, static_cast<double>(kb.num_gafs(c[0].pred)));
    if (nlits > 0) {
        std::set<std::string> preds;
        for (const auto& l : c) preds.insert(l.pred);
        long mn = -1;
        for (const auto& p : preds) {
            long ng = kb.num_gafs(p);
            if (mn < 0 || ng < mn) mn = ng;
        }
        f.set(17, static_cast<double>(mn));
    }
    if (nlits == 1 && nfull == 1)
        f.set(18, std::log10(1.0 + static_cast<double>(
                                       kb.taxonomy().term_generality(c[0].pred))));

    // --- transitivity
    {
        long open = 0, open_gd = 0;
        for (const auto& l : c) {
            const std::set<int>* pos = kb.transitive_positions(l.pred);
            for (size_t j = 0; j < l.args.size(); ++j) {
                if (!l.args[j].is_var()) continue;
                if (pos && pos->count(static_cast<int>(j) + 1)) ++open;
                if (l.pred == "genls" || l.pred == "disjointWith") ++open_gd;
            }
        }
        f.set(19, static_cast<double>(open));
        f.set(20, nvars >= 2 ? static_cast<double>(open) : 0);
        f.set(21, static_cast<double>(open_gd));
    }

    // --- probing
    bool want_probe = false;
    for (int i : {22, 23, 24, 25, 26, 28, 29, 41})
        if (needed(i)) want_probe = true;
    bool want_union = needed(27) || needed(38) || needed(40) || want_probe;
    if (want_probe || want_union) {
        ProbeStats ps;
        if (want_probe) {
            ps = probe(g, n, kb, cfg, chooser);
            if (counters) ++counters->probes;
            if (ps.has_stats) {
                f.set(22, ps.mean_tlinks);
                f.set(23, ps.mean_literals);
                f.set(24, ps.median_out_degree);
                f.set(25, ps.max_out_degree);
                f.set(26, ps.median_vars);
                f.set(28, ps.median_depth);
            }
            f.set(29, ps.knuth_estimate);
        } else {
            std::set<int> parents, uni;
            for (int li : n.in_t) parents.insert(g.tlinks[li].from);
            for (int li : n.in_r) parents.insert(g.rlinks[li].from);
            for (int p : parents) {
                for (int li : g.nodes[p].out_t) uni.insert(g.tlinks[li].to);
                for (int li : g.nodes[p].out_r) uni.insert(g.rlinks[li].to);
            }
            ps.parent_successor_union = static_cast<long>(uni.size());
        }
        f.set(27, static_cast<double>(ps.parent_successor_union));
    }

    // --- balance
    if (nlits > 0) f.set(30, static_cast<double>(nvars) / static_cast<double>(nlits));
    f.set(31, static_cast<double>(npos) / (1.0 + static_cast<double>(nneg)));
    f.set(32, std::abs(static_cast<double>(npos) - 1.0));

    // --- quadratics: square of the base, missing when it is
    auto sq = [&](int dst, int src) {
        if (f.has(src)) f.set(dst, f.get(src) * f.get(src));
    };
    sq(33, 2);
    sq(34, 1);
    sq(35, 9);
    sq(36, 10);
    sq(37, 30);
    sq(38, 27);

    // --- interactions: product of factors, missing propagates
    auto prod = [&](int dst, int a, int b) {
        if (f.has(a) && f.has(b)) f.set(dst, f.get(a) * f.get(b));
    };
    prod(39, 9, 10);
    prod(40, 9, 27);
    prod(41, 9, 29);
    prod(42, 4, 19);
    prod(43, 15, 4);
    prod(44, 14, 5);

    // --- misc; 46 (num_answers) is the target, left to the collector
    f.set(45, (nlits == 1 && kb.is_procedural(c[0].pred)) ? 1 : 0);

    if (need)
        for (int i = 1; i <= kNumFeatures; ++i)
            if (!needed(i)) f.clear(i);
    if (counters) counters->fact_scans += kb.fact_scans() - scans0;
    return f;
}

// --------------------------------------------------------------------- csv

std::string feature_csv_header() {
    std::string out;
    const auto& ns = FeatureVector::names();
    for (int i = 0; i < kNumFeatures; ++i) {
        if (i) out += ',';
        out += ns[i];
    }
    return out;
}

std::string feature_csv_row(const FeatureVector& f) {
    std::string out;
    char buf[40];
    for (int i = 1; i <= kNumFeatures; ++i) {
        if (i > 1) out += ',';
        if (f.has(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", f.get(i));
            out += buf;
        }
    }
    return out;
}

FeatureVector feature_row_from_csv(const std::string& line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        size_t p = line.find(',', start);
        cells.push_back(line.substr(start, p == std::string::npos ? p : p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    if (cells.size() != kNumFeatures)
        throw std::runtime_error("feature row needs 46 cells, got " +
                                 std::to_string(cells.size()));
    FeatureVector f;
    for (int i = 1; i <= kNumFeatures; ++i)
        if (!cells[i - 1].empty()) f.set(i, std::strtod(cells[i - 1].c_str(), nullptr));
    return f;
}

}  // namespace ordo
