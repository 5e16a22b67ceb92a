// Acceptance checks for the inference engine, the learned orderings, and the
// benchmark pipeline. Each criterion prints one [PASS]/[FAIL] line; the
// process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ordo/bottomup.hpp"
#include "ordo/harness.hpp"
#include "rand_kb.hpp"

namespace {

using namespace ordo;
using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixture(const std::string& name) {
    return std::string(ORDO_FIXTURE_DIR) + "/" + name;
}

Literal lit(std::string pred, std::vector<std::string> args, bool pos = true) {
    Literal l;
    l.pred = std::move(pred);
    l.positive = pos;
    for (auto& a : args) l.args.push_back(Term{a});
    return l;
}

Substitution subst(std::vector<std::pair<std::string, std::string>> pairs) {
    Substitution s;
    for (auto& [v, t] : pairs) s.map[v] = Term{t};
    return s;
}

std::set<std::string> answer_set(const std::vector<Substitution>& v) {
    std::set<std::string> out;
    for (const auto& s : v) out.insert(s.str());
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// ---------------------------------------------------------------- criterion 1

// Random layered KBs; with all cutoffs disabled, every ordering mode must
// return exactly the saturation oracle's answer set.
bool crit1(std::string& note) {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20260819);

    // dt runs with an empty tree map (all rules untrained), sl with a hand
    // model over cheap features; both reorder the frontier without being
    // allowed to change what is derivable.
    std::map<std::string, DecisionTree> no_trees;
    RegressionModel scramble;
    for (int i = 0; i < kNumPredictors; ++i) {
        scramble.norm.mean[i] = 0;
        scramble.norm.stdev[i] = 1;
        scramble.norm.count[i] = 5;
    }
    scramble.mask[0] = scramble.mask[4] = scramble.mask[8] = true;
    scramble.w[0] = 0.7;
    scramble.w[4] = -1.3;
    scramble.w[8] = 0.9;
    scramble.intercept = 0.25;

    SearchConfig cfg;
    cfg.cutoff_secs = 0;
    cfg.max_nodes = 0;
    cfg.max_answers = 0;
    // dense fact joins create heavily shared subgoals; dt scoring degrades to
    // zero past this cap instead of aborting, keeping every node's scoring
    // cost small while the typical node is still fully enumerated
    cfg.max_path_sets = 300;

    const char* modes[] = {"baseline", "dt", "sl", "dt+sl"};
    long searches = 0, nonempty = 0;
    for (int trial = 0; trial < 200; ++trial) {
        testgen::RandKb rk = testgen::gen_random_kb(rng);
        KnowledgeBase kb = load_kb(rk.text);
        FactStore store = saturate(kb);
        for (size_t qi = 0; qi < rk.queries.size(); ++qi) {
            auto want = answer_set(bottomup_answers(kb, rk.queries[qi], store));
            if (!want.empty()) ++nonempty;
            for (const char* mode : modes) {
                auto mods = make_modules(mode, kb, cfg, &no_trees, &scramble);
                SearchResult res = answer_query(kb, rk.queries[qi], cfg, mods);
                ++searches;
                if (res.stats.cutoff != "exhausted") {
                    note = "search not exhausted on kb " + std::to_string(trial);
                    return false;
                }
                if (answer_set(res.answers) != want) {
                    note = std::string(mode) + " answers differ from the oracle on kb " +
                           std::to_string(trial) + " query " + std::to_string(qi);
                    return false;
                }
            }
        }
    }
    double secs = secs_since(t0);
    std::ostringstream ss;
    ss << "200 KBs, " << searches << " searches agree with saturation ("
       << nonempty << " nonempty query answer sets, " << std::fixed
       << std::setprecision(1) << secs << "s)";
    note = ss.str();
    if (nonempty < 200) {
        note += "; too few nonempty answer sets for the check to bite";
        return false;
    }
    if (secs >= 300) {
        note += "; over the 5-minute budget";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------- criterion 2

// Brute-force evaluation of the semantic-context score: enumerate every
// root-to-node path through the link DAG, reduce each to its set of
// transformation links, dedupe, and average rule indicators per set.
double brute_context_score(const KnowledgeBase& kb, const SearchGraph& g, int node,
                           const std::map<std::string, DecisionTree>& trees) {
    std::set<std::vector<int>> sets;
    std::vector<int> acc;
    std::function<void(int)> up = [&](int v) {
        if (v == 0) {
            std::vector<int> s = acc;
            std::sort(s.begin(), s.end());
            sets.insert(s);
            return;
        }
        for (int li : g.nodes[v].in_t) {
            acc.push_back(li);
            up(g.tlinks[li].from);
            acc.pop_back();
        }
        for (int li : g.nodes[v].in_r) up(g.rlinks[li].from);
    };
    up(node);

    double total = 0;
    for (const auto& s : sets) {
        if (s.empty()) continue;
        double hits = 0;
        for (int li : s) {
            const TransformationLink& l = g.tlinks[li];
            auto it = trees.find(l.rule->id);
            if (it == trees.end() || satisfies(kb, it->second, l.substitution))
                hits += 1;
        }
        total += hits / double(s.size());
    }
    return total;
}

DecisionTree random_tree(std::mt19937_64& rng, int depth) {
    static const char* concepts[] = {"G0", "G1", "G2", "G3", "Zed"};
    if (depth == 0 || rng() % 3 == 0) return DecisionTree::make_leaf(rng() % 2 == 0);
    RestrictionCondition test{"?v" + std::to_string(rng() % 3),
                              concepts[rng() % 5]};
    return DecisionTree::make_branch(std::move(test), random_tree(rng, depth - 1),
                                     random_tree(rng, depth - 1));
}

bool crit2(std::string& note) {
    KnowledgeBase kb = load_kb(
        "(genls G0 G1)\n(genls G1 G2)\n(genls G2 G3)\n"
        "(isa c0 G0)\n(isa c1 G1)\n(isa c2 G2)\n(isa c3 G3)\n");
    std::mt19937_64 rng(424242);
    static const char* bindings[] = {"c0", "c1", "c2", "c3", "?w"};

    long nodes_checked = 0;
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Rule> rules(8);
        for (int r = 0; r < 8; ++r) rules[r].id = "r" + std::to_string(r);
        std::map<std::string, DecisionTree> trees;
        for (int r = 0; r < 8; ++r)
            if (rng() % 2) trees["r" + std::to_string(r)] = random_tree(rng, 3);

        SearchGraph g;
        int n = 2 + int(rng() % 8);
        g.query = {lit("q", {"?x"})};
        g.add_node(g.query, {}, 0);
        for (int i = 1; i < n; ++i) {
            g.add_node({lit("q", {"?x"})}, {}, 1);
            int parents = 1 + int(rng() % 2 == 0 && i > 1 ? 1 : 0);
            std::set<int> chosen;
            while (int(chosen.size()) < parents) chosen.insert(int(rng() % i));
            for (int p : chosen) {
                if (rng() % 10 < 7) {
                    Substitution rs;
                    for (int v = 0; v < 3; ++v)
                        if (rng() % 2)
                            rs.map["?v" + std::to_string(v)] = Term{bindings[rng() % 5]};
                    g.add_tlink(p, i, &rules[rng() % 8], rs);
                } else {
                    g.add_rlink(p, i, lit("f", {"c0"}), {});
                }
            }
        }

        for (int i = 0; i < n; ++i) {
            double got = f_dt(kb, g, g.nodes[i], trees, 1000000);
            double want = brute_context_score(kb, g, i, trees);
            double diff = std::fabs(got - want);
            worst = std::max(worst, diff);
            ++nodes_checked;
            if (diff > 1e-12 * std::max(1.0, std::fabs(want))) {
                std::ostringstream ss;
                ss << "mismatch on fixture " << trial << " node " << i << ": engine "
                   << got << " vs enumeration " << want;
                note = ss.str();
                return false;
            }
        }
    }
    std::ostringstream ss;
    ss << "100 link DAGs, " << nodes_checked
       << " nodes match exhaustive path enumeration (max abs diff " << std::scientific
       << std::setprecision(2) << worst << ")";
    note = ss.str();
    return true;
}

// ---------------------------------------------------------------- criterion 3

bool crit3(std::string& note) {
    // (a) the geography fixture induces the known three-condition tree
    KnowledgeBase geo = load_kb_file(fixture("geo.kb"));
    const Rule* rule = geo.rule_by_id("rule-2");
    TrainingSet ts = generate_training_set(geo, *rule, 0, 0);
    std::vector<std::string> vars;
    for (const Term& t : rule->vars()) vars.push_back(t.name);
    std::vector<int> accepted;
    DecisionTree tree = create_tree(geo, ts, vars, kStopFraction, &accepted);
    const char* expected =
        "(branch ?ARG2 GeopoliticalEntity"
        " (branch ?OTHER GeographicalRegion"
        " (branch ?ARG1 TerrestrialFunctioningObject (leaf accept) (leaf reject))"
        " (leaf reject)) (leaf reject))";
    if (tree.str() != expected) {
        note = "geo tree came out as " + tree.str();
        return false;
    }
    if (accepted != std::vector<int>{0, 1, 2}) {
        note = "geo tree did not accept exactly its three training tuples";
        return false;
    }

    // (b) on planted-sort training sets, the accept leaves and the walk agree
    std::mt19937_64 rng(20260819);
    long tuples_checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int groups = 2 + int(rng() % 3);
        int per = 2 + int(rng() % 4);
        std::string text;
        for (int g = 0; g < groups; ++g) {
            text += "(generality P" + std::to_string(g) + " " + std::to_string(per) +
                    ")\n";
            for (int e = 0; e < per; ++e)
                text += "(isa n" + std::to_string(g) + "x" + std::to_string(e) + " P" +
                        std::to_string(g) + ")\n";
        }
        KnowledgeBase kb = load_kb(text);

        TrainingSet planted;
        planted.rule_id = "r";
        int n = 5 + int(rng() % 21);
        for (int i = 0; i < n; ++i) {
            auto ent = [&] {
                return "n" + std::to_string(rng() % groups) + "x" +
                       std::to_string(rng() % per);
            };
            planted.tuples.push_back(subst({{"?a", ent()}, {"?b", ent()}}));
        }
        std::vector<int> acc;
        DecisionTree t2 = create_tree(kb, planted, {"?a", "?b"}, 0.3, &acc);
        std::set<int> acc_set(acc.begin(), acc.end());
        for (int i = 0; i < n; ++i) {
            ++tuples_checked;
            if (satisfies(kb, t2, planted.tuples[i]) != (acc_set.count(i) == 1)) {
                note = "tuple " + std::to_string(i) + " of planted set " +
                       std::to_string(trial) + " disagrees with its leaf label";
                return false;
            }
        }
    }
    std::ostringstream ss;
    ss << "worked-example tree reproduced; " << tuples_checked
       << " planted tuples land on the leaf that labeled them (50 sets)";
    note = ss.str();
    return true;
}

// ---------------------------------------------------------------- criterion 4

struct ProbeRun {
    std::vector<size_t> degrees;  // branching seen at each chooser call
    double estimate = 1;
};

ProbeRun run_probe_script(const KnowledgeBase& kb, const Clause& root,
                          const std::vector<size_t>& script) {
    SearchGraph g;
    g.query = root;
    g.add_node(root, {}, 0);
    ProbeRun out;
    size_t idx = 0;
    ProbeChooser ch = [&](size_t deg) {
        out.degrees.push_back(deg);
        size_t pick = idx < script.size() ? script[idx] : 0;
        ++idx;
        return pick;
    };
    SearchConfig cfg;
    ProbeStats st = probe(g, g.nodes[0], kb, cfg, &ch);
    out.estimate = st.knuth_estimate;
    return out;
}

bool crit4(std::string& note) {
    struct Fix {
        const char* name;
        const char* kb;
        long nodes;     // true node count of the tree below the root
        bool uniform;   // every probe must return the exact count
    };
    const Fix fixtures[] = {
        {"binary7",
         "(rule b1 (ante (u1 ?x)) (conseq (t0 ?x)))\n"
         "(rule b2 (ante (u2 ?x)) (conseq (t0 ?x)))\n"
         "(rule b3 (ante (v1 ?x)) (conseq (u1 ?x)))\n"
         "(rule b4 (ante (v2 ?x)) (conseq (u1 ?x)))\n"
         "(rule b5 (ante (v3 ?x)) (conseq (u2 ?x)))\n"
         "(rule b6 (ante (v4 ?x)) (conseq (u2 ?x)))\n",
         7, true},
        {"chain4",
         "(rule c1 (ante (t1 ?x)) (conseq (t0 ?x)))\n"
         "(rule c2 (ante (t2 ?x)) (conseq (t1 ?x)))\n"
         "(rule c3 (ante (t3 ?x)) (conseq (t2 ?x)))\n",
         4, true},
        {"skew5",
         "(rule s1 (ante (sa ?x)) (conseq (t0 ?x)))\n"
         "(rule s2 (ante (sb ?x)) (conseq (t0 ?x)))\n"
         "(rule s3 (ante (sc ?x)) (conseq (sb ?x)))\n"
         "(rule s4 (ante (sd ?x)) (conseq (sb ?x)))\n",
         5, false},
        {"asym10",
         "(rule a1 (ante (ma ?x)) (conseq (t0 ?x)))\n"
         "(rule a2 (ante (mb ?x)) (conseq (t0 ?x)))\n"
         "(rule a3 (ante (mc ?x)) (conseq (t0 ?x)))\n"
         "(rule a4 (ante (mb1 ?x)) (conseq (mb ?x)))\n"
         "(rule a5 (ante (mb2 ?x)) (conseq (mb ?x)))\n"
         "(rule a6 (ante (mc1 ?x)) (conseq (mc ?x)))\n"
         "(rule a7 (ante (mcx ?x)) (conseq (mc1 ?x)))\n"
         "(rule a8 (ante (mcy ?x)) (conseq (mc1 ?x)))\n"
         "(rule a9 (ante (mcz ?x)) (conseq (mc1 ?x)))\n",
         10, false},
        {"dead1", "(fact (w c))\n", 1, true},
    };

    std::ostringstream info;
    for (const Fix& fx : fixtures) {
        KnowledgeBase kb = load_kb(fx.kb);
        Clause root{lit(fx.name == std::string("dead1") ? "z" : "t0", {"?x"})};

        long nodes = 0;
        double expectation = 0, prob_sum = 0;
        std::function<void(std::vector<size_t>&)> dfs =
            [&](std::vector<size_t>& prefix) {
                ++nodes;  // each dfs entry is one distinct tree node
                ProbeRun r = run_probe_script(kb, root, prefix);
                if (r.degrees.size() == prefix.size()) {
                    // walk ended exactly here: `prefix` is one complete path
                    double p = 1;
                    for (size_t i = 0; i < prefix.size(); ++i)
                        p /= double(r.degrees[i]);
                    expectation += p * r.estimate;
                    prob_sum += p;
                    if (fx.uniform && r.estimate != double(fx.nodes))
                        throw std::runtime_error(std::string(fx.name) +
                                                 ": non-exact estimate on a uniform tree");
                    return;
                }
                size_t deg = r.degrees[prefix.size()];
                for (size_t c = 0; c < deg; ++c) {
                    prefix.push_back(c);
                    dfs(prefix);
                    prefix.pop_back();
                }
            };
        std::vector<size_t> prefix;
        dfs(prefix);

        if (nodes != fx.nodes) {
            note = std::string(fx.name) + ": fixture has " + std::to_string(nodes) +
                   " nodes, expected " + std::to_string(fx.nodes);
            return false;
        }
        if (std::fabs(prob_sum - 1.0) > 1e-12) {
            note = std::string(fx.name) + ": path probabilities sum to " +
                   std::to_string(prob_sum);
            return false;
        }
        if (std::fabs(expectation - double(fx.nodes)) > 1e-9) {
            std::ostringstream ss;
            ss << fx.name << ": E[estimate] = " << std::setprecision(15) << expectation
               << " but the tree has " << fx.nodes << " nodes";
            note = ss.str();
            return false;
        }
        info << fx.name << "=" << fx.nodes << " ";
    }
    note = "estimator unbiased on every fixture (" + info.str() +
           "), exact on uniform trees";
    return true;
}

// ---------------------------------------------------------------- criterion 5

DataRow make_row(std::vector<std::pair<int, double>> feats, double target_y) {
    DataRow r;
    for (auto& [f, v] : feats) r.x.set(f, v);
    r.x.set(46, std::pow(10.0, target_y) - 1.0);  // so the transformed target == y
    return r;
}

bool crit5(std::string& note) {
    // (a) two-predictor fit vs hand-solved normal equations
    Dataset d;
    std::vector<double> x1{1, 2, 3, 4, 5}, x2{2, 1, 4, 3, 6}, y{1.3, 1.1, 2.4, 1.9, 3.2};
    for (int i = 0; i < 5; ++i)
        d.rows.push_back(make_row({{1, x1[i]}, {2, x2[i]}}, y[i]));
    std::array<bool, kNumPredictors> mask{};
    mask[0] = mask[1] = true;
    RegressionModel m = fit_ols(d, mask);

    NormalizationStats st = compute_normalization(d, mask);
    double ybar = (1.3 + 1.1 + 2.4 + 1.9 + 3.2) / 5.0;
    double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0;
    for (int i = 0; i < 5; ++i) {
        double z1 = st.z(1, d.rows[i].x), z2 = st.z(2, d.rows[i].x);
        s11 += z1 * z1;
        s12 += z1 * z2;
        s22 += z2 * z2;
        s1y += z1 * (y[i] - ybar);
        s2y += z2 * (y[i] - ybar);
    }
    double det = s11 * s22 - s12 * s12;
    double w1 = (s22 * s1y - s12 * s2y) / det;
    double w2 = (s11 * s2y - s12 * s1y) / det;
    if (std::fabs(m.w[0] - w1) > 1e-6 || std::fabs(m.w[1] - w2) > 1e-6 ||
        std::fabs(m.intercept - ybar) > 1e-6) {
        note = "normal-equation solution differs from the fitted weights";
        return false;
    }

    // (b) noiseless linear data cross-validates to ~zero under both schemes
    Dataset lin;
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 60; ++i) {
        double a = u(rng), b = u(rng), c = u(rng);
        lin.rows.push_back(
            make_row({{1, a}, {2, b}, {3, c}}, 2.5 + 1.2 * a - 0.8 * b + 0.3 * c));
    }
    std::array<bool, kNumPredictors> lmask{};
    lmask[0] = lmask[1] = lmask[2] = true;
    CvResult sub = cross_validate_subsample(lin, lmask, 0.7, 20, 99);
    CvResult kf = cross_validate_kfold(lin, lmask, 10, 99);
    if (sub.mean_rmse >= 1e-9 || kf.mean_rmse >= 1e-9) {
        std::ostringstream ss;
        ss << "noiseless CV rmse not ~0: subsample " << sub.mean_rmse << ", 10-fold "
           << kf.mean_rmse;
        note = ss.str();
        return false;
    }

    // (c) exhaustive subset selection recovers a planted three-feature model
    Dataset planted;
    for (int i = 0; i < 40; ++i) {
        std::vector<std::pair<int, double>> feats;
        std::array<double, 11> v{};
        for (int f = 1; f <= 10; ++f) {
            v[f] = u(rng);
            feats.push_back({f, v[f]});
        }
        planted.rows.push_back(
            make_row(feats, 0.8 + 1.5 * v[2] - 2.0 * v[5] + 0.75 * v[9]));
    }
    std::vector<int> cands{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    SubsetResult sel = subset_select(planted, cands, 3, SubsetMethod::exhaustive);
    std::array<bool, kNumPredictors> want{};
    want[1] = want[4] = want[8] = true;  // features 2, 5, 9
    if (sel.mask != want) {
        note = "exhaustive subset selection missed the planted features {2,5,9}";
        return false;
    }

    std::ostringstream ss;
    ss << "normal equations match to 1e-6; CV rmse " << std::scientific
       << std::setprecision(1) << sub.mean_rmse << "/" << kf.mean_rmse
       << "; planted {2,5,9} recovered exhaustively";
    note = ss.str();
    return true;
}

// ------------------------------------------------------- shared desk pipeline

struct Pipeline {
    SynthSuite suite;   // 5-domain benchmark suite
    KnowledgeBase kb;
    TreeTrainingReport trees;
    SynthSuite tsuite;  // separate 2-domain suite for model training
    KnowledgeBase tkb;
    TreeTrainingReport ttrees;
    Dataset data;
    RegressionModel model;
    double build_secs = 0;
};

std::unique_ptr<Pipeline> build_pipeline() {
    auto t0 = Clock::now();
    auto P = std::make_unique<Pipeline>();

    GenParams gp;  // stock scale: 5 domains, 120 queries
    gp.seed = 11;
    P->suite = gen_synthetic_kb(gp);
    P->kb = load_kb(P->suite.kb_text);
    P->trees = train_all_trees(P->kb, 0.5, 60);

    GenParams tp = gp;
    tp.seed = 101;
    tp.domains = 2;
    tp.queries_per_domain = 12;
    P->tsuite = gen_synthetic_kb(tp);
    P->tkb = load_kb(P->tsuite.kb_text);
    P->ttrees = train_all_trees(P->tkb, 0.5, 60);

    SearchConfig ccfg;
    ccfg.cutoff_secs = 2;
    ccfg.max_nodes = 5000;
    ccfg.probe_seed = 5;
    P->data = collect_dataset(P->tkb, P->tsuite.queries, 0.05, ccfg, 5);
    P->model = fit_ols(P->data, default_mask());

    P->build_secs = secs_since(t0);
    return P;
}

// ---------------------------------------------------------------- criterion 6

bool crit6(Pipeline& P, std::string& note) {
    auto t0 = Clock::now();
    SearchConfig cfg;  // stock cutoffs: 5 s wall clock, 50000-node budget
    cfg.probe_seed = 7;
    BenchmarkReport rep =
        run_benchmark(P.kb, P.suite.queries, {"baseline", "dt", "sl", "dt+sl"}, cfg,
                      &P.trees.trees, &P.model);

    // (a) per-query node halving, dt vs baseline
    std::map<std::string, long> base_nodes, dt_nodes;
    for (const auto& o : rep.outcomes) {
        if (o.mode == "baseline") base_nodes[o.query_id] = o.nodes_expanded;
        if (o.mode == "dt") dt_nodes[o.query_id] = o.nodes_expanded;
    }
    long halved = 0, paired = 0;
    for (const auto& [qid, b] : base_nodes) {
        auto it = dt_nodes.find(qid);
        if (it == dt_nodes.end()) continue;
        ++paired;
        if (2 * it->second <= b) ++halved;
    }

    // (b) answered percentages over the whole suite
    std::map<std::string, const ModeRow*> all;
    for (const auto& r : rep.rows)
        if (r.set == "all") all[r.mode] = &r;
    for (const char* mode : {"baseline", "dt", "sl", "dt+sl"})
        if (!all.count(mode)) {
            note = std::string("missing aggregate row for ") + mode;
            return false;
        }
    double pb = all["baseline"]->pct_answered, pd = all["dt"]->pct_answered,
           ps = all["sl"]->pct_answered, px = all["dt+sl"]->pct_answered;

    // (c) end-to-end wall-clock speedup of the combined mode
    double speedup = all["dt+sl"]->speedup;

    double bench_secs = secs_since(t0);
    double total_secs = P.build_secs + bench_secs;
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1) << P.suite.queries.size() << " queries; "
       << "halved nodes on " << halved << "/" << paired << "; answered % base/dt/sl/both "
       << pb << "/" << pd << "/" << ps << "/" << px << "; dt+sl speedup "
       << std::setprecision(2) << speedup << "x; " << std::setprecision(0)
       << P.trees.untrained.size() << " untrained rules, " << P.data.rows.size()
       << " training rows; " << std::setprecision(1) << total_secs << "s total";
    note = ss.str();

    if (int(P.suite.queries.size()) < 100) {
        note += "; needs at least 100 queries";
        return false;
    }
    if (halved * 5 < paired * 4) {
        note += "; node halving below 80%";
        return false;
    }
    if (!(px >= pd - 1e-9 && px >= ps - 1e-9 && pd >= pb - 1e-9 && ps >= pb - 1e-9)) {
        note += "; answered ordering violated";
        return false;
    }
    if (speedup < 2.0) {
        note += "; combined speedup under 2x";
        return false;
    }
    if (total_secs > 1800) {
        note += "; over the 30-minute budget";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------- criterion 7

bool crit7(Pipeline& P, std::string& note) {
    SearchConfig cfg;
    cfg.cutoff_secs = 0;  // node budget only, so the corpus is deterministic
    cfg.max_nodes = 20000;

    std::vector<long> dn, ds, ln, ls;
    auto add = [](std::vector<long>& dst, const std::vector<long>& src) {
        if (src.size() > dst.size()) dst.resize(src.size(), 0);
        for (size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
    };
    for (const auto& qc : P.suite.queries) {
        Searcher s(P.kb, qc.query, cfg, {depth_module()});
        s.run();
        SuccessStats st = success_stats({&s.graph()});
        add(dn, st.depth_nodes);
        add(ds, st.depth_success);
        add(ln, st.lit_nodes);
        add(ls, st.lit_success);
    }

    if (dn.size() < 6) {
        note = "corpus graphs never reach depth 5";
        return false;
    }
    std::ostringstream ss;
    ss << "P(success|depth) =";
    double prev = 2;
    for (int d = 0; d <= 5; ++d) {
        if (dn[d] == 0) {
            note = "no nodes at depth " + std::to_string(d);
            return false;
        }
        double p = double(ds[d]) / double(dn[d]);
        ss << " " << std::fixed << std::setprecision(4) << p;
        if (p > prev + 1e-12) {
            note = ss.str() + " -- not non-increasing at depth " + std::to_string(d);
            return false;
        }
        prev = p;
    }
    if (ln.size() < 3 || ln[1] == 0 || ln[2] == 0) {
        note = "missing one- or two-literal clause populations";
        return false;
    }
    double p1 = double(ls[1]) / double(ln[1]);
    double p2 = double(ls[2]) / double(ln[2]);
    ss << "; P(success|1 lit) " << std::setprecision(4) << p1 << " vs 2 lits " << p2;
    note = ss.str();
    if (!(p1 > p2)) {
        note += " -- single-literal clauses not more promising";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------- criterion 8

bool crit8(Pipeline& P, std::string& note) {
    spit("acc8.kb", P.tsuite.kb_text);
    save_queries(P.tsuite.queries, "acc8.queries");
    save_trees(P.ttrees.trees, "acc8.trees");
    save_model(P.model, "acc8.model");

    const std::string common =
        std::string(ORDO_CLI_PATH) +
        " bench --kb acc8.kb --queries acc8.queries --trees acc8.trees"
        " --model acc8.model --modes baseline,dt,sl,dt+sl"
        " --cutoff-secs 0 --max-nodes 4000 --seed 17 --out ";
    for (const char* run : {"acc8_run1", "acc8_run2"}) {
        std::string cmd = common + run + " > " + run + ".log 2>&1";
        int rc = std::system(cmd.c_str());
        if (rc != 0) {
            note = std::string("bench run ") + run + " exited with code " +
                   std::to_string(rc);
            return false;
        }
    }
    std::string a = slurp("acc8_run1.csv"), b = slurp("acc8_run2.csv");
    if (a.empty() || a.rfind("set,mode,", 0) != 0) {
        note = "first bench run produced no usable csv";
        return false;
    }
    if (a != b) {
        note = "csv reports differ between identically-seeded runs";
        return false;
    }

    // the same benchmark through the library reproduces the file bytes
    KnowledgeBase kb8 = load_kb_file("acc8.kb");
    auto qs8 = load_queries("acc8.queries");
    auto trees8 = load_trees("acc8.trees", &kb8);
    RegressionModel model8 = load_model("acc8.model");
    SearchConfig cfg8;
    cfg8.cutoff_secs = 0;
    cfg8.max_nodes = 4000;
    cfg8.probe_seed = 17;
    BenchmarkReport rep =
        run_benchmark(kb8, qs8, {"baseline", "dt", "sl", "dt+sl"}, cfg8, &trees8,
                      &model8);
    if (rep.csv() != a) {
        note = "library-level report bytes differ from the command-line report";
        return false;
    }
    std::ostringstream ss;
    ss << "two seeded bench runs byte-identical (" << a.size()
       << " csv bytes), library run matches";
    note = ss.str();
    return true;
}

}  // namespace

int main() {
    std::printf("acceptance: inference engine, learned orderings, pipeline\n");
    int failed = 0;
    auto run = [&](int id, const char* name,
                   const std::function<bool(std::string&)>& fn) {
        std::string detail;
        bool ok = false;
        try {
            ok = fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %d %s%s%s\n", ok ? "PASS" : "FAIL", id, name,
                    detail.empty() ? "" : ": ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    };

    run(1, "every ordering mode matches the saturation oracle", crit1);
    run(2, "semantic-context score equals brute-force path enumeration", crit2);
    run(3, "tree induction reproduces worked example and planted sorts", crit3);
    run(4, "tree-size estimator is exact on uniform trees and unbiased", crit4);
    run(5, "least-squares fit, cross-validation, and subset selection", crit5);

    std::unique_ptr<Pipeline> pipe;
    std::string pipe_err;
    try {
        pipe = build_pipeline();
    } catch (const std::exception& e) {
        pipe_err = e.what();
    }
    auto need_pipe = [&](const std::function<bool(Pipeline&, std::string&)>& fn) {
        return [&pipe, &pipe_err, fn](std::string& detail) {
            if (!pipe) {
                detail = "pipeline build failed: " + pipe_err;
                return false;
            }
            return fn(*pipe, detail);
        };
    };
    run(6, "learned orderings answer more queries with fewer nodes",
        need_pipe(crit6));
    run(7, "success rates fall with depth and clause size", need_pipe(crit7));
    run(8, "benchmark reports are byte-identical across seeded runs",
        need_pipe(crit8));

    std::printf("acceptance: %d/8 criteria passed\n", 8 - failed);
    return failed == 0 ? 0 : 1;
}
