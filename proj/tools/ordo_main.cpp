#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ordo/bottomup.hpp"
#include "ordo/harness.hpp"

namespace {

using namespace ordo;

struct ConfigFlags {
    double cutoff_secs = 5.0;
    long max_nodes = 50000;
    long max_answers = 0;
    std::uint64_t seed = 0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& cf) {
    cmd->add_option("--cutoff-secs", cf.cutoff_secs,
                    "wall clock cutoff per query; <= 0 disables");
    cmd->add_option("--max-nodes", cf.max_nodes,
                    "created-node budget per query; <= 0 disables");
    cmd->add_option("--max-answers", cf.max_answers,
                    "stop after this many answers; 0 = all");
    cmd->add_option("--seed", cf.seed, "probe / sampling seed");
}

SearchConfig to_config(const ConfigFlags& cf) {
    SearchConfig cfg;
    cfg.cutoff_secs = cf.cutoff_secs;
    cfg.max_nodes = cf.max_nodes;
    cfg.max_answers = cf.max_answers;
    cfg.probe_seed = cf.seed;
    return cfg;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::array<bool, kNumPredictors> parse_mask(const std::string& spec) {
    std::array<bool, kNumPredictors> mask{};
    if (spec == "default") return default_mask();
    if (spec == "all") {
        mask.fill(true);
        return mask;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int f = std::stoi(tok);
        if (f < 1 || f > kNumPredictors)
            throw std::runtime_error("mask feature id out of range: " + tok);
        mask[f - 1] = true;
    }
    return mask;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordo: backward-chaining inference with learned node ordering"};
    app.require_subcommand(1);

    // ---------------------------------------------------------- gen-kb
    auto* gen = app.add_subcommand("gen-kb", "generate a synthetic benchmark suite");
    GenParams gp;
    std::string gen_out = "suite.kb";
    std::string gen_queries = "suite.queries";
    gen->add_option("--out", gen_out, "KB file to write")->capture_default_str();
    gen->add_option("--queries-out", gen_queries, "query file to write")
        ->capture_default_str();
    gen->add_option("--domains", gp.domains)->capture_default_str();
    gen->add_option("--concepts", gp.concepts_per_domain)->capture_default_str();
    gen->add_option("--tax-depth", gp.tax_depth)->capture_default_str();
    gen->add_option("--facts", gp.facts_per_pred)->capture_default_str();
    gen->add_option("--relevant", gp.relevant_rules_per_domain)
        ->capture_default_str();
    gen->add_option("--distractors", gp.distractor_rules_per_domain)
        ->capture_default_str();
    gen->add_option("--queries-per-domain", gp.queries_per_domain)
        ->capture_default_str();
    gen->add_option("--gen-seed", gp.seed, "generator seed")->capture_default_str();

    // ---------------------------------------------------------- train-trees
    auto* train = app.add_subcommand("train-trees", "induce one tree per rule");
    std::string train_kb, train_out = "trees.txt";
    double budget = 2.0;
    long max_tuples = 200;
    train->add_option("--kb", train_kb, "KB file")->required();
    train->add_option("--out", train_out, "tree file to write")
        ->capture_default_str();
    train->add_option("--budget-secs", budget, "per-rule training budget")
        ->capture_default_str();
    train->add_option("--max-tuples", max_tuples)->capture_default_str();

    // ---------------------------------------------------------- collect
    auto* collect = app.add_subcommand("collect", "sample node feature rows");
    std::string col_kb, col_queries, col_out = "dataset.csv";
    double sample_rate = 0.4;
    ConfigFlags col_cf;
    col_cf.cutoff_secs = 0;  // collection defaults to exhaustive runs
    col_cf.max_nodes = 0;
    collect->add_option("--kb", col_kb)->required();
    collect->add_option("--queries", col_queries)->required();
    collect->add_option("--out", col_out)->capture_default_str();
    collect->add_option("--sample-rate", sample_rate)->capture_default_str();
    add_config_flags(collect, col_cf);

    // ---------------------------------------------------------- fit
    auto* fit = app.add_subcommand("fit", "least-squares answerability model");
    std::string fit_data, fit_out = "model.txt", fit_mask = "default";
    bool do_cv = false;
    std::uint64_t fit_seed = 0;
    fit->add_option("--data", fit_data, "dataset csv")->required();
    fit->add_option("--out", fit_out)->capture_default_str();
    fit->add_option("--mask", fit_mask,
                    "'default', 'all', or comma-separated feature ids")
        ->capture_default_str();
    fit->add_flag("--cv", do_cv, "also cross-validate (subsample + 10-fold)");
    fit->add_option("--seed", fit_seed, "cross-validation shuffle seed");

    // ---------------------------------------------------------- select
    auto* sel = app.add_subcommand("select", "subset selection over features");
    std::string sel_data, sel_cands = "all", sel_method = "forward";
    int sel_k = 10;
    sel->add_option("--data", sel_data)->required();
    sel->add_option("--candidates", sel_cands,
                    "'all' or comma-separated feature ids")
        ->capture_default_str();
    sel->add_option("-k,--k", sel_k, "subset size")->capture_default_str();
    sel->add_option("--method", sel_method, "forward | backward | exhaustive")
        ->capture_default_str();

    // ---------------------------------------------------------- query
    auto* q = app.add_subcommand("query", "answer one query");
    std::string q_kb, q_mode = "baseline", q_trees, q_model, q_text;
    Weights q_w;
    ConfigFlags q_cf;
    q->add_option("--kb", q_kb)->required();
    q->add_option("--mode", q_mode, "baseline | dt | sl | dt+sl")
        ->capture_default_str();
    q->add_option("--trees", q_trees, "tree file (dt modes)");
    q->add_option("--model", q_model, "model file (sl modes)");
    q->add_option("--w0", q_w.w0)->capture_default_str();
    q->add_option("--w1", q_w.w1)->capture_default_str();
    q->add_option("--w2", q_w.w2)->capture_default_str();
    q->add_option("query", q_text, "query literals, e.g. \"(rel ?x A)\"")
        ->required();
    add_config_flags(q, q_cf);

    // ---------------------------------------------------------- bench
    auto* bench = app.add_subcommand("bench", "four-mode ablation benchmark");
    std::string b_kb, b_queries, b_modes = "baseline,dt,sl,dt+sl";
    std::string b_trees, b_model, b_out;
    Weights b_w;
    ConfigFlags b_cf;
    bench->add_option("--kb", b_kb)->required();
    bench->add_option("--queries", b_queries)->required();
    bench->add_option("--modes", b_modes)->capture_default_str();
    bench->add_option("--trees", b_trees);
    bench->add_option("--model", b_model);
    bench->add_option("--w0", b_w.w0)->capture_default_str();
    bench->add_option("--w1", b_w.w1)->capture_default_str();
    bench->add_option("--w2", b_w.w2)->capture_default_str();
    bench->add_option("--out", b_out,
                      "report base path; writes <out>.csv and <out>_timing.csv");
    add_config_flags(bench, b_cf);

    // ---------------------------------------------------------- stats
    auto* stats = app.add_subcommand("stats", "success statistics over graphs");
    std::string s_kb, s_queries, s_out;
    int s_limit = 0;
    ConfigFlags s_cf;
    s_cf.cutoff_secs = 0;  // stats default to exhaustive baseline runs
    s_cf.max_nodes = 0;
    stats->add_option("--kb", s_kb)->required();
    stats->add_option("--queries", s_queries)->required();
    stats->add_option("--limit", s_limit, "use only the first N queries; 0 = all");
    stats->add_option("--out", s_out, "also write the tables to a file");
    add_config_flags(stats, s_cf);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            SynthSuite suite = gen_synthetic_kb(gp);
            write_file(gen_out, suite.kb_text);
            save_queries(suite.queries, gen_queries);
            KnowledgeBase kb = load_kb(suite.kb_text);
            long facts = 0;
            for (const auto& p : kb.predicate_names()) facts += kb.num_gafs(p);
            std::cout << "kb: " << gen_out << " (" << facts << " facts, "
                      << kb.all_rules().size() << " rules)\nqueries: "
                      << gen_queries << " (" << suite.queries.size() << ")\n";
        } else if (*train) {
            KnowledgeBase kb = load_kb_file(train_kb);
            TreeTrainingReport rep = train_all_trees(kb, budget, max_tuples);
            save_trees(rep.trees, train_out);
            std::cout << rep.str() << "wrote " << train_out << "\n";
        } else if (*collect) {
            KnowledgeBase kb = load_kb_file(col_kb);
            std::vector<QueryCase> qs = load_queries(col_queries);
            Dataset d =
                collect_dataset(kb, qs, sample_rate, to_config(col_cf), col_cf.seed);
            save_dataset(d, col_out);
            std::cout << "dataset: " << col_out << " (" << d.rows.size()
                      << " rows)\n";
        } else if (*fit) {
            Dataset d = load_dataset(fit_data);
            auto mask = parse_mask(fit_mask);
            RegressionModel m = fit_ols(d, mask);
            save_model(m, fit_out);
            std::cout << "rows: " << d.rows.size() << "\nrmse: " << m.train_rmse
                      << "\nr2: " << m.r2 << "\nadj_r2: " << m.adj_r2
                      << "\nridge_fallback: " << (m.ridge_fallback ? 1 : 0)
                      << "\nwrote " << fit_out << "\n";
            if (do_cv) {
                CvResult sub = cross_validate_subsample(d, mask, 0.9, 50, fit_seed);
                CvResult kf = cross_validate_kfold(d, mask, 10, fit_seed);
                std::cout << "cv subsample rmse: " << sub.mean_rmse
                          << "\ncv 10-fold rmse: " << kf.mean_rmse << "\n";
            }
        } else if (*sel) {
            Dataset d = load_dataset(sel_data);
            std::vector<int> cands;
            if (sel_cands == "all")
                for (int i = 1; i <= kNumPredictors; ++i) cands.push_back(i);
            else
                for (const auto& tok : split_csv(sel_cands))
                    cands.push_back(std::stoi(tok));
            SubsetMethod method;
            if (sel_method == "forward") method = SubsetMethod::forward;
            else if (sel_method == "backward") method = SubsetMethod::backward;
            else if (sel_method == "exhaustive") method = SubsetMethod::exhaustive;
            else throw std::runtime_error("unknown method " + sel_method);
            SubsetResult r = subset_select(d, cands, sel_k, method);
            std::cout << "selected:";
            for (int i = 0; i < kNumPredictors; ++i)
                if (r.mask[i]) std::cout << " " << (i + 1);
            std::cout << "\nr2 curve:";
            for (size_t i = 0; i < r.sizes.size(); ++i)
                std::cout << " " << r.sizes[i] << ":" << r.r2_curve[i];
            std::cout << "\n";
        } else if (*q) {
            KnowledgeBase kb = load_kb_file(q_kb);
            Clause query;
            for (const Sexpr& f : parse_sexprs(q_text))
                query.push_back(parse_literal(f));
            std::map<std::string, DecisionTree> trees;
            RegressionModel model;
            bool has_model = false;
            if (!q_trees.empty()) trees = load_trees(q_trees, &kb);
            if (!q_model.empty()) {
                model = load_model(q_model);
                has_model = true;
            }
            SearchConfig cfg = to_config(q_cf);
            auto mods = make_modules(q_mode, kb, cfg,
                                     q_trees.empty() ? nullptr : &trees,
                                     has_model ? &model : nullptr, q_w);
            SearchResult r = answer_query(kb, query, cfg, mods);
            for (const auto& a : r.answers) std::cout << a.str() << "\n";
            std::cout << r.stats.str();
        } else if (*bench) {
            KnowledgeBase kb = load_kb_file(b_kb);
            std::vector<QueryCase> qs = load_queries(b_queries);
            std::map<std::string, DecisionTree> trees;
            RegressionModel model;
            bool has_model = false;
            if (!b_trees.empty()) trees = load_trees(b_trees, &kb);
            if (!b_model.empty()) {
                model = load_model(b_model);
                has_model = true;
            }
            BenchmarkReport rep = run_benchmark(
                kb, qs, split_csv(b_modes), to_config(b_cf),
                b_trees.empty() ? nullptr : &trees,
                has_model ? &model : nullptr, b_w);
            std::cout << rep.text_table();
            if (!b_out.empty()) {
                write_file(b_out + ".csv", rep.csv());
                write_file(b_out + "_timing.csv", rep.timing_csv());
                std::cout << "wrote " << b_out << ".csv and " << b_out
                          << "_timing.csv\n";
            }
        } else if (*stats) {
            KnowledgeBase kb = load_kb_file(s_kb);
            std::vector<QueryCase> qs = load_queries(s_queries);
            if (s_limit > 0 && static_cast<size_t>(s_limit) < qs.size())
                qs.resize(s_limit);
            SearchConfig cfg = to_config(s_cf);
            std::vector<HeuristicModule> mods{depth_module(1.0)};
            std::vector<std::unique_ptr<Searcher>> runs;
            std::vector<const SearchGraph*> graphs;
            for (const auto& qc : qs) {
                runs.push_back(std::make_unique<Searcher>(kb, qc.query, cfg, mods));
                runs.back()->run();
                graphs.push_back(&runs.back()->graph());
            }
            SuccessStats st = success_stats(graphs);
            std::cout << st.str();
            if (!s_out.empty()) write_file(s_out, st.str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
