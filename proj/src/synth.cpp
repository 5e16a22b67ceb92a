#include "ordo/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ordo/bottomup.hpp"
#include "ordo/sexpr.hpp"

namespace ordo {

namespace {

size_t pick(std::mt19937_64& rng, size_t n) {
    return static_cast<size_t>(rng() % n);
}

// Distinct (lhs, rhs) pairs in draw order. cover_rhs forces every rhs value
// to appear at least once so benchmark targets are always reachable;
// cover_lhs does the same on the left so join-style training queries are
// guaranteed to meet the tuple threshold.
std::vector<std::pair<std::string, std::string>> draw_pairs(
    std::mt19937_64& rng, const std::vector<std::string>& lhs,
    const std::vector<std::string>& rhs, int want, bool cover_rhs,
    bool cover_lhs = false) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::pair<std::string, std::string>> seen;
    auto add = [&](std::pair<std::string, std::string> pr) {
        if (seen.insert(pr).second) out.push_back(std::move(pr));
    };
    if (cover_rhs)
        for (const auto& r : rhs) add({lhs[pick(rng, lhs.size())], r});
    if (cover_lhs)
        for (const auto& l : lhs) add({l, rhs[pick(rng, rhs.size())]});
    size_t cap = lhs.size() * rhs.size();
    size_t goal = std::min(static_cast<size_t>(want), cap);
    for (int attempts = 0; out.size() < goal && attempts < want * 40; ++attempts)
        add({lhs[pick(rng, lhs.size())], rhs[pick(rng, rhs.size())]});
    return out;
}

}  // namespace

SynthSuite gen_synthetic_kb(const GenParams& p) {
    if (p.domains < 1 || p.concepts_per_domain < 1 || p.tax_depth < 1 ||
        p.facts_per_pred < 2 || p.relevant_rules_per_domain < 1 ||
        p.distractor_rules_per_domain < 0 || p.queries_per_domain < 1)
        throw std::invalid_argument("gen_synthetic_kb: bad params");

    std::mt19937_64 rng(p.seed);

    // cascade layout from the distractor budget: W entry rules into an
    // L-level cascade, b rules per step predicate
    const int b = 3;
    int W = 0, L = 0;
    if (p.distractor_rules_per_domain > 0) {
        W = std::min(6, p.distractor_rules_per_domain);
        L = 1 + (p.distractor_rules_per_domain - W) / (W * b);
    }
    const int HL = std::max(2, L);  // hard chains run as deep as the cascade
    const int nH = (p.relevant_rules_per_domain - 1) / HL;
    const int nE = p.relevant_rules_per_domain - nH * HL;

    const int nPool = std::max(6, p.facts_per_pred);
    const int nMain = std::max(4, p.facts_per_pred / 2);
    const int nTgt = 3;

    int leaves = (p.concepts_per_domain - 1 - 4 * p.tax_depth) / 4;
    if (leaves < 1) leaves = 1;

    std::ostringstream tax;    // taxonomy + facts, per domain
    std::ostringstream dstr;   // distractor rules, all domains
    std::ostringstream rstr;   // relevant rules, all domains (emitted last)

    tax << "; synthetic distractor benchmark (seed " << p.seed << ")\n";
    long all_ents = static_cast<long>(p.domains) * (nPool + nMain + 2 * nTgt);
    tax << "(generality Thing " << all_ents + 500 << ")\n";

    std::vector<std::vector<std::string>> te_by_dom, th_by_dom;

    auto emit_facts = [&tax](const std::string& pred, const auto& pairs) {
        for (const auto& pr : pairs)
            tax << "(fact (" << pred << " " << pr.first << " " << pr.second
                << "))\n";
    };

    for (int d = 0; d < p.domains; ++d) {
        const std::string D = std::to_string(d);
        const std::string dom = "Dom" + D;
        tax << "(genls " << dom << " Thing)\n";
        long dom_ents = nPool + nMain + 2 * nTgt;
        tax << "(generality " << dom << " " << dom_ents + 50 << ")\n";

        // a concept chain per entity group, leaves at the bottom
        auto make_group = [&](const std::string& g,
                              const std::vector<std::string>& ents) {
            std::vector<std::string> chain;
            for (int c = 0; c < p.tax_depth; ++c)
                chain.push_back(c == 0 ? g : g + "n" + std::to_string(c));
            for (int c = 0; c < p.tax_depth; ++c) {
                tax << "(genls " << chain[c] << " "
                    << (c == 0 ? dom : chain[c - 1]) << ")\n";
                tax << "(generality " << chain[c] << " "
                    << static_cast<long>(ents.size()) + 2 * (p.tax_depth - c)
                    << ")\n";
            }
            int nl = std::min<int>(leaves, static_cast<int>(ents.size()));
            std::vector<int> leaf_count(nl, 0);
            for (size_t k = 0; k < ents.size(); ++k)
                ++leaf_count[k % nl];
            for (int j = 0; j < nl; ++j) {
                std::string leaf = g + "L" + std::to_string(j);
                tax << "(genls " << leaf << " " << chain.back() << ")\n";
                tax << "(generality " << leaf << " " << leaf_count[j] << ")\n";
            }
            for (size_t k = 0; k < ents.size(); ++k)
                tax << "(isa " << ents[k] << " " << g << "L" << (k % nl)
                    << ")\n";
        };

        auto ent_names = [&D](const std::string& pre, int n) {
            std::vector<std::string> v;
            for (int k = 0; k < n; ++k)
                v.push_back(pre + D + "x" + std::to_string(k));
            return v;
        };
        std::vector<std::string> pool = ent_names("p", nPool);
        std::vector<std::string> mains = ent_names("m", nMain);
        std::vector<std::string> te = ent_names("te", nTgt);
        std::vector<std::string> th = ent_names("th", nTgt);
        make_group("PoolC" + D, pool);
        make_group("MainC" + D, mains);
        make_group("TgtEC" + D, te);
        make_group("TgtHC" + D, th);
        te_by_dom.push_back(te);
        th_by_dom.push_back(th);

        // distractor cascade: every rule guarded by its own pc predicate so
        // distinct rule choices yield distinct clauses; guard and tail facts
        // stay inside the pool, so every antecedent is satisfiable but no
        // cascade path reaches a query target
        if (W > 0) {
            for (int i = 0; i < W; ++i) {
                std::string guard = "pc" + D + "e" + std::to_string(i);
                emit_facts(guard, draw_pairs(rng, pool, pool, p.facts_per_pred,
                                             false));
                dstr << "(rule dr" << D << "e" << i << " (ante (" << guard
                     << " ?x ?u) (ds" << D << "_1_" << i
                     << " ?u ?y)) (conseq (rel ?x ?y)))\n";
            }
            for (int j = 1; j < L; ++j)
                for (int i = 0; i < W; ++i)
                    for (int t = 0; t < b; ++t) {
                        std::string sfx = D + "_" + std::to_string(j) + "_" +
                                          std::to_string(i) + "_" +
                                          std::to_string(t);
                        std::string guard = "pc" + sfx;
                        emit_facts(guard, draw_pairs(rng, pool, pool,
                                                     p.facts_per_pred, false));
                        dstr << "(rule dr" << sfx << " (ante (" << guard
                             << " ?x ?u) (ds" << D << "_" << (j + 1) << "_"
                             << ((i + t) % W) << " ?u ?y)) (conseq (ds" << D
                             << "_" << j << "_" << i << " ?x ?y)))\n";
                    }
            // every cascade level keeps direct pool facts: rule antecedents
            // then join to answers in a few waves (trainable trees) while a
            // bound non-pool target still matches nothing
            for (int j = 1; j <= L; ++j)
                for (int i = 0; i < W; ++i)
                    emit_facts("ds" + D + "_" + std::to_string(j) + "_" +
                                   std::to_string(i),
                               draw_pairs(rng, pool, pool, p.facts_per_pred,
                                          false, true));
        }

        // relevant rules: depth-1 easy rules onto te targets, depth-HL
        // chains onto th targets
        for (int e = 0; e < nE; ++e) {
            std::string pred = "rb" + D + "_" + std::to_string(e);
            emit_facts(pred, draw_pairs(rng, mains, te, p.facts_per_pred, true));
            rstr << "(rule rr" << D << "e" << e << " (ante (" << pred
                 << " ?x ?y)) (conseq (rel ?x ?y)))\n";
        }
        for (int h = 0; h < nH; ++h) {
            std::string base = "rs" + D + "_" + std::to_string(h) + "_";
            emit_facts(base + std::to_string(HL),
                       draw_pairs(rng, mains, th, p.facts_per_pred, true));
            rstr << "(rule rr" << D << "h" << h << " (ante (" << base
                 << "1 ?x ?y)) (conseq (rel ?x ?y)))\n";
            for (int j = 1; j < HL; ++j)
                rstr << "(rule rr" << D << "h" << h << "_" << j << " (ante ("
                     << base << (j + 1) << " ?x ?y)) (conseq (" << base << j
                     << " ?x ?y)))\n";
        }
    }

    SynthSuite suite;
    suite.kb_text = tax.str() + dstr.str() + rstr.str();

    // oracle labels: one saturation shared across all queries
    KnowledgeBase loaded = load_kb(suite.kb_text);
    FactStore store = saturate(loaded);

    for (int d = 0; d < p.domains; ++d) {
        int ei = 0, hi = 0;
        for (int q = 0; q < p.queries_per_domain; ++q) {
            bool easy = (q % 5) < 2;
            const std::string& tg = easy ? te_by_dom[d][ei++ % nTgt]
                                         : th_by_dom[d][hi++ % nTgt];
            QueryCase qc;
            char num[8];
            std::snprintf(num, sizeof num, "%03d", q);
            qc.id = "q" + std::to_string(d) + "_" + num;
            qc.cls = easy ? "easy" : "hard";
            qc.domain = "dom" + std::to_string(d);
            qc.set = d % 3;
            qc.query = {Literal{"rel", {Term{"?x"}, Term{tg}}, true}};
            qc.oracle_answers = static_cast<long>(
                bottomup_answers(loaded, qc.query, store).size());
            suite.queries.push_back(std::move(qc));
        }
    }
    return suite;
}

void save_queries(const std::vector<QueryCase>& qs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw KbError("cannot write query file: " + path);
    for (const auto& q : qs) {
        out << "(query " << q.id << " " << q.cls << " " << q.domain << " "
            << q.set << " (";
        for (size_t i = 0; i < q.query.size(); ++i)
            out << (i ? " " : "") << q.query[i].str();
        out << "))\n";
    }
    for (const auto& q : qs)
        out << "(answers " << q.id << " " << q.oracle_answers << ")\n";
}

std::vector<QueryCase> load_queries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw KbError("cannot read query file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::vector<Sexpr> forms = parse_sexprs(buf.str());

    std::vector<QueryCase> out;
    std::map<std::string, size_t> by_id;
    for (const auto& f : forms) {
        if (f.head() == "query") {
            if (f.size() != 6 || f.at(5).is_atom)
                throw ParseError("query takes id, class, domain, set, clause",
                                 f.line);
            QueryCase qc;
            qc.id = f.at(1).atom;
            qc.cls = f.at(2).atom;
            qc.domain = f.at(3).atom;
            qc.set = std::stoi(f.at(4).atom);
            for (size_t i = 0; i < f.at(5).size(); ++i)
                qc.query.push_back(parse_literal(f.at(5).at(i)));
            if (qc.query.empty())
                throw ParseError("empty query clause", f.line);
            if (by_id.count(qc.id))
                throw KbError("duplicate query id '" + qc.id + "'");
            by_id[qc.id] = out.size();
            out.push_back(std::move(qc));
        } else if (f.head() == "answers") {
            if (f.size() != 3)
                throw ParseError("answers takes id and count", f.line);
            auto it = by_id.find(f.at(1).atom);
            if (it == by_id.end())
                throw KbError("answers for unknown query '" + f.at(1).atom +
                              "'");
            out[it->second].oracle_answers = std::stol(f.at(2).atom);
        } else {
            throw ParseError("expected (query ...) or (answers ...)", f.line);
        }
    }
    return out;
}

}  // namespace ordo
