#pragma once

#include <cstdint>

#include "ordo/kb.hpp"

namespace ordo {

/// Knobs for the synthetic benchmark generator. Everything downstream of the
/// seed is deterministic: the same params produce byte-identical KB and query
/// files.
struct GenParams {
    int domains = 5;
    int concepts_per_domain = 21;   // taxonomy size per domain (chains + leaves)
    int tax_depth = 3;              // genls-chain length between domain root and leaves
    int facts_per_pred = 12;        // ground facts per base predicate
    int relevant_rules_per_domain = 17;    // nH hard chains of length HL + nE easy rules
    int distractor_rules_per_domain = 132; // realized as W entries + W*b*(L-1) cascade rules
    int queries_per_domain = 24;    // ~40% easy / 60% hard
    std::uint64_t seed = 1;
};

/// One benchmark query: id, difficulty class, owning domain, test-set index,
/// the query clause, and the ground-truth answer count from the bottom-up
/// evaluator.
struct QueryCase {
    std::string id;
    std::string cls;     // "easy" | "hard"
    std::string domain;  // "dom<d>"
    int set = 0;         // test-set index (domain mod 3)
    Clause query;
    long oracle_answers = 0;
};

struct SynthSuite {
    std::string kb_text;             // full KB file contents
    std::vector<QueryCase> queries;  // oracle-labeled query suite
};

/// Generate the distractor-cascade benchmark suite. Per domain: a taxonomy of
/// four concept groups (pool / main / easy targets / hard targets) hanging off
/// a shared root, entity pools typed at the leaves, a branching cascade of
/// distractor rules whose guard facts stay inside the pool (every rule
/// satisfiable, no path to a target), and relevant chains (easy depth-1,
/// hard depth-HL) that actually reach the targets. Relevant rules are emitted
/// after all distractors so naive frontier orders meet them last. Queries are
/// single-literal (rel ?x <target>) with oracle answer counts.
SynthSuite gen_synthetic_kb(const GenParams& p);

/// Query-suite file I/O. Format, one statement per line:
///   (query ID CLASS DOMAIN SET (LITERAL...))
///   (answers ID N)
void save_queries(const std::vector<QueryCase>& qs, const std::string& path);
std::vector<QueryCase> load_queries(const std::string& path);

}  // namespace ordo
