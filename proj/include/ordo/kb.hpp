#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ordo/sexpr.hpp"

namespace ordo {

/// A term is a named constant or a variable; variables start with '?'.
struct Term {
    std::string name;

    bool is_var() const { return !name.empty() && name[0] == '?'; }
    bool operator==(const Term& o) const { return name == o.name; }
    bool operator!=(const Term& o) const { return name != o.name; }
    bool operator<(const Term& o) const { return name < o.name; }
};

/// Predicate applied to terms, with a polarity (negated literals occur only
/// in queries and node clauses, never in rule antecedents).
struct Literal {
    std::string pred;
    std::vector<Term> args;
    bool positive = true;

    bool ground() const;
    bool operator==(const Literal& o) const;
    std::string str() const;
};

using Clause = std::vector<Literal>;

std::string clause_str(const Clause& c);

/// Horn-shaped rule: positive antecedent literals and a positive consequent.
/// `horn == false` marks a rule standing in for a non-Horn derivation.
struct Rule {
    std::string id;
    Clause antecedent;
    Literal consequent;
    bool horn = true;

    /// Variables of the rule, de-duplicated, in order of first occurrence
    /// (antecedent first, then consequent).
    std::vector<Term> vars() const;
};

/// isa / genls edges plus per-term generality. Cycles in genls are allowed;
/// closures are computed with visited-set walks so they terminate regardless.
class Taxonomy {
  public:
    void add_isa(const std::string& term, const std::string& cname);
    void add_genls(const std::string& sub, const std::string& super);
    void set_generality(const std::string& term, long g);

    /// True when `concept` is reachable from any isa-parent of `term`
    /// through the reflexive-transitive genls closure. Unknown names => false.
    bool holds_isa(const std::string& term, const std::string& cname) const;

    /// All generalizations of `term` (its isa targets and everything above
    /// them), deterministically ordered by name.
    std::vector<std::string> generalizations(const std::string& term) const;

    /// Stored generality; 0 when absent.
    long term_generality(const std::string& term) const;

    bool concept_declared(const std::string& name) const;
    const std::map<std::string, std::vector<std::string>>& isa_edges() const {
        return isa_;
    }
    const std::map<std::string, std::vector<std::string>>& genls_edges() const {
        return genls_;
    }
    const std::map<std::string, long>& generality_map() const { return gen_; }

  private:
    // adjacency kept in name order for deterministic iteration
    std::map<std::string, std::vector<std::string>> isa_;    // term -> concepts
    std::map<std::string, std::vector<std::string>> genls_;  // sub  -> supers
    std::map<std::string, long> gen_;

    void reach(const std::string& start, std::set<std::string>& out) const;
};

struct PredicateInfo {
    std::string name;
    int arity = -1;
    std::vector<Literal> facts;     // ground, in load order
    std::vector<int> rules;         // indices into KnowledgeBase::rules_, load order
    bool procedural = false;
    std::set<int> transitive_pos;   // 1-based argument positions
};

/// Thrown when a KB stream violates the format or its declarations.
struct KbError : std::exception {
    std::string message;
    explicit KbError(std::string m) : message(std::move(m)) {}
    const char* what() const noexcept override { return message.c_str(); }
};

/// Facts, rules and taxonomy, immutable once loaded. Safe for concurrent
/// reads; the scan counter below is instrumentation only.
class KnowledgeBase {
  public:
    const Taxonomy& taxonomy() const { return tax_; }

    long num_gafs(const std::string& pred) const;   // O(1)
    long num_rules(const std::string& pred) const;  // O(1), by consequent name
    bool is_procedural(const std::string& pred) const;
    const std::set<int>* transitive_positions(const std::string& pred) const;
    bool is_transitive(const std::string& pred) const;

    /// Facts of one predicate, load order; empty list for unknown names.
    /// Counts one instrumentation scan per call.
    const std::vector<Literal>& facts(const std::string& pred) const;
    /// Rules whose consequent predicate is `pred`, load order.
    std::vector<const Rule*> rules_for(const std::string& pred) const;

    const std::vector<Rule>& all_rules() const { return rules_; }
    const Rule* rule_by_id(const std::string& id) const;
    std::vector<std::string> predicate_names() const;  // load order

    /// Ground pairs (a, b) of the transitive closure (paths of >= 1 stored
    /// fact) of a binary transitive predicate, with either endpoint
    /// optionally fixed. Deterministic BFS order.
    std::vector<std::pair<std::string, std::string>> transitive_pairs(
        const std::string& pred, const std::string* first,
        const std::string* second) const;

    /// Instrumentation: number of fact-list scans served (mutable; not part
    /// of logical state, single-writer use only).
    uint64_t fact_scans() const { return fact_scans_; }

    friend KnowledgeBase load_kb(const std::string& text);
    friend void save_kb(const KnowledgeBase& kb, const std::string& path);

  private:
    Taxonomy tax_;
    std::vector<Rule> rules_;
    std::unordered_map<std::string, PredicateInfo> preds_;
    std::vector<std::string> pred_order_;
    mutable uint64_t fact_scans_ = 0;

    PredicateInfo& pred(const std::string& name);
};

/// Parses a whole KB stream. Order-independent: declarations may appear in
/// any order; validation (arities, isa targets, transitive heads) runs after
/// the full read. Throws KbError / ParseError with a line number.
KnowledgeBase load_kb(const std::string& text);
KnowledgeBase load_kb_file(const std::string& path);

/// Serializes in canonical statement order; reloading yields identical
/// counts, generality values and indexes.
void save_kb(const KnowledgeBase& kb, const std::string& path);

/// Parses one literal form: (pred t1 ... tn) or (not (pred t1 ... tn)).
Literal parse_literal(const Sexpr& e);

}  // namespace ordo
