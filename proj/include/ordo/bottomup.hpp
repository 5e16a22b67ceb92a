#pragma once

#include "ordo/unify.hpp"

namespace ordo {

/// Ground tuples per predicate after saturation.
using FactStore = std::map<std::string, std::set<std::vector<std::string>>>;

/// Naive bottom-up fixpoint: stored facts, the >=1-step closure of every
/// transitive predicate computed over its stored facts, and all facts
/// derivable by applying rules to exhaustion. Independent of the search
/// engine; used as a ground-truth evaluator.
FactStore saturate(const KnowledgeBase& kb);

/// All ground answers to a clause query against the saturated store.
/// Positive literals join against derived facts; negative literals must be
/// ground once the positives are bound and then hold exactly when no
/// *stored* fact matches (assignments leaving one non-ground contribute
/// nothing). Answers are projections onto the query's variables, each fully
/// ground, deduplicated, in canonical order.
std::vector<Substitution> bottomup_answers(const KnowledgeBase& kb,
                                           const Clause& query);

/// Same, against an already-saturated store (saturation is the costly part,
/// so batch callers reuse one store across many queries).
std::vector<Substitution> bottomup_answers(const KnowledgeBase& kb,
                                           const Clause& query,
                                           const FactStore& store);

}  // namespace ordo
