#pragma once

#include <map>
#include <optional>

#include "ordo/kb.hpp"

namespace ordo {

/// Variable -> term map. Kept idempotent: no entry's value is a variable
/// that is itself in the domain, and no variable maps to itself.
struct Substitution {
    std::map<std::string, Term> map;

    bool contains(const std::string& var) const { return map.count(var) != 0; }
    const Term* lookup(const std::string& var) const;
    std::string str() const;
    bool operator==(const Substitution& o) const { return map == o.map; }
};

Term apply(const Substitution& s, const Term& t);
Literal apply(const Substitution& s, const Literal& l);
Clause apply(const Substitution& s, const Clause& c);

/// Most general unifier of two literals, or nullopt when predicates,
/// arities, polarities or constants clash. Terms are flat, so the occurs
/// check reduces to dropping trivial ?x -> ?x pairs.
std::optional<Substitution> unify(const Literal& a, const Literal& b);

/// compose(a, b): apply-b-after-a, i.e. apply(compose(a,b), t) ==
/// apply(b, apply(a, t)). Result is idempotent again.
Substitution compose(const Substitution& a, const Substitution& b);

}  // namespace ordo
