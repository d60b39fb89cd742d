#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sheafsmith/presheaf.hpp"

namespace sheafsmith::subobj {

using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMap;

// A levelwise, action-closed subset of an ambient presheaf. Canonical
// representatives make lattice equality plain set comparison.
struct Subobject {
    Presheaf ambient;
    std::map<std::string, std::set<std::string>> levels;  // object -> subset

    bool contains(const std::string& obj, const std::string& x) const;
    std::int64_t total_size() const;
    bool operator==(const Subobject& o) const { return levels == o.levels; }
    bool operator<(const Subobject& o) const { return levels < o.levels; }
};

std::optional<std::string> check_subobject(const Subobject& s);
Subobject make_subobject(Presheaf ambient, std::map<std::string, std::set<std::string>> levels);

Subobject whole_subobject(const Presheaf& x);
Subobject empty_subobject(const Presheaf& x);

// Smallest action-closed subset containing the given elements.
Subobject generated_subobject(const Presheaf& x,
                              const std::vector<std::pair<std::string, std::string>>& gens);

// Largest action-closed subset of the pointwise predicate (greatest fixed
// point: start full, remove violations until stable).
Subobject largest_closed_within(
    const Presheaf& x,
    const std::function<bool(const std::string& obj, const std::string& elem)>& keep);

bool leq(const Subobject& a, const Subobject& b);  // levelwise containment

// Complete duplicate-free list of subobjects, in lattice-join generation
// order then sorted; exact but exponential in the worst case.
std::vector<Subobject> enumerate_subobjects(const Presheaf& x, const Config& cfg = {});

enum class HeytingOp { Meet, Join, Implication, Negation };
Subobject heyting(const Subobject& a, const Subobject& b, HeytingOp op);
Subobject meet(const Subobject& a, const Subobject& b);
Subobject join(const Subobject& a, const Subobject& b);
Subobject implication(const Subobject& a, const Subobject& b);
Subobject negation(const Subobject& a);

// Direct and inverse images along a presheaf map.
Subobject exists_along(const PresheafMap& f, const Subobject& s);  // of dom, lands in cod
Subobject forall_along(const PresheafMap& f, const Subobject& s);
Subobject preimage(const PresheafMap& f, const Subobject& t);      // of cod, lands in dom

// Conversion between the canonical representation and a chosen mono.
PresheafMap subobject_as_mono(const Subobject& s);
Subobject mono_as_subobject(const PresheafMap& m);  // requires is_mono

// ---------------------------------------------------------------------------
// The subobject classifier

// Omega(c) is the set of sieves on c; a sieve is encoded as the sorted,
// space-joined list of its morphism ids.
Presheaf omega_presheaf(const CatPtr& base, const Config& cfg = {});

// All sieves on an object (right-closed sets of morphisms into it).
std::vector<std::set<std::string>> all_sieves_on(const CatPtr& base, const std::string& obj,
                                                 const Config& cfg = {});
// Pullback sieve g*S for g into the sieve's object.
std::set<std::string> pullback_sieve(const CatPtr& base, const std::set<std::string>& sieve,
                                     const std::string& g);
std::set<std::string> sieve_members(const std::string& elem);
std::string sieve_elem(const std::set<std::string>& members);
std::string maximal_sieve(const CatPtr& base, const std::string& obj);

PresheafMap classify(const Subobject& s, const Presheaf& omega);
Subobject unclassify(const PresheafMap& chi, const CatPtr& base);

}  // namespace sheafsmith::subobj
