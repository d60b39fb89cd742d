#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sheafsmith/logic.hpp"
#include "sheafsmith/presheaf.hpp"
#include "sheafsmith/subobj.hpp"

namespace sheafsmith::site {

using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMap;

using Sieve = std::set<std::string>;  // morphism ids with a common codomain

// Covering sieves stored extensionally per object.
struct GrothendieckTopology {
    std::string name;
    CatPtr base;
    std::map<std::string, std::vector<Sieve>> covers;  // sorted, distinct

    bool covering(const std::string& obj, const Sieve& s) const;
};

struct TopologyIssue {
    std::string code;  // NotASieve | MaximalityFail | StabilityFail | TransitivityFail
    std::string message;
};

std::optional<TopologyIssue> check_topology(const GrothendieckTopology& j, const Config& cfg = {});

// Saturates a generating coverage into a topology (maximal sieves, pullback
// stability, transitivity) and validates the result.
GrothendieckTopology close_coverage(const CatPtr& base,
                                    const std::map<std::string, std::vector<Sieve>>& gens,
                                    const std::string& name, const Config& cfg = {});

GrothendieckTopology trivial_topology(const CatPtr& base);

// A matching family for a sieve assigns compatible elements along its members.
using MatchingFamily = std::map<std::string, std::string>;  // member -> element of F(dom)

std::vector<MatchingFamily> matching_families(const Presheaf& f, const std::string& obj,
                                              const Sieve& s);

struct SheafCheck {
    bool ok = true;
    std::string object;
    Sieve cover;       // the failing cover when !ok
    std::string what;  // "not injective" | "not surjective"
};

SheafCheck is_sheaf(const Presheaf& f, const GrothendieckTopology& j);
bool is_separated(const Presheaf& f, const GrothendieckTopology& j);

struct PlusResult {
    Presheaf plus;
    PresheafMap unit;  // F -> F^+
    // (object, serialized (sieve, family)) -> class element, for map transport
    std::map<std::pair<std::string, std::string>, std::string> class_of;
};

PlusResult plus_construction(const Presheaf& f, const GrothendieckTopology& j,
                             const Config& cfg = {});

struct SheafificationResult {
    Presheaf input;
    Presheaf separated;  // one plus application
    Presheaf output;     // two plus applications; a sheaf
    PresheafMap unit;    // composite F -> F^{++}
    PresheafMap unit1;   // F -> F^+
    PresheafMap unit2;   // F^+ -> F^{++}
};

SheafificationResult sheafify(const Presheaf& f, const GrothendieckTopology& j,
                              const Config& cfg = {});

// Functorial action on maps between the chosen sheafifications.
PresheafMap plus_map(const PresheafMap& m, const GrothendieckTopology& j, const PlusResult& dom,
                     const PlusResult& cod);
PresheafMap sheafify_map(const PresheafMap& m, const GrothendieckTopology& j,
                         const Config& cfg = {});

// Unit-precomposition Hom(aF, G) -> Hom(F, G) is a bijection for sheaves G.
bool reflection_check(const Presheaf& f, const GrothendieckTopology& j, const Presheaf& sheaf_g,
                      const Config& cfg = {});

struct LeftExactnessReport {
    bool ok = true;
    std::string detail;
};

// The canonical comparison sheafify(lim D) -> lim(sheafify D) must be an
// isomorphism for every supplied test diagram.
LeftExactnessReport left_exactness_check(const GrothendieckTopology& j,
                                         const std::vector<fincat::Diagram>& diagrams,
                                         const Config& cfg = {});

// The comparison map itself, for reuse by the model transport.
PresheafMap sheafify_limit_comparison(const GrothendieckTopology& j, const fincat::Diagram& d,
                                      const Config& cfg = {});

// Transport of a whole interpretation along sheafification (the inverse
// image of the inclusion of sheaves); coherent satisfaction should be
// preserved, and the check reports a counterexample if not.
logic::Interpretation sheafify_interpretation(const logic::Interpretation& m,
                                              const GrothendieckTopology& j,
                                              const Config& cfg = {});

struct PreservationReport {
    bool ok = true;
    bool undetermined = false;
    std::string detail;
};

PreservationReport coherent_preservation_sheafify(const logic::Interpretation& m,
                                                  const logic::Theory& t,
                                                  const GrothendieckTopology& j,
                                                  const Config& cfg = {});

PreservationReport coherent_preservation_evaluation(const fincat::ProductSite& site,
                                                    const logic::Interpretation& m,
                                                    const logic::Theory& t,
                                                    const Config& cfg = {});

struct ConservativityReport {
    bool ok = true;
    std::string detail;  // names the object where the two sides disagree
};

// Over a presheaf site the evaluations are jointly conservative: a map is an
// isomorphism iff every evaluation is a bijection. Checks both directions.
ConservativityReport joint_conservativity_check(const PresheafMap& f);

}  // namespace sheafsmith::site
