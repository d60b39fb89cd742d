#pragma once

#include "sheafsmith/factor.hpp"
#include "sheafsmith/logic.hpp"
#include "sheafsmith/presheaf.hpp"
#include "sheafsmith/theories.hpp"

namespace sheafsmith::homotopy {

using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMap;

// The truncated simplex category Delta<=N. Objects "[k]"; a morphism
// [m] -> [n] with values v_0 <= ... <= v_m is named "a<m><n>_<v...>".
CatPtr simplex_category(int n_max);
std::string simplex_object(int n);
std::string simplex_morphism(int m, int n, const std::vector<int>& values);
std::string face_morphism(int n, int i);        // delta_i : [n-1] -> [n]
std::string degeneracy_morphism(int n, int i);  // sigma_i : [n+1] -> [n]
std::string collapse_morphism(int k);           // the unique [k] -> [0]

// The ambient data every homotopical operation runs over: the category,
// boundary inclusions, and horn inclusions up to the truncation level.
struct TruncSetup {
    int n = 0;
    CatPtr delta;
    factor::PshGenSet boundaries;  // bd^k : ∂Δ^k -> Δ^k, 0 <= k <= n
    factor::PshGenSet horns;       // horn^k_j : Λ^k_j -> Δ^k, 1 <= k <= n
};

TruncSetup trunc_setup(int n, const Config& cfg = {});

Presheaf standard_simplex(const TruncSetup& ts, int k);
Presheaf boundary_part(const TruncSetup& ts, int k);       // ∂Δ^k
Presheaf horn_part(const TruncSetup& ts, int k, int j);    // Λ^k_j

// ---------------------------------------------------------------------------
// Kan condition and the Ex functor (plain simplicial sets: presheaves over
// Delta<=N, the C = 1 case of the spec's truncated simplicial objects)

struct KanReport {
    bool ok = true;
    std::string detail;  // names the failing horn when !ok
};

KanReport is_kan(const TruncSetup& ts, const Presheaf& x, const Config& cfg = {});

// barycentric subdivision of the standard simplex, inside the truncation
Presheaf subdivision(const TruncSetup& ts, int m);

struct ExResult {
    Presheaf ex;
    PresheafMap unit;  // X -> Ex(X), by the last-vertex map
};
ExResult ex_functor(const TruncSetup& ts, const Presheaf& x, const Config& cfg = {});
PresheafMap ex_of_map(const TruncSetup& ts, const PresheafMap& f, const Config& cfg = {});

struct ExIterate {
    Presheaf result;
    PresheafMap unit;  // composite X -> Ex^k(X)
    int iterations = 0;
    bool kan = false;  // reached the Kan condition within the cap
};
ExIterate ex_iterate(const TruncSetup& ts, const Presheaf& x, int cap, const Config& cfg = {});

// ---------------------------------------------------------------------------
// Homotopy classes and weak equivalences between Kan objects

// all faces of x (an n-simplex) are the degenerate base point
bool is_singular(const TruncSetup& ts, const Presheaf& x, const std::string& base, int n,
                 const std::string& elem);
// an (n+1)-simplex witnessing a based homotopy from a to b
bool homotopy_witness(const TruncSetup& ts, const Presheaf& x, const std::string& base, int n,
                      const std::string& a, const std::string& b);

// based classes of singular n-simplices; the witnessed relation is closed
// symmetrically and transitively here, making this the brute-force oracle
std::vector<std::set<std::string>> pi_oracle(const TruncSetup& ts, const Presheaf& x,
                                             const std::string& base, int n,
                                             const Config& cfg = {});

struct WeqReport {
    bool ok = true;
    bool undetermined = false;
    std::string detail;
};

// Singular-sphere criterion between Kan objects: single-witness homotopy
// comparisons at every base point of the domain, for all n <= N-1, plus
// surjectivity on components of the codomain. Throws on non-Kan input.
WeqReport weq_kan(const TruncSetup& ts, const PresheafMap& f, const Config& cfg = {});

// the oracle route: compare class counts and the induced class maps
// computed by pi_oracle
WeqReport weq_by_classes(const TruncSetup& ts, const PresheafMap& f, const Config& cfg = {});

// ---------------------------------------------------------------------------
// Nerves

Presheaf nerve(const TruncSetup& ts, const CatPtr& c, const Config& cfg = {});
PresheafMap nerve_of_functor(const TruncSetup& ts, const fincat::Functor& f,
                             const Config& cfg = {});

// ---------------------------------------------------------------------------
// Objectwise weak equivalences over a site (presheaves over Delta<=N × C)

struct JoyalReport {
    bool ok = true;
    bool undetermined = false;
    std::string object;  // site object where the verdict was decided
    std::string detail;
};

// evaluation at each site object, fibrant replacement by iterated Ex when
// needed, then weq_kan; tri-valued when the Ex cap is hit
JoyalReport joyal_weq(const TruncSetup& ts, const fincat::ProductSite& site, const PresheafMap& f,
                      int ex_cap, const Config& cfg = {});

KanReport is_kan_over_site(const TruncSetup& ts, const fincat::ProductSite& site,
                           const Presheaf& x, const Config& cfg = {});

// ---------------------------------------------------------------------------
// Internal categories and equivalences

// the coherent theory, over the Mor(category) language, of internal
// functors that are full, faithful and essentially surjective
logic::Theory internal_equiv_theory();

// a functor of finite categories as a model of Mor(category_theory)
logic::SetModel functor_as_mor_model(const fincat::Functor& f);

// satisfaction of the internal-equivalence axioms for a model of
// Mor(category_theory) over any presheaf base
WeqReport internal_equiv(const logic::Interpretation& mor_model, const Config& cfg = {});
// the object part is a monomorphism
bool cat_cofib(const logic::Interpretation& mor_model, const Config& cfg = {});

// ---------------------------------------------------------------------------
// Logic exports

// horn-filler axioms (coherent) over presheaf_theory(Delta<=N)
logic::Theory kan_theory(const TruncSetup& ts, const logic::PresheafTheoryResult& pt);

// singular-sphere weak equivalence axioms (coherent) over the Mor language
// of presheaf_theory(Delta<=N); pi_0 reachability uses a capped monotone
// disjunction family
logic::Theory weq_theory(const TruncSetup& ts, const logic::PresheafTheoryResult& pt,
                         const logic::MorTheory& mor, int zigzag_cap = 0);

}  // namespace sheafsmith::homotopy
