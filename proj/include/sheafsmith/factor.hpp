#pragma once

#include "sheafsmith/abelian.hpp"
#include "sheafsmith/factor_engine.hpp"
#include "sheafsmith/logic.hpp"
#include "sheafsmith/presheaf.hpp"
#include "sheafsmith/subobj.hpp"
#include "sheafsmith/theories.hpp"

namespace sheafsmith::factor {

using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMap;

// ---------------------------------------------------------------------------
// Adapters

struct PshArrows {
    using Map = PresheafMap;
    static Map compose(const Map& g, const Map& f) { return fincat::compose_maps(g, f); }
    static Map identity_dom(const Map& m) { return fincat::identity_map(m.dom); }
    static Map identity_cod(const Map& m) { return fincat::identity_map(m.cod); }
    static bool equal(const Map& a, const Map& b) { return fincat::same_map(a, b); }
    static std::string serialize(const Map& m) { return fincat::serialize_map(m); }
    struct Square {
        Map top, bottom;
    };
    static std::vector<Square> squares(const Map& i, const Map& m, const Config& cfg);
    static std::optional<Map> lift(const Map& i, const Map& p, const Map& top, const Map& bottom,
                                   const Config& cfg);
    struct Glued {
        Map theta, psi;
    };
    static Glued glue(const Map& m, const std::vector<Map>& gens,
                      const std::vector<Attachment<PshArrows>>& atts, const Config& cfg);
    // pushout only; `current` is any map whose codomain is the object being
    // glued into
    static Map glue_theta(const Map& current, const std::vector<Map>& gens,
                          const std::vector<Attachment<PshArrows>>& atts, const Config& cfg);
};

struct ChainArrows {
    using Map = abelian::ChainMap;
    static Map compose(const Map& g, const Map& f) { return abelian::compose_chain_maps(g, f); }
    static Map identity_dom(const Map& m) { return abelian::identity_chain_map(m.dom); }
    static Map identity_cod(const Map& m) { return abelian::identity_chain_map(m.cod); }
    static bool equal(const Map& a, const Map& b) { return abelian::same_chain_map(a, b); }
    static std::string serialize(const Map& m) { return abelian::serialize_chain_map(m); }
    struct Square {
        Map top, bottom;
    };
    // generating squares: a basis of the abelian group of commuting squares
    static std::vector<Square> squares(const Map& i, const Map& m, const Config& cfg);
    static std::optional<Map> lift(const Map& i, const Map& p, const Map& top, const Map& bottom,
                                   const Config& cfg);
    struct Glued {
        Map theta, psi;
    };
    static Glued glue(const Map& m, const std::vector<Map>& gens,
                      const std::vector<Attachment<ChainArrows>>& atts, const Config& cfg);
    static Map glue_theta(const Map& current, const std::vector<Map>& gens,
                          const std::vector<Attachment<ChainArrows>>& atts, const Config& cfg);
};

using PshGenSet = GenSet<PshArrows>;
using ChainGenSet = GenSet<ChainArrows>;

PshGenSet make_genset(const std::string& name, std::vector<PresheafMap> maps);
ChainGenSet chain_genset_from(const abelian::ChainGenerators& gens, const std::string& name);

// Presheaf one-step with the per-attachment colimit legs exposed (used to
// check functoriality of the one-step construction).
struct PshOneStepDetailed {
    OneStep<PshArrows> step;
    std::vector<PresheafMap> cell_legs;  // cod(i_s) -> F(m), per attachment
};
PshOneStepDetailed one_step_detailed(const PresheafMap& m, const PshGenSet& gens,
                                     const Config& cfg = {});

// ---------------------------------------------------------------------------
// Effective unions and the generation of monomorphisms

struct EffectiveUnion {
    subobj::Subobject intersection;
    Presheaf pushout_obj;
    PresheafMap comparison;  // pushout -> ambient
    bool verdict = false;    // comparison is mono onto the lattice join
};

EffectiveUnion effective_union(const subobj::Subobject& a, const subobj::Subobject& b,
                               const Config& cfg = {});

// I = all subobject inclusions of regular quotients of representables,
// deduplicated up to isomorphism of arrows.
PshGenSet generating_monos(const CatPtr& c, const Config& cfg = {});

// Searches for a pair of isomorphisms making two arrows isomorphic.
struct ArrowIso {
    PresheafMap dom_iso, cod_iso;
};
std::optional<ArrowIso> arrows_isomorphic(const PresheafMap& a, const PresheafMap& b,
                                          const Config& cfg = {});

struct MonoCellResult {
    CellPresentation<PshArrows> cell;  // stages with one attachment each
    PresheafMap c;                     // dom(m) -> final middle object
    PresheafMap final_iso;             // final middle object -> cod(m)
};

// The effective-union chain of Prop-mono style: writes a mono as a finite
// cell composite over generating_monos, up to the final isomorphism.
MonoCellResult mono_cellularize(const PresheafMap& m, const PshGenSet& gens,
                                const Config& cfg = {});

// ---------------------------------------------------------------------------
// Solution sets, Smith's construction, and the modified factorization

// Evaluates a coherent specification W on presheaf maps by assembling the
// Mor(S)-model of the map; Unknown surfaces as nullopt.
class WClass {
  public:
    WClass(logic::PresheafTheoryResult structure, logic::Theory wspec, Config cfg);
    std::optional<bool> holds(const PresheafMap& f) const;
    const logic::Theory& spec() const { return wspec_; }
    const logic::PresheafTheoryResult& structure() const { return structure_; }
    const logic::MorTheory& mor() const { return mor_; }

  private:
    logic::PresheafTheoryResult structure_;
    logic::MorTheory mor_;
    logic::Theory wspec_;  // axioms over the Mor language
    Config cfg_;
};

// The Mor(S)-model of a presheaf map over the structure category (C = 1).
logic::Interpretation mor_model_of_map(const logic::PresheafTheoryResult& pt,
                                       const logic::MorTheory& mor, const PresheafMap& f,
                                       const Config& cfg = {});

struct SolutionSet {
    std::vector<PresheafMap> maps;
    int bound = 0;
    bool deduped_up_to_iso = true;
    bool capped = false;  // some candidate was undetermined at the family cap
};

// Bounded enumeration of W-maps: all Mor(S)-models with every sort carrier
// <= bound whose map satisfies wspec; an explicit under-approximation of
// the solution set.
SolutionSet solution_set_approx(const WClass& w, int bound, const Config& cfg = {});

struct SmithItem {
    std::size_t gen;            // index into I
    std::size_t wmap;           // index into the solution set
    PresheafMap j;              // the emitted generator
    CellPresentation<PshArrows> cell;  // cell certificate over I
    bool in_w = false;          // wspec satisfaction re-check
    bool cap_exceeded = false;  // the inner factorization hit the cap
};

struct SmithResult {
    PshGenSet j;
    std::vector<SmithItem> items;
    SolutionSet solution_set;
};

// Lemma-small recipe: push each square from I into the solution set out,
// factor the corner map, and emit j := p∘i'.
SmithResult smith_j(const PshGenSet& gens, const WClass& w, int bound, int cap,
                    const Config& cfg = {});

// spot-check of the density property on a given square from i into w
bool density_check(const PshGenSet& j, const PresheafMap& i, const PresheafMap& w,
                   const PresheafMap& top, const PresheafMap& bottom, const Config& cfg = {});

enum class DenseStatus { Complete, CapExceeded, DensityGap };

struct DenseFactorization {
    PresheafMap m, g, h;  // h∘g = m with g in cell(J), h in inj(I)
    CellPresentation<PshArrows> cell;  // over J
    int stage_count = 0;
    DenseStatus status = DenseStatus::CapExceeded;
};

// The modified small object argument of the density lemma: glue J-cells
// chosen to factor each I-square into the codomain.
DenseFactorization dense_factor(const PresheafMap& f, const PshGenSet& j, const PshGenSet& gens,
                                int cap, const Config& cfg = {});

// ---------------------------------------------------------------------------
// Quillen axiom spot checks

struct RetractInstance {
    // m' is a retract of m via dom/cod maps: r_dom∘s_dom = id, r_cod∘s_cod = id,
    // s∘m' = m∘s_dom-ish squares commute
    PresheafMap m_prime, m;
    PresheafMap s_dom, s_cod, r_dom, r_cod;
};

struct LiftInstance {
    PresheafMap i, p, top, bottom;
};

struct ModelAxiomInstances {
    std::vector<std::pair<PresheafMap, PresheafMap>> weq_pairs;  // composable f, g
    std::vector<RetractInstance> retracts;
    std::vector<LiftInstance> squares;
    std::vector<PresheafMap> factorizations;
    std::vector<std::pair<PresheafMap, PresheafMap>> acyclic_cof_compositions;
    std::vector<std::pair<PresheafMap, PresheafMap>> acyclic_cof_pushouts;  // (j, attach)
};

struct AxiomVerdict {
    std::string axiom;   // M2 | M3 | M4 | M5 | c1 | c2
    std::string detail;
    bool ok = true;
    bool undetermined = false;
};

struct ModelAxiomReport {
    std::vector<AxiomVerdict> verdicts;
    bool all_ok() const;
};

ModelAxiomReport check_model_axioms(const ModelAxiomInstances& instances, const WClass& w,
                                    const PshGenSet& gens, int cap, const Config& cfg = {});

// ---------------------------------------------------------------------------
// Diagram categories

// Left Kan placement of each generator at each object of D, the generating
// cofibrations of the objectwise structure on C×D-presheaves.
PshGenSet diagram_generators(const PshGenSet& gens, const CatPtr& c, const CatPtr& d,
                             const Config& cfg = {});

}  // namespace sheafsmith::factor
