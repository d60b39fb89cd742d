#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sheafsmith/fincat.hpp"

namespace sheafsmith::fincat {

// A finite presheaf: per object a finite carrier, per morphism f : c -> c'
// an action F(f) : F(c') -> F(c). Identity actions are implicit.
struct Presheaf {
    std::string name;
    CatPtr base;
    std::map<std::string, std::vector<std::string>> at;  // object -> sorted element ids
    std::map<std::pair<std::string, std::string>, std::string> act;  // (mor, elem of F(dst)) -> elem of F(src)

    const std::vector<std::string>& level(const std::string& obj) const;
    bool has_elem(const std::string& obj, const std::string& x) const;
    std::string apply(const std::string& mor, const std::string& x) const;
    std::int64_t total_size() const;
};

bool same_presheaf(const Presheaf& f, const Presheaf& g);  // ignores names

std::optional<std::string> check_presheaf(const Presheaf& f);
Presheaf make_presheaf(Presheaf raw);  // sorts carriers, validates, throws on failure

Presheaf terminal_presheaf(const CatPtr& base);
Presheaf initial_presheaf(const CatPtr& base);
Presheaf constant_presheaf(const CatPtr& base, const std::vector<std::string>& elems,
                           const std::string& name);

struct PresheafMap {
    std::string name;
    Presheaf dom;
    Presheaf cod;
    std::map<std::pair<std::string, std::string>, std::string> cmp;  // (object, x) -> image

    std::string apply(const std::string& obj, const std::string& x) const;
};

std::optional<std::string> check_map(const PresheafMap& m);
PresheafMap make_map(PresheafMap raw);

PresheafMap identity_map(const Presheaf& f);
PresheafMap compose_maps(const PresheafMap& g, const PresheafMap& f);  // g∘f
bool same_map(const PresheafMap& f, const PresheafMap& g);             // ignores names
bool is_mono(const PresheafMap& m);
bool is_epi(const PresheafMap& m);
bool is_iso(const PresheafMap& m);
PresheafMap invert(const PresheafMap& m);  // requires is_iso

// Stable one-line serializations used for deterministic ordering and
// certificate digests.
std::string serialize_presheaf(const Presheaf& f);
std::string serialize_map(const PresheafMap& m);

// ---------------------------------------------------------------------------
// Diagrams and finite (co)limits

struct Diagram {
    std::map<std::string, Presheaf> nodes;
    struct Edge {
        std::string name;
        std::string src;
        std::string dst;
        PresheafMap map;
    };
    std::vector<Edge> edges;  // kept sorted by name

    void add_node(const std::string& n, Presheaf p);
    void add_edge(const std::string& n, const std::string& s, const std::string& d, PresheafMap m);
};

struct LimitResult {
    Presheaf apex;
    std::map<std::string, PresheafMap> legs;  // node -> projection apex -> node
};

struct ColimitResult {
    Presheaf apex;
    std::map<std::string, PresheafMap> legs;  // node -> injection node -> apex
};

// Pointwise limit: subset of the product of node carriers cut out by the
// edge equations. Elements are canonical tuples over the sorted node list.
LimitResult finite_limit(const CatPtr& base, const Diagram& d, const Config& cfg = {});

// Pointwise colimit: disjoint union modulo the equivalence generated by
// the edges. Elements are renamed canonically to q0, q1, ... per object.
ColimitResult finite_colimit(const CatPtr& base, const Diagram& d, const Config& cfg = {});

struct PushoutResult {
    Presheaf obj;
    PresheafMap from_left;   // cod(f) -> obj
    PresheafMap from_right;  // cod(g) -> obj
};
// Pushout of cod(f) <-f- A -g-> cod(g); f and g share a domain.
PushoutResult pushout(const PresheafMap& f, const PresheafMap& g, const Config& cfg = {});

struct PullbackResult {
    Presheaf obj;
    PresheafMap to_left;   // obj -> dom(f)
    PresheafMap to_right;  // obj -> dom(g)
};
// Pullback of dom(f) -f-> X <-g- dom(g); f and g share a codomain.
PullbackResult pullback(const PresheafMap& f, const PresheafMap& g, const Config& cfg = {});

struct BinaryProductResult {
    Presheaf obj;
    PresheafMap proj_left, proj_right;
};
BinaryProductResult binary_product(const Presheaf& f, const Presheaf& g, const Config& cfg = {});

struct CoproductResult {
    Presheaf obj;
    std::vector<PresheafMap> injections;
};
CoproductResult coproduct(const std::vector<Presheaf>& parts, const CatPtr& base,
                          const Config& cfg = {});

struct EqualizerResult {
    Presheaf obj;
    PresheafMap include;  // obj -> dom(f)
};
EqualizerResult equalizer(const PresheafMap& f, const PresheafMap& g, const Config& cfg = {});

struct CoequalizerResult {
    Presheaf obj;
    PresheafMap project;  // cod(f) -> obj
};
CoequalizerResult coequalizer(const PresheafMap& f, const PresheafMap& g, const Config& cfg = {});

// n-ary product with tuple bookkeeping; the workhorse behind logic contexts.
struct ProductResult {
    Presheaf obj;
    std::vector<PresheafMap> projections;
    // (object, tuple element) -> component elements, and back
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> components;
    std::map<std::pair<std::string, std::string>, std::string> tuple_of;  // (object, joined key) -> elem

    std::string tuple_elem(const std::string& obj, const std::vector<std::string>& comps) const;
};
ProductResult finite_product(const std::vector<Presheaf>& factors, const CatPtr& base,
                             const Config& cfg = {});
std::string join_key(const std::vector<std::string>& comps);

// Tupling <f_1,...,f_n> : X -> prod of the f_i into a ProductResult.
PresheafMap tuple_into_product(const ProductResult& prod, const std::vector<PresheafMap>& maps);

// ---------------------------------------------------------------------------
// Natural transformation search

// Visits every natural map F -> G extending `pin`, in lexicographic order of
// assignments. `candidates`, when set, restricts the allowed images of each
// element. Returns false if the visitor stopped the walk early.
using MapVisitor = std::function<bool(const PresheafMap&)>;
using CandidateFn = std::function<std::vector<std::string>(const std::string& obj, const std::string& x)>;

bool for_each_natural_map(const Presheaf& f, const Presheaf& g,
                          const std::map<std::pair<std::string, std::string>, std::string>& pin,
                          const CandidateFn& candidates, const MapVisitor& visit);

std::vector<PresheafMap> all_natural_maps(const Presheaf& f, const Presheaf& g,
                                          std::size_t limit = SIZE_MAX);

// ---------------------------------------------------------------------------
// Yoneda, elements, Kan extension, evaluation

Presheaf yoneda(const CatPtr& base, const std::string& obj);

// Objects are "(c|x)"; a morphism "(f|x')" : (c, F(f)x') -> (c', x') for f : c -> c'.
CatPtr category_of_elements(const Presheaf& f);

struct LanResult {
    Presheaf lan;  // over the target of `along`
    // unit: (object c of C, x in F(c)) -> (along(c), element of lan there)
    std::map<std::pair<std::string, std::string>, std::pair<std::string, std::string>> unit;
    // internal colimit bookkeeping: (object d of D, comma tag) -> class element
    std::map<std::pair<std::string, std::string>, std::string> class_of;
};

// Left Kan extension of a presheaf along a functor, by the pointwise
// comma-category colimit formula.
LanResult left_kan(const Presheaf& f, const Functor& along, const Config& cfg = {});

// Functorial action on maps: Lan(h) for h : F -> G over the source.
PresheafMap left_kan_map(const PresheafMap& h, const Functor& along, const LanResult& lan_dom,
                         const LanResult& lan_cod);

// G∘along as a presheaf on the source of `along` (carrier shared with G).
Presheaf restrict_presheaf(const Presheaf& g, const Functor& along);

// Transpose of k : Lan F -> G across the adjunction: F -> G∘along.
PresheafMap lan_transpose(const Presheaf& f, const LanResult& lan, const Functor& along,
                          const PresheafMap& k);

// Evaluation of a presheaf over C×D at an object d of D.
Presheaf evaluation_at(const ProductSite& site, const Presheaf& f, const std::string& d);
// ev_{d'} F -> ev_d F induced by delta : d -> d' in D.
PresheafMap evaluation_map(const ProductSite& site, const Presheaf& f, const std::string& delta);
PresheafMap evaluation_of_map(const ProductSite& site, const PresheafMap& m, const std::string& d);

// The mirrored slices fixing the left coordinate: a presheaf over the right
// factor per object of the left factor.
Presheaf slice_left(const ProductSite& site, const Presheaf& f, const std::string& c);
// slice(c') -> slice(c) induced by gamma : c -> c' in the left factor.
PresheafMap slice_left_action(const ProductSite& site, const Presheaf& f, const std::string& gamma);
PresheafMap slice_left_of_map(const ProductSite& site, const PresheafMap& m, const std::string& c);

// Reassembles a presheaf over C×D from per-object evaluations and
// transition maps trans[delta] : F_{d'} -> F_d for delta : d -> d'.
Presheaf assemble_over_product(const ProductSite& site,
                               const std::map<std::string, Presheaf>& at_d,
                               const std::map<std::string, PresheafMap>& trans,
                               const std::string& name);

// ---------------------------------------------------------------------------
// Universal property spot checks (enumeration oracles)

bool verify_limit_universal(const CatPtr& base, const Diagram& d, const LimitResult& lim,
                            const std::vector<Presheaf>& test_apexes);
bool verify_colimit_universal(const CatPtr& base, const Diagram& d, const ColimitResult& colim,
                              const std::vector<Presheaf>& test_apexes);

}  // namespace sheafsmith::fincat
