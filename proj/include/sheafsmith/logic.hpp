#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sheafsmith/presheaf.hpp"
#include "sheafsmith/subobj.hpp"

namespace sheafsmith::logic {

using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMap;

// ---------------------------------------------------------------------------
// Languages, terms, formulas

struct FunctionSymbol {
    std::string name;
    std::vector<std::string> args;  // empty for constants
    std::string result;
};

struct RelationSymbol {
    std::string name;
    std::vector<std::string> args;
};

struct Language {
    std::vector<std::string> sorts;
    std::vector<FunctionSymbol> functions;
    std::vector<RelationSymbol> relations;

    bool has_sort(const std::string& s) const;
    const FunctionSymbol* function(const std::string& name) const;
    const RelationSymbol* relation(const std::string& name) const;
};

struct Term {
    enum class Kind { Var, App };
    Kind kind = Kind::Var;
    std::string name;
    std::vector<Term> args;
    std::string sort;  // filled by the checker
};

Term var(const std::string& name, const std::string& sort);
Term app(const Language& lang, const std::string& fn, std::vector<Term> args);

struct TypedVar {
    std::string name;
    std::string sort;
    auto operator<=>(const TypedVar&) const = default;
};

struct Formula {
    enum class Kind {
        Truth,
        Falsity,
        Equal,
        Relation,
        And,
        Or,
        OrFamily,
        Implies,
        Not,
        Exists,
        ExistsUnique,
        Forall
    };
    Kind kind = Kind::Truth;
    std::vector<Formula> children;  // And/Or: n-ary; Implies: 2; Not/quantifiers: 1
    std::vector<Term> terms;        // Equal: 2; Relation: arguments
    std::string relation;
    std::vector<TypedVar> bound;  // quantifiers

    // OrFamily: a monotone family of formulas joined over indices 0..cap.
    // Evaluation stops early once the join stabilizes; hitting the cap
    // without stabilizing is reported as undetermined.
    std::function<Formula(int)> family;
    std::string family_name;
    int family_cap = 0;  // 0 = use Config::stage_cap
};

Formula truth();
Formula falsity();
Formula equal(Term a, Term b);
Formula relation(const Language& lang, const std::string& name, std::vector<Term> args);
Formula conj(std::vector<Formula> fs);
Formula disj(std::vector<Formula> fs);
Formula implies(Formula a, Formula b);
Formula negate(Formula a);
Formula exists(std::vector<TypedVar> vars, Formula body);
Formula exists_unique(std::vector<TypedVar> vars, Formula body);
Formula forall(std::vector<TypedVar> vars, Formula body);
Formula or_family(const std::string& name, std::function<Formula(int)> family, int cap = 0);

std::set<std::string> free_vars(const Formula& f);
Formula substitute(const Formula& f, const std::map<std::string, std::string>& rename);

// Desugars every exists-unique into exists + a two-variable uniqueness
// clause, leaving only primitive connectives for the evaluator.
Formula elaborate(const Formula& f);

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);

struct Theory {
    std::string name;
    Language lang;
    std::vector<Formula> axioms;
    std::string fragment = "general";  // cartesian | coherent | general
};

std::string print_theory(const Theory& t);

// Parses the textual DSL; throws ParseError with a line number.
Theory parse_theory(const std::string& text);

struct FragmentReport {
    bool ok = true;
    std::string axiom;  // first offending axiom, pretty-printed
    std::string rule;   // the violated formation rule
};

FragmentReport check_fragment(const Theory& t, const std::string& fragment);

// ---------------------------------------------------------------------------
// Interpretations and satisfaction

struct Interpretation {
    std::string name;
    CatPtr base;
    Language lang;
    std::map<std::string, Presheaf> sorts;
    std::map<std::string, PresheafMap> functions;        // dom = canonical product of arg sorts
    std::map<std::string, subobj::Subobject> relations;  // ambient = canonical product
};

std::optional<std::string> check_interpretation(const Interpretation& m, const Config& cfg = {});

// Builds the function-symbol map over the canonical product of the args.
PresheafMap function_from_table(
    const std::vector<Presheaf>& args, const Presheaf& result,
    const std::function<std::string(const std::string& obj, const std::vector<std::string>&)>& tab,
    const Config& cfg = {});

struct EvalResult {
    subobj::Subobject sub;  // of the canonical product of the context sorts
    fincat::ProductResult context;
    bool capped = false;  // an OrFamily hit its cap without stabilizing
};

EvalResult eval_formula(const Interpretation& m, const Formula& f,
                        const std::vector<TypedVar>& context, const Config& cfg = {});

struct Satisfaction {
    bool ok = false;
    bool undetermined = false;
    std::string axiom;                 // failing axiom, pretty-printed
    std::string object;                // site object of the counterexample
    std::vector<std::string> witness;  // element tuple outside the subobject
};

Satisfaction satisfies(const Interpretation& m, const Theory& t, const Config& cfg = {});

// Model homomorphism check: all function squares commute and relations map in.
struct HomReport {
    bool ok = true;
    std::string detail;  // names the first failing square or relation
};
HomReport is_model_hom(const Interpretation& m, const Interpretation& n,
                       const std::map<std::string, PresheafMap>& components,
                       const Config& cfg = {});

// ---------------------------------------------------------------------------
// The morphism theory Mor(S)

struct MorTheory {
    Theory theory;
    const std::string dom_suffix = "_dom";
    const std::string cod_suffix = "_cod";
    std::string hom_symbol(const std::string& sort) const { return "hom_" + sort; }
};

// Cartesian S only: models of Mor(S) are exactly S-model homomorphisms.
MorTheory mor_theory(const Theory& s);

struct SplitModel {
    Interpretation dom;
    Interpretation cod;
    std::map<std::string, PresheafMap> components;
};

SplitModel split_mor_model(const MorTheory& mt, const Theory& s, const Interpretation& m,
                           const Config& cfg = {});
Interpretation assemble_mor_model(const MorTheory& mt, const Theory& s, const Interpretation& dom,
                                  const Interpretation& cod,
                                  const std::map<std::string, PresheafMap>& components,
                                  const Config& cfg = {});

// ---------------------------------------------------------------------------
// Transposition across E^(C×D) = (E^C)^D

struct TransposedModels {
    std::map<std::string, Interpretation> at;  // object of D -> model over C
    // delta : d -> d' in D gives per-sort maps (sort at d') -> (sort at d)
    std::map<std::string, std::map<std::string, PresheafMap>> transitions;
};

TransposedModels transpose_to_diagram(const fincat::ProductSite& site, const Interpretation& m,
                                      const Config& cfg = {});
Interpretation transpose_from_diagram(const fincat::ProductSite& site, const TransposedModels& tm,
                                      const Language& lang, const Config& cfg = {});

// ---------------------------------------------------------------------------
// Bounded model enumeration over Set

// Tabular Set-models; the fast path used by the enumerator and the naive
// evaluation oracle.
struct SetModel {
    Language lang;
    std::map<std::string, std::vector<std::string>> sorts;
    std::map<std::string, std::map<std::vector<std::string>, std::string>> functions;
    std::map<std::string, std::set<std::vector<std::string>>> relations;
};

enum class Tri { False, True, Unknown };

// Direct recursive evaluation over finite sets; partial tables yield
// Unknown. `capped` is set if an OrFamily failed to stabilize.
Tri naive_eval(const SetModel& m, const Formula& f, std::map<std::string, std::string>& env,
               const Config& cfg, bool* capped = nullptr);
Tri naive_satisfies(const SetModel& m, const Theory& t, const Config& cfg,
                    bool* capped = nullptr);

Interpretation set_model_as_interpretation(const SetModel& m, const std::string& name,
                                           const Config& cfg = {});
SetModel interpretation_as_set_model(const Interpretation& m);  // base must be terminal

struct EnumBounds {
    int default_bound = 1;
    std::map<std::string, int> per_sort;  // upper bounds overriding the default
    std::map<std::string, int> exact;     // exact carrier sizes
    bool up_to_iso = false;               // dedup by canonical relabeling
};

// All Set-models within the carrier bounds, by table backtracking with
// defining-equation propagation and per-table axiom pruning.
std::vector<SetModel> enumerate_models(const Theory& t, const EnumBounds& bounds,
                                       const Config& cfg = {});

}  // namespace sheafsmith::logic
