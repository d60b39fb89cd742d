#pragma once

// Stock theories: groups, categories, groupoids, and the equational theory
// of presheaves over a fixed finite category, with converters between
// tabular models and the structures they encode.

#include "sheafsmith/logic.hpp"

namespace sheafsmith::logic {

Theory group_theory();
Theory category_theory();
Theory groupoid_theory();

struct PresheafTheoryResult {
    Theory theory;
    fincat::CatPtr base;                                    // the structure category
    std::map<std::string, std::string> sort_of_object;      // object -> sort
    std::map<std::string, std::string> object_of_sort;      // sort -> object
    std::map<std::string, std::string> symbol_of_morphism;  // non-identity morphism -> symbol
    std::map<std::string, std::string> morphism_of_symbol;
};

// Sorts X_c and a unary symbol per non-identity morphism, with the
// contravariant composition equations as axioms.
PresheafTheoryResult presheaf_theory(const fincat::CatPtr& c);

// A presheaf over structure×site as a model of presheaf_theory(structure)
// in presheaves over the site (and back).
Interpretation presheaf_as_model(const PresheafTheoryResult& pt, const fincat::ProductSite& site,
                                 const fincat::Presheaf& f, const Config& cfg = {});
fincat::Presheaf model_as_presheaf(const PresheafTheoryResult& pt, const fincat::ProductSite& site,
                                   const Interpretation& m, const std::string& name,
                                   const Config& cfg = {});

// Plain Set-models of presheaf_theory(C) are presheaves over C.
SetModel set_presheaf_as_model(const PresheafTheoryResult& pt, const fincat::Presheaf& f);
fincat::Presheaf set_model_as_presheaf(const PresheafTheoryResult& pt,
                                       const fincat::CatPtr& base, const SetModel& m,
                                       const std::string& name);

// Finite categories as models of category_theory (composable pairs become
// the carrier of P), and back.
SetModel category_as_set_model(const fincat::FinCategory& c);
fincat::FinCategory set_model_as_category(const SetModel& m, const std::string& name);

// Evaluation of a model over presheaves at one object of the base: the
// tabular Set-model of all carriers, tables and relations at that object.
SetModel model_at_object(const Interpretation& m, const std::string& obj, const Config& cfg = {});

// The constant model over a presheaf site (every level a copy of the
// tabular model, all actions identities).
Interpretation constant_interpretation(const SetModel& m, const fincat::CatPtr& base,
                                       const std::string& name, const Config& cfg = {});

}  // namespace sheafsmith::logic
