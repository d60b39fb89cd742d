#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sheafsmith/config.hpp"

namespace sheafsmith::fincat {

struct Morphism {
    std::string id;
    std::string src;
    std::string dst;
    auto operator<=>(const Morphism&) const = default;
};

// A finite category with a total composition table. Identities are
// ordinary morphisms listed in `morphisms` and named in `identity`.
// All enumeration orders are lexicographic by id.
struct FinCategory {
    std::string name;
    std::vector<std::string> objects;                       // sorted, distinct
    std::vector<Morphism> morphisms;                        // sorted by id, distinct
    std::map<std::string, std::string> identity;            // object -> morphism id
    std::map<std::pair<std::string, std::string>, std::string> comp;  // (g, f) -> g∘f

    bool has_object(const std::string& c) const;
    const Morphism& mor(const std::string& id) const;
    bool has_mor(const std::string& id) const;
    bool is_identity(const std::string& id) const;

    // g∘f where src(g) == dst(f); identities short-circuit.
    std::string compose(const std::string& g, const std::string& f) const;

    std::vector<std::string> hom(const std::string& a, const std::string& b) const;
    std::vector<std::string> into(const std::string& c) const;  // all f with dst == c
};

using CatPtr = std::shared_ptr<const FinCategory>;

// Structural equality ignoring the display name.
bool same_category(const FinCategory& a, const FinCategory& b);
bool same_category(const CatPtr& a, const CatPtr& b);

struct CategoryIssue {
    std::string code;     // MissingComposite | AssocViolation | IdViolation | BadData
    std::string message;  // names the first violated law
};

// Exhaustive check of the category laws; nullopt means valid.
std::optional<CategoryIssue> check_category(const FinCategory& c);

// Checked constructor: sorts, fills identity entries in the composition
// table, then validates. Throws InvariantError on failure.
CatPtr make_category(FinCategory raw);

// Common small categories.
CatPtr terminal_category();           // one object "*"
CatPtr arrow_category();              // objects a, b and one arrow f : a -> b
CatPtr discrete_category(const std::vector<std::string>& objects, const std::string& name);

struct Functor {
    CatPtr source;
    CatPtr target;
    std::map<std::string, std::string> obj_map;
    std::map<std::string, std::string> mor_map;

    std::string on_obj(const std::string& c) const;
    std::string on_mor(const std::string& f) const;
};

// Exhaustive functoriality check; nullopt means valid.
std::optional<std::string> check_functor(const Functor& f);

// C×D with object ids "(c,d)" and morphism ids "(f,g)".
struct ProductSite {
    CatPtr product;
    CatPtr left;
    CatPtr right;
    Functor proj_left;
    Functor proj_right;

    static std::string pair_id(const std::string& a, const std::string& b);
    std::pair<std::string, std::string> split_obj(const std::string& id) const;
    std::pair<std::string, std::string> split_mor(const std::string& id) const;
};

ProductSite product_category(const CatPtr& c, const CatPtr& d, const Config& cfg = {});

// Inclusion of the discrete subcategory on all objects (D_delta -> D).
Functor discrete_inclusion(const CatPtr& d);

}  // namespace sheafsmith::fincat
