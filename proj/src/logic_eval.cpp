#include <algorithm>

#include "sheafsmith/logic.hpp"

namespace sheafsmith::logic {

using fincat::ProductResult;
using fincat::ProductSite;
using subobj::Subobject;

std::optional<std::string> check_interpretation(const Interpretation& m, const Config& cfg) {
    if (!m.base) return "missing base category";
    for (const std::string& s : m.lang.sorts) {
        auto it = m.sorts.find(s);
        if (it == m.sorts.end()) return "MissingInterpretation: sort '" + s + "'";
        if (!fincat::same_category(it->second.base, m.base))
            return "sort '" + s + "' lives over another base";
    }
    for (const FunctionSymbol& f : m.lang.functions) {
        auto it = m.functions.find(f.name);
        if (it == m.functions.end()) return "MissingInterpretation: function '" + f.name + "'";
        std::vector<Presheaf> args;
        for (const std::string& a : f.args) args.push_back(m.sorts.at(a));
        ProductResult prod = fincat::finite_product(args, m.base, cfg);
        if (!fincat::same_presheaf(it->second.dom, prod.obj))
            return "function '" + f.name + "' domain is not the canonical product";
        if (!fincat::same_presheaf(it->second.cod, m.sorts.at(f.result)))
            return "function '" + f.name + "' codomain mismatch";
        if (auto issue = fincat::check_map(it->second))
            return "function '" + f.name + "': " + *issue;
    }
    for (const RelationSymbol& r : m.lang.relations) {
        auto it = m.relations.find(r.name);
        if (it == m.relations.end()) return "MissingInterpretation: relation '" + r.name + "'";
        std::vector<Presheaf> args;
        for (const std::string& a : r.args) args.push_back(m.sorts.at(a));
        ProductResult prod = fincat::finite_product(args, m.base, cfg);
        if (!fincat::same_presheaf(it->second.ambient, prod.obj))
            return "relation '" + r.name + "' ambient is not the canonical product";
        if (auto issue = subobj::check_subobject(it->second))
            return "relation '" + r.name + "': " + *issue;
    }
    return std::nullopt;
}

PresheafMap function_from_table(
    const std::vector<Presheaf>& args, const Presheaf& result,
    const std::function<std::string(const std::string&, const std::vector<std::string>&)>& tab,
    const Config& cfg) {
    if (args.empty()) throw InvariantError("function_from_table: use the 0-ary overload pattern");
    ProductResult prod = fincat::finite_product(args, args[0].base, cfg);
    PresheafMap out;
    out.name = "fn";
    out.dom = prod.obj;
    out.cod = result;
    for (const auto& [key, comps] : prod.components) out.cmp[key] = tab(key.first, comps);
    return fincat::make_map(std::move(out));
}

namespace {

struct Evaluator {
    const Interpretation& m;
    const Config& cfg;
    bool capped = false;
    // term maps are reused heavily within one context; key on (context, term)
    std::map<std::pair<std::string, std::string>, PresheafMap> term_cache;

    static std::string ctx_key(const std::vector<TypedVar>& ctx) {
        std::string s;
        for (const TypedVar& v : ctx) s += v.name + ":" + v.sort + ";";
        return s;
    }

    const Presheaf& sort_presheaf(const std::string& s) const {
        auto it = m.sorts.find(s);
        if (it == m.sorts.end()) throw InvariantError("MissingInterpretation: sort '" + s + "'");
        return it->second;
    }

    ProductResult context_product(const std::vector<TypedVar>& ctx) const {
        std::vector<Presheaf> factors;
        for (const TypedVar& v : ctx) factors.push_back(sort_presheaf(v.sort));
        return fincat::finite_product(factors, m.base, cfg);
    }

    // the unique map into the empty product
    PresheafMap to_empty_product(const Presheaf& from) const {
        ProductResult empty = fincat::finite_product({}, m.base, cfg);
        PresheafMap out;
        out.name = "!";
        out.dom = from;
        out.cod = empty.obj;
        for (const auto& [o, xs] : from.at)
            for (const std::string& x : xs) out.cmp[{o, x}] = "()";
        return fincat::make_map(std::move(out));
    }

    const PresheafMap& eval_term(const Term& t, const std::vector<TypedVar>& ctx,
                                 const ProductResult& prod) {
        std::pair<std::string, std::string> key{ctx_key(ctx), print_term(t)};
        auto cit = term_cache.find(key);
        if (cit != term_cache.end()) return cit->second;
        PresheafMap result;
        if (t.kind == Term::Kind::Var) {
            bool found = false;
            for (std::size_t i = ctx.size(); i-- > 0;)
                if (ctx[i].name == t.name) {
                    result = prod.projections[i];
                    found = true;
                    break;
                }
            if (!found) throw InvariantError("TypeError: unbound variable '" + t.name + "'");
        } else {
            auto it = m.functions.find(t.name);
            if (it == m.functions.end())
                throw InvariantError("MissingInterpretation: function '" + t.name + "'");
            if (t.args.empty()) {
                result = fincat::compose_maps(it->second, to_empty_product(prod.obj));
            } else {
                std::vector<Presheaf> arg_sorts;
                std::vector<PresheafMap> arg_maps;
                for (const Term& a : t.args) {
                    arg_sorts.push_back(sort_presheaf(a.sort));
                    arg_maps.push_back(eval_term(a, ctx, prod));
                }
                ProductResult aprod = fincat::finite_product(arg_sorts, m.base, cfg);
                result =
                    fincat::compose_maps(it->second, fincat::tuple_into_product(aprod, arg_maps));
            }
        }
        return term_cache.emplace(std::move(key), std::move(result)).first->second;
    }

    Subobject eval(const Formula& f, const std::vector<TypedVar>& ctx, const ProductResult& prod) {
        switch (f.kind) {
            case Formula::Kind::Truth: return subobj::whole_subobject(prod.obj);
            case Formula::Kind::Falsity: return subobj::empty_subobject(prod.obj);
            case Formula::Kind::Equal: {
                PresheafMap a = eval_term(f.terms[0], ctx, prod);
                PresheafMap b = eval_term(f.terms[1], ctx, prod);
                std::map<std::string, std::set<std::string>> lv;
                for (const auto& [o, xs] : prod.obj.at)
                    for (const std::string& x : xs)
                        if (a.apply(o, x) == b.apply(o, x)) lv[o].insert(x);
                return subobj::make_subobject(prod.obj, std::move(lv));
            }
            case Formula::Kind::Relation: {
                auto it = m.relations.find(f.relation);
                if (it == m.relations.end())
                    throw InvariantError("MissingInterpretation: relation '" + f.relation + "'");
                if (f.terms.empty())
                    return subobj::preimage(to_empty_product(prod.obj), it->second);
                std::vector<Presheaf> arg_sorts;
                std::vector<PresheafMap> arg_maps;
                for (const Term& a : f.terms) {
                    arg_sorts.push_back(sort_presheaf(a.sort));
                    arg_maps.push_back(eval_term(a, ctx, prod));
                }
                ProductResult aprod = fincat::finite_product(arg_sorts, m.base, cfg);
                return subobj::preimage(fincat::tuple_into_product(aprod, arg_maps), it->second);
            }
            case Formula::Kind::And: {
                Subobject acc = subobj::whole_subobject(prod.obj);
                for (const Formula& c : f.children) acc = subobj::meet(acc, eval(c, ctx, prod));
                return acc;
            }
            case Formula::Kind::Or: {
                Subobject acc = subobj::empty_subobject(prod.obj);
                for (const Formula& c : f.children) acc = subobj::join(acc, eval(c, ctx, prod));
                return acc;
            }
            case Formula::Kind::OrFamily: {
                if (!f.family) throw InvariantError("OrFamily without a generator");
                int cap = f.family_cap > 0 ? f.family_cap : cfg.stage_cap;
                Subobject acc = subobj::empty_subobject(prod.obj);
                for (int k = 0; k <= cap; ++k) {
                    Subobject next = subobj::join(acc, eval(elaborate(f.family(k)), ctx, prod));
                    if (k > 0 && next == acc) return acc;  // stabilized (family is monotone)
                    acc = std::move(next);
                }
                capped = true;
                return acc;
            }
            case Formula::Kind::Implies:
                return subobj::implication(eval(f.children[0], ctx, prod),
                                           eval(f.children[1], ctx, prod));
            case Formula::Kind::Not: return subobj::negation(eval(f.children[0], ctx, prod));
            case Formula::Kind::Exists:
            case Formula::Kind::Forall: {
                std::vector<TypedVar> ctx2 = ctx;
                for (const TypedVar& v : f.bound) ctx2.push_back(v);
                ProductResult prod2 = context_product(ctx2);
                Subobject body = eval(f.children[0], ctx2, prod2);
                // projection dropping the bound coordinates
                PresheafMap proj;
                proj.name = "ctxproj";
                proj.dom = prod2.obj;
                proj.cod = prod.obj;
                for (const auto& [key, comps] : prod2.components) {
                    std::vector<std::string> prefix(comps.begin(), comps.begin() + ctx.size());
                    proj.cmp[key] = prod.tuple_of.at({key.first, fincat::join_key(prefix)});
                }
                proj = fincat::make_map(std::move(proj));
                return f.kind == Formula::Kind::Exists ? subobj::exists_along(proj, body)
                                                       : subobj::forall_along(proj, body);
            }
            case Formula::Kind::ExistsUnique:
                return eval(elaborate(f), ctx, prod);
        }
        throw InvariantError("eval: unhandled formula kind");
    }
};

}  // namespace

EvalResult eval_formula(const Interpretation& m, const Formula& f,
                        const std::vector<TypedVar>& context, const Config& cfg) {
    std::set<std::string> fv = free_vars(f);
    std::set<std::string> ctx_names;
    for (const TypedVar& v : context) ctx_names.insert(v.name);
    for (const std::string& v : fv)
        if (!ctx_names.count(v))
            throw InvariantError("TypeError: free variable '" + v + "' not in context");
    Evaluator ev{m, cfg};
    EvalResult res;
    res.context = ev.context_product(context);
    res.sub = ev.eval(elaborate(f), context, res.context);
    res.capped = ev.capped;
    return res;
}

Satisfaction satisfies(const Interpretation& m, const Theory& t, const Config& cfg) {
    Satisfaction undet;
    bool any_undetermined = false;
    for (const Formula& axiom : t.axioms) {
        const Formula* matrix = &axiom;
        std::vector<TypedVar> ctx;
        while (matrix->kind == Formula::Kind::Forall) {
            for (const TypedVar& v : matrix->bound) ctx.push_back(v);
            matrix = &matrix->children[0];
        }
        EvalResult res = eval_formula(m, *matrix, ctx, cfg);
        Subobject whole = subobj::whole_subobject(res.context.obj);
        if (res.sub == whole) continue;
        if (res.capped) {
            any_undetermined = true;
            undet.axiom = print_formula(axiom);
            continue;
        }
        Satisfaction s;
        s.ok = false;
        s.axiom = print_formula(axiom);
        for (const auto& [o, xs] : res.context.obj.at) {
            for (const std::string& x : xs)
                if (!res.sub.contains(o, x)) {
                    s.object = o;
                    s.witness = res.context.components.at({o, x});
                    return s;
                }
        }
        return s;  // unreachable: sub != whole implies a witness exists
    }
    Satisfaction s;
    s.ok = !any_undetermined;
    s.undetermined = any_undetermined;
    if (any_undetermined) {
        s.ok = false;
        s.axiom = undet.axiom;
    }
    return s;
}

HomReport is_model_hom(const Interpretation& m, const Interpretation& n,
                       const std::map<std::string, PresheafMap>& components, const Config& cfg) {
    HomReport rep;
    for (const std::string& s : m.lang.sorts) {
        auto it = components.find(s);
        if (it == components.end()) {
            rep.ok = false;
            rep.detail = "SortMismatch: no component for sort '" + s + "'";
            return rep;
        }
        if (!fincat::same_presheaf(it->second.dom, m.sorts.at(s)) ||
            !fincat::same_presheaf(it->second.cod, n.sorts.at(s))) {
            rep.ok = false;
            rep.detail = "SortMismatch: component for '" + s + "' has wrong endpoints";
            return rep;
        }
    }
    for (const FunctionSymbol& f : m.lang.functions) {
        std::vector<Presheaf> margs, nargs;
        std::vector<PresheafMap> comp_projs;
        for (const std::string& a : f.args) {
            margs.push_back(m.sorts.at(a));
            nargs.push_back(n.sorts.at(a));
        }
        PresheafMap lhs, rhs;
        if (f.args.empty()) {
            lhs = fincat::compose_maps(components.at(f.result), m.functions.at(f.name));
            rhs = n.functions.at(f.name);
            // both are maps out of the empty product (same carrier)
        } else {
            ProductResult mprod = fincat::finite_product(margs, m.base, cfg);
            ProductResult nprod = fincat::finite_product(nargs, n.base, cfg);
            std::vector<PresheafMap> comp_after_proj;
            for (std::size_t i = 0; i < f.args.size(); ++i)
                comp_after_proj.push_back(
                    fincat::compose_maps(components.at(f.args[i]), mprod.projections[i]));
            PresheafMap prod_comp = fincat::tuple_into_product(nprod, comp_after_proj);
            lhs = fincat::compose_maps(components.at(f.result), m.functions.at(f.name));
            rhs = fincat::compose_maps(n.functions.at(f.name), prod_comp);
        }
        if (!fincat::same_map(lhs, rhs)) {
            rep.ok = false;
            rep.detail = "function square for '" + f.name + "' does not commute";
            return rep;
        }
    }
    for (const RelationSymbol& r : m.lang.relations) {
        std::vector<Presheaf> nargs;
        for (const std::string& a : r.args) nargs.push_back(n.sorts.at(a));
        Subobject image;
        if (r.args.empty()) {
            image = m.relations.at(r.name);  // trivial ambient; compare directly
            if (!subobj::leq(image, n.relations.at(r.name))) {
                rep.ok = false;
                rep.detail = "relation '" + r.name + "' not preserved";
                return rep;
            }
            continue;
        }
        std::vector<Presheaf> margs;
        for (const std::string& a : r.args) margs.push_back(m.sorts.at(a));
        ProductResult mprod = fincat::finite_product(margs, m.base, cfg);
        ProductResult nprod = fincat::finite_product(nargs, n.base, cfg);
        std::vector<PresheafMap> comp_after_proj;
        for (std::size_t i = 0; i < r.args.size(); ++i)
            comp_after_proj.push_back(
                fincat::compose_maps(components.at(r.args[i]), mprod.projections[i]));
        PresheafMap prod_comp = fincat::tuple_into_product(nprod, comp_after_proj);
        image = subobj::exists_along(prod_comp, m.relations.at(r.name));
        if (!subobj::leq(image, n.relations.at(r.name))) {
            rep.ok = false;
            rep.detail = "relation '" + r.name + "' not taken into its target";
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Mor(S)

namespace {

Term rename_term(const Term& t, const std::map<std::string, std::string>& sort_map,
                 const std::map<std::string, std::string>& fn_map) {
    Term out = t;
    out.sort = sort_map.at(t.sort);
    if (t.kind == Term::Kind::App) out.name = fn_map.at(t.name);
    out.args.clear();
    for (const Term& a : t.args) out.args.push_back(rename_term(a, sort_map, fn_map));
    return out;
}

Formula rename_formula(const Formula& f, const std::map<std::string, std::string>& sort_map,
                       const std::map<std::string, std::string>& fn_map) {
    Formula out = f;
    out.terms.clear();
    for (const Term& t : f.terms) out.terms.push_back(rename_term(t, sort_map, fn_map));
    out.bound.clear();
    for (const TypedVar& v : f.bound) out.bound.push_back({v.name, sort_map.at(v.sort)});
    out.children.clear();
    for (const Formula& c : f.children) out.children.push_back(rename_formula(c, sort_map, fn_map));
    return out;
}

}  // namespace

MorTheory mor_theory(const Theory& s) {
    if (s.fragment != "cartesian")
        throw InvariantError("FragmentViolation: Mor(S) requires a cartesian S");
    FragmentReport rep = check_fragment(s, "cartesian");
    if (!rep.ok)
        throw InvariantError("FragmentViolation: " + rep.axiom + " — " + rep.rule);
    MorTheory mt;
    Theory& t = mt.theory;
    t.name = "Mor_" + s.name;
    t.fragment = "cartesian";
    std::map<std::string, std::string> sdom, scod, fdom, fcod;
    for (const std::string& so : s.lang.sorts) {
        sdom[so] = so + mt.dom_suffix;
        scod[so] = so + mt.cod_suffix;
        if (s.lang.has_sort(sdom[so]) || s.lang.has_sort(scod[so]))
            throw InvariantError("mor_theory: sort name collision on '" + so + "'");
        t.lang.sorts.push_back(sdom[so]);
        t.lang.sorts.push_back(scod[so]);
    }
    for (const FunctionSymbol& f : s.lang.functions) {
        fdom[f.name] = f.name + mt.dom_suffix;
        fcod[f.name] = f.name + mt.cod_suffix;
        FunctionSymbol d, c;
        d.name = fdom[f.name];
        c.name = fcod[f.name];
        for (const std::string& a : f.args) {
            d.args.push_back(sdom[a]);
            c.args.push_back(scod[a]);
        }
        d.result = sdom[f.result];
        c.result = scod[f.result];
        t.lang.functions.push_back(d);
        t.lang.functions.push_back(c);
    }
    for (const std::string& so : s.lang.sorts) {
        FunctionSymbol h;
        h.name = mt.hom_symbol(so);
        h.args = {sdom[so]};
        h.result = scod[so];
        t.lang.functions.push_back(h);
    }
    for (const Formula& a : s.axioms) {
        t.axioms.push_back(rename_formula(a, sdom, fdom));
        t.axioms.push_back(rename_formula(a, scod, fcod));
    }
    // naturality: hom_R(f_dom(x...)) = f_cod(hom_A1(x1), ..., hom_An(xn))
    for (const FunctionSymbol& f : s.lang.functions) {
        std::vector<TypedVar> vars;
        std::vector<Term> dom_args, cod_args;
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            TypedVar v{"x" + std::to_string(i), sdom[f.args[i]]};
            vars.push_back(v);
            dom_args.push_back(var(v.name, v.sort));
            cod_args.push_back(app(t.lang, mt.hom_symbol(f.args[i]), {var(v.name, v.sort)}));
        }
        Term lhs = app(t.lang, mt.hom_symbol(f.result), {app(t.lang, fdom[f.name], dom_args)});
        Term rhs = app(t.lang, fcod[f.name], cod_args);
        t.axioms.push_back(forall(vars, implies(truth(), equal(lhs, rhs))));
    }
    return mt;
}

namespace {

// unwraps a map out of a unary canonical product into a map on the factor
PresheafMap unwrap_unary(const PresheafMap& f, const Presheaf& factor, const Config& cfg) {
    ProductResult prod = fincat::finite_product({factor}, factor.base, cfg);
    PresheafMap out;
    out.name = f.name;
    out.dom = factor;
    out.cod = f.cod;
    for (const auto& [o, xs] : factor.at)
        for (const std::string& x : xs) out.cmp[{o, x}] = f.apply(o, prod.tuple_elem(o, {x}));
    return fincat::make_map(std::move(out));
}

PresheafMap wrap_unary(const PresheafMap& f, const Config& cfg) {
    ProductResult prod = fincat::finite_product({f.dom}, f.dom.base, cfg);
    PresheafMap out;
    out.name = f.name;
    out.dom = prod.obj;
    out.cod = f.cod;
    for (const auto& [o, xs] : f.dom.at)
        for (const std::string& x : xs) out.cmp[{o, prod.tuple_elem(o, {x})}] = f.apply(o, x);
    return fincat::make_map(std::move(out));
}

}  // namespace

SplitModel split_mor_model(const MorTheory& mt, const Theory& s, const Interpretation& m,
                           const Config& cfg) {
    SplitModel out;
    out.dom.name = m.name + ".dom";
    out.cod.name = m.name + ".cod";
    out.dom.base = out.cod.base = m.base;
    out.dom.lang = out.cod.lang = s.lang;
    for (const std::string& so : s.lang.sorts) {
        out.dom.sorts[so] = m.sorts.at(so + mt.dom_suffix);
        out.cod.sorts[so] = m.sorts.at(so + mt.cod_suffix);
        out.components[so] =
            unwrap_unary(m.functions.at(mt.hom_symbol(so)), out.dom.sorts[so], cfg);
    }
    for (const FunctionSymbol& f : s.lang.functions) {
        out.dom.functions[f.name] = m.functions.at(f.name + mt.dom_suffix);
        out.cod.functions[f.name] = m.functions.at(f.name + mt.cod_suffix);
    }
    return out;
}

Interpretation assemble_mor_model(const MorTheory& mt, const Theory& s, const Interpretation& dom,
                                  const Interpretation& cod,
                                  const std::map<std::string, PresheafMap>& components,
                                  const Config& cfg) {
    Interpretation m;
    m.name = dom.name + "->" + cod.name;
    m.base = dom.base;
    m.lang = mt.theory.lang;
    for (const std::string& so : s.lang.sorts) {
        m.sorts[so + mt.dom_suffix] = dom.sorts.at(so);
        m.sorts[so + mt.cod_suffix] = cod.sorts.at(so);
        m.functions[mt.hom_symbol(so)] = wrap_unary(components.at(so), cfg);
    }
    for (const FunctionSymbol& f : s.lang.functions) {
        m.functions[f.name + mt.dom_suffix] = dom.functions.at(f.name);
        m.functions[f.name + mt.cod_suffix] = cod.functions.at(f.name);
    }
    if (auto issue = check_interpretation(m, cfg))
        throw InvariantError("assemble_mor_model: " + *issue);
    return m;
}

// ---------------------------------------------------------------------------
// Transposition

TransposedModels transpose_to_diagram(const ProductSite& site, const Interpretation& m,
                                      const Config& cfg) {
    if (!fincat::same_category(m.base, site.product))
        throw InvariantError("transpose: model does not live over the product site");
    TransposedModels out;
    for (const std::string& d : site.right->objects) {
        Interpretation md;
        md.name = m.name + "@" + d;
        md.base = site.left;
        md.lang = m.lang;
        for (const auto& [s, p] : m.sorts) md.sorts[s] = fincat::evaluation_at(site, p, d);
        for (const FunctionSymbol& f : m.lang.functions) {
            PresheafMap ev = fincat::evaluation_of_map(site, m.functions.at(f.name), d);
            std::vector<Presheaf> args;
            for (const std::string& a : f.args) args.push_back(md.sorts.at(a));
            ProductResult prod = fincat::finite_product(args, site.left, cfg);
            PresheafMap fixed;
            fixed.name = ev.name;
            fixed.dom = prod.obj;  // same carrier as the evaluated product
            fixed.cod = md.sorts.at(f.result);
            fixed.cmp = ev.cmp;
            md.functions[f.name] = fincat::make_map(std::move(fixed));
        }
        for (const RelationSymbol& r : m.lang.relations) {
            std::vector<Presheaf> args;
            for (const std::string& a : r.args) args.push_back(md.sorts.at(a));
            ProductResult prod = fincat::finite_product(args, site.left, cfg);
            std::map<std::string, std::set<std::string>> lv;
            const Subobject& big = m.relations.at(r.name);
            for (const std::string& c : site.left->objects)
                lv[c] = big.levels.at(ProductSite::pair_id(c, d));
            md.relations[r.name] = subobj::make_subobject(prod.obj, std::move(lv));
        }
        out.at.emplace(d, std::move(md));
    }
    for (const fincat::Morphism& delta : site.right->morphisms) {
        if (site.right->is_identity(delta.id)) continue;
        std::map<std::string, PresheafMap> per_sort;
        for (const auto& [s, p] : m.sorts)
            per_sort[s] = fincat::evaluation_map(site, p, delta.id);
        out.transitions[delta.id] = std::move(per_sort);
    }
    return out;
}

Interpretation transpose_from_diagram(const ProductSite& site, const TransposedModels& tm,
                                      const Language& lang, const Config& cfg) {
    Interpretation m;
    m.name = "assembled";
    m.base = site.product;
    m.lang = lang;
    for (const std::string& s : lang.sorts) {
        std::map<std::string, Presheaf> at_d;
        std::map<std::string, PresheafMap> trans;
        for (const auto& [d, md] : tm.at) at_d.emplace(d, md.sorts.at(s));
        for (const auto& [delta, per_sort] : tm.transitions) trans.emplace(delta, per_sort.at(s));
        m.sorts[s] = fincat::assemble_over_product(site, at_d, trans, s);
    }
    for (const FunctionSymbol& f : lang.functions) {
        std::vector<Presheaf> args;
        for (const std::string& a : f.args) args.push_back(m.sorts.at(a));
        ProductResult prod = fincat::finite_product(args, site.product, cfg);
        PresheafMap out;
        out.name = f.name;
        out.dom = prod.obj;
        out.cod = m.sorts.at(f.result);
        for (const auto& [key, comps] : prod.components) {
            auto [c, d] = site.split_obj(key.first);
            (void)comps;
            out.cmp[key] = tm.at.at(d).functions.at(f.name).apply(c, key.second);
        }
        m.functions[f.name] = fincat::make_map(std::move(out));
    }
    for (const RelationSymbol& r : lang.relations) {
        std::vector<Presheaf> args;
        for (const std::string& a : r.args) args.push_back(m.sorts.at(a));
        ProductResult prod = fincat::finite_product(args, site.product, cfg);
        std::map<std::string, std::set<std::string>> lv;
        for (const std::string& po : site.product->objects) {
            auto [c, d] = site.split_obj(po);
            lv[po] = tm.at.at(d).relations.at(r.name).levels.at(c);
        }
        m.relations[r.name] = subobj::make_subobject(prod.obj, std::move(lv));
    }
    if (auto issue = check_interpretation(m, cfg))
        throw InvariantError("transpose_from_diagram: " + *issue);
    return m;
}

}  // namespace sheafsmith::logic
