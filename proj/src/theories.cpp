#include "sheafsmith/theories.hpp"

#include <algorithm>

namespace sheafsmith::logic {

using fincat::CatPtr;
using fincat::Morphism;
using fincat::Presheaf;
using fincat::PresheafMap;
using fincat::ProductSite;

Theory group_theory() {
    Theory t;
    t.name = "group";
    t.fragment = "cartesian";
    t.lang.sorts = {"G"};
    t.lang.functions = {{"m", {"G", "G"}, "G"}, {"e", {}, "G"}, {"inv", {"G"}, "G"}};
    const Language& L = t.lang;
    auto x = var("x", "G"), y = var("y", "G"), z = var("z", "G");
    auto E = app(L, "e", {});
    t.axioms.push_back(forall({{"x", "G"}, {"y", "G"}, {"z", "G"}},
                              implies(truth(), equal(app(L, "m", {app(L, "m", {x, y}), z}),
                                                     app(L, "m", {x, app(L, "m", {y, z})})))));
    t.axioms.push_back(forall({{"x", "G"}}, implies(truth(), equal(app(L, "m", {E, x}), x))));
    t.axioms.push_back(forall({{"x", "G"}}, implies(truth(), equal(app(L, "m", {x, E}), x))));
    t.axioms.push_back(forall({{"x", "G"}},
                              implies(truth(), equal(app(L, "m", {app(L, "inv", {x}), x}), E))));
    t.axioms.push_back(forall({{"x", "G"}},
                              implies(truth(), equal(app(L, "m", {x, app(L, "inv", {x})}), E))));
    return t;
}

namespace {

// shared part of the (internal) category and groupoid theories: sorts O, A
// and the composable-pair sort P with its projections and composition
Theory small_category_core(const std::string& name) {
    Theory t;
    t.name = name;
    t.fragment = "cartesian";
    t.lang.sorts = {"O", "A", "P"};
    t.lang.functions = {{"s", {"A"}, "O"},  {"t", {"A"}, "O"}, {"i", {"O"}, "A"},
                        {"p1", {"P"}, "A"}, {"p2", {"P"}, "A"}, {"c", {"P"}, "A"}};
    const Language& L = t.lang;
    auto a = var("a", "A"), a1 = var("a1", "A"), a2 = var("a2", "A");
    auto xo = var("x", "O");
    auto p = var("p", "P"), q = var("q", "P"), r = var("r", "P"), w = var("w", "P");

    t.axioms.push_back(
        forall({{"x", "O"}}, implies(truth(), equal(app(L, "s", {app(L, "i", {xo})}), xo))));
    t.axioms.push_back(
        forall({{"x", "O"}}, implies(truth(), equal(app(L, "t", {app(L, "i", {xo})}), xo))));
    t.axioms.push_back(forall({{"p", "P"}},
                              implies(truth(), equal(app(L, "t", {app(L, "p1", {p})}),
                                                     app(L, "s", {app(L, "p2", {p})})))));
    t.axioms.push_back(forall(
        {{"a1", "A"}, {"a2", "A"}},
        implies(equal(app(L, "t", {a1}), app(L, "s", {a2})),
                exists_unique({{"p", "P"}}, conj({equal(app(L, "p1", {p}), a1),
                                                  equal(app(L, "p2", {p}), a2)})))));
    t.axioms.push_back(forall({{"p", "P"}},
                              implies(truth(), equal(app(L, "s", {app(L, "c", {p})}),
                                                     app(L, "s", {app(L, "p1", {p})})))));
    t.axioms.push_back(forall({{"p", "P"}},
                              implies(truth(), equal(app(L, "t", {app(L, "c", {p})}),
                                                     app(L, "t", {app(L, "p2", {p})})))));
    // unit laws
    t.axioms.push_back(
        forall({{"a", "A"}, {"p", "P"}},
               implies(conj({equal(app(L, "p1", {p}), app(L, "i", {app(L, "s", {a})})),
                             equal(app(L, "p2", {p}), a)}),
                       equal(app(L, "c", {p}), a))));
    t.axioms.push_back(
        forall({{"a", "A"}, {"p", "P"}},
               implies(conj({equal(app(L, "p1", {p}), a),
                             equal(app(L, "p2", {p}), app(L, "i", {app(L, "t", {a})}))}),
                       equal(app(L, "c", {p}), a))));
    // associativity: with p=(a,b), r=(b,z), q=(c(p),z), w=(a,c(r)) the two
    // composites agree
    t.axioms.push_back(forall(
        {{"p", "P"}, {"q", "P"}, {"r", "P"}, {"w", "P"}},
        implies(conj({equal(app(L, "p1", {q}), app(L, "c", {p})),
                      equal(app(L, "p2", {q}), app(L, "p2", {r})),
                      equal(app(L, "p1", {r}), app(L, "p2", {p})),
                      equal(app(L, "p1", {w}), app(L, "p1", {p})),
                      equal(app(L, "p2", {w}), app(L, "c", {r}))}),
                equal(app(L, "c", {q}), app(L, "c", {w})))));
    return t;
}

}  // namespace

Theory category_theory() { return small_category_core("category"); }

Theory groupoid_theory() {
    Theory t = small_category_core("groupoid");
    t.name = "groupoid";
    t.lang.functions.push_back({"inv", {"A"}, "A"});
    const Language& L = t.lang;
    auto a = var("a", "A");
    auto p = var("p", "P");
    t.axioms.push_back(forall(
        {{"a", "A"}},
        implies(truth(), equal(app(L, "s", {app(L, "inv", {a})}), app(L, "t", {a})))));
    t.axioms.push_back(forall(
        {{"a", "A"}},
        implies(truth(), equal(app(L, "t", {app(L, "inv", {a})}), app(L, "s", {a})))));
    t.axioms.push_back(
        forall({{"a", "A"}, {"p", "P"}},
               implies(conj({equal(app(L, "p1", {p}), a),
                             equal(app(L, "p2", {p}), app(L, "inv", {a}))}),
                       equal(app(L, "c", {p}), app(L, "i", {app(L, "s", {a})})))));
    t.axioms.push_back(
        forall({{"a", "A"}, {"p", "P"}},
               implies(conj({equal(app(L, "p1", {p}), app(L, "inv", {a})),
                             equal(app(L, "p2", {p}), a)}),
                       equal(app(L, "c", {p}), app(L, "i", {app(L, "t", {a})})))));
    return t;
}

// ---------------------------------------------------------------------------
// Presheaf theories

namespace {
std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '[' || c == ']')
                   ? c
                   : '_';
    return out;
}
}  // namespace

PresheafTheoryResult presheaf_theory(const CatPtr& c) {
    PresheafTheoryResult out;
    out.base = c;
    Theory& t = out.theory;
    t.name = "psh_" + sanitize(c->name);
    t.fragment = "cartesian";
    for (const std::string& o : c->objects) {
        std::string sort = "X" + sanitize(o);
        while (t.lang.has_sort(sort)) sort += "_";
        t.lang.sorts.push_back(sort);
        out.sort_of_object[o] = sort;
        out.object_of_sort[sort] = o;
    }
    for (const Morphism& m : c->morphisms) {
        if (c->is_identity(m.id)) continue;
        std::string sym = "m_" + sanitize(m.id);
        while (t.lang.function(sym)) sym += "_";
        t.lang.functions.push_back(
            {sym, {out.sort_of_object.at(m.dst)}, out.sort_of_object.at(m.src)});
        out.symbol_of_morphism[m.id] = sym;
        out.morphism_of_symbol[sym] = m.id;
    }
    const Language& L = t.lang;
    // contravariant composition: m_{g∘f}(x) = m_f(m_g(x)) for x : X_{dst g}
    for (const Morphism& f : c->morphisms) {
        if (c->is_identity(f.id)) continue;
        for (const Morphism& g : c->morphisms) {
            if (c->is_identity(g.id) || f.dst != g.src) continue;
            std::string h = c->compose(g.id, f.id);
            std::string xsort = out.sort_of_object.at(g.dst);
            Term x = var("x", xsort);
            Term rhs = app(L, out.symbol_of_morphism.at(f.id),
                           {app(L, out.symbol_of_morphism.at(g.id), {x})});
            Formula ax;
            if (c->is_identity(h))
                ax = forall({{"x", xsort}}, implies(truth(), equal(rhs, x)));
            else
                ax = forall({{"x", xsort}},
                            implies(truth(),
                                    equal(app(L, out.symbol_of_morphism.at(h), {x}), rhs)));
            t.axioms.push_back(std::move(ax));
        }
    }
    return out;
}

Interpretation presheaf_as_model(const PresheafTheoryResult& pt, const ProductSite& site,
                                 const Presheaf& f, const Config& cfg) {
    if (!fincat::same_category(f.base, site.product))
        throw InvariantError("presheaf_as_model: presheaf not over the product site");
    Interpretation m;
    m.name = f.name;
    m.base = site.right;
    m.lang = pt.theory.lang;
    for (const auto& [o, sort] : pt.sort_of_object)
        m.sorts[sort] = fincat::slice_left(site, f, o);
    for (const auto& [mor, sym] : pt.symbol_of_morphism) {
        PresheafMap action = fincat::slice_left_action(site, f, mor);
        std::vector<Presheaf> args{action.dom};
        m.functions[sym] = function_from_table(
            args, action.cod,
            [&action](const std::string& o, const std::vector<std::string>& comps) {
                return action.apply(o, comps[0]);
            },
            cfg);
    }
    return m;
}

Presheaf model_as_presheaf(const PresheafTheoryResult& pt, const ProductSite& site,
                           const Interpretation& m, const std::string& name, const Config& cfg) {
    std::map<std::string, Presheaf> slices;
    for (const auto& [o, sort] : pt.sort_of_object) slices.emplace(o, m.sorts.at(sort));
    Presheaf out;
    out.name = name;
    out.base = site.product;
    for (const auto& [o, slice] : slices)
        for (const std::string& c : site.right->objects)
            out.at[ProductSite::pair_id(o, c)] = slice.level(c);
    for (const Morphism& pm : site.product->morphisms) {
        if (site.product->is_identity(pm.id)) continue;
        auto [alpha, delta] = site.split_mor(pm.id);
        const Morphism& am = site.left->mor(alpha);
        const Presheaf& dst_slice = slices.at(am.dst);
        fincat::ProductResult prod =
            fincat::finite_product({dst_slice}, site.right, cfg);
        for (const std::string& x : dst_slice.level(site.right->mor(delta).dst)) {
            // first the site action inside the dst slice, then the structure map
            std::string mid = site.right->is_identity(delta) ? x : dst_slice.apply(delta, x);
            std::string y;
            if (site.left->is_identity(alpha)) {
                y = mid;
            } else {
                const PresheafMap& fn = m.functions.at(pt.symbol_of_morphism.at(alpha));
                std::string obj = site.right->mor(delta).src;
                y = fn.apply(obj, prod.tuple_elem(obj, {mid}));
            }
            out.act[{pm.id, x}] = y;
        }
    }
    (void)cfg;
    return fincat::make_presheaf(std::move(out));
}

SetModel set_presheaf_as_model(const PresheafTheoryResult& pt, const Presheaf& f) {
    SetModel m;
    m.lang = pt.theory.lang;
    for (const auto& [o, sort] : pt.sort_of_object) m.sorts[sort] = f.level(o);
    for (const auto& [mor, sym] : pt.symbol_of_morphism) {
        const Morphism& mm = f.base->mor(mor);
        std::map<std::vector<std::string>, std::string> table;
        for (const std::string& x : f.level(mm.dst)) table[{x}] = f.apply(mor, x);
        m.functions[sym] = std::move(table);
    }
    return m;
}

Presheaf set_model_as_presheaf(const PresheafTheoryResult& pt, const CatPtr& base,
                               const SetModel& m, const std::string& name) {
    Presheaf out;
    out.name = name;
    out.base = base;
    for (const auto& [o, sort] : pt.sort_of_object) out.at[o] = m.sorts.at(sort);
    for (const auto& [mor, sym] : pt.symbol_of_morphism) {
        const Morphism& mm = base->mor(mor);
        for (const std::string& x : out.at.at(mm.dst))
            out.act[{mor, x}] = m.functions.at(sym).at({x});
    }
    return fincat::make_presheaf(std::move(out));
}

SetModel category_as_set_model(const fincat::FinCategory& c) {
    Theory t = category_theory();
    SetModel m;
    m.lang = t.lang;
    m.sorts["O"] = c.objects;
    for (const Morphism& mo : c.morphisms) m.sorts["A"].push_back(mo.id);
    std::map<std::vector<std::string>, std::string> s, tt, i, p1, p2, comp;
    for (const Morphism& mo : c.morphisms) {
        s[{mo.id}] = mo.src;
        tt[{mo.id}] = mo.dst;
    }
    for (const std::string& o : c.objects) i[{o}] = c.identity.at(o);
    for (const Morphism& f : c.morphisms)
        for (const Morphism& g : c.morphisms) {
            if (f.dst != g.src) continue;
            std::string pid = "(" + f.id + ";" + g.id + ")";
            m.sorts["P"].push_back(pid);
            p1[{pid}] = f.id;
            p2[{pid}] = g.id;
            comp[{pid}] = c.compose(g.id, f.id);
        }
    std::sort(m.sorts["P"].begin(), m.sorts["P"].end());
    m.functions["s"] = std::move(s);
    m.functions["t"] = std::move(tt);
    m.functions["i"] = std::move(i);
    m.functions["p1"] = std::move(p1);
    m.functions["p2"] = std::move(p2);
    m.functions["c"] = std::move(comp);
    return m;
}

fincat::FinCategory set_model_as_category(const SetModel& m, const std::string& name) {
    fincat::FinCategory c;
    c.name = name;
    c.objects = m.sorts.at("O");
    for (const std::string& a : m.sorts.at("A"))
        c.morphisms.push_back(
            {a, m.functions.at("s").at({a}), m.functions.at("t").at({a})});
    for (const std::string& o : c.objects) c.identity[o] = m.functions.at("i").at({o});
    for (const std::string& p : m.sorts.at("P")) {
        const std::string& f = m.functions.at("p1").at({p});
        const std::string& g = m.functions.at("p2").at({p});
        c.comp[{g, f}] = m.functions.at("c").at({p});
    }
    std::sort(c.objects.begin(), c.objects.end());
    std::sort(c.morphisms.begin(), c.morphisms.end(),
              [](const Morphism& x, const Morphism& y) { return x.id < y.id; });
    return c;
}

Interpretation constant_interpretation(const SetModel& m, const CatPtr& base,
                                       const std::string& name, const Config& cfg) {
    Interpretation out;
    out.name = name;
    out.base = base;
    out.lang = m.lang;
    for (const auto& [s, carrier] : m.sorts)
        out.sorts[s] = fincat::constant_presheaf(base, carrier, s);
    for (const FunctionSymbol& f : m.lang.functions) {
        const auto& table = m.functions.at(f.name);
        if (f.args.empty()) {
            fincat::ProductResult prod = fincat::finite_product({}, base, cfg);
            PresheafMap c;
            c.name = f.name;
            c.dom = prod.obj;
            c.cod = out.sorts.at(f.result);
            for (const std::string& o : base->objects) c.cmp[{o, "()"}] = table.at({});
            out.functions[f.name] = fincat::make_map(std::move(c));
            continue;
        }
        std::vector<Presheaf> args;
        for (const std::string& a : f.args) args.push_back(out.sorts.at(a));
        out.functions[f.name] = function_from_table(
            args, out.sorts.at(f.result),
            [&table](const std::string&, const std::vector<std::string>& comps) {
                return table.at(comps);
            },
            cfg);
    }
    for (const RelationSymbol& r : m.lang.relations) {
        std::vector<Presheaf> args;
        for (const std::string& a : r.args) args.push_back(out.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(args, base, cfg);
        std::map<std::string, std::set<std::string>> lv;
        for (const std::string& o : base->objects)
            for (const auto& tuple : m.relations.at(r.name))
                lv[o].insert(prod.tuple_elem(o, tuple));
        out.relations[r.name] = subobj::make_subobject(prod.obj, std::move(lv));
    }
    if (auto issue = check_interpretation(out, cfg))
        throw InvariantError("constant_interpretation: " + *issue);
    return out;
}

SetModel model_at_object(const Interpretation& m, const std::string& obj, const Config& cfg) {
    SetModel out;
    out.lang = m.lang;
    for (const auto& [s, p] : m.sorts) out.sorts[s] = p.level(obj);
    for (const FunctionSymbol& f : m.lang.functions) {
        std::vector<Presheaf> args;
        for (const std::string& a : f.args) args.push_back(m.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(args, m.base, cfg);
        std::map<std::vector<std::string>, std::string> table;
        for (const auto& [key, comps] : prod.components) {
            if (key.first != obj) continue;
            table[comps] = m.functions.at(f.name).apply(obj, key.second);
        }
        out.functions[f.name] = std::move(table);
    }
    for (const RelationSymbol& r : m.lang.relations) {
        std::vector<Presheaf> args;
        for (const std::string& a : r.args) args.push_back(m.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(args, m.base, cfg);
        std::set<std::vector<std::string>> rel;
        for (const std::string& x : m.relations.at(r.name).levels.at(obj))
            rel.insert(prod.components.at({obj, x}));
        out.relations[r.name] = std::move(rel);
    }
    return out;
}

}  // namespace sheafsmith::logic
