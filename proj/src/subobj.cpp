#include "sheafsmith/subobj.hpp"

#include <algorithm>
#include <sstream>

namespace sheafsmith::subobj {

using fincat::Morphism;

bool Subobject::contains(const std::string& obj, const std::string& x) const {
    auto it = levels.find(obj);
    return it != levels.end() && it->second.count(x) > 0;
}

std::int64_t Subobject::total_size() const {
    std::int64_t n = 0;
    for (const auto& [o, xs] : levels) n += static_cast<std::int64_t>(xs.size());
    return n;
}

std::optional<std::string> check_subobject(const Subobject& s) {
    for (const std::string& o : s.ambient.base->objects)
        if (!s.levels.count(o)) return "missing level at '" + o + "'";
    for (const auto& [o, xs] : s.levels) {
        if (!s.ambient.base->has_object(o)) return "level at unknown object '" + o + "'";
        for (const std::string& x : xs)
            if (!s.ambient.has_elem(o, x)) return "element '" + x + "' not in ambient at " + o;
    }
    for (const Morphism& m : s.ambient.base->morphisms) {
        if (s.ambient.base->is_identity(m.id)) continue;
        for (const std::string& x : s.levels.at(m.dst))
            if (!s.contains(m.src, s.ambient.apply(m.id, x)))
                return "not action-closed under '" + m.id + "' at '" + x + "'";
    }
    return std::nullopt;
}

Subobject make_subobject(Presheaf ambient, std::map<std::string, std::set<std::string>> levels) {
    Subobject s;
    s.ambient = std::move(ambient);
    s.levels = std::move(levels);
    for (const std::string& o : s.ambient.base->objects)
        if (!s.levels.count(o)) s.levels[o] = {};
    if (auto issue = check_subobject(s)) throw InvariantError("subobject: " + *issue);
    return s;
}

Subobject whole_subobject(const Presheaf& x) {
    std::map<std::string, std::set<std::string>> lv;
    for (const auto& [o, xs] : x.at) lv[o] = {xs.begin(), xs.end()};
    return make_subobject(x, std::move(lv));
}

Subobject empty_subobject(const Presheaf& x) { return make_subobject(x, {}); }

Subobject generated_subobject(const Presheaf& x,
                              const std::vector<std::pair<std::string, std::string>>& gens) {
    std::map<std::string, std::set<std::string>> lv;
    std::vector<std::pair<std::string, std::string>> todo = gens;
    while (!todo.empty()) {
        auto [c, e] = todo.back();
        todo.pop_back();
        if (!x.has_elem(c, e)) throw InvariantError("generated_subobject: unknown element");
        if (!lv[c].insert(e).second) continue;
        for (const Morphism& m : x.base->morphisms) {
            if (x.base->is_identity(m.id) || m.dst != c) continue;
            todo.push_back({m.src, x.apply(m.id, e)});
        }
    }
    return make_subobject(x, std::move(lv));
}

Subobject largest_closed_within(
    const Presheaf& x,
    const std::function<bool(const std::string& obj, const std::string& elem)>& keep) {
    std::map<std::string, std::set<std::string>> lv;
    for (const auto& [o, xs] : x.at)
        for (const std::string& e : xs)
            if (keep(o, e)) lv[o].insert(e);
    for (const std::string& o : x.base->objects)
        if (!lv.count(o)) lv[o] = {};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Morphism& m : x.base->morphisms) {
            if (x.base->is_identity(m.id)) continue;
            auto& dst = lv[m.dst];
            for (auto it = dst.begin(); it != dst.end();) {
                if (!lv[m.src].count(x.apply(m.id, *it))) {
                    it = dst.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
    }
    return make_subobject(x, std::move(lv));
}

bool leq(const Subobject& a, const Subobject& b) {
    for (const auto& [o, xs] : a.levels) {
        auto it = b.levels.find(o);
        for (const std::string& x : xs)
            if (it == b.levels.end() || !it->second.count(x)) return false;
    }
    return true;
}

std::vector<Subobject> enumerate_subobjects(const Presheaf& x, const Config& cfg) {
    // every action-closed subset is a union of element closures; walk the
    // join-semilattice they generate
    std::vector<std::map<std::string, std::set<std::string>>> closures;
    for (const auto& [o, xs] : x.at)
        for (const std::string& e : xs) closures.push_back(generated_subobject(x, {{o, e}}).levels);
    std::set<std::map<std::string, std::set<std::string>>> seen;
    std::map<std::string, std::set<std::string>> bottom;
    for (const std::string& o : x.base->objects) bottom[o] = {};
    seen.insert(bottom);
    std::vector<std::map<std::string, std::set<std::string>>> frontier{bottom};
    while (!frontier.empty()) {
        guard_size(static_cast<std::int64_t>(seen.size()), cfg, "enumerate_subobjects");
        std::vector<std::map<std::string, std::set<std::string>>> next;
        for (const auto& s : frontier)
            for (const auto& cl : closures) {
                auto u = s;
                for (const auto& [o, xs] : cl) u[o].insert(xs.begin(), xs.end());
                if (seen.insert(u).second) next.push_back(std::move(u));
            }
        frontier = std::move(next);
    }
    std::vector<Subobject> out;
    for (const auto& lv : seen) out.push_back(make_subobject(x, lv));
    return out;
}

Subobject meet(const Subobject& a, const Subobject& b) {
    if (!fincat::same_presheaf(a.ambient, b.ambient)) throw InvariantError("AmbientMismatch");
    std::map<std::string, std::set<std::string>> lv;
    for (const auto& [o, xs] : a.levels) {
        const auto& ys = b.levels.at(o);
        for (const std::string& x : xs)
            if (ys.count(x)) lv[o].insert(x);
    }
    return make_subobject(a.ambient, std::move(lv));
}

Subobject join(const Subobject& a, const Subobject& b) {
    if (!fincat::same_presheaf(a.ambient, b.ambient)) throw InvariantError("AmbientMismatch");
    std::map<std::string, std::set<std::string>> lv = a.levels;
    for (const auto& [o, xs] : b.levels) lv[o].insert(xs.begin(), xs.end());
    return make_subobject(a.ambient, std::move(lv));
}

Subobject implication(const Subobject& a, const Subobject& b) {
    if (!fincat::same_presheaf(a.ambient, b.ambient)) throw InvariantError("AmbientMismatch");
    return largest_closed_within(a.ambient, [&](const std::string& o, const std::string& x) {
        return !a.contains(o, x) || b.contains(o, x);
    });
}

Subobject negation(const Subobject& a) { return implication(a, empty_subobject(a.ambient)); }

Subobject heyting(const Subobject& a, const Subobject& b, HeytingOp op) {
    switch (op) {
        case HeytingOp::Meet: return meet(a, b);
        case HeytingOp::Join: return join(a, b);
        case HeytingOp::Implication: return implication(a, b);
        case HeytingOp::Negation: return negation(a);
    }
    throw InvariantError("heyting: bad op");
}

Subobject exists_along(const PresheafMap& f, const Subobject& s) {
    if (!fincat::same_presheaf(s.ambient, f.dom)) throw InvariantError("AmbientMismatch");
    std::map<std::string, std::set<std::string>> lv;
    for (const auto& [o, xs] : s.levels)
        for (const std::string& x : xs) lv[o].insert(f.apply(o, x));
    return make_subobject(f.cod, std::move(lv));
}

Subobject forall_along(const PresheafMap& f, const Subobject& s) {
    if (!fincat::same_presheaf(s.ambient, f.dom)) throw InvariantError("AmbientMismatch");
    return largest_closed_within(f.cod, [&](const std::string& o, const std::string& y) {
        for (const std::string& x : f.dom.level(o))
            if (f.apply(o, x) == y && !s.contains(o, x)) return false;
        return true;
    });
}

Subobject preimage(const PresheafMap& f, const Subobject& t) {
    if (!fincat::same_presheaf(t.ambient, f.cod)) throw InvariantError("AmbientMismatch");
    std::map<std::string, std::set<std::string>> lv;
    for (const auto& [o, xs] : f.dom.at)
        for (const std::string& x : xs)
            if (t.contains(o, f.apply(o, x))) lv[o].insert(x);
    return make_subobject(f.dom, std::move(lv));
}

PresheafMap subobject_as_mono(const Subobject& s) {
    Presheaf carrier;
    carrier.name = "sub";
    carrier.base = s.ambient.base;
    for (const auto& [o, xs] : s.levels) carrier.at[o] = {xs.begin(), xs.end()};
    for (const Morphism& m : s.ambient.base->morphisms) {
        if (s.ambient.base->is_identity(m.id)) continue;
        for (const std::string& x : s.levels.at(m.dst))
            carrier.act[{m.id, x}] = s.ambient.apply(m.id, x);
    }
    PresheafMap inc;
    inc.name = "mono";
    inc.dom = fincat::make_presheaf(std::move(carrier));
    inc.cod = s.ambient;
    for (const auto& [o, xs] : s.levels)
        for (const std::string& x : xs) inc.cmp[{o, x}] = x;
    return fincat::make_map(std::move(inc));
}

Subobject mono_as_subobject(const PresheafMap& m) {
    if (!fincat::is_mono(m)) throw InvariantError("mono_as_subobject: map is not mono");
    return exists_along(m, whole_subobject(m.dom));
}

// ---------------------------------------------------------------------------
// Subobject classifier

std::set<std::string> sieve_members(const std::string& elem) {
    if (elem.size() < 2 || elem.front() != '{' || elem.back() != '}')
        throw InvariantError("not a sieve element: '" + elem + "'");
    std::set<std::string> out;
    std::istringstream is(elem.substr(1, elem.size() - 2));
    std::string tok;
    while (is >> tok) out.insert(tok);
    return out;
}

std::string sieve_elem(const std::set<std::string>& members) {
    std::string s = "{";
    bool first = true;
    for (const std::string& m : members) {
        if (!first) s += " ";
        s += m;
        first = false;
    }
    return s + "}";
}

std::string maximal_sieve(const CatPtr& base, const std::string& obj) {
    auto into = base->into(obj);
    return sieve_elem({into.begin(), into.end()});
}

std::set<std::string> pullback_sieve(const CatPtr& base, const std::set<std::string>& sieve,
                                     const std::string& g) {
    const Morphism& gm = base->mor(g);
    std::set<std::string> pb;
    for (const std::string& h : base->into(gm.src))
        if (sieve.count(base->compose(g, h))) pb.insert(h);
    return pb;
}

namespace {

std::vector<std::set<std::string>> all_sieves(const CatPtr& base, const std::string& obj,
                                              const Config& cfg) {
    // principal sieves generated by each morphism into obj, then all unions
    std::vector<std::set<std::string>> principal;
    for (const std::string& f : base->into(obj)) {
        std::set<std::string> s;
        const Morphism& mf = base->mor(f);
        for (const Morphism& g : base->morphisms)
            if (g.dst == mf.src) s.insert(base->compose(f, g.id));
        principal.push_back(std::move(s));
    }
    std::set<std::set<std::string>> seen;
    seen.insert(std::set<std::string>{});
    std::vector<std::set<std::string>> frontier{std::set<std::string>{}};
    while (!frontier.empty()) {
        guard_size(static_cast<std::int64_t>(seen.size()), cfg, "all_sieves");
        std::vector<std::set<std::string>> next;
        for (const auto& s : frontier)
            for (const auto& p : principal) {
                auto u = s;
                u.insert(p.begin(), p.end());
                if (seen.insert(u).second) next.push_back(std::move(u));
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

}  // namespace

std::vector<std::set<std::string>> all_sieves_on(const CatPtr& base, const std::string& obj,
                                                 const Config& cfg) {
    return all_sieves(base, obj, cfg);
}

Presheaf omega_presheaf(const CatPtr& base, const Config& cfg) {
    Presheaf omega;
    omega.name = "Omega";
    omega.base = base;
    std::map<std::string, std::vector<std::set<std::string>>> sieves;
    for (const std::string& o : base->objects) {
        sieves[o] = all_sieves(base, o, cfg);
        std::vector<std::string> carrier;
        for (const auto& s : sieves[o]) carrier.push_back(sieve_elem(s));
        std::sort(carrier.begin(), carrier.end());
        omega.at[o] = std::move(carrier);
    }
    for (const Morphism& m : base->morphisms) {
        if (base->is_identity(m.id)) continue;
        // pullback sieve m*S = { g into src(m) | m∘g in S }
        for (const auto& s : sieves[m.dst]) {
            std::set<std::string> pb;
            for (const std::string& g : base->into(m.src))
                if (s.count(base->compose(m.id, g))) pb.insert(g);
            omega.act[{m.id, sieve_elem(s)}] = sieve_elem(pb);
        }
    }
    return fincat::make_presheaf(std::move(omega));
}

PresheafMap classify(const Subobject& s, const Presheaf& omega) {
    PresheafMap chi;
    chi.name = "classify";
    chi.dom = s.ambient;
    chi.cod = omega;
    for (const auto& [o, xs] : s.ambient.at)
        for (const std::string& x : xs) {
            std::set<std::string> sieve;
            for (const std::string& f : s.ambient.base->into(o))
                if (s.contains(s.ambient.base->mor(f).src, s.ambient.apply(f, x)))
                    sieve.insert(f);
            chi.cmp[{o, x}] = sieve_elem(sieve);
        }
    return fincat::make_map(std::move(chi));
}

Subobject unclassify(const PresheafMap& chi, const CatPtr& base) {
    std::map<std::string, std::set<std::string>> lv;
    for (const auto& [o, xs] : chi.dom.at) {
        std::string maximal = maximal_sieve(base, o);
        for (const std::string& x : xs)
            if (chi.apply(o, x) == maximal) lv[o].insert(x);
    }
    return make_subobject(chi.dom, std::move(lv));
}

}  // namespace sheafsmith::subobj
