#pragma once

// Shared test fixtures built independently of the library constructions
// they are used to check.

#include <map>
#include <string>
#include <vector>

#include "sheafsmith/fincat.hpp"
#include "sheafsmith/presheaf.hpp"

namespace testhelp {

// The truncated simplex category built by direct enumeration of
// order-preserving maps; composition is function composition.
// Morphism ids: "a<m><n>_<values>", e.g. [1] -> [2] with 0,2 is "a12_02".
inline sheafsmith::fincat::CatPtr simplex_cat(int n_max) {
    using namespace sheafsmith::fincat;
    auto obj = [](int n) { return "[" + std::to_string(n) + "]"; };
    struct OPMap {
        int m, n;
        std::vector<int> v;
    };
    auto mor_name = [](const OPMap& f) {
        std::string s = "a" + std::to_string(f.m) + std::to_string(f.n) + "_";
        for (int x : f.v) s += std::to_string(x);
        return s;
    };
    std::vector<OPMap> maps;
    for (int m = 0; m <= n_max; ++m)
        for (int n = 0; n <= n_max; ++n) {
            std::vector<std::vector<int>> partial{{}};
            for (int i = 0; i <= m; ++i) {
                std::vector<std::vector<int>> next;
                for (const auto& p : partial) {
                    int lo = p.empty() ? 0 : p.back();
                    for (int x = lo; x <= n; ++x) {
                        auto q = p;
                        q.push_back(x);
                        next.push_back(q);
                    }
                }
                partial = next;
            }
            for (const auto& v : partial) maps.push_back({m, n, v});
        }
    FinCategory c;
    c.name = "Delta<=" + std::to_string(n_max);
    for (int n = 0; n <= n_max; ++n) c.objects.push_back(obj(n));
    for (const auto& f : maps) c.morphisms.push_back({mor_name(f), obj(f.m), obj(f.n)});
    for (int n = 0; n <= n_max; ++n) {
        OPMap idm{n, n, {}};
        for (int i = 0; i <= n; ++i) idm.v.push_back(i);
        c.identity[obj(n)] = mor_name(idm);
    }
    for (const auto& f : maps)
        for (const auto& g : maps) {
            if (f.n != g.m) continue;
            OPMap gf{f.m, g.n, {}};
            for (int i = 0; i <= f.m; ++i) gf.v.push_back(g.v[f.v[i]]);
            c.comp[{mor_name(g), mor_name(f)}] = mor_name(gf);
        }
    return make_category(std::move(c));
}

// Subpresheaf of y([1]) over Delta<=1 spanned by the given elements, with
// its inclusion. Elements use the naming of simplex_cat(1).
inline sheafsmith::fincat::PresheafMap sub_of_delta1(
    const sheafsmith::fincat::CatPtr& delta1,
    const std::vector<std::string>& at0, const std::vector<std::string>& at1,
    const std::string& name) {
    using namespace sheafsmith::fincat;
    Presheaf d1 = yoneda(delta1, "[1]");
    Presheaf sub;
    sub.name = name;
    sub.base = delta1;
    sub.at["[0]"] = at0;
    sub.at["[1]"] = at1;
    for (const Morphism& m : delta1->morphisms) {
        if (delta1->is_identity(m.id)) continue;
        for (const std::string& x : sub.at.at(m.dst)) sub.act[{m.id, x}] = d1.apply(m.id, x);
    }
    sub = make_presheaf(std::move(sub));
    PresheafMap inc;
    inc.name = name + ">d1";
    inc.dom = sub;
    inc.cod = d1;
    for (const auto& [o, xs] : sub.at)
        for (const std::string& x : xs) inc.cmp[{o, x}] = x;
    return make_map(std::move(inc));
}

// boundary and horn inclusions of the 1-simplex over Delta<=1
inline sheafsmith::fincat::PresheafMap boundary1(const sheafsmith::fincat::CatPtr& delta1) {
    return sub_of_delta1(delta1, {"a01_0", "a01_1"}, {"a11_00", "a11_11"}, "bd1");
}
inline sheafsmith::fincat::PresheafMap horn10(const sheafsmith::fincat::CatPtr& delta1) {
    return sub_of_delta1(delta1, {"a01_0"}, {"a11_00"}, "horn10");
}
inline sheafsmith::fincat::PresheafMap horn11(const sheafsmith::fincat::CatPtr& delta1) {
    return sub_of_delta1(delta1, {"a01_1"}, {"a11_11"}, "horn11");
}

// Constant presheaf on a subset, with the inclusion into the ambient
// constant presheaf.
inline sheafsmith::fincat::PresheafMap constant_inclusion(
    const sheafsmith::fincat::CatPtr& base, const std::vector<std::string>& sub,
    const std::vector<std::string>& whole) {
    using namespace sheafsmith::fincat;
    Presheaf s = constant_presheaf(base, sub, "sub");
    Presheaf w = constant_presheaf(base, whole, "whole");
    PresheafMap inc;
    inc.name = "inc";
    inc.dom = s;
    inc.cod = w;
    for (const auto& [o, xs] : s.at)
        for (const std::string& x : xs) inc.cmp[{o, x}] = x;
    return make_map(std::move(inc));
}

}  // namespace testhelp
