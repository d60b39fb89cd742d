#include "sheafsmith/site.hpp"

#include <algorithm>
#include <sstream>

#include "sheafsmith/theories.hpp"

namespace sheafsmith::site {

using fincat::Morphism;
using subobj::pullback_sieve;
using subobj::sieve_elem;

bool GrothendieckTopology::covering(const std::string& obj, const Sieve& s) const {
    auto it = covers.find(obj);
    if (it == covers.end()) return false;
    return std::find(it->second.begin(), it->second.end(), s) != it->second.end();
}

namespace {

bool is_sieve_on(const CatPtr& base, const std::string& obj, const Sieve& s, std::string& why) {
    for (const std::string& f : s) {
        if (!base->has_mor(f)) {
            why = "unknown morphism '" + f + "'";
            return false;
        }
        const Morphism& mf = base->mor(f);
        if (mf.dst != obj) {
            why = "'" + f + "' does not land in " + obj;
            return false;
        }
        for (const Morphism& g : base->morphisms) {
            if (g.dst != mf.src) continue;
            std::string fg = base->compose(f, g.id);
            if (!s.count(fg)) {
                why = "not right-closed: " + f + " o " + g.id + " = " + fg + " missing";
                return false;
            }
        }
    }
    return true;
}

Sieve maximal(const CatPtr& base, const std::string& obj) {
    auto v = base->into(obj);
    return Sieve(v.begin(), v.end());
}

}  // namespace

std::optional<TopologyIssue> check_topology(const GrothendieckTopology& j, const Config& cfg) {
    const CatPtr& base = j.base;
    for (const auto& [o, sieves] : j.covers) {
        if (!base->has_object(o)) return TopologyIssue{"NotASieve", "unknown object '" + o + "'"};
        for (const Sieve& s : sieves) {
            std::string why;
            if (!is_sieve_on(base, o, s, why))
                return TopologyIssue{"NotASieve", "on " + o + ": " + why};
        }
    }
    for (const std::string& o : base->objects) {
        if (!j.covering(o, maximal(base, o)))
            return TopologyIssue{"MaximalityFail", "maximal sieve on " + o + " is not covering"};
    }
    for (const auto& [o, sieves] : j.covers)
        for (const Sieve& s : sieves)
            for (const std::string& g : base->into(o)) {
                const Morphism& gm = base->mor(g);
                if (!j.covering(gm.src, pullback_sieve(base, s, g)))
                    return TopologyIssue{"StabilityFail", "pullback of a cover of " + o +
                                                              " along " + g + " is not covering"};
            }
    for (const std::string& o : base->objects) {
        for (const Sieve& s : subobj::all_sieves_on(base, o, cfg)) {
            if (j.covering(o, s)) continue;
            for (const Sieve& r : j.covers.at(o)) {
                bool locally = true;
                for (const std::string& g : r) {
                    const Morphism& gm = base->mor(g);
                    if (!j.covering(gm.src, pullback_sieve(base, s, g))) {
                        locally = false;
                        break;
                    }
                }
                if (locally)
                    return TopologyIssue{"TransitivityFail",
                                         "sieve " + sieve_elem(s) + " on " + o +
                                             " is locally covering but not covering"};
            }
        }
    }
    return std::nullopt;
}

GrothendieckTopology close_coverage(const CatPtr& base,
                                    const std::map<std::string, std::vector<Sieve>>& gens,
                                    const std::string& name, const Config& cfg) {
    GrothendieckTopology j;
    j.name = name;
    j.base = base;
    std::map<std::string, std::set<Sieve>> covers;
    for (const std::string& o : base->objects) covers[o].insert(maximal(base, o));
    for (const auto& [o, sieves] : gens)
        for (const Sieve& s : sieves) {
            std::string why;
            if (!base->has_object(o) || !is_sieve_on(base, o, s, why))
                throw InvariantError("close_coverage: NotASieve on '" + o + "': " + why);
            covers[o].insert(s);
        }
    std::map<std::string, std::vector<Sieve>> all;
    for (const std::string& o : base->objects) all[o] = subobj::all_sieves_on(base, o, cfg);
    bool changed = true;
    while (changed) {
        changed = false;
        // pullback stability
        for (const std::string& o : base->objects) {
            std::vector<Sieve> snapshot(covers[o].begin(), covers[o].end());
            for (const Sieve& s : snapshot)
                for (const std::string& g : base->into(o)) {
                    const Morphism& gm = base->mor(g);
                    if (covers[gm.src].insert(pullback_sieve(base, s, g)).second) changed = true;
                }
        }
        // transitivity
        for (const std::string& o : base->objects)
            for (const Sieve& s : all[o]) {
                if (covers[o].count(s)) continue;
                bool add = false;
                for (const Sieve& r : covers[o]) {
                    bool locally = true;
                    for (const std::string& g : r) {
                        const Morphism& gm = base->mor(g);
                        if (!covers[gm.src].count(pullback_sieve(base, s, g))) {
                            locally = false;
                            break;
                        }
                    }
                    if (locally) {
                        add = true;
                        break;
                    }
                }
                if (add) {
                    covers[o].insert(s);
                    changed = true;
                }
            }
    }
    for (const std::string& o : base->objects)
        j.covers[o] = std::vector<Sieve>(covers[o].begin(), covers[o].end());
    if (auto issue = check_topology(j, cfg))
        throw InvariantError("close_coverage: [" + issue->code + "] " + issue->message);
    return j;
}

GrothendieckTopology trivial_topology(const CatPtr& base) {
    GrothendieckTopology j;
    j.name = "trivial";
    j.base = base;
    for (const std::string& o : base->objects) j.covers[o] = {maximal(base, o)};
    return j;
}

// ---------------------------------------------------------------------------
// Matching families and the sheaf condition

std::vector<MatchingFamily> matching_families(const Presheaf& f, const std::string& obj,
                                              const Sieve& s) {
    (void)obj;
    const CatPtr& base = f.base;
    std::vector<std::string> members(s.begin(), s.end());
    std::vector<MatchingFamily> out;
    MatchingFamily cur;

    // assigning phi(m) forces phi(m∘g) = F(g)(phi(m)) for all g
    std::function<bool(const std::string&, const std::string&,
                       std::vector<std::string>&)>
        assign = [&](const std::string& mem, const std::string& x,
                     std::vector<std::string>& trail) {
            std::vector<std::pair<std::string, std::string>> queue{{mem, x}};
            while (!queue.empty()) {
                auto [mm, xx] = queue.back();
                queue.pop_back();
                auto it = cur.find(mm);
                if (it != cur.end()) {
                    if (it->second != xx) return false;
                    continue;
                }
                cur[mm] = xx;
                trail.push_back(mm);
                const Morphism& m = base->mor(mm);
                for (const Morphism& g : base->morphisms) {
                    if (g.dst != m.src) continue;
                    queue.push_back({base->compose(mm, g.id), f.apply(g.id, xx)});
                }
            }
            return true;
        };

    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        while (i < members.size() && cur.count(members[i])) ++i;
        if (i == members.size()) {
            out.push_back(cur);
            return;
        }
        const Morphism& m = base->mor(members[i]);
        for (const std::string& x : f.level(m.src)) {
            std::vector<std::string> trail;
            if (assign(members[i], x, trail)) rec(i + 1);
            for (const std::string& k : trail) cur.erase(k);
        }
    };
    rec(0);
    return out;
}

namespace {

MatchingFamily restriction_family(const Presheaf& f, const Sieve& s, const std::string& x) {
    MatchingFamily fam;
    for (const std::string& mem : s) fam[mem] = f.apply(mem, x);
    return fam;
}

// element ids may contain arbitrary printable characters, so family
// serializations use control characters as separators
constexpr char kPairSep = '\x1e';
constexpr char kEntrySep = '\x1f';

std::string family_key(const MatchingFamily& fam) {
    std::ostringstream os;
    for (const auto& [m, x] : fam) os << m << kPairSep << x << kEntrySep;
    return os.str();
}

}  // namespace

SheafCheck is_sheaf(const Presheaf& f, const GrothendieckTopology& j) {
    for (const auto& [o, sieves] : j.covers)
        for (const Sieve& s : sieves) {
            std::vector<MatchingFamily> fams = matching_families(f, o, s);
            std::set<std::string> images;
            for (const std::string& x : f.level(o)) {
                if (!images.insert(family_key(restriction_family(f, s, x))).second)
                    return SheafCheck{false, o, s, "not injective"};
            }
            for (const MatchingFamily& fam : fams)
                if (!images.count(family_key(fam)))
                    return SheafCheck{false, o, s, "not surjective"};
        }
    return SheafCheck{};
}

bool is_separated(const Presheaf& f, const GrothendieckTopology& j) {
    for (const auto& [o, sieves] : j.covers)
        for (const Sieve& s : sieves) {
            std::set<std::string> images;
            for (const std::string& x : f.level(o))
                if (!images.insert(family_key(restriction_family(f, s, x))).second) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Plus construction and sheafification

namespace {

std::string pair_tag(const Sieve& s, const MatchingFamily& fam) {
    return sieve_elem(s) + "\x1d" + family_key(fam);
}

std::pair<Sieve, MatchingFamily> parse_tag(const std::string& tag) {
    std::size_t hash = tag.find('\x1d');
    Sieve s = subobj::sieve_members(tag.substr(0, hash));
    MatchingFamily fam;
    std::string rest = tag.substr(hash + 1);
    std::size_t i = 0;
    while (i < rest.size()) {
        std::size_t mid = rest.find(kPairSep, i);
        std::size_t end = rest.find(kEntrySep, mid);
        fam[rest.substr(i, mid - i)] = rest.substr(mid + 1, end - mid - 1);
        i = end + 1;
    }
    return {std::move(s), std::move(fam)};
}

struct TagUnionFind {
    std::map<std::string, std::string> parent;
    void add(const std::string& x) {
        if (!parent.count(x)) parent[x] = x;
    }
    const std::string& find(const std::string& x) {
        std::string* p = &parent.at(x);
        while (*p != parent.at(*p)) {
            *p = parent.at(parent.at(*p));
            p = &parent.at(*p);
        }
        return *p;
    }
    void unite(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (rb < ra) std::swap(ra, rb);
        parent[rb] = ra;
    }
};

}  // namespace

PlusResult plus_construction(const Presheaf& f, const GrothendieckTopology& j, const Config& cfg) {
    const CatPtr& base = f.base;
    PlusResult res;
    Presheaf plus;
    plus.name = f.name + "+";
    plus.base = base;
    for (const std::string& o : base->objects) {
        TagUnionFind uf;
        std::map<std::string, std::pair<Sieve, MatchingFamily>> pairs;
        std::int64_t count = 0;
        for (const Sieve& s : j.covers.at(o))
            for (const MatchingFamily& fam : matching_families(f, o, s)) {
                std::string tag = pair_tag(s, fam);
                uf.add(tag);
                pairs[tag] = {s, fam};
                guard_size(++count, cfg, "plus_construction");
            }
        // refinement: restrict a family to any smaller cover
        for (const auto& [tag, sf] : pairs) {
            const auto& [s, fam] = sf;
            for (const Sieve& s2 : j.covers.at(o)) {
                if (s2 == s) continue;
                if (!std::includes(s.begin(), s.end(), s2.begin(), s2.end())) continue;
                MatchingFamily restricted;
                for (const std::string& mem : s2) restricted[mem] = fam.at(mem);
                uf.unite(tag, pair_tag(s2, restricted));
            }
        }
        std::set<std::string> reps;
        for (const auto& [tag, p] : uf.parent) {
            (void)p;
            reps.insert(uf.find(tag));
        }
        std::map<std::string, std::string> rep_name;
        int i = 0;
        for (const std::string& r : reps) rep_name[r] = "p" + std::to_string(i++);
        std::vector<std::string> carrier;
        for (const auto& [r, nm] : rep_name) {
            (void)r;
            carrier.push_back(nm);
        }
        std::sort(carrier.begin(), carrier.end());
        plus.at[o] = std::move(carrier);
        for (const auto& [tag, p] : uf.parent) {
            (void)p;
            res.class_of[{o, tag}] = rep_name.at(uf.find(tag));
        }
    }
    // action: pull the sieve back and reindex the family
    for (const Morphism& g : base->morphisms) {
        if (base->is_identity(g.id)) continue;
        std::map<std::string, std::string> action;
        for (const auto& [key, cls] : res.class_of) {
            if (key.first != g.dst) continue;
            auto [s, fam] = parse_tag(key.second);
            Sieve pb = pullback_sieve(base, s, g.id);
            MatchingFamily pfam;
            for (const std::string& h : pb) pfam[h] = fam.at(base->compose(g.id, h));
            std::string target = res.class_of.at({g.src, pair_tag(pb, pfam)});
            auto it = action.find(cls);
            if (it != action.end() && it->second != target)
                throw InvariantError("plus_construction: action not well defined");
            action[cls] = target;
        }
        for (const auto& [from, to] : action) plus.act[{g.id, from}] = to;
    }
    res.plus = fincat::make_presheaf(std::move(plus));
    PresheafMap unit;
    unit.name = "eta_" + f.name;
    unit.dom = f;
    unit.cod = res.plus;
    for (const std::string& o : base->objects) {
        Sieve s = maximal(base, o);
        for (const std::string& x : f.level(o))
            unit.cmp[{o, x}] = res.class_of.at({o, pair_tag(s, restriction_family(f, s, x))});
    }
    res.unit = fincat::make_map(std::move(unit));
    return res;
}

SheafificationResult sheafify(const Presheaf& f, const GrothendieckTopology& j,
                              const Config& cfg) {
    SheafificationResult res;
    res.input = f;
    PlusResult p1 = plus_construction(f, j, cfg);
    res.separated = p1.plus;
    res.unit1 = p1.unit;
    PlusResult p2 = plus_construction(p1.plus, j, cfg);
    res.output = p2.plus;
    res.unit2 = p2.unit;
    res.unit = fincat::compose_maps(p2.unit, p1.unit);
    SheafCheck check = is_sheaf(res.output, j);
    if (!check.ok)
        throw InvariantError("sheafify: double plus failed the sheaf condition at " + check.object);
    return res;
}

PresheafMap plus_map(const PresheafMap& m, const GrothendieckTopology& j, const PlusResult& dom,
                     const PlusResult& cod) {
    (void)j;
    PresheafMap out;
    out.name = m.name + "+";
    out.dom = dom.plus;
    out.cod = cod.plus;
    for (const auto& [key, cls] : dom.class_of) {
        auto [s, fam] = parse_tag(key.second);
        MatchingFamily image;
        for (const auto& [mem, x] : fam)
            image[mem] = m.apply(m.dom.base->mor(mem).src, x);
        std::string target = cod.class_of.at({key.first, pair_tag(s, image)});
        auto it = out.cmp.find({key.first, cls});
        if (it != out.cmp.end() && it->second != target)
            throw InvariantError("plus_map: not well defined");
        out.cmp[{key.first, cls}] = target;
    }
    return fincat::make_map(std::move(out));
}

PresheafMap sheafify_map(const PresheafMap& m, const GrothendieckTopology& j, const Config& cfg) {
    PlusResult dom1 = plus_construction(m.dom, j, cfg);
    PlusResult cod1 = plus_construction(m.cod, j, cfg);
    PresheafMap once = plus_map(m, j, dom1, cod1);
    PlusResult dom2 = plus_construction(dom1.plus, j, cfg);
    PlusResult cod2 = plus_construction(cod1.plus, j, cfg);
    return plus_map(once, j, dom2, cod2);
}

bool reflection_check(const Presheaf& f, const GrothendieckTopology& j, const Presheaf& sheaf_g,
                      const Config& cfg) {
    SheafificationResult sh = sheafify(f, j, cfg);
    std::set<std::string> downstairs;
    for (const PresheafMap& t : fincat::all_natural_maps(f, sheaf_g))
        downstairs.insert(fincat::serialize_map(t));
    std::set<std::string> transported;
    for (const PresheafMap& k : fincat::all_natural_maps(sh.output, sheaf_g))
        transported.insert(fincat::serialize_map(fincat::compose_maps(k, sh.unit)));
    return transported == downstairs;
}

// ---------------------------------------------------------------------------
// Left exactness

PresheafMap sheafify_limit_comparison(const GrothendieckTopology& j, const fincat::Diagram& d,
                                      const Config& cfg) {
    const CatPtr& base = j.base;
    fincat::LimitResult lim = fincat::finite_limit(base, d, cfg);
    SheafificationResult alim = sheafify(lim.apex, j, cfg);
    fincat::Diagram ad;
    std::map<std::string, SheafificationResult> anodes;
    for (const auto& [n, p] : d.nodes) {
        anodes.emplace(n, sheafify(p, j, cfg));
        ad.add_node(n, anodes.at(n).output);
    }
    for (const auto& e : d.edges)
        ad.add_edge(e.name, e.src, e.dst, sheafify_map(e.map, j, cfg));
    fincat::LimitResult alim2 = fincat::finite_limit(base, ad, cfg);

    // comparison x -> tuple of sheafified legs
    std::map<std::string, PresheafMap> alegs;
    for (const auto& [n, leg] : lim.legs) alegs.emplace(n, sheafify_map(leg, j, cfg));
    PresheafMap cmp;
    cmp.name = "comparison";
    cmp.dom = alim.output;
    cmp.cod = alim2.apex;
    for (const std::string& o : base->objects)
        for (const std::string& x : alim.output.level(o)) {
            std::string tuple = "(";
            bool first = true;
            for (const auto& [n, aleg] : alegs) {
                if (!first) tuple += ",";
                tuple += aleg.apply(o, x);
                first = false;
            }
            tuple += ")";
            if (!alim2.apex.has_elem(o, tuple))
                throw InvariantError("sheafify_limit_comparison: tuple misses the limit");
            cmp.cmp[{o, x}] = tuple;
        }
    return fincat::make_map(std::move(cmp));
}

LeftExactnessReport left_exactness_check(const GrothendieckTopology& j,
                                         const std::vector<fincat::Diagram>& diagrams,
                                         const Config& cfg) {
    LeftExactnessReport rep;
    for (std::size_t i = 0; i < diagrams.size(); ++i) {
        PresheafMap cmp = sheafify_limit_comparison(j, diagrams[i], cfg);
        if (!fincat::is_iso(cmp)) {
            rep.ok = false;
            rep.detail = "comparison map is not an isomorphism for diagram " + std::to_string(i);
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Transport of interpretations

logic::Interpretation sheafify_interpretation(const logic::Interpretation& m,
                                              const GrothendieckTopology& j, const Config& cfg) {
    logic::Interpretation out;
    out.name = "a(" + m.name + ")";
    out.base = m.base;
    out.lang = m.lang;
    for (const auto& [s, p] : m.sorts) out.sorts[s] = sheafify(p, j, cfg).output;

    // product comparison: a(prod args) -> prod(a args), via a diagram whose
    // node order matches the factor order
    auto product_comparison = [&](const std::vector<std::string>& arg_sorts) -> PresheafMap {
        fincat::Diagram d;
        for (std::size_t i = 0; i < arg_sorts.size(); ++i) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "t%03zu", i);
            d.add_node(buf, m.sorts.at(arg_sorts[i]));
        }
        return sheafify_limit_comparison(j, d, cfg);
    };

    for (const logic::FunctionSymbol& f : m.lang.functions) {
        PresheafMap af = sheafify_map(m.functions.at(f.name), j, cfg);
        PresheafMap cmpmap = product_comparison(f.args);
        if (!fincat::is_iso(cmpmap))
            throw InvariantError("sheafify_interpretation: product comparison not iso");
        PresheafMap transported = fincat::compose_maps(af, fincat::invert(cmpmap));
        // retype dom/cod onto the canonical product of sheafified sorts
        std::vector<Presheaf> aargs;
        for (const std::string& a : f.args) aargs.push_back(out.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(aargs, m.base, cfg);
        PresheafMap fixed;
        fixed.name = f.name;
        fixed.dom = prod.obj;
        fixed.cod = out.sorts.at(f.result);
        fixed.cmp = transported.cmp;
        out.functions[f.name] = fincat::make_map(std::move(fixed));
    }
    for (const logic::RelationSymbol& r : m.lang.relations) {
        PresheafMap inc = subobj::subobject_as_mono(m.relations.at(r.name));
        PresheafMap ainc = sheafify_map(inc, j, cfg);
        PresheafMap cmpmap = product_comparison(r.args);
        if (!fincat::is_iso(cmpmap))
            throw InvariantError("sheafify_interpretation: product comparison not iso");
        PresheafMap into_prod = fincat::compose_maps(cmpmap, ainc);
        if (!fincat::is_mono(into_prod))
            throw InvariantError("sheafify_interpretation: sheafified relation not mono");
        std::vector<Presheaf> aargs;
        for (const std::string& a : r.args) aargs.push_back(out.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(aargs, m.base, cfg);
        std::map<std::string, std::set<std::string>> lv;
        for (const auto& [o, xs] : into_prod.dom.at)
            for (const std::string& x : xs) lv[o].insert(into_prod.apply(o, x));
        out.relations[r.name] = subobj::make_subobject(prod.obj, std::move(lv));
    }
    if (auto issue = logic::check_interpretation(out, cfg))
        throw InvariantError("sheafify_interpretation: " + *issue);
    return out;
}

PreservationReport coherent_preservation_sheafify(const logic::Interpretation& m,
                                                  const logic::Theory& t,
                                                  const GrothendieckTopology& j,
                                                  const Config& cfg) {
    PreservationReport rep;
    logic::Interpretation am = sheafify_interpretation(m, j, cfg);
    logic::Satisfaction s = satisfies(am, t, cfg);
    if (s.undetermined) {
        rep.ok = false;
        rep.undetermined = true;
        rep.detail = "undetermined at cap: " + s.axiom;
        return rep;
    }
    if (!s.ok) {
        rep.ok = false;
        rep.detail = "sheafified model fails axiom " + s.axiom + " at " + s.object;
    }
    return rep;
}

PreservationReport coherent_preservation_evaluation(const fincat::ProductSite& site,
                                                    const logic::Interpretation& m,
                                                    const logic::Theory& t, const Config& cfg) {
    PreservationReport rep;
    logic::TransposedModels tm = logic::transpose_to_diagram(site, m, cfg);
    for (const auto& [d, md] : tm.at) {
        logic::Satisfaction s = satisfies(md, t, cfg);
        if (s.undetermined) {
            rep.ok = false;
            rep.undetermined = true;
            rep.detail = "undetermined at cap at object " + d;
            return rep;
        }
        if (!s.ok) {
            rep.ok = false;
            rep.detail = "evaluation at " + d + " fails axiom " + s.axiom;
            return rep;
        }
    }
    return rep;
}

ConservativityReport joint_conservativity_check(const PresheafMap& f) {
    ConservativityReport rep;
    bool global = fincat::is_iso(f);
    bool all_objects = true;
    std::string first_bad;
    for (const std::string& o : f.dom.base->objects) {
        std::set<std::string> image;
        bool inj = true;
        for (const std::string& x : f.dom.level(o))
            if (!image.insert(f.apply(o, x)).second) inj = false;
        bool bij = inj && image.size() == f.cod.level(o).size();
        if (!bij && first_bad.empty()) first_bad = o;
        all_objects = all_objects && bij;
    }
    if (global != all_objects) {
        rep.ok = false;
        rep.detail = "iso and objectwise bijectivity disagree";
        return rep;
    }
    if (!global) rep.detail = "not an isomorphism; first failing object: " + first_bad;
    return rep;
}

}  // namespace sheafsmith::site
