#include "sheafsmith/factor.hpp"

#include <algorithm>
#include <cstdio>

namespace sheafsmith::factor {

using fincat::Diagram;
using fincat::Morphism;
using subobj::Subobject;

// ---------------------------------------------------------------------------
// Presheaf adapter

std::vector<PshArrows::Square> PshArrows::squares(const Map& i, const Map& m, const Config& cfg) {
    (void)cfg;
    std::vector<Square> out;
    for (const PresheafMap& top : fincat::all_natural_maps(i.dom, m.dom)) {
        std::map<std::pair<std::string, std::string>, std::string> pin;
        bool consistent = true;
        for (const auto& [key, a] : top.cmp) {
            std::string target = m.apply(key.first, a);
            auto [it, inserted] = pin.insert({{key.first, i.apply(key.first, key.second)}, target});
            if (!inserted && it->second != target) {
                consistent = false;
                break;
            }
        }
        if (!consistent) continue;
        fincat::for_each_natural_map(i.cod, m.cod, pin, nullptr, [&](const PresheafMap& bottom) {
            out.push_back({top, bottom});
            return true;
        });
    }
    return out;
}

std::optional<PshArrows::Map> PshArrows::lift(const Map& i, const Map& p, const Map& top,
                                              const Map& bottom, const Config& cfg) {
    (void)cfg;
    std::map<std::pair<std::string, std::string>, std::string> pin;
    for (const auto& [key, a] : top.cmp) {
        auto [it, inserted] = pin.insert({{key.first, i.apply(key.first, key.second)}, a});
        if (!inserted && it->second != a) return std::nullopt;
    }
    // candidates: fibers of p over bottom
    auto candidates = [&](const std::string& obj, const std::string& b) {
        std::vector<std::string> cs;
        std::string target = bottom.apply(obj, b);
        for (const std::string& x : p.dom.level(obj))
            if (p.apply(obj, x) == target) cs.push_back(x);
        return cs;
    };
    std::optional<Map> found;
    fincat::for_each_natural_map(i.cod, p.dom, pin, candidates, [&](const PresheafMap& l) {
        found = l;
        return false;  // stop at the first lift
    });
    return found;
}

namespace {

struct PshGlueDetailed {
    PshArrows::Glued glued;
    std::vector<PresheafMap> cell_legs;
};

PshGlueDetailed psh_glue_impl(const PresheafMap& m, const std::vector<PresheafMap>& gens,
                              const std::vector<Attachment<PshArrows>>& atts, const Config& cfg) {
    Diagram d;
    d.add_node("x", m.dom);
    char buf[32];
    for (std::size_t t = 0; t < atts.size(); ++t) {
        const PresheafMap& gen = gens.at(atts[t].gen);
        std::snprintf(buf, sizeof buf, "a%05zu", t);
        std::string an = buf;
        std::snprintf(buf, sizeof buf, "b%05zu", t);
        std::string bn = buf;
        d.add_node(an, gen.dom);
        d.add_node(bn, gen.cod);
        std::snprintf(buf, sizeof buf, "t%05zu", t);
        d.add_edge(buf, an, "x", atts[t].top);
        std::snprintf(buf, sizeof buf, "i%05zu", t);
        d.add_edge(buf, an, bn, gen);
    }
    fincat::ColimitResult co = fincat::finite_colimit(m.dom.base, d, cfg);
    PshGlueDetailed out;
    out.glued.theta = co.legs.at("x");
    out.glued.theta.name = "theta";
    // corner map to the codomain, forced on classes
    PresheafMap psi;
    psi.name = "psi";
    psi.dom = co.apex;
    psi.cod = m.cod;
    auto feed = [&](const PresheafMap& leg, const PresheafMap& into_y) {
        for (const auto& [key, cls] : leg.cmp) {
            std::string v = into_y.apply(key.first, key.second);
            auto [it, inserted] = psi.cmp.insert({{key.first, cls}, v});
            if (!inserted && it->second != v)
                throw InvariantError("one_step: corner map not well defined");
        }
    };
    feed(co.legs.at("x"), m);
    for (std::size_t t = 0; t < atts.size(); ++t) {
        std::snprintf(buf, sizeof buf, "b%05zu", t);
        feed(co.legs.at(buf), atts[t].bottom);
        out.cell_legs.push_back(co.legs.at(buf));
    }
    out.glued.psi = fincat::make_map(std::move(psi));
    return out;
}

}  // namespace

PshArrows::Glued PshArrows::glue(const Map& m, const std::vector<Map>& gens,
                                 const std::vector<Attachment<PshArrows>>& atts,
                                 const Config& cfg) {
    return psh_glue_impl(m, gens, atts, cfg).glued;
}

PshArrows::Map PshArrows::glue_theta(const Map& current, const std::vector<Map>& gens,
                                     const std::vector<Attachment<PshArrows>>& atts,
                                     const Config& cfg) {
    Diagram d;
    d.add_node("x", current.cod);
    char buf[32];
    for (std::size_t t = 0; t < atts.size(); ++t) {
        const PresheafMap& gen = gens.at(atts[t].gen);
        std::snprintf(buf, sizeof buf, "a%05zu", t);
        std::string an = buf;
        std::snprintf(buf, sizeof buf, "b%05zu", t);
        std::string bn = buf;
        d.add_node(an, gen.dom);
        d.add_node(bn, gen.cod);
        std::snprintf(buf, sizeof buf, "t%05zu", t);
        d.add_edge(buf, an, "x", atts[t].top);
        std::snprintf(buf, sizeof buf, "i%05zu", t);
        d.add_edge(buf, an, bn, gen);
    }
    fincat::ColimitResult co = fincat::finite_colimit(current.cod.base, d, cfg);
    PresheafMap theta = co.legs.at("x");
    theta.name = "theta";
    return theta;
}

PshOneStepDetailed one_step_detailed(const PresheafMap& m, const PshGenSet& gens,
                                     const Config& cfg) {
    PshOneStepDetailed out;
    out.step = one_step<PshArrows>(m, gens, cfg);
    PshGlueDetailed detail = psh_glue_impl(m, gens.maps, out.step.attachments, cfg);
    out.cell_legs = detail.cell_legs;
    return out;
}

PshGenSet make_genset(const std::string& name, std::vector<PresheafMap> maps) {
    PshGenSet g;
    g.name = name;
    for (std::size_t k = 0; k < maps.size(); ++k)
        g.names.push_back(maps[k].name.empty() ? "i" + std::to_string(k) : maps[k].name);
    g.maps = std::move(maps);
    return g;
}

// ---------------------------------------------------------------------------
// Chain adapter

std::vector<ChainArrows::Square> ChainArrows::squares(const Map& i, const Map& m,
                                                      const Config& cfg) {
    std::vector<Square> out;
    for (auto& [top, bottom] : abelian::chain_square_basis(i, m, cfg))
        out.push_back({top, bottom});
    return out;
}

std::optional<ChainArrows::Map> ChainArrows::lift(const Map& i, const Map& p, const Map& top,
                                                  const Map& bottom, const Config& cfg) {
    (void)cfg;
    return abelian::chain_lift(abelian::ChainSquare{i, p, top, bottom});
}

namespace {

abelian::ChainComplex chain_dsum(const std::vector<const abelian::ChainComplex*>& parts) {
    abelian::ChainComplex s;
    s.name = "sum";
    s.lo = 0;
    s.hi = -1;
    bool any = false;
    for (const auto* p : parts) {
        if (p->hi < p->lo) continue;
        if (!any) {
            s.lo = p->lo;
            s.hi = p->hi;
            any = true;
        } else {
            s.lo = std::min(s.lo, p->lo);
            s.hi = std::max(s.hi, p->hi);
        }
    }
    if (!any) return abelian::zero_complex(0, 0);
    for (int n = s.lo; n <= s.hi; ++n) {
        long rank = 0;
        std::size_t relcols = 0;
        for (const auto* p : parts) {
            rank += p->rank_at(n);
            relcols += p->rels_at(n).cols;
        }
        s.free_rank.push_back(rank);
        abelian::IntMat rel(static_cast<std::size_t>(rank), relcols);
        std::size_t ro = 0, co = 0;
        for (const auto* p : parts) {
            abelian::IntMat r = p->rels_at(n);
            for (std::size_t a = 0; a < r.rows; ++a)
                for (std::size_t b = 0; b < r.cols; ++b) rel.at(ro + a, co + b) = r.at(a, b);
            ro += r.rows;
            co += r.cols;
        }
        s.rels.push_back(std::move(rel));
        long r1 = 0;
        for (const auto* p : parts) r1 += p->rank_at(n - 1);
        abelian::IntMat d(static_cast<std::size_t>(r1), static_cast<std::size_t>(rank));
        std::size_t dro = 0, dco = 0;
        for (const auto* p : parts) {
            abelian::IntMat pd = p->diff_at(n);
            for (std::size_t a = 0; a < pd.rows; ++a)
                for (std::size_t b = 0; b < pd.cols; ++b) d.at(dro + a, dco + b) = pd.at(a, b);
            dro += pd.rows;
            dco += pd.cols;
        }
        s.diffs.push_back(std::move(d));
    }
    return abelian::make_complex(std::move(s));
}

}  // namespace

ChainArrows::Glued ChainArrows::glue(const Map& m, const std::vector<Map>& gens,
                                     const std::vector<Attachment<ChainArrows>>& atts,
                                     const Config& cfg) {
    (void)cfg;
    std::vector<const abelian::ChainComplex*> doms, cods;
    for (const auto& att : atts) {
        doms.push_back(&gens.at(att.gen).dom);
        cods.push_back(&gens.at(att.gen).cod);
    }
    abelian::ChainComplex a_s = chain_dsum(doms);
    abelian::ChainComplex b_s = chain_dsum(cods);
    // block maps i_S : A_S -> B_S and topcat : A_S -> X
    abelian::ChainMap i_s;
    i_s.name = "i_S";
    i_s.dom = a_s;
    i_s.cod = b_s;
    abelian::ChainMap topcat;
    topcat.name = "tops";
    topcat.dom = a_s;
    topcat.cod = m.dom;
    for (int n = a_s.lo; n <= a_s.hi; ++n) {
        long ra = a_s.rank_at(n), rb = b_s.rank_at(n);
        abelian::IntMat im(static_cast<std::size_t>(rb), static_cast<std::size_t>(ra));
        abelian::IntMat tm(static_cast<std::size_t>(m.dom.rank_at(n)),
                           static_cast<std::size_t>(ra));
        std::size_t aoff = 0, boff = 0;
        for (const auto& att : atts) {
            const Map& gen = gens.at(att.gen);
            abelian::IntMat gi = gen.at(n);
            for (std::size_t p = 0; p < gi.rows; ++p)
                for (std::size_t q = 0; q < gi.cols; ++q) im.at(boff + p, aoff + q) = gi.at(p, q);
            abelian::IntMat gt = att.top.at(n);
            for (std::size_t p = 0; p < gt.rows; ++p)
                for (std::size_t q = 0; q < gt.cols; ++q) tm.at(p, aoff + q) = gt.at(p, q);
            aoff += static_cast<std::size_t>(gen.dom.rank_at(n));
            boff += static_cast<std::size_t>(gen.cod.rank_at(n));
        }
        i_s.comps[n] = std::move(im);
        topcat.comps[n] = std::move(tm);
    }
    i_s = abelian::make_chain_map(std::move(i_s));
    topcat = abelian::make_chain_map(std::move(topcat));
    abelian::ChainPushout po = abelian::chain_pushout(i_s, topcat);
    Glued out;
    out.theta = po.from_x;
    out.theta.name = "theta";
    // corner map: bottoms on the B_S block, m on the X block
    abelian::ChainMap psi;
    psi.name = "psi";
    psi.dom = po.obj;
    psi.cod = m.cod;
    for (int n = po.obj.lo; n <= po.obj.hi; ++n) {
        long rb = b_s.rank_at(n), rx = m.dom.rank_at(n);
        abelian::IntMat pm(static_cast<std::size_t>(m.cod.rank_at(n)),
                           static_cast<std::size_t>(rb + rx));
        std::size_t boff = 0;
        for (const auto& att : atts) {
            abelian::IntMat bm = att.bottom.at(n);
            for (std::size_t p = 0; p < bm.rows; ++p)
                for (std::size_t q = 0; q < bm.cols; ++q) pm.at(p, boff + q) = bm.at(p, q);
            boff += static_cast<std::size_t>(gens.at(att.gen).cod.rank_at(n));
        }
        abelian::IntMat mm = m.at(n);
        for (std::size_t p = 0; p < mm.rows; ++p)
            for (std::size_t q = 0; q < mm.cols; ++q)
                pm.at(p, static_cast<std::size_t>(rb) + q) = mm.at(p, q);
        psi.comps[n] = std::move(pm);
    }
    out.psi = abelian::make_chain_map(std::move(psi));
    return out;
}

ChainArrows::Map ChainArrows::glue_theta(const Map& current, const std::vector<Map>& gens,
                                         const std::vector<Attachment<ChainArrows>>& atts,
                                         const Config& cfg) {
    (void)cfg;
    std::vector<const abelian::ChainComplex*> doms, cods;
    for (const auto& att : atts) {
        doms.push_back(&gens.at(att.gen).dom);
        cods.push_back(&gens.at(att.gen).cod);
    }
    abelian::ChainComplex a_s = chain_dsum(doms);
    abelian::ChainComplex b_s = chain_dsum(cods);
    abelian::ChainMap i_s;
    i_s.name = "i_S";
    i_s.dom = a_s;
    i_s.cod = b_s;
    abelian::ChainMap topcat;
    topcat.name = "tops";
    topcat.dom = a_s;
    topcat.cod = current.cod;
    for (int n = a_s.lo; n <= a_s.hi; ++n) {
        long ra = a_s.rank_at(n), rb = b_s.rank_at(n);
        abelian::IntMat im(static_cast<std::size_t>(rb), static_cast<std::size_t>(ra));
        abelian::IntMat tm(static_cast<std::size_t>(current.cod.rank_at(n)),
                           static_cast<std::size_t>(ra));
        std::size_t aoff = 0, boff = 0;
        for (const auto& att : atts) {
            const Map& gen = gens.at(att.gen);
            abelian::IntMat gi = gen.at(n);
            for (std::size_t p = 0; p < gi.rows; ++p)
                for (std::size_t q = 0; q < gi.cols; ++q) im.at(boff + p, aoff + q) = gi.at(p, q);
            abelian::IntMat gt = att.top.at(n);
            for (std::size_t p = 0; p < gt.rows; ++p)
                for (std::size_t q = 0; q < gt.cols; ++q) tm.at(p, aoff + q) = gt.at(p, q);
            aoff += static_cast<std::size_t>(gen.dom.rank_at(n));
            boff += static_cast<std::size_t>(gen.cod.rank_at(n));
        }
        i_s.comps[n] = std::move(im);
        topcat.comps[n] = std::move(tm);
    }
    i_s = abelian::make_chain_map(std::move(i_s));
    topcat = abelian::make_chain_map(std::move(topcat));
    abelian::ChainMap theta = abelian::chain_pushout(i_s, topcat).from_x;
    theta.name = "theta";
    return theta;
}

ChainGenSet chain_genset_from(const abelian::ChainGenerators& gens, const std::string& name) {
    ChainGenSet g;
    g.name = name;
    g.names = gens.names;
    g.maps = gens.maps;
    return g;
}

// ---------------------------------------------------------------------------
// Effective unions

EffectiveUnion effective_union(const Subobject& a, const Subobject& b, const Config& cfg) {
    if (!fincat::same_presheaf(a.ambient, b.ambient)) throw InvariantError("AmbientMismatch");
    EffectiveUnion out;
    out.intersection = subobj::meet(a, b);
    PresheafMap ma = subobj::subobject_as_mono(a);
    PresheafMap mb = subobj::subobject_as_mono(b);
    PresheafMap mi = subobj::subobject_as_mono(out.intersection);
    auto include_into = [](const Presheaf& small, const Presheaf& big) {
        PresheafMap inc;
        inc.name = "inc";
        inc.dom = small;
        inc.cod = big;
        for (const auto& [o, xs] : small.at)
            for (const std::string& x : xs) inc.cmp[{o, x}] = x;
        return fincat::make_map(std::move(inc));
    };
    PresheafMap ia = include_into(mi.dom, ma.dom);
    PresheafMap ib = include_into(mi.dom, mb.dom);
    fincat::PushoutResult po = fincat::pushout(ia, ib, cfg);
    out.pushout_obj = po.obj;
    PresheafMap u;
    u.name = "compare";
    u.dom = po.obj;
    u.cod = a.ambient;
    auto feed = [&](const PresheafMap& leg) {
        for (const auto& [key, cls] : leg.cmp) {
            auto [it, inserted] = u.cmp.insert({{key.first, cls}, key.second});
            if (!inserted && it->second != key.second)
                throw InvariantError("effective_union: comparison not well defined");
        }
    };
    feed(po.from_left);
    feed(po.from_right);
    u = fincat::make_map(std::move(u));
    out.comparison = u;
    Subobject joined = subobj::join(a, b);
    bool mono = fincat::is_mono(u);
    bool onto_join = true;
    std::map<std::string, std::set<std::string>> image;
    for (const auto& [key, v] : u.cmp) image[key.first].insert(v);
    for (const std::string& o : a.ambient.base->objects) {
        if (image[o] != joined.levels.at(o)) onto_join = false;
    }
    out.verdict = mono && onto_join;
    return out;
}

// ---------------------------------------------------------------------------
// Generating monomorphisms

namespace {

constexpr char kSep = '\x1f';

using Partition = std::map<std::string, std::string>;  // elem tag -> class root

struct CongruenceUF {
    std::map<std::string, std::string> parent;
    void add(const std::string& x) {
        if (!parent.count(x)) parent[x] = x;
    }
    std::string find(const std::string& x) {
        std::string r = x;
        while (parent.at(r) != r) r = parent.at(r);
        // path compression
        std::string c = x;
        while (parent.at(c) != r) {
            std::string next = parent.at(c);
            parent[c] = r;
            c = next;
        }
        return r;
    }
    bool unite(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra == rb) return false;
        if (rb < ra) std::swap(ra, rb);
        parent[rb] = ra;
        return true;
    }
};

std::string elem_tag(const std::string& obj, const std::string& x) {
    return obj + std::string(1, kSep) + x;
}

// saturate a congruence: merged elements must stay merged under every action
void saturate(CongruenceUF& uf, const Presheaf& f) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const std::string& o : f.base->objects) {
            const auto& xs = f.level(o);
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t j = i + 1; j < xs.size(); ++j) {
                    if (uf.find(elem_tag(o, xs[i])) != uf.find(elem_tag(o, xs[j]))) continue;
                    for (const Morphism& m : f.base->morphisms) {
                        if (f.base->is_identity(m.id) || m.dst != o) continue;
                        if (uf.unite(elem_tag(m.src, f.apply(m.id, xs[i])),
                                     elem_tag(m.src, f.apply(m.id, xs[j]))))
                            changed = true;
                    }
                }
        }
    }
}

std::string serialize_partition(CongruenceUF& uf, const Presheaf& f) {
    std::map<std::string, std::vector<std::string>> classes;
    for (const auto& [o, xs] : f.at)
        for (const std::string& x : xs) classes[uf.find(elem_tag(o, x))].push_back(elem_tag(o, x));
    std::string s;
    for (auto& [root, members] : classes) {
        (void)root;
        std::sort(members.begin(), members.end());
        for (const std::string& m : members) s += m + ",";
        s += "|";
    }
    return s;
}

CongruenceUF fresh_uf(const Presheaf& f) {
    CongruenceUF uf;
    for (const auto& [o, xs] : f.at)
        for (const std::string& x : xs) uf.add(elem_tag(o, x));
    return uf;
}

Presheaf quotient_by(CongruenceUF& uf, const Presheaf& f) {
    Presheaf q;
    q.name = f.name + "/~";
    q.base = f.base;
    std::map<std::pair<std::string, std::string>, std::string> cls;  // (obj, elem) -> class name
    for (const auto& [o, xs] : f.at) {
        std::map<std::string, std::string> rep_name;
        std::set<std::string> roots;
        for (const std::string& x : xs) roots.insert(uf.find(elem_tag(o, x)));
        int i = 0;
        for (const std::string& r : roots) rep_name[r] = "q" + std::to_string(i++);
        std::vector<std::string> carrier;
        for (const auto& [r, nm] : rep_name) {
            (void)r;
            carrier.push_back(nm);
        }
        std::sort(carrier.begin(), carrier.end());
        q.at[o] = carrier;
        for (const std::string& x : xs) cls[{o, x}] = rep_name.at(uf.find(elem_tag(o, x)));
    }
    for (const Morphism& m : f.base->morphisms) {
        if (f.base->is_identity(m.id)) continue;
        for (const std::string& x : f.level(m.dst))
            q.act[{m.id, cls.at({m.dst, x})}] = cls.at({m.src, f.apply(m.id, x)});
    }
    return fincat::make_presheaf(std::move(q));
}

bool presheaves_isomorphic(const Presheaf& f, const Presheaf& g) {
    for (const std::string& o : f.base->objects)
        if (f.level(o).size() != g.level(o).size()) return false;
    bool found = false;
    fincat::for_each_natural_map(f, g, {}, nullptr, [&](const PresheafMap& m) {
        if (fincat::is_iso(m)) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

}  // namespace

std::optional<ArrowIso> arrows_isomorphic(const PresheafMap& a, const PresheafMap& b,
                                          const Config& cfg) {
    (void)cfg;
    for (const std::string& o : a.dom.base->objects) {
        if (a.dom.level(o).size() != b.dom.level(o).size()) return std::nullopt;
        if (a.cod.level(o).size() != b.cod.level(o).size()) return std::nullopt;
    }
    std::optional<ArrowIso> out;
    fincat::for_each_natural_map(a.cod, b.cod, {}, nullptr, [&](const PresheafMap& psi) {
        if (!fincat::is_iso(psi)) return true;
        if (fincat::is_mono(b)) {
            // phi is forced: b⁻¹ ∘ psi ∘ a
            PresheafMap phi;
            phi.name = "phi";
            phi.dom = a.dom;
            phi.cod = b.dom;
            std::map<std::pair<std::string, std::string>, std::string> binv;
            for (const auto& [key, v] : b.cmp) binv[{key.first, v}] = key.second;
            bool ok = true;
            for (const auto& [o, xs] : a.dom.at) {
                for (const std::string& x : xs) {
                    auto it = binv.find({o, psi.apply(o, a.apply(o, x))});
                    if (it == binv.end()) {
                        ok = false;
                        break;
                    }
                    phi.cmp[{o, x}] = it->second;
                }
                if (!ok) break;
            }
            if (!ok) return true;
            if (fincat::check_map(phi) || !fincat::is_iso(phi)) return true;
            out = ArrowIso{phi, psi};
            return false;
        }
        // general search over dom isos
        bool stop = false;
        fincat::for_each_natural_map(a.dom, b.dom, {}, nullptr, [&](const PresheafMap& phi) {
            if (!fincat::is_iso(phi)) return true;
            if (fincat::same_map(fincat::compose_maps(psi, a), fincat::compose_maps(b, phi))) {
                out = ArrowIso{phi, psi};
                stop = true;
                return false;
            }
            return true;
        });
        return !stop;
    });
    return out;
}

PshGenSet generating_monos(const CatPtr& c, const Config& cfg) {
    // regular quotients of the representables, then all their subobject
    // inclusions, deduplicated up to isomorphism of arrows
    std::vector<Presheaf> quotients;
    for (const std::string& obj : c->objects) {
        Presheaf y = fincat::yoneda(c, obj);
        // principal congruences
        std::vector<std::vector<std::pair<std::string, std::string>>> principal;  // pairs of tags
        std::vector<std::pair<std::string, std::string>> elems;
        for (const auto& [o, xs] : y.at)
            for (const std::string& x : xs) elems.push_back({o, x});
        for (std::size_t i = 0; i < elems.size(); ++i)
            for (std::size_t j = i + 1; j < elems.size(); ++j) {
                if (elems[i].first != elems[j].first) continue;
                principal.push_back({{elem_tag(elems[i].first, elems[i].second),
                                      elem_tag(elems[j].first, elems[j].second)}});
            }
        // join-closure over the principal congruences
        std::set<std::string> seen;
        std::vector<std::vector<std::pair<std::string, std::string>>> frontier{{}};
        CongruenceUF base_uf = fresh_uf(y);
        seen.insert(serialize_partition(base_uf, y));
        std::vector<std::vector<std::pair<std::string, std::string>>> all_pairsets{{}};
        while (!frontier.empty()) {
            guard_size(static_cast<std::int64_t>(seen.size()), cfg, "generating_monos");
            std::vector<std::vector<std::pair<std::string, std::string>>> next;
            for (const auto& ps : frontier)
                for (const auto& pr : principal) {
                    auto merged = ps;
                    merged.insert(merged.end(), pr.begin(), pr.end());
                    CongruenceUF uf = fresh_uf(y);
                    for (const auto& [s, t] : merged) uf.unite(s, t);
                    saturate(uf, y);
                    std::string key = serialize_partition(uf, y);
                    if (seen.insert(key).second) {
                        next.push_back(merged);
                        all_pairsets.push_back(merged);
                    }
                }
            frontier = std::move(next);
        }
        for (const auto& ps : all_pairsets) {
            CongruenceUF uf = fresh_uf(y);
            for (const auto& [s, t] : ps) uf.unite(s, t);
            saturate(uf, y);
            Presheaf q = quotient_by(uf, y);
            bool dup = false;
            for (const Presheaf& seen_q : quotients)
                if (presheaves_isomorphic(q, seen_q)) {
                    dup = true;
                    break;
                }
            if (!dup) quotients.push_back(std::move(q));
        }
    }
    std::vector<PresheafMap> members;
    for (const Presheaf& q : quotients)
        for (const Subobject& s : subobj::enumerate_subobjects(q, cfg)) {
            PresheafMap inc = subobj::subobject_as_mono(s);
            bool dup = false;
            for (const PresheafMap& seen_m : members)
                if (arrows_isomorphic(inc, seen_m, cfg)) {
                    dup = true;
                    break;
                }
            if (!dup) members.push_back(std::move(inc));
        }
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (!fincat::is_mono(members[k]))
            throw InvariantError("generating_monos: non-mono member");
        members[k].name = "gm" + std::to_string(k);
    }
    return make_genset("generating_monos(" + c->name + ")", std::move(members));
}

// ---------------------------------------------------------------------------
// Cellularization of monomorphisms by effective unions

MonoCellResult mono_cellularize(const PresheafMap& m, const PshGenSet& gens, const Config& cfg) {
    if (!fincat::is_mono(m)) throw InvariantError("NotMono: mono_cellularize needs a mono");
    const Presheaf& y = m.cod;
    MonoCellResult out;
    PresheafMap c = fincat::identity_map(m.dom);
    PresheafMap iota = m;  // current middle object -> Y, always mono
    for (;;) {
        // current image as a subobject of Y
        Subobject p = subobj::mono_as_subobject(iota);
        // first missing element in lexicographic order
        std::optional<std::pair<std::string, std::string>> missing;
        for (const std::string& o : y.base->objects) {
            for (const std::string& elem : y.level(o))
                if (!p.contains(o, elem)) {
                    missing = {o, elem};
                    break;
                }
            if (missing) break;
        }
        if (!missing) break;
        Subobject q = subobj::generated_subobject(y, {{missing->first, missing->second}});
        Subobject qp = subobj::meet(q, p);
        PresheafMap q_mono = subobj::subobject_as_mono(q);
        PresheafMap qp_mono = subobj::subobject_as_mono(qp);
        PresheafMap incl;  // carrier(q∩p) -> carrier(q)
        incl.name = "incl";
        incl.dom = qp_mono.dom;
        incl.cod = q_mono.dom;
        for (const auto& [o, xs] : qp_mono.dom.at)
            for (const std::string& x : xs) incl.cmp[{o, x}] = x;
        incl = fincat::make_map(std::move(incl));
        // identify the generator this inclusion is isomorphic to
        std::optional<std::pair<std::size_t, ArrowIso>> match;
        for (std::size_t k = 0; k < gens.maps.size(); ++k)
            if (auto iso = arrows_isomorphic(gens.maps[k], incl, cfg)) {
                match = {k, *iso};
                break;
            }
        if (!match)
            throw InvariantError("mono_cellularize: no generator matches the attachment");
        auto [k, iso] = *match;
        // attachment maps into the current middle object and the codomain
        std::map<std::pair<std::string, std::string>, std::string> iota_inv;
        for (const auto& [key, v] : iota.cmp) iota_inv[{key.first, v}] = key.second;
        PresheafMap top;
        top.name = "attach";
        top.dom = gens.maps[k].dom;
        top.cod = iota.dom;
        for (const auto& [key, v] : iso.dom_iso.cmp) top.cmp[key] = iota_inv.at({key.first, v});
        top = fincat::make_map(std::move(top));
        PresheafMap bottom;
        bottom.name = "attach_cod";
        bottom.dom = gens.maps[k].cod;
        bottom.cod = y;
        for (const auto& [key, v] : iso.cod_iso.cmp) bottom.cmp[key] = v;
        bottom = fincat::make_map(std::move(bottom));

        std::vector<Attachment<PshArrows>> atts{{k, top, bottom}};
        PshArrows::Glued g = PshArrows::glue(iota, gens.maps, atts, cfg);
        if (!fincat::is_mono(g.psi))
            throw InvariantError("mono_cellularize: stage map failed to stay monic");
        out.cell.stages.push_back(CellStage<PshArrows>{atts});
        c = fincat::compose_maps(g.theta, c);
        iota = g.psi;
    }
    out.c = c;
    out.cell.composite = c;
    out.final_iso = iota;
    if (!fincat::is_iso(iota))
        throw InvariantError("mono_cellularize: chain terminated before reaching the codomain");
    if (!fincat::same_map(fincat::compose_maps(iota, c), m))
        throw InvariantError("mono_cellularize: composite does not reproduce the mono");
    return out;
}

// ---------------------------------------------------------------------------
// Diagram generators

PshGenSet diagram_generators(const PshGenSet& gens, const CatPtr& c, const CatPtr& d,
                             const Config& cfg) {
    fincat::ProductSite cd = fincat::product_category(c, d, cfg);
    CatPtr d_delta = fincat::discrete_category(d->objects, d->name + "_delta");
    fincat::ProductSite cdd = fincat::product_category(c, d_delta, cfg);
    fincat::Functor incl;
    incl.source = cdd.product;
    incl.target = cd.product;
    for (const std::string& o : cdd.product->objects) incl.obj_map[o] = o;
    for (const Morphism& m : cdd.product->morphisms) {
        auto [f, idd] = cdd.split_mor(m.id);
        std::string dobj = d_delta->mor(idd).src;
        incl.mor_map[m.id] = fincat::ProductSite::pair_id(f, d->identity.at(dobj));
    }
    if (auto issue = fincat::check_functor(incl))
        throw InvariantError("diagram_generators: " + *issue);

    auto place = [&](const Presheaf& f, const std::string& at_d) {
        Presheaf out;
        out.name = f.name + "@" + at_d;
        out.base = cdd.product;
        for (const std::string& o : cdd.product->objects) {
            auto [co, dd] = cdd.split_obj(o);
            out.at[o] = (dd == at_d) ? f.level(co) : std::vector<std::string>{};
        }
        for (const Morphism& m : cdd.product->morphisms) {
            if (cdd.product->is_identity(m.id)) continue;
            auto [fc, idd] = cdd.split_mor(m.id);
            (void)idd;
            auto [cdst, ddst] = cdd.split_obj(m.dst);
            (void)cdst;
            if (ddst != at_d) continue;
            for (const std::string& x : out.at.at(m.dst)) out.act[{m.id, x}] = f.apply(fc, x);
        }
        return fincat::make_presheaf(std::move(out));
    };

    std::vector<PresheafMap> out_maps;
    std::vector<std::string> out_names;
    for (std::size_t k = 0; k < gens.maps.size(); ++k)
        for (const std::string& dobj : d->objects) {
            Presheaf a = place(gens.maps[k].dom, dobj);
            Presheaf b = place(gens.maps[k].cod, dobj);
            PresheafMap placed;
            placed.name = gens.names[k] + "@" + dobj;
            placed.dom = a;
            placed.cod = b;
            for (const auto& [key, v] : gens.maps[k].cmp) {
                auto [co, xx] = key;
                placed.cmp[{fincat::ProductSite::pair_id(co, dobj), xx}] = v;
            }
            placed = fincat::make_map(std::move(placed));
            fincat::LanResult la = fincat::left_kan(a, incl, cfg);
            fincat::LanResult lb = fincat::left_kan(b, incl, cfg);
            PresheafMap lifted = fincat::left_kan_map(placed, incl, la, lb);
            lifted.name = placed.name;
            out_names.push_back(placed.name);
            out_maps.push_back(std::move(lifted));
        }
    PshGenSet out = make_genset(gens.name + "^" + d->name, std::move(out_maps));
    out.names = out_names;
    return out;
}

}  // namespace sheafsmith::factor
