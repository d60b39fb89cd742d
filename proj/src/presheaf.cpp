#include "sheafsmith/presheaf.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>

namespace sheafsmith::fincat {

namespace {

constexpr char kSep = '\x1f';

std::string tuple_name(const std::vector<std::string>& comps) {
    std::string s = "(";
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i) s += ",";
        s += comps[i];
    }
    return s + ")";
}

// Small union-find over strings.
struct UnionFind {
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
        // smaller representative wins, keeping classes canonical
        if (rb < ra) std::swap(ra, rb);
        parent[rb] = ra;
    }
};

}  // namespace

const std::vector<std::string>& Presheaf::level(const std::string& obj) const {
    auto it = at.find(obj);
    if (it == at.end())
        throw InvariantError("presheaf " + name + " has no level at object '" + obj + "'");
    return it->second;
}

bool Presheaf::has_elem(const std::string& obj, const std::string& x) const {
    auto it = at.find(obj);
    if (it == at.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), x);
}

std::string Presheaf::apply(const std::string& mor, const std::string& x) const {
    if (base->is_identity(mor)) {
        if (!has_elem(base->mor(mor).src, x))
            throw InvariantError("presheaf " + name + ": element '" + x + "' not at " +
                                 base->mor(mor).src);
        return x;
    }
    auto it = act.find({mor, x});
    if (it == act.end())
        throw InvariantError("presheaf " + name + ": action of '" + mor + "' undefined at '" + x +
                             "'");
    return it->second;
}

std::int64_t Presheaf::total_size() const {
    std::int64_t n = 0;
    for (const auto& [o, xs] : at) n += static_cast<std::int64_t>(xs.size());
    return n;
}

bool same_presheaf(const Presheaf& f, const Presheaf& g) {
    return same_category(f.base, g.base) && f.at == g.at && f.act == g.act;
}

std::optional<std::string> check_presheaf(const Presheaf& f) {
    if (!f.base) return "missing base category";
    for (const auto& [o, xs] : f.at) {
        if (!f.base->has_object(o)) return "level at unknown object '" + o + "'";
        if (!std::is_sorted(xs.begin(), xs.end())) return "carrier at '" + o + "' not sorted";
        if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
            return "duplicate element at '" + o + "'";
    }
    for (const std::string& o : f.base->objects)
        if (!f.at.count(o)) return "missing level at object '" + o + "'";
    for (const Morphism& m : f.base->morphisms) {
        if (f.base->is_identity(m.id)) continue;
        for (const std::string& x : f.level(m.dst)) {
            auto it = f.act.find({m.id, x});
            if (it == f.act.end()) return "action of '" + m.id + "' undefined at '" + x + "'";
            if (!f.has_elem(m.src, it->second))
                return "action of '" + m.id + "' at '" + x + "' leaves the carrier";
        }
    }
    for (const auto& [key, val] : f.act) {
        if (!f.base->has_mor(key.first)) return "action for unknown morphism '" + key.first + "'";
        if (f.base->is_identity(key.first))
            return "explicit action entry for identity '" + key.first + "'";
        if (!f.has_elem(f.base->mor(key.first).dst, key.second))
            return "action entry for '" + key.first + "' at unknown element '" + key.second + "'";
        (void)val;
    }
    // contravariant functoriality: F(g∘f) = F(f)∘F(g)
    for (const Morphism& a : f.base->morphisms)
        for (const Morphism& b : f.base->morphisms) {
            if (a.dst != b.src) continue;
            std::string ba = f.base->compose(b.id, a.id);
            for (const std::string& x : f.level(b.dst))
                if (f.apply(a.id, f.apply(b.id, x)) != f.apply(ba, x))
                    return "functoriality fails on " + b.id + " o " + a.id + " at '" + x + "'";
        }
    return std::nullopt;
}

Presheaf make_presheaf(Presheaf raw) {
    if (raw.base)
        for (const std::string& o : raw.base->objects)
            if (!raw.at.count(o)) raw.at[o] = {};
    for (auto& [o, xs] : raw.at) std::sort(xs.begin(), xs.end());
    if (auto issue = check_presheaf(raw))
        throw InvariantError("presheaf " + raw.name + ": " + *issue);
    return raw;
}

Presheaf terminal_presheaf(const CatPtr& base) {
    Presheaf p;
    p.name = "1";
    p.base = base;
    for (const std::string& o : base->objects) p.at[o] = {"()"};
    for (const Morphism& m : base->morphisms)
        if (!base->is_identity(m.id)) p.act[{m.id, "()"}] = "()";
    return make_presheaf(std::move(p));
}

Presheaf initial_presheaf(const CatPtr& base) {
    Presheaf p;
    p.name = "0";
    p.base = base;
    for (const std::string& o : base->objects) p.at[o] = {};
    return make_presheaf(std::move(p));
}

Presheaf constant_presheaf(const CatPtr& base, const std::vector<std::string>& elems,
                           const std::string& name) {
    Presheaf p;
    p.name = name;
    p.base = base;
    for (const std::string& o : base->objects) p.at[o] = elems;
    for (const Morphism& m : base->morphisms)
        if (!base->is_identity(m.id))
            for (const std::string& x : elems) p.act[{m.id, x}] = x;
    return make_presheaf(std::move(p));
}

std::string PresheafMap::apply(const std::string& obj, const std::string& x) const {
    auto it = cmp.find({obj, x});
    if (it == cmp.end())
        throw InvariantError("map " + name + ": undefined at (" + obj + ", " + x + ")");
    return it->second;
}

std::optional<std::string> check_map(const PresheafMap& m) {
    if (!same_category(m.dom.base, m.cod.base)) return "MixedBaseCategory";
    for (const std::string& o : m.dom.base->objects)
        for (const std::string& x : m.dom.level(o)) {
            auto it = m.cmp.find({o, x});
            if (it == m.cmp.end()) return "component undefined at (" + o + ", " + x + ")";
            if (!m.cod.has_elem(o, it->second))
                return "image of (" + o + ", " + x + ") not in codomain";
        }
    for (const auto& [key, val] : m.cmp) {
        if (!m.dom.has_elem(key.first, key.second))
            return "component at unknown element (" + key.first + ", " + key.second + ")";
        (void)val;
    }
    // naturality: cod(f)∘φ_{dst} = φ_{src}∘dom(f) for f : src -> dst
    for (const Morphism& f : m.dom.base->morphisms) {
        if (m.dom.base->is_identity(f.id)) continue;
        for (const std::string& x : m.dom.level(f.dst))
            if (m.apply(f.src, m.dom.apply(f.id, x)) != m.cod.apply(f.id, m.apply(f.dst, x)))
                return "naturality fails for '" + f.id + "' at '" + x + "'";
    }
    return std::nullopt;
}

PresheafMap make_map(PresheafMap raw) {
    if (auto issue = check_map(raw)) throw InvariantError("map " + raw.name + ": " + *issue);
    return raw;
}

PresheafMap identity_map(const Presheaf& f) {
    PresheafMap m;
    m.name = "id";
    m.dom = f;
    m.cod = f;
    for (const auto& [o, xs] : f.at)
        for (const std::string& x : xs) m.cmp[{o, x}] = x;
    return m;
}

PresheafMap compose_maps(const PresheafMap& g, const PresheafMap& f) {
    if (!same_presheaf(g.dom, f.cod))
        throw InvariantError("compose_maps: middle objects disagree (" + g.name + " o " + f.name +
                             ")");
    PresheafMap m;
    m.name = g.name + "." + f.name;
    m.dom = f.dom;
    m.cod = g.cod;
    for (const auto& [key, y] : f.cmp) m.cmp[key] = g.apply(key.first, y);
    return m;
}

bool same_map(const PresheafMap& f, const PresheafMap& g) {
    return same_presheaf(f.dom, g.dom) && same_presheaf(f.cod, g.cod) && f.cmp == g.cmp;
}

bool is_mono(const PresheafMap& m) {
    for (const std::string& o : m.dom.base->objects) {
        std::set<std::string> seen;
        for (const std::string& x : m.dom.level(o))
            if (!seen.insert(m.apply(o, x)).second) return false;
    }
    return true;
}

bool is_epi(const PresheafMap& m) {
    for (const std::string& o : m.dom.base->objects) {
        std::set<std::string> img;
        for (const std::string& x : m.dom.level(o)) img.insert(m.apply(o, x));
        if (img.size() != m.cod.level(o).size()) return false;
    }
    return true;
}

bool is_iso(const PresheafMap& m) { return is_mono(m) && is_epi(m); }

PresheafMap invert(const PresheafMap& m) {
    if (!is_iso(m)) throw InvariantError("invert: map " + m.name + " is not an isomorphism");
    PresheafMap inv;
    inv.name = m.name + "^-1";
    inv.dom = m.cod;
    inv.cod = m.dom;
    for (const auto& [key, y] : m.cmp) inv.cmp[{key.first, y}] = key.second;
    return inv;
}

std::string serialize_presheaf(const Presheaf& f) {
    std::ostringstream os;
    os << "{";
    for (const auto& [o, xs] : f.at) {
        os << o << ":[";
        for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
        os << "];";
    }
    os << "|";
    for (const auto& [key, v] : f.act) os << key.first << "@" << key.second << "->" << v << ";";
    os << "}";
    return os.str();
}

std::string serialize_map(const PresheafMap& m) {
    std::ostringstream os;
    os << "{dom=" << serialize_presheaf(m.dom) << " cod=" << serialize_presheaf(m.cod) << " ";
    for (const auto& [key, v] : m.cmp) os << key.first << "@" << key.second << "->" << v << ";";
    os << "}";
    return os.str();
}

// ---------------------------------------------------------------------------
// Diagrams

void Diagram::add_node(const std::string& n, Presheaf p) {
    if (nodes.count(n)) throw InvariantError("diagram: duplicate node '" + n + "'");
    nodes.emplace(n, std::move(p));
}

void Diagram::add_edge(const std::string& n, const std::string& s, const std::string& d,
                       PresheafMap m) {
    if (!nodes.count(s) || !nodes.count(d))
        throw InvariantError("diagram: edge '" + n + "' has unknown endpoint");
    if (!same_presheaf(m.dom, nodes.at(s)) || !same_presheaf(m.cod, nodes.at(d)))
        throw InvariantError("diagram: edge '" + n + "' does not match its endpoints");
    edges.push_back({n, s, d, std::move(m)});
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.name < b.name; });
}

namespace {
void check_diagram_base(const CatPtr& base, const Diagram& d) {
    for (const auto& [n, p] : d.nodes)
        if (!same_category(p.base, base))
            throw InvariantError("MixedBaseCategory: node '" + n + "' lives over another base");
}
}  // namespace

LimitResult finite_limit(const CatPtr& base, const Diagram& d, const Config& cfg) {
    check_diagram_base(base, d);
    std::vector<std::string> node_names;
    for (const auto& [n, p] : d.nodes) node_names.push_back(n);

    Presheaf apex;
    apex.name = "lim";
    apex.base = base;
    // (object, tuple elem) -> components, for the legs and the action
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> parts;
    for (const std::string& c : base->objects) {
        std::int64_t count = 1;
        for (const std::string& n : node_names) {
            count *= static_cast<std::int64_t>(d.nodes.at(n).level(c).size());
            guard_size(count, cfg, "finite_limit");
            if (count == 0) break;
        }
        std::vector<std::vector<std::string>> tuples;
        tuples.emplace_back();
        for (const std::string& n : node_names) {
            std::vector<std::vector<std::string>> next;
            for (const auto& t : tuples)
                for (const std::string& x : d.nodes.at(n).level(c)) {
                    auto t2 = t;
                    t2.push_back(x);
                    next.push_back(std::move(t2));
                }
            tuples = std::move(next);
            guard_size(static_cast<std::int64_t>(tuples.size()), cfg, "finite_limit");
        }
        std::vector<std::string> carrier;
        for (const auto& t : tuples) {
            bool ok = true;
            for (const Diagram::Edge& e : d.edges) {
                std::size_t si = std::lower_bound(node_names.begin(), node_names.end(), e.src) -
                                 node_names.begin();
                std::size_t di = std::lower_bound(node_names.begin(), node_names.end(), e.dst) -
                                 node_names.begin();
                if (e.map.apply(c, t[si]) != t[di]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            std::string id = tuple_name(t);
            carrier.push_back(id);
            parts[{c, id}] = t;
        }
        apex.at[c] = std::move(carrier);
    }
    for (const Morphism& m : base->morphisms) {
        if (base->is_identity(m.id)) continue;
        for (const std::string& x : apex.at.at(m.dst)) {
            const auto& t = parts.at({m.dst, x});
            std::vector<std::string> image;
            for (std::size_t i = 0; i < node_names.size(); ++i)
                image.push_back(d.nodes.at(node_names[i]).apply(m.id, t[i]));
            apex.act[{m.id, x}] = tuple_name(image);
        }
    }
    LimitResult res;
    res.apex = make_presheaf(std::move(apex));
    for (std::size_t i = 0; i < node_names.size(); ++i) {
        PresheafMap leg;
        leg.name = "pr_" + node_names[i];
        leg.dom = res.apex;
        leg.cod = d.nodes.at(node_names[i]);
        for (const auto& [key, t] : parts) leg.cmp[key] = t[i];
        res.legs[node_names[i]] = make_map(std::move(leg));
    }
    return res;
}

ColimitResult finite_colimit(const CatPtr& base, const Diagram& d, const Config& cfg) {
    check_diagram_base(base, d);
    Presheaf apex;
    apex.name = "colim";
    apex.base = base;
    // (object, tag "node\x1felem") -> canonical class element
    std::map<std::pair<std::string, std::string>, std::string> cls;
    for (const std::string& c : base->objects) {
        UnionFind uf;
        std::int64_t count = 0;
        for (const auto& [n, p] : d.nodes) {
            count += p.total_size();
            guard_size(count, cfg, "finite_colimit");
            for (const std::string& x : p.level(c)) uf.add(n + kSep + x);
        }
        for (const Diagram::Edge& e : d.edges)
            for (const std::string& x : d.nodes.at(e.src).level(c))
                uf.unite(e.src + kSep + x, e.dst + kSep + e.map.apply(c, x));
        // canonical names q0, q1, ... in lex order of least member
        std::set<std::string> reps;
        for (const auto& [tag, p] : uf.parent) {
            (void)p;
            reps.insert(uf.find(tag));
        }
        std::map<std::string, std::string> rep_name;
        int i = 0;
        for (const std::string& r : reps) rep_name[r] = "q" + std::to_string(i++);
        std::vector<std::string> carrier;
        for (const auto& [r, nm] : rep_name) {
            (void)r;
            carrier.push_back(nm);
        }
        std::sort(carrier.begin(), carrier.end());
        apex.at[c] = carrier;
        for (const auto& [tag, p] : uf.parent) {
            (void)p;
            cls[{c, tag}] = rep_name.at(uf.find(tag));
        }
    }
    for (const Morphism& m : base->morphisms) {
        if (base->is_identity(m.id)) continue;
        std::map<std::string, std::string> action;  // class at dst -> class at src
        for (const auto& [n, p] : d.nodes)
            for (const std::string& x : p.level(m.dst)) {
                std::string from = cls.at({m.dst, n + kSep + x});
                std::string to = cls.at({m.src, n + kSep + p.apply(m.id, x)});
                auto it = action.find(from);
                if (it != action.end() && it->second != to)
                    throw InvariantError("finite_colimit: action not well defined on classes");
                action[from] = to;
            }
        for (const auto& [from, to] : action) apex.act[{m.id, from}] = to;
    }
    ColimitResult res;
    res.apex = make_presheaf(std::move(apex));
    for (const auto& [n, p] : d.nodes) {
        PresheafMap leg;
        leg.name = "in_" + n;
        leg.dom = p;
        leg.cod = res.apex;
        for (const std::string& c : base->objects)
            for (const std::string& x : p.level(c)) leg.cmp[{c, x}] = cls.at({c, n + kSep + x});
        res.legs[n] = make_map(std::move(leg));
    }
    return res;
}

PushoutResult pushout(const PresheafMap& f, const PresheafMap& g, const Config& cfg) {
    if (!same_presheaf(f.dom, g.dom)) throw InvariantError("pushout: domains disagree");
    Diagram d;
    d.add_node("a", f.dom);
    d.add_node("l", f.cod);
    d.add_node("r", g.cod);
    d.add_edge("f", "a", "l", f);
    d.add_edge("g", "a", "r", g);
    ColimitResult co = finite_colimit(f.dom.base, d, cfg);
    return PushoutResult{co.apex, co.legs.at("l"), co.legs.at("r")};
}

PullbackResult pullback(const PresheafMap& f, const PresheafMap& g, const Config& cfg) {
    if (!same_presheaf(f.cod, g.cod)) throw InvariantError("pullback: codomains disagree");
    Diagram d;
    d.add_node("l", f.dom);
    d.add_node("r", g.dom);
    d.add_node("z", f.cod);
    d.add_edge("f", "l", "z", f);
    d.add_edge("g", "r", "z", g);
    LimitResult lim = finite_limit(f.dom.base, d, cfg);
    return PullbackResult{lim.apex, lim.legs.at("l"), lim.legs.at("r")};
}

BinaryProductResult binary_product(const Presheaf& f, const Presheaf& g, const Config& cfg) {
    ProductResult p = finite_product({f, g}, f.base, cfg);
    return BinaryProductResult{p.obj, p.projections[0], p.projections[1]};
}

CoproductResult coproduct(const std::vector<Presheaf>& parts, const CatPtr& base,
                          const Config& cfg) {
    Diagram d;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "p%03zu", i);
        d.add_node(buf, parts[i]);
    }
    ColimitResult co = finite_colimit(base, d, cfg);
    CoproductResult res;
    res.obj = co.apex;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "p%03zu", i);
        res.injections.push_back(co.legs.at(buf));
    }
    return res;
}

EqualizerResult equalizer(const PresheafMap& f, const PresheafMap& g, const Config& cfg) {
    if (!same_presheaf(f.dom, g.dom) || !same_presheaf(f.cod, g.cod))
        throw InvariantError("equalizer: parallel pair expected");
    (void)cfg;
    Presheaf e;
    e.name = "eq";
    e.base = f.dom.base;
    for (const std::string& c : e.base->objects) {
        std::vector<std::string> xs;
        for (const std::string& x : f.dom.level(c))
            if (f.apply(c, x) == g.apply(c, x)) xs.push_back(x);
        e.at[c] = std::move(xs);
    }
    for (const Morphism& m : e.base->morphisms) {
        if (e.base->is_identity(m.id)) continue;
        for (const std::string& x : e.at.at(m.dst)) e.act[{m.id, x}] = f.dom.apply(m.id, x);
    }
    EqualizerResult res;
    res.obj = make_presheaf(std::move(e));
    PresheafMap inc;
    inc.name = "eq_inc";
    inc.dom = res.obj;
    inc.cod = f.dom;
    for (const auto& [o, xs] : res.obj.at)
        for (const std::string& x : xs) inc.cmp[{o, x}] = x;
    res.include = make_map(std::move(inc));
    return res;
}

CoequalizerResult coequalizer(const PresheafMap& f, const PresheafMap& g, const Config& cfg) {
    if (!same_presheaf(f.dom, g.dom) || !same_presheaf(f.cod, g.cod))
        throw InvariantError("coequalizer: parallel pair expected");
    Diagram d;
    d.add_node("x", f.dom);
    d.add_node("y", f.cod);
    d.add_edge("f", "x", "y", f);
    d.add_edge("g", "x", "y", g);
    ColimitResult co = finite_colimit(f.dom.base, d, cfg);
    return CoequalizerResult{co.apex, co.legs.at("y")};
}

std::string join_key(const std::vector<std::string>& comps) {
    std::string s;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i) s += kSep;
        s += comps[i];
    }
    return s;
}

std::string ProductResult::tuple_elem(const std::string& obj,
                                      const std::vector<std::string>& comps) const {
    auto it = tuple_of.find({obj, join_key(comps)});
    if (it == tuple_of.end()) throw InvariantError("product: unknown tuple at '" + obj + "'");
    return it->second;
}

ProductResult finite_product(const std::vector<Presheaf>& factors, const CatPtr& base,
                             const Config& cfg) {
    for (const Presheaf& f : factors)
        if (!same_category(f.base, base)) throw InvariantError("MixedBaseCategory in product");
    ProductResult res;
    Presheaf apex;
    apex.name = "prod";
    apex.base = base;
    for (const std::string& c : base->objects) {
        std::vector<std::vector<std::string>> tuples;
        tuples.emplace_back();
        for (const Presheaf& f : factors) {
            std::vector<std::vector<std::string>> next;
            for (const auto& t : tuples)
                for (const std::string& x : f.level(c)) {
                    auto t2 = t;
                    t2.push_back(x);
                    next.push_back(std::move(t2));
                }
            tuples = std::move(next);
            guard_size(static_cast<std::int64_t>(tuples.size()), cfg, "finite_product");
        }
        std::vector<std::string> carrier;
        for (const auto& t : tuples) {
            std::string id = tuple_name(t);
            carrier.push_back(id);
            res.components[{c, id}] = t;
            res.tuple_of[{c, join_key(t)}] = id;
        }
        std::sort(carrier.begin(), carrier.end());
        apex.at[c] = std::move(carrier);
    }
    for (const Morphism& m : base->morphisms) {
        if (base->is_identity(m.id)) continue;
        for (const std::string& x : apex.at.at(m.dst)) {
            const auto& t = res.components.at({m.dst, x});
            std::vector<std::string> image;
            for (std::size_t i = 0; i < factors.size(); ++i)
                image.push_back(factors[i].apply(m.id, t[i]));
            apex.act[{m.id, x}] = res.tuple_of.at({m.src, join_key(image)});
        }
    }
    res.obj = make_presheaf(std::move(apex));
    for (std::size_t i = 0; i < factors.size(); ++i) {
        PresheafMap pr;
        pr.name = "pr" + std::to_string(i);
        pr.dom = res.obj;
        pr.cod = factors[i];
        for (const auto& [key, t] : res.components) pr.cmp[key] = t[i];
        res.projections.push_back(make_map(std::move(pr)));
    }
    return res;
}

PresheafMap tuple_into_product(const ProductResult& prod, const std::vector<PresheafMap>& maps) {
    if (maps.size() != prod.projections.size())
        throw InvariantError("tuple_into_product: arity mismatch");
    if (maps.empty()) throw InvariantError("tuple_into_product: need at least one map");
    PresheafMap out;
    out.name = "tuple";
    out.dom = maps[0].dom;
    out.cod = prod.obj;
    for (const auto& [o, xs] : out.dom.at)
        for (const std::string& x : xs) {
            std::vector<std::string> comps;
            for (const PresheafMap& m : maps) comps.push_back(m.apply(o, x));
            out.cmp[{o, x}] = prod.tuple_elem(o, comps);
        }
    return make_map(std::move(out));
}

// ---------------------------------------------------------------------------
// Natural transformation search (backtracking with action propagation)

namespace {

struct NatSearch {
    const Presheaf& F;
    const Presheaf& G;
    const CandidateFn& candidates;
    const MapVisitor& visit;
    std::vector<std::pair<std::string, std::string>> order;  // (object, element)
    std::map<std::pair<std::string, std::string>, std::string> assign;
    // non-identity morphisms grouped by destination object
    std::map<std::string, std::vector<const Morphism*>> into;
    bool stopped = false;

    bool allowed(const std::string& c, const std::string& x, const std::string& y) {
        if (!candidates) return true;
        std::vector<std::string> cs = candidates(c, x);
        return std::find(cs.begin(), cs.end(), y) != cs.end();
    }

    // Sets phi(c, x) = y and propagates along all actions into c.
    // Appends every new assignment to `trail`; returns false on conflict.
    bool set_and_propagate(const std::string& c, const std::string& x, const std::string& y,
                           std::vector<std::pair<std::string, std::string>>& trail) {
        std::vector<std::tuple<std::string, std::string, std::string>> queue{{c, x, y}};
        while (!queue.empty()) {
            auto [qc, qx, qy] = queue.back();
            queue.pop_back();
            auto it = assign.find({qc, qx});
            if (it != assign.end()) {
                if (it->second != qy) return false;
                continue;
            }
            if (!G.has_elem(qc, qy) || !allowed(qc, qx, qy)) return false;
            assign[{qc, qx}] = qy;
            trail.push_back({qc, qx});
            auto mit = into.find(qc);
            if (mit == into.end()) continue;
            for (const Morphism* m : mit->second)
                queue.push_back({m->src, F.apply(m->id, qx), G.apply(m->id, qy)});
        }
        return true;
    }

    void undo(const std::vector<std::pair<std::string, std::string>>& trail) {
        for (const auto& key : trail) assign.erase(key);
    }

    bool run(std::size_t idx) {
        if (stopped) return false;
        while (idx < order.size() && assign.count(order[idx])) ++idx;
        if (idx == order.size()) {
            PresheafMap m;
            m.name = "nat";
            m.dom = F;
            m.cod = G;
            m.cmp = assign;
            if (!visit(m)) {
                stopped = true;
                return false;
            }
            return true;
        }
        const auto& [c, x] = order[idx];
        std::vector<std::string> cs = candidates ? candidates(c, x) : G.level(c);
        std::sort(cs.begin(), cs.end());
        for (const std::string& y : cs) {
            std::vector<std::pair<std::string, std::string>> trail;
            if (set_and_propagate(c, x, y, trail)) {
                if (!run(idx + 1)) {
                    undo(trail);
                    return false;
                }
            }
            undo(trail);
        }
        return true;
    }
};

}  // namespace

bool for_each_natural_map(const Presheaf& f, const Presheaf& g,
                          const std::map<std::pair<std::string, std::string>, std::string>& pin,
                          const CandidateFn& candidates, const MapVisitor& visit) {
    if (!same_category(f.base, g.base))
        throw InvariantError("for_each_natural_map: MixedBaseCategory");
    NatSearch s{f, g, candidates, visit, {}, {}, {}, false};
    for (const auto& [o, xs] : f.at)
        for (const std::string& x : xs) s.order.push_back({o, x});
    for (const Morphism& m : f.base->morphisms)
        if (!f.base->is_identity(m.id)) s.into[m.dst].push_back(&m);
    std::vector<std::pair<std::string, std::string>> trail;
    for (const auto& [key, y] : pin)
        if (!s.set_and_propagate(key.first, key.second, y, trail)) return true;  // no maps at all
    return s.run(0);
}

std::vector<PresheafMap> all_natural_maps(const Presheaf& f, const Presheaf& g,
                                          std::size_t limit) {
    std::vector<PresheafMap> out;
    for_each_natural_map(f, g, {}, nullptr, [&](const PresheafMap& m) {
        out.push_back(m);
        return out.size() < limit;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Yoneda and friends

Presheaf yoneda(const CatPtr& base, const std::string& obj) {
    if (!base->has_object(obj)) throw InvariantError("yoneda: unknown object '" + obj + "'");
    Presheaf y;
    y.name = "y(" + obj + ")";
    y.base = base;
    for (const std::string& c : base->objects) y.at[c] = base->hom(c, obj);
    for (const Morphism& f : base->morphisms) {
        if (base->is_identity(f.id)) continue;
        for (const std::string& g : base->hom(f.dst, obj))
            y.act[{f.id, g}] = base->compose(g, f.id);
    }
    return make_presheaf(std::move(y));
}

CatPtr category_of_elements(const Presheaf& f) {
    FinCategory el;
    el.name = "el(" + f.name + ")";
    auto obj_id = [](const std::string& c, const std::string& x) {
        return "(" + c + "|" + x + ")";
    };
    for (const auto& [c, xs] : f.at)
        for (const std::string& x : xs) el.objects.push_back(obj_id(c, x));
    auto mor_id = [](const std::string& fm, const std::string& x2) {
        return "(" + fm + "|" + x2 + ")";
    };
    for (const Morphism& m : f.base->morphisms)
        for (const std::string& x2 : f.level(m.dst)) {
            std::string id = mor_id(m.id, x2);
            el.morphisms.push_back({id, obj_id(m.src, f.apply(m.id, x2)), obj_id(m.dst, x2)});
            if (f.base->is_identity(m.id)) el.identity[obj_id(m.dst, x2)] = id;
        }
    for (const Morphism& m1 : f.base->morphisms)
        for (const Morphism& m2 : f.base->morphisms) {
            if (m1.dst != m2.src) continue;
            if (f.base->is_identity(m1.id) || f.base->is_identity(m2.id)) continue;
            for (const std::string& x2 : f.level(m2.dst))
                el.comp[{mor_id(m2.id, x2), mor_id(m1.id, f.apply(m2.id, x2))}] =
                    mor_id(f.base->compose(m2.id, m1.id), x2);
        }
    return make_category(std::move(el));
}

namespace {
std::string lan_tag(const std::string& c, const std::string& phi, const std::string& x) {
    return c + std::string(1, kSep) + phi + std::string(1, kSep) + x;
}
}  // namespace

LanResult left_kan(const Presheaf& f, const Functor& along, const Config& cfg) {
    if (!same_category(f.base, along.source)) throw InvariantError("left_kan: base mismatch");
    const CatPtr& C = along.source;
    const CatPtr& D = along.target;
    LanResult res;
    Presheaf lan;
    lan.name = "Lan(" + f.name + ")";
    lan.base = D;
    std::map<std::pair<std::string, std::string>, std::string> cls;  // (d, tag) -> canonical elem
    for (const std::string& d : D->objects) {
        UnionFind uf;
        std::int64_t count = 0;
        // comma objects (c, phi : d -> u(c)), each contributing F(c)
        for (const std::string& c : C->objects)
            for (const std::string& phi : D->hom(d, along.on_obj(c)))
                for (const std::string& x : f.level(c)) {
                    uf.add(lan_tag(c, phi, x));
                    guard_size(++count, cfg, "left_kan");
                }
        // identifications: alpha : c~ -> c in C, phi~ : d -> u(c~) glue
        // (c, u(alpha)∘phi~, x) with (c~, phi~, F(alpha)(x))
        for (const Morphism& alpha : C->morphisms) {
            const std::string& csrc = alpha.src;  // c~
            const std::string& cdst = alpha.dst;  // c
            std::string ualpha = along.on_mor(alpha.id);
            for (const std::string& phit : D->hom(d, along.on_obj(csrc))) {
                std::string phi = D->compose(ualpha, phit);
                for (const std::string& x : f.level(cdst))
                    uf.unite(lan_tag(cdst, phi, x), lan_tag(csrc, phit, f.apply(alpha.id, x)));
            }
        }
        std::set<std::string> reps;
        for (const auto& [tag, p] : uf.parent) {
            (void)p;
            reps.insert(uf.find(tag));
        }
        std::map<std::string, std::string> rep_name;
        int i = 0;
        for (const std::string& r : reps) rep_name[r] = "k" + std::to_string(i++);
        std::vector<std::string> carrier;
        for (const auto& [r, nm] : rep_name) {
            (void)r;
            carrier.push_back(nm);
        }
        std::sort(carrier.begin(), carrier.end());
        lan.at[d] = carrier;
        for (const auto& [tag, p] : uf.parent) {
            (void)p;
            cls[{d, tag}] = rep_name.at(uf.find(tag));
        }
    }
    // action of delta : d -> d' precomposes phi
    for (const Morphism& delta : D->morphisms) {
        if (D->is_identity(delta.id)) continue;
        std::map<std::string, std::string> action;
        for (const auto& [key, elem] : cls) {
            if (key.first != delta.dst) continue;
            std::size_t p1 = key.second.find(kSep);
            std::size_t p2 = key.second.find(kSep, p1 + 1);
            std::string c = key.second.substr(0, p1);
            std::string phi = key.second.substr(p1 + 1, p2 - p1 - 1);
            std::string x = key.second.substr(p2 + 1);
            std::string target = cls.at({delta.src, lan_tag(c, D->compose(phi, delta.id), x)});
            auto it = action.find(elem);
            if (it != action.end() && it->second != target)
                throw InvariantError("left_kan: action not well defined");
            action[elem] = target;
        }
        for (const auto& [from, to] : action) lan.act[{delta.id, from}] = to;
    }
    res.lan = make_presheaf(std::move(lan));
    res.class_of = std::move(cls);
    for (const std::string& c : C->objects) {
        std::string uc = along.on_obj(c);
        for (const std::string& x : f.level(c))
            res.unit[{c, x}] = {uc, res.class_of.at({uc, lan_tag(c, D->identity.at(uc), x)})};
    }
    return res;
}

PresheafMap left_kan_map(const PresheafMap& h, const Functor& along, const LanResult& lan_dom,
                         const LanResult& lan_cod) {
    PresheafMap out;
    out.name = "Lan(" + h.name + ")";
    out.dom = lan_dom.lan;
    out.cod = lan_cod.lan;
    for (const auto& [key, elem] : lan_dom.class_of) {
        std::size_t p1 = key.second.find(kSep);
        std::size_t p2 = key.second.find(kSep, p1 + 1);
        std::string c = key.second.substr(0, p1);
        std::string phi = key.second.substr(p1 + 1, p2 - p1 - 1);
        std::string x = key.second.substr(p2 + 1);
        std::string target = lan_cod.class_of.at({key.first, lan_tag(c, phi, h.apply(c, x))});
        auto it = out.cmp.find({key.first, elem});
        if (it != out.cmp.end() && it->second != target)
            throw InvariantError("left_kan_map: not well defined");
        out.cmp[{key.first, elem}] = target;
    }
    (void)along;
    return make_map(std::move(out));
}

Presheaf restrict_presheaf(const Presheaf& g, const Functor& along) {
    Presheaf r;
    r.name = g.name + "|";
    r.base = along.source;
    for (const std::string& c : along.source->objects) r.at[c] = g.level(along.on_obj(c));
    for (const Morphism& m : along.source->morphisms) {
        if (along.source->is_identity(m.id)) continue;
        std::string im = along.on_mor(m.id);
        for (const std::string& x : r.at.at(m.dst)) r.act[{m.id, x}] = g.apply(im, x);
    }
    return make_presheaf(std::move(r));
}

PresheafMap lan_transpose(const Presheaf& f, const LanResult& lan, const Functor& along,
                          const PresheafMap& k) {
    if (!same_presheaf(k.dom, lan.lan)) throw InvariantError("lan_transpose: domain mismatch");
    PresheafMap t;
    t.name = "transpose(" + k.name + ")";
    t.dom = f;
    t.cod = restrict_presheaf(k.cod, along);
    for (const auto& [cx, target] : lan.unit)
        t.cmp[{cx.first, cx.second}] = k.apply(target.first, target.second);
    return make_map(std::move(t));
}

Presheaf evaluation_at(const ProductSite& site, const Presheaf& f, const std::string& d) {
    if (!site.right->has_object(d))
        throw InvariantError("UnknownObject: evaluation at '" + d + "'");
    Presheaf out;
    out.name = f.name + "@" + d;
    out.base = site.left;
    for (const std::string& c : site.left->objects)
        out.at[c] = f.level(ProductSite::pair_id(c, d));
    std::string idd = site.right->identity.at(d);
    for (const Morphism& m : site.left->morphisms) {
        if (site.left->is_identity(m.id)) continue;
        std::string pm = ProductSite::pair_id(m.id, idd);
        for (const std::string& x : out.at.at(m.dst)) out.act[{m.id, x}] = f.apply(pm, x);
    }
    return make_presheaf(std::move(out));
}

PresheafMap evaluation_map(const ProductSite& site, const Presheaf& f, const std::string& delta) {
    const Morphism& dm = site.right->mor(delta);
    Presheaf from = evaluation_at(site, f, dm.dst);
    Presheaf to = evaluation_at(site, f, dm.src);
    PresheafMap out;
    out.name = f.name + "@" + delta;
    out.dom = from;
    out.cod = to;
    for (const std::string& c : site.left->objects) {
        std::string pm = ProductSite::pair_id(site.left->identity.at(c), delta);
        for (const std::string& x : from.level(c)) out.cmp[{c, x}] = f.apply(pm, x);
    }
    return make_map(std::move(out));
}

PresheafMap evaluation_of_map(const ProductSite& site, const PresheafMap& m, const std::string& d) {
    PresheafMap out;
    out.name = m.name + "@" + d;
    out.dom = evaluation_at(site, m.dom, d);
    out.cod = evaluation_at(site, m.cod, d);
    for (const std::string& c : site.left->objects)
        for (const std::string& x : out.dom.level(c))
            out.cmp[{c, x}] = m.apply(ProductSite::pair_id(c, d), x);
    return make_map(std::move(out));
}

Presheaf slice_left(const ProductSite& site, const Presheaf& f, const std::string& c) {
    if (!site.left->has_object(c)) throw InvariantError("UnknownObject: slice at '" + c + "'");
    Presheaf out;
    out.name = f.name + "[" + c + "]";
    out.base = site.right;
    for (const std::string& d : site.right->objects)
        out.at[d] = f.level(ProductSite::pair_id(c, d));
    std::string idc = site.left->identity.at(c);
    for (const Morphism& m : site.right->morphisms) {
        if (site.right->is_identity(m.id)) continue;
        std::string pm = ProductSite::pair_id(idc, m.id);
        for (const std::string& x : out.at.at(m.dst)) out.act[{m.id, x}] = f.apply(pm, x);
    }
    return make_presheaf(std::move(out));
}

PresheafMap slice_left_action(const ProductSite& site, const Presheaf& f,
                              const std::string& gamma) {
    const Morphism& gm = site.left->mor(gamma);
    Presheaf from = slice_left(site, f, gm.dst);
    Presheaf to = slice_left(site, f, gm.src);
    PresheafMap out;
    out.name = f.name + "[" + gamma + "]";
    out.dom = from;
    out.cod = to;
    for (const std::string& d : site.right->objects) {
        std::string pm = ProductSite::pair_id(gamma, site.right->identity.at(d));
        for (const std::string& x : from.level(d)) out.cmp[{d, x}] = f.apply(pm, x);
    }
    return make_map(std::move(out));
}

PresheafMap slice_left_of_map(const ProductSite& site, const PresheafMap& m,
                              const std::string& c) {
    PresheafMap out;
    out.name = m.name + "[" + c + "]";
    out.dom = slice_left(site, m.dom, c);
    out.cod = slice_left(site, m.cod, c);
    for (const std::string& d : site.right->objects)
        for (const std::string& x : out.dom.level(d))
            out.cmp[{d, x}] = m.apply(ProductSite::pair_id(c, d), x);
    return make_map(std::move(out));
}

Presheaf assemble_over_product(const ProductSite& site,
                               const std::map<std::string, Presheaf>& at_d,
                               const std::map<std::string, PresheafMap>& trans,
                               const std::string& name) {
    Presheaf out;
    out.name = name;
    out.base = site.product;
    for (const std::string& d : site.right->objects) {
        const Presheaf& fd = at_d.at(d);
        for (const std::string& c : site.left->objects)
            out.at[ProductSite::pair_id(c, d)] = fd.level(c);
    }
    for (const Morphism& pm : site.product->morphisms) {
        if (site.product->is_identity(pm.id)) continue;
        auto [fc, delta] = site.split_mor(pm.id);
        const Morphism& dm = site.right->mor(delta);
        const Presheaf& fdst = at_d.at(dm.dst);
        for (const std::string& x : fdst.level(site.left->mor(fc).dst)) {
            // act by delta (transition), then by the C-morphism inside F_{d_src}
            std::string mid = site.right->is_identity(delta)
                                  ? x
                                  : trans.at(delta).apply(site.left->mor(fc).dst, x);
            std::string y = site.left->is_identity(fc) ? mid : at_d.at(dm.src).apply(fc, mid);
            out.act[{pm.id, x}] = y;
        }
    }
    return make_presheaf(std::move(out));
}

// ---------------------------------------------------------------------------
// Universal property spot checks

namespace {

// All cones from apex T over the diagram: per node a map T -> node,
// commuting with every edge.
void enumerate_cones(const CatPtr& base, const Diagram& d, const Presheaf& T,
                     const std::function<void(const std::map<std::string, PresheafMap>&)>& fn) {
    (void)base;
    std::vector<std::string> node_names;
    for (const auto& [n, p] : d.nodes) node_names.push_back(n);
    std::map<std::string, PresheafMap> chosen;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == node_names.size()) {
            fn(chosen);
            return;
        }
        const std::string& n = node_names[i];
        for_each_natural_map(T, d.nodes.at(n), {}, nullptr, [&](const PresheafMap& m) {
            chosen[n] = m;
            bool ok = true;
            for (const Diagram::Edge& e : d.edges) {
                if (!chosen.count(e.src) || !chosen.count(e.dst)) continue;
                if (!same_map(compose_maps(e.map, chosen.at(e.src)), chosen.at(e.dst))) {
                    ok = false;
                    break;
                }
            }
            if (ok) rec(i + 1);
            chosen.erase(n);
            return true;
        });
    };
    rec(0);
}

void enumerate_cocones(const CatPtr& base, const Diagram& d, const Presheaf& T,
                       const std::function<void(const std::map<std::string, PresheafMap>&)>& fn) {
    (void)base;
    std::vector<std::string> node_names;
    for (const auto& [n, p] : d.nodes) node_names.push_back(n);
    std::map<std::string, PresheafMap> chosen;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == node_names.size()) {
            fn(chosen);
            return;
        }
        const std::string& n = node_names[i];
        for_each_natural_map(d.nodes.at(n), T, {}, nullptr, [&](const PresheafMap& m) {
            chosen[n] = m;
            bool ok = true;
            for (const Diagram::Edge& e : d.edges) {
                if (!chosen.count(e.src) || !chosen.count(e.dst)) continue;
                if (!same_map(compose_maps(chosen.at(e.dst), e.map), chosen.at(e.src))) {
                    ok = false;
                    break;
                }
            }
            if (ok) rec(i + 1);
            chosen.erase(n);
            return true;
        });
    };
    rec(0);
}

}  // namespace

bool verify_limit_universal(const CatPtr& base, const Diagram& d, const LimitResult& lim,
                            const std::vector<Presheaf>& test_apexes) {
    for (const Diagram::Edge& e : d.edges)
        if (!same_map(compose_maps(e.map, lim.legs.at(e.src)), lim.legs.at(e.dst))) return false;
    bool ok = true;
    for (const Presheaf& T : test_apexes) {
        enumerate_cones(base, d, T, [&](const std::map<std::string, PresheafMap>& cone) {
            if (!ok) return;
            // the unique candidate factorization: tupling of the cone legs
            PresheafMap u;
            u.name = "factor";
            u.dom = T;
            u.cod = lim.apex;
            for (const auto& [o, xs] : T.at)
                for (const std::string& x : xs) {
                    std::vector<std::string> comps;
                    for (const auto& [n, leg] : cone) comps.push_back(leg.apply(o, x));
                    std::string id = tuple_name(comps);
                    if (!lim.apex.has_elem(o, id)) {
                        ok = false;
                        return;
                    }
                    u.cmp[{o, x}] = id;
                }
            if (check_map(u)) {
                ok = false;
                return;
            }
            for (const auto& [n, leg] : cone)
                if (!same_map(compose_maps(lim.legs.at(n), u), leg)) ok = false;
        });
        if (!ok) return false;
    }
    return ok;
}

bool verify_colimit_universal(const CatPtr& base, const Diagram& d, const ColimitResult& colim,
                              const std::vector<Presheaf>& test_apexes) {
    for (const Diagram::Edge& e : d.edges)
        if (!same_map(compose_maps(colim.legs.at(e.dst), e.map), colim.legs.at(e.src)))
            return false;
    bool ok = true;
    for (const Presheaf& T : test_apexes) {
        enumerate_cocones(base, d, T, [&](const std::map<std::string, PresheafMap>& cocone) {
            if (!ok) return;
            // factorization forced on classes; check well-defined + natural
            PresheafMap u;
            u.name = "cofactor";
            u.dom = colim.apex;
            u.cod = T;
            for (const auto& [n, leg] : colim.legs) {
                const PresheafMap& into_t = cocone.at(n);
                for (const auto& [o, xs] : leg.dom.at)
                    for (const std::string& x : xs) {
                        std::string q = leg.apply(o, x);
                        std::string v = into_t.apply(o, x);
                        auto it = u.cmp.find({o, q});
                        if (it != u.cmp.end() && it->second != v) {
                            ok = false;
                            return;
                        }
                        u.cmp[{o, q}] = v;
                    }
            }
            if (check_map(u)) {
                ok = false;
                return;
            }
            for (const auto& [n, leg] : colim.legs)
                if (!same_map(compose_maps(u, leg), cocone.at(n))) ok = false;
        });
        if (!ok) return false;
    }
    return ok;
}

}  // namespace sheafsmith::fincat
