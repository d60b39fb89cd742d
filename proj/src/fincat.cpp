#include "sheafsmith/fincat.hpp"

#include <algorithm>
#include <set>

namespace sheafsmith::fincat {

bool FinCategory::has_object(const std::string& c) const {
    return std::binary_search(objects.begin(), objects.end(), c);
}

const Morphism& FinCategory::mor(const std::string& id) const {
    auto it = std::lower_bound(morphisms.begin(), morphisms.end(), id,
                               [](const Morphism& m, const std::string& s) { return m.id < s; });
    if (it == morphisms.end() || it->id != id)
        throw InvariantError("unknown morphism '" + id + "' in category " + name);
    return *it;
}

bool FinCategory::has_mor(const std::string& id) const {
    auto it = std::lower_bound(morphisms.begin(), morphisms.end(), id,
                               [](const Morphism& m, const std::string& s) { return m.id < s; });
    return it != morphisms.end() && it->id == id;
}

bool FinCategory::is_identity(const std::string& id) const {
    const Morphism& m = mor(id);
    auto it = identity.find(m.src);
    return it != identity.end() && it->second == id;
}

std::string FinCategory::compose(const std::string& g, const std::string& f) const {
    const Morphism& mg = mor(g);
    const Morphism& mf = mor(f);
    if (mf.dst != mg.src)
        throw InvariantError("compose(" + g + ", " + f + "): not composable in " + name);
    if (is_identity(f)) return g;
    if (is_identity(g)) return f;
    auto it = comp.find({g, f});
    if (it == comp.end())
        throw InvariantError("compose(" + g + ", " + f + "): missing table entry in " + name);
    return it->second;
}

std::vector<std::string> FinCategory::hom(const std::string& a, const std::string& b) const {
    std::vector<std::string> out;
    for (const Morphism& m : morphisms)
        if (m.src == a && m.dst == b) out.push_back(m.id);
    return out;
}

std::vector<std::string> FinCategory::into(const std::string& c) const {
    std::vector<std::string> out;
    for (const Morphism& m : morphisms)
        if (m.dst == c) out.push_back(m.id);
    return out;
}

bool same_category(const FinCategory& a, const FinCategory& b) {
    return a.objects == b.objects && a.morphisms == b.morphisms && a.identity == b.identity &&
           a.comp == b.comp;
}

bool same_category(const CatPtr& a, const CatPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return same_category(*a, *b);
}

std::optional<CategoryIssue> check_category(const FinCategory& c) {
    std::set<std::string> objs(c.objects.begin(), c.objects.end());
    if (objs.size() != c.objects.size())
        return CategoryIssue{"BadData", "duplicate object id"};
    std::set<std::string> mids;
    for (const Morphism& m : c.morphisms) {
        if (!mids.insert(m.id).second)
            return CategoryIssue{"BadData", "duplicate morphism id '" + m.id + "'"};
        if (!objs.count(m.src) || !objs.count(m.dst))
            return CategoryIssue{"BadData", "morphism '" + m.id + "' has unknown endpoint"};
    }
    for (const std::string& o : c.objects) {
        auto it = c.identity.find(o);
        if (it == c.identity.end())
            return CategoryIssue{"BadData", "object '" + o + "' has no identity"};
        if (!mids.count(it->second))
            return CategoryIssue{"BadData", "identity of '" + o + "' is not a morphism"};
        const Morphism& m = c.mor(it->second);
        if (m.src != o || m.dst != o)
            return CategoryIssue{"BadData", "identity of '" + o + "' is not an endomorphism"};
    }
    // totality and typing of the table
    for (const Morphism& f : c.morphisms)
        for (const Morphism& g : c.morphisms) {
            if (f.dst != g.src) continue;
            bool fid = c.identity.at(f.src) == f.id;
            bool gid = c.identity.at(g.src) == g.id;
            auto it = c.comp.find({g.id, f.id});
            if (it == c.comp.end()) {
                if (fid || gid) continue;  // identity composites are implicit
                return CategoryIssue{"MissingComposite",
                                     "composite " + g.id + " o " + f.id + " unspecified"};
            }
            if (!mids.count(it->second))
                return CategoryIssue{"BadData", "composite " + g.id + " o " + f.id +
                                                    " names unknown morphism '" + it->second + "'"};
            const Morphism& h = c.mor(it->second);
            if (h.src != f.src || h.dst != g.dst)
                return CategoryIssue{"BadData",
                                     "composite " + g.id + " o " + f.id + " has wrong endpoints"};
        }
    for (const auto& [pair, h] : c.comp) {
        if (!mids.count(pair.first) || !mids.count(pair.second))
            return CategoryIssue{"BadData", "composition table mentions unknown morphism"};
        if (c.mor(pair.second).dst != c.mor(pair.first).src)
            return CategoryIssue{"BadData", "table entry (" + pair.first + ", " + pair.second +
                                                ") is not a composable pair"};
        (void)h;
    }
    // identity laws
    for (const Morphism& f : c.morphisms) {
        if (c.compose(c.identity.at(f.dst), f.id) != f.id)
            return CategoryIssue{"IdViolation", "id_" + f.dst + " o " + f.id + " != " + f.id};
        if (c.compose(f.id, c.identity.at(f.src)) != f.id)
            return CategoryIssue{"IdViolation", f.id + " o id_" + f.src + " != " + f.id};
    }
    // associativity over all composable triples
    for (const Morphism& f : c.morphisms)
        for (const Morphism& g : c.morphisms) {
            if (f.dst != g.src) continue;
            std::string gf = c.compose(g.id, f.id);
            for (const Morphism& h : c.morphisms) {
                if (g.dst != h.src) continue;
                std::string left = c.compose(h.id, gf);
                std::string right = c.compose(c.compose(h.id, g.id), f.id);
                if (left != right)
                    return CategoryIssue{"AssocViolation", "(" + h.id + " o " + g.id + ") o " +
                                                               f.id + " != " + h.id + " o (" +
                                                               g.id + " o " + f.id + ")"};
            }
        }
    return std::nullopt;
}

CatPtr make_category(FinCategory raw) {
    std::sort(raw.objects.begin(), raw.objects.end());
    std::sort(raw.morphisms.begin(), raw.morphisms.end(),
              [](const Morphism& a, const Morphism& b) { return a.id < b.id; });
    if (auto issue = check_category(raw))
        throw InvariantError("category " + raw.name + ": [" + issue->code + "] " + issue->message);
    return std::make_shared<const FinCategory>(std::move(raw));
}

CatPtr terminal_category() {
    FinCategory c;
    c.name = "1";
    c.objects = {"*"};
    c.morphisms = {{"id_*", "*", "*"}};
    c.identity["*"] = "id_*";
    return make_category(std::move(c));
}

CatPtr arrow_category() {
    FinCategory c;
    c.name = "arrow";
    c.objects = {"a", "b"};
    c.morphisms = {{"f", "a", "b"}, {"id_a", "a", "a"}, {"id_b", "b", "b"}};
    c.identity["a"] = "id_a";
    c.identity["b"] = "id_b";
    return make_category(std::move(c));
}

CatPtr discrete_category(const std::vector<std::string>& objects, const std::string& name) {
    FinCategory c;
    c.name = name;
    c.objects = objects;
    for (const std::string& o : objects) {
        c.morphisms.push_back({"id_" + o, o, o});
        c.identity[o] = "id_" + o;
    }
    return make_category(std::move(c));
}

std::string Functor::on_obj(const std::string& c) const {
    auto it = obj_map.find(c);
    if (it == obj_map.end()) throw InvariantError("functor undefined on object '" + c + "'");
    return it->second;
}

std::string Functor::on_mor(const std::string& f) const {
    auto it = mor_map.find(f);
    if (it == mor_map.end()) throw InvariantError("functor undefined on morphism '" + f + "'");
    return it->second;
}

std::optional<std::string> check_functor(const Functor& fu) {
    if (!fu.source || !fu.target) return "functor missing source or target";
    for (const std::string& o : fu.source->objects) {
        auto it = fu.obj_map.find(o);
        if (it == fu.obj_map.end()) return "object map undefined at '" + o + "'";
        if (!fu.target->has_object(it->second)) return "object map sends '" + o + "' outside target";
    }
    for (const Morphism& m : fu.source->morphisms) {
        auto it = fu.mor_map.find(m.id);
        if (it == fu.mor_map.end()) return "morphism map undefined at '" + m.id + "'";
        if (!fu.target->has_mor(it->second))
            return "morphism map sends '" + m.id + "' outside target";
        const Morphism& im = fu.target->mor(it->second);
        if (im.src != fu.on_obj(m.src) || im.dst != fu.on_obj(m.dst))
            return "image of '" + m.id + "' has wrong endpoints";
    }
    for (const std::string& o : fu.source->objects)
        if (fu.on_mor(fu.source->identity.at(o)) != fu.target->identity.at(fu.on_obj(o)))
            return "identity of '" + o + "' not preserved";
    for (const Morphism& f : fu.source->morphisms)
        for (const Morphism& g : fu.source->morphisms) {
            if (f.dst != g.src) continue;
            if (fu.on_mor(fu.source->compose(g.id, f.id)) !=
                fu.target->compose(fu.on_mor(g.id), fu.on_mor(f.id)))
                return "composition " + g.id + " o " + f.id + " not preserved";
        }
    return std::nullopt;
}

std::string ProductSite::pair_id(const std::string& a, const std::string& b) {
    return "(" + a + "," + b + ")";
}

namespace {
// Splits "(x,y)" where x never contains an unbalanced separator; our ids
// are parenthesis-balanced by construction.
std::pair<std::string, std::string> split_pair(const std::string& id) {
    if (id.size() < 3 || id.front() != '(' || id.back() != ')')
        throw InvariantError("not a product id: '" + id + "'");
    int depth = 0;
    for (std::size_t i = 1; i + 1 < id.size(); ++i) {
        char ch = id[i];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0)
            return {id.substr(1, i - 1), id.substr(i + 1, id.size() - i - 2)};
    }
    throw InvariantError("not a product id: '" + id + "'");
}
}  // namespace

std::pair<std::string, std::string> ProductSite::split_obj(const std::string& id) const {
    return split_pair(id);
}

std::pair<std::string, std::string> ProductSite::split_mor(const std::string& id) const {
    return split_pair(id);
}

ProductSite product_category(const CatPtr& c, const CatPtr& d, const Config& cfg) {
    guard_size(static_cast<std::int64_t>(c->morphisms.size()) *
                   static_cast<std::int64_t>(d->morphisms.size()),
               cfg, "product_category");
    FinCategory p;
    p.name = ProductSite::pair_id(c->name, d->name);
    Functor pl, pr;
    for (const std::string& a : c->objects)
        for (const std::string& b : d->objects) {
            std::string o = ProductSite::pair_id(a, b);
            p.objects.push_back(o);
            pl.obj_map[o] = a;
            pr.obj_map[o] = b;
        }
    for (const Morphism& f : c->morphisms)
        for (const Morphism& g : d->morphisms) {
            std::string id = ProductSite::pair_id(f.id, g.id);
            p.morphisms.push_back(
                {id, ProductSite::pair_id(f.src, g.src), ProductSite::pair_id(f.dst, g.dst)});
            pl.mor_map[id] = f.id;
            pr.mor_map[id] = g.id;
        }
    for (const std::string& a : c->objects)
        for (const std::string& b : d->objects)
            p.identity[ProductSite::pair_id(a, b)] =
                ProductSite::pair_id(c->identity.at(a), d->identity.at(b));
    for (const Morphism& f1 : c->morphisms)
        for (const Morphism& f2 : c->morphisms) {
            if (f1.dst != f2.src) continue;
            for (const Morphism& g1 : d->morphisms)
                for (const Morphism& g2 : d->morphisms) {
                    if (g1.dst != g2.src) continue;
                    p.comp[{ProductSite::pair_id(f2.id, g2.id),
                            ProductSite::pair_id(f1.id, g1.id)}] =
                        ProductSite::pair_id(c->compose(f2.id, f1.id), d->compose(g2.id, g1.id));
                }
        }
    ProductSite site;
    site.product = make_category(std::move(p));
    site.left = c;
    site.right = d;
    pl.source = site.product;
    pl.target = c;
    pr.source = site.product;
    pr.target = d;
    site.proj_left = std::move(pl);
    site.proj_right = std::move(pr);
    return site;
}

Functor discrete_inclusion(const CatPtr& d) {
    CatPtr delta = discrete_category(d->objects, d->name + "_delta");
    Functor inc;
    inc.source = delta;
    inc.target = d;
    for (const std::string& o : delta->objects) {
        inc.obj_map[o] = o;
        inc.mor_map["id_" + o] = d->identity.at(o);
    }
    return inc;
}

}  // namespace sheafsmith::fincat
