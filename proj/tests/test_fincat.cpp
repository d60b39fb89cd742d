#include "doctest.h"

#include <set>

#include "helpers.hpp"
#include "sheafsmith/fincat.hpp"
#include "sheafsmith/presheaf.hpp"

using namespace sheafsmith;
using namespace sheafsmith::fincat;

TEST_CASE("terminal category is valid") {
    CatPtr one = terminal_category();
    CHECK(!check_category(*one));
    CHECK(one->objects.size() == 1);
}

TEST_CASE("missing composite is reported") {
    FinCategory c;
    c.name = "bad";
    c.objects = {"a", "b", "c"};
    c.morphisms = {{"f", "a", "b"}, {"g", "b", "c"}, {"id_a", "a", "a"},
                   {"id_b", "b", "b"}, {"id_c", "c", "c"}};
    c.identity = {{"a", "id_a"}, {"b", "id_b"}, {"c", "id_c"}};
    auto issue = check_category(c);
    REQUIRE(issue.has_value());
    CHECK(issue->code == "MissingComposite");
}

TEST_CASE("truncated simplex categories validate") {
    CHECK(!check_category(*testhelp::simplex_cat(1)));
    CHECK(!check_category(*testhelp::simplex_cat(2)));
    // |mor(Delta<=1)|: three maps [1]->[1], two [0]->[1], one [1]->[0], one [0]->[0]
    CHECK(testhelp::simplex_cat(1)->morphisms.size() == 7);
}

TEST_CASE("corrupted table fails associativity or identity laws") {
    FinCategory c;
    c.name = "bad2";
    c.objects = {"a"};
    c.morphisms = {{"e", "a", "a"}, {"id_a", "a", "a"}};
    c.identity = {{"a", "id_a"}};
    c.comp[{"e", "e"}] = "id_a";  // e*e=id is fine (Z/2); corrupt the identity law instead
    auto ok = check_category(c);
    CHECK(!ok);  // missing entries id*e handled implicitly, so Z/2 actually passes
    c.comp[{"e", "id_a"}] = "e";
    c.comp[{"id_a", "e"}] = "e";
    CHECK(!check_category(c));
    c.comp[{"e", "e"}] = "e";  // now e is idempotent and invertible-free: assoc holds, but
    // e*e=e with e*id=e violates nothing; break associativity with a 3-cycle instead
    FinCategory z4;
    z4.name = "z4ish";
    z4.objects = {"a"};
    z4.morphisms = {{"e", "a", "a"}, {"f", "a", "a"}, {"g", "a", "a"}, {"id_a", "a", "a"}};
    z4.identity = {{"a", "id_a"}};
    auto set = [&](const std::string& x, const std::string& y, const std::string& z) {
        z4.comp[{x, y}] = z;
    };
    // multiplication table chosen non-associative on purpose
    set("e", "e", "f");
    set("e", "f", "g");
    set("e", "g", "id_a");
    set("f", "e", "g");
    set("f", "f", "id_a");
    set("f", "g", "e");
    set("g", "e", "id_a");
    set("g", "f", "e");
    set("g", "g", "g");  // wrong: should be f
    auto issue = check_category(z4);
    REQUIRE(issue.has_value());
    CHECK(issue->code == "AssocViolation");
}

TEST_CASE("empty limit is the terminal presheaf") {
    CatPtr arrow = arrow_category();
    Diagram d;
    LimitResult lim = finite_limit(arrow, d);
    for (const std::string& o : arrow->objects) CHECK(lim.apex.level(o).size() == 1);
}

TEST_CASE("pullback of identity along identity is the object") {
    CatPtr arrow = arrow_category();
    Presheaf f = constant_presheaf(arrow, {"x", "y"}, "F");
    PullbackResult pb = pullback(identity_map(f), identity_map(f));
    CHECK(is_iso(pb.to_left));
    CHECK(same_map(pb.to_left, pb.to_right));
}

TEST_CASE("pullback of two subset inclusions is their intersection") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    PresheafMap i1 = testhelp::constant_inclusion(delta1, {"w", "x", "y"}, {"w", "x", "y", "z"});
    PresheafMap i2 = testhelp::constant_inclusion(delta1, {"x", "y", "z"}, {"w", "x", "y", "z"});
    PullbackResult pb = pullback(i1, i2);
    for (const std::string& o : delta1->objects) CHECK(pb.obj.level(o).size() == 2);

    Diagram d;
    d.add_node("l", i1.dom);
    d.add_node("r", i2.dom);
    d.add_node("z", i1.cod);
    d.add_edge("f", "l", "z", i1);
    d.add_edge("g", "r", "z", i2);
    LimitResult lim = finite_limit(delta1, d);
    std::vector<Presheaf> apexes = {terminal_presheaf(delta1),
                                    constant_presheaf(delta1, {"u", "v"}, "T"), lim.apex};
    CHECK(verify_limit_universal(delta1, d, lim, apexes));
}

TEST_CASE("empty colimit is the initial presheaf") {
    CatPtr arrow = arrow_category();
    Diagram d;
    ColimitResult co = finite_colimit(arrow, d);
    for (const std::string& o : arrow->objects) CHECK(co.apex.level(o).empty());
}

TEST_CASE("pushout along identities returns the object") {
    CatPtr arrow = arrow_category();
    Presheaf f = constant_presheaf(arrow, {"x", "y"}, "F");
    PushoutResult po = pushout(identity_map(f), identity_map(f));
    CHECK(is_iso(po.from_left));
    CHECK(same_map(po.from_left, po.from_right));
}

TEST_CASE("gluing the endpoints of the 1-simplex") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    Presheaf d1 = yoneda(delta1, "[1]");
    CHECK(d1.level("[0]").size() == 2);
    CHECK(d1.level("[1]").size() == 3);
    // boundary: both vertices and their degeneracies
    Presheaf bd;
    bd.name = "bd1";
    bd.base = delta1;
    bd.at["[0]"] = d1.level("[0]");
    bd.at["[1]"] = {"a11_00", "a11_11"};
    for (const Morphism& m : delta1->morphisms) {
        if (delta1->is_identity(m.id)) continue;
        for (const std::string& x : bd.at.at(m.dst)) bd.act[{m.id, x}] = d1.apply(m.id, x);
    }
    bd = make_presheaf(bd);
    PresheafMap inc;
    inc.name = "inc";
    inc.dom = bd;
    inc.cod = d1;
    for (const auto& [o, xs] : bd.at)
        for (const std::string& x : xs) inc.cmp[{o, x}] = x;
    inc = make_map(inc);
    PresheafMap collapse;
    Presheaf pt = terminal_presheaf(delta1);
    collapse.name = "collapse";
    collapse.dom = bd;
    collapse.cod = pt;
    for (const auto& [o, xs] : bd.at)
        for (const std::string& x : xs) collapse.cmp[{o, x}] = "()";
    collapse = make_map(collapse);

    PushoutResult po = pushout(inc, collapse);
    CHECK(po.obj.level("[0]").size() == 1);
    CHECK(po.obj.level("[1]").size() == 2);

    Diagram d;
    d.add_node("a", bd);
    d.add_node("l", d1);
    d.add_node("r", pt);
    d.add_edge("f", "a", "l", inc);
    d.add_edge("g", "a", "r", collapse);
    ColimitResult co = finite_colimit(delta1, d);
    std::vector<Presheaf> apexes = {pt, po.obj, constant_presheaf(delta1, {"0", "1"}, "2")};
    CHECK(verify_colimit_universal(delta1, d, co, apexes));
}

TEST_CASE("yoneda basics") {
    CatPtr one = terminal_category();
    Presheaf ystar = yoneda(one, "*");
    CHECK(ystar.level("*").size() == 1);

    CatPtr arrow = arrow_category();
    Presheaf yb = yoneda(arrow, "b");
    CHECK(yb.level("a").size() == 1);
    CHECK(yb.level("b").size() == 1);
    Presheaf ya = yoneda(arrow, "a");
    CHECK(ya.level("a").size() == 1);
    CHECK(ya.level("b").size() == 0);
}

TEST_CASE("yoneda lemma counts natural maps out of representables") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    Presheaf y1 = yoneda(delta1, "[1]");
    Presheaf y0 = yoneda(delta1, "[0]");
    CHECK(all_natural_maps(y1, y1).size() == y1.level("[1]").size());
    CHECK(all_natural_maps(y0, y1).size() == y1.level("[0]").size());
    CHECK(all_natural_maps(y1, y0).size() == y0.level("[1]").size());
}

TEST_CASE("category of elements") {
    CatPtr arrow = arrow_category();
    CatPtr el = category_of_elements(initial_presheaf(arrow));
    CHECK(el->objects.empty());

    CatPtr delta1 = testhelp::simplex_cat(1);
    CatPtr el1 = category_of_elements(yoneda(delta1, "[1]"));
    CHECK(el1->objects.size() == 5);
    CHECK(!check_category(*el1));
}

TEST_CASE("left kan extension along the identity is an isomorphism") {
    CatPtr arrow = arrow_category();
    Presheaf f;
    f.name = "F";
    f.base = arrow;
    f.at["a"] = {"x", "y"};
    f.at["b"] = {"u"};
    f.act[{"f", "u"}] = "x";
    f = make_presheaf(f);
    Functor idf;
    idf.source = arrow;
    idf.target = arrow;
    for (const std::string& o : arrow->objects) idf.obj_map[o] = o;
    for (const Morphism& m : arrow->morphisms) idf.mor_map[m.id] = m.id;
    REQUIRE(!check_functor(idf));
    LanResult lan = left_kan(f, idf);
    PresheafMap iso;
    iso.name = "canonical";
    iso.dom = f;
    iso.cod = lan.lan;
    for (const auto& [cx, target] : lan.unit) iso.cmp[{cx.first, cx.second}] = target.second;
    iso = make_map(iso);
    CHECK(is_iso(iso));
}

TEST_CASE("left kan extension along C -> 1 computes the colimit") {
    CatPtr arrow = arrow_category();
    CatPtr one = terminal_category();
    Presheaf f;
    f.name = "F";
    f.base = arrow;
    f.at["a"] = {"x", "y"};
    f.at["b"] = {"u"};
    f.act[{"f", "u"}] = "x";  // colim identifies u with x, leaving {x~u, y}
    f = make_presheaf(f);
    Functor bang;
    bang.source = arrow;
    bang.target = one;
    bang.obj_map = {{"a", "*"}, {"b", "*"}};
    for (const Morphism& m : arrow->morphisms) bang.mor_map[m.id] = "id_*";
    REQUIRE(!check_functor(bang));
    LanResult lan = left_kan(f, bang);
    CHECK(lan.lan.level("*").size() == 2);
}

TEST_CASE("left kan extension along the discrete inclusion") {
    CatPtr arrow = arrow_category();
    Functor inc = discrete_inclusion(arrow);
    REQUIRE(!check_functor(inc));

    // supported at b: hom(a,b) and hom(b,b) are singletons, so copies spread
    // to both objects
    Presheaf fb;
    fb.name = "Fb";
    fb.base = inc.source;
    fb.at["a"] = {};
    fb.at["b"] = {"s", "t"};
    fb = make_presheaf(fb);
    LanResult lb = left_kan(fb, inc);
    CHECK(lb.lan.level("a").size() == 2);
    CHECK(lb.lan.level("b").size() == 2);

    // supported at a: hom(b,a) is empty, so nothing appears at b
    Presheaf fa;
    fa.name = "Fa";
    fa.base = inc.source;
    fa.at["a"] = {"s", "t"};
    fa.at["b"] = {};
    fa = make_presheaf(fa);
    LanResult la = left_kan(fa, inc);
    CHECK(la.lan.level("a").size() == 2);
    CHECK(la.lan.level("b").size() == 0);
}

TEST_CASE("left kan adjunction: maps biject with transposed maps") {
    CatPtr arrow = arrow_category();
    Functor inc = discrete_inclusion(arrow);
    Presheaf f;
    f.name = "F";
    f.base = inc.source;
    f.at["a"] = {"p"};
    f.at["b"] = {"q"};
    f = make_presheaf(f);
    LanResult lan = left_kan(f, inc);

    Presheaf g;
    g.name = "G";
    g.base = arrow;
    g.at["a"] = {"0", "1"};
    g.at["b"] = {"m"};
    g.act[{"f", "m"}] = "0";
    g = make_presheaf(g);

    std::vector<PresheafMap> upstairs = all_natural_maps(lan.lan, g);
    std::vector<PresheafMap> downstairs = all_natural_maps(f, restrict_presheaf(g, inc));
    CHECK(upstairs.size() == downstairs.size());
    std::set<std::string> transposed;
    for (const PresheafMap& k : upstairs)
        transposed.insert(serialize_map(lan_transpose(f, lan, inc, k)));
    CHECK(transposed.size() == upstairs.size());
    std::set<std::string> expected;
    for (const PresheafMap& t : downstairs) expected.insert(serialize_map(t));
    CHECK(transposed == expected);
}

TEST_CASE("product categories and evaluation") {
    CatPtr one = terminal_category();
    CatPtr arrow = arrow_category();
    CatPtr delta1 = testhelp::simplex_cat(1);

    ProductSite oneC = product_category(one, arrow);
    CHECK(oneC.product->objects.size() == arrow->objects.size());
    CHECK(oneC.product->morphisms.size() == arrow->morphisms.size());

    ProductSite d1a = product_category(delta1, arrow);
    CHECK(d1a.product->morphisms.size() == delta1->morphisms.size() * 3);

    // evaluation over C x 1 returns the original levels
    ProductSite c1 = product_category(arrow, one);
    Presheaf y = yoneda(c1.product, ProductSite::pair_id("b", "*"));
    Presheaf ev = evaluation_at(c1, y, "*");
    CHECK(ev.level("a").size() == 1);
    CHECK(ev.level("b").size() == 1);

    // evaluation of y((c,d)) at d counts hom(c',c) x hom(d,d)
    ProductSite aa = product_category(arrow, arrow);
    Presheaf ybb = yoneda(aa.product, ProductSite::pair_id("b", "b"));
    Presheaf evb = evaluation_at(aa, ybb, "b");
    CHECK(evb.level("a").size() == 1);  // hom(a,b) x hom(b,b)
    CHECK(evb.level("b").size() == 1);
    Presheaf eva = evaluation_at(aa, ybb, "a");
    CHECK(eva.level("a").size() == 1);  // hom(a,b) x hom(a,b): one map a->b each
    CHECK(eva.level("b").size() == 1);
}

TEST_CASE("evaluation is functorial along D-morphisms") {
    CatPtr arrow = arrow_category();
    ProductSite site = product_category(arrow, arrow);
    Presheaf y = yoneda(site.product, ProductSite::pair_id("b", "b"));
    PresheafMap t = evaluation_map(site, y, "f");
    CHECK(!check_map(t));
    CHECK(same_presheaf(t.dom, evaluation_at(site, y, "b")));
    CHECK(same_presheaf(t.cod, evaluation_at(site, y, "a")));
}

TEST_CASE("pointwise limits agree with set-level brute force") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    PresheafMap i1 = testhelp::constant_inclusion(delta1, {"w", "x"}, {"w", "x", "y", "z"});
    PresheafMap i2 = testhelp::constant_inclusion(delta1, {"x", "y"}, {"w", "x", "y", "z"});
    Diagram d;
    d.add_node("l", i1.dom);
    d.add_node("r", i2.dom);
    d.add_node("z", i1.cod);
    d.add_edge("f", "l", "z", i1);
    d.add_edge("g", "r", "z", i2);
    LimitResult lim = finite_limit(delta1, d);
    for (const std::string& o : delta1->objects) {
        std::size_t count = 0;
        for (const std::string& a : i1.dom.level(o))
            for (const std::string& b : i2.dom.level(o))
                for (const std::string& c : i1.cod.level(o))
                    if (i1.apply(o, a) == c && i2.apply(o, b) == c) ++count;
        CHECK(lim.apex.level(o).size() == count);
    }
}
