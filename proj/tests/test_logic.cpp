#include "doctest.h"

#include "helpers.hpp"
#include "sheafsmith/logic.hpp"
#include "sheafsmith/theories.hpp"

using namespace sheafsmith;
using namespace sheafsmith::logic;
using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMap;

namespace {

SetModel zmod(int n) {
    SetModel m;
    m.lang = group_theory().lang;
    for (int i = 0; i < n; ++i) m.sorts["G"].push_back("g" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m.functions["m"][{"g" + std::to_string(i), "g" + std::to_string(j)}] =
                "g" + std::to_string((i + j) % n);
    m.functions["e"][{}] = "g0";
    for (int i = 0; i < n; ++i)
        m.functions["inv"][{"g" + std::to_string(i)}] = "g" + std::to_string((n - i) % n);
    return m;
}

// Z/2 as a one-object groupoid in tabular form.
SetModel z2_groupoid() {
    SetModel m;
    m.lang = groupoid_theory().lang;
    m.sorts["O"] = {"o"};
    m.sorts["A"] = {"e", "s"};
    m.sorts["P"] = {"(e;e)", "(e;s)", "(s;e)", "(s;s)"};
    for (const std::string& a : m.sorts["A"]) {
        m.functions["s"][{a}] = "o";
        m.functions["t"][{a}] = "o";
    }
    m.functions["i"][{"o"}] = "e";
    m.functions["inv"][{"e"}] = "e";
    m.functions["inv"][{"s"}] = "s";
    auto pair = [](const std::string& a, const std::string& b) { return "(" + a + ";" + b + ")"; };
    for (const std::string& a : m.sorts["A"])
        for (const std::string& b : m.sorts["A"]) {
            m.functions["p1"][{pair(a, b)}] = a;
            m.functions["p2"][{pair(a, b)}] = b;
            m.functions["c"][{pair(a, b)}] = (a == b) ? "e" : "s";
        }
    return m;
}

}  // namespace

TEST_CASE("parsing a one-axiom cartesian theory") {
    Theory t = parse_theory("theory T\nsort A\naxiom forall a:A. true => a = a\n");
    CHECK(t.name == "T");
    CHECK(t.axioms.size() == 1);
    CHECK(check_fragment(t, "cartesian").ok);
}

TEST_CASE("groupoid theory is cartesian and round-trips through the printer") {
    Theory g = groupoid_theory();
    CHECK(check_fragment(g, "cartesian").ok);
    std::string printed = print_theory(g);
    Theory reparsed = parse_theory(printed);
    CHECK(print_theory(reparsed) == printed);
    CHECK(reparsed.axioms.size() == g.axioms.size());
    CHECK(check_fragment(reparsed, "cartesian").ok);
}

TEST_CASE("fragment gatekeeping") {
    // disjunction is not cartesian
    CHECK_THROWS_AS(
        parse_theory("theory T\nfragment cartesian\nsort A\n"
                     "axiom forall a:A. a = a \\/ a = a\n"),
        ParseError);
    Theory t = parse_theory("theory T\nsort A\nfun f : A -> A\n"
                            "axiom forall a:A. true => exists b:A. f(b) = a\n");
    CHECK(!check_fragment(t, "cartesian").ok);  // uses exists, not exists!
    CHECK(check_fragment(t, "coherent").ok);
    Theory neg = parse_theory("theory T\nsort A\naxiom forall a:A. not a = a => false\n");
    CHECK(!check_fragment(neg, "coherent").ok);
    CHECK(check_fragment(neg, "general").ok);
}

TEST_CASE("parse errors carry line numbers and rule names") {
    CHECK_THROWS_WITH_AS(parse_theory("theory T\nsort A\nfun f : B -> A\n"),
                         doctest::Contains("UnknownSort"), ParseError);
    CHECK_THROWS_WITH_AS(parse_theory("theory T\nsort A\nfun f : A -> A\n"
                                      "axiom forall a:A. f(a, a) = a\n"),
                         doctest::Contains("ArityMismatch"), ParseError);
    CHECK_THROWS_WITH_AS(parse_theory("theory T\nsort A\naxiom a = a\n"),
                         doctest::Contains("UnknownSymbol"), ParseError);
}

TEST_CASE("truth evaluates to the whole subobject in any context") {
    Interpretation m = set_model_as_interpretation(zmod(3), "z3");
    EvalResult r = eval_formula(m, truth(), {{"x", "G"}, {"y", "G"}});
    CHECK(r.sub == subobj::whole_subobject(r.context.obj));
    CHECK(!r.capped);
}

TEST_CASE("satisfaction of the group axioms and a corrupted table") {
    Theory g = group_theory();
    for (int n : {1, 2, 3, 4}) {
        Interpretation m = set_model_as_interpretation(zmod(n), "z");
        CHECK(!check_interpretation(m));
        Satisfaction s = satisfies(m, g);
        CHECK(s.ok);
    }
    SetModel bad = zmod(3);
    bad.functions["m"][{"g1", "g2"}] = "g1";  // breaks inverse and unit laws
    Satisfaction s = satisfies(set_model_as_interpretation(bad, "bad"), g);
    CHECK(!s.ok);
    CHECK(!s.undetermined);
    CHECK(!s.axiom.empty());
    CHECK(!s.witness.empty());
}

TEST_CASE("naive evaluation agrees with the subobject calculus over Set") {
    Theory g = group_theory();
    Config cfg;
    for (int n : {2, 3}) {
        SetModel sm = zmod(n);
        Interpretation m = set_model_as_interpretation(sm, "z");
        for (const Formula& a : g.axioms) {
            std::map<std::string, std::string> env;
            Tri naive = naive_eval(sm, a, env, cfg);
            EvalResult r = eval_formula(m, a, {});
            bool calculus = r.sub == subobj::whole_subobject(r.context.obj);
            CHECK(naive == (calculus ? Tri::True : Tri::False));
        }
    }
    // a false sentence
    SetModel sm = zmod(2);
    Formula bad = forall({{"x", "G"}},
                         implies(truth(), equal(var("x", "G"), app(sm.lang, "e", {}))));
    std::map<std::string, std::string> env;
    CHECK(naive_eval(sm, bad, env, cfg) == Tri::False);
    Interpretation m = set_model_as_interpretation(sm, "z2");
    EvalResult r = eval_formula(m, bad, {});
    CHECK(r.sub != subobj::whole_subobject(r.context.obj));
}

TEST_CASE("groupoid laws hold exactly when the tables are right") {
    Theory g = groupoid_theory();
    Interpretation m = set_model_as_interpretation(z2_groupoid(), "z2grpd");
    CHECK(!check_interpretation(m));
    CHECK(satisfies(m, g).ok);
    SetModel bad = z2_groupoid();
    bad.functions["c"][{"(s;s)"}] = "s";  // s∘s should be e
    CHECK(!satisfies(set_model_as_interpretation(bad, "bad"), g).ok);
}

TEST_CASE("a finite category is a model of the category theory") {
    Config cfg;
    // the subobject-calculus route on a small instance
    SetModel arr = category_as_set_model(*fincat::arrow_category());
    CHECK(satisfies(set_model_as_interpretation(arr, "arrow"), category_theory()).ok);
    // the naive route scales to Delta<=1 (|P| is large for the calculus)
    SetModel m = category_as_set_model(*testhelp::simplex_cat(1));
    CHECK(naive_satisfies(m, category_theory(), cfg) == Tri::True);
    fincat::FinCategory back = set_model_as_category(m, "round");
    CHECK(!fincat::check_category(back));
    CHECK(fincat::same_category(back, *testhelp::simplex_cat(1)));

    // a non-associative table is rejected with a witness
    SetModel bad = m;
    std::string p0 = bad.sorts["P"][5];
    bad.functions["c"][{p0}] = bad.functions["c"][{p0}] == bad.sorts["A"][0]
                                   ? bad.sorts["A"][1]
                                   : bad.sorts["A"][0];
    CHECK(naive_satisfies(bad, category_theory(), cfg) == Tri::False);
}

TEST_CASE("exists-unique elaboration") {
    Language lang;
    lang.sorts = {"A"};
    Formula uniq = exists_unique({{"x", "A"}}, equal(var("x", "A"), var("x", "A")));
    for (int n : {1, 2}) {
        SetModel sm;
        sm.lang = lang;
        for (int i = 0; i < n; ++i) sm.sorts["A"].push_back("a" + std::to_string(i));
        std::map<std::string, std::string> env;
        Config cfg;
        CHECK(naive_eval(sm, uniq, env, cfg) == (n == 1 ? Tri::True : Tri::False));
        Interpretation m = set_model_as_interpretation(sm, "m");
        EvalResult r = eval_formula(m, uniq, {});
        CHECK((r.sub == subobj::whole_subobject(r.context.obj)) == (n == 1));
    }
}

TEST_CASE("model homomorphisms") {
    Theory g = group_theory();
    Interpretation z2 = set_model_as_interpretation(zmod(2), "z2");
    Interpretation z4 = set_model_as_interpretation(zmod(4), "z4");
    // identity is a hom
    std::map<std::string, PresheafMap> idc{{"G", fincat::identity_map(z2.sorts.at("G"))}};
    CHECK(is_model_hom(z2, z2, idc).ok);
    // g1 -> g2 is the embedding Z/2 -> Z/4
    PresheafMap emb;
    emb.name = "emb";
    emb.dom = z2.sorts.at("G");
    emb.cod = z4.sorts.at("G");
    emb.cmp[{"*", "g0"}] = "g0";
    emb.cmp[{"*", "g1"}] = "g2";
    emb = fincat::make_map(emb);
    CHECK(is_model_hom(z2, z4, {{"G", emb}}).ok);
    // g1 -> g1 is not a hom
    PresheafMap bad = emb;
    bad.cmp[{"*", "g1"}] = "g1";
    HomReport rep = is_model_hom(z2, z4, {{"G", bad}});
    CHECK(!rep.ok);
    CHECK(rep.detail.find("m") != std::string::npos);
}

TEST_CASE("Mor(S) for the empty-signature theory") {
    Theory s;
    s.name = "bare";
    s.fragment = "cartesian";
    s.lang.sorts = {"A"};
    MorTheory mt = mor_theory(s);
    CHECK(mt.theory.lang.sorts.size() == 2);
    CHECK(mt.theory.lang.functions.size() == 1);
    CHECK(check_fragment(mt.theory, "cartesian").ok);
}

TEST_CASE("Mor(S) models split into homomorphisms and reassemble") {
    Theory g = group_theory();
    MorTheory mt = mor_theory(g);
    Interpretation z2 = set_model_as_interpretation(zmod(2), "z2");
    Interpretation z4 = set_model_as_interpretation(zmod(4), "z4");
    PresheafMap emb;
    emb.name = "emb";
    emb.dom = z2.sorts.at("G");
    emb.cod = z4.sorts.at("G");
    emb.cmp[{"*", "g0"}] = "g0";
    emb.cmp[{"*", "g1"}] = "g2";
    emb = fincat::make_map(emb);

    Interpretation mor = assemble_mor_model(mt, g, z2, z4, {{"G", emb}});
    CHECK(satisfies(mor, mt.theory).ok);
    SplitModel split = split_mor_model(mt, g, mor);
    CHECK(is_model_hom(split.dom, split.cod, split.components).ok);
    CHECK(fincat::same_map(split.components.at("G"), emb));
    // a non-hom cannot be assembled into a model of Mor(S)
    PresheafMap bad = emb;
    bad.cmp[{"*", "g1"}] = "g1";
    Interpretation mor_bad = assemble_mor_model(mt, g, z2, z4, {{"G", bad}});
    CHECK(!satisfies(mor_bad, mt.theory).ok);
}

TEST_CASE("bounded model enumeration") {
    // empty language: models are carrier choices only
    Theory bare;
    bare.name = "bare";
    bare.lang.sorts = {"A"};
    EnumBounds b1;
    b1.default_bound = 1;
    CHECK(enumerate_models(bare, b1).size() == 2);  // sizes 0 and 1

    Theory absurd = bare;
    absurd.axioms.push_back(falsity());
    CHECK(enumerate_models(absurd, b1).empty());

    // groups of order <= 3 up to isomorphism: trivial, Z/2, Z/3
    EnumBounds gb;
    gb.per_sort["G"] = 3;
    gb.up_to_iso = true;
    std::vector<SetModel> groups = enumerate_models(group_theory(), gb);
    CHECK(groups.size() == 3);
    std::set<std::size_t> orders;
    for (const SetModel& g : groups) orders.insert(g.sorts.at("G").size());
    CHECK(orders == std::set<std::size_t>{1, 2, 3});
    // cross-check the order-3 table against Z/3 up to relabeling: every
    // element satisfies x*x*x = e
    Config cfg;
    for (const SetModel& g : groups) {
        if (g.sorts.at("G").size() != 3) continue;
        Formula cube = forall(
            {{"x", "G"}},
            implies(truth(),
                    equal(app(g.lang, "m",
                              {var("x", "G"), app(g.lang, "m", {var("x", "G"), var("x", "G")})}),
                          app(g.lang, "e", {}))));
        std::map<std::string, std::string> env;
        CHECK(naive_eval(g, cube, env, cfg) == Tri::True);
    }
}

TEST_CASE("presheaf theory models are presheaves") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    PresheafTheoryResult pt = presheaf_theory(delta1);
    CHECK(check_fragment(pt.theory, "cartesian").ok);

    Presheaf y1 = fincat::yoneda(delta1, "[1]");
    SetModel m = set_presheaf_as_model(pt, y1);
    Config cfg;
    CHECK(naive_satisfies(m, pt.theory, cfg) == Tri::True);
    Presheaf back = set_model_as_presheaf(pt, delta1, m, "back");
    CHECK(fincat::same_presheaf(back, y1));

    // enumeration of small presheaves over Delta<=1 matches a direct count
    EnumBounds b;
    b.per_sort["X[0]"] = 1;
    b.per_sort["X[1]"] = 1;
    std::vector<SetModel> models = enumerate_models(pt.theory, b);
    // carriers (0,0) and (1,1): the empty presheaf and the point
    CHECK(models.size() == 2);
    for (const SetModel& sm : models) {
        Presheaf p = set_model_as_presheaf(pt, delta1, sm, "enum");
        CHECK(!fincat::check_presheaf(p));
    }
}

TEST_CASE("transposition across a product site round-trips") {
    CatPtr arrow = fincat::arrow_category();
    fincat::ProductSite site = fincat::product_category(arrow, arrow);
    Theory t;
    t.name = "endo";
    t.fragment = "cartesian";
    t.lang.sorts = {"A"};
    t.lang.functions = {{"f", {"A"}, "A"}};

    // a model over the product: A = yoneda of the terminal-ish corner
    Interpretation m;
    m.name = "m";
    m.base = site.product;
    m.lang = t.lang;
    Presheaf a = fincat::yoneda(site.product, fincat::ProductSite::pair_id("b", "b"));
    m.sorts["A"] = a;
    fincat::ProductResult prod = fincat::finite_product({a}, site.product);
    PresheafMap f;
    f.name = "f";
    f.dom = prod.obj;
    f.cod = a;
    for (const auto& [key, comps] : prod.components) f.cmp[key] = comps[0];  // identity
    m.functions["f"] = fincat::make_map(f);
    REQUIRE(!check_interpretation(m));

    TransposedModels tm = transpose_to_diagram(site, m);
    CHECK(tm.at.size() == 2);
    for (const auto& [d, md] : tm.at) CHECK(!check_interpretation(md));
    Interpretation back = transpose_from_diagram(site, tm, t.lang);
    CHECK(fincat::same_presheaf(back.sorts.at("A"), m.sorts.at("A")));
    CHECK(fincat::same_map(back.functions.at("f"), m.functions.at("f")));
    // satisfaction agrees with the objectwise models
    Satisfaction s = satisfies(m, t);
    bool object_wise = true;
    for (const auto& [d, md] : tm.at)
        if (!satisfies(md, t).ok) object_wise = false;
    CHECK(s.ok == object_wise);
}

TEST_CASE("monotonicity in a growing relation") {
    Language lang;
    lang.sorts = {"A"};
    lang.relations = {{"R", {"A"}}};
    Formula phi = disj({relation(lang, "R", {var("x", "A")}),
                        equal(var("x", "A"), var("x", "A"))});
    Formula psi = relation(lang, "R", {var("x", "A")});
    SetModel small;
    small.lang = lang;
    small.sorts["A"] = {"a0", "a1"};
    small.relations["R"] = {{"a0"}};
    SetModel big = small;
    big.relations["R"].insert({"a1"});
    Interpretation ms = set_model_as_interpretation(small, "s");
    Interpretation mb = set_model_as_interpretation(big, "b");
    for (const Formula* f : {&phi, &psi}) {
        EvalResult rs = eval_formula(ms, *f, {{"x", "A"}});
        EvalResult rb = eval_formula(mb, *f, {{"x", "A"}});
        CHECK(subobj::leq(rs.sub, rb.sub));
    }
}

TEST_CASE("or-family stabilization and cap reporting") {
    // reachability along a function: family(k) holds iff f^k(x) = y
    Language lang;
    lang.sorts = {"A"};
    lang.functions = {{"f", {"A"}, "A"}};
    auto family = [lang](int k) {
        Term t = var("x", "A");
        for (int i = 0; i < k; ++i) t = app(lang, "f", {t});
        return equal(t, var("y", "A"));
    };
    Formula reach = or_family("orbit", family, 0);
    SetModel sm;
    sm.lang = lang;
    sm.sorts["A"] = {"a0", "a1", "a2"};
    sm.functions["f"][{"a0"}] = "a1";
    sm.functions["f"][{"a1"}] = "a2";
    sm.functions["f"][{"a2"}] = "a2";
    Interpretation m = set_model_as_interpretation(sm, "m");
    Config cfg;
    cfg.stage_cap = 16;
    EvalResult r = eval_formula(m, reach, {{"x", "A"}, {"y", "A"}}, cfg);
    CHECK(!r.capped);
    CHECK(r.sub.contains("*", "(a0,a2)"));
    CHECK(!r.sub.contains("*", "(a1,a0)"));
    // with a tiny cap the family cannot stabilize and reports capped
    Config tiny = cfg;
    tiny.stage_cap = 1;
    EvalResult rt = eval_formula(m, reach, {{"x", "A"}, {"y", "A"}}, tiny);
    CHECK(rt.capped);
}
