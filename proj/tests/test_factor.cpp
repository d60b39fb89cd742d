#include "doctest.h"

#include "helpers.hpp"
#include "sheafsmith/factor.hpp"

using namespace sheafsmith;
using namespace sheafsmith::factor;
using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMap;

namespace {

PresheafMap set_map(const CatPtr& one, const std::vector<std::string>& dom_elems,
                    const std::vector<std::string>& cod_elems,
                    const std::map<std::string, std::string>& table, const std::string& name) {
    Presheaf d = fincat::constant_presheaf(one, dom_elems, name + ".dom");
    Presheaf c = fincat::constant_presheaf(one, cod_elems, name + ".cod");
    PresheafMap m;
    m.name = name;
    m.dom = d;
    m.cod = c;
    for (const std::string& x : dom_elems) m.cmp[{"*", x}] = table.at(x);
    return fincat::make_map(std::move(m));
}

PshGenSet boundary_genset(const CatPtr& delta1) {
    Presheaf d0 = fincat::yoneda(delta1, "[0]");
    PresheafMap bd0;  // empty -> point
    bd0.name = "bd0";
    bd0.dom = fincat::initial_presheaf(delta1);
    bd0.cod = d0;
    bd0 = fincat::make_map(std::move(bd0));
    return make_genset("boundaries", {bd0, testhelp::boundary1(delta1)});
}

}  // namespace

TEST_CASE("find_lift basics") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    Presheaf d1 = fincat::yoneda(delta1, "[1]");
    // i an isomorphism: lift exists
    PresheafMap idd = fincat::identity_map(d1);
    Presheaf pt = fincat::terminal_presheaf(delta1);
    PresheafMap collapse;
    collapse.name = "!";
    collapse.dom = d1;
    collapse.cod = pt;
    for (const auto& [o, xs] : d1.at)
        for (const std::string& x : xs) collapse.cmp[{o, x}] = "()";
    collapse = fincat::make_map(std::move(collapse));
    CHECK(PshArrows::lift(idd, collapse, idd, collapse, {}).has_value());

    // horn inclusion against a map to the point: filler found
    PresheafMap horn = testhelp::horn10(delta1);
    PresheafMap top;
    top.name = "t";
    top.dom = horn.dom;
    top.cod = d1;
    top.cmp[{"[0]", "a01_0"}] = "a01_0";
    top.cmp[{"[1]", "a11_00"}] = "a11_00";
    top = fincat::make_map(std::move(top));
    PresheafMap bottom;
    bottom.name = "b";
    bottom.dom = horn.cod;
    bottom.cod = pt;
    for (const auto& [o, xs] : horn.cod.at)
        for (const std::string& x : xs) bottom.cmp[{o, x}] = "()";
    bottom = fincat::make_map(std::move(bottom));
    auto filler = PshArrows::lift(horn, collapse, top, bottom, {});
    REQUIRE(filler.has_value());
    CHECK(fincat::same_map(fincat::compose_maps(*filler, horn), top));

    // boundary against a two-point discrete target with distinct endpoints
    Presheaf two = fincat::constant_presheaf(delta1, {"p", "q"}, "two");
    PresheafMap bd = testhelp::boundary1(delta1);
    PresheafMap ends;
    ends.name = "ends";
    ends.dom = bd.dom;
    ends.cod = two;
    ends.cmp[{"[0]", "a01_0"}] = "p";
    ends.cmp[{"[0]", "a01_1"}] = "q";
    ends.cmp[{"[1]", "a11_00"}] = "p";
    ends.cmp[{"[1]", "a11_11"}] = "q";
    ends = fincat::make_map(std::move(ends));
    PresheafMap two_to_pt;
    two_to_pt.name = "!";
    two_to_pt.dom = two;
    two_to_pt.cod = pt;
    for (const auto& [o, xs] : two.at)
        for (const std::string& x : xs) two_to_pt.cmp[{o, x}] = "()";
    two_to_pt = fincat::make_map(std::move(two_to_pt));
    PresheafMap d1_to_pt = collapse;
    CHECK(!PshArrows::lift(bd, two_to_pt, ends, d1_to_pt, {}).has_value());
}

TEST_CASE("in_inj with empty and trivial data") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    Presheaf d1 = fincat::yoneda(delta1, "[1]");
    PshGenSet empty = make_genset("none", {});
    PresheafMap any;
    any.name = "any";
    any.dom = d1;
    any.cod = d1;
    any = fincat::identity_map(d1);
    CHECK(in_inj<PshArrows>(any, empty).ok);
    PshGenSet gens = boundary_genset(delta1);
    CHECK(in_inj<PshArrows>(fincat::identity_map(d1), gens).ok);
    // the boundary inclusion itself is not injective-against-boundaries
    CHECK(!in_inj<PshArrows>(testhelp::boundary1(delta1), gens).ok);
}

TEST_CASE("one_step with no squares leaves the domain unchanged") {
    CatPtr one = fincat::terminal_category();
    // no squares: the generator's domain has an element but m's domain is empty
    PresheafMap gen = set_map(one, {"a"}, {"a", "b"}, {{"a", "a"}}, "gen");
    PshGenSet gens = make_genset("g", {gen});
    PresheafMap m;
    m.name = "m";
    m.dom = fincat::initial_presheaf(one);
    m.cod = fincat::constant_presheaf(one, {"z"}, "Z");
    m = fincat::make_map(std::move(m));
    OneStep<PshArrows> step = one_step<PshArrows>(m, gens, {});
    CHECK(step.attachments.empty());
    CHECK(fincat::is_iso(step.theta));
}

TEST_CASE("one_step on a single square is the plain pushout") {
    CatPtr one = fincat::terminal_category();
    PresheafMap i = set_map(one, {"a"}, {"a", "b"}, {{"a", "a"}}, "i");
    // m : {x} -> {y}; single square: top a->x, bottom a,b -> y
    PresheafMap m = set_map(one, {"x"}, {"y"}, {{"x", "y"}}, "m");
    PshGenSet gens = make_genset("i", {i});
    auto sqs = PshArrows::squares(i, m, {});
    REQUIRE(sqs.size() == 1);
    OneStep<PshArrows> step = one_step<PshArrows>(m, gens, {});
    REQUIRE(step.attachments.size() == 1);
    fincat::PushoutResult po = fincat::pushout(sqs[0].top, i);
    CHECK(step.theta.cod.total_size() == po.obj.total_size());
    CHECK(fincat::same_map(fincat::compose_maps(step.psi, step.theta), m));
}

TEST_CASE("one_step is functorial in the arrow") {
    CatPtr one = fincat::terminal_category();
    PresheafMap i = set_map(one, {}, {"c"}, {}, "0>1");
    PshGenSet gens = make_genset("i", {i});
    // arrows m, m' and a morphism (u, v) of arrows between them
    PresheafMap m = set_map(one, {"x"}, {"y"}, {{"x", "y"}}, "m");
    PresheafMap m2 = set_map(one, {"x1", "x2"}, {"y1", "y2"}, {{"x1", "y1"}, {"x2", "y2"}}, "m2");
    PresheafMap u = fincat::make_map([&] {
        PresheafMap f;
        f.name = "u";
        f.dom = m.dom;
        f.cod = m2.dom;
        f.cmp[{"*", "x"}] = "x1";
        return f;
    }());
    PresheafMap v = fincat::make_map([&] {
        PresheafMap f;
        f.name = "v";
        f.dom = m.cod;
        f.cod = m2.cod;
        f.cmp[{"*", "y"}] = "y1";
        return f;
    }());
    REQUIRE(fincat::same_map(fincat::compose_maps(m2, u), fincat::compose_maps(v, m)));

    PshOneStepDetailed s1 = one_step_detailed(m, gens, {});
    PshOneStepDetailed s2 = one_step_detailed(m2, gens, {});
    // the induced map F(m) -> F(m'): x-part through u, cell parts matched by
    // the image square
    PresheafMap induced;
    induced.name = "F(u,v)";
    induced.dom = s1.step.theta.cod;
    induced.cod = s2.step.theta.cod;
    // x-part
    for (const auto& [key, x] : u.cmp) {
        std::string from = s1.step.theta.apply(key.first, key.second);
        induced.cmp[{key.first, from}] = s2.step.theta.apply(key.first, x);
    }
    // cell parts: square s of m maps to the square (u∘top, v∘bottom) of m2
    for (std::size_t t = 0; t < s1.step.attachments.size(); ++t) {
        const auto& att = s1.step.attachments[t];
        PresheafMap top2 = fincat::compose_maps(u, att.top);
        PresheafMap bottom2 = fincat::compose_maps(v, att.bottom);
        std::optional<std::size_t> target;
        for (std::size_t t2 = 0; t2 < s2.step.attachments.size(); ++t2)
            if (s2.step.attachments[t2].gen == att.gen &&
                fincat::same_map(s2.step.attachments[t2].top, top2) &&
                fincat::same_map(s2.step.attachments[t2].bottom, bottom2)) {
                target = t2;
                break;
            }
        REQUIRE(target.has_value());
        const PresheafMap& leg1 = s1.cell_legs[t];
        const PresheafMap& leg2 = s2.cell_legs[*target];
        for (const auto& [key, cls] : leg1.cmp)
            induced.cmp[{key.first, cls}] = leg2.apply(key.first, key.second);
    }
    induced = fincat::make_map(std::move(induced));
    CHECK(fincat::same_map(fincat::compose_maps(induced, s1.step.theta),
                           fincat::compose_maps(s2.step.theta, u)));
    CHECK(fincat::same_map(fincat::compose_maps(s2.step.psi, induced),
                           fincat::compose_maps(v, s1.step.psi)));
}

TEST_CASE("soa_factor completes, certifies, and replays") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    PshGenSet gens = boundary_genset(delta1);
    Presheaf d1 = fincat::yoneda(delta1, "[1]");

    // a map already in inj(I): stage 0 and identity cell part. The nerve of
    // the chaotic groupoid on two objects has an edge in every direction.
    Presheaf pt = fincat::terminal_presheaf(delta1);
    Presheaf k2;
    k2.name = "K2";
    k2.base = delta1;
    k2.at["[0]"] = {"0", "1"};
    k2.at["[1]"] = {"e00", "e01", "e10", "e11"};
    for (const std::string& e : k2.at["[1]"]) {
        k2.act[{"a01_0", e}] = std::string(1, e[1]);  // source vertex
        k2.act[{"a01_1", e}] = std::string(1, e[2]);  // target vertex
        k2.act[{"a11_00", e}] = "e" + std::string(1, e[1]) + std::string(1, e[1]);
        k2.act[{"a11_11", e}] = "e" + std::string(1, e[2]) + std::string(1, e[2]);
    }
    for (const std::string& v : k2.at["[0]"]) k2.act[{"a10_00", v}] = "e" + v + v;
    k2 = fincat::make_presheaf(std::move(k2));
    PresheafMap k2_to_pt;
    k2_to_pt.name = "!";
    k2_to_pt.dom = k2;
    k2_to_pt.cod = pt;
    for (const auto& [o, xs] : k2.at)
        for (const std::string& x : xs) k2_to_pt.cmp[{o, x}] = "()";
    k2_to_pt = fincat::make_map(std::move(k2_to_pt));
    FactorizationResult<PshArrows> fr0 = soa_factor<PshArrows>(k2_to_pt, gens, 8);
    CHECK(fr0.status == FactorStatus::Complete);
    CHECK(fr0.stage_count == 0);
    CHECK(fincat::is_iso(fr0.c));

    // empty -> Delta^1 factors with a finite cell presentation
    PresheafMap m;
    m.name = "0>d1";
    m.dom = fincat::initial_presheaf(delta1);
    m.cod = d1;
    m = fincat::make_map(std::move(m));
    FactorizationResult<PshArrows> fr = soa_factor<PshArrows>(m, gens, 8);
    REQUIRE(fr.status == FactorStatus::Complete);
    CHECK(fr.stage_count >= 1);
    CHECK(fincat::same_map(fincat::compose_maps(fr.f, fr.c), m));
    CHECK(in_inj<PshArrows>(fr.f, gens).ok);
    CHECK(replay_cell<PshArrows>(m, gens, fr.cell, &fr.f));

    // cap 0 on a map outside inj(I): honestly undetermined
    FactorizationResult<PshArrows> capped = soa_factor<PshArrows>(m, gens, 0);
    CHECK(capped.status == FactorStatus::CapExceeded);
}

TEST_CASE("retract argument and cof certification") {
    CatPtr one = fincat::terminal_category();
    PshGenSet gens = generating_monos(one);
    REQUIRE(gens.maps.size() == 2);  // 0 -> 1 and 1 -> 1
    for (const PresheafMap& g : gens.maps) CHECK(fincat::is_mono(g));

    // a member of I is certified
    CofResult<PshArrows> member = in_cof<PshArrows>(gens.maps[0], gens, 8);
    CHECK(member.verdict == CofVerdict::Certified);

    // an injection of finite sets is certified with a retract witness
    PresheafMap inj = set_map(one, {"a"}, {"x", "y"}, {{"a", "x"}}, "inj");
    CofResult<PshArrows> cof = in_cof<PshArrows>(inj, gens, 8);
    CHECK(cof.verdict == CofVerdict::Certified);
    REQUIRE(cof.section.has_value());
    CHECK(fincat::same_map(fincat::compose_maps(*cof.section, inj), cof.factorization.c));
    CHECK(fincat::same_map(fincat::compose_maps(cof.factorization.f, *cof.section),
                           fincat::identity_map(inj.cod)));

    // a non-mono is refuted
    PresheafMap crush = set_map(one, {"a", "b"}, {"x"}, {{"a", "x"}, {"b", "x"}}, "crush");
    CofResult<PshArrows> bad = in_cof<PshArrows>(crush, gens, 8);
    CHECK(bad.verdict == CofVerdict::Refuted);

    // cap 0 cannot decide a nontrivial candidate
    CofResult<PshArrows> undet = in_cof<PshArrows>(inj, gens, 0);
    CHECK(undet.verdict == CofVerdict::Undetermined);
}

TEST_CASE("effective unions") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    Presheaf d1 = fincat::yoneda(delta1, "[1]");
    auto subs = subobj::enumerate_subobjects(d1);
    for (const auto& a : subs)
        for (const auto& b : subs) {
            EffectiveUnion eu = effective_union(a, b);
            CHECK(eu.verdict);
            if (a == b) {
                CHECK(eu.pushout_obj.total_size() == a.total_size());
            }
        }
    // disjoint vertex subobjects of a discrete presheaf give the coproduct
    CatPtr one = fincat::terminal_category();
    Presheaf four = fincat::constant_presheaf(one, {"a", "b", "c", "d"}, "four");
    subobj::Subobject sa = subobj::make_subobject(four, {{"*", {"a"}}});
    subobj::Subobject sb = subobj::make_subobject(four, {{"*", {"b"}}});
    EffectiveUnion eu = effective_union(sa, sb);
    CHECK(eu.verdict);
    CHECK(eu.pushout_obj.total_size() == 2);
    CHECK(fincat::is_mono(eu.comparison));
}

TEST_CASE("generating monos over the arrow category") {
    CatPtr arrow = fincat::arrow_category();
    PshGenSet gens = generating_monos(arrow);
    CHECK(!gens.maps.empty());
    for (const PresheafMap& g : gens.maps) CHECK(fincat::is_mono(g));
    // deduplication: no two members are isomorphic as arrows
    for (std::size_t i = 0; i < gens.maps.size(); ++i)
        for (std::size_t j = i + 1; j < gens.maps.size(); ++j)
            CHECK(!arrows_isomorphic(gens.maps[i], gens.maps[j]).has_value());
}

TEST_CASE("mono cellularization") {
    CatPtr one = fincat::terminal_category();
    PshGenSet gens = generating_monos(one);

    // identity: empty chain
    Presheaf a = fincat::constant_presheaf(one, {"x"}, "A");
    MonoCellResult idc = mono_cellularize(fincat::identity_map(a), gens);
    CHECK(idc.cell.stages.empty());

    // empty into a 2-point set: two stages
    PresheafMap m;
    m.name = "0>2";
    m.dom = fincat::initial_presheaf(one);
    m.cod = fincat::constant_presheaf(one, {"x", "y"}, "two");
    m = fincat::make_map(std::move(m));
    MonoCellResult two = mono_cellularize(m, gens);
    CHECK(two.cell.stages.size() == 2);
    CHECK(replay_cell<PshArrows>(m, gens, two.cell, &two.final_iso));

    // every injection between sets of size <= 3 cellularizes and replays
    CatPtr delta1 = testhelp::simplex_cat(1);
    for (int dn = 0; dn <= 3; ++dn)
        for (int cn = dn; cn <= 3; ++cn) {
            std::vector<std::string> de, ce;
            for (int i = 0; i < dn; ++i) de.push_back("d" + std::to_string(i));
            for (int i = 0; i < cn; ++i) ce.push_back("c" + std::to_string(i));
            // one representative injection per shape
            std::map<std::string, std::string> tab;
            for (int i = 0; i < dn; ++i) tab["d" + std::to_string(i)] = "c" + std::to_string(i);
            Presheaf dom = fincat::constant_presheaf(one, de, "D");
            Presheaf cod = fincat::constant_presheaf(one, ce, "C");
            PresheafMap inj;
            inj.name = "inj";
            inj.dom = dom;
            inj.cod = cod;
            for (const std::string& x : de) inj.cmp[{"*", x}] = tab.at(x);
            inj = fincat::make_map(std::move(inj));
            MonoCellResult res = mono_cellularize(inj, gens);
            CHECK(replay_cell<PshArrows>(inj, gens, res.cell, &res.final_iso));
        }

    // vertex inclusion into Delta^1 over Delta<=1
    PshGenSet dgens = generating_monos(delta1);
    Presheaf d1 = fincat::yoneda(delta1, "[1]");
    PresheafMap vert = testhelp::horn10(delta1);
    MonoCellResult vres = mono_cellularize(vert, dgens);
    CHECK(!vres.cell.stages.empty());
    CHECK(replay_cell<PshArrows>(vert, dgens, vres.cell, &vres.final_iso));
}

TEST_CASE("diagram generators") {
    CatPtr one = fincat::terminal_category();
    PshGenSet gens = make_genset(
        "pt", {set_map(one, {}, {"x"}, {}, "0>1")});
    // over D = 1: one generator again
    PshGenSet over_one = diagram_generators(gens, one, fincat::terminal_category());
    CHECK(over_one.maps.size() == 1);

    // over the discrete two-object category: coordinatewise placements
    CatPtr disc2 = fincat::discrete_category({"u", "v"}, "disc2");
    PshGenSet over_disc = diagram_generators(gens, one, disc2);
    CHECK(over_disc.maps.size() == 2);
    for (const PresheafMap& g : over_disc.maps) {
        // each placement is supported at exactly one coordinate
        std::size_t total = 0;
        for (const auto& [o, xs] : g.cod.at) total += xs.size();
        CHECK(total == 1);
    }

    // over the arrow: the placement at b spreads to both objects
    CatPtr arrow = fincat::arrow_category();
    PshGenSet over_arrow = diagram_generators(gens, one, arrow);
    REQUIRE(over_arrow.maps.size() == 2);
    std::multiset<std::size_t> sizes;
    for (const PresheafMap& g : over_arrow.maps) {
        std::size_t total = 0;
        for (const auto& [o, xs] : g.cod.at) total += xs.size();
        sizes.insert(total);
    }
    CHECK(sizes == std::multiset<std::size_t>{1, 2});
}

TEST_CASE("smith construction on the category of sets") {
    CatPtr one = fincat::terminal_category();
    logic::PresheafTheoryResult pt = logic::presheaf_theory(one);
    // W = all maps: no axioms
    logic::Theory wspec;
    wspec.name = "all";
    wspec.lang = logic::mor_theory(pt.theory).theory.lang;
    WClass wall(pt, wspec, {});
    SolutionSet sol = solution_set_approx(wall, 1);
    CHECK(sol.maps.size() == 3);  // 0->0, 0->1, 1->1 up to iso

    PshGenSet gens = make_genset("pt", {set_map(one, {}, {"x"}, {}, "0>1")});
    SmithResult sm = smith_j(gens, wall, 1, 8);
    CHECK(!sm.items.empty());
    for (const SmithItem& item : sm.items) {
        if (item.cap_exceeded) continue;
        CHECK(item.in_w);
        CHECK(replay_composite<PshArrows>(fincat::identity_map(item.j.dom), gens, item.cell));
    }
    // density on a test square from i into w = (0 -> 1)
    const PresheafMap& i = gens.maps[0];
    PresheafMap w01 = sol.maps[1];
    auto sqs = PshArrows::squares(i, w01, {});
    bool any_density = false;
    for (const auto& sq : sqs)
        if (density_check(sm.j, i, w01, sq.top, sq.bottom)) any_density = true;
    if (!sqs.empty()) CHECK(any_density);

    // an empty solution set gives an empty J
    logic::Theory absurd = wspec;
    absurd.axioms.push_back(logic::falsity());
    WClass wnone(pt, absurd, {});
    SmithResult none = smith_j(gens, wnone, 1, 8);
    CHECK(none.j.maps.empty());
}

TEST_CASE("dense factorization basics") {
    CatPtr one = fincat::terminal_category();
    PshGenSet gens = make_genset("pt", {set_map(one, {}, {"x"}, {}, "0>1")});
    // J = I works as the interpolating set when W = all maps
    PshGenSet j = gens;
    PresheafMap epi = set_map(one, {"a", "b"}, {"x"}, {{"a", "x"}, {"b", "x"}}, "epi");
    // epi is in inj({0->1}) (surjective), so stage 0
    DenseFactorization d0 = dense_factor(epi, j, gens, 4);
    CHECK(d0.status == DenseStatus::Complete);
    CHECK(d0.stage_count == 0);

    PresheafMap not_epi = set_map(one, {}, {"x"}, {}, "0>1c");
    DenseFactorization d1 = dense_factor(not_epi, j, gens, 4);
    CHECK(d1.status == DenseStatus::Complete);
    CHECK(in_inj<PshArrows>(d1.h, gens).ok);
    CHECK(fincat::same_map(fincat::compose_maps(d1.h, d1.g), not_epi));
    DenseFactorization capped = dense_factor(not_epi, j, gens, 0);
    CHECK(capped.status == DenseStatus::CapExceeded);
}

TEST_CASE("model axiom report") {
    CatPtr one = fincat::terminal_category();
    logic::PresheafTheoryResult pt = logic::presheaf_theory(one);
    logic::Theory wall_spec;
    wall_spec.name = "all";
    wall_spec.lang = logic::mor_theory(pt.theory).theory.lang;
    WClass wall(pt, wall_spec, {});
    PshGenSet gens = generating_monos(one);

    PresheafMap idm = fincat::identity_map(fincat::constant_presheaf(one, {"x"}, "X"));
    ModelAxiomInstances inst;
    inst.weq_pairs.push_back({idm, idm});
    inst.retracts.push_back({idm, idm, idm, idm, idm, idm});
    inst.squares.push_back({gens.maps[0], idm, fincat::make_map([&] {
                                PresheafMap t;
                                t.name = "t";
                                t.dom = gens.maps[0].dom;
                                t.cod = idm.dom;
                                return t;
                            }()),
                            fincat::make_map([&] {
                                PresheafMap b;
                                b.name = "b";
                                b.dom = gens.maps[0].cod;
                                b.cod = idm.cod;
                                b.cmp[{"*", gens.maps[0].cod.level("*")[0]}] = "x";
                                return b;
                            }())});
    inst.factorizations.push_back(idm);
    inst.acyclic_cof_compositions.push_back({idm, idm});
    ModelAxiomReport rep = check_model_axioms(inst, wall, gens, 8);
    CHECK(rep.all_ok());

    // a broken W class: "the domain is empty" is not closed under 2-of-3
    logic::Theory broken;
    broken.name = "empty_dom";
    broken.lang = wall_spec.lang;
    std::string dom_sort = pt.sort_of_object.at("*") + "_dom";
    broken.axioms.push_back(logic::forall({{"x", dom_sort}}, logic::falsity()));
    WClass wbad(pt, broken, {});
    PresheafMap f0 = fincat::make_map([&] {
        PresheafMap f;
        f.name = "f0";
        f.dom = fincat::initial_presheaf(one);
        f.cod = fincat::constant_presheaf(one, {"a"}, "A");
        return f;
    }());
    PresheafMap g = set_map(one, {"a"}, {"b"}, {{"a", "b"}}, "g");
    ModelAxiomInstances bad;
    bad.weq_pairs.push_back({f0, g});
    ModelAxiomReport brep = check_model_axioms(bad, wbad, gens, 8);
    CHECK(!brep.all_ok());
}

TEST_CASE("chain-side factorization through the same engine") {
    using abelian::ChainComplex;
    using abelian::ChainMap;
    ChainGenSet gens = chain_genset_from(abelian::disc_sphere_gens(0, 1), "dsgens");

    // factoring 0 -> (0 -> Z -> Z -> 0) completes within the cap
    ChainComplex target;
    target.name = "zz";
    target.lo = 0;
    target.hi = 1;
    target.free_rank = {1, 1};
    target.rels = {abelian::IntMat(1, 0), abelian::IntMat(1, 0)};
    target.diffs = {abelian::IntMat(0, 0), abelian::IntMat::identity(1)};
    target = abelian::make_complex(std::move(target));
    ChainMap m = abelian::zero_chain_map(abelian::zero_complex(0, 1), target);
    FactorizationResult<ChainArrows> fr = soa_factor<ChainArrows>(m, gens, 8);
    REQUIRE(fr.status == FactorStatus::Complete);
    CHECK(abelian::same_chain_map(abelian::compose_chain_maps(fr.f, fr.c), m));
    CHECK(in_inj<ChainArrows>(fr.f, gens).ok);
    CHECK(replay_cell<ChainArrows>(m, gens, fr.cell, &fr.f));
}
