#include "doctest.h"

#include <algorithm>

#include "helpers.hpp"
#include "sheafsmith/subobj.hpp"

using namespace sheafsmith;
using namespace sheafsmith::fincat;
using namespace sheafsmith::subobj;

namespace {

// Independent oracle: every levelwise subset, filtered by action closure.
std::vector<Subobject> brute_force_subobjects(const Presheaf& x) {
    std::vector<std::pair<std::string, std::string>> elems;
    for (const auto& [o, xs] : x.at)
        for (const std::string& e : xs) elems.push_back({o, e});
    std::vector<Subobject> out;
    for (std::uint64_t mask = 0; mask < (1ull << elems.size()); ++mask) {
        std::map<std::string, std::set<std::string>> lv;
        for (const std::string& o : x.base->objects) lv[o] = {};
        for (std::size_t i = 0; i < elems.size(); ++i)
            if (mask & (1ull << i)) lv[elems[i].first].insert(elems[i].second);
        Subobject s;
        s.ambient = x;
        s.levels = lv;
        if (!check_subobject(s)) out.push_back(s);
    }
    return out;
}

Presheaf sample_presheaf_over_arrow() {
    CatPtr arrow = arrow_category();
    Presheaf f;
    f.name = "F";
    f.base = arrow;
    f.at["a"] = {"x", "y"};
    f.at["b"] = {"u", "v"};
    f.act[{"f", "u"}] = "x";
    f.act[{"f", "v"}] = "x";
    return make_presheaf(f);
}

}  // namespace

TEST_CASE("subobject counts") {
    CatPtr arrow = arrow_category();
    CHECK(enumerate_subobjects(initial_presheaf(arrow)).size() == 1);
    // over a strongly connected base the terminal presheaf has only 0 and 1
    CHECK(enumerate_subobjects(terminal_presheaf(terminal_category())).size() == 2);
    CHECK(enumerate_subobjects(terminal_presheaf(testhelp::simplex_cat(2))).size() == 2);
    // over the arrow there is also the subterminal supported at the source
    auto subterminals = enumerate_subobjects(terminal_presheaf(arrow));
    CHECK(subterminals.size() == 3);
    CHECK(subterminals.size() == brute_force_subobjects(terminal_presheaf(arrow)).size());

    CatPtr delta1 = testhelp::simplex_cat(1);
    Presheaf y1 = yoneda(delta1, "[1]");
    auto fast = enumerate_subobjects(y1);
    auto slow = brute_force_subobjects(y1);
    CHECK(fast.size() == slow.size());
    std::set<Subobject> a(fast.begin(), fast.end()), b(slow.begin(), slow.end());
    CHECK(a == b);
}

TEST_CASE("heyting operations against the subobject-scan oracle") {
    Presheaf f = sample_presheaf_over_arrow();
    auto subs = enumerate_subobjects(f);
    auto slow = brute_force_subobjects(f);
    REQUIRE(subs.size() == slow.size());

    for (const Subobject& a : subs) {
        CHECK(meet(a, a) == a);
        CHECK(implication(a, a) == whole_subobject(f));
        for (const Subobject& b : subs) {
            Subobject imp = implication(a, b);
            // oracle: the largest subobject whose meet with a lies in b
            Subobject best = empty_subobject(f);
            for (const Subobject& c : subs)
                if (leq(meet(c, a), b) && leq(best, c)) best = c;
            CHECK(imp == best);
        }
    }
}

TEST_CASE("double negation of a vertex-supported subobject") {
    Presheaf f = sample_presheaf_over_arrow();
    Subobject vertex = make_subobject(f, {{"a", {"x"}}, {"b", {}}});
    Subobject nn = negation(negation(vertex));
    // oracle by scanning
    auto subs = enumerate_subobjects(f);
    Subobject none = empty_subobject(f);
    Subobject neg1 = none;
    for (const Subobject& c : subs)
        if (leq(meet(c, vertex), none) && leq(neg1, c)) neg1 = c;
    Subobject neg2 = none;
    for (const Subobject& c : subs)
        if (leq(meet(c, neg1), none) && leq(neg2, c)) neg2 = c;
    CHECK(nn == neg2);
    CHECK(nn.contains("a", "x"));
}

TEST_CASE("heyting adjunction holds exhaustively on small ambients") {
    for (const Presheaf& f :
         {sample_presheaf_over_arrow(), yoneda(testhelp::simplex_cat(1), "[1]")}) {
        auto subs = enumerate_subobjects(f);
        for (const Subobject& a : subs)
            for (const Subobject& b : subs) {
                Subobject imp = implication(a, b);
                for (const Subobject& c : subs)
                    CHECK(leq(meet(c, a), b) == leq(c, imp));
            }
    }
}

TEST_CASE("quantifiers along the identity are the identity") {
    Presheaf f = sample_presheaf_over_arrow();
    PresheafMap id = identity_map(f);
    for (const Subobject& s : enumerate_subobjects(f)) {
        CHECK(exists_along(id, s) == s);
        CHECK(forall_along(id, s) == s);
        CHECK(preimage(id, s) == s);
    }
}

TEST_CASE("exists along the map to the terminal presheaf") {
    Presheaf f = sample_presheaf_over_arrow();
    Presheaf one = terminal_presheaf(f.base);
    PresheafMap bang;
    bang.name = "!";
    bang.dom = f;
    bang.cod = one;
    for (const auto& [o, xs] : f.at)
        for (const std::string& x : xs) bang.cmp[{o, x}] = "()";
    bang = make_map(bang);
    CHECK(exists_along(bang, whole_subobject(f)) == whole_subobject(one));
    CHECK(exists_along(bang, empty_subobject(f)) == empty_subobject(one));
}

TEST_CASE("forall along a 2-to-1 surjection matches the scan oracle") {
    CatPtr arrow = arrow_category();
    Presheaf two = constant_presheaf(arrow, {"0", "1"}, "two");
    Presheaf four = constant_presheaf(arrow, {"p0", "p1", "q0", "q1"}, "four");
    PresheafMap sur;
    sur.name = "sur";
    sur.dom = four;
    sur.cod = two;
    for (const std::string& o : arrow->objects) {
        sur.cmp[{o, "p0"}] = "0";
        sur.cmp[{o, "p1"}] = "0";
        sur.cmp[{o, "q0"}] = "1";
        sur.cmp[{o, "q1"}] = "1";
    }
    sur = make_map(sur);
    // half of one fiber
    Subobject half = make_subobject(four, {{"a", {"p0"}}, {"b", {"p0"}}});
    Subobject fa = forall_along(sur, half);
    Subobject best = empty_subobject(two);
    for (const Subobject& t : enumerate_subobjects(two))
        if (leq(preimage(sur, t), half) && leq(best, t)) best = t;
    CHECK(fa == best);
    CHECK(fa == empty_subobject(two));
    // the full fiber over 0 does land
    Subobject fiber = make_subobject(four, {{"a", {"p0", "p1"}}, {"b", {"p0", "p1"}}});
    CHECK(forall_along(sur, fiber) == make_subobject(two, {{"a", {"0"}}, {"b", {"0"}}}));
}

TEST_CASE("quantifier adjunctions and Frobenius reciprocity") {
    Presheaf f = sample_presheaf_over_arrow();
    CatPtr arrow = arrow_category();
    Presheaf g = constant_presheaf(arrow, {"0", "1"}, "G");
    PresheafMap m;
    m.name = "m";
    m.dom = f;
    m.cod = g;
    m.cmp[{"a", "x"}] = "0";
    m.cmp[{"a", "y"}] = "1";
    m.cmp[{"b", "u"}] = "0";
    m.cmp[{"b", "v"}] = "0";
    m = make_map(m);
    auto subs_f = enumerate_subobjects(f);
    auto subs_g = enumerate_subobjects(g);
    for (const Subobject& s : subs_f)
        for (const Subobject& t : subs_g) {
            CHECK(leq(exists_along(m, s), t) == leq(s, preimage(m, t)));
            CHECK(leq(preimage(m, t), s) == leq(t, forall_along(m, s)));
            CHECK(exists_along(m, meet(s, preimage(m, t))) == meet(exists_along(m, s), t));
        }
}

TEST_CASE("Beck-Chevalley for a pullback square") {
    CatPtr arrow = arrow_category();
    Presheaf z = constant_presheaf(arrow, {"0", "1"}, "Z");
    Presheaf x = constant_presheaf(arrow, {"x0", "x1"}, "X");
    Presheaf y = constant_presheaf(arrow, {"y0", "y0b", "y1"}, "Y");
    PresheafMap fm;
    fm.name = "f";
    fm.dom = x;
    fm.cod = z;
    for (const std::string& o : arrow->objects) {
        fm.cmp[{o, "x0"}] = "0";
        fm.cmp[{o, "x1"}] = "1";
    }
    fm = make_map(fm);
    PresheafMap gm;
    gm.name = "g";
    gm.dom = y;
    gm.cod = z;
    for (const std::string& o : arrow->objects) {
        gm.cmp[{o, "y0"}] = "0";
        gm.cmp[{o, "y0b"}] = "0";
        gm.cmp[{o, "y1"}] = "1";
    }
    gm = make_map(gm);
    PullbackResult pb = pullback(fm, gm);
    for (const Subobject& s : enumerate_subobjects(x)) {
        Subobject lhs = preimage(gm, exists_along(fm, s));
        Subobject rhs = exists_along(pb.to_right, preimage(pb.to_left, s));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("classifier round trips and bijection with maps into Omega") {
    CatPtr delta1 = testhelp::simplex_cat(1);
    Presheaf omega = omega_presheaf(delta1);
    Presheaf y1 = yoneda(delta1, "[1]");

    auto subs = enumerate_subobjects(y1);
    std::set<std::string> images;
    for (const Subobject& s : subs) {
        PresheafMap chi = classify(s, omega);
        CHECK(unclassify(chi, delta1) == s);
        images.insert(serialize_map(chi));
    }
    CHECK(images.size() == subs.size());
    auto chis = all_natural_maps(y1, omega);
    CHECK(chis.size() == subs.size());
    for (const PresheafMap& chi : chis) {
        Subobject s = unclassify(chi, delta1);
        CHECK(same_map(classify(s, omega), chi));
    }

    // whole -> constant maximal sieve; empty -> constant empty sieve
    PresheafMap top = classify(whole_subobject(y1), omega);
    for (const auto& [key, v] : top.cmp) CHECK(v == maximal_sieve(delta1, key.first));
    PresheafMap bot = classify(empty_subobject(y1), omega);
    for (const auto& [key, v] : bot.cmp) CHECK(sieve_members(v).empty());
}

TEST_CASE("subobject/mono conversions invert each other") {
    Presheaf f = sample_presheaf_over_arrow();
    for (const Subobject& s : enumerate_subobjects(f)) {
        PresheafMap mono = subobject_as_mono(s);
        CHECK(is_mono(mono));
        CHECK(mono_as_subobject(mono) == s);
    }
}

TEST_CASE("lattice is distributive with top and bottom") {
    Presheaf f = sample_presheaf_over_arrow();
    auto subs = enumerate_subobjects(f);
    Subobject top = whole_subobject(f), bot = empty_subobject(f);
    for (const Subobject& a : subs) {
        CHECK(meet(a, top) == a);
        CHECK(join(a, bot) == a);
        for (const Subobject& b : subs)
            for (const Subobject& c : subs) {
                CHECK(meet(a, join(b, c)) == join(meet(a, b), meet(a, c)));
                CHECK(join(a, meet(b, c)) == meet(join(a, b), join(a, c)));
            }
    }
}
