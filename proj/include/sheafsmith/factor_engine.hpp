#pragma once

// The lifting/factorization engine, generic over a "computable category
// adapter": presheaf instances enumerate squares and search lifts, chain
// instances produce generating squares and solve linear systems. An adapter
// provides:
//
//   using Map = ...;                  // carries its own dom/cod
//   static Map compose(g, f);
//   static Map identity_dom(m);       // identity on dom(m)
//   static bool equal(a, b);
//   static std::string serialize(m);
//   struct Square { Map top, bottom; };
//   static std::vector<Square> squares(i, m, cfg);   // all (or generating)
//   static std::optional<Map> lift(i, p, top, bottom, cfg);
//   struct Glued { Map theta, psi; };
//   static Glued glue(m, gens, attachments, cfg);    // one-step pushout

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "sheafsmith/config.hpp"

namespace sheafsmith::factor {

template <typename A>
struct GenSet {
    std::string name;
    std::vector<std::string> names;
    std::vector<typename A::Map> maps;
};

template <typename A>
struct Attachment {
    std::size_t gen;  // index into the generating set
    typename A::Map top, bottom;
};

template <typename A>
struct CellStage {
    std::vector<Attachment<A>> attachments;
};

// An auditable cell presentation: replaying the recorded stages from the
// domain reproduces the composite map byte for byte.
template <typename A>
struct CellPresentation {
    std::vector<CellStage<A>> stages;
    typename A::Map composite;
};

enum class FactorStatus { Complete, CapExceeded };

template <typename A>
struct FactorizationResult {
    typename A::Map m, c, f;  // f∘c = m
    CellPresentation<A> cell;
    int stage_count = 0;
    FactorStatus status = FactorStatus::CapExceeded;
};

template <typename A>
struct InjReport {
    bool ok = true;
    std::size_t gen = 0;  // offending generator when !ok
    std::optional<typename A::Square> square;
};

template <typename A>
InjReport<A> in_inj(const typename A::Map& p, const GenSet<A>& gens, const Config& cfg = {}) {
    for (std::size_t k = 0; k < gens.maps.size(); ++k) {
        for (const auto& sq : A::squares(gens.maps[k], p, cfg)) {
            if (!A::lift(gens.maps[k], p, sq.top, sq.bottom, cfg))
                return InjReport<A>{false, k, sq};
        }
    }
    return InjReport<A>{};
}

// One step of the small object argument: glue every square from the
// generators into m, giving theta : X -> F(m) and psi : F(m) -> Y with
// psi∘theta = m.
template <typename A>
struct OneStep {
    typename A::Map theta, psi;
    std::vector<Attachment<A>> attachments;
};

template <typename A>
OneStep<A> one_step(const typename A::Map& m, const GenSet<A>& gens, const Config& cfg = {}) {
    OneStep<A> out;
    for (std::size_t k = 0; k < gens.maps.size(); ++k) {
        std::vector<typename A::Square> sqs = A::squares(gens.maps[k], m, cfg);
        std::sort(sqs.begin(), sqs.end(), [](const auto& a, const auto& b) {
            return A::serialize(a.top) + A::serialize(a.bottom) <
                   A::serialize(b.top) + A::serialize(b.bottom);
        });
        for (auto& sq : sqs) out.attachments.push_back({k, sq.top, sq.bottom});
    }
    typename A::Glued g = A::glue(m, gens.maps, out.attachments, cfg);
    out.theta = g.theta;
    out.psi = g.psi;
    return out;
}

// The stage step used by the factorization loop: glue only the squares that
// do not yet lift. The full one_step diverges on finite carriers (it keeps
// re-attaching cells for squares that already have fillers; the classical
// construction only settles at a transfinite stage), while skipping solved
// squares preserves both conclusions: the composite stays in cell(I) and
// the loop stops exactly when psi is in inj(I).
template <typename A>
std::vector<Attachment<A>> unliftable_squares(const typename A::Map& m, const GenSet<A>& gens,
                                              const Config& cfg = {}) {
    std::vector<Attachment<A>> out;
    for (std::size_t k = 0; k < gens.maps.size(); ++k) {
        std::vector<typename A::Square> sqs = A::squares(gens.maps[k], m, cfg);
        std::sort(sqs.begin(), sqs.end(), [](const auto& a, const auto& b) {
            return A::serialize(a.top) + A::serialize(a.bottom) <
                   A::serialize(b.top) + A::serialize(b.bottom);
        });
        for (auto& sq : sqs)
            if (!A::lift(gens.maps[k], m, sq.top, sq.bottom, cfg))
                out.push_back({k, sq.top, sq.bottom});
    }
    return out;
}

template <typename A>
FactorizationResult<A> soa_factor(const typename A::Map& m, const GenSet<A>& gens, int cap,
                                  const Config& cfg = {}) {
    FactorizationResult<A> res;
    res.m = m;
    res.c = A::identity_dom(m);
    res.f = m;
    res.cell.composite = res.c;
    for (int stage = 0;; ++stage) {
        std::vector<Attachment<A>> todo = unliftable_squares<A>(res.f, gens, cfg);
        if (todo.empty()) {
            res.status = FactorStatus::Complete;
            res.stage_count = stage;
            return res;
        }
        if (stage >= cap) {
            res.status = FactorStatus::CapExceeded;
            res.stage_count = stage;
            return res;
        }
        typename A::Glued g = A::glue(res.f, gens.maps, todo, cfg);
        res.cell.stages.push_back(CellStage<A>{todo});
        res.c = A::compose(g.theta, res.c);
        res.cell.composite = res.c;
        res.f = g.psi;
    }
}

// Replays a cell presentation from the domain of `m` and checks that the
// recorded composite (and final fibration, when given) come back unchanged.
template <typename A>
bool replay_cell(const typename A::Map& m, const GenSet<A>& gens, const CellPresentation<A>& cell,
                 const typename A::Map* final_f = nullptr, const Config& cfg = {}) {
    typename A::Map c = A::identity_dom(m);
    typename A::Map f = m;
    for (const CellStage<A>& stage : cell.stages) {
        typename A::Glued g = A::glue(f, gens.maps, stage.attachments, cfg);
        c = A::compose(g.theta, c);
        f = g.psi;
    }
    if (A::serialize(c) != A::serialize(cell.composite)) return false;
    if (final_f && A::serialize(f) != A::serialize(*final_f)) return false;
    return true;
}

// Tops-only replay: rebuilds the stage pushouts without reference to any
// codomain and checks the recorded composite. Used for cell certificates of
// maps (like Smith's j = p∘i') whose stages were recorded against a
// different corner map.
template <typename A>
bool replay_composite(const typename A::Map& start_identity, const GenSet<A>& gens,
                      const CellPresentation<A>& cell, const Config& cfg = {}) {
    typename A::Map c = start_identity;
    for (const CellStage<A>& stage : cell.stages) {
        typename A::Map theta = A::glue_theta(c, gens.maps, stage.attachments, cfg);
        c = A::compose(theta, c);
    }
    return A::serialize(c) == A::serialize(cell.composite);
}

enum class CofVerdict { Certified, Refuted, Undetermined };

template <typename A>
struct CofResult {
    CofVerdict verdict = CofVerdict::Undetermined;
    FactorizationResult<A> factorization;
    std::optional<typename A::Map> section;           // Certified
    std::optional<typename A::Square> refuting;       // Refuted: no lift vs its own f
};

// The retract argument: a Complete factorization m = f∘c with a lift of m
// against its own f exhibits m as a retract of c under the domain. The
// returned section l satisfies l∘m = c and f∘l = id.
template <typename A>
std::optional<typename A::Map> retract_section(const typename A::Map& m,
                                               const FactorizationResult<A>& fr,
                                               const Config& cfg = {}) {
    if (fr.status != FactorStatus::Complete) return std::nullopt;
    return A::lift(m, fr.f, fr.c, A::identity_cod(m), cfg);
}

template <typename A>
CofResult<A> in_cof(const typename A::Map& m, const GenSet<A>& gens, int cap,
                    const Config& cfg = {}) {
    CofResult<A> res;
    res.factorization = soa_factor<A>(m, gens, cap, cfg);
    if (res.factorization.status != FactorStatus::Complete) {
        res.verdict = CofVerdict::Undetermined;
        return res;
    }
    auto section = retract_section<A>(m, res.factorization, cfg);
    if (section) {
        res.verdict = CofVerdict::Certified;
        res.section = section;
        return res;
    }
    // f lies in inj(I) yet m does not lift against it: a concrete refutation
    res.verdict = CofVerdict::Refuted;
    res.refuting = typename A::Square{res.factorization.c, A::identity_cod(m)};
    return res;
}

}  // namespace sheafsmith::factor
