#include <algorithm>

#include "sheafsmith/factor.hpp"

namespace sheafsmith::factor {

using fincat::Morphism;

namespace {

// tabular Mor(S)-model of a presheaf map over the structure category
logic::SetModel mor_set_model_of_map(const logic::PresheafTheoryResult& pt,
                                     const logic::MorTheory& mor, const PresheafMap& f) {
    logic::SetModel m;
    m.lang = mor.theory.lang;
    for (const auto& [obj, sort] : pt.sort_of_object) {
        m.sorts[sort + mor.dom_suffix] = f.dom.level(obj);
        m.sorts[sort + mor.cod_suffix] = f.cod.level(obj);
        std::map<std::vector<std::string>, std::string> hom;
        for (const std::string& x : f.dom.level(obj)) hom[{x}] = f.apply(obj, x);
        m.functions[mor.hom_symbol(sort)] = std::move(hom);
    }
    for (const auto& [morism, sym] : pt.symbol_of_morphism) {
        const Morphism& mm = f.dom.base->mor(morism);
        std::map<std::vector<std::string>, std::string> dtab, ctab;
        for (const std::string& x : f.dom.level(mm.dst)) dtab[{x}] = f.dom.apply(morism, x);
        for (const std::string& x : f.cod.level(mm.dst)) ctab[{x}] = f.cod.apply(morism, x);
        m.functions[sym + mor.dom_suffix] = std::move(dtab);
        m.functions[sym + mor.cod_suffix] = std::move(ctab);
    }
    return m;
}

}  // namespace

logic::Interpretation mor_model_of_map(const logic::PresheafTheoryResult& pt,
                                       const logic::MorTheory& mor, const PresheafMap& f,
                                       const Config& cfg) {
    return logic::set_model_as_interpretation(mor_set_model_of_map(pt, mor, f), "mor(" + f.name + ")",
                                              cfg);
}

WClass::WClass(logic::PresheafTheoryResult structure, logic::Theory wspec, Config cfg)
    : structure_(std::move(structure)),
      mor_(logic::mor_theory(structure_.theory)),
      wspec_(std::move(wspec)),
      cfg_(cfg) {}

std::optional<bool> WClass::holds(const PresheafMap& f) const {
    logic::SetModel m = mor_set_model_of_map(structure_, mor_, f);
    bool capped = false;
    logic::Tri v = logic::naive_satisfies(m, wspec_, cfg_, &capped);
    if (v == logic::Tri::True) return true;
    if (v == logic::Tri::False && !capped) return false;
    return std::nullopt;  // undetermined at the family cap
}

SolutionSet solution_set_approx(const WClass& w, int bound, const Config& cfg) {
    SolutionSet out;
    out.bound = bound;
    const logic::MorTheory& mor = w.mor();
    logic::Theory combined = mor.theory;
    for (const logic::Formula& a : w.spec().axioms) combined.axioms.push_back(a);
    combined.fragment = "general";
    logic::EnumBounds bounds;
    bounds.default_bound = bound;
    bounds.up_to_iso = true;
    std::vector<logic::SetModel> models = logic::enumerate_models(combined, bounds, cfg);
    const logic::PresheafTheoryResult& pt = w.structure();
    for (const logic::SetModel& m : models) {
        // split into two presheaf-shaped tabular models
        logic::SetModel dom_m, cod_m;
        dom_m.lang = pt.theory.lang;
        cod_m.lang = pt.theory.lang;
        for (const auto& [obj, sort] : pt.sort_of_object) {
            dom_m.sorts[sort] = m.sorts.at(sort + mor.dom_suffix);
            cod_m.sorts[sort] = m.sorts.at(sort + mor.cod_suffix);
        }
        for (const auto& [morism, sym] : pt.symbol_of_morphism) {
            (void)morism;
            dom_m.functions[sym] = m.functions.at(sym + mor.dom_suffix);
            cod_m.functions[sym] = m.functions.at(sym + mor.cod_suffix);
        }
        out.maps.push_back(PresheafMap{});
        PresheafMap& pm = out.maps.back();
        pm.name = "w" + std::to_string(out.maps.size() - 1);
        pm.dom = logic::set_model_as_presheaf(pt, pt.base, dom_m, pm.name + ".dom");
        pm.cod = logic::set_model_as_presheaf(pt, pt.base, cod_m, pm.name + ".cod");
        for (const auto& [obj, sort] : pt.sort_of_object)
            for (const std::string& x : pm.dom.level(obj))
                pm.cmp[{obj, x}] = m.functions.at(mor.hom_symbol(sort)).at({x});
        pm = fincat::make_map(std::move(pm));
    }
    return out;
}

SmithResult smith_j(const PshGenSet& gens, const WClass& w, int bound, int cap,
                    const Config& cfg) {
    SmithResult res;
    res.solution_set = solution_set_approx(w, bound, cfg);
    std::vector<PresheafMap> j_maps;
    for (std::size_t gi = 0; gi < gens.maps.size(); ++gi) {
        const PresheafMap& i = gens.maps[gi];
        for (std::size_t wi = 0; wi < res.solution_set.maps.size(); ++wi) {
            const PresheafMap& wmap = res.solution_set.maps[wi];
            std::vector<PshArrows::Square> sqs = PshArrows::squares(i, wmap, cfg);
            std::sort(sqs.begin(), sqs.end(), [](const auto& a, const auto& b) {
                return fincat::serialize_map(a.top) + fincat::serialize_map(a.bottom) <
                       fincat::serialize_map(b.top) + fincat::serialize_map(b.bottom);
            });
            for (const PshArrows::Square& sq : sqs) {
                // pushout P of i along the square's top, with the corner map
                // to cod(w); built through the engine's glue so the recorded
                // certificate replays with identical canonical names
                std::vector<Attachment<PshArrows>> first{{gi, sq.top, sq.bottom}};
                PshArrows::Glued glued = PshArrows::glue(wmap, gens.maps, first, cfg);
                const PresheafMap& i_prime = glued.theta;  // U -> P
                const PresheafMap& corner = glued.psi;     // P -> cod(w)

                SmithItem item;
                item.gen = gi;
                item.wmap = wi;
                FactorizationResult<PshArrows> fr = soa_factor<PshArrows>(corner, gens, cap, cfg);
                if (fr.status != FactorStatus::Complete) {
                    item.cap_exceeded = true;
                    res.items.push_back(std::move(item));
                    continue;
                }
                item.j = fincat::compose_maps(fr.c, i_prime);
                item.j.name = "j" + std::to_string(res.items.size());
                // cell certificate: first the pushout of i, then the stages of p
                item.cell.stages.push_back(CellStage<PshArrows>{first});
                for (const auto& st : fr.cell.stages) item.cell.stages.push_back(st);
                item.cell.composite = item.j;
                auto holds = w.holds(item.j);
                item.in_w = holds.value_or(false);
                bool fresh = true;
                for (const PresheafMap& seen : j_maps)
                    if (arrows_isomorphic(seen, item.j, cfg)) {
                        fresh = false;
                        break;
                    }
                if (fresh) j_maps.push_back(item.j);
                res.items.push_back(std::move(item));
            }
        }
    }
    res.j = make_genset("smith_j", std::move(j_maps));
    return res;
}

bool density_check(const PshGenSet& j, const PresheafMap& i, const PresheafMap& w,
                   const PresheafMap& top, const PresheafMap& bottom, const Config& cfg) {
    (void)cfg;
    for (const PresheafMap& jm : j.maps) {
        bool found = false;
        fincat::for_each_natural_map(i.dom, jm.dom, {}, nullptr, [&](const PresheafMap& s) {
            // t : dom(j) -> dom(w) with t∘s = top
            std::map<std::pair<std::string, std::string>, std::string> pin_t;
            for (const auto& [key, v] : s.cmp) {
                auto [it, ins] = pin_t.insert({{key.first, v}, top.apply(key.first, key.second)});
                if (!ins && it->second != top.apply(key.first, key.second)) return true;
            }
            bool inner_found = false;
            fincat::for_each_natural_map(jm.dom, w.dom, pin_t, nullptr, [&](const PresheafMap& t) {
                // u : cod(i) -> cod(j) with u∘i = j∘s
                std::map<std::pair<std::string, std::string>, std::string> pin_u;
                PresheafMap js = fincat::compose_maps(jm, s);
                for (const auto& [key, v] : js.cmp) {
                    std::string iv = i.apply(key.first, key.second);
                    auto [it, ins] = pin_u.insert({{key.first, iv}, v});
                    if (!ins && it->second != v) return true;
                }
                bool found_u = false;
                fincat::for_each_natural_map(i.cod, jm.cod, pin_u, nullptr,
                                             [&](const PresheafMap& u) {
                    // v : cod(j) -> cod(w) with v∘u = bottom and v∘j = w∘t
                    std::map<std::pair<std::string, std::string>, std::string> pin_v;
                    for (const auto& [key, vv] : u.cmp) {
                        auto [it, ins] = pin_v.insert(
                            {{key.first, vv}, bottom.apply(key.first, key.second)});
                        if (!ins && it->second != bottom.apply(key.first, key.second)) return true;
                    }
                    PresheafMap wt = fincat::compose_maps(w, t);
                    for (const auto& [key, vv] : jm.cmp) {
                        auto [it, ins] =
                            pin_v.insert({{key.first, vv}, wt.apply(key.first, key.second)});
                        if (!ins && it->second != wt.apply(key.first, key.second)) return true;
                    }
                    bool found_v = false;
                    fincat::for_each_natural_map(jm.cod, w.cod, pin_v, nullptr,
                                                 [&](const PresheafMap&) {
                        found_v = true;
                        return false;
                    });
                    if (found_v) {
                        found_u = true;
                        return false;
                    }
                    return true;
                });
                if (found_u) {
                    inner_found = true;
                    return false;
                }
                return true;
            });
            if (inner_found) {
                found = true;
                return false;
            }
            return true;
        });
        if (found) return true;
    }
    return false;
}

DenseFactorization dense_factor(const PresheafMap& f, const PshGenSet& j, const PshGenSet& gens,
                                int cap, const Config& cfg) {
    DenseFactorization res;
    res.m = f;
    res.g = fincat::identity_map(f.dom);
    res.h = f;
    res.cell.composite = res.g;
    for (int stage = 0;; ++stage) {
        InjReport<PshArrows> inj = in_inj<PshArrows>(res.h, gens, cfg);
        if (inj.ok) {
            res.status = DenseStatus::Complete;
            res.stage_count = stage;
            return res;
        }
        if (stage >= cap) {
            res.status = DenseStatus::CapExceeded;
            res.stage_count = stage;
            return res;
        }
        // factor every unsolved I-square through a J-cell and glue those
        std::vector<Attachment<PshArrows>> atts;
        for (std::size_t gi = 0; gi < gens.maps.size(); ++gi) {
            const PresheafMap& i = gens.maps[gi];
            std::vector<PshArrows::Square> sqs = PshArrows::squares(i, res.h, cfg);
            std::sort(sqs.begin(), sqs.end(), [](const auto& a, const auto& b) {
                return fincat::serialize_map(a.top) + fincat::serialize_map(a.bottom) <
                       fincat::serialize_map(b.top) + fincat::serialize_map(b.bottom);
            });
            for (const PshArrows::Square& sq : sqs) {
                if (PshArrows::lift(i, res.h, sq.top, sq.bottom, cfg)) continue;
                // find j and the two factoring squares
                std::optional<Attachment<PshArrows>> chosen;
                for (std::size_t jk = 0; jk < j.maps.size() && !chosen; ++jk) {
                    const PresheafMap& jm = j.maps[jk];
                    fincat::for_each_natural_map(
                        i.dom, jm.dom, {}, nullptr, [&](const PresheafMap& s) {
                            std::map<std::pair<std::string, std::string>, std::string> pin_t;
                            for (const auto& [key, v] : s.cmp) {
                                auto [it, ins] = pin_t.insert(
                                    {{key.first, v}, sq.top.apply(key.first, key.second)});
                                if (!ins && it->second != sq.top.apply(key.first, key.second))
                                    return true;
                            }
                            bool done = false;
                            fincat::for_each_natural_map(
                                jm.dom, res.h.dom, pin_t, nullptr, [&](const PresheafMap& t) {
                                    // u: cod(i)->cod(j) with u∘i = j∘s
                                    std::map<std::pair<std::string, std::string>, std::string>
                                        pin_u;
                                    PresheafMap js = fincat::compose_maps(jm, s);
                                    for (const auto& [key, v] : js.cmp) {
                                        std::string iv = i.apply(key.first, key.second);
                                        auto [it, ins] = pin_u.insert({{key.first, iv}, v});
                                        if (!ins && it->second != v) return true;
                                    }
                                    bool found_uv = false;
                                    fincat::for_each_natural_map(
                                        i.cod, jm.cod, pin_u, nullptr, [&](const PresheafMap& u) {
                                            std::map<std::pair<std::string, std::string>,
                                                     std::string>
                                                pin_v;
                                            for (const auto& [key, vv] : u.cmp) {
                                                auto [it, ins] = pin_v.insert(
                                                    {{key.first, vv},
                                                     sq.bottom.apply(key.first, key.second)});
                                                if (!ins &&
                                                    it->second !=
                                                        sq.bottom.apply(key.first, key.second))
                                                    return true;
                                            }
                                            PresheafMap ht = fincat::compose_maps(res.h, t);
                                            for (const auto& [key, vv] : jm.cmp) {
                                                auto [it, ins] = pin_v.insert(
                                                    {{key.first, vv},
                                                     ht.apply(key.first, key.second)});
                                                if (!ins &&
                                                    it->second != ht.apply(key.first, key.second))
                                                    return true;
                                            }
                                            std::optional<PresheafMap> vfound;
                                            fincat::for_each_natural_map(
                                                jm.cod, res.h.cod, pin_v, nullptr,
                                                [&](const PresheafMap& v) {
                                                    vfound = v;
                                                    return false;
                                                });
                                            if (vfound) {
                                                chosen = Attachment<PshArrows>{jk, t, *vfound};
                                                found_uv = true;
                                                return false;
                                            }
                                            return true;
                                        });
                                    if (found_uv) {
                                        done = true;
                                        return false;
                                    }
                                    return true;
                                });
                            return !done;
                        });
                }
                if (!chosen) {
                    res.status = DenseStatus::DensityGap;
                    res.stage_count = stage;
                    return res;
                }
                atts.push_back(*chosen);
            }
        }
        PshArrows::Glued glued = PshArrows::glue(res.h, j.maps, atts, cfg);
        res.cell.stages.push_back(CellStage<PshArrows>{atts});
        res.g = fincat::compose_maps(glued.theta, res.g);
        res.cell.composite = res.g;
        res.h = glued.psi;
    }
}

// ---------------------------------------------------------------------------
// Quillen axiom spot checks

bool ModelAxiomReport::all_ok() const {
    for (const AxiomVerdict& v : verdicts)
        if (!v.ok) return false;
    return true;
}

ModelAxiomReport check_model_axioms(const ModelAxiomInstances& instances, const WClass& w,
                                    const PshGenSet& gens, int cap, const Config& cfg) {
    ModelAxiomReport rep;
    auto verdict = [&](const std::string& axiom, bool ok, bool undet, const std::string& detail) {
        rep.verdicts.push_back({axiom, detail, ok, undet});
    };
    // M2: two-of-three through the W specification
    for (std::size_t k = 0; k < instances.weq_pairs.size(); ++k) {
        const auto& [f, g] = instances.weq_pairs[k];
        PresheafMap gf = fincat::compose_maps(g, f);
        auto wf = w.holds(f), wg = w.holds(g), wgf = w.holds(gf);
        std::string at = "pair " + std::to_string(k);
        if (!wf || !wg || !wgf) {
            verdict("M2", false, true, at + ": undetermined at cap");
            continue;
        }
        bool ok = (!(*wf && *wg) || *wgf) && (!(*wf && *wgf) || *wg) && (!(*wg && *wgf) || *wf);
        verdict("M2", ok, false, ok ? at : at + ": two-of-three fails");
    }
    // M3: weak equivalences are closed under retracts
    for (std::size_t k = 0; k < instances.retracts.size(); ++k) {
        const RetractInstance& r = instances.retracts[k];
        std::string at = "retract " + std::to_string(k);
        bool shape =
            fincat::same_map(fincat::compose_maps(r.r_dom, r.s_dom),
                             fincat::identity_map(r.m_prime.dom)) &&
            fincat::same_map(fincat::compose_maps(r.r_cod, r.s_cod),
                             fincat::identity_map(r.m_prime.cod)) &&
            fincat::same_map(fincat::compose_maps(r.m, r.s_dom),
                             fincat::compose_maps(r.s_cod, r.m_prime)) &&
            fincat::same_map(fincat::compose_maps(r.m_prime, r.r_dom),
                             fincat::compose_maps(r.r_cod, r.m));
        if (!shape) {
            verdict("M3", false, false, at + ": not a retract diagram");
            continue;
        }
        auto wm = w.holds(r.m), wp = w.holds(r.m_prime);
        if (!wm || !wp) {
            verdict("M3", false, true, at + ": undetermined at cap");
            continue;
        }
        verdict("M3", !*wm || *wp, false,
                (!*wm || *wp) ? at : at + ": retract of a weak equivalence fails W");
    }
    // M4: lifts in the supplied squares
    for (std::size_t k = 0; k < instances.squares.size(); ++k) {
        const LiftInstance& s = instances.squares[k];
        auto l = PshArrows::lift(s.i, s.p, s.top, s.bottom, cfg);
        verdict("M4", l.has_value(), false,
                "square " + std::to_string(k) + (l ? "" : ": no lift"));
    }
    // M5 and c1: factor and re-check the fibration side
    for (std::size_t k = 0; k < instances.factorizations.size(); ++k) {
        const PresheafMap& m = instances.factorizations[k];
        FactorizationResult<PshArrows> fr = soa_factor<PshArrows>(m, gens, cap, cfg);
        std::string at = "map " + std::to_string(k);
        if (fr.status != FactorStatus::Complete) {
            verdict("M5", false, true, at + ": factorization hit the cap");
            continue;
        }
        bool replay = replay_cell<PshArrows>(m, gens, fr.cell, &fr.f, cfg);
        bool inj = in_inj<PshArrows>(fr.f, gens, cfg).ok;
        verdict("M5", replay && inj, false,
                at + (replay ? "" : ": replay mismatch") + (inj ? "" : ": f not in inj(I)"));
        auto wf = w.holds(fr.f);
        if (!wf)
            verdict("c1", false, true, at + ": undetermined at cap");
        else
            verdict("c1", *wf, false, at + (*wf ? "" : ": inj(I) map escapes W"));
    }
    // c2: compositions and pushouts of certified acyclic cofibrations
    auto acyclic_cof = [&](const PresheafMap& m) -> std::optional<bool> {
        CofResult<PshArrows> cof = in_cof<PshArrows>(m, gens, cap, cfg);
        if (cof.verdict == CofVerdict::Undetermined) return std::nullopt;
        if (cof.verdict == CofVerdict::Refuted) return false;
        auto wm = w.holds(m);
        if (!wm) return std::nullopt;
        return *wm;
    };
    for (std::size_t k = 0; k < instances.acyclic_cof_compositions.size(); ++k) {
        const auto& [f, g] = instances.acyclic_cof_compositions[k];
        std::string at = "composition " + std::to_string(k);
        auto af = acyclic_cof(f), ag = acyclic_cof(g);
        if (!af || !ag) {
            verdict("c2", false, true, at + ": undetermined input");
            continue;
        }
        if (!*af || !*ag) {
            verdict("c2", false, false, at + ": input not an acyclic cofibration");
            continue;
        }
        auto agf = acyclic_cof(fincat::compose_maps(g, f));
        if (!agf)
            verdict("c2", false, true, at + ": undetermined composite");
        else
            verdict("c2", *agf, false, at + (*agf ? "" : ": composite escapes"));
    }
    for (std::size_t k = 0; k < instances.acyclic_cof_pushouts.size(); ++k) {
        const auto& [jmap, attach] = instances.acyclic_cof_pushouts[k];
        std::string at = "pushout " + std::to_string(k);
        auto aj = acyclic_cof(jmap);
        if (!aj || !*aj) {
            verdict("c2", aj.has_value() && *aj, !aj.has_value(),
                    at + ": input not a certified acyclic cofibration");
            continue;
        }
        fincat::PushoutResult po = fincat::pushout(attach, jmap, cfg);
        auto ap = acyclic_cof(po.from_left);
        if (!ap)
            verdict("c2", false, true, at + ": undetermined pushout");
        else
            verdict("c2", *ap, false, at + (*ap ? "" : ": pushout escapes"));
    }
    return rep;
}

}  // namespace sheafsmith::factor
