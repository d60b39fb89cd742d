#include <algorithm>
#include <sstream>

#include "sheafsmith/logic.hpp"

namespace sheafsmith::logic {

// ---------------------------------------------------------------------------
// Naive evaluation over tabular Set-models (partial tables yield Unknown)

namespace {

std::optional<std::string> eval_term_naive(const SetModel& m, const Term& t,
                                           const std::map<std::string, std::string>& env) {
    if (t.kind == Term::Kind::Var) {
        auto it = env.find(t.name);
        if (it == env.end()) throw InvariantError("naive_eval: unbound variable '" + t.name + "'");
        return it->second;
    }
    std::vector<std::string> args;
    for (const Term& a : t.args) {
        auto v = eval_term_naive(m, a, env);
        if (!v) return std::nullopt;
        args.push_back(*v);
    }
    auto ft = m.functions.find(t.name);
    if (ft == m.functions.end()) return std::nullopt;
    auto it = ft->second.find(args);
    if (it == ft->second.end()) return std::nullopt;
    return it->second;
}

Tri tri_not(Tri t) {
    if (t == Tri::Unknown) return Tri::Unknown;
    return t == Tri::True ? Tri::False : Tri::True;
}

}  // namespace

Tri naive_eval(const SetModel& m, const Formula& f, std::map<std::string, std::string>& env,
               const Config& cfg, bool* capped) {
    switch (f.kind) {
        case Formula::Kind::Truth: return Tri::True;
        case Formula::Kind::Falsity: return Tri::False;
        case Formula::Kind::Equal: {
            auto a = eval_term_naive(m, f.terms[0], env);
            auto b = eval_term_naive(m, f.terms[1], env);
            if (!a || !b) return Tri::Unknown;
            return *a == *b ? Tri::True : Tri::False;
        }
        case Formula::Kind::Relation: {
            std::vector<std::string> args;
            for (const Term& t : f.terms) {
                auto v = eval_term_naive(m, t, env);
                if (!v) return Tri::Unknown;
                args.push_back(*v);
            }
            auto rt = m.relations.find(f.relation);
            if (rt == m.relations.end()) return Tri::Unknown;
            return rt->second.count(args) ? Tri::True : Tri::False;
        }
        case Formula::Kind::And: {
            Tri acc = Tri::True;
            for (const Formula& c : f.children) {
                Tri v = naive_eval(m, c, env, cfg, capped);
                if (v == Tri::False) return Tri::False;
                if (v == Tri::Unknown) acc = Tri::Unknown;
            }
            return acc;
        }
        case Formula::Kind::Or: {
            Tri acc = Tri::False;
            for (const Formula& c : f.children) {
                Tri v = naive_eval(m, c, env, cfg, capped);
                if (v == Tri::True) return Tri::True;
                if (v == Tri::Unknown) acc = Tri::Unknown;
            }
            return acc;
        }
        case Formula::Kind::OrFamily: {
            if (!f.family) throw InvariantError("OrFamily without a generator");
            int cap = f.family_cap > 0 ? f.family_cap : cfg.stage_cap;
            Tri acc = Tri::False;
            for (int k = 0; k <= cap; ++k) {
                Tri v = naive_eval(m, f.family(k), env, cfg, capped);
                if (v == Tri::True) return Tri::True;
                if (v == Tri::Unknown) acc = Tri::Unknown;
            }
            if (acc == Tri::False && capped) *capped = true;  // join may not have stabilized
            return acc;
        }
        case Formula::Kind::Implies: {
            Tri a = naive_eval(m, f.children[0], env, cfg, capped);
            if (a == Tri::False) return Tri::True;
            Tri b = naive_eval(m, f.children[1], env, cfg, capped);
            if (b == Tri::True) return Tri::True;
            if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
            return Tri::False;
        }
        case Formula::Kind::Not: return tri_not(naive_eval(m, f.children[0], env, cfg, capped));
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            bool is_exists = f.kind == Formula::Kind::Exists;
            Tri acc = is_exists ? Tri::False : Tri::True;
            std::vector<std::string> saved;
            std::function<Tri(std::size_t)> rec = [&](std::size_t i) -> Tri {
                if (i == f.bound.size()) return naive_eval(m, f.children[0], env, cfg, capped);
                auto st = m.sorts.find(f.bound[i].sort);
                if (st == m.sorts.end())
                    throw InvariantError("naive_eval: unknown sort " + f.bound[i].sort);
                Tri inner = is_exists ? Tri::False : Tri::True;
                for (const std::string& e : st->second) {
                    auto old = env.find(f.bound[i].name);
                    std::optional<std::string> prev;
                    if (old != env.end()) prev = old->second;
                    env[f.bound[i].name] = e;
                    Tri v = rec(i + 1);
                    if (prev)
                        env[f.bound[i].name] = *prev;
                    else
                        env.erase(f.bound[i].name);
                    if (is_exists) {
                        if (v == Tri::True) return Tri::True;
                        if (v == Tri::Unknown) inner = Tri::Unknown;
                    } else {
                        if (v == Tri::False) return Tri::False;
                        if (v == Tri::Unknown) inner = Tri::Unknown;
                    }
                }
                return inner;
            };
            acc = rec(0);
            return acc;
        }
        case Formula::Kind::ExistsUnique: {
            Formula el = elaborate(f);
            return naive_eval(m, el, env, cfg, capped);
        }
    }
    throw InvariantError("naive_eval: unhandled kind");
}

Tri naive_satisfies(const SetModel& m, const Theory& t, const Config& cfg, bool* capped) {
    Tri acc = Tri::True;
    for (const Formula& a : t.axioms) {
        std::map<std::string, std::string> env;
        Tri v = naive_eval(m, a, env, cfg, capped);
        if (v == Tri::False) return Tri::False;
        if (v == Tri::Unknown) acc = Tri::Unknown;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Conversions

Interpretation set_model_as_interpretation(const SetModel& m, const std::string& name,
                                           const Config& cfg) {
    Interpretation out;
    out.name = name;
    out.base = fincat::terminal_category();
    out.lang = m.lang;
    for (const auto& [s, carrier] : m.sorts) {
        Presheaf p;
        p.name = s;
        p.base = out.base;
        p.at["*"] = carrier;
        out.sorts[s] = fincat::make_presheaf(std::move(p));
    }
    for (const FunctionSymbol& f : m.lang.functions) {
        std::vector<Presheaf> args;
        for (const std::string& a : f.args) args.push_back(out.sorts.at(a));
        const auto& table = m.functions.at(f.name);
        if (f.args.empty()) {
            fincat::ProductResult prod = fincat::finite_product({}, out.base, cfg);
            PresheafMap c;
            c.name = f.name;
            c.dom = prod.obj;
            c.cod = out.sorts.at(f.result);
            c.cmp[{"*", "()"}] = table.at({});
            out.functions[f.name] = fincat::make_map(std::move(c));
            continue;
        }
        out.functions[f.name] = function_from_table(
            args, out.sorts.at(f.result),
            [&table](const std::string&, const std::vector<std::string>& comps) {
                return table.at(comps);
            },
            cfg);
    }
    for (const RelationSymbol& r : m.lang.relations) {
        std::vector<Presheaf> args;
        for (const std::string& a : r.args) args.push_back(out.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(args, out.base, cfg);
        std::map<std::string, std::set<std::string>> lv;
        for (const auto& tuple : m.relations.at(r.name)) lv["*"].insert(prod.tuple_elem("*", tuple));
        out.relations[r.name] = subobj::make_subobject(prod.obj, std::move(lv));
    }
    return out;
}

SetModel interpretation_as_set_model(const Interpretation& m) {
    if (m.base->objects.size() != 1)
        throw InvariantError("interpretation_as_set_model: base must have one object");
    const std::string& star = m.base->objects[0];
    SetModel out;
    out.lang = m.lang;
    for (const auto& [s, p] : m.sorts) out.sorts[s] = p.level(star);
    Config cfg;
    for (const FunctionSymbol& f : m.lang.functions) {
        std::vector<Presheaf> args;
        for (const std::string& a : f.args) args.push_back(m.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(args, m.base, cfg);
        std::map<std::vector<std::string>, std::string> table;
        for (const auto& [key, comps] : prod.components) {
            if (key.first != star) continue;
            table[comps] = m.functions.at(f.name).apply(star, key.second);
        }
        out.functions[f.name] = std::move(table);
    }
    for (const RelationSymbol& r : m.lang.relations) {
        std::vector<Presheaf> args;
        for (const std::string& a : r.args) args.push_back(m.sorts.at(a));
        fincat::ProductResult prod = fincat::finite_product(args, m.base, cfg);
        std::set<std::vector<std::string>> rel;
        for (const std::string& x : m.relations.at(r.name).levels.at(star))
            rel.insert(prod.components.at({star, x}));
        out.relations[r.name] = std::move(rel);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bounded model enumeration

namespace {

struct DefiningEq {
    std::string fn;
    std::vector<std::string> vars;  // argument variables in order
    Term rhs;
};

// recognizes  forall args. true => f(args) = rhs  (or without the guard)
std::optional<DefiningEq> as_defining_eq(const Formula& axiom) {
    const Formula* body = &axiom;
    std::vector<TypedVar> vars;
    while (body->kind == Formula::Kind::Forall) {
        for (const TypedVar& v : body->bound) vars.push_back(v);
        body = &body->children[0];
    }
    if (body->kind == Formula::Kind::Implies) {
        if (body->children[0].kind != Formula::Kind::Truth) return std::nullopt;
        body = &body->children[1];
    }
    if (body->kind != Formula::Kind::Equal) return std::nullopt;
    const Term& lhs = body->terms[0];
    if (lhs.kind != Term::Kind::App || lhs.args.size() != vars.size()) return std::nullopt;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (lhs.args[i].kind != Term::Kind::Var || lhs.args[i].name != vars[i].name)
            return std::nullopt;
        if (!seen.insert(vars[i].name).second) return std::nullopt;
    }
    // rhs must not mention the defined symbol
    std::function<bool(const Term&)> mentions = [&](const Term& t) {
        if (t.kind == Term::Kind::App && t.name == lhs.name) return true;
        for (const Term& a : t.args)
            if (mentions(a)) return true;
        return false;
    };
    if (mentions(body->terms[1])) return std::nullopt;
    DefiningEq de;
    de.fn = lhs.name;
    for (const TypedVar& v : vars) de.vars.push_back(v.name);
    de.rhs = body->terms[1];
    return de;
}

void collect_symbols(const Term& t, std::set<std::string>& fns) {
    if (t.kind == Term::Kind::App) fns.insert(t.name);
    for (const Term& a : t.args) collect_symbols(a, fns);
}

void collect_symbols(const Formula& f, std::set<std::string>& fns, std::set<std::string>& rels) {
    if (f.kind == Formula::Kind::Relation) rels.insert(f.relation);
    for (const Term& t : f.terms) collect_symbols(t, fns);
    for (const Formula& c : f.children) collect_symbols(c, fns, rels);
    if (f.kind == Formula::Kind::OrFamily && f.family) collect_symbols(f.family(0), fns, rels);
}

std::vector<std::vector<std::string>> arg_tuples(const SetModel& m,
                                                 const std::vector<std::string>& arg_sorts) {
    std::vector<std::vector<std::string>> tuples{{}};
    for (const std::string& s : arg_sorts) {
        std::vector<std::vector<std::string>> next;
        for (const auto& t : tuples)
            for (const std::string& e : m.sorts.at(s)) {
                auto t2 = t;
                t2.push_back(e);
                next.push_back(std::move(t2));
            }
        tuples = std::move(next);
    }
    return tuples;
}

std::string canonical_form(const SetModel& m) {
    std::ostringstream os;
    for (const auto& [s, carrier] : m.sorts) os << s << "=" << carrier.size() << ";";
    for (const auto& [f, table] : m.functions) {
        os << f << ":";
        for (const auto& [args, v] : table) {
            for (const auto& a : args) os << a << ",";
            os << "->" << v << ";";
        }
    }
    for (const auto& [r, rel] : m.relations) {
        os << r << ":";
        for (const auto& args : rel) {
            for (const auto& a : args) os << a << ",";
            os << ";";
        }
    }
    return os.str();
}

// lexicographically least serialization over all per-sort relabelings
std::string iso_canonical_form(const SetModel& m) {
    std::vector<std::string> sort_names;
    for (const auto& [s, c] : m.sorts) sort_names.push_back(s);
    std::string best;
    std::function<void(std::size_t, std::map<std::string, std::map<std::string, std::string>>&)>
        rec = [&](std::size_t i, std::map<std::string, std::map<std::string, std::string>>& perm) {
            if (i == sort_names.size()) {
                SetModel relabeled = m;
                for (auto& [s, carrier] : relabeled.sorts) {
                    for (auto& e : carrier) e = perm.at(s).at(e);
                    std::sort(carrier.begin(), carrier.end());
                }
                for (const FunctionSymbol& f : m.lang.functions) {
                    std::map<std::vector<std::string>, std::string> table;
                    for (const auto& [args, v] : m.functions.at(f.name)) {
                        std::vector<std::string> a2;
                        for (std::size_t j = 0; j < args.size(); ++j)
                            a2.push_back(perm.at(f.args[j]).at(args[j]));
                        table[a2] = perm.at(f.result).at(v);
                    }
                    relabeled.functions[f.name] = std::move(table);
                }
                for (const RelationSymbol& r : m.lang.relations) {
                    std::set<std::vector<std::string>> rel;
                    for (const auto& args : m.relations.at(r.name)) {
                        std::vector<std::string> a2;
                        for (std::size_t j = 0; j < args.size(); ++j)
                            a2.push_back(perm.at(r.args[j]).at(args[j]));
                        rel.insert(a2);
                    }
                    relabeled.relations[r.name] = std::move(rel);
                }
                std::string s = canonical_form(relabeled);
                if (best.empty() || s < best) best = s;
                return;
            }
            const std::string& s = sort_names[i];
            std::vector<std::string> carrier = m.sorts.at(s);
            std::sort(carrier.begin(), carrier.end());
            std::vector<std::string> target = carrier;
            do {
                std::map<std::string, std::string> p;
                for (std::size_t j = 0; j < carrier.size(); ++j) p[carrier[j]] = target[j];
                perm[s] = p;
                rec(i + 1, perm);
            } while (std::next_permutation(target.begin(), target.end()));
            perm.erase(s);
        };
    std::map<std::string, std::map<std::string, std::string>> perm;
    rec(0, perm);
    return best;
}

struct Enumerator {
    const Theory& theory;
    const EnumBounds& bounds;
    const Config& cfg;
    std::vector<SetModel> out;
    std::set<std::string> seen_iso;

    // axioms grouped by the set of symbols they mention
    struct AxiomInfo {
        const Formula* axiom;
        std::set<std::string> fns, rels;
    };
    std::vector<AxiomInfo> axioms;

    bool axioms_hold(const SetModel& m, const std::set<std::string>& filled_fns,
                     const std::set<std::string>& filled_rels, bool final_pass) {
        for (const AxiomInfo& a : axioms) {
            bool applicable = true;
            for (const std::string& f : a.fns)
                if (!filled_fns.count(f)) applicable = false;
            for (const std::string& r : a.rels)
                if (!filled_rels.count(r)) applicable = false;
            if (!applicable && !final_pass) continue;
            std::map<std::string, std::string> env;
            bool capped = false;
            Tri v = naive_eval(m, *a.axiom, env, cfg, &capped);
            if (v == Tri::False) return false;
            if (final_pass && v != Tri::True) return false;  // Unknown at the end rejects
        }
        return true;
    }

    void leaf(SetModel& m) {
        std::set<std::string> all_fns, all_rels;
        for (const FunctionSymbol& f : theory.lang.functions) all_fns.insert(f.name);
        for (const RelationSymbol& r : theory.lang.relations) all_rels.insert(r.name);
        if (!axioms_hold(m, all_fns, all_rels, true)) return;
        if (bounds.up_to_iso) {
            if (!seen_iso.insert(iso_canonical_form(m)).second) return;
        }
        out.push_back(m);
    }

    void fill_relations(SetModel& m, std::size_t idx, std::set<std::string>& filled_fns,
                        std::set<std::string>& filled_rels) {
        if (idx == theory.lang.relations.size()) {
            leaf(m);
            return;
        }
        const RelationSymbol& r = theory.lang.relations[idx];
        auto tuples = arg_tuples(m, r.args);
        guard_size(static_cast<std::int64_t>(tuples.size()), cfg, "enumerate_models relations");
        m.relations[r.name];  // materialize even when there are no entries
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == tuples.size()) {
                filled_rels.insert(r.name);
                if (axioms_hold(m, filled_fns, filled_rels, false))
                    fill_relations(m, idx + 1, filled_fns, filled_rels);
                filled_rels.erase(r.name);
                return;
            }
            m.relations[r.name].erase(tuples[i]);
            rec(i + 1);
            m.relations[r.name].insert(tuples[i]);
            rec(i + 1);
            m.relations[r.name].erase(tuples[i]);
        };
        rec(0);
    }

    void fill_functions(SetModel& m, std::set<std::string> remaining,
                        std::set<std::string>& filled_fns,
                        const std::map<std::string, DefiningEq>& defs) {
        if (remaining.empty()) {
            std::set<std::string> filled_rels;
            fill_relations(m, 0, filled_fns, filled_rels);
            return;
        }
        // prefer a symbol whose defining equation only needs filled tables
        for (const std::string& fn : remaining) {
            auto dit = defs.find(fn);
            if (dit == defs.end()) continue;
            std::set<std::string> needed;
            collect_symbols(dit->second.rhs, needed);
            needed.erase(fn);
            bool ready = true;
            for (const std::string& n : needed)
                if (!filled_fns.count(n)) ready = false;
            if (!ready) continue;
            const FunctionSymbol* sym = theory.lang.function(fn);
            auto tuples = arg_tuples(m, sym->args);
            std::map<std::vector<std::string>, std::string> table;
            bool ok = true;
            for (const auto& t : tuples) {
                std::map<std::string, std::string> env;
                for (std::size_t i = 0; i < t.size(); ++i) env[dit->second.vars[i]] = t[i];
                auto v = eval_term_naive(m, dit->second.rhs, env);
                if (!v) {
                    ok = false;
                    break;
                }
                table[t] = *v;
            }
            if (!ok) break;  // fall through to free enumeration
            m.functions[fn] = std::move(table);
            filled_fns.insert(fn);
            auto rem = remaining;
            rem.erase(fn);
            if (axioms_hold(m, filled_fns, {}, false)) fill_functions(m, rem, filled_fns, defs);
            filled_fns.erase(fn);
            m.functions.erase(fn);
            return;
        }
        // free enumeration of the first remaining symbol, entry by entry
        const std::string fn = *remaining.begin();
        const FunctionSymbol* sym = theory.lang.function(fn);
        auto tuples = arg_tuples(m, sym->args);
        guard_size(static_cast<std::int64_t>(tuples.size()), cfg, "enumerate_models tables");
        const std::vector<std::string>& values = m.sorts.at(sym->result);
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == tuples.size()) {
                filled_fns.insert(fn);
                auto rem = remaining;
                rem.erase(fn);
                if (axioms_hold(m, filled_fns, {}, false)) fill_functions(m, rem, filled_fns, defs);
                filled_fns.erase(fn);
                return;
            }
            for (const std::string& v : values) {
                m.functions[fn][tuples[i]] = v;
                rec(i + 1);
            }
            m.functions[fn].erase(tuples[i]);
        };
        if (values.empty() && !tuples.empty()) return;  // no possible table
        m.functions[fn];  // materialize even when there are no entries
        rec(0);
        m.functions.erase(fn);
    }

    void run() {
        for (const Formula& a : theory.axioms) {
            AxiomInfo info;
            info.axiom = &a;
            collect_symbols(a, info.fns, info.rels);
            axioms.push_back(std::move(info));
        }
        std::map<std::string, DefiningEq> defs;
        for (const Formula& a : theory.axioms)
            if (auto de = as_defining_eq(a))
                if (!defs.count(de->fn)) defs[de->fn] = *de;

        // odometer over carrier sizes
        std::vector<std::string> sorts = theory.lang.sorts;
        std::vector<int> lo(sorts.size()), hi(sorts.size());
        for (std::size_t i = 0; i < sorts.size(); ++i) {
            auto ex = bounds.exact.find(sorts[i]);
            if (ex != bounds.exact.end()) {
                lo[i] = hi[i] = ex->second;
                continue;
            }
            auto ps = bounds.per_sort.find(sorts[i]);
            lo[i] = 0;
            hi[i] = ps != bounds.per_sort.end() ? ps->second : bounds.default_bound;
        }
        std::vector<int> sizes = lo;
        while (true) {
            SetModel m;
            m.lang = theory.lang;
            for (std::size_t i = 0; i < sorts.size(); ++i) {
                std::vector<std::string> carrier;
                for (int k = 0; k < sizes[i]; ++k)
                    carrier.push_back(sorts[i] + std::to_string(k));
                m.sorts[sorts[i]] = std::move(carrier);
            }
            std::set<std::string> remaining, filled;
            for (const FunctionSymbol& f : theory.lang.functions) remaining.insert(f.name);
            fill_functions(m, remaining, filled, defs);

            std::size_t i = 0;
            for (; i < sizes.size(); ++i) {
                if (sizes[i] < hi[i]) {
                    ++sizes[i];
                    break;
                }
                sizes[i] = lo[i];
            }
            if (i == sizes.size()) break;
        }
    }
};

}  // namespace

std::vector<SetModel> enumerate_models(const Theory& t, const EnumBounds& bounds,
                                       const Config& cfg) {
    Enumerator e{t, bounds, cfg};
    e.run();
    return std::move(e.out);
}

}  // namespace sheafsmith::logic
