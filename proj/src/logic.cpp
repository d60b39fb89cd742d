#include "sheafsmith/logic.hpp"

#include <algorithm>
#include <sstream>

namespace sheafsmith::logic {

bool Language::has_sort(const std::string& s) const {
    return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
}

const FunctionSymbol* Language::function(const std::string& name) const {
    for (const FunctionSymbol& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

const RelationSymbol* Language::relation(const std::string& name) const {
    for (const RelationSymbol& r : relations)
        if (r.name == name) return &r;
    return nullptr;
}

Term var(const std::string& name, const std::string& sort) {
    Term t;
    t.kind = Term::Kind::Var;
    t.name = name;
    t.sort = sort;
    return t;
}

Term app(const Language& lang, const std::string& fn, std::vector<Term> args) {
    const FunctionSymbol* f = lang.function(fn);
    if (!f) throw InvariantError("UnknownSymbol: function '" + fn + "'");
    if (f->args.size() != args.size())
        throw InvariantError("ArityMismatch: '" + fn + "' expects " +
                             std::to_string(f->args.size()) + " arguments");
    for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].sort != f->args[i])
            throw InvariantError("TypeError: argument " + std::to_string(i) + " of '" + fn +
                                 "' has sort " + args[i].sort + ", expected " + f->args[i]);
    Term t;
    t.kind = Term::Kind::App;
    t.name = fn;
    t.args = std::move(args);
    t.sort = f->result;
    return t;
}

Formula truth() { return Formula{}; }

Formula falsity() {
    Formula f;
    f.kind = Formula::Kind::Falsity;
    return f;
}

Formula equal(Term a, Term b) {
    if (a.sort != b.sort)
        throw InvariantError("TypeError: equality between sorts " + a.sort + " and " + b.sort);
    Formula f;
    f.kind = Formula::Kind::Equal;
    f.terms = {std::move(a), std::move(b)};
    return f;
}

Formula relation(const Language& lang, const std::string& name, std::vector<Term> args) {
    const RelationSymbol* r = lang.relation(name);
    if (!r) throw InvariantError("UnknownSymbol: relation '" + name + "'");
    if (r->args.size() != args.size()) throw InvariantError("ArityMismatch: relation '" + name + "'");
    for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].sort != r->args[i])
            throw InvariantError("TypeError: argument " + std::to_string(i) + " of relation '" +
                                 name + "'");
    Formula f;
    f.kind = Formula::Kind::Relation;
    f.relation = name;
    f.terms = std::move(args);
    return f;
}

Formula conj(std::vector<Formula> fs) {
    if (fs.size() == 1) return fs[0];
    Formula f;
    f.kind = Formula::Kind::And;
    f.children = std::move(fs);
    if (f.children.empty()) return truth();
    return f;
}

Formula disj(std::vector<Formula> fs) {
    if (fs.size() == 1) return fs[0];
    Formula f;
    f.kind = Formula::Kind::Or;
    f.children = std::move(fs);
    if (f.children.empty()) return falsity();
    return f;
}

Formula implies(Formula a, Formula b) {
    Formula f;
    f.kind = Formula::Kind::Implies;
    f.children = {std::move(a), std::move(b)};
    return f;
}

Formula negate(Formula a) {
    Formula f;
    f.kind = Formula::Kind::Not;
    f.children = {std::move(a)};
    return f;
}

namespace {
Formula quantifier(Formula::Kind k, std::vector<TypedVar> vars, Formula body) {
    if (vars.empty()) return body;
    Formula f;
    f.kind = k;
    f.bound = std::move(vars);
    f.children = {std::move(body)};
    return f;
}
}  // namespace

Formula exists(std::vector<TypedVar> vars, Formula body) {
    return quantifier(Formula::Kind::Exists, std::move(vars), std::move(body));
}
Formula exists_unique(std::vector<TypedVar> vars, Formula body) {
    return quantifier(Formula::Kind::ExistsUnique, std::move(vars), std::move(body));
}
Formula forall(std::vector<TypedVar> vars, Formula body) {
    return quantifier(Formula::Kind::Forall, std::move(vars), std::move(body));
}

Formula or_family(const std::string& name, std::function<Formula(int)> family, int cap) {
    Formula f;
    f.kind = Formula::Kind::OrFamily;
    f.family = std::move(family);
    f.family_name = name;
    f.family_cap = cap;
    return f;
}

namespace {

void term_vars(const Term& t, std::set<std::string>& out) {
    if (t.kind == Term::Kind::Var)
        out.insert(t.name);
    else
        for (const Term& a : t.args) term_vars(a, out);
}

void all_names(const Formula& f, std::set<std::string>& out) {
    for (const Term& t : f.terms) term_vars(t, out);
    for (const TypedVar& v : f.bound) out.insert(v.name);
    for (const Formula& c : f.children) all_names(c, out);
}

}  // namespace

std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> out;
    for (const Term& t : f.terms) term_vars(t, out);
    for (const Formula& c : f.children) {
        std::set<std::string> sub = free_vars(c);
        out.insert(sub.begin(), sub.end());
    }
    for (const TypedVar& v : f.bound) out.erase(v.name);
    return out;
}

namespace {
Term subst_term(const Term& t, const std::map<std::string, std::string>& rename) {
    Term out = t;
    if (t.kind == Term::Kind::Var) {
        auto it = rename.find(t.name);
        if (it != rename.end()) out.name = it->second;
        return out;
    }
    out.args.clear();
    for (const Term& a : t.args) out.args.push_back(subst_term(a, rename));
    return out;
}
}  // namespace

Formula substitute(const Formula& f, const std::map<std::string, std::string>& rename) {
    Formula out = f;
    out.terms.clear();
    for (const Term& t : f.terms) out.terms.push_back(subst_term(t, rename));
    // bound variables shadow the renaming
    std::map<std::string, std::string> inner = rename;
    for (const TypedVar& v : f.bound) inner.erase(v.name);
    out.children.clear();
    for (const Formula& c : f.children) out.children.push_back(substitute(c, inner));
    return out;
}

Formula elaborate(const Formula& f) {
    Formula out = f;
    out.children.clear();
    for (const Formula& c : f.children) out.children.push_back(elaborate(c));
    if (f.kind != Formula::Kind::ExistsUnique) return out;

    Formula body = out.children[0];
    std::set<std::string> used;
    all_names(body, used);
    std::map<std::string, std::string> rename;
    std::vector<TypedVar> primed;
    for (const TypedVar& v : f.bound) {
        std::string fresh = v.name + "'";
        while (used.count(fresh)) fresh += "'";
        used.insert(fresh);
        rename[v.name] = fresh;
        primed.push_back({fresh, v.sort});
    }
    Formula body_primed = substitute(body, rename);
    std::vector<Formula> diag;
    for (std::size_t i = 0; i < f.bound.size(); ++i)
        diag.push_back(equal(var(f.bound[i].name, f.bound[i].sort),
                             var(primed[i].name, primed[i].sort)));
    Formula uniq = forall(f.bound,
                          forall(primed, implies(conj({body, body_primed}), conj(diag))));
    return conj({exists(f.bound, body), uniq});
}

// ---------------------------------------------------------------------------
// Printing

std::string print_term(const Term& t) {
    if (t.kind == Term::Kind::Var) return t.name;
    if (t.args.empty()) return t.name;
    std::string s = t.name + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ", ";
        s += print_term(t.args[i]);
    }
    return s + ")";
}

namespace {

int precedence(const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::Exists:
        case Formula::Kind::ExistsUnique:
        case Formula::Kind::Forall: return 0;
        case Formula::Kind::Implies: return 1;
        case Formula::Kind::Or:
        case Formula::Kind::OrFamily: return 2;
        case Formula::Kind::And: return 3;
        case Formula::Kind::Not: return 4;
        default: return 5;
    }
}

std::string binders(const std::vector<TypedVar>& vars) {
    std::string s;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) s += ", ";
        s += vars[i].name + ":" + vars[i].sort;
    }
    return s;
}

std::string print_at(const Formula& f, int min_prec) {
    std::string s;
    switch (f.kind) {
        case Formula::Kind::Truth: s = "true"; break;
        case Formula::Kind::Falsity: s = "false"; break;
        case Formula::Kind::Equal:
            s = print_term(f.terms[0]) + " = " + print_term(f.terms[1]);
            s = "(" + s + ")";  // keep equalities visually atomic
            return s;
        case Formula::Kind::Relation: {
            s = f.relation + "(";
            for (std::size_t i = 0; i < f.terms.size(); ++i) {
                if (i) s += ", ";
                s += print_term(f.terms[i]);
            }
            s += ")";
            return s;
        }
        case Formula::Kind::And: {
            if (f.children.empty()) return "true";
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                if (i) s += " /\\ ";
                s += print_at(f.children[i], 4);
            }
            break;
        }
        case Formula::Kind::Or: {
            if (f.children.empty()) return "false";
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                if (i) s += " \\/ ";
                s += print_at(f.children[i], 3);
            }
            break;
        }
        case Formula::Kind::OrFamily:
            s = "\\/[" + f.family_name + "]";
            break;
        case Formula::Kind::Implies:
            s = print_at(f.children[0], 2) + " => " + print_at(f.children[1], 1);
            break;
        case Formula::Kind::Not: s = "not " + print_at(f.children[0], 4); break;
        case Formula::Kind::Exists:
            s = "exists " + binders(f.bound) + ". " + print_at(f.children[0], 0);
            break;
        case Formula::Kind::ExistsUnique:
            s = "exists! " + binders(f.bound) + ". " + print_at(f.children[0], 0);
            break;
        case Formula::Kind::Forall:
            s = "forall " + binders(f.bound) + ". " + print_at(f.children[0], 0);
            break;
    }
    if (precedence(f) < min_prec) s = "(" + s + ")";
    return s;
}

}  // namespace

std::string print_formula(const Formula& f) { return print_at(f, 0); }

std::string print_theory(const Theory& t) {
    std::ostringstream os;
    os << "theory " << t.name << "\n";
    if (t.fragment != "general") os << "fragment " << t.fragment << "\n";
    if (!t.lang.sorts.empty()) {
        os << "sort ";
        for (std::size_t i = 0; i < t.lang.sorts.size(); ++i)
            os << (i ? ", " : "") << t.lang.sorts[i];
        os << "\n";
    }
    for (const FunctionSymbol& f : t.lang.functions) {
        if (f.args.empty()) {
            os << "const " << f.name << " : " << f.result << "\n";
            continue;
        }
        os << "fun " << f.name << " : ";
        for (std::size_t i = 0; i < f.args.size(); ++i) os << (i ? ", " : "") << f.args[i];
        os << " -> " << f.result << "\n";
    }
    for (const RelationSymbol& r : t.lang.relations) {
        os << "rel " << r.name << " : ";
        for (std::size_t i = 0; i < r.args.size(); ++i) os << (i ? ", " : "") << r.args[i];
        os << "\n";
    }
    for (const Formula& a : t.axioms) os << "axiom " << print_formula(a) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    std::string text;
    bool ident = false;
};

std::vector<Token> lex_line(const std::string& line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_ident = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '[' ||
               c == ']';
    };
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') break;
        if (is_ident(c)) {
            std::size_t j = i;
            while (j < line.size() && is_ident(line[j])) ++j;
            out.push_back({line.substr(i, j - i), true});
            i = j;
            continue;
        }
        auto two = line.substr(i, 2);
        if (two == "=>" || two == "->" || two == "/\\" || two == "\\/") {
            out.push_back({two, false});
            i += 2;
            continue;
        }
        if (std::string("(),:.=!").find(c) != std::string::npos) {
            out.push_back({std::string(1, c), false});
            ++i;
            continue;
        }
        throw ParseError(lineno, std::string("unexpected character '") + c + "'");
    }
    return out;
}

struct FormulaParser {
    const Language& lang;
    const std::vector<Token>& toks;
    std::size_t pos = 0;
    int lineno;
    std::vector<TypedVar> scope;

    bool at_end() const { return pos >= toks.size(); }
    const Token& peek() const {
        static Token end{"", false};
        return at_end() ? end : toks[pos];
    }
    bool accept(const std::string& s) {
        if (!at_end() && toks[pos].text == s) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(const std::string& s) {
        if (!accept(s)) throw ParseError(lineno, "expected '" + s + "', got '" + peek().text + "'");
    }
    std::string expect_ident(const std::string& what) {
        if (at_end() || !toks[pos].ident)
            throw ParseError(lineno, "expected " + what + ", got '" + peek().text + "'");
        return toks[pos++].text;
    }

    const TypedVar* lookup(const std::string& name) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }

    std::vector<TypedVar> parse_binders() {
        std::vector<TypedVar> vars;
        while (true) {
            std::vector<std::string> names{expect_ident("variable")};
            while (accept(",")) {
                // lookahead: another name followed by ':' continues this
                // group only if no ':' intervenes; simpler: names collect
                // until ':' appears
                names.push_back(expect_ident("variable"));
                if (peek().text == ":") break;
            }
            expect(":");
            std::string sort = expect_ident("sort");
            if (!lang.has_sort(sort)) throw ParseError(lineno, "UnknownSort: '" + sort + "'");
            for (const std::string& n : names) vars.push_back({n, sort});
            if (!accept(",")) break;
        }
        return vars;
    }

    Formula parse() {
        Formula f = parse_quantified();
        if (!at_end()) throw ParseError(lineno, "trailing tokens after formula: '" + peek().text + "'");
        return f;
    }

    Formula parse_quantified() {
        for (Formula::Kind k :
             {Formula::Kind::Forall, Formula::Kind::Exists}) {
            const char* kw = (k == Formula::Kind::Forall) ? "forall" : "exists";
            if (peek().text == kw && peek().ident) {
                ++pos;
                Formula::Kind kind = k;
                if (k == Formula::Kind::Exists && accept("!")) kind = Formula::Kind::ExistsUnique;
                std::vector<TypedVar> vars = parse_binders();
                expect(".");
                std::size_t mark = scope.size();
                for (const TypedVar& v : vars) scope.push_back(v);
                Formula body = parse_quantified();
                scope.resize(mark);
                Formula f;
                f.kind = kind;
                f.bound = std::move(vars);
                f.children = {std::move(body)};
                return f;
            }
        }
        return parse_implication();
    }

    Formula parse_implication() {
        Formula lhs = parse_disjunction();
        if (accept("=>")) {
            Formula rhs = parse_quantified();  // right-assoc, quantifiers allowed on the right
            return implies(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Formula parse_disjunction() {
        std::vector<Formula> parts{parse_conjunction()};
        while (accept("\\/")) parts.push_back(parse_conjunction());
        if (parts.size() == 1) return parts[0];
        Formula f;
        f.kind = Formula::Kind::Or;
        f.children = std::move(parts);
        return f;
    }

    Formula parse_conjunction() {
        std::vector<Formula> parts{parse_negation()};
        while (accept("/\\")) parts.push_back(parse_negation());
        if (parts.size() == 1) return parts[0];
        Formula f;
        f.kind = Formula::Kind::And;
        f.children = std::move(parts);
        return f;
    }

    Formula parse_negation() {
        if (peek().text == "not" && peek().ident) {
            ++pos;
            return negate(parse_negation());
        }
        return parse_atom();
    }

    Formula parse_atom() {
        if (accept("(")) {
            // either a parenthesized formula or a parenthesized term in an
            // equality; try formula first by scanning for a matching shape
            std::size_t save = pos;
            try {
                Formula f = parse_quantified();
                expect(")");
                return f;
            } catch (const ParseError&) {
                pos = save;
                Term t = parse_term();
                expect(")");
                expect("=");
                Term u = parse_term();
                return make_equal(t, u);
            }
        }
        if (peek().text == "true" && peek().ident) {
            ++pos;
            return truth();
        }
        if (peek().text == "false" && peek().ident) {
            ++pos;
            return falsity();
        }
        if (!peek().ident) throw ParseError(lineno, "expected a formula, got '" + peek().text + "'");
        // relation atom or term equality
        if (lang.relation(peek().text)) {
            std::string rname = expect_ident("relation");
            expect("(");
            std::vector<Term> args;
            if (!accept(")")) {
                args.push_back(parse_term());
                while (accept(",")) args.push_back(parse_term());
                expect(")");
            }
            try {
                return relation(lang, rname, std::move(args));
            } catch (const InvariantError& e) {
                throw ParseError(lineno, e.what());
            }
        }
        Term t = parse_term();
        expect("=");
        Term u = parse_term();
        return make_equal(t, u);
    }

    Formula make_equal(const Term& t, const Term& u) {
        if (t.sort != u.sort)
            throw ParseError(lineno, "TypeError: cannot equate " + t.sort + " with " + u.sort);
        return equal(t, u);
    }

    Term parse_term() {
        std::string name = expect_ident("term");
        if (accept("(")) {
            std::vector<Term> args;
            if (!accept(")")) {
                args.push_back(parse_term());
                while (accept(",")) args.push_back(parse_term());
                expect(")");
            }
            try {
                return app(lang, name, std::move(args));
            } catch (const InvariantError& e) {
                throw ParseError(lineno, e.what());
            }
        }
        if (const TypedVar* v = lookup(name)) return var(name, v->sort);
        if (const FunctionSymbol* f = lang.function(name)) {
            if (!f->args.empty())
                throw ParseError(lineno, "ArityMismatch: '" + name + "' needs arguments");
            return app(lang, name, {});
        }
        throw ParseError(lineno, "UnknownSymbol: '" + name + "'");
    }
};

}  // namespace

Theory parse_theory(const std::string& text) {
    Theory t;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool named = false;
    std::vector<std::pair<int, std::vector<Token>>> axiom_lines;
    while (std::getline(is, line)) {
        ++lineno;
        std::vector<Token> toks = lex_line(line, lineno);
        if (toks.empty()) continue;
        const std::string& kw = toks[0].text;
        auto rest_idents = [&](std::size_t from) {
            std::vector<std::string> names;
            std::size_t i = from;
            while (i < toks.size()) {
                if (!toks[i].ident) throw ParseError(lineno, "expected a name");
                names.push_back(toks[i].text);
                ++i;
                if (i < toks.size()) {
                    if (toks[i].text != ",") throw ParseError(lineno, "expected ','");
                    ++i;
                }
            }
            return names;
        };
        if (kw == "theory") {
            if (toks.size() != 2 || !toks[1].ident) throw ParseError(lineno, "expected: theory NAME");
            t.name = toks[1].text;
            named = true;
        } else if (kw == "fragment") {
            if (toks.size() != 2) throw ParseError(lineno, "expected: fragment NAME");
            t.fragment = toks[1].text;
            if (t.fragment != "cartesian" && t.fragment != "coherent" && t.fragment != "general")
                throw ParseError(lineno, "unknown fragment '" + t.fragment + "'");
        } else if (kw == "sort") {
            for (const std::string& s : rest_idents(1)) {
                if (t.lang.has_sort(s)) throw ParseError(lineno, "duplicate sort '" + s + "'");
                t.lang.sorts.push_back(s);
            }
        } else if (kw == "fun" || kw == "const") {
            std::size_t i = 1;
            if (i >= toks.size() || !toks[i].ident) throw ParseError(lineno, "expected a name");
            FunctionSymbol f;
            f.name = toks[i++].text;
            if (t.lang.function(f.name) || t.lang.relation(f.name))
                throw ParseError(lineno, "duplicate symbol '" + f.name + "'");
            if (i >= toks.size() || toks[i].text != ":") throw ParseError(lineno, "expected ':'");
            ++i;
            if (kw == "const") {
                if (i + 1 != toks.size() || !toks[i].ident)
                    throw ParseError(lineno, "expected: const NAME : SORT");
                f.result = toks[i].text;
            } else {
                std::vector<std::string> parts;
                bool arrow = false;
                while (i < toks.size()) {
                    if (toks[i].text == "->") {
                        arrow = true;
                        ++i;
                        continue;
                    }
                    if (toks[i].text == ",") {
                        ++i;
                        continue;
                    }
                    if (!toks[i].ident) throw ParseError(lineno, "expected a sort");
                    if (arrow) {
                        if (!f.result.empty()) throw ParseError(lineno, "multiple result sorts");
                        f.result = toks[i].text;
                    } else {
                        f.args.push_back(toks[i].text);
                    }
                    ++i;
                }
                if (!arrow || f.result.empty()) throw ParseError(lineno, "expected '-> SORT'");
            }
            for (const std::string& s : f.args)
                if (!t.lang.has_sort(s)) throw ParseError(lineno, "UnknownSort: '" + s + "'");
            if (!t.lang.has_sort(f.result))
                throw ParseError(lineno, "UnknownSort: '" + f.result + "'");
            t.lang.functions.push_back(std::move(f));
        } else if (kw == "rel") {
            std::size_t i = 1;
            if (i >= toks.size() || !toks[i].ident) throw ParseError(lineno, "expected a name");
            RelationSymbol r;
            r.name = toks[i++].text;
            if (t.lang.function(r.name) || t.lang.relation(r.name))
                throw ParseError(lineno, "duplicate symbol '" + r.name + "'");
            if (i >= toks.size() || toks[i].text != ":") throw ParseError(lineno, "expected ':'");
            ++i;
            while (i < toks.size()) {
                if (toks[i].text == ",") {
                    ++i;
                    continue;
                }
                if (!toks[i].ident) throw ParseError(lineno, "expected a sort");
                if (!t.lang.has_sort(toks[i].text))
                    throw ParseError(lineno, "UnknownSort: '" + toks[i].text + "'");
                r.args.push_back(toks[i].text);
                ++i;
            }
            t.lang.relations.push_back(std::move(r));
        } else if (kw == "axiom") {
            axiom_lines.push_back({lineno, std::vector<Token>(toks.begin() + 1, toks.end())});
        } else {
            throw ParseError(lineno, "unknown directive '" + kw + "'");
        }
    }
    if (!named) throw ParseError(0, "missing 'theory NAME' header");
    for (auto& [ln, toks] : axiom_lines) {
        FormulaParser p{t.lang, toks, 0, ln, {}};
        Formula f = p.parse();
        std::set<std::string> fv = free_vars(f);
        if (!fv.empty())
            throw ParseError(ln, "axiom has free variables (not a sentence): '" + *fv.begin() + "'");
        t.axioms.push_back(std::move(f));
    }
    if (t.fragment != "general") {
        FragmentReport rep = check_fragment(t, t.fragment);
        if (!rep.ok)
            throw ParseError(0, "FragmentViolation: axiom " + rep.axiom + " — " + rep.rule);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Fragments

namespace {

bool is_eq_conjunction(const Formula& f, std::string& rule) {
    switch (f.kind) {
        case Formula::Kind::Truth: return true;
        case Formula::Kind::Equal: return true;
        case Formula::Kind::And:
            for (const Formula& c : f.children)
                if (!is_eq_conjunction(c, rule)) return false;
            return true;
        default:
            rule = "cartesian contexts are finite conjunctions of equations (found " +
                   print_formula(f) + ")";
            return false;
    }
}

bool is_positive_existential(const Formula& f, std::string& rule) {
    switch (f.kind) {
        case Formula::Kind::Truth:
        case Formula::Kind::Falsity:
        case Formula::Kind::Equal:
        case Formula::Kind::Relation: return true;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            for (const Formula& c : f.children)
                if (!is_positive_existential(c, rule)) return false;
            return true;
        case Formula::Kind::OrFamily:
            // family members must themselves be coherent; spot-check index 0
            return f.family ? is_positive_existential(f.family(0), rule) : true;
        case Formula::Kind::Exists: return is_positive_existential(f.children[0], rule);
        default:
            rule = "coherent formulas are built from atoms with /\\, \\/, exists (found " +
                   print_formula(f) + ")";
            return false;
    }
}

bool cartesian_axiom(const Formula& f, std::string& rule) {
    const Formula* body = &f;
    while (body->kind == Formula::Kind::Forall) body = &body->children[0];
    const Formula* conclusion = body;
    if (body->kind == Formula::Kind::Implies) {
        if (!is_eq_conjunction(body->children[0], rule)) return false;
        conclusion = &body->children[1];
    }
    if (conclusion->kind == Formula::Kind::ExistsUnique)
        return is_eq_conjunction(conclusion->children[0], rule);
    return is_eq_conjunction(*conclusion, rule);
}

bool coherent_axiom(const Formula& f, std::string& rule) {
    const Formula* body = &f;
    while (body->kind == Formula::Kind::Forall) body = &body->children[0];
    if (body->kind == Formula::Kind::Implies)
        return is_positive_existential(body->children[0], rule) &&
               is_positive_existential(body->children[1], rule);
    return is_positive_existential(*body, rule);
}

}  // namespace

FragmentReport check_fragment(const Theory& t, const std::string& fragment) {
    FragmentReport rep;
    if (fragment == "general") return rep;
    if (fragment == "cartesian" && !t.lang.relations.empty()) {
        rep.ok = false;
        rep.axiom = "(language)";
        rep.rule = "cartesian languages have no relation symbols other than equality";
        return rep;
    }
    for (const Formula& a : t.axioms) {
        std::string rule;
        bool ok = fragment == "cartesian" ? cartesian_axiom(a, rule)
                  : fragment == "coherent"
                      ? coherent_axiom(a, rule)
                      : throw InvariantError("unknown fragment '" + fragment + "'");
        if (!ok) {
            rep.ok = false;
            rep.axiom = print_formula(a);
            rep.rule = rule;
            return rep;
        }
    }
    return rep;
}

}  // namespace sheafsmith::logic
