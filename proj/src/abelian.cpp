#include "sheafsmith/abelian.hpp"

#include <algorithm>
#include <sstream>

namespace sheafsmith::abelian {

IntMat IntMat::identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMat IntMat::operator*(const IntMat& o) const {
    if (cols != o.rows) throw InvariantError("IntMat: shape mismatch in product");
    IntMat r(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) {
            const Int& a = at(i, k);
            if (a == 0) continue;
            for (std::size_t j = 0; j < o.cols; ++j) r.at(i, j) += a * o.at(k, j);
        }
    return r;
}

IntMat IntMat::operator+(const IntMat& o) const {
    if (rows != o.rows || cols != o.cols) throw InvariantError("IntMat: shape mismatch in sum");
    IntMat r(rows, cols);
    for (std::size_t i = 0; i < data.size(); ++i) r.data[i] = data[i] + o.data[i];
    return r;
}

IntMat IntMat::operator-(const IntMat& o) const {
    if (rows != o.rows || cols != o.cols)
        throw InvariantError("IntMat: shape mismatch in difference");
    IntMat r(rows, cols);
    for (std::size_t i = 0; i < data.size(); ++i) r.data[i] = data[i] - o.data[i];
    return r;
}

IntMat IntMat::hstack(const IntMat& o) const {
    if (rows != o.rows) throw InvariantError("IntMat: hstack row mismatch");
    IntMat r(rows, cols + o.cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) r.at(i, j) = at(i, j);
        for (std::size_t j = 0; j < o.cols; ++j) r.at(i, cols + j) = o.at(i, j);
    }
    return r;
}

IntMat IntMat::col(std::size_t c) const {
    IntMat r(rows, 1);
    for (std::size_t i = 0; i < rows; ++i) r.at(i, 0) = at(i, c);
    return r;
}

std::string IntMat::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows; ++i) {
        if (i) os << ";";
        for (std::size_t j = 0; j < cols; ++j) {
            if (j) os << ",";
            os << at(i, j).get_str();
        }
    }
    os << "]";
    return os.str();
}

IntMat from_rows(const std::vector<std::vector<long>>& rows) {
    IntMat m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) throw InvariantError("from_rows: ragged rows");
        for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = Int(rows[i][j]);
    }
    return m;
}

Int det(const IntMat& m) {
    if (m.rows != m.cols) throw InvariantError("det: matrix not square");
    std::size_t n = m.rows;
    if (n == 0) return 1;
    IntMat a = m;
    Int prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a.at(swap, k) == 0) ++swap;
            if (swap == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(swap, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
        prev = a.at(k, k);
    }
    return sign > 0 ? a.at(n - 1, n - 1) : -a.at(n - 1, n - 1);
}

std::vector<Int> SnfResult::divisors() const {
    std::vector<Int> out;
    for (std::size_t i = 0; i < std::min(d.rows, d.cols); ++i)
        if (d.at(i, i) != 0) out.push_back(d.at(i, i));
    return out;
}

SnfResult snf(const IntMat& m) {
    SnfResult r{IntMat::identity(m.rows), m, IntMat::identity(m.cols)};
    IntMat& d = r.d;
    IntMat& u = r.u;
    IntMat& v = r.v;
    std::size_t n = std::min(m.rows, m.cols);

    auto swap_rows = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < d.cols; ++j) std::swap(d.at(a, j), d.at(b, j));
        for (std::size_t j = 0; j < u.cols; ++j) std::swap(u.at(a, j), u.at(b, j));
    };
    auto swap_cols = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < d.rows; ++i) std::swap(d.at(i, a), d.at(i, b));
        for (std::size_t i = 0; i < v.rows; ++i) std::swap(v.at(i, a), v.at(i, b));
    };
    auto add_row = [&](std::size_t dst, std::size_t src, const Int& k) {
        for (std::size_t j = 0; j < d.cols; ++j) d.at(dst, j) += k * d.at(src, j);
        for (std::size_t j = 0; j < u.cols; ++j) u.at(dst, j) += k * u.at(src, j);
    };
    auto add_col = [&](std::size_t dst, std::size_t src, const Int& k) {
        for (std::size_t i = 0; i < d.rows; ++i) d.at(i, dst) += k * d.at(i, src);
        for (std::size_t i = 0; i < v.rows; ++i) v.at(i, dst) += k * v.at(i, src);
    };
    auto negate_row = [&](std::size_t a) {
        for (std::size_t j = 0; j < d.cols; ++j) d.at(a, j) = -d.at(a, j);
        for (std::size_t j = 0; j < u.cols; ++j) u.at(a, j) = -u.at(a, j);
    };

    for (std::size_t s = 0; s < n; ++s) {
        for (;;) {
            // smallest nonzero |entry| in the lower-right block to (s, s)
            std::size_t pr = s, pc = s;
            Int best(0);
            for (std::size_t i = s; i < d.rows; ++i)
                for (std::size_t j = s; j < d.cols; ++j) {
                    if (d.at(i, j) == 0) continue;
                    Int a = abs(d.at(i, j));
                    if (best == 0 || a < best) {
                        best = a;
                        pr = i;
                        pc = j;
                    }
                }
            if (best == 0) break;  // block is zero
            swap_rows(s, pr);
            swap_cols(s, pc);
            bool reduced = true;
            for (std::size_t i = s + 1; i < d.rows; ++i)
                if (d.at(i, s) != 0) {
                    add_row(i, s, -(d.at(i, s) / d.at(s, s)));
                    if (d.at(i, s) != 0) reduced = false;
                }
            for (std::size_t j = s + 1; j < d.cols; ++j)
                if (d.at(s, j) != 0) {
                    add_col(j, s, -(d.at(s, j) / d.at(s, s)));
                    if (d.at(s, j) != 0) reduced = false;
                }
            if (!reduced) continue;
            bool lone = true;
            for (std::size_t i = s + 1; i < d.rows && lone; ++i)
                if (d.at(i, s) != 0) lone = false;
            for (std::size_t j = s + 1; j < d.cols && lone; ++j)
                if (d.at(s, j) != 0) lone = false;
            if (!lone) continue;
            // enforce divisibility into the remaining block
            bool divides = true;
            for (std::size_t i = s + 1; i < d.rows && divides; ++i)
                for (std::size_t j = s + 1; j < d.cols && divides; ++j)
                    if (d.at(i, j) % d.at(s, s) != 0) {
                        add_row(s, i, Int(1));
                        divides = false;
                    }
            if (divides) break;
        }
        if (d.at(s, s) < 0) negate_row(s);
    }
    // internal consistency: u m v = d and unimodularity
    if (!(u * m * v == d)) throw InvariantError("snf: decomposition check failed");
    Int du = abs(det(u)), dv = abs(det(v));
    if (du != 1 || dv != 1) throw InvariantError("snf: transforms are not unimodular");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d.at(i + 1, i + 1) != 0 && d.at(i, i) == 0)
            throw InvariantError("snf: zero before nonzero on the diagonal");
        if (d.at(i, i) != 0 && d.at(i + 1, i + 1) % d.at(i, i) != 0)
            throw InvariantError("snf: divisibility chain broken");
    }
    return r;
}

std::optional<std::vector<Int>> solve_linear(const IntMat& a, const std::vector<Int>& b) {
    if (b.size() != a.rows) throw InvariantError("solve_linear: rhs size mismatch");
    SnfResult s = snf(a);
    // a x = b  <=>  d y = u b with x = v y
    std::vector<Int> ub(a.rows, Int(0));
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.rows; ++j) ub[i] += s.u.at(i, j) * b[j];
    std::vector<Int> y(a.cols, Int(0));
    std::size_t n = std::min(a.rows, a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (i < n && s.d.at(i, i) != 0) {
            if (ub[i] % s.d.at(i, i) != 0) return std::nullopt;
            y[i] = ub[i] / s.d.at(i, i);
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Int> x(a.cols, Int(0));
    for (std::size_t i = 0; i < a.cols; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) x[i] += s.v.at(i, j) * y[j];
    return x;
}

IntMat kernel_basis(const IntMat& a) {
    SnfResult s = snf(a);
    std::size_t n = std::min(a.rows, a.cols);
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < a.cols; ++j)
        if (j >= n || s.d.at(j, j) == 0) free_cols.push_back(j);
    IntMat k(a.cols, free_cols.size());
    for (std::size_t idx = 0; idx < free_cols.size(); ++idx)
        for (std::size_t i = 0; i < a.cols; ++i) k.at(i, idx) = s.v.at(i, free_cols[idx]);
    return k;
}

bool in_column_lattice(const IntMat& a, const std::vector<Int>& b) {
    return solve_linear(a, b).has_value();
}

// ---------------------------------------------------------------------------
// Chain complexes

long ChainComplex::rank_at(int n) const {
    if (n < lo || n > hi) return 0;
    return free_rank[n - lo];
}

IntMat ChainComplex::rels_at(int n) const {
    if (n < lo || n > hi) return IntMat(0, 0);
    return rels[n - lo];
}

IntMat ChainComplex::diff_at(int n) const {
    if (n <= lo || n > hi) return IntMat(static_cast<std::size_t>(rank_at(n - 1)),
                                         static_cast<std::size_t>(rank_at(n)));
    return diffs[n - lo];
}

std::optional<std::string> check_complex(const ChainComplex& x) {
    if (x.hi < x.lo) return std::nullopt;  // empty complex
    std::size_t len = static_cast<std::size_t>(x.hi - x.lo + 1);
    if (x.free_rank.size() != len || x.rels.size() != len || x.diffs.size() != len)
        return "degree arrays do not match the range";
    for (std::size_t i = 0; i < len; ++i) {
        if (x.free_rank[i] < 0) return "negative rank";
        if (x.rels[i].rows != static_cast<std::size_t>(x.free_rank[i]))
            return "relation matrix shape at degree " + std::to_string(x.lo + (int)i);
    }
    for (int n = x.lo + 1; n <= x.hi; ++n) {
        const IntMat& d = x.diffs[n - x.lo];
        if (d.rows != static_cast<std::size_t>(x.rank_at(n - 1)) ||
            d.cols != static_cast<std::size_t>(x.rank_at(n)))
            return "differential shape at degree " + std::to_string(n);
        // differentials respect presentations
        IntMat dr = d * x.rels_at(n);
        for (std::size_t c = 0; c < dr.cols; ++c) {
            std::vector<Int> colv(dr.rows);
            for (std::size_t i = 0; i < dr.rows; ++i) colv[i] = dr.at(i, c);
            if (!in_column_lattice(x.rels_at(n - 1), colv))
                return "differential does not respect relations at degree " + std::to_string(n);
        }
    }
    for (int n = x.lo + 2; n <= x.hi; ++n) {
        IntMat dd = x.diff_at(n - 1) * x.diff_at(n);
        for (std::size_t c = 0; c < dd.cols; ++c) {
            std::vector<Int> colv(dd.rows);
            for (std::size_t i = 0; i < dd.rows; ++i) colv[i] = dd.at(i, c);
            if (!in_column_lattice(x.rels_at(n - 2), colv))
                return "d∘d is not zero at degree " + std::to_string(n);
        }
    }
    return std::nullopt;
}

ChainComplex make_complex(ChainComplex raw) {
    if (auto issue = check_complex(raw))
        throw InvariantError("complex " + raw.name + ": " + *issue);
    return raw;
}

IntMat ChainMap::at(int n) const {
    auto it = comps.find(n);
    if (it != comps.end()) return it->second;
    return IntMat(static_cast<std::size_t>(cod.rank_at(n)),
                  static_cast<std::size_t>(dom.rank_at(n)));
}

namespace {

bool congruent_zero(const ChainComplex& cod, int n, const IntMat& m) {
    for (std::size_t c = 0; c < m.cols; ++c) {
        std::vector<Int> colv(m.rows);
        bool zero = true;
        for (std::size_t i = 0; i < m.rows; ++i) {
            colv[i] = m.at(i, c);
            if (colv[i] != 0) zero = false;
        }
        if (zero) continue;
        if (!in_column_lattice(cod.rels_at(n), colv)) return false;
    }
    return true;
}

}  // namespace

std::optional<std::string> check_chain_map(const ChainMap& f) {
    for (const auto& [n, m] : f.comps) {
        if (m.rows != static_cast<std::size_t>(f.cod.rank_at(n)) ||
            m.cols != static_cast<std::size_t>(f.dom.rank_at(n)))
            return "component shape at degree " + std::to_string(n);
    }
    int lo = std::min(f.dom.lo, f.cod.lo);
    int hi = std::max(f.dom.hi, f.cod.hi);
    for (int n = lo; n <= hi; ++n) {
        // well defined on presented groups
        if (!congruent_zero(f.cod, n, f.at(n) * f.dom.rels_at(n)))
            return "component at degree " + std::to_string(n) + " ignores relations";
        // commutes with differentials
        if (n > lo) {
            IntMat lhs = f.cod.diff_at(n) * f.at(n);
            IntMat rhs = f.at(n - 1) * f.dom.diff_at(n);
            if (!congruent_zero(f.cod, n - 1, lhs - rhs))
                return "does not commute with d at degree " + std::to_string(n);
        }
    }
    return std::nullopt;
}

ChainMap make_chain_map(ChainMap raw) {
    if (auto issue = check_chain_map(raw))
        throw InvariantError("chain map " + raw.name + ": " + *issue);
    return raw;
}

ChainMap identity_chain_map(const ChainComplex& x) {
    ChainMap f;
    f.name = "id";
    f.dom = x;
    f.cod = x;
    for (int n = x.lo; n <= x.hi; ++n)
        f.comps[n] = IntMat::identity(static_cast<std::size_t>(x.rank_at(n)));
    return f;
}

ChainMap zero_chain_map(const ChainComplex& dom, const ChainComplex& cod) {
    ChainMap f;
    f.name = "0";
    f.dom = dom;
    f.cod = cod;
    return f;
}

ChainMap compose_chain_maps(const ChainMap& g, const ChainMap& f) {
    ChainMap h;
    h.name = g.name + "." + f.name;
    h.dom = f.dom;
    h.cod = g.cod;
    int lo = f.dom.lo, hi = f.dom.hi;
    for (int n = lo; n <= hi; ++n) h.comps[n] = g.at(n) * f.at(n);
    return h;
}

bool same_chain_map(const ChainMap& a, const ChainMap& b) {
    int lo = std::min({a.dom.lo, a.cod.lo, b.dom.lo, b.cod.lo});
    int hi = std::max({a.dom.hi, a.cod.hi, b.dom.hi, b.cod.hi});
    if (a.dom.free_rank != b.dom.free_rank || a.cod.free_rank != b.cod.free_rank) return false;
    for (int n = lo; n <= hi; ++n) {
        IntMat am = a.at(n), bm = b.at(n);
        if (am.rows != bm.rows || am.cols != bm.cols) return false;
        if (!congruent_zero(a.cod, n, am - bm)) return false;
    }
    return true;
}

std::string serialize_complex(const ChainComplex& x) {
    std::ostringstream os;
    os << "range " << x.lo << ".." << x.hi << ";";
    for (int n = x.lo; n <= x.hi; ++n) {
        os << "deg " << n << " free " << x.rank_at(n) << " rel " << x.rels_at(n).to_string() << ";";
        if (n > x.lo) os << "d " << n << " " << x.diff_at(n).to_string() << ";";
    }
    return os.str();
}

std::string serialize_chain_map(const ChainMap& f) {
    std::ostringstream os;
    os << "{dom=" << serialize_complex(f.dom) << " cod=" << serialize_complex(f.cod);
    int lo = std::min(f.dom.lo, f.cod.lo), hi = std::max(f.dom.hi, f.cod.hi);
    for (int n = lo; n <= hi; ++n) os << " @" << n << ":" << f.at(n).to_string();
    os << "}";
    return os.str();
}

// ---------------------------------------------------------------------------
// Homology

namespace {

struct PresentedHomology {
    IntMat gens;  // columns generate L = preimage of im(rels_{n-1}) under d_n
    IntMat rels;  // relations among those generators
    Homology invariants;
};

PresentedHomology presented_homology(const ChainComplex& x, int n) {
    std::size_t rank = static_cast<std::size_t>(x.rank_at(n));
    IntMat dn = x.diff_at(n);
    IntMat rprev = x.rels_at(n - 1);
    // L = { v : dn v in im(rprev) } as the projection of a kernel
    IntMat block = dn.hstack(rprev);  // [dn | rprev], kernel pairs (v, -w)
    IntMat ker = kernel_basis(block);
    IntMat gens(rank, ker.cols);
    for (std::size_t j = 0; j < ker.cols; ++j)
        for (std::size_t i = 0; i < rank; ++i) gens.at(i, j) = ker.at(i, j);

    // relations: boundaries, the degree-n relations, and syzygies of gens
    IntMat bound = x.diff_at(n + 1).hstack(x.rels_at(n));
    IntMat rel_coords(ker.cols, 0);
    for (std::size_t c = 0; c < bound.cols; ++c) {
        std::vector<Int> colv(rank);
        for (std::size_t i = 0; i < rank; ++i) colv[i] = bound.at(i, c);
        auto z = solve_linear(gens, colv);
        if (!z) throw InvariantError("homology: boundary not in the cycle lattice");
        IntMat zc(ker.cols, 1);
        for (std::size_t i = 0; i < ker.cols; ++i) zc.at(i, 0) = (*z)[i];
        rel_coords = rel_coords.hstack(zc);
    }
    rel_coords = rel_coords.hstack(kernel_basis(gens));

    PresentedHomology out;
    out.gens = gens;
    out.rels = rel_coords;
    SnfResult s = snf(rel_coords);
    std::vector<Int> divs = s.divisors();
    out.invariants.free_rank = static_cast<long>(ker.cols - divs.size());
    for (const Int& d : divs)
        if (d != 1) out.invariants.torsion.push_back(d);
    return out;
}

}  // namespace

Homology homology(const ChainComplex& x, int n) {
    if (n < x.lo || n > x.hi) return Homology{};
    return presented_homology(x, n).invariants;
}

bool homology_map_iso(const ChainMap& f, int n) {
    PresentedHomology hx = presented_homology(f.dom, n);
    PresentedHomology hy = presented_homology(f.cod, n);
    if (!(hx.invariants == hy.invariants)) return false;
    // express the images of the domain cycle generators in the codomain
    IntMat fmat = f.at(n);
    IntMat phi(hy.gens.cols, hx.gens.cols);
    for (std::size_t j = 0; j < hx.gens.cols; ++j) {
        IntMat img = fmat * hx.gens.col(j);
        std::vector<Int> colv(img.rows);
        for (std::size_t i = 0; i < img.rows; ++i) colv[i] = img.at(i, 0);
        auto z = solve_linear(hy.gens, colv);
        if (!z) return false;  // image not even a cycle class
        for (std::size_t i = 0; i < hy.gens.cols; ++i) phi.at(i, j) = (*z)[i];
    }
    // onto + equal invariants => iso (f.g. abelian groups are Hopfian)
    IntMat coker = phi.hstack(hy.rels);
    SnfResult s = snf(coker);
    std::vector<Int> divs = s.divisors();
    if (divs.size() != hy.gens.cols) return false;
    for (const Int& d : divs)
        if (d != 1) return false;
    return true;
}

bool quasi_iso(const ChainMap& f) {
    int lo = std::min(f.dom.lo, f.cod.lo) - 1;
    int hi = std::max(f.dom.hi, f.cod.hi) + 1;
    for (int n = lo; n <= hi; ++n)
        if (!homology_map_iso(f, n)) return false;
    return true;
}

ChainComplex mapping_cone(const ChainMap& f) {
    const ChainComplex& x = f.dom;
    const ChainComplex& y = f.cod;
    ChainComplex c;
    c.name = "cone(" + f.name + ")";
    c.lo = std::min(y.lo, x.lo + 1);
    c.hi = std::max(y.hi, x.hi + 1);
    if (x.hi < x.lo && y.hi < y.lo) {
        c.lo = 0;
        c.hi = -1;
        return c;
    }
    for (int n = c.lo; n <= c.hi; ++n) {
        long rx = x.rank_at(n - 1), ry = y.rank_at(n);
        c.free_rank.push_back(rx + ry);
        IntMat rel(static_cast<std::size_t>(rx + ry),
                   x.rels_at(n - 1).cols + y.rels_at(n).cols);
        IntMat rxm = x.rels_at(n - 1), rym = y.rels_at(n);
        for (std::size_t i = 0; i < rxm.rows; ++i)
            for (std::size_t j = 0; j < rxm.cols; ++j) rel.at(i, j) = rxm.at(i, j);
        for (std::size_t i = 0; i < rym.rows; ++i)
            for (std::size_t j = 0; j < rym.cols; ++j)
                rel.at(rx + i, rxm.cols + j) = rym.at(i, j);
        c.rels.push_back(std::move(rel));
        // d(x, y) = (-dx, f x + dy)
        long rx1 = x.rank_at(n - 2), ry1 = y.rank_at(n - 1);
        IntMat d(static_cast<std::size_t>(rx1 + ry1), static_cast<std::size_t>(rx + ry));
        IntMat dx = x.diff_at(n - 1), dy = y.diff_at(n), fm = f.at(n - 1);
        for (std::size_t i = 0; i < dx.rows; ++i)
            for (std::size_t j = 0; j < dx.cols; ++j) d.at(i, j) = -dx.at(i, j);
        for (std::size_t i = 0; i < fm.rows; ++i)
            for (std::size_t j = 0; j < fm.cols; ++j) d.at(rx1 + i, j) = fm.at(i, j);
        for (std::size_t i = 0; i < dy.rows; ++i)
            for (std::size_t j = 0; j < dy.cols; ++j) d.at(rx1 + i, rx + j) = dy.at(i, j);
        c.diffs.push_back(std::move(d));
    }
    return make_complex(std::move(c));
}

bool acyclic(const ChainComplex& x) {
    for (int n = x.lo; n <= x.hi; ++n)
        if (!homology(x, n).trivial()) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Spheres and discs

ChainComplex zero_complex(int lo, int hi) {
    ChainComplex c;
    c.name = "0";
    c.lo = lo;
    c.hi = hi;
    for (int n = lo; n <= hi; ++n) {
        c.free_rank.push_back(0);
        c.rels.push_back(IntMat(0, 0));
        c.diffs.push_back(IntMat(0, 0));
    }
    return make_complex(std::move(c));
}

ChainComplex sphere(int n) {
    ChainComplex c;
    c.name = "S" + std::to_string(n);
    c.lo = n;
    c.hi = n;
    c.free_rank = {1};
    c.rels = {IntMat(1, 0)};
    c.diffs = {IntMat(0, 0)};
    return make_complex(std::move(c));
}

ChainComplex disc(int n, int lo) {
    ChainComplex c;
    c.name = "D" + std::to_string(n);
    if (n - 1 < lo) {
        c.lo = n;
        c.hi = n;
        c.free_rank = {1};
        c.rels = {IntMat(1, 0)};
        c.diffs = {IntMat(0, 0)};
        return make_complex(std::move(c));
    }
    c.lo = n - 1;
    c.hi = n;
    c.free_rank = {1, 1};
    c.rels = {IntMat(1, 0), IntMat(1, 0)};
    c.diffs = {IntMat(0, 0), IntMat::identity(1)};
    return make_complex(std::move(c));
}

ChainGenerators disc_sphere_gens(int lo, int hi) {
    ChainGenerators out;
    for (int n = lo; n <= hi; ++n) {
        ChainMap z = zero_chain_map(zero_complex(n, n), disc(n, lo));
        z.name = "0->D" + std::to_string(n);
        out.names.push_back(z.name);
        out.maps.push_back(make_chain_map(std::move(z)));
    }
    for (int n = lo + 1; n <= hi; ++n) {
        ChainMap inc;
        inc.name = "S" + std::to_string(n - 1) + ">D" + std::to_string(n);
        inc.dom = sphere(n - 1);
        inc.cod = disc(n, lo);
        inc.comps[n - 1] = IntMat::identity(1);
        out.names.push_back(inc.name);
        out.maps.push_back(make_chain_map(std::move(inc)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lifting as a linear Diophantine system

namespace {

struct LinSys {
    long nvars = 0;
    std::vector<std::map<long, Int>> rows;
    std::vector<Int> rhs;

    long fresh(long count) {
        long base = nvars;
        nvars += count;
        return base;
    }
    void add_row(std::map<long, Int> coeffs, Int b) {
        rows.push_back(std::move(coeffs));
        rhs.push_back(std::move(b));
    }
    std::optional<std::vector<Int>> solve() const {
        IntMat a(rows.size(), static_cast<std::size_t>(nvars));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (const auto& [j, c] : rows[i]) a.at(i, static_cast<std::size_t>(j)) = c;
        return solve_linear(a, rhs);
    }
    IntMat homogeneous_kernel() const {
        IntMat a(rows.size(), static_cast<std::size_t>(nvars));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (const auto& [j, c] : rows[i]) a.at(i, static_cast<std::size_t>(j)) = c;
        return kernel_basis(a);
    }
};

// index table for the entries of one unknown matrix per degree
struct MatVars {
    std::map<int, std::pair<long, std::pair<std::size_t, std::size_t>>> idx;
    long var(int n, std::size_t r, std::size_t c) const {
        const auto& [base, shape] = idx.at(n);
        return base + static_cast<long>(r * shape.second + c);
    }
    bool has(int n) const { return idx.count(n) > 0; }
    std::pair<std::size_t, std::size_t> shape(int n) const { return idx.at(n).second; }
};

MatVars alloc_map_vars(LinSys& sys, const ChainComplex& dom, const ChainComplex& cod) {
    MatVars v;
    for (int n = std::max(dom.lo, cod.lo); n <= std::min(dom.hi, cod.hi); ++n) {
        std::size_t r = static_cast<std::size_t>(cod.rank_at(n));
        std::size_t c = static_cast<std::size_t>(dom.rank_at(n));
        if (r == 0 || c == 0) continue;
        long base = sys.fresh(static_cast<long>(r * c));
        v.idx[n] = {base, {r, c}};
    }
    return v;
}

// adds rows for: (sum of terms) + rels * aux = rhs, one equation per entry.
// each term is coeffmat_left * unknown * coeffmat_right with sign.
struct Term {
    const MatVars* vars;
    int degree;
    IntMat left;   // rows x (unknown rows)
    IntMat right;  // (unknown cols) x cols
    int sign = 1;
};

void add_matrix_equation(LinSys& sys, std::size_t rows, std::size_t cols,
                         const std::vector<Term>& terms, const IntMat& rels,
                         const IntMat& rhs) {
    // aux variables: one column of coefficients per relation column and
    // output column
    long aux_base = rels.cols ? sys.fresh(static_cast<long>(rels.cols * cols)) : 0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            std::map<long, Int> coeffs;
            for (const Term& t : terms) {
                if (!t.vars->has(t.degree)) continue;
                auto [ur, uc] = t.vars->shape(t.degree);
                for (std::size_t i = 0; i < ur; ++i) {
                    if (t.left.at(r, i) == 0) continue;
                    for (std::size_t j = 0; j < uc; ++j) {
                        if (t.right.at(j, c) == 0) continue;
                        coeffs[t.vars->var(t.degree, i, j)] +=
                            Int(t.sign) * t.left.at(r, i) * t.right.at(j, c);
                    }
                }
            }
            for (std::size_t k = 0; k < rels.cols; ++k)
                if (rels.at(r, k) != 0)
                    coeffs[aux_base + static_cast<long>(k * cols + c)] += rels.at(r, k);
            sys.add_row(std::move(coeffs), rhs.rows ? rhs.at(r, c) : Int(0));
        }
}

// shared constraint blocks for an unknown chain map dom -> cod
void add_chain_map_constraints(LinSys& sys, const MatVars& vars, const ChainComplex& dom,
                               const ChainComplex& cod) {
    int lo = std::min(dom.lo, cod.lo), hi = std::max(dom.hi, cod.hi);
    for (int n = lo; n <= hi; ++n) {
        std::size_t rr = static_cast<std::size_t>(cod.rank_at(n));
        // well-definedness: l_n * rels_dom(n) ≡ 0
        IntMat rd = dom.rels_at(n);
        if (rr && rd.cols)
            add_matrix_equation(sys, rr, rd.cols,
                                {{&vars, n, IntMat::identity(rr), rd, 1}}, cod.rels_at(n),
                                IntMat(0, 0));
        // chain condition: d_cod l_n - l_{n-1} d_dom ≡ 0
        std::size_t r1 = static_cast<std::size_t>(cod.rank_at(n - 1));
        std::size_t c1 = static_cast<std::size_t>(dom.rank_at(n));
        if (r1 && c1) {
            std::size_t rn = static_cast<std::size_t>(dom.rank_at(n));
            add_matrix_equation(
                sys, r1, c1,
                {{&vars, n, cod.diff_at(n), IntMat::identity(rn), 1},
                 {&vars, n - 1, IntMat::identity(r1), dom.diff_at(n), -1}},
                cod.rels_at(n - 1), IntMat(0, 0));
        }
    }
}

ChainMap extract_map(const MatVars& vars, const std::vector<Int>& sol, const ChainComplex& dom,
                     const ChainComplex& cod, const std::string& name) {
    ChainMap f;
    f.name = name;
    f.dom = dom;
    f.cod = cod;
    for (const auto& [n, info] : vars.idx) {
        auto [r, c] = info.second;
        IntMat m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                m.at(i, j) = sol[static_cast<std::size_t>(vars.var(n, i, j))];
        f.comps[n] = std::move(m);
    }
    return f;
}

}  // namespace

std::optional<ChainMap> chain_lift(const ChainSquare& sq) {
    const ChainComplex& B = sq.i.cod;
    const ChainComplex& X = sq.p.dom;
    LinSys sys;
    MatVars l = alloc_map_vars(sys, B, X);
    add_chain_map_constraints(sys, l, B, X);
    int lo = std::min(B.lo, X.lo), hi = std::max(B.hi, X.hi);
    for (int n = lo; n <= hi; ++n) {
        // l ∘ i = top (mod X relations)
        std::size_t rx = static_cast<std::size_t>(X.rank_at(n));
        std::size_t ca = static_cast<std::size_t>(sq.i.dom.rank_at(n));
        if (rx && ca)
            add_matrix_equation(sys, rx, ca, {{&l, n, IntMat::identity(rx), sq.i.at(n), 1}},
                                X.rels_at(n), sq.top.at(n));
        // p ∘ l = bottom (mod Y relations)
        std::size_t ry = static_cast<std::size_t>(sq.p.cod.rank_at(n));
        std::size_t cb = static_cast<std::size_t>(B.rank_at(n));
        if (ry && cb) {
            std::size_t rxn = static_cast<std::size_t>(X.rank_at(n));
            if (rxn)
                add_matrix_equation(sys, ry, cb,
                                    {{&l, n, sq.p.at(n), IntMat::identity(cb), 1}},
                                    sq.p.cod.rels_at(n), sq.bottom.at(n));
            else {
                // no room for a lift at this degree: bottom must vanish
                IntMat bm = sq.bottom.at(n);
                add_matrix_equation(sys, ry, cb, {}, sq.p.cod.rels_at(n), bm);
            }
        }
    }
    auto sol = sys.solve();
    if (!sol) return std::nullopt;
    ChainMap lift = extract_map(l, *sol, B, X, "lift");
    if (auto issue = check_chain_map(lift))
        throw InvariantError("chain_lift: produced an invalid map: " + *issue);
    return lift;
}

std::vector<std::pair<ChainMap, ChainMap>> chain_square_basis(const ChainMap& i,
                                                              const ChainMap& p,
                                                              const Config& cfg) {
    const ChainComplex& A = i.dom;
    const ChainComplex& B = i.cod;
    const ChainComplex& X = p.dom;
    const ChainComplex& Y = p.cod;
    LinSys sys;
    MatVars top = alloc_map_vars(sys, A, X);
    MatVars bottom = alloc_map_vars(sys, B, Y);
    add_chain_map_constraints(sys, top, A, X);
    add_chain_map_constraints(sys, bottom, B, Y);
    int lo = std::min({A.lo, B.lo, X.lo, Y.lo}), hi = std::max({A.hi, B.hi, X.hi, Y.hi});
    for (int n = lo; n <= hi; ++n) {
        std::size_t ry = static_cast<std::size_t>(Y.rank_at(n));
        std::size_t ca = static_cast<std::size_t>(A.rank_at(n));
        if (!ry || !ca) continue;
        std::size_t rx = static_cast<std::size_t>(X.rank_at(n));
        std::size_t cb = static_cast<std::size_t>(B.rank_at(n));
        std::vector<Term> terms;
        if (rx) terms.push_back({&top, n, p.at(n), IntMat::identity(ca), 1});
        if (cb) terms.push_back({&bottom, n, IntMat::identity(ry), i.at(n), -1});
        add_matrix_equation(sys, ry, ca, terms, Y.rels_at(n), IntMat(0, 0));
    }
    IntMat ker = sys.homogeneous_kernel();
    guard_size(static_cast<std::int64_t>(ker.cols), cfg, "chain_square_basis");
    std::vector<std::pair<ChainMap, ChainMap>> out;
    for (std::size_t j = 0; j < ker.cols; ++j) {
        std::vector<Int> sol(static_cast<std::size_t>(sys.nvars));
        for (std::size_t k = 0; k < sol.size(); ++k) sol[k] = ker.at(k, j);
        ChainMap t = extract_map(top, sol, A, X, "top" + std::to_string(j));
        ChainMap b = extract_map(bottom, sol, B, Y, "bottom" + std::to_string(j));
        // drop squares that are zero modulo relations
        if (same_chain_map(t, zero_chain_map(A, X)) && same_chain_map(b, zero_chain_map(B, Y)))
            continue;
        out.push_back({make_chain_map(std::move(t)), make_chain_map(std::move(b))});
    }
    return out;
}

ChainPushout chain_pushout(const ChainMap& i, const ChainMap& top) {
    const ChainComplex& A = i.dom;
    const ChainComplex& B = i.cod;
    const ChainComplex& X = top.cod;
    ChainPushout out;
    ChainComplex& p = out.obj;
    p.name = "po";
    p.lo = std::min(B.lo, X.lo);
    p.hi = std::max(B.hi, X.hi);
    if (p.hi < p.lo) {
        p = zero_complex(0, 0);
        out.from_x = identity_chain_map(p);
        out.from_b = identity_chain_map(p);
        return out;
    }
    for (int n = p.lo; n <= p.hi; ++n) {
        long rb = B.rank_at(n), rx = X.rank_at(n), ra = A.rank_at(n);
        p.free_rank.push_back(rb + rx);
        IntMat rbm = B.rels_at(n), rxm = X.rels_at(n);
        IntMat rel(static_cast<std::size_t>(rb + rx),
                   rbm.cols + rxm.cols + static_cast<std::size_t>(ra));
        for (std::size_t q = 0; q < rbm.rows; ++q)
            for (std::size_t j = 0; j < rbm.cols; ++j) rel.at(q, j) = rbm.at(q, j);
        for (std::size_t q = 0; q < rxm.rows; ++q)
            for (std::size_t j = 0; j < rxm.cols; ++j) rel.at(rb + q, rbm.cols + j) = rxm.at(q, j);
        // glue: i(a) = top(a) in the quotient
        IntMat im = i.at(n), tm = top.at(n);
        for (long a = 0; a < ra; ++a) {
            for (std::size_t q = 0; q < im.rows; ++q)
                rel.at(q, rbm.cols + rxm.cols + a) = im.at(q, static_cast<std::size_t>(a));
            for (std::size_t q = 0; q < tm.rows; ++q)
                rel.at(rb + q, rbm.cols + rxm.cols + a) = -tm.at(q, static_cast<std::size_t>(a));
        }
        p.rels.push_back(std::move(rel));
        // block differential
        long rb1 = B.rank_at(n - 1), rx1 = X.rank_at(n - 1);
        IntMat d(static_cast<std::size_t>(rb1 + rx1), static_cast<std::size_t>(rb + rx));
        IntMat db = B.diff_at(n), dx = X.diff_at(n);
        for (std::size_t q = 0; q < db.rows; ++q)
            for (std::size_t j = 0; j < db.cols; ++j) d.at(q, j) = db.at(q, j);
        for (std::size_t q = 0; q < dx.rows; ++q)
            for (std::size_t j = 0; j < dx.cols; ++j) d.at(rb1 + q, rb + j) = dx.at(q, j);
        p.diffs.push_back(std::move(d));
    }
    p = make_complex(std::move(p));
    ChainMap fx;
    fx.name = "po_x";
    fx.dom = X;
    fx.cod = p;
    ChainMap fb;
    fb.name = "po_b";
    fb.dom = B;
    fb.cod = p;
    for (int n = p.lo; n <= p.hi; ++n) {
        long rb = B.rank_at(n), rx = X.rank_at(n);
        IntMat mx(static_cast<std::size_t>(rb + rx), static_cast<std::size_t>(rx));
        for (long q = 0; q < rx; ++q)
            mx.at(static_cast<std::size_t>(rb + q), static_cast<std::size_t>(q)) = 1;
        fx.comps[n] = std::move(mx);
        IntMat mb(static_cast<std::size_t>(rb + rx), static_cast<std::size_t>(rb));
        for (long q = 0; q < rb; ++q)
            mb.at(static_cast<std::size_t>(q), static_cast<std::size_t>(q)) = 1;
        fb.comps[n] = std::move(mb);
    }
    out.from_x = make_chain_map(std::move(fx));
    out.from_b = make_chain_map(std::move(fb));
    return out;
}

}  // namespace sheafsmith::abelian
