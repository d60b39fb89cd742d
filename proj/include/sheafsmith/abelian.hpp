#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sheafsmith/config.hpp"

namespace sheafsmith::abelian {

using Int = mpz_class;

struct IntMat {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> data;  // row-major

    IntMat() = default;
    IntMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Int(0)) {}
    static IntMat identity(std::size_t n);

    Int& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const Int& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    bool operator==(const IntMat&) const = default;

    IntMat operator*(const IntMat& o) const;
    IntMat operator+(const IntMat& o) const;
    IntMat operator-(const IntMat& o) const;
    IntMat hstack(const IntMat& o) const;  // side by side (same rows)
    IntMat col(std::size_t c) const;
    std::string to_string() const;
};

IntMat from_rows(const std::vector<std::vector<long>>& rows);

// determinant by fraction-free (Bareiss) elimination
Int det(const IntMat& m);

// u * m * v = d with d diagonal, nonneg, divisibility chain; u, v unimodular
struct SnfResult {
    IntMat u, d, v;
    std::vector<Int> divisors() const;  // nonzero diagonal entries in order
};
SnfResult snf(const IntMat& m);

// integer solutions of a x = b; nullopt when infeasible
std::optional<std::vector<Int>> solve_linear(const IntMat& a, const std::vector<Int>& b);
// columns form a basis of the integer kernel lattice of a
IntMat kernel_basis(const IntMat& a);
// does b lie in the column lattice of a?
bool in_column_lattice(const IntMat& a, const std::vector<Int>& b);

// ---------------------------------------------------------------------------
// Bounded chain complexes of finitely presented abelian groups

// degree n carries Z^{rank[n]} / im(rels[n]); differentials act on
// generators and must respect presentations with d∘d = 0 mod relations.
struct ChainComplex {
    std::string name;
    int lo = 0;
    int hi = -1;  // empty complex when hi < lo
    std::vector<long> free_rank;  // indexed n - lo
    std::vector<IntMat> rels;     // rels[n-lo]: free_rank[n] rows
    std::vector<IntMat> diffs;    // diffs[n-lo]: d_n : C_n -> C_{n-1} (undefined at n = lo)

    long rank_at(int n) const;
    IntMat rels_at(int n) const;
    IntMat diff_at(int n) const;  // zero matrix outside the range
};

std::optional<std::string> check_complex(const ChainComplex& x);
ChainComplex make_complex(ChainComplex raw);

struct ChainMap {
    std::string name;
    ChainComplex dom, cod;
    std::map<int, IntMat> comps;  // degree -> matrix on generators

    IntMat at(int n) const;  // zero outside
};

std::optional<std::string> check_chain_map(const ChainMap& f);
ChainMap make_chain_map(ChainMap raw);

ChainMap identity_chain_map(const ChainComplex& x);
ChainMap zero_chain_map(const ChainComplex& dom, const ChainComplex& cod);
ChainMap compose_chain_maps(const ChainMap& g, const ChainMap& f);
bool same_chain_map(const ChainMap& a, const ChainMap& b);  // equality mod relations
std::string serialize_complex(const ChainComplex& x);
std::string serialize_chain_map(const ChainMap& f);

// ---------------------------------------------------------------------------
// Homology

struct Homology {
    std::vector<Int> torsion;  // elementary divisors > 1, ascending
    long free_rank = 0;
    bool trivial() const { return torsion.empty() && free_rank == 0; }
    bool operator==(const Homology&) const = default;
};

Homology homology(const ChainComplex& x, int n);

// induced map on H_n is onto; with equal invariants this makes it an
// isomorphism (finitely generated abelian groups are Hopfian)
bool homology_map_iso(const ChainMap& f, int n);
bool quasi_iso(const ChainMap& f);

// mapping cone and the acyclicity route (the independent oracle for
// quasi_iso: f is a quasi-isomorphism iff cone(f) is acyclic)
ChainComplex mapping_cone(const ChainMap& f);
bool acyclic(const ChainComplex& x);

// ---------------------------------------------------------------------------
// Spheres, discs, generators

ChainComplex zero_complex(int lo, int hi);
ChainComplex sphere(int n);            // Z in degree n
ChainComplex disc(int n, int lo);      // Z = Z in degrees n, n-1 (clipped at lo)

struct ChainGenerators {
    std::vector<std::string> names;
    std::vector<ChainMap> maps;
};
// 0 -> D^n for lo <= n <= hi and S^{n-1} -> D^n for lo < n <= hi
ChainGenerators disc_sphere_gens(int lo, int hi);

// ---------------------------------------------------------------------------
// Lifting by solving linear Diophantine systems

struct ChainSquare {
    ChainMap i, p, top, bottom;  // p∘top = bottom∘i required
};

// a diagonal l with l∘i = top, p∘l = bottom, found by one integer solve
std::optional<ChainMap> chain_lift(const ChainSquare& sq);

// generating set of the abelian group of commutative squares from i to p
std::vector<std::pair<ChainMap, ChainMap>> chain_square_basis(const ChainMap& i,
                                                              const ChainMap& p,
                                                              const Config& cfg = {});

// pushout of top : A -> X along i : A -> B, with the corner map to Y
// induced by (bottom, m) when building one small-object step
struct ChainPushout {
    ChainComplex obj;
    ChainMap from_x;  // X -> obj
    ChainMap from_b;  // B -> obj
};
ChainPushout chain_pushout(const ChainMap& i, const ChainMap& top);

}  // namespace sheafsmith::abelian
