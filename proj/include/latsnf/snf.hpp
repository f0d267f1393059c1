#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "latsnf/matrix.hpp"
#include "latsnf/qr.hpp"
#include "latsnf/rng.hpp"

namespace latsnf {

// Systematic-normal-form basis of a full-rank integer lattice: prime N in the
// corner, the remaining first-row entries b_2..b_n in [0, N), ones on the
// rest of the diagonal, zeros elsewhere.  det = N, and membership reduces to
// the single congruence x_1 = sum_i b_i x_i (mod N).
struct SnfBasis {
    Int N;
    IntVec b;  // b_2..b_n, each in [0, N); empty for dimension 1

    SnfBasis(Int modulus, IntVec firstrow);
    std::size_t dim() const { return b.size() + 1; }
    IntMatrix matrix() const;
};

// Checks shape and primality of a candidate matrix; first-row entries are
// normalized into [0, N) (a lattice-preserving column reduction).
// SnfShapeError / CompositeModulusError distinguish the failure modes.
SnfBasis validate_snf(const IntMatrix& B);

// Exact scaled dual N * B^{-T}: first column (1, -b_2, ..., -b_n), diagonal
// (1, N, ..., N), zeros elsewhere.  Integer matrix with determinant N^{n-1}.
IntMatrix scaled_dual_matrix(const SnfBasis& S);

// x mod N lies in the lattice's residue set L_N?
bool ln_contains(const SnfBasis& S, const IntVec& x);

// Deterministic point constructions behind the uniform samplers.
IntVec ln_point_from_coords(const SnfBasis& S, const IntVec& tail);  // x_2..x_n
IntVec dual_point_from_a(const SnfBasis& S, const Int& a);

IntVec sample_ln_uniform(const SnfBasis& S, RngStream& rng);
IntVec sample_dual_uniform(const SnfBasis& S, RngStream& rng);

// The unique y in the scaled-dual residue set with x + y in L_N, obtained by
// solving  x_1 - sum_i x_i b_i = -a (sum_i b_i^2 + 1)  for a mod N.
// NoInverseError if sum_i b_i^2 + 1 is divisible by N (excluded by
// construction-time checks in reduce_to_snf).
struct Phi3Result {
    Int a;
    IntVec y;
};
Phi3Result phi3(const SnfBasis& S, const IntVec& x);

struct SnfReduceOptions {
    long a = 1;  // norm precondition exponent: |x0/T| <= det * n^a
    long b = 2;  // distance guarantee exponent: error <= n^-b
    std::optional<Int> t_override;
    // strict: grow T until the distance guarantee is certified exactly.
    // Relaxed mode keeps the base T formula and records whether the
    // certificate happened to hold (consumers that only need the lattice map,
    // not the n^-b bound, use this).
    bool strict = true;
};

// Record of one reduction to systematic normal form.  All stored matrices
// are exact; T * B2 and T * B3 are integer matrices satisfying
// (T B3) = (T B2) * M with M unimodular, upper-triangular, unit diagonal.
struct SnfReduction {
    RatMatrix B_input;   // upper-triangular input the back-map certifies against
    Int T;               // scaling denominator
    Int delta;           // prime-rounding offset
    IntMatrix C2;        // T * B2 (after prime rounding)
    IntMatrix C3;        // T * B3 = C2 * M (after prime rounding)
    IntMatrix M;         // column elimination transform
    IntMatrix post;      // sign flip + column rotation + first-row reduction
    SnfBasis snf;
    long a_param = 1, b_param = 2;
    bool strict_t = true;
    bool bound_certified = false;  // exact certificate for the n^-b guarantee

    IntMatrix snf_matrix() const { return snf.matrix(); }
};

// Reduce an upper-triangular basis (nonzero diagonal) to systematic normal
// form.  The float overload snaps entries to rationals with denominator T
// first and certifies against the snapped matrix.
SnfReduction reduce_to_snf(const RatMatrix& R, const SnfReduceOptions& opt = {});
SnfReduction reduce_to_snf(const FloatMatrix& R, const SnfReduceOptions& opt = {});

// Maps x0 in L(B_snf) back to a nearby point of L(B_input): exact member
// v_hat = B_input * coeffs with |v_hat - x0/T| <= n^-b whenever the reduction
// was certified and |x0/T| <= det * n^a.
struct BackmapResult {
    RatVec v_hat;
    IntVec coeffs;
    Rat err2;  // exact squared distance |v_hat - x0/T|^2
};
BackmapResult backmap(const SnfReduction& red, const IntVec& x0);

// Serialization: SNF line pair, then M and the post transform as matrix
// blocks, then "T <decimal>".
std::string write_snf(const SnfBasis& S);
SnfBasis read_snf(std::istream& in);
SnfBasis read_snf_file(const std::string& path);
std::string write_reduction(const SnfReduction& red);

}  // namespace latsnf
