#pragma once

#include "latsnf/matrix.hpp"

namespace latsnf {

// Hermite normal form under column operations: H = A * U with U unimodular,
// H upper-triangular, H(i,i) > 0, and 0 <= H(i,j) < H(i,i) for every j > i.
// Column operations (right multiplication) are the lattice-preserving side
// for the column-vector convention, and this reduced shape is the unique
// canonical form reachable that way.  Requires A square and nonsingular.
struct HnfResult {
    IntMatrix H;
    IntMatrix U;
};
HnfResult hnf(const IntMatrix& A);

// Exact-rational LLL reduction of the columns of B: returns B_red = B * U
// with U unimodular.  delta in (1/4, 1); all Gram-Schmidt data is kept as
// exact rationals so the Lovasz condition is decided without rounding.
struct LllResult {
    IntMatrix B;
    IntMatrix U;
};
LllResult lll(const IntMatrix& B, const Rat& delta = Rat(3, 4));

// Fraction-free (Bareiss) determinant.
Int det_exact(const IntMatrix& A);
Rat det_exact(const RatMatrix& A);

// Exact solve A x = b by rational Gaussian elimination; ContractError when A
// is singular or shapes disagree.
RatVec solve_exact(const RatMatrix& A, const RatVec& b);
RatMatrix inverse_exact(const RatMatrix& A);

bool is_unimodular(const IntMatrix& U);

}  // namespace latsnf
