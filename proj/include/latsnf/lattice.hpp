#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "latsnf/linalg.hpp"
#include "latsnf/matrix.hpp"

namespace latsnf {

// Full-rank integer lattice basis (columns), with the inverse and determinant
// cached for the exact membership / enumeration routines.
struct LatticeBasis {
    IntMatrix B;
    RatMatrix B_inv;
    Int det;  // det(B), sign included

    explicit LatticeBasis(IntMatrix basis);
    std::size_t dim() const { return B.rows(); }
};

// Exact membership: integer coefficient vector z with B z = v, if one exists.
std::optional<IntVec> membership(const LatticeBasis& L, const IntVec& v);

// Dual basis B^{-T} (columns generate the dual lattice).
RatMatrix dual_basis(const LatticeBasis& L);

struct ShortVector {
    IntVec v;
    Int norm2;
};

// Exhaustive shortest nonzero vector; exact squared norms.  Dimension <= 6,
// enumeration budget-guarded (BudgetError).
ShortVector svp_bruteforce(const LatticeBasis& L);

// All successive minima lambda_1..lambda_n (squared) with witness vectors.
struct SuccessiveMinima {
    std::vector<Int> lambda2;
    std::vector<IntVec> witnesses;
};
SuccessiveMinima successive_minima_bruteforce(const LatticeBasis& L);

struct ClosestVector {
    IntVec v;   // closest lattice point
    Rat dist2;  // exact squared distance
};
ClosestVector cvp_bruteforce(const LatticeBasis& L, const RatVec& target);

// Invokes visit(point, dist2) for every lattice point within the given exact
// squared distance of center.  Same dimension and budget limits as the other
// enumerations.
void for_points_in_ball(const LatticeBasis& L, const RatVec& center,
                        const Rat& radius2,
                        const std::function<void(const IntVec&, const Rat&)>& visit);

// Integer points of the half-open fundamental parallelotope P(B); their count
// equals |det B|.  Budget: |det| <= 10^4 and a bounding-box cap.
std::vector<IntVec> parallelotope_points(const LatticeBasis& L);

// Coordinate-wise representative in [0, N)^n.
IntVec mod_cube(const IntVec& v, const Int& N);

// Representative of x modulo the lattice inside P(B): returns r in P(B) with
// x - r in L(B).
RatVec mod_parallelotope(const LatticeBasis& L, const RatVec& x);

}  // namespace latsnf
