#pragma once

#include <cstddef>
#include <vector>

#include "latsnf/lattice.hpp"
#include "latsnf/rng.hpp"

namespace latsnf {

// Width/center of a Gaussian weight function exp(-pi |x-c|^2 / s^2).
struct GaussianParams {
    double s = 1.0;
    std::vector<double> c;
};

double rho(const GaussianParams& p, const std::vector<double>& x);
double rho(const GaussianParams& p, const IntVec& x);

// Truncated Gaussian mass of a lattice: the exact-enumeration sum over all
// points within `radius` of the center, plus a rigorous bound on everything
// outside (packing argument on shells of width s/2, using the true shortest
// vector).
struct GaussSumResult {
    double sum = 0;
    double tail_bound = 0;
    double radius = 0;
};
GaussSumResult rho_lattice_sum(const LatticeBasis& L, const GaussianParams& p,
                               double radius);

// Radius at which the shell tail bound typically drops below 1e-12; callers
// verify via the returned tail_bound and enlarge if needed.
double gauss_sum_radius(double s, std::size_t n);

// Smallest width s such that the Gaussian mass of the dual lattice minus the
// origin, at width 1/s, is at most epsilon.  Evaluated by exact dual-point
// enumeration (integer rescaling by det), bisected to relative tolerance.
struct SmoothingResult {
    double epsilon = 0;
    double s_star = 0;
    double dual_sum = 0;               // dual mass at s_star, excluding 0
    double truncation_error_bound = 0;  // tail bound of that evaluation
};
SmoothingResult smoothing_parameter(const LatticeBasis& L, double epsilon,
                                    double rel_tol = 1e-6);

// Closed-form upper estimate sqrt(ln(2n(1+1/eps))/pi) * max_i |b_i| for a
// reduced basis whose columns are short (their max dominates lambda_n).
double smoothing_upper_estimate(const IntMatrix& B_reduced, double epsilon);

// Discrete Gaussian on Z: rejection from the uniform proposal on
// [ceil(c-12s), floor(c+12s)], acceptance scaled by the window maximum.  The
// truncation changes the distribution by less than exp(-pi*144).
Int sample_dgauss_int(double s, double c, RngStream& rng);

// Coordinate-wise discrete Gaussian reduced into [0, N)^n.  The reduction is
// the exact image distribution for any s because N Z^n translates are summed
// by wrapping; s is still capped at N/2 so that a single window never wraps
// more than once.
IntVec sample_dgauss_fn(const Int& N, std::size_t n, double s,
                        const std::vector<double>& c, RngStream& rng);

// Empirical total-variation distance between sampled integer Gaussians
// reduced modulo the lattice and the uniform distribution on the |det B|
// coset classes, with a confidence radius.
struct TvEstimate {
    double tv = 0;
    double confidence_radius = 0;
    std::size_t classes = 0;
};
TvEstimate tv_distance_mod_parallelotope(const LatticeBasis& L,
                                         const GaussianParams& p,
                                         std::size_t trials, RngStream& rng);

}  // namespace latsnf
