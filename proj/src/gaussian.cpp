#include "latsnf/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "latsnf/errors.hpp"
#include "latsnf/linalg.hpp"
#include "latsnf/stats.hpp"

namespace latsnf {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_params(const GaussianParams& p, std::size_t n) {
    if (!(p.s > 0)) throw ContractError("gaussian width must be positive");
    if (!p.c.empty() && p.c.size() != n)
        throw ContractError("gaussian center has wrong dimension");
}

double center_at(const GaussianParams& p, std::size_t i) {
    return p.c.empty() ? 0.0 : p.c[i];
}

// Number of lattice points within distance r of any center is at most
// (2r/lambda1 + 1)^n: their open lambda1/2-balls are disjoint and fit in the
// ball of radius r + lambda1/2.
double shell_tail_bound(double radius, double s, double lambda1,
                        std::size_t n) {
    if (lambda1 <= 0) return HUGE_VAL;
    const double u = s / 2;
    double tail = 0;
    for (int k = 0;; ++k) {
        const double r_in = radius + k * u;
        const double r_out = radius + (k + 1) * u;
        const double count = std::pow(2 * r_out / lambda1 + 1, double(n));
        const double term = count * std::exp(-kPi * r_in * r_in / (s * s));
        tail += term;
        if (term < 1e-24 * std::max(tail, 1e-300) || term == 0) {
            // remaining shells shrink at least geometrically once r_in >= s
            const double ratio = std::exp(-kPi * 2 * r_in * u / (s * s)) *
                                 std::pow(r_out / std::max(r_in, u) + 1, double(n));
            if (ratio < 0.5) {
                tail += term * ratio / (1 - ratio);
                break;
            }
        }
        if (k > 4096) return HUGE_VAL;
    }
    return tail;
}

}  // namespace

double rho(const GaussianParams& p, const std::vector<double>& x) {
    check_params(p, x.size());
    double d2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center_at(p, i);
        d2 += d * d;
    }
    return std::exp(-kPi * d2 / (p.s * p.s));
}

double rho(const GaussianParams& p, const IntVec& x) {
    std::vector<double> xd(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xd[i] = x[i].get_d();
    return rho(p, xd);
}

double gauss_sum_radius(double s, std::size_t n) {
    return s * (std::sqrt(double(n)) + 9.0);
}

GaussSumResult rho_lattice_sum(const LatticeBasis& L, const GaussianParams& p,
                               double radius) {
    const std::size_t n = L.dim();
    check_params(p, n);
    if (n > 5) throw BudgetError("exact gaussian sums limited to dimension 5");
    if (!(radius > 0)) throw ContractError("radius must be positive");

    RatVec center(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
        // exact rational center; doubles are binary rationals
        Rat c;
        mpq_set_d(c.get_mpq_t(), center_at(p, i));
        center[i] = c;
    }
    Rat r2;
    mpq_set_d(r2.get_mpq_t(), radius);
    r2 *= r2;

    GaussSumResult out;
    out.radius = radius;
    for_points_in_ball(L, center, r2, [&](const IntVec&, const Rat& d2) {
        out.sum += std::exp(-kPi * d2.get_d() / (p.s * p.s));
    });
    const double lambda1 = std::sqrt(svp_bruteforce(L).norm2.get_d());
    out.tail_bound = shell_tail_bound(radius, p.s, lambda1, n);
    return out;
}

SmoothingResult smoothing_parameter(const LatticeBasis& L, double epsilon,
                                    double rel_tol) {
    const std::size_t n = L.dim();
    if (n > 5) throw BudgetError("smoothing computation limited to dimension 5");
    if (!(epsilon > 0) || !(epsilon < 1))
        throw ContractError("epsilon must lie in (0,1)");
    if (!(rel_tol > 0)) throw ContractError("tolerance must be positive");

    // Dual points rescaled to integers: det * B^{-T} generates det * L*, so
    // rho_{1/s}(L* \ 0) equals the mass of that integer lattice at width
    // |det|/s, minus the origin term.
    const Rat detq = rat_abs(Rat(L.det));
    RatMatrix dual_scaled = inverse_exact(to_rat(L.B)).transposed();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dual_scaled(i, j) *= detq;
    LatticeBasis Ld(to_int(dual_scaled));
    const double detd = detq.get_d();

    struct Eval {
        double mass;
        double tail;
    };
    auto dual_mass = [&](double s) -> Eval {
        const double sigma = detd / s;
        double radius = gauss_sum_radius(sigma, n);
        for (int grow = 0; grow < 10; ++grow) {
            GaussSumResult r = rho_lattice_sum(Ld, GaussianParams{sigma, {}}, radius);
            if (r.tail_bound < 1e-12) return {r.sum - 1.0, r.tail_bound};
            radius *= 1.5;
        }
        throw BudgetError("gaussian tail bound did not converge");
    };

    // certified acceptance: mass + tail <= epsilon
    auto acceptable = [&](const Eval& e) { return e.mass + e.tail <= epsilon; };

    double hi = 1.0;
    Eval ehi = dual_mass(hi);
    int guard = 0;
    while (!acceptable(ehi)) {
        hi *= 2;
        ehi = dual_mass(hi);
        if (++guard > 60) throw BudgetError("smoothing bracket search failed");
    }
    double lo = hi / 2;
    Eval elo = dual_mass(lo);
    guard = 0;
    while (acceptable(elo)) {
        hi = lo;
        ehi = elo;
        lo /= 2;
        elo = dual_mass(lo);
        if (++guard > 60) throw BudgetError("smoothing bracket search failed");
    }
    while ((hi - lo) > rel_tol * hi) {
        const double mid = (hi + lo) / 2;
        const Eval em = dual_mass(mid);
        if (acceptable(em)) {
            hi = mid;
            ehi = em;
        } else {
            lo = mid;
        }
    }
    SmoothingResult out;
    out.epsilon = epsilon;
    out.s_star = hi;
    out.dual_sum = ehi.mass;
    out.truncation_error_bound = ehi.tail;
    return out;
}

double smoothing_upper_estimate(const IntMatrix& B_reduced, double epsilon) {
    if (!(epsilon > 0) || !(epsilon < 1))
        throw ContractError("epsilon must lie in (0,1)");
    const std::size_t n = B_reduced.cols();
    double max_norm = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double n2 = 0;
        for (std::size_t i = 0; i < B_reduced.rows(); ++i) {
            const double v = B_reduced(i, j).get_d();
            n2 += v * v;
        }
        max_norm = std::max(max_norm, std::sqrt(n2));
    }
    return std::sqrt(std::log(2.0 * double(n) * (1.0 + 1.0 / epsilon)) / kPi) *
           max_norm;
}

Int sample_dgauss_int(double s, double c, RngStream& rng) {
    if (!(s > 0)) throw ContractError("gaussian width must be positive");
    const double lo_d = std::ceil(c - 12 * s);
    const double hi_d = std::floor(c + 12 * s);
    if (lo_d > hi_d) {
        // window narrower than one integer: nearest point carries all mass
        return Int(static_cast<long>(std::llround(c)));
    }
    const long lo = static_cast<long>(lo_d);
    const long hi = static_cast<long>(hi_d);
    const std::uint64_t width = std::uint64_t(hi - lo) + 1;
    // peak of the window, for acceptance scaling
    long peak = static_cast<long>(std::llround(c));
    peak = std::max(lo, std::min(hi, peak));
    const double peak_d = double(peak) - c;
    const double log_peak = -kPi * peak_d * peak_d / (s * s);
    while (true) {
        const long k = lo + long(rng.below(width));
        const double d = double(k) - c;
        const double accept = std::exp(-kPi * d * d / (s * s) - log_peak);
        if (rng.uniform() < accept) return Int(k);
    }
}

IntVec sample_dgauss_fn(const Int& N, std::size_t n, double s,
                        const std::vector<double>& c, RngStream& rng) {
    if (N < 2) throw ContractError("modulus must be at least 2");
    if (!(s > 0)) throw ContractError("gaussian width must be positive");
    if (!c.empty() && c.size() != n)
        throw ContractError("center has wrong dimension");
    if (s > N.get_d() / 2)
        throw PrecisionError("width too large relative to the modulus wrap");
    IntVec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ci = c.empty() ? 0.0 : c[i];
        out[i] = mod_floor(sample_dgauss_int(s, ci, rng), N);
    }
    return out;
}

TvEstimate tv_distance_mod_parallelotope(const LatticeBasis& L,
                                         const GaussianParams& p,
                                         std::size_t trials, RngStream& rng) {
    const std::size_t n = L.dim();
    check_params(p, n);
    if (n > 3) throw BudgetError("coset histogram limited to dimension 3");
    if (int_abs(L.det) > 1000)
        throw BudgetError("coset histogram limited to determinant 1000");
    if (trials == 0) throw ContractError("trial count must be positive");

    const std::vector<IntVec> reps = parallelotope_points(L);
    std::map<IntVec, std::size_t> index;
    for (std::size_t k = 0; k < reps.size(); ++k) index[reps[k]] = k;

    std::vector<double> counts(reps.size(), 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
        IntVec x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = sample_dgauss_int(p.s, center_at(p, i), rng);
        // integer representative of x modulo the lattice
        IntVec r(n, Int(0));
        RatVec coords(n, Rat(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                coords[i] += L.B_inv(i, j) * Rat(x[j]);
        for (std::size_t i = 0; i < n; ++i) {
            const Int f = floor_rat(coords[i]);
            for (std::size_t k = 0; k < n; ++k) r[k] += L.B(k, i) * f;
        }
        for (std::size_t i = 0; i < n; ++i) r[i] = x[i] - r[i];
        auto it = index.find(r);
        if (it == index.end())
            throw ContractError("residue fell outside the parallelotope points");
        counts[it->second] += 1.0;
    }
    const std::vector<double> uniform(reps.size(), 1.0 / double(reps.size()));
    TvEstimate out;
    out.tv = tv_against(counts, uniform);
    out.confidence_radius = tv_confidence_radius(reps.size(), trials);
    out.classes = reps.size();
    return out;
}

}  // namespace latsnf
