#include "latsnf/lattice.hpp"

#include <algorithm>

#include "latsnf/errors.hpp"

namespace latsnf {

namespace {

constexpr std::size_t kMaxEnumDim = 6;
constexpr unsigned long kEnumBudget = 20'000'000UL;
constexpr long kMaxParallelotopeDet = 10'000;

Int ceil_sqrt(const Rat& x) {
    if (x <= 0) return 0;
    // ceil(sqrt(p/q)) = ceil(sqrt(p*q)/q)
    Int pq = x.get_num() * x.get_den();
    Int root;
    mpz_sqrt(root.get_mpz_t(), pq.get_mpz_t());
    while (root * root < pq) ++root;
    Rat r(root, x.get_den());
    r.canonicalize();
    return floor_rat(r) + (r.get_den() == 1 ? 0 : 1);
}

// Enumerates every integer coefficient vector z with |B z - t|^2 <= r2,
// invoking visit(z, point, norm2).  Bounds per coordinate come from the rows
// of B^{-1}:  z = B^{-1}(Bz), so |z_i - (B^{-1}t)_i| <= |row_i(B^{-1})| * r.
template <typename Visit>
void enumerate_ball(const LatticeBasis& L, const RatVec& t, const Rat& r2,
                    Visit visit) {
    const std::size_t n = L.dim();
    if (n > kMaxEnumDim)
        throw BudgetError("enumeration limited to dimension 6");
    RatVec center = solve_exact(to_rat(L.B), t);
    std::vector<Int> lo(n), hi(n);
    unsigned long count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Rat row2 = 0;
        for (std::size_t j = 0; j < n; ++j)
            row2 += L.B_inv(i, j) * L.B_inv(i, j);
        Int radius = ceil_sqrt(row2 * r2);
        lo[i] = floor_rat(center[i]) - radius;
        hi[i] = floor_rat(center[i]) + radius + 1;
        Rat width = Rat(hi[i] - lo[i] + 1);
        if (width > Rat(long(kEnumBudget)) ||
            Rat(long(count)) * width > Rat(long(kEnumBudget)))
            throw BudgetError("enumeration box exceeds budget");
        const Rat total = Rat(long(count)) * width;
        count = static_cast<unsigned long>(total.get_num().get_ui());
    }
    IntVec z(n), point(n);
    RatVec diff(n);
    // Odometer over the box.
    for (std::size_t i = 0; i < n; ++i) z[i] = lo[i];
    while (true) {
        // point = B z, norm2 = |point - t|^2
        Rat norm2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Int s = 0;
            for (std::size_t j = 0; j < n; ++j) s += L.B(i, j) * z[j];
            point[i] = s;
            Rat d = Rat(s) - t[i];
            norm2 += d * d;
        }
        if (norm2 <= r2) visit(z, point, norm2);
        std::size_t i = 0;
        while (i < n) {
            if (z[i] < hi[i]) {
                ++z[i];
                break;
            }
            z[i] = lo[i];
            ++i;
        }
        if (i == n) break;
    }
}

RatVec zero_target(std::size_t n) { return RatVec(n, Rat(0)); }

// Smallest sensible search radius: squared norm of the shortest column of an
// LLL-reduced basis (an upper bound on lambda_1^2).
Int lll_radius2(const LatticeBasis& L, bool largest) {
    IntMatrix red = lll(L.B).B;
    Int best = 0;
    for (std::size_t j = 0; j < red.cols(); ++j) {
        Int norm2 = 0;
        for (std::size_t i = 0; i < red.rows(); ++i)
            norm2 += red(i, j) * red(i, j);
        if (j == 0 || (largest ? norm2 > best : norm2 < best)) best = norm2;
    }
    return best;
}

}  // namespace

LatticeBasis::LatticeBasis(IntMatrix basis) : B(std::move(basis)) {
    if (B.rows() == 0 || B.rows() != B.cols())
        throw ContractError("lattice basis must be square and nonempty");
    det = det_exact(B);
    if (det == 0) throw ContractError("lattice basis must be nonsingular");
    B_inv = inverse_exact(to_rat(B));
}

std::optional<IntVec> membership(const LatticeBasis& L, const IntVec& v) {
    if (v.size() != L.dim()) throw ContractError("membership: dimension mismatch");
    IntVec z(L.dim());
    for (std::size_t i = 0; i < L.dim(); ++i) {
        Rat c = 0;
        for (std::size_t j = 0; j < L.dim(); ++j) c += L.B_inv(i, j) * Rat(v[j]);
        if (c.get_den() != 1) return std::nullopt;
        z[i] = c.get_num();
    }
    return z;
}

RatMatrix dual_basis(const LatticeBasis& L) {
    return inverse_exact(to_rat(L.B)).transposed();
}

ShortVector svp_bruteforce(const LatticeBasis& L) {
    Int r2 = lll_radius2(L, false);
    ShortVector best{IntVec(L.dim(), Int(0)), r2};
    bool found = false;
    enumerate_ball(L, zero_target(L.dim()), Rat(r2),
                   [&](const IntVec&, const IntVec& p, const Rat& norm2) {
                       bool zero = std::all_of(p.begin(), p.end(),
                                               [](const Int& x) { return x == 0; });
                       if (zero) return;
                       Int n2 = norm2.get_num();  // integer point, integer norm
                       if (!found || n2 < best.norm2) {
                           best = {p, n2};
                           found = true;
                       }
                   });
    // The radius came from an actual lattice vector, so something was found.
    return best;
}

SuccessiveMinima successive_minima_bruteforce(const LatticeBasis& L) {
    const std::size_t n = L.dim();
    Int r2 = lll_radius2(L, true);
    std::vector<ShortVector> pts;
    enumerate_ball(L, zero_target(n), Rat(r2),
                   [&](const IntVec&, const IntVec& p, const Rat& norm2) {
                       bool zero = std::all_of(p.begin(), p.end(),
                                               [](const Int& x) { return x == 0; });
                       if (!zero) pts.push_back({p, Int(norm2.get_num())});
                   });
    std::sort(pts.begin(), pts.end(),
              [](const ShortVector& a, const ShortVector& b) {
                  return a.norm2 < b.norm2;
              });
    SuccessiveMinima out;
    std::vector<IntVec> chosen;
    auto independent = [&](const IntVec& v) {
        RatMatrix m(n, chosen.size() + 1);
        for (std::size_t j = 0; j < chosen.size(); ++j)
            for (std::size_t i = 0; i < n; ++i) m(i, j) = Rat(chosen[j][i]);
        for (std::size_t i = 0; i < n; ++i) m(i, chosen.size()) = Rat(v[i]);
        // Rank via elimination.
        std::size_t rank = 0;
        for (std::size_t col = 0; col < m.cols() && rank < n; ++col) {
            std::size_t p = rank;
            while (p < n && m(p, col) == 0) ++p;
            if (p == n) continue;
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(rank, j), m(p, j));
            for (std::size_t i = 0; i < n; ++i) {
                if (i == rank || m(i, col) == 0) continue;
                Rat f = m(i, col) / m(rank, col);
                for (std::size_t j = 0; j < m.cols(); ++j)
                    m(i, j) -= f * m(rank, j);
            }
            ++rank;
        }
        return rank == chosen.size() + 1;
    };
    for (const auto& sv : pts) {
        if (chosen.size() == n) break;
        if (independent(sv.v)) {
            chosen.push_back(sv.v);
            out.lambda2.push_back(sv.norm2);
            out.witnesses.push_back(sv.v);
        }
    }
    if (chosen.size() != n)
        throw ContractError(
            "successive minima radius too small (LLL bound violated?)");
    return out;
}

ClosestVector cvp_bruteforce(const LatticeBasis& L, const RatVec& target) {
    if (target.size() != L.dim())
        throw ContractError("cvp: dimension mismatch");
    // Initial radius: distance achieved by coordinate rounding of B^{-1} t.
    RatVec coords = solve_exact(to_rat(L.B), target);
    Rat start2 = 0;
    IntVec guess(L.dim());
    for (std::size_t i = 0; i < L.dim(); ++i) guess[i] = round_nearest(coords[i]);
    for (std::size_t i = 0; i < L.dim(); ++i) {
        Rat d = -target[i];
        for (std::size_t j = 0; j < L.dim(); ++j) d += Rat(L.B(i, j) * guess[j]);
        start2 += d * d;
    }
    ClosestVector best;
    best.dist2 = start2;
    best.v = IntVec(L.dim());
    for (std::size_t i = 0; i < L.dim(); ++i) {
        Int s = 0;
        for (std::size_t j = 0; j < L.dim(); ++j) s += L.B(i, j) * guess[j];
        best.v[i] = s;
    }
    enumerate_ball(L, target, start2,
                   [&](const IntVec&, const IntVec& p, const Rat& norm2) {
                       if (norm2 < best.dist2) best = {p, norm2};
                   });
    return best;
}

void for_points_in_ball(const LatticeBasis& L, const RatVec& center,
                        const Rat& radius2,
                        const std::function<void(const IntVec&, const Rat&)>& visit) {
    if (center.size() != L.dim())
        throw ContractError("ball enumeration: dimension mismatch");
    if (radius2 < 0) return;
    enumerate_ball(L, center, radius2,
                   [&](const IntVec&, const IntVec& p, const Rat& norm2) {
                       visit(p, norm2);
                   });
}

std::vector<IntVec> parallelotope_points(const LatticeBasis& L) {
    const std::size_t n = L.dim();
    Int absdet = int_abs(L.det);
    if (absdet > kMaxParallelotopeDet)
        throw BudgetError("parallelotope determinant exceeds budget");
    IntVec lo(n), hi(n);
    Rat box = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Int neg = 0, pos = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (L.B(i, j) < 0) neg += L.B(i, j);
            else pos += L.B(i, j);
        }
        lo[i] = neg;
        hi[i] = pos;
        box *= Rat(hi[i] - lo[i] + 1);
        if (box > Rat(long(kEnumBudget)))
            throw BudgetError("parallelotope bounding box exceeds budget");
    }
    std::vector<IntVec> out;
    IntVec v = lo;
    RatVec x(n);
    while (true) {
        bool inside = true;
        for (std::size_t i = 0; i < n && inside; ++i) {
            Rat c = 0;
            for (std::size_t j = 0; j < n; ++j) c += L.B_inv(i, j) * Rat(v[j]);
            if (c < 0 || c >= 1) inside = false;
        }
        if (inside) out.push_back(v);
        std::size_t i = 0;
        while (i < n) {
            if (v[i] < hi[i]) {
                ++v[i];
                break;
            }
            v[i] = lo[i];
            ++i;
        }
        if (i == n) break;
    }
    return out;
}

IntVec mod_cube(const IntVec& v, const Int& N) {
    if (N <= 0) throw ContractError("mod_cube: modulus must be positive");
    IntVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = mod_floor(v[i], N);
    return out;
}

RatVec mod_parallelotope(const LatticeBasis& L, const RatVec& x) {
    if (x.size() != L.dim())
        throw ContractError("mod_parallelotope: dimension mismatch");
    RatVec coords = solve_exact(to_rat(L.B), x);
    RatVec frac(L.dim());
    for (std::size_t i = 0; i < L.dim(); ++i)
        frac[i] = coords[i] - Rat(floor_rat(coords[i]));
    RatVec out(L.dim());
    for (std::size_t i = 0; i < L.dim(); ++i) {
        Rat s = 0;
        for (std::size_t j = 0; j < L.dim(); ++j)
            s += Rat(L.B(i, j)) * frac[j];
        out[i] = s;
    }
    return out;
}

}  // namespace latsnf
