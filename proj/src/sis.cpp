#include "latsnf/sis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>

#include "latsnf/lattice.hpp"
#include "latsnf/linalg.hpp"
#include "latsnf/primes.hpp"

namespace latsnf {

namespace {

constexpr std::uint64_t kDirectPreferred = 200000;   // direct beats MITM below this
constexpr std::uint64_t kMitmHalfBudget = 1000000;   // per-half cap
constexpr std::uint64_t kDirectBudget = 100000000;   // full-box cap

Int int_pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

void check_instance(const SisInstance& inst) {
    if (inst.n == 0 || inst.g.size() != inst.n)
        throw ContractError("instance dimension/vector mismatch");
    if (inst.N < 2) throw ContractError("modulus must be at least 2");
    if (inst.delta < 0) throw ContractError("negative norm exponent");
    for (const Int& gi : inst.g)
        if (gi < 0 || gi >= inst.N)
            throw ContractError("instance entries must lie in [0, N)");
}

// Coefficients of the congruence in solution-vector order: the affine form
// folds h0 in with coefficient -1 = N-1.
IntVec lifted_coeffs(const SisInstance& inst) {
    if (inst.homogeneous) return inst.g;
    IntVec ext(inst.n + 1);
    ext[0] = inst.N - 1;
    for (std::size_t i = 0; i < inst.n; ++i) ext[i + 1] = inst.g[i];
    return ext;
}

Int congruence_residue(const SisInstance& inst, const IntVec& h) {
    const IntVec coeffs = lifted_coeffs(inst);
    Int s = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += h[i] * coeffs[i];
    return mod_floor(s, inst.N);
}

double gamma_of(const Int& max_abs, std::size_t n, const Rat& delta) {
    if (delta <= 0) return 0.0;
    return to_double(max_abs) / (2.0 * std::pow(double(n), to_double(delta)));
}

Int max_abs_of(const IntVec& h) {
    Int m = 0;
    for (const Int& x : h) {
        Int a = int_abs(x);
        if (a > m) m = a;
    }
    return m;
}

SisSolution finish_solution(const SisInstance& inst, IntVec h) {
    SisSolution sol;
    sol.gamma = gamma_of(max_abs_of(h), inst.n, inst.delta);
    sol.h = std::move(h);
    return sol;
}

// ---- box search machinery -------------------------------------------------
//
// Candidate vectors live in the box [-b, b]^len, addressed by a mixed-radix
// rank (radix 2b+1, last coordinate fastest).  Residues accumulate through
// per-coordinate contribution tables so the odometer walk is O(1) per step.
// Keys are `long` when the modulus fits comfortably, mpz otherwise.

struct BoxPlan {
    std::size_t len = 0;
    long b = 0;
    std::uint64_t radix = 1;
    std::uint64_t total = 1;
    std::uint64_t zero_rank = 0;  // rank of the all-zero vector
    IntVec coeffs;                // in [0, N)
    Int N;
};

IntVec decode_rank(const BoxPlan& p, std::uint64_t rank) {
    IntVec h(p.len);
    for (std::size_t i = p.len; i-- > 0;) {
        h[i] = long(rank % p.radix) - p.b;
        rank /= p.radix;
    }
    return h;
}

template <typename K>
std::vector<std::vector<K>> contrib_tables(const BoxPlan& p, std::size_t from,
                                           std::size_t to) {
    std::vector<std::vector<K>> tab(to - from);
    for (std::size_t i = from; i < to; ++i) {
        tab[i - from].resize(p.radix);
        for (std::uint64_t d = 0; d < p.radix; ++d) {
            Int v = mod_floor(Int(long(d) - p.b) * p.coeffs[i], p.N);
            if constexpr (std::is_same_v<K, long>)
                tab[i - from][d] = long(v.get_si());
            else
                tab[i - from][d] = v;
        }
    }
    return tab;
}

// Walks every rank of the sub-box described by `tab` in order, passing the
// (un-reduced) contribution sum; visitor returns true to stop early.
template <typename K, typename Visit>
void scan_box(const std::vector<std::vector<K>>& tab, Visit&& visit) {
    const std::size_t len = tab.size();
    if (len == 0) {
        visit(std::uint64_t(0), K(0));
        return;
    }
    const std::size_t radix = tab[0].size();
    std::vector<std::size_t> d(len, 0);
    K sum = K(0);
    for (const auto& c : tab) sum += c[0];
    std::uint64_t rank = 0;
    while (true) {
        if (visit(rank, sum)) return;
        std::size_t i = len;
        bool advanced = false;
        while (i > 0) {
            --i;
            sum -= tab[i][d[i]];
            if (d[i] + 1 < radix) {
                ++d[i];
                sum += tab[i][d[i]];
                advanced = true;
                break;
            }
            d[i] = 0;
            sum += tab[i][0];
        }
        if (!advanced) return;
        ++rank;
    }
}

template <typename K>
K reduce_key(const K& sum, const K& N) {
    if constexpr (std::is_same_v<K, long>)
        return sum % N;  // sums are nonnegative by construction
    else
        return mod_floor(sum, N);
}

// Deterministic-first or uniformly random rank with residue 0, by full scan.
template <typename K>
std::optional<std::uint64_t> direct_pick(const BoxPlan& p, RngStream* rng) {
    const auto tab = contrib_tables<K>(p, 0, p.len);
    const K N = [&] {
        if constexpr (std::is_same_v<K, long>)
            return long(p.N.get_si());
        else
            return p.N;
    }();
    if (rng == nullptr) {
        std::optional<std::uint64_t> hit;
        scan_box<K>(tab, [&](std::uint64_t rank, const K& sum) {
            if (rank != p.zero_rank && reduce_key<K>(sum, N) == K(0)) {
                hit = rank;
                return true;
            }
            return false;
        });
        return hit;
    }
    std::uint64_t count = 0;
    scan_box<K>(tab, [&](std::uint64_t rank, const K& sum) {
        if (rank != p.zero_rank && reduce_key<K>(sum, N) == K(0)) ++count;
        return false;
    });
    if (count == 0) return std::nullopt;
    std::uint64_t want = rng->below(count);
    std::optional<std::uint64_t> hit;
    scan_box<K>(tab, [&](std::uint64_t rank, const K& sum) {
        if (rank != p.zero_rank && reduce_key<K>(sum, N) == K(0)) {
            if (want == 0) {
                hit = rank;
                return true;
            }
            --want;
        }
        return false;
    });
    return hit;
}

// Meet-in-the-middle: table the first half, walk the second.  The all-zero
// candidate is excluded where it can occur (zero right half looking up the
// zero left half at key 0).
template <typename K>
std::optional<std::uint64_t> mitm_pick(const BoxPlan& p, RngStream* rng) {
    const std::size_t kL = p.len / 2;
    const std::size_t kR = p.len - kL;
    const auto tabL = contrib_tables<K>(p, 0, kL);
    const auto tabR = contrib_tables<K>(p, kL, p.len);
    const K N = [&] {
        if constexpr (std::is_same_v<K, long>)
            return long(p.N.get_si());
        else
            return p.N;
    }();

    std::vector<std::pair<K, std::uint32_t>> left;
    scan_box<K>(tabL, [&](std::uint64_t rank, const K& sum) {
        left.emplace_back(reduce_key<K>(sum, N), std::uint32_t(rank));
        return false;
    });
    std::sort(left.begin(), left.end());

    std::uint64_t right_weight = 1;
    for (std::size_t i = 0; i < kR; ++i) right_weight *= p.radix;
    const std::uint64_t left_zero = p.zero_rank / right_weight;
    const std::uint64_t right_zero = p.zero_rank % right_weight;
    const std::uint32_t umax = std::numeric_limits<std::uint32_t>::max();

    auto range_of = [&](const K& key) {
        auto lo = std::lower_bound(left.begin(), left.end(),
                                   std::make_pair(key, std::uint32_t(0)));
        auto hi = std::upper_bound(left.begin(), left.end(),
                                   std::make_pair(key, umax));
        return std::make_pair(lo, hi);
    };

    auto walk = [&](auto&& on_candidates) {
        std::optional<std::uint64_t> out;
        scan_box<K>(tabR, [&](std::uint64_t rrank, const K& sum) {
            K target = reduce_key<K>(sum, N);
            if (target != K(0)) target = N - target;
            auto [lo, hi] = range_of(target);
            if (lo == hi) return false;
            // Index of the forbidden all-zero pairing inside this range.
            std::ptrdiff_t skip = -1;
            if (rrank == right_zero && target == K(0)) {
                auto z = std::lower_bound(
                    lo, hi, std::make_pair(K(0), std::uint32_t(left_zero)));
                if (z != hi && z->second == left_zero) skip = z - lo;
            }
            return on_candidates(rrank, lo, hi, skip, out);
        });
        return out;
    };

    using Iter = typename std::vector<std::pair<K, std::uint32_t>>::iterator;

    if (rng == nullptr) {
        return walk([&](std::uint64_t rrank, Iter lo, Iter hi,
                        std::ptrdiff_t skip, std::optional<std::uint64_t>& out) {
            std::ptrdiff_t idx = (skip == 0) ? 1 : 0;
            if (lo + idx == hi) return false;
            out = std::uint64_t((lo + idx)->second) * right_weight + rrank;
            return true;
        });
    }

    std::uint64_t count = 0;
    walk([&](std::uint64_t, Iter lo, Iter hi, std::ptrdiff_t skip,
             std::optional<std::uint64_t>&) {
        count += std::uint64_t(hi - lo) - (skip >= 0 ? 1 : 0);
        return false;
    });
    if (count == 0) return std::nullopt;
    std::uint64_t want = rng->below(count);
    return walk([&](std::uint64_t rrank, Iter lo, Iter hi, std::ptrdiff_t skip,
                    std::optional<std::uint64_t>& out) {
        std::uint64_t here = std::uint64_t(hi - lo) - (skip >= 0 ? 1 : 0);
        if (want >= here) {
            want -= here;
            return false;
        }
        std::ptrdiff_t idx = std::ptrdiff_t(want);
        if (skip >= 0 && idx >= skip) ++idx;
        out = std::uint64_t((lo + idx)->second) * right_weight + rrank;
        return true;
    });
}

// One-coordinate instances reduce to divisibility; no enumeration needed.
std::optional<IntVec> single_coord_pick(const SisInstance& inst,
                                        const Int& bound, RngStream* rng) {
    const Int g0 = inst.g[0];
    if (g0 == 0) {
        if (bound < 1) return std::nullopt;
        if (rng == nullptr) return IntVec{Int(-bound)};
        Int k = rng->below_int(2 * bound) + 1;  // uniform nonzero in [-b, b]
        return IntVec{k <= bound ? k : bound - k};
    }
    // g0 invertible (N prime), so h g0 = 0 iff N | h.
    Int half = floor_div(bound, inst.N);
    if (half == 0) return std::nullopt;
    if (rng == nullptr) return IntVec{Int(-half * inst.N)};
    Int k = rng->below_int(2 * half) + 1;
    Int mult = k <= half ? k : half - k;
    return IntVec{mult * inst.N};
}

std::optional<IntVec> pick_solution(const SisInstance& inst, const Int& bound,
                                    SolveStrategy strategy, RngStream* rng) {
    check_instance(inst);
    if (bound < 0) throw ContractError("negative search bound");
    const IntVec coeffs = lifted_coeffs(inst);
    const std::size_t len = coeffs.size();
    if (bound == 0) return std::nullopt;
    if (len == 1) return single_coord_pick(inst, bound, rng);

    const Int radix_int = 2 * bound + 1;
    const Int total_int = int_pow(radix_int, static_cast<unsigned long>(len));
    const Int half_int =
        int_pow(radix_int, static_cast<unsigned long>(len - len / 2));
    bool use_mitm;
    switch (strategy) {
        case SolveStrategy::direct:
            if (total_int > long(kDirectBudget))
                throw BudgetError("direct scan exceeds box budget");
            use_mitm = false;
            break;
        case SolveStrategy::meet_in_middle:
            if (half_int > long(kMitmHalfBudget))
                throw BudgetError("meet-in-the-middle half exceeds budget");
            use_mitm = true;
            break;
        case SolveStrategy::automatic:
        default:
            if (total_int <= long(kDirectPreferred))
                use_mitm = false;
            else if (half_int <= long(kMitmHalfBudget))
                use_mitm = true;
            else if (total_int <= long(kDirectBudget))
                use_mitm = false;
            else
                throw BudgetError("search space exceeds every budget");
            break;
    }

    BoxPlan p;
    p.len = len;
    p.b = long(bound.get_si());
    p.radix = std::uint64_t(radix_int.get_ui());
    p.total = 1;
    p.zero_rank = 0;
    for (std::size_t i = 0; i < len; ++i) {
        if (!use_mitm) p.total *= p.radix;
        p.zero_rank = p.zero_rank * p.radix + std::uint64_t(p.b);
    }
    p.coeffs = coeffs;
    p.N = inst.N;

    const bool fits_long = p.N < Int(1) << 31;
    std::optional<std::uint64_t> rank;
    if (use_mitm)
        rank = fits_long ? mitm_pick<long>(p, rng) : mitm_pick<Int>(p, rng);
    else
        rank = fits_long ? direct_pick<long>(p, rng) : direct_pick<Int>(p, rng);
    if (!rank) return std::nullopt;
    return decode_rank(p, *rank);
}

}  // namespace

Int floor_pow(const Int& x, unsigned long p, unsigned long q) {
    if (x < 0) throw ContractError("floor_pow of a negative base");
    if (q == 0) throw ContractError("floor_pow with zero denominator");
    Int xp = int_pow(x, p);
    Int r;
    mpz_root(r.get_mpz_t(), xp.get_mpz_t(), q);
    return r;
}

Int pow_floor(std::size_t n, const Rat& e) {
    if (e < 0) throw ContractError("pow_floor of a negative exponent");
    Rat c = e;
    c.canonicalize();
    const Int p = c.get_num();
    const Int q = c.get_den();
    if (!p.fits_ulong_p() || !q.fits_ulong_p())
        throw ContractError("exponent too large");
    return floor_pow(Int(long(n)), p.get_ui(), q.get_ui());
}

Int sis_default_bound(std::size_t n, const Rat& delta) {
    Rat c = delta;
    c.canonicalize();
    const Int p = c.get_num();
    const Int q = c.get_den();
    if (c < 0 || !p.fits_ulong_p() || !q.fits_ulong_p())
        throw ContractError("bad norm exponent");
    // floor(2 n^{p/q}) = floor((2^q n^p)^{1/q})
    Int arg = int_pow(Int(2), q.get_ui()) * int_pow(Int(long(n)), p.get_ui());
    Int r;
    mpz_root(r.get_mpz_t(), arg.get_mpz_t(), q.get_ui());
    return r;
}

Int oracle_bound(const SisInstance& inst) {
    if (!inst.has_delta())
        throw ContractError("instance carries no norm exponent");
    return inst.homogeneous ? sis_default_bound(inst.n, inst.delta)
                            : pow_floor(inst.n, inst.delta);
}

std::size_t dimension_for_modulus(const Int& N, const Rat& delta) {
    if (N < 2) throw ContractError("modulus must be at least 2");
    if (delta <= 0) throw ContractError("norm exponent must be positive");
    Rat c = delta;
    c.canonicalize();
    const Int p = c.get_num();
    const Int q = c.get_den();
    if (!p.fits_ulong_p() || !q.fits_ulong_p())
        throw ContractError("exponent too large");
    const Int rhs = int_pow(N, q.get_ui());
    const unsigned long rhs_bits = mpz_sizeinbase(rhs.get_mpz_t(), 2);
    for (std::size_t n = 1; n <= 1000000; ++n) {
        // n^{delta n} >= N  <=>  n^{p n} >= N^q
        unsigned long e = p.get_ui() * static_cast<unsigned long>(n);
        // n^e >= 2^e > rhs once the exponent clears the bit length.
        if (n >= 2 && e > rhs_bits) return n;
        if (int_pow(Int(long(n)), e) >= rhs) return n;
    }
    throw BudgetError("dimension scan exceeded 10^6");
}

SisInstance gen_random_instance(const Int& N, const Rat& delta, RngStream& rng,
                                bool homogeneous) {
    if (!is_prime(N)) throw ContractError("modulus must be prime");
    SisInstance inst;
    inst.N = N;
    inst.delta = delta;
    inst.delta.canonicalize();
    inst.n = dimension_for_modulus(N, delta);
    inst.homogeneous = homogeneous;
    inst.g.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) inst.g[i] = rng.below_int(N);
    return inst;
}

SisVerdict verify(const SisInstance& inst, const SisSolution& sol,
                  const Int& bound) {
    check_instance(inst);
    if (bound < 0) throw ContractError("negative norm bound");
    SisVerdict v;
    const std::size_t want = inst.n + (inst.homogeneous ? 0 : 1);
    if (sol.h.size() != want) {
        v.reason = "length mismatch";
        return v;
    }
    v.max_abs = max_abs_of(sol.h);
    v.gamma = gamma_of(v.max_abs, inst.n, inst.delta);
    if (v.max_abs == 0) {
        v.reason = "zero solution";
        return v;
    }
    if (congruence_residue(inst, sol.h) != 0) {
        v.reason = "congruence failed";
        return v;
    }
    if (v.max_abs > bound) {
        v.reason = "norm exceeded";
        return v;
    }
    v.accepted = true;
    v.reason = "ok";
    return v;
}

SisVerdict verify(const SisInstance& inst, const SisSolution& sol) {
    if (!inst.has_delta())
        throw ContractError(
            "instance carries no norm exponent; pass an explicit bound");
    return verify(inst, sol, sis_default_bound(inst.n, inst.delta));
}

std::optional<SisSolution> solve_bruteforce(const SisInstance& inst,
                                            const Int& bound,
                                            SolveStrategy strategy) {
    auto h = pick_solution(inst, bound, strategy, nullptr);
    if (!h) return std::nullopt;
    return finish_solution(inst, std::move(*h));
}

namespace {

// Dense-regime sampler: draw every coordinate but one uniformly, solve the
// congruence for the pivot, accept when the forced digit stays inside the
// box.  Each solution corresponds to exactly one accepted draw, so the
// output is uniform over the full solution set at a cost of about N/(2b+1)
// draws per hit.  Returns nullopt when the regime conditions fail or the
// draw budget runs out; the caller then falls back to the exact walk, which
// can also certify absence.
std::optional<IntVec> rejection_pick(const SisInstance& inst, const Int& bound,
                                     RngStream& rng) {
    const IntVec coeffs = lifted_coeffs(inst);
    const std::size_t len = coeffs.size();
    if (len < 2 || bound < 1) return std::nullopt;
    const Int radix = 2 * bound + 1;
    Int box = 1;
    bool dense = false;  // expect >= 16 solutions before committing
    for (std::size_t i = 0; i < len && !dense; ++i) {
        box *= radix;
        if (box >= 16 * inst.N) dense = true;
    }
    if (!dense) return std::nullopt;

    std::size_t pivot = len;
    for (std::size_t i = len; i-- > 0;) {
        if (mod_floor(coeffs[i], inst.N) != 0) {
            pivot = i;
            break;
        }
    }
    if (pivot == len) {  // all coefficients vanish: any nonzero point solves
        IntVec h(len);
        bool nonzero = false;
        while (!nonzero)
            for (std::size_t i = 0; i < len; ++i) {
                h[i] = rng.symmetric(bound);
                if (h[i] != 0) nonzero = true;
            }
        return h;
    }

    const Int inv = mod_inverse(mod_floor(coeffs[pivot], inst.N), inst.N);
    const Int cap_int = 64 * (inst.N / radix + 1);
    if (cap_int > 4000000) return std::nullopt;
    const unsigned long cap = cap_int.get_ui();
    IntVec h(len);
    for (unsigned long it = 0; it < cap; ++it) {
        Int acc = 0;
        bool nonzero = false;
        for (std::size_t i = 0; i < len; ++i) {
            if (i == pivot) continue;
            h[i] = rng.symmetric(bound);
            if (h[i] != 0) nonzero = true;
            acc += h[i] * coeffs[i];
        }
        const Int digit = mod_centered(-acc * inv, inst.N);
        if (int_abs(digit) > bound) continue;
        if (digit != 0) nonzero = true;
        if (!nonzero) continue;
        h[pivot] = digit;
        return h;
    }
    return std::nullopt;
}

}  // namespace

std::optional<SisSolution> solve_bruteforce_random(const SisInstance& inst,
                                                   const Int& bound,
                                                   RngStream& rng) {
    check_instance(inst);
    if (bound < 0) throw ContractError("negative search bound");
    auto fast = rejection_pick(inst, bound, rng);
    if (fast) return finish_solution(inst, std::move(*fast));
    auto h = pick_solution(inst, bound, SolveStrategy::automatic, &rng);
    if (!h) return std::nullopt;
    return finish_solution(inst, std::move(*h));
}

IntMatrix sis_perp_basis(const Int& N, const IntVec& g) {
    if (N < 2) throw ContractError("modulus must be at least 2");
    const std::size_t n = g.size();
    if (n == 0) throw ContractError("empty coefficient vector");
    std::size_t pivot = n;
    for (std::size_t i = 0; i < n && pivot == n; ++i)
        if (mod_floor(g[i], N) != 0) pivot = i;
    IntMatrix B(n, n);
    if (pivot == n) {  // g = 0: every integer vector qualifies
        for (std::size_t i = 0; i < n; ++i) B(i, i) = 1;
        return B;
    }
    const Int inv = mod_inverse(mod_floor(g[pivot], N), N);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == pivot) {
            B(pivot, pivot) = N;
            continue;
        }
        B(j, j) = 1;
        B(pivot, j) = -mod_floor(mod_floor(g[j], N) * inv, N);
    }
    return B;
}

SisSolution solve_lll(const SisInstance& inst) {
    check_instance(inst);
    const IntVec coeffs = lifted_coeffs(inst);
    IntMatrix basis = sis_perp_basis(inst.N, coeffs);
    IntMatrix red = lll(basis).B;
    std::size_t best = 0;
    Int best2 = 0;
    for (std::size_t j = 0; j < red.cols(); ++j) {
        Int n2 = norm2_exact(red.col(j));
        if (j == 0 || n2 < best2) {
            best = j;
            best2 = n2;
        }
    }
    IntVec h = red.col(best);
    for (const Int& x : h) {  // sign-canonical: first nonzero entry positive
        if (x > 0) break;
        if (x < 0) {
            for (Int& y : h) y = -y;
            break;
        }
    }
    return finish_solution(inst, std::move(h));
}

SisOracleFn make_bruteforce_oracle() {
    return [](const SisInstance& inst, RngStream& rng) {
        return solve_bruteforce_random(inst, oracle_bound(inst), rng);
    };
}

SisOracleFn make_bruteforce_oracle_det() {
    return [](const SisInstance& inst, RngStream&) {
        return solve_bruteforce(inst, oracle_bound(inst));
    };
}

SisOracleFn make_lll_oracle() {
    return [](const SisInstance& inst, RngStream&) {
        return std::optional<SisSolution>(solve_lll(inst));
    };
}

namespace {

// Affine answer sanity: right length and exact congruence; anything else is
// a broken oracle, reported loudly.
void check_affine_answer(const SisInstance& inst, const SisSolution& sol) {
    if (sol.h.size() != inst.n + 1)
        throw ContractError("oracle returned a wrong-length affine solution");
    if (max_abs_of(sol.h) == 0)
        throw ContractError("oracle returned the zero affine solution");
    if (congruence_residue(inst, sol.h) != 0)
        throw ContractError("oracle returned a non-solution");
}

}  // namespace

std::optional<SisSolution> hom_from_nonhom(const SisInstance& inst,
                                           const SisOracleFn& oracle,
                                           RngStream& rng, int max_retries) {
    check_instance(inst);
    if (!inst.homogeneous)
        throw ContractError("equivalence target must be homogeneous");
    if (!inst.has_delta())
        throw ContractError("equivalence needs a recorded exponent");

    SisInstance first = inst;
    first.homogeneous = false;
    first.delta = inst.delta / 2;
    first.delta.canonicalize();

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        auto s1 = oracle(first, rng);
        if (!s1) return std::nullopt;
        check_affine_answer(first, *s1);
        const Int h0 = mod_floor(s1->h[0], inst.N);
        if (h0 == 0) continue;  // affine term has no inverse; redraw

        SisInstance second = first;
        const Int inv = mod_inverse(h0, inst.N);
        for (std::size_t i = 0; i < inst.n; ++i)
            second.g[i] = mod_floor(inst.g[i] * inv, inst.N);
        auto s2 = oracle(second, rng);
        if (!s2) return std::nullopt;
        check_affine_answer(second, *s2);

        // s1 solves <g, f> = e, s2 solves <e^{-1} g, f'> = e', so
        // f'_i - e' f_i kills g exactly.
        IntVec combined(inst.n);
        bool nonzero = false;
        for (std::size_t i = 0; i < inst.n; ++i) {
            combined[i] = s2->h[i + 1] - s2->h[0] * s1->h[i + 1];
            if (combined[i] != 0) nonzero = true;
        }
        if (!nonzero) continue;  // proportional answers; redraw
        return finish_solution(inst, std::move(combined));
    }
    throw ContractError("equivalence retries exhausted");
}

namespace {

struct AffineScan {
    std::uint64_t admissible = 0;
    std::uint64_t invertible = 0;
    double max_direction_share = 0.0;  // projective directions of the tails
};

// Shared exhaustive walk behind the two half-exponent diagnostics.
AffineScan scan_affine_answers(const SisInstance& inst) {
    check_instance(inst);
    if (!inst.homogeneous)
        throw ContractError("diagnostic expects a homogeneous instance");
    if (!inst.has_delta())
        throw ContractError("diagnostic needs a recorded exponent");

    SisInstance aff = inst;
    aff.homogeneous = false;
    aff.delta = inst.delta / 2;
    aff.delta.canonicalize();
    const Int bound = oracle_bound(aff);
    const IntVec coeffs = lifted_coeffs(aff);
    const std::size_t len = coeffs.size();
    if (int_pow(2 * bound + 1, static_cast<unsigned long>(len)) > 2000000)
        throw BudgetError("diagnostic scan exceeds budget");

    AffineScan scan;
    std::map<std::string, std::uint64_t> directions;
    IntVec h(len, Int(-bound));
    while (true) {
        bool all_zero = true;
        Int s = 0;
        for (std::size_t i = 0; i < len; ++i) {
            if (h[i] != 0) all_zero = false;
            s += h[i] * coeffs[i];
        }
        if (!all_zero && mod_floor(s, aff.N) == 0) {
            ++scan.admissible;
            if (mod_floor(h[0], aff.N) != 0) ++scan.invertible;
            // Canonical projective key of the tail: divide out the gcd,
            // make the first nonzero entry positive.  Zero tails (possible
            // only when the box reaches the modulus itself) can never zero
            // the combined vector, so they stay out of the histogram.
            Int g(0);
            for (std::size_t i = 1; i < len; ++i)
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), h[i].get_mpz_t());
            if (g != 0) {
                int sign = 0;
                std::string key;
                for (std::size_t i = 1; i < len; ++i) {
                    Int c = h[i] / g;
                    if (sign == 0 && c != 0) sign = c > 0 ? 1 : -1;
                    if (sign < 0) c = -c;
                    key += c.get_str();
                    key += ',';
                }
                ++directions[key];
            }
        }
        std::size_t i = 0;
        while (i < len && h[i] == bound) h[i++] = -bound;
        if (i == len) break;
        h[i] += 1;
    }
    for (const auto& [key, count] : directions)
        scan.max_direction_share =
            std::max(scan.max_direction_share,
                     double(count) / double(scan.admissible));
    return scan;
}

}  // namespace

double affine_invertible_fraction(const SisInstance& inst) {
    const AffineScan scan = scan_affine_answers(inst);
    if (scan.admissible == 0) return -1.0;
    return double(scan.invertible) / double(scan.admissible);
}

double affine_direction_spread(const SisInstance& inst) {
    const AffineScan scan = scan_affine_answers(inst);
    if (scan.admissible == 0) return -1.0;
    return scan.max_direction_share;
}

SisInstance snf_to_sis(const SnfBasis& S) {
    if (S.dim() < 2)
        throw ContractError("correspondence needs dimension at least 2");
    SisInstance inst;
    inst.N = S.N;
    inst.delta = 0;
    inst.n = S.dim() - 1;
    inst.homogeneous = false;
    inst.g.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i)
        inst.g[i] = mod_floor(S.b[i], S.N);
    return inst;
}

bool sis_lattice_equals_snf(const SnfBasis& S) {
    const std::size_t dim = S.dim();
    if (dim < 2)
        throw ContractError("correspondence needs dimension at least 2");
    if (int_pow(S.N, static_cast<unsigned long>(dim)) > 2000000)
        throw BudgetError("enumeration over F_N^n exceeds budget");
    const SisInstance inst = snf_to_sis(S);
    IntVec x(dim, Int(0));
    while (true) {
        const bool in_lattice = ln_contains(S, x);
        const bool in_parity = congruence_residue(inst, x) == 0;
        if (in_lattice != in_parity) return false;
        std::size_t i = dim;
        bool advanced = false;
        while (i > 0) {
            --i;
            if (x[i] + 1 < S.N) {
                ++x[i];
                advanced = true;
                break;
            }
            x[i] = 0;
        }
        if (!advanced) return true;
    }
}

DensityResult density_experiment(const Int& N, const Rat& delta,
                                 std::size_t trials, const Rat& alpha,
                                 RngStream& rng) {
    if (!is_prime(N)) throw ContractError("modulus must be prime");
    if (trials < 100)
        throw ContractError("experiment needs at least 100 trials");
    if (alpha < 0) throw ContractError("negative threshold");
    DensityResult res;
    res.n = dimension_for_modulus(N, delta);
    if (res.n > 5)
        throw BudgetError("first-minimum enumeration limited to dimension 5");
    res.trials = trials;
    res.lambda1_sq.reserve(trials);

    // lambda_1 >= alpha n^delta  <=>  (lambda_1^2 d^2)^q >= a^{2q} n^{2p}
    Rat dcan = delta;
    dcan.canonicalize();
    Rat acan = alpha;
    acan.canonicalize();
    const unsigned long p = dcan.get_num().get_ui();
    const unsigned long q = dcan.get_den().get_ui();
    const Int thr_rhs = int_pow(acan.get_num(), 2 * q) *
                        int_pow(Int(long(res.n)), 2 * p);
    const Int thr_den = int_pow(acan.get_den(), 2 * q);

    for (std::size_t t = 0; t < trials; ++t) {
        IntVec g(res.n);
        for (Int& gi : g) gi = rng.below_int(N);
        LatticeBasis L(sis_perp_basis(N, g));
        if (int_abs(L.det) > N) res.all_det_le_modulus = false;
        const Int l2 = svp_bruteforce(L).norm2;
        res.lambda1_sq.push_back(l2);
        const bool ge = int_pow(l2, q) * thr_den >= thr_rhs;
        res.ge_alpha.push_back(ge ? 1 : 0);
        if (ge) ++res.count_ge;
    }
    return res;
}

// ---- text formats ---------------------------------------------------------

std::string write_sis_instance(const SisInstance& inst) {
    check_instance(inst);
    std::ostringstream out;
    out << inst.N.get_str() << ' ' << rat_to_string(inst.delta) << ' '
        << inst.n << ' ' << (inst.homogeneous ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < inst.n; ++i) {
        if (i) out << ' ';
        out << inst.g[i].get_str();
    }
    out << '\n';
    return out.str();
}

SisInstance read_sis_instance(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header line");
    std::istringstream head(line);
    std::string ntok, dtok;
    long n = 0, flag = -1;
    if (!(head >> ntok >> dtok >> n >> flag))
        throw ParseError(1, "expected 'N delta n homogeneous_flag'");
    std::string extra;
    if (head >> extra) throw ParseError(1, "trailing tokens in header");
    SisInstance inst;
    try {
        inst.N = Int(ntok);
        inst.delta = parse_rat(dtok);
    } catch (const std::exception&) {
        throw ParseError(1, "bad modulus or exponent");
    }
    if (!is_prime(inst.N)) throw ParseError(1, "modulus is not prime");
    if (inst.delta < 0) throw ParseError(1, "negative exponent");
    if (n < 1) throw ParseError(1, "dimension must be positive");
    if (flag != 0 && flag != 1) throw ParseError(1, "flag must be 0 or 1");
    inst.n = std::size_t(n);
    inst.homogeneous = flag == 1;
    if (!std::getline(in, line)) throw ParseError(2, "missing entries line");
    std::istringstream body(line);
    inst.g.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) {
        std::string tok;
        if (!(body >> tok)) throw ParseError(2, "too few entries");
        try {
            inst.g[i] = Int(tok);
        } catch (const std::exception&) {
            throw ParseError(2, "bad entry '" + tok + "'");
        }
        if (inst.g[i] < 0 || inst.g[i] >= inst.N)
            throw ParseError(2, "entry outside [0, N)");
    }
    std::string tail;
    if (body >> tail) throw ParseError(2, "too many entries");
    return inst;
}

SisInstance read_sis_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open '" + path + "'");
    return read_sis_instance(in);
}

std::string write_sis_solution(const SisSolution& sol) {
    std::ostringstream out;
    for (std::size_t i = 0; i < sol.h.size(); ++i) {
        if (i) out << ' ';
        out << sol.h[i].get_str();
    }
    out << '\n';
    return out.str();
}

IntVec read_sis_solution(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing solution line");
    std::istringstream body(line);
    IntVec h;
    std::string tok;
    while (body >> tok) {
        try {
            h.emplace_back(tok);
        } catch (const std::exception&) {
            throw ParseError(1, "bad entry '" + tok + "'");
        }
    }
    if (h.empty()) throw ParseError(1, "empty solution line");
    return h;
}

IntVec read_sis_solution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open '" + path + "'");
    return read_sis_solution(in);
}

}  // namespace latsnf
