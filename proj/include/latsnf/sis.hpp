#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latsnf/matrix.hpp"
#include "latsnf/numeric.hpp"
#include "latsnf/rng.hpp"
#include "latsnf/snf.hpp"

namespace latsnf {

// Rank-1 short-integer-solution instance over F_N (N prime).  `delta` is the
// norm exponent as an exact rational; instances produced by the systematic-
// normal-form correspondence carry no exponent (delta = 0) and rely on the
// caller to supply a norm bound.  `g` entries are normalized to [0, N).
struct SisInstance {
    Int N;
    Rat delta;
    std::size_t n = 0;
    IntVec g;
    bool homogeneous = true;

    bool has_delta() const { return delta > 0; }
};

// Coefficient vector h: length n for homogeneous instances, n+1 with the
// affine term h0 FIRST otherwise.  `gamma` is max_i |h_i| relative to the
// definitional bound 2 n^delta, so 1.0 means exactly at the bound; it is 0
// when the instance carries no exponent.
struct SisSolution {
    IntVec h;
    double gamma = 0.0;
};

struct SisVerdict {
    bool accepted = false;
    std::string reason;  // "ok" or the first failed check
    double gamma = 0.0;  // same convention as SisSolution
    Int max_abs;         // max_i |h_i| over the whole vector
};

// floor(x^{p/q}) for x >= 0, p >= 0, q >= 1, exactly.
Int floor_pow(const Int& x, unsigned long p, unsigned long q);
// floor(n^e) for a nonnegative rational exponent, exactly.
Int pow_floor(std::size_t n, const Rat& e);
// floor(2 n^delta): the definitional solution bound at dimension n.
Int sis_default_bound(std::size_t n, const Rat& delta);
// Bound an oracle must honor on this instance: floor(2 n^delta) when
// homogeneous, floor(n^delta) when affine (the equivalence argument's
// contract).  Requires a recorded exponent.
Int oracle_bound(const SisInstance& inst);

// Minimal n >= 1 with n^{delta n} >= N, by increasing scan with exact
// integer power comparison (no floating point anywhere near the boundary).
std::size_t dimension_for_modulus(const Int& N, const Rat& delta);

// Uniform g over F_N^n with n from dimension_for_modulus.
SisInstance gen_random_instance(const Int& N, const Rat& delta, RngStream& rng,
                                bool homogeneous = true);

// Exact congruence + norm check.  The two-argument form uses the
// definitional bound 2 n^delta (requires a recorded exponent); the explicit
// form caps max_i |h_i| by `bound`.  Rejection is a value, not an error.
SisVerdict verify(const SisInstance& inst, const SisSolution& sol);
SisVerdict verify(const SisInstance& inst, const SisSolution& sol,
                  const Int& bound);

enum class SolveStrategy { automatic, direct, meet_in_middle };

// Deterministic search for a nonzero solution with max|h_i| <= bound over
// the full box; nullopt is an exhaustion certificate for that bound.
// Budget: box <= 10^8 points for the direct scan, <= 10^6 per half for
// meet-in-the-middle.
std::optional<SisSolution> solve_bruteforce(
    const SisInstance& inst, const Int& bound,
    SolveStrategy strategy = SolveStrategy::automatic);

// Uniformly random choice among ALL solutions within bound (same budgets;
// the meet-in-the-middle path counts first, then picks without enumerating
// solutions explicitly).
std::optional<SisSolution> solve_bruteforce_random(const SisInstance& inst,
                                                   const Int& bound,
                                                   RngStream& rng);

// Integer basis (columns) of {h : <g, h> = 0 mod N}: N e_k at the first
// invertible coordinate k plus elimination columns; identity when g = 0.
IntMatrix sis_perp_basis(const Int& N, const IntVec& g);

// LLL on the perpendicular lattice (affine instances are solved in lifted
// coordinates with h0 first); returns the shortest reduced basis vector.
// Always congruence-exact; the norm quality is whatever LLL achieves.
SisSolution solve_lll(const SisInstance& inst);

// Solver handle used by the equivalence argument and the reduction harness.
// Implementations must not look at anything besides the instance handed in.
using SisOracleFn =
    std::function<std::optional<SisSolution>(const SisInstance&, RngStream&)>;

// Oracle sampling uniformly among all solutions within oracle_bound(inst).
SisOracleFn make_bruteforce_oracle();
// Deterministic first-found variant.
SisOracleFn make_bruteforce_oracle_det();
// LLL-based oracle; deterministic, may exceed the bound (gamma surfaces it).
SisOracleFn make_lll_oracle();

// Homogeneous solver at exponent delta from two affine-oracle calls at
// delta/2 (second call on h0^{-1} g); the combined coefficients satisfy
// max <= n^{delta/2} + n^delta <= 2 n^delta.  Returns nullopt when the
// oracle fails; retries (affine term not invertible mod N, or a zero
// combination) are capped and raise ContractError when exhausted.
std::optional<SisSolution> hom_from_nonhom(const SisInstance& inst,
                                           const SisOracleFn& oracle,
                                           RngStream& rng,
                                           int max_retries = 16);

// Exact diagnostic for the retry cap above: enumerates every admissible
// answer of the affine half-exponent instance and returns the fraction whose
// affine coordinate is invertible mod N.  Returns -1 when no admissible
// answer exists at all.  A fraction of 0 means hom_from_nonhom is stuck no
// matter how many retries it gets; harnesses that need guaranteed progress
// should screen random instances on this value.  Enumeration cost is
// (2*floor(n^{delta/2})+1)^(n+1); raises BudgetError past ~2e6 points.
double affine_invertible_fraction(const SisInstance& inst);

// Companion diagnostic for the other retry path.  The combination step can
// only produce a nonzero vector when the two oracle answers are not
// proportional, so an admissible set whose tails all lie on one integer
// line loops the proportional-redraw branch to the cap regardless of the
// oracle.  Returns the largest projective-direction share among the tails
// of the admissible half-exponent answers (1.0 = all collinear: guaranteed
// stuck), or -1 when no admissible answer exists.  A conservative proxy:
// screening on a share <= 3/4 together with an invertible fraction >= 1/2
// keeps the per-instance stall probability negligible.  Same enumeration
// budget as affine_invertible_fraction.
double affine_direction_spread(const SisInstance& inst);

// Affine instance whose solution set mod N equals the lattice of S taken
// coordinate-wise mod N: g = (b_2, ..., b_n), solutions (h0; h_2..h_n) with
// sum h_i b_i = h0 (mod N).  Requires dim >= 2.
SisInstance snf_to_sis(const SnfBasis& S);
// Enumerates both membership predicates over F_N^dim and reports equality.
bool sis_lattice_equals_snf(const SnfBasis& S);

// lambda_1 statistics of random perpendicular lattices.
struct DensityResult {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::vector<Int> lambda1_sq;  // exact squared first minimum, per trial
    std::vector<char> ge_alpha;   // per-trial outcome of the threshold test
    std::size_t count_ge = 0;     // trials with lambda_1 >= alpha n^delta
    bool all_det_le_modulus = true;
};
DensityResult density_experiment(const Int& N, const Rat& delta,
                                 std::size_t trials, const Rat& alpha,
                                 RngStream& rng);

// Text formats.  Instance: line 1 "N delta n homogeneous_flag" (delta as a
// canonical rational, 0 when absent), line 2 the g entries.  Solution: one
// line of h entries, h0 first when affine.
std::string write_sis_instance(const SisInstance& inst);
SisInstance read_sis_instance(std::istream& in);
SisInstance read_sis_instance_file(const std::string& path);
std::string write_sis_solution(const SisSolution& sol);
IntVec read_sis_solution(std::istream& in);
IntVec read_sis_solution_file(const std::string& path);

}  // namespace latsnf
