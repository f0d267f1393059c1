#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latsnf/matrix.hpp"
#include "latsnf/rng.hpp"
#include "latsnf/sis.hpp"
#include "latsnf/snf.hpp"

namespace latsnf {

// Guaranteed-distance decoding input: full-rank integer basis (columns) and
// an integer target vector of matching dimension.
struct GddInstance {
    IntMatrix B;
    IntVec v;
};

struct ReductionConfig {
    Rat delta = Rat(1);              // solver exponent, > 0
    std::optional<double> phi;       // smoothing upper bound; estimated when absent
    std::size_t trial_budget = 1;
    std::uint64_t seed = 0;
    SisOracleFn oracle;              // empty: randomized exhaustive solver at the
                                     // recorded bound
    mp_bitcnt_t precision_bits = 256;
    double constant = 8.0;           // explicit constant in the distance bound
    std::size_t jobs = 1;            // worker threads over independent trials;
                                     // results are identical for any value
                                     // (lowest-index success wins).  Custom
                                     // oracles must be thread-safe when > 1.
};

// One decoding attempt, fully recomputable: m is minimal with m^{dm} >= N,
// epsilon = m^-5, s = T * phi.
struct ReductionTrace {
    std::size_t m = 0;
    Int N;
    Int T;
    double s = 0;
    double epsilon = 0;
    double phi = 0;
    Int c;
    bool success = false;
    bool oracle_success = false;
    Int sum_coeff;
    Int achieved_dist2;          // exact |x_out - v|^2 on success
    double achieved_distance = 0;
    double distance_bound = 0;   // constant * phi * n^{1.5+d} * max{n, log2 det}^{1+d},
                                 // scaled by gamma when the oracle overshoots
    bool bound_ok = false;
    bool degraded = false;       // oracle returned gamma > 1
    double oracle_gamma = 0;
    std::string fail_reason;     // one of: oracle-failed,
                                 // coefficient-sum-mismatch,
                                 // c-zero-resample-exhausted; empty on success
    double ms_setup = 0;
    double ms_sampling = 0;
    double ms_oracle = 0;
    double ms_backmap = 0;
};

struct GddOutcome {
    ReductionTrace trace;
    std::optional<IntVec> x_out;
};

GddOutcome gdd_reduce_once(const GddInstance& inst, const ReductionConfig& cfg,
                           RngStream& rng);

// Amplified driver: independent attempts on substreams derived from
// cfg.seed, stopping at the first success.
struct GddRun {
    std::optional<IntVec> x_out;
    ReductionTrace success_trace;               // valid when x_out is set
    std::size_t trials_used = 0;                // attempts consumed
    std::map<std::string, std::size_t> fail_tally;
};

GddRun gdd_reduce_run(const GddInstance& inst, const ReductionConfig& cfg);

// Convenience wrapper: the decoded point, or BudgetError carrying the
// tallied failure reasons.
IntVec gdd_reduce(const GddInstance& inst, const ReductionConfig& cfg);

// Short-vectors variant: target and translation fixed at zero, any solver
// success accepted, outputs collected until n linearly independent vectors.
struct SivpResult {
    std::vector<IntVec> vectors;
    std::vector<Int> norms2;
    double bound = 0;            // same distance bound, applied to |x_out|
    bool all_within_bound = false;
    std::size_t trials_used = 0;
    std::map<std::string, std::size_t> fail_tally;
};

SivpResult sivp_reduce(const IntMatrix& B, const ReductionConfig& cfg);

// Distinguishability probe for the solver's view: pooled first-coordinate
// statistics of the m-batches handed to the solver, conditioned on two fixed
// scaling constants.  Small parameters only (N <= 101, dim <= 3).
struct BlindnessResult {
    double tv = 0;
    double radius = 0;           // confidence radius of the pooled estimate
    std::size_t m = 0;
    double epsilon = 0;
    double s = 0;
    Int N;
};

BlindnessResult oracle_blindness_test(const SnfBasis& S,
                                      const ReductionConfig& cfg,
                                      std::size_t trials, RngStream& rng,
                                      const Int& c1 = Int(1),
                                      const Int& c2 = Int(2));

}  // namespace latsnf
