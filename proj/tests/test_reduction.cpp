#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "latsnf/errors.hpp"
#include "latsnf/lattice.hpp"
#include "latsnf/primes.hpp"
#include "latsnf/reduction.hpp"
#include "latsnf/sis.hpp"

using namespace latsnf;

namespace {

IntMatrix basis22() {
    IntMatrix B(2, 2);
    B(0, 0) = 2; B(0, 1) = 1;
    B(1, 0) = 0; B(1, 1) = 3;
    return B;
}

GddInstance inst22(long x, long y) {
    GddInstance inst;
    inst.B = basis22();
    inst.v = IntVec{Int(x), Int(y)};
    return inst;
}

// The distance guarantee for the 2x2 basis, recomputed from first
// principles: constant * phi * n^{1.5+d} * max{n, log2 det}^{1+d} with
// n = 2, det = 6, d = 1.
double bound22(double constant, double phi) {
    const double logdet = std::log2(6.0);
    return constant * phi * std::pow(2.0, 2.5) * logdet * logdet;
}

Int dist2_exact(const IntVec& x, const IntVec& v) {
    Int d2 = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const Int d = x[j] - v[j];
        d2 += d * d;
    }
    return d2;
}

const std::set<std::string> kFailReasons = {
    "oracle-failed", "coefficient-sum-mismatch", "c-zero-resample-exhausted"};

}  // namespace

TEST_CASE("trace fields are recomputable from modulus, exponent, and smoothing") {
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    RngStream rng(42);
    const GddOutcome out = gdd_reduce_once(inst22(5, 1), cfg, rng);
    const ReductionTrace& tr = out.trace;

    // Deterministic pipeline values for this basis.
    CHECK(tr.N == 55399);
    CHECK(tr.T == 96);
    CHECK(is_prime(tr.N));

    // The published attempt parameters follow from (N, delta, phi) alone.
    CHECK(tr.m == dimension_for_modulus(tr.N, cfg.delta));
    CHECK(tr.m == 7);
    CHECK(tr.epsilon == doctest::Approx(std::pow(7.0, -5.0)));
    CHECK(tr.phi > 0);
    const double s_cap = tr.N.get_d() * 0.5;
    CHECK(tr.s == doctest::Approx(std::min(tr.T.get_d() * tr.phi, s_cap)));
    CHECK(tr.s < s_cap);  // no clamp at this size

    // Scaling constant: nonzero, symmetric range floor(m^{1+d}).
    CHECK(tr.c != 0);
    CHECK(int_abs(tr.c) <= pow_floor(tr.m, Rat(2)));
    CHECK(pow_floor(tr.m, Rat(2)) == 49);

    if (tr.oracle_success) {
        CHECK(kFailReasons.count(tr.fail_reason) + tr.success == 1);
        if (tr.fail_reason == "coefficient-sum-mismatch")
            CHECK(tr.sum_coeff != tr.c);
    }
    CHECK(tr.ms_setup >= 0);
    CHECK(tr.ms_sampling >= 0);
    CHECK(tr.ms_oracle >= 0);
}

TEST_CASE("every decoded point is a lattice member within the bound") {
    const LatticeBasis L(basis22());
    struct Target { long x, y; };
    for (const Target t : {Target{5, 1}, Target{4, -6}, Target{0, 0}}) {
        ReductionConfig cfg;
        cfg.delta = Rat(1);
        cfg.trial_budget = 400;
        cfg.seed = 1;
        const GddInstance inst = inst22(t.x, t.y);
        const GddRun run = gdd_reduce_run(inst, cfg);
        REQUIRE(run.x_out.has_value());
        CHECK(run.trials_used <= 400);

        // Independent membership certificate against the input basis.
        CHECK(membership(L, *run.x_out).has_value());

        const ReductionTrace& tr = run.success_trace;
        CHECK(tr.success);
        CHECK(tr.oracle_success);
        CHECK(tr.fail_reason.empty());
        CHECK(tr.sum_coeff == tr.c);
        CHECK(tr.achieved_dist2 == dist2_exact(*run.x_out, inst.v));
        CHECK(tr.achieved_distance ==
              doctest::Approx(std::sqrt(tr.achieved_dist2.get_d())));
        CHECK(tr.bound_ok);
        CHECK(tr.achieved_distance <= tr.distance_bound);
        CHECK(tr.distance_bound == doctest::Approx(bound22(8.0, tr.phi)));

        for (const auto& [reason, count] : run.fail_tally) {
            CHECK(kFailReasons.count(reason) == 1);
            CHECK(count > 0);
        }

        // The convenience wrapper lands on the same point.
        CHECK(gdd_reduce(inst, cfg) == *run.x_out);
    }

    // A target already in the lattice still decodes to a member (the
    // guarantee is a distance bound, not exact recovery).
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.trial_budget = 400;
    cfg.seed = 1;
    const GddRun run = gdd_reduce_run(inst22(4, -6), cfg);  // = B * (3, -2)
    REQUIRE(run.x_out.has_value());
    CHECK(membership(L, *run.x_out).has_value());
}

TEST_CASE("amplified driver reproduces bit-identically under one seed") {
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.trial_budget = 400;
    cfg.seed = 7;
    const GddInstance inst = inst22(5, 1);
    const GddRun a = gdd_reduce_run(inst, cfg);
    const GddRun b = gdd_reduce_run(inst, cfg);
    REQUIRE(a.x_out.has_value());
    REQUIRE(b.x_out.has_value());
    CHECK(*a.x_out == *b.x_out);
    CHECK(a.trials_used == b.trials_used);
    CHECK(a.fail_tally == b.fail_tally);
    CHECK(a.success_trace.c == b.success_trace.c);
    CHECK(a.success_trace.sum_coeff == b.success_trace.sum_coeff);
    CHECK(a.success_trace.achieved_dist2 == b.success_trace.achieved_dist2);

    // A different seed explores a different trajectory.
    ReductionConfig other = cfg;
    other.seed = 8;
    const GddRun c = gdd_reduce_run(inst, other);
    CHECK((c.trials_used != a.trials_used ||
           (c.x_out.has_value() && *c.x_out != *a.x_out)));

    // Worker-pool execution folds to the same lowest-index success.
    ReductionConfig par = cfg;
    par.jobs = 4;
    const GddRun d = gdd_reduce_run(inst, par);
    REQUIRE(d.x_out.has_value());
    CHECK(*d.x_out == *a.x_out);
    CHECK(d.trials_used == a.trials_used);
    CHECK(d.fail_tally == a.fail_tally);

    ReductionConfig spar;
    spar.delta = Rat(1);
    spar.trial_budget = 60;
    spar.seed = 11;
    const SivpResult s1 = sivp_reduce(basis22(), spar);
    spar.jobs = 3;
    const SivpResult s2 = sivp_reduce(basis22(), spar);
    CHECK(s1.vectors == s2.vectors);
    CHECK(s1.trials_used == s2.trials_used);
}

TEST_CASE("failure reasons are tallied and surfaced") {
    const GddInstance inst = inst22(5, 1);

    // Oracle that never answers: every trial is oracle-failed and the
    // wrapper reports the tally in its message.
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.trial_budget = 3;
    cfg.seed = 4;
    cfg.oracle = [](const SisInstance&, RngStream&) {
        return std::optional<SisSolution>();
    };
    const GddRun run = gdd_reduce_run(inst, cfg);
    CHECK_FALSE(run.x_out.has_value());
    CHECK(run.trials_used == 3);
    CHECK(run.fail_tally.at("oracle-failed") == 3);
    try {
        gdd_reduce(inst, cfg);
        FAIL("expected BudgetError");
    } catch (const BudgetError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3 trials") != std::string::npos);
        CHECK(msg.find("oracle-failed=3") != std::string::npos);
    }

    // A throwing oracle is recorded the same way, not rethrown.
    cfg.oracle = [](const SisInstance&, RngStream&) -> std::optional<SisSolution> {
        throw BudgetError("solver out of budget");
    };
    cfg.trial_budget = 2;
    const GddRun thrown = gdd_reduce_run(inst, cfg);
    CHECK_FALSE(thrown.x_out.has_value());
    CHECK(thrown.fail_tally.at("oracle-failed") == 2);

    // With the built-in solver, unmatched coefficient sums dominate; the
    // tally never invents reasons outside the contract.
    ReductionConfig small;
    small.delta = Rat(1);
    small.trial_budget = 5;
    small.seed = 9;
    const GddRun mism = gdd_reduce_run(inst, small);
    std::size_t tallied = mism.trials_used - (mism.x_out ? 1 : 0);
    std::size_t total = 0;
    for (const auto& [reason, count] : mism.fail_tally) {
        CHECK(kFailReasons.count(reason) == 1);
        total += count;
    }
    CHECK(total == tallied);

    // Mismatch traces still publish the solver's answer.
    RngStream rng(2);
    for (int t = 0; t < 40; ++t) {
        ReductionConfig once;
        once.delta = Rat(1);
        const GddOutcome out = gdd_reduce_once(inst, once, rng);
        if (out.trace.fail_reason == "coefficient-sum-mismatch") {
            CHECK(out.trace.oracle_success);
            CHECK_FALSE(out.trace.success);
            CHECK(out.trace.sum_coeff != out.trace.c);
            CHECK_FALSE(out.x_out.has_value());
            return;
        }
    }
    FAIL("no coefficient-sum-mismatch observed in 40 attempts");
}

TEST_CASE("the solver sees only the batch of first coordinates") {
    struct Seen {
        Int N;
        Rat delta;
        std::size_t n;
        bool homogeneous;
        IntVec g;
    };
    std::vector<Seen> calls;
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.trial_budget = 50;
    cfg.seed = 1;
    cfg.oracle = [&calls](const SisInstance& si, RngStream& r) {
        calls.push_back(Seen{si.N, si.delta, si.n, si.homogeneous, si.g});
        return solve_bruteforce_random(si, oracle_bound(si), r);
    };
    const GddRun run = gdd_reduce_run(inst22(5, 1), cfg);
    REQUIRE(run.x_out.has_value());
    CHECK(calls.size() == run.trials_used);
    REQUIRE(calls.size() >= 2);
    for (const Seen& s : calls) {
        CHECK(s.N == 55399);
        CHECK(s.delta == Rat(1));
        CHECK(s.n == 7);
        CHECK(s.homogeneous);
        REQUIRE(s.g.size() == 7);
        for (const Int& a : s.g) {
            CHECK(a >= 0);
            CHECK(a < s.N);
        }
    }
    // Fresh batches per trial, not one instance replayed.
    CHECK(calls.front().g != calls.back().g);
}

TEST_CASE("reported solver quality scales the guarantee") {
    const GddInstance inst = inst22(5, 1);

    // Honest answers, inflated quality report: the bound stretches by the
    // reported factor and the run is flagged.
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.trial_budget = 400;
    cfg.seed = 7;
    cfg.oracle = [](const SisInstance& si, RngStream& r) {
        auto sol = solve_bruteforce_random(si, oracle_bound(si), r);
        if (sol) sol->gamma = 2.5;
        return sol;
    };
    const GddRun run = gdd_reduce_run(inst, cfg);
    REQUIRE(run.x_out.has_value());
    const ReductionTrace& tr = run.success_trace;
    CHECK(tr.degraded);
    CHECK(tr.oracle_gamma == doctest::Approx(2.5));
    CHECK(tr.distance_bound == doctest::Approx(2.5 * bound22(8.0, tr.phi)));

    // The lattice-relation solver keeps within the norm budget here, so the
    // run stays undegraded with the unscaled bound.
    ReductionConfig lcfg;
    lcfg.delta = Rat(1);
    lcfg.trial_budget = 400;
    lcfg.seed = 2;
    lcfg.oracle = make_lll_oracle();
    const GddRun lrun = gdd_reduce_run(inst, lcfg);
    REQUIRE(lrun.x_out.has_value());
    CHECK(lrun.success_trace.oracle_gamma > 0);
    CHECK(lrun.success_trace.oracle_gamma <= 1.0);
    CHECK_FALSE(lrun.success_trace.degraded);
    CHECK(lrun.success_trace.distance_bound ==
          doctest::Approx(bound22(8.0, lrun.success_trace.phi)));

    // The surfaced constant feeds the bound linearly.
    ReductionConfig wide;
    wide.delta = Rat(1);
    wide.trial_budget = 400;
    wide.seed = 1;
    wide.constant = 16.0;
    const GddRun wrun = gdd_reduce_run(inst, wide);
    REQUIRE(wrun.x_out.has_value());
    CHECK(wrun.success_trace.distance_bound ==
          doctest::Approx(bound22(16.0, wrun.success_trace.phi)));
}

TEST_CASE("explicit smoothing bound is honored") {
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.phi = 3.0;
    cfg.trial_budget = 400;
    cfg.seed = 5;
    const GddRun run = gdd_reduce_run(inst22(5, 1), cfg);
    REQUIRE(run.x_out.has_value());
    const ReductionTrace& tr = run.success_trace;
    CHECK(tr.phi == 3.0);
    CHECK(tr.s == doctest::Approx(tr.T.get_d() * 3.0));
    CHECK(tr.distance_bound == doctest::Approx(bound22(8.0, 3.0)));
}

TEST_CASE("independent short vectors from the homogeneous variant") {
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.trial_budget = 60;
    cfg.seed = 11;
    const SivpResult res = sivp_reduce(basis22(), cfg);
    REQUIRE(res.vectors.size() == 2);
    CHECK(res.norms2.size() == 2);

    const LatticeBasis L(basis22());
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(membership(L, res.vectors[i]).has_value());
        CHECK(res.norms2[i] == dist2_exact(res.vectors[i], IntVec{Int(0), Int(0)}));
        CHECK(res.norms2[i] > 0);
    }
    // Exact independence certificate.
    const Int det2 = res.vectors[0][0] * res.vectors[1][1] -
                     res.vectors[0][1] * res.vectors[1][0];
    CHECK(det2 != 0);
    CHECK(res.bound > 0);
    CHECK(res.all_within_bound);
    for (const auto& [reason, count] : res.fail_tally)
        CHECK((kFailReasons.count(reason) == 1 || reason == "dependent-output"));

    // Reproducible under the seed; a different seed moves the outputs.
    const SivpResult again = sivp_reduce(basis22(), cfg);
    CHECK(again.vectors == res.vectors);
    ReductionConfig other = cfg;
    other.seed = 12;
    const SivpResult moved = sivp_reduce(basis22(), other);
    REQUIRE(moved.vectors.size() == 2);
    CHECK(moved.vectors != res.vectors);

    // Exhausting the budget without enough independent vectors is an error.
    ReductionConfig tight = cfg;
    tight.trial_budget = 1;
    tight.oracle = [](const SisInstance&, RngStream&) {
        return std::optional<SisSolution>();
    };
    CHECK_THROWS_AS(sivp_reduce(basis22(), tight), BudgetError);

    // One-dimensional variant: a single nonzero multiple of the generator.
    IntMatrix B1(1, 1);
    B1(0, 0) = 5;
    ReductionConfig c1;
    c1.delta = Rat(1);
    c1.trial_budget = 100;
    c1.seed = 2;
    const SivpResult one = sivp_reduce(B1, c1);
    REQUIRE(one.vectors.size() == 1);
    CHECK(one.vectors[0][0] != 0);
    CHECK(one.vectors[0][0] % 5 == 0);
}

TEST_CASE("single-dimension decoding") {
    GddInstance inst;
    inst.B = IntMatrix(1, 1);
    inst.B(0, 0) = 5;
    inst.v = IntVec{Int(12)};
    ReductionConfig cfg;
    cfg.delta = Rat(1);
    cfg.trial_budget = 200;
    cfg.seed = 3;
    const GddRun run = gdd_reduce_run(inst, cfg);
    REQUIRE(run.x_out.has_value());
    CHECK((*run.x_out)[0] % 5 == 0);
    const ReductionTrace& tr = run.success_trace;
    CHECK(tr.N == 11);
    CHECK(tr.T == 2);
    CHECK(tr.m == dimension_for_modulus(Int(11), Rat(1)));
    CHECK(tr.m == 3);
    // T * phi exceeds the modulus here, so the sampler width is clamped
    // just below N / 2.
    CHECK(tr.s == doctest::Approx(5.5));
    CHECK(tr.s < 5.5);
    CHECK(tr.bound_ok);
}

TEST_CASE("solver view statistics are constant-blind") {
    const SnfBasis S(Int(101), IntVec{Int(9)});
    ReductionConfig cfg;
    cfg.delta = Rat(1);

    RngStream rng(99);
    const BlindnessResult pos = oracle_blindness_test(S, cfg, 1200, rng);
    CHECK(pos.N == 101);
    CHECK(pos.m == 4);
    CHECK(pos.epsilon == doctest::Approx(std::pow(4.0, -5.0)));
    CHECK(pos.s == doctest::Approx(50.5));
    CHECK(pos.radius > 0);
    // Above the smoothing width the two conditioned views collapse: the
    // distance is within the estimator's noise plus the smoothing slack.
    CHECK(pos.tv <= 2.0 * double(pos.m) * pos.epsilon + pos.radius);

    // Same constant on both sides: pure estimator noise.
    RngStream rng2(101);
    const BlindnessResult same =
        oracle_blindness_test(S, cfg, 1200, rng2, Int(2), Int(2));
    CHECK(same.tv <= same.radius);

    // Far below the smoothing width the solver's view pins the constant.
    ReductionConfig narrow = cfg;
    narrow.phi = 0.05;
    RngStream rng3(100);
    const BlindnessResult neg = oracle_blindness_test(S, narrow, 300, rng3);
    CHECK(neg.s == doctest::Approx(0.05));
    CHECK(neg.tv > 0.9);

    // Desk-scale guardrails.
    RngStream r(1);
    CHECK_THROWS_AS(
        oracle_blindness_test(SnfBasis(Int(211), IntVec{Int(3)}), cfg, 10, r),
        ContractError);
    CHECK_THROWS_AS(oracle_blindness_test(
                        SnfBasis(Int(7), IntVec{Int(1), Int(2), Int(3)}), cfg,
                        10, r),
                    ContractError);
    CHECK_THROWS_AS(oracle_blindness_test(S, cfg, 0, r), ContractError);
    CHECK_THROWS_AS(oracle_blindness_test(S, cfg, 10, r, Int(101), Int(2)),
                    ContractError);
    ReductionConfig bad = cfg;
    bad.delta = Rat(0);
    CHECK_THROWS_AS(oracle_blindness_test(S, bad, 10, r), ContractError);
}

TEST_CASE("input contracts are enforced") {
    RngStream rng(1);
    ReductionConfig cfg;
    cfg.delta = Rat(1);

    GddInstance bad;
    bad.B = IntMatrix(2, 3);
    bad.v = IntVec{Int(1), Int(2)};
    CHECK_THROWS_AS(gdd_reduce_once(bad, cfg, rng), ContractError);

    GddInstance mismatch = inst22(5, 1);
    mismatch.v.push_back(Int(0));
    CHECK_THROWS_AS(gdd_reduce_once(mismatch, cfg, rng), ContractError);

    ReductionConfig zero_delta;
    zero_delta.delta = Rat(0);
    CHECK_THROWS_AS(gdd_reduce_once(inst22(5, 1), zero_delta, rng), ContractError);

    ReductionConfig no_budget;
    no_budget.delta = Rat(1);
    no_budget.trial_budget = 0;
    CHECK_THROWS_AS(gdd_reduce_run(inst22(5, 1), no_budget), ContractError);

    ReductionConfig flat;
    flat.delta = Rat(1);
    flat.phi = 0.0;
    CHECK_THROWS_AS(gdd_reduce_once(inst22(5, 1), flat, rng), ContractError);

    // Malformed solver answers are contract violations, not failures.
    ReductionConfig long_ans;
    long_ans.delta = Rat(1);
    long_ans.oracle = [](const SisInstance& si, RngStream&) {
        SisSolution s;
        s.h.assign(si.n + 1, Int(0));
        s.h[0] = 1;
        return std::optional<SisSolution>(s);
    };
    CHECK_THROWS_AS(gdd_reduce_once(inst22(5, 1), long_ans, rng), ContractError);

    ReductionConfig zero_ans;
    zero_ans.delta = Rat(1);
    zero_ans.oracle = [](const SisInstance& si, RngStream&) {
        SisSolution s;
        s.h.assign(si.n, Int(0));
        return std::optional<SisSolution>(s);
    };
    CHECK_THROWS_AS(gdd_reduce_once(inst22(5, 1), zero_ans, rng), ContractError);
}
