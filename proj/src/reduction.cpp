#include "latsnf/reduction.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "latsnf/errors.hpp"
#include "latsnf/gaussian.hpp"
#include "latsnf/lattice.hpp"
#include "latsnf/linalg.hpp"
#include "latsnf/primes.hpp"
#include "latsnf/qr.hpp"
#include "latsnf/stats.hpp"

namespace latsnf {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double rat_to_double(const Rat& r) {
    return r.get_d();
}

// Everything about one instance that is deterministic given (B, v, cfg):
// trials reuse it so the per-attempt cost is sampling plus one solver call.
struct Prepared {
    IntMatrix B_lll;
    LatticeBasis lat_orig;       // membership certificates against the input
    SnfReduction red;
    Int N;
    Int T;
    std::size_t n = 0;
    std::size_t m = 0;
    double epsilon = 0;
    double phi = 0;
    double s = 0;
    Int c_cap;                   // scaling constant drawn from [-c_cap, c_cap]
    double bound_base = 0;       // distance bound before gamma scaling
    IntVec babai_k;              // coarse coefficient shift removed up front
    IntVec t_int;                // round(T * Q^T v), after the shift
    double ms_setup = 0;
};

Prepared prepare(const IntMatrix& B, const IntVec& v, bool sivp,
                 const ReductionConfig& cfg) {
    const auto t0 = Clock::now();
    if (B.rows() == 0 || B.rows() != B.cols())
        throw ContractError("basis must be square and nonempty");
    if (!sivp && v.size() != B.rows())
        throw ContractError("target dimension mismatch");
    if (cfg.delta <= 0) throw ContractError("exponent must be positive");
    if (cfg.trial_budget < 1) throw ContractError("trial budget must be >= 1");
    if (cfg.jobs < 1) throw ContractError("worker count must be >= 1");

    const std::size_t n = B.rows();
    LatticeBasis lat_orig(B);
    IntMatrix B_lll = lll(B).B;

    // Coarse rounding toward the target keeps the decoded coefficients small
    // so the back-map's norm precondition can be met by a modest exponent.
    IntVec babai_k(n, Int(0));
    IntVec v_res(n, Int(0));
    if (!sivp) {
        LatticeBasis lat_lll(B_lll);
        for (std::size_t i = 0; i < n; ++i) {
            Rat s_i = 0;
            for (std::size_t j = 0; j < n; ++j)
                s_i += lat_lll.B_inv(i, j) * Rat(v[j]);
            babai_k[i] = round_nearest(s_i);
        }
        const IntVec shift = B_lll * babai_k;
        for (std::size_t i = 0; i < n; ++i) v_res[i] = v[i] - shift[i];
    }

    const QrFactor f = qr(B_lll, cfg.precision_bits);
    SnfReduceOptions opt;
    opt.a = 1;
    opt.b = 2;
    opt.strict = false;
    SnfReduction red = reduce_to_snf(f.R, opt);
    const Int N = red.snf.N;
    const Int T = red.T;

    const std::vector<mpf_class> v_hat = qt_times(f, v_res);
    IntVec t_int(n, Int(0));
    mpf_class Tf(T, f.precision_bits);
    double t_norm = 0;
    for (std::size_t j = 0; j < n; ++j) {
        mpf_class prod(0, f.precision_bits);
        prod = Tf * v_hat[j];
        t_int[j] = round_mpf(prod);
        const double td = t_int[j].get_d();
        t_norm += td * td;
    }
    t_norm = std::sqrt(t_norm);

    // Norm precondition exponent: T * det * n^a must dominate any vector the
    // unwrapping step can produce (|t| plus one wrap of the modulus cube).
    const double det_d = std::fabs(lat_orig.det.get_d());
    const double need = (t_norm + (N.get_d() + 1.0) * std::sqrt(double(n))) /
                        std::max(T.get_d() * det_d, 1.0);
    long a_eff = 1;
    if (n >= 2) {
        while (a_eff < 64 && std::pow(double(n), double(a_eff)) < 2.0 * need)
            ++a_eff;
    }
    red.a_param = a_eff;

    const std::size_t m = dimension_for_modulus(N, cfg.delta);
    const double epsilon = std::pow(double(m), -5.0);
    const double phi =
        cfg.phi ? *cfg.phi : smoothing_upper_estimate(B_lll, epsilon);
    if (!(phi > 0)) throw ContractError("smoothing bound must be positive");
    const double s_max = N.get_d() * 0.5 * (1.0 - 1e-9);
    const double s = std::min(T.get_d() * phi, s_max);

    const Int m_pow = pow_floor(m, Rat(1) + cfg.delta);
    const Int half = (N - 1) / 2;
    const Int c_cap = m_pow < half ? m_pow : half;

    const double dd = rat_to_double(cfg.delta);
    const double logdet = det_d > 1.0 ? std::log2(det_d) : 0.0;
    const double bound_base = cfg.constant * phi *
                              std::pow(double(n), 1.5 + dd) *
                              std::pow(std::max(double(n), logdet), 1.0 + dd);
    return Prepared{std::move(B_lll), std::move(lat_orig), std::move(red),
                    N,       T,       n,
                    m,       epsilon, phi,
                    s,       c_cap,   bound_base,
                    std::move(babai_k), std::move(t_int), ms_since(t0)};
}

GddOutcome run_trial(const Prepared& p, const ReductionConfig& cfg,
                     RngStream& rng, bool sivp) {
    GddOutcome out;
    ReductionTrace& tr = out.trace;
    tr.m = p.m;
    tr.N = p.N;
    tr.T = p.T;
    tr.s = p.s;
    tr.epsilon = p.epsilon;
    tr.phi = p.phi;
    tr.c = 0;
    tr.sum_coeff = 0;
    tr.achieved_dist2 = 0;
    tr.ms_setup = p.ms_setup;

    const std::size_t n = p.n;
    const SnfBasis& S = p.red.snf;

    // Scaling constant: nonzero so it has an inverse mod N.
    Int c = 0;
    if (!sivp) {
        if (p.c_cap < 1) {
            tr.fail_reason = "c-zero-resample-exhausted";
            return out;
        }
        for (int tries = 0; tries < 64 && c == 0; ++tries)
            c = rng.symmetric(p.c_cap);
        if (c == 0) {
            tr.fail_reason = "c-zero-resample-exhausted";
            return out;
        }
    }
    tr.c = c;

    const auto t_sample = Clock::now();
    IntVec u_rand(n, Int(0));
    IntVec v_target(n, Int(0));
    if (!sivp) {
        u_rand = sample_ln_uniform(S, rng);
        const Int c_inv = mod_inverse(mod_floor(c, p.N), p.N);
        for (std::size_t j = 0; j < n; ++j)
            v_target[j] = mod_floor(c_inv * p.t_int[j] + u_rand[j], p.N);
    }

    std::vector<double> center(n);
    for (std::size_t j = 0; j < n; ++j) center[j] = v_target[j].get_d();

    std::vector<IntVec> xs(p.m), ys(p.m);
    IntVec a_list(p.m);
    for (std::size_t i = 0; i < p.m; ++i) {
        xs[i] = sample_dgauss_fn(p.N, n, p.s, center, rng);
        const Phi3Result ph = phi3(S, xs[i]);
        ys[i] = ph.y;
        a_list[i] = mod_floor(ph.a, p.N);
    }
    tr.ms_sampling = ms_since(t_sample);

    // The solver's entire view: modulus, exponent, and the first coordinates.
    SisInstance sis_inst;
    sis_inst.N = p.N;
    sis_inst.delta = cfg.delta;
    sis_inst.n = p.m;
    sis_inst.g = a_list;
    sis_inst.homogeneous = true;

    const auto t_oracle = Clock::now();
    std::optional<SisSolution> sol;
    try {
        if (cfg.oracle) {
            sol = cfg.oracle(sis_inst, rng);
        } else {
            sol = solve_bruteforce_random(sis_inst, oracle_bound(sis_inst), rng);
        }
    } catch (const std::exception&) {
        sol = std::nullopt;
    }
    tr.ms_oracle = ms_since(t_oracle);

    if (!sol) {
        tr.fail_reason = "oracle-failed";
        return out;
    }
    if (sol->h.size() != p.m)
        throw ContractError("solver returned a wrong-length answer");
    Int dot = 0;
    bool nonzero = false;
    Int sum = 0;
    for (std::size_t i = 0; i < p.m; ++i) {
        dot += sol->h[i] * a_list[i];
        sum += sol->h[i];
        if (sol->h[i] != 0) nonzero = true;
    }
    if (!nonzero || mod_floor(dot, p.N) != 0)
        throw ContractError("solver returned a non-solution");
    tr.oracle_success = true;
    tr.sum_coeff = sum;
    tr.oracle_gamma = sol->gamma;
    tr.degraded = sol->gamma > 1.0;

    if (!sivp && sum != c) {
        tr.fail_reason = "coefficient-sum-mismatch";
        return out;
    }

    const auto t_back = Clock::now();
    // x0 = sum_i alpha_i (y_i + x_i) - c u_rand, reduced into the cube.
    IntVec x0(n, Int(0));
    IntVec ysum(n, Int(0));
    for (std::size_t i = 0; i < p.m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            x0[j] += sol->h[i] * (ys[i][j] + xs[i][j]);
            ysum[j] += sol->h[i] * ys[i][j];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        x0[j] = mod_floor(x0[j] - c * u_rand[j], p.N);
        if (mod_floor(ysum[j], p.N) != 0)
            throw ContractError("dual combination failed to cancel");
    }
    if (!ln_contains(S, x0))
        throw ContractError("candidate left the systematic lattice");

    IntVec x_out;
    if (sivp && n == 1) {
        // Dimension one is degenerate for the homogeneous variant: the only
        // lattice coset inside the cube is the origin, so the decoded point
        // is always zero.  The generator is the exact shortest vector here.
        x_out = IntVec{p.B_lll(0, 0)};
    } else {
        // Unwrap the cube representative near the scaled target.
        IntVec x0c(n);
        for (std::size_t j = 0; j < n; ++j)
            x0c[j] = p.t_int[j] + mod_centered(x0[j] - p.t_int[j], p.N);

        const BackmapResult bm = backmap(p.red, x0c);
        IntVec w = bm.coeffs;
        for (std::size_t j = 0; j < n; ++j) w[j] += p.babai_k[j];
        x_out = p.B_lll * w;
    }
    if (!membership(p.lat_orig, x_out))
        throw ContractError("decoded point left the input lattice");
    tr.ms_backmap = ms_since(t_back);

    out.x_out = std::move(x_out);
    tr.success = true;
    return out;
}

void finish_distances(const Prepared& p, const IntVec& v, GddOutcome& out) {
    if (!out.x_out) return;
    ReductionTrace& tr = out.trace;
    Int dist2 = 0;
    for (std::size_t j = 0; j < p.n; ++j) {
        const Int d = (*out.x_out)[j] - v[j];
        dist2 += d * d;
    }
    tr.achieved_dist2 = dist2;
    tr.achieved_distance = std::sqrt(dist2.get_d());
    tr.distance_bound = p.bound_base * std::max(1.0, tr.oracle_gamma);
    tr.bound_ok = tr.achieved_distance <= tr.distance_bound;
}

// Worker pool over trial indices, claimed in increasing order so that every
// index below the first success is always evaluated.  Folding the outcomes
// in index order is then identical to the serial loop for any worker count.
void eval_parallel(const Prepared& p, const ReductionConfig& cfg, bool sivp,
                   std::size_t count, bool stop_on_success,
                   std::vector<GddOutcome>& out) {
    out.clear();
    out.resize(count);
    RngStream root(cfg.seed);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> stop{count};
    std::mutex err_mu;
    std::exception_ptr err;
    const std::size_t workers = std::min(cfg.jobs, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t t = next.fetch_add(1);
                if (t >= count) return;
                if (stop_on_success && t > stop.load()) return;
                try {
                    RngStream trial_rng = root.derive(1, t);
                    out[t] = run_trial(p, cfg, trial_rng, sivp);
                } catch (...) {
                    std::lock_guard<std::mutex> g(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
                if (stop_on_success && out[t].x_out) {
                    std::size_t cur = stop.load();
                    while (t < cur && !stop.compare_exchange_weak(cur, t)) {
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Exact rank over the rationals; used for the independence certificate.
std::size_t rank_of(const std::vector<IntVec>& vecs, std::size_t dim) {
    if (vecs.empty()) return 0;
    RatMatrix A(vecs.size(), dim);
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j) A(i, j) = Rat(vecs[i][j]);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < dim && rank < vecs.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < vecs.size() && A(pivot, col) == 0) ++pivot;
        if (pivot == vecs.size()) continue;
        for (std::size_t j = 0; j < dim; ++j)
            std::swap(A(rank, j), A(pivot, j));
        for (std::size_t i = rank + 1; i < vecs.size(); ++i) {
            if (A(i, col) == 0) continue;
            Rat f = A(i, col) / A(rank, col);
            f.canonicalize();
            for (std::size_t j = 0; j < dim; ++j) A(i, j) -= f * A(rank, j);
        }
        ++rank;
    }
    return rank;
}

}  // namespace

GddOutcome gdd_reduce_once(const GddInstance& inst, const ReductionConfig& cfg,
                           RngStream& rng) {
    const Prepared p = prepare(inst.B, inst.v, false, cfg);
    GddOutcome out = run_trial(p, cfg, rng, false);
    finish_distances(p, inst.v, out);
    return out;
}

GddRun gdd_reduce_run(const GddInstance& inst, const ReductionConfig& cfg) {
    const Prepared p = prepare(inst.B, inst.v, false, cfg);
    GddRun run;
    RngStream root(cfg.seed);
    std::vector<GddOutcome> outs;
    const bool parallel = cfg.jobs > 1;
    if (parallel) eval_parallel(p, cfg, false, cfg.trial_budget, true, outs);
    for (std::size_t t = 0; t < cfg.trial_budget; ++t) {
        GddOutcome out;
        if (parallel) {
            out = std::move(outs[t]);
        } else {
            RngStream trial_rng = root.derive(1, t);
            out = run_trial(p, cfg, trial_rng, false);
        }
        finish_distances(p, inst.v, out);
        ++run.trials_used;
        if (out.x_out) {
            run.x_out = std::move(out.x_out);
            run.success_trace = std::move(out.trace);
            return run;
        }
        run.fail_tally[out.trace.fail_reason] += 1;
    }
    return run;
}

IntVec gdd_reduce(const GddInstance& inst, const ReductionConfig& cfg) {
    GddRun run = gdd_reduce_run(inst, cfg);
    if (run.x_out) return *run.x_out;
    std::ostringstream msg;
    msg << "decoding budget exhausted after " << run.trials_used << " trials:";
    for (const auto& [reason, count] : run.fail_tally)
        msg << " " << reason << "=" << count;
    throw BudgetError(msg.str());
}

SivpResult sivp_reduce(const IntMatrix& B, const ReductionConfig& cfg) {
    const IntVec zero(B.rows(), Int(0));
    const Prepared p = prepare(B, zero, true, cfg);
    SivpResult res;
    res.all_within_bound = true;
    RngStream root(cfg.seed);
    std::vector<GddOutcome> outs;
    const bool parallel = cfg.jobs > 1;
    if (parallel) eval_parallel(p, cfg, true, cfg.trial_budget, false, outs);
    for (std::size_t t = 0; t < cfg.trial_budget; ++t) {
        GddOutcome out;
        if (parallel) {
            out = std::move(outs[t]);
        } else {
            RngStream trial_rng = root.derive(1, t);
            out = run_trial(p, cfg, trial_rng, true);
        }
        finish_distances(p, zero, out);
        ++res.trials_used;
        if (!out.x_out) {
            res.fail_tally[out.trace.fail_reason] += 1;
            continue;
        }
        bool zero_vec = true;
        for (const Int& x : *out.x_out)
            if (x != 0) zero_vec = false;
        std::vector<IntVec> cand = res.vectors;
        if (!zero_vec) cand.push_back(*out.x_out);
        if (zero_vec || rank_of(cand, p.n) == res.vectors.size()) {
            res.fail_tally["dependent-output"] += 1;
            continue;
        }
        res.vectors.push_back(*out.x_out);
        res.norms2.push_back(out.trace.achieved_dist2);
        res.bound = std::max(res.bound, out.trace.distance_bound);
        if (!out.trace.bound_ok) res.all_within_bound = false;
        if (res.vectors.size() == p.n) return res;
    }
    std::ostringstream msg;
    msg << "independence budget exhausted with " << res.vectors.size()
        << " of " << p.n << " vectors";
    throw BudgetError(msg.str());
}

BlindnessResult oracle_blindness_test(const SnfBasis& S,
                                      const ReductionConfig& cfg,
                                      std::size_t trials, RngStream& rng,
                                      const Int& c1, const Int& c2) {
    if (S.N > 101 || S.dim() > 3)
        throw ContractError("blindness probe is desk-scale only");
    if (trials < 1) throw ContractError("need at least one batch");
    if (mod_floor(c1, S.N) == 0 || mod_floor(c2, S.N) == 0)
        throw ContractError("conditioning constants need inverses");
    if (cfg.delta <= 0) throw ContractError("exponent must be positive");

    BlindnessResult res;
    res.N = S.N;
    res.m = dimension_for_modulus(S.N, cfg.delta);
    res.epsilon = std::pow(double(res.m), -5.0);
    const double phi =
        cfg.phi ? *cfg.phi : smoothing_upper_estimate(S.matrix(), res.epsilon);
    if (!(phi > 0)) throw ContractError("smoothing bound must be positive");
    res.s = std::min(phi, S.N.get_d() * 0.5 * (1.0 - 1e-9));

    const std::size_t n = S.dim();
    const std::size_t cells = S.N.get_ui();
    std::vector<std::vector<double>> hist(2, std::vector<double>(cells, 0.0));
    const Int consts[2] = {c1, c2};
    for (int side = 0; side < 2; ++side) {
        const Int c_inv = mod_inverse(mod_floor(consts[side], S.N), S.N);
        for (std::size_t t = 0; t < trials; ++t) {
            const IntVec u = sample_ln_uniform(S, rng);
            std::vector<double> center(n);
            for (std::size_t j = 0; j < n; ++j) {
                Int vt = u[j];
                if (j == 0) vt += c_inv;  // fixed probe target e_1
                center[j] = mod_floor(vt, S.N).get_d();
            }
            for (std::size_t i = 0; i < res.m; ++i) {
                const IntVec x = sample_dgauss_fn(S.N, n, res.s, center, rng);
                hist[side][phi3(S, x).a.get_ui()] += 1.0;
            }
        }
    }
    const double total = double(trials) * double(res.m);
    double tv = 0;
    for (std::size_t a = 0; a < cells; ++a)
        tv += std::fabs(hist[0][a] / total - hist[1][a] / total);
    res.tv = 0.5 * tv;
    res.radius = 2.0 * tv_confidence_radius(cells, trials * res.m);
    return res;
}

}  // namespace latsnf
