// Command-line front end: file I/O, seeds, subcommand dispatch, the
// statistical bench, and a pinned self-test battery.  Every run prints its
// primary output on stdout and a reproducibility manifest on stderr; with
// --out FILE the output is also written to FILE and the manifest to
// FILE.manifest.  Exit codes: 0 success, 1 domain error (machine-readable
// reason line), 2 usage error.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "latsnf/errors.hpp"
#include "latsnf/gaussian.hpp"
#include "latsnf/lattice.hpp"
#include "latsnf/linalg.hpp"
#include "latsnf/matrix.hpp"
#include "latsnf/primes.hpp"
#include "latsnf/qr.hpp"
#include "latsnf/reduction.hpp"
#include "latsnf/rng.hpp"
#include "latsnf/sis.hpp"
#include "latsnf/snf.hpp"
#include "latsnf/stats.hpp"

using namespace latsnf;

namespace {

constexpr const char* kVersion = "latsnf 1.0";

struct UsageError {
    std::string msg;
};

const char* kUsage =
    "usage: latsnf <subcommand> [flags]\n"
    "subcommands:\n"
    "  hnf         --basis FILE [--transform] [--out FILE]\n"
    "  lll         --basis FILE [--delta-lll P/Q] [--transform] [--out FILE]\n"
    "  snf-reduce  --basis FILE [--relaxed] [--a N] [--b N] [--precision BITS]\n"
    "              [--out FILE]\n"
    "  snf-phi3    --snf FILE --x \"X1 X2 ...\" [--out FILE]\n"
    "  sample      --N MOD --n DIM --s WIDTH [--count K] [--center \"C1 ...\"]\n"
    "              [--seed S] [--out FILE]\n"
    "  smoothing   --basis FILE --epsilon E [--method exact|estimate]\n"
    "              [--rel-tol T] [--out FILE]\n"
    "  sis gen     --N MOD --delta D [--affine] [--seed S] [--out FILE]\n"
    "  sis solve   --instance FILE [--solver bruteforce|random|lll]\n"
    "              [--bound B] [--seed S] [--out FILE]\n"
    "  sis verify  --instance FILE --solution FILE [--bound B]\n"
    "  gdd         --basis FILE --target \"V1 V2 ...\" --delta D [--phi X]\n"
    "              [--trials T] [--seed S] [--oracle bruteforce|lll]\n"
    "              [--constant C] [--precision BITS] [--jobs K] [--out FILE]\n"
    "  sivp        --basis FILE --delta D [--trials T] [--seed S]\n"
    "              [--oracle bruteforce|lll] [--jobs K] [--out FILE]\n"
    "  bench density      --N MOD --delta D --trials T [--alpha P/Q] [--seed S]\n"
    "  bench blindness    --N MOD [--b \"B2 ...\"] [--delta D] [--trials T]\n"
    "                     [--phi X] [--c1 C] [--c2 C] [--seed S]\n"
    "  bench success-rate --basis FILE --target \"V1 ...\" [--deltas \"D1 D2 ...\"]\n"
    "                     [--trials T] [--seed S] [--oracle bruteforce|lll]\n"
    "                     [--jobs K]\n"
    "  bench uniformity   --N MOD [--b \"B2 ...\"] [--epsilon E]\n"
    "                     [--ratios \"R1 R2 ...\"] [--trials T] [--seed S]\n"
    "  selftest    [--seed S]\n"
    "Bench subcommands print CSV (one header line, then rows) on stdout.\n"
    "All randomness derives from the single --seed by counter-mode stream\n"
    "splitting; --jobs parallelizes independent trials without changing any\n"
    "output byte.\n";

// Flags that never take a value.
const std::set<std::string> kBoolFlags = {"transform", "relaxed", "affine",
                                          "help"};

struct Args {
    std::string sub;
    std::string sub2;  // sis / bench mode
    std::map<std::string, std::string> flags;

    bool has(const std::string& k) const { return flags.count(k) != 0; }
    std::string get(const std::string& k, const std::string& dflt) const {
        auto it = flags.find(k);
        return it == flags.end() ? dflt : it->second;
    }
    std::string need(const std::string& k) const {
        auto it = flags.find(k);
        if (it == flags.end()) throw UsageError{"missing required --" + k};
        return it->second;
    }
};

Args parse_args(int argc, char** argv, const std::set<std::string>& known) {
    Args a;
    a.sub = argv[1];
    int i = 2;
    if ((a.sub == "sis" || a.sub == "bench") && i < argc &&
        argv[i][0] != '-') {
        a.sub2 = argv[i];
        ++i;
    }
    for (; i < argc; ++i) {
        std::string tok = argv[i];
        if (tok.rfind("--", 0) != 0)
            throw UsageError{"unexpected argument '" + tok + "'"};
        std::string name = tok.substr(2);
        if (name.empty()) throw UsageError{"empty flag"};
        if (!known.count(name) && name != "help" && name != "out" &&
            name != "seed")
            throw UsageError{"unknown flag --" + name + " for " + a.sub};
        if (kBoolFlags.count(name)) {
            a.flags[name] = "1";
            continue;
        }
        if (i + 1 >= argc) throw UsageError{"flag --" + name + " needs a value"};
        a.flags[name] = argv[++i];
    }
    return a;
}

// ---- small parsing helpers ------------------------------------------------

Int parse_int_flag(const std::string& v, const std::string& name) {
    try {
        return Int(v);
    } catch (const std::exception&) {
        throw UsageError{"--" + name + ": not an integer: '" + v + "'"};
    }
}

long parse_long_flag(const Args& a, const std::string& name, long dflt) {
    if (!a.has(name)) return dflt;
    try {
        std::size_t pos = 0;
        long r = std::stol(a.flags.at(name), &pos);
        if (pos != a.flags.at(name).size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception&) {
        throw UsageError{"--" + name + ": not an integer"};
    }
}

double parse_double_flag(const std::string& v, const std::string& name) {
    try {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception&) {
        throw UsageError{"--" + name + ": not a number: '" + v + "'"};
    }
}

Rat parse_rat_flag(const std::string& v, const std::string& name) {
    try {
        return parse_rat(v);
    } catch (const std::exception&) {
        throw UsageError{"--" + name + ": not a rational: '" + v + "'"};
    }
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

IntVec parse_vec_flag(const std::string& v, const std::string& name) {
    IntVec out;
    for (const std::string& tok : split_ws(v))
        out.push_back(parse_int_flag(tok, name));
    return out;
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string join_vec(const IntVec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += v[i].get_str();
    }
    return s;
}

// ---- manifest -------------------------------------------------------------

std::string now_iso() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Manifest {
    std::string start = now_iso();
    std::vector<std::pair<std::string, std::string>> digests;

    void digest(const std::string& flag, const std::string& path) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%016llx",
                      (unsigned long long)fnv1a64(read_file_bytes(path)));
        digests.emplace_back(flag, buf);
    }

    std::string render(const Args& a) const {
        std::ostringstream m;
        m << "subcommand=" << a.sub;
        if (!a.sub2.empty()) m << ' ' << a.sub2;
        m << '\n' << "version=" << kVersion << '\n';
        for (const auto& [k, v] : a.flags) m << "flag." << k << '=' << v << '\n';
        m << "seed=" << a.get("seed", "0") << '\n';
        for (const auto& [k, v] : digests)
            m << "digest." << k << '=' << v << '\n';
        m << "start=" << start << '\n' << "stop=" << now_iso() << '\n';
        return m.str();
    }
};

// Input loaders that register digests as a side effect.
IntMatrix load_basis(const Args& a, Manifest& man) {
    const std::string path = a.need("basis");
    man.digest("basis", path);
    return read_int_matrix_file(path);
}

std::uint64_t seed_of(const Args& a) {
    if (!a.has("seed")) return 0;
    try {
        return std::stoull(a.flags.at("seed"));
    } catch (const std::exception&) {
        throw UsageError{"--seed: not an unsigned integer"};
    }
}

// ---- subcommand handlers --------------------------------------------------

int run_hnf(const Args& a, Manifest& man, std::string& body) {
    const IntMatrix A = load_basis(a, man);
    const HnfResult r = hnf(A);
    body += write_matrix(r.H);
    if (a.has("transform")) body += write_matrix(r.U);
    return 0;
}

int run_lll(const Args& a, Manifest& man, std::string& body) {
    const IntMatrix A = load_basis(a, man);
    const Rat d = a.has("delta-lll")
                      ? parse_rat_flag(a.flags.at("delta-lll"), "delta-lll")
                      : Rat(3, 4);
    const LllResult r = lll(A, d);
    body += write_matrix(r.B);
    if (a.has("transform")) body += write_matrix(r.U);
    return 0;
}

int run_snf_reduce(const Args& a, Manifest& man, std::string& body) {
    const IntMatrix A = load_basis(a, man);
    SnfReduceOptions opt;
    opt.a = parse_long_flag(a, "a", 1);
    opt.b = parse_long_flag(a, "b", 2);
    opt.strict = !a.has("relaxed");
    const long prec = parse_long_flag(a, "precision", 256);
    if (prec < 128) throw UsageError{"--precision: needs at least 128 bits"};
    const IntMatrix B_red = lll(A).B;
    const QrFactor f = qr(B_red, mp_bitcnt_t(prec));
    const SnfReduction red = reduce_to_snf(f.R, opt);
    body += write_reduction(red);
    return 0;
}

int run_snf_phi3(const Args& a, Manifest& man, std::string& body) {
    const std::string path = a.need("snf");
    man.digest("snf", path);
    const SnfBasis S = read_snf_file(path);
    const IntVec x = parse_vec_flag(a.need("x"), "x");
    const Phi3Result r = phi3(S, x);
    body += "a=" + r.a.get_str() + "\n";
    body += "y=" + join_vec(r.y) + "\n";
    return 0;
}

int run_sample(const Args& a, Manifest&, std::string& body) {
    const Int N = parse_int_flag(a.need("N"), "N");
    const long n = parse_long_flag(a, "n", -1);
    if (n < 1) throw UsageError{"--n: need a positive dimension"};
    const double s = parse_double_flag(a.need("s"), "s");
    if (!(s > 0)) throw UsageError{"--s: width must be positive"};
    const long count = parse_long_flag(a, "count", 1);
    if (count < 1) throw UsageError{"--count: need at least one sample"};
    std::vector<double> center(std::size_t(n), 0.0);
    if (a.has("center")) {
        const auto toks = split_ws(a.flags.at("center"));
        if (long(toks.size()) != n)
            throw UsageError{"--center: need exactly n coordinates"};
        for (std::size_t i = 0; i < toks.size(); ++i)
            center[i] = parse_double_flag(toks[i], "center");
    }
    const RngStream root(seed_of(a));
    for (long i = 0; i < count; ++i) {
        RngStream rng = root.derive(1, std::uint64_t(i));
        body += join_vec(sample_dgauss_fn(N, std::size_t(n), s, center, rng));
        body += '\n';
    }
    return 0;
}

int run_smoothing(const Args& a, Manifest& man, std::string& body) {
    const IntMatrix A = load_basis(a, man);
    const double eps = parse_double_flag(a.need("epsilon"), "epsilon");
    const std::string method = a.get("method", "exact");
    if (method == "estimate") {
        body += "estimate=" + fmt_double(smoothing_upper_estimate(A, eps)) + "\n";
        return 0;
    }
    if (method != "exact") throw UsageError{"--method: exact or estimate"};
    const double tol =
        a.has("rel-tol") ? parse_double_flag(a.flags.at("rel-tol"), "rel-tol")
                         : 1e-6;
    const SmoothingResult r = smoothing_parameter(LatticeBasis(A), eps, tol);
    body += "epsilon=" + fmt_double(r.epsilon) + "\n";
    body += "s_star=" + fmt_double(r.s_star) + "\n";
    body += "dual_sum=" + fmt_double(r.dual_sum) + "\n";
    body += "truncation_error_bound=" + fmt_double(r.truncation_error_bound) +
            "\n";
    return 0;
}

int run_sis(const Args& a, Manifest& man, std::string& body) {
    if (a.sub2 == "gen") {
        const Int N = parse_int_flag(a.need("N"), "N");
        const Rat delta = parse_rat_flag(a.need("delta"), "delta");
        RngStream rng(seed_of(a));
        body += write_sis_instance(
            gen_random_instance(N, delta, rng, !a.has("affine")));
        return 0;
    }
    if (a.sub2 == "solve") {
        const std::string path = a.need("instance");
        man.digest("instance", path);
        const SisInstance inst = read_sis_instance_file(path);
        const Int bound = a.has("bound")
                              ? parse_int_flag(a.flags.at("bound"), "bound")
                              : oracle_bound(inst);
        const std::string solver = a.get("solver", "bruteforce");
        std::optional<SisSolution> sol;
        if (solver == "bruteforce") {
            sol = solve_bruteforce(inst, bound);
        } else if (solver == "random") {
            RngStream rng(seed_of(a));
            sol = solve_bruteforce_random(inst, bound, rng);
        } else if (solver == "lll") {
            sol = solve_lll(inst);
        } else {
            throw UsageError{"--solver: bruteforce, random, or lll"};
        }
        if (!sol) {
            body += "no-solution bound=" + bound.get_str() + "\n";
            return 1;
        }
        body += write_sis_solution(*sol);
        return 0;
    }
    if (a.sub2 == "verify") {
        const std::string ipath = a.need("instance");
        const std::string spath = a.need("solution");
        man.digest("instance", ipath);
        man.digest("solution", spath);
        const SisInstance inst = read_sis_instance_file(ipath);
        SisSolution sol;
        sol.h = read_sis_solution_file(spath);
        const SisVerdict v =
            a.has("bound")
                ? verify(inst, sol, parse_int_flag(a.flags.at("bound"), "bound"))
                : verify(inst, sol);
        body += std::string("accepted=") + (v.accepted ? "true" : "false") +
                "\n";
        body += "reason=" + v.reason + "\n";
        body += "gamma=" + fmt_double(v.gamma) + "\n";
        body += "max=" + v.max_abs.get_str() + "\n";
        return v.accepted ? 0 : 1;
    }
    throw UsageError{"sis mode must be gen, solve, or verify"};
}

ReductionConfig reduction_config(const Args& a) {
    ReductionConfig cfg;
    cfg.delta = parse_rat_flag(a.need("delta"), "delta");
    if (a.has("phi")) cfg.phi = parse_double_flag(a.flags.at("phi"), "phi");
    cfg.trial_budget = std::size_t(parse_long_flag(a, "trials", 64));
    cfg.seed = seed_of(a);
    const std::string oracle = a.get("oracle", "bruteforce");
    if (oracle == "lll")
        cfg.oracle = make_lll_oracle();
    else if (oracle != "bruteforce")
        throw UsageError{"--oracle: bruteforce or lll"};
    if (a.has("constant"))
        cfg.constant = parse_double_flag(a.flags.at("constant"), "constant");
    cfg.precision_bits =
        mp_bitcnt_t(parse_long_flag(a, "precision", 256));
    const long jobs = parse_long_flag(a, "jobs", 1);
    if (jobs < 1) throw UsageError{"--jobs: need at least one worker"};
    cfg.jobs = std::size_t(jobs);
    return cfg;
}

void append_trace(const ReductionTrace& tr, std::string& body) {
    body += "m=" + std::to_string(tr.m) + "\n";
    body += "N=" + tr.N.get_str() + "\n";
    body += "T=" + tr.T.get_str() + "\n";
    body += "epsilon=" + fmt_double(tr.epsilon) + "\n";
    body += "s=" + fmt_double(tr.s) + "\n";
    body += "phi=" + fmt_double(tr.phi) + "\n";
}

int run_gdd(const Args& a, Manifest& man, std::string& body) {
    GddInstance inst;
    inst.B = load_basis(a, man);
    inst.v = parse_vec_flag(a.need("target"), "target");
    const ReductionConfig cfg = reduction_config(a);
    const GddRun run = gdd_reduce_run(inst, cfg);  // throws nothing on miss
    if (!run.x_out) {
        body += "no-decode trials=" + std::to_string(run.trials_used);
        for (const auto& [reason, count] : run.fail_tally)
            body += " " + reason + "=" + std::to_string(count);
        body += "\n";
        return 1;
    }
    const ReductionTrace& tr = run.success_trace;
    body += "x_out=" + join_vec(*run.x_out) + "\n";
    body += "trials=" + std::to_string(run.trials_used) + "\n";
    append_trace(tr, body);
    body += "c=" + tr.c.get_str() + "\n";
    body += "sum_coeff=" + tr.sum_coeff.get_str() + "\n";
    body += "distance=" + fmt_double(tr.achieved_distance) + "\n";
    body += "distance_bound=" + fmt_double(tr.distance_bound) + "\n";
    body += std::string("bound_ok=") + (tr.bound_ok ? "true" : "false") + "\n";
    body += std::string("degraded=") + (tr.degraded ? "true" : "false") + "\n";
    body += "oracle_gamma=" + fmt_double(tr.oracle_gamma) + "\n";
    for (const auto& [reason, count] : run.fail_tally)
        body += "fail." + reason + "=" + std::to_string(count) + "\n";
    return 0;
}

int run_sivp(const Args& a, Manifest& man, std::string& body) {
    const IntMatrix B = load_basis(a, man);
    const ReductionConfig cfg = reduction_config(a);
    const SivpResult res = sivp_reduce(B, cfg);  // BudgetError on exhaustion
    body += "vectors=" + std::to_string(res.vectors.size()) + "\n";
    for (std::size_t i = 0; i < res.vectors.size(); ++i) {
        body += "v." + std::to_string(i) + "=" + join_vec(res.vectors[i]) + "\n";
        body += "norm2." + std::to_string(i) + "=" + res.norms2[i].get_str() +
                "\n";
    }
    body += "bound=" + fmt_double(res.bound) + "\n";
    body += std::string("all_within_bound=") +
            (res.all_within_bound ? "true" : "false") + "\n";
    body += "trials=" + std::to_string(res.trials_used) + "\n";
    for (const auto& [reason, count] : res.fail_tally)
        body += "fail." + reason + "=" + std::to_string(count) + "\n";
    return 0;
}

// ---- bench ----------------------------------------------------------------

int bench_density(const Args& a, std::string& body) {
    const Int N = parse_int_flag(a.need("N"), "N");
    const Rat delta = parse_rat_flag(a.need("delta"), "delta");
    const long trials = parse_long_flag(a, "trials", 200);
    const Rat alpha = a.has("alpha")
                          ? parse_rat_flag(a.flags.at("alpha"), "alpha")
                          : Rat(1, 4);
    RngStream rng(seed_of(a));
    const DensityResult res =
        density_experiment(N, delta, std::size_t(trials), alpha, rng);
    body += "trial,n,lambda1_sq,ge_alpha,det_le_modulus\n";
    for (std::size_t t = 0; t < res.trials; ++t) {
        body += std::to_string(t) + "," + std::to_string(res.n) + "," +
                res.lambda1_sq[t].get_str() + "," +
                (res.ge_alpha[t] ? "1" : "0") + "," +
                (res.all_det_le_modulus ? "1" : "0") + "\n";
    }
    return 0;
}

int bench_blindness(const Args& a, std::string& body) {
    const Int N = parse_int_flag(a.need("N"), "N");
    const IntVec b = a.has("b") ? parse_vec_flag(a.flags.at("b"), "b") : IntVec{};
    const SnfBasis S(N, b);
    ReductionConfig cfg;
    cfg.delta = a.has("delta") ? parse_rat_flag(a.flags.at("delta"), "delta")
                               : Rat(1);
    if (a.has("phi")) cfg.phi = parse_double_flag(a.flags.at("phi"), "phi");
    const long trials = parse_long_flag(a, "trials", 1000);
    const Int c1 =
        a.has("c1") ? parse_int_flag(a.flags.at("c1"), "c1") : Int(1);
    const Int c2 =
        a.has("c2") ? parse_int_flag(a.flags.at("c2"), "c2") : Int(2);
    RngStream rng(seed_of(a));
    const BlindnessResult res =
        oracle_blindness_test(S, cfg, std::size_t(trials), rng, c1, c2);
    body += "N,m,epsilon,s,trials,c1,c2,tv,radius\n";
    body += res.N.get_str() + "," + std::to_string(res.m) + "," +
            fmt_double(res.epsilon) + "," + fmt_double(res.s) + "," +
            std::to_string(trials) + "," + c1.get_str() + "," + c2.get_str() +
            "," + fmt_double(res.tv) + "," + fmt_double(res.radius) + "\n";
    return 0;
}

int bench_success_rate(const Args& a, Manifest& man, std::string& body) {
    GddInstance inst;
    inst.B = load_basis(a, man);
    inst.v = parse_vec_flag(a.need("target"), "target");
    const long trials = parse_long_flag(a, "trials", 200);
    if (trials < 1) throw UsageError{"--trials: need at least one"};
    std::vector<Rat> deltas;
    for (const std::string& tok :
         split_ws(a.get("deltas", "1/2 1 3/2 2")))
        deltas.push_back(parse_rat_flag(tok, "deltas"));
    if (deltas.empty()) throw UsageError{"--deltas: need at least one"};
    const long jobs = parse_long_flag(a, "jobs", 1);
    if (jobs < 1) throw UsageError{"--jobs: need at least one worker"};
    const std::string oracle_name = a.get("oracle", "bruteforce");

    const RngStream root(seed_of(a));
    body += "delta,N,m,trials,successes,rate,kappa\n";
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        ReductionConfig cfg;
        cfg.delta = deltas[di];
        if (oracle_name == "lll")
            cfg.oracle = make_lll_oracle();
        else if (oracle_name != "bruteforce")
            throw UsageError{"--oracle: bruteforce or lll"};
        std::atomic<long> next{0};
        std::atomic<long> successes{0};
        Int N_seen = 0;
        std::size_t m_seen = 0;
        std::mutex meta_mu;
        auto worker = [&] {
            while (true) {
                const long t = next.fetch_add(1);
                if (t >= trials) return;
                RngStream rng = root.derive(di + 1, std::uint64_t(t));
                const GddOutcome out = gdd_reduce_once(inst, cfg, rng);
                if (out.trace.success) successes.fetch_add(1);
                std::lock_guard<std::mutex> g(meta_mu);
                N_seen = out.trace.N;
                m_seen = out.trace.m;
            }
        };
        std::vector<std::thread> pool;
        for (long w = 0; w < std::min<long>(jobs, trials); ++w)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        const double rate = double(successes.load()) / double(trials);
        const double kappa = rate * double(m_seen) * double(m_seen);
        body += rat_to_string(deltas[di]) + "," + N_seen.get_str() + "," +
                std::to_string(m_seen) + "," + std::to_string(trials) + "," +
                std::to_string(successes.load()) + "," + fmt_double(rate) +
                "," + fmt_double(kappa) + "\n";
    }
    return 0;
}

int bench_uniformity(const Args& a, std::string& body) {
    const Int N = parse_int_flag(a.need("N"), "N");
    const IntVec b = a.has("b") ? parse_vec_flag(a.flags.at("b"), "b") : IntVec{};
    const SnfBasis S(N, b);
    const double eps = a.has("epsilon")
                           ? parse_double_flag(a.flags.at("epsilon"), "epsilon")
                           : 0.01;
    std::vector<double> ratios;
    for (const std::string& tok : split_ws(a.get("ratios", "0.1 0.5 1 2")))
        ratios.push_back(parse_double_flag(tok, "ratios"));
    const long trials = parse_long_flag(a, "trials", 20000);
    const LatticeBasis L(S.matrix());
    const SmoothingResult eta = smoothing_parameter(L, eps);
    const RngStream root(seed_of(a));
    body += "ratio,s,eta,trials,classes,tv,radius\n";
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        GaussianParams p;
        p.s = ratios[i] * eta.s_star;
        p.c.assign(S.dim(), 0.0);
        RngStream rng = root.derive(1, i);
        const TvEstimate e =
            tv_distance_mod_parallelotope(L, p, std::size_t(trials), rng);
        body += fmt_double(ratios[i]) + "," + fmt_double(p.s) + "," +
                fmt_double(eta.s_star) + "," + std::to_string(trials) + "," +
                std::to_string(e.classes) + "," + fmt_double(e.tv) + "," +
                fmt_double(e.confidence_radius) + "\n";
    }
    return 0;
}

int run_bench(const Args& a, Manifest& man, std::string& body) {
    if (a.sub2 == "density") return bench_density(a, body);
    if (a.sub2 == "blindness") return bench_blindness(a, body);
    if (a.sub2 == "success-rate") return bench_success_rate(a, man, body);
    if (a.sub2 == "uniformity") return bench_uniformity(a, body);
    throw UsageError{
        "bench mode must be density, blindness, success-rate, or uniformity"};
}

// ---- selftest -------------------------------------------------------------

int run_selftest(const Args& a, Manifest&, std::string& body) {
    const std::uint64_t seed = seed_of(a);
    bool all_ok = true;
    auto suite = [&](const char* name, bool ok) {
        body += std::string(ok ? "PASS " : "FAIL ") + name + "\n";
        all_ok = all_ok && ok;
    };

    {
        RngStream rng(seed + 1);
        bool ok = true;
        for (int rep = 0; rep < 5 && ok; ++rep) {
            IntMatrix A(3, 3);
            do {
                for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < 3; ++j)
                        A(i, j) = rng.symmetric(Int(9));
            } while (det_exact(A) == 0);
            const HnfResult h = hnf(A);
            ok = ok && h.H == A * h.U && is_unimodular(h.U);
            for (std::size_t i = 0; i < 3 && ok; ++i)
                for (std::size_t j = 0; j < 3; ++j) {
                    if (j < i) ok = ok && h.H(i, j) == 0;
                    if (j == i) ok = ok && h.H(i, i) > 0;
                }
            const LllResult l = lll(A);
            ok = ok && l.B == A * l.U && is_unimodular(l.U);
        }
        suite("exact-linalg", ok);
    }

    {
        IntMatrix B(2, 2);
        B(0, 0) = 2; B(0, 1) = 1;
        B(1, 0) = 0; B(1, 1) = 3;
        const QrFactor f = qr(lll(B).B);
        const SnfReduction red = reduce_to_snf(f.R);
        bool ok = red.C3 == red.C2 * red.M && is_unimodular(red.M);
        try {
            validate_snf(red.snf.matrix());
        } catch (const Error&) {
            ok = false;
        }
        // Small certified-norm lattice points: multiples of the second SNF
        // column (b2, 1) stay within the backmap norm precondition
        // |x0| <= T * det * n.
        RngStream rng(seed + 2);
        for (int rep = 0; rep < 4 && ok; ++rep) {
            const Int k = Int(1) + rng.below_int(Int(5));
            const Int sign = rep % 2 ? Int(-1) : Int(1);
            const IntVec x0{sign * k * red.snf.b[0], sign * k};
            const BackmapResult bm = backmap(red, x0);
            ok = ok && bm.err2 <= Rat(1, 16);
        }
        ok = ok && red.bound_certified;
        suite("snf-chain", ok);
    }

    {
        const SnfBasis S(Int(7), IntVec{Int(3)});
        bool ok = true;
        for (long x1 = 0; x1 < 7 && ok; ++x1)
            for (long x2 = 0; x2 < 7; ++x2) {
                const IntVec x{Int(x1), Int(x2)};
                const Phi3Result r = phi3(S, x);
                IntVec sum(2);
                for (int j = 0; j < 2; ++j) sum[j] = x[j] + r.y[j];
                if (!ln_contains(S, sum)) {
                    ok = false;
                    break;
                }
            }
        const Phi3Result ex = phi3(S, IntVec{Int(2), Int(1)});
        ok = ok && ex.a == 5 && ex.y == IntVec{Int(5), Int(6)};
        suite("phi3-map", ok);
    }

    {
        IntMatrix Z(1, 1);
        Z(0, 0) = 1;
        const SmoothingResult r = smoothing_parameter(LatticeBasis(Z), 0.08643);
        suite("smoothing-unit", std::fabs(r.s_star - 1.0) < 1e-3);
    }

    {
        RngStream rng(seed + 3);
        bool ok = true;
        for (long Np : {5L, 7L, 11L}) {
            for (int rep = 0; rep < 20 && ok; ++rep) {
                const SisInstance inst =
                    gen_random_instance(Int(Np), Rat(1, 2), rng);
                const auto sol =
                    solve_bruteforce(inst, sis_default_bound(inst.n, inst.delta));
                ok = ok && sol.has_value() && verify(inst, *sol).accepted;
            }
        }
        suite("sis-pigeonhole", ok);
    }

    {
        GddInstance inst;
        inst.B = IntMatrix(2, 2);
        inst.B(0, 0) = 2; inst.B(0, 1) = 1;
        inst.B(1, 0) = 0; inst.B(1, 1) = 3;
        inst.v = IntVec{Int(5), Int(1)};
        ReductionConfig cfg;
        cfg.delta = Rat(1);
        cfg.trial_budget = 400;
        cfg.seed = 1;  // pinned: the amplified driver is probabilistic, and the
                       // self-test must stay deterministic for every --seed
        bool ok = false;
        const GddRun run = gdd_reduce_run(inst, cfg);
        if (run.x_out) {
            const LatticeBasis L(inst.B);
            ok = membership(L, *run.x_out).has_value() &&
                 run.success_trace.bound_ok;
        }
        suite("gdd-decode", ok);

        ReductionConfig scfg;
        scfg.delta = Rat(1);
        scfg.trial_budget = 60;
        scfg.seed = 11;  // pinned for the same reason
        bool sok = false;
        try {
            const SivpResult res = sivp_reduce(inst.B, scfg);
            sok = res.vectors.size() == 2 && res.all_within_bound &&
                  res.vectors[0][0] * res.vectors[1][1] !=
                      res.vectors[0][1] * res.vectors[1][0];
        } catch (const Error&) {
            sok = false;
        }
        suite("sivp-independent", sok);
    }

    {
        RngStream a1(seed + 6), a2(seed + 6), b(seed + 7);
        bool ok = a1.derive(1, 0).next() == a2.derive(1, 0).next() &&
                  a1.derive(1, 0).next() != a1.derive(1, 1).next() &&
                  a1.derive(1, 0).next() != b.derive(1, 0).next();
        suite("rng-splitting", ok);
    }

    return all_ok ? 0 : 1;
}

// ---- dispatch -------------------------------------------------------------

const std::map<std::string, std::set<std::string>> kKnownFlags = {
    {"hnf", {"basis", "transform"}},
    {"lll", {"basis", "delta-lll", "transform"}},
    {"snf-reduce", {"basis", "relaxed", "a", "b", "precision"}},
    {"snf-phi3", {"snf", "x"}},
    {"sample", {"N", "n", "s", "count", "center"}},
    {"smoothing", {"basis", "epsilon", "method", "rel-tol"}},
    {"sis",
     {"N", "delta", "affine", "instance", "solution", "solver", "bound"}},
    {"gdd",
     {"basis", "target", "delta", "phi", "trials", "oracle", "constant",
      "precision", "jobs"}},
    {"sivp",
     {"basis", "delta", "phi", "trials", "oracle", "constant", "precision",
      "jobs"}},
    {"bench",
     {"N", "delta", "trials", "alpha", "b", "phi", "c1", "c2", "basis",
      "target", "deltas", "oracle", "jobs", "epsilon", "ratios"}},
    {"selftest", {}},
};

int dispatch(const Args& a, Manifest& man, std::string& body) {
    if (a.sub == "hnf") return run_hnf(a, man, body);
    if (a.sub == "lll") return run_lll(a, man, body);
    if (a.sub == "snf-reduce") return run_snf_reduce(a, man, body);
    if (a.sub == "snf-phi3") return run_snf_phi3(a, man, body);
    if (a.sub == "sample") return run_sample(a, man, body);
    if (a.sub == "smoothing") return run_smoothing(a, man, body);
    if (a.sub == "sis") return run_sis(a, man, body);
    if (a.sub == "gdd") return run_gdd(a, man, body);
    if (a.sub == "sivp") return run_sivp(a, man, body);
    if (a.sub == "bench") return run_bench(a, man, body);
    if (a.sub == "selftest") return run_selftest(a, man, body);
    throw UsageError{"unknown subcommand '" + a.sub + "'"};
}

void emit(const Args& a, const Manifest& man, const std::string& body) {
    std::fwrite(body.data(), 1, body.size(), stdout);
    std::fflush(stdout);
    const std::string mtext = man.render(a);
    std::fwrite(mtext.data(), 1, mtext.size(), stderr);
    if (a.has("out")) {
        const std::string path = a.flags.at("out");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("io", "cannot write '" + path + "'");
        f << body;
        std::ofstream mf(path + ".manifest", std::ios::binary);
        if (!mf) throw Error("io", "cannot write '" + path + ".manifest'");
        mf << mtext;
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fputs(kUsage, stderr);
        return 2;
    }
    const std::string sub = argv[1];
    if (sub == "--help" || sub == "-h" || sub == "help") {
        std::fputs(kUsage, stdout);
        return 0;
    }
    if (sub == "--version") {
        std::printf("%s\n", kVersion);
        return 0;
    }
    try {
        auto it = kKnownFlags.find(sub);
        if (it == kKnownFlags.end())
            throw UsageError{"unknown subcommand '" + sub + "'"};
        const Args a = parse_args(argc, argv, it->second);
        if (a.has("help")) {
            std::fputs(kUsage, stdout);
            return 0;
        }
        Manifest man;
        std::string body;
        const int code = dispatch(a, man, body);
        emit(a, man, body);
        return code;
    } catch (const UsageError& u) {
        std::fprintf(stderr, "usage error: %s\n", u.msg.c_str());
        std::fputs(kUsage, stderr);
        return 2;
    } catch (const ParseError& e) {
        std::printf("error: code=parse line=%ld msg=%s\n", e.line, e.what());
        return 1;
    } catch (const Error& e) {
        std::printf("error: code=%s msg=%s\n", e.code.c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::printf("error: code=internal msg=%s\n", e.what());
        return 1;
    }
}
