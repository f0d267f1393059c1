#include "latsnf/snf.hpp"

#include <cassert>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "latsnf/errors.hpp"
#include "latsnf/linalg.hpp"
#include "latsnf/primes.hpp"

namespace latsnf {

namespace {

Int pow_int(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

Rat ceil_rat(const Rat& x) { return Rat(-floor_rat(-x)); }

}  // namespace

SnfBasis::SnfBasis(Int modulus, IntVec firstrow) : N(std::move(modulus)), b(std::move(firstrow)) {
    if (N < 2 || !is_prime(N))
        throw CompositeModulusError("corner entry " + N.get_str() + " is not prime");
    for (auto& e : b) e = mod_floor(e, N);
}

IntMatrix SnfBasis::matrix() const {
    const std::size_t n = dim();
    IntMatrix B = IntMatrix::identity(n);
    B(0, 0) = N;
    for (std::size_t j = 1; j < n; ++j) B(0, j) = b[j - 1];
    return B;
}

SnfBasis validate_snf(const IntMatrix& B) {
    if (B.rows() != B.cols() || B.rows() == 0)
        throw SnfShapeError("matrix must be square and nonempty");
    const std::size_t n = B.rows();
    for (std::size_t i = 1; i < n; ++i) {
        if (B(i, i) != 1)
            throw SnfShapeError("diagonal entry at row " + std::to_string(i + 1) + " must be 1");
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && B(i, j) != 0)
                throw SnfShapeError("entry (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ") must be 0");
    }
    if (B(0, 0) < 2) throw SnfShapeError("corner entry must be at least 2");
    IntVec b(n - 1);
    for (std::size_t j = 1; j < n; ++j) b[j - 1] = B(0, j);
    return SnfBasis(B(0, 0), std::move(b));  // ctor rejects composite corners
}

IntMatrix scaled_dual_matrix(const SnfBasis& S) {
    const std::size_t n = S.dim();
    IntMatrix D(n, n);
    D(0, 0) = 1;
    for (std::size_t i = 1; i < n; ++i) {
        D(i, 0) = -S.b[i - 1];
        D(i, i) = S.N;
    }
    return D;
}

bool ln_contains(const SnfBasis& S, const IntVec& x) {
    if (x.size() != S.dim()) throw ContractError("dimension mismatch");
    Int acc = x[0];
    for (std::size_t j = 1; j < x.size(); ++j) acc -= S.b[j - 1] * x[j];
    return mod_floor(acc, S.N) == 0;
}

IntVec ln_point_from_coords(const SnfBasis& S, const IntVec& tail) {
    if (tail.size() + 1 != S.dim()) throw ContractError("coordinate count mismatch");
    IntVec x(S.dim());
    Int acc = 0;
    for (std::size_t j = 0; j < tail.size(); ++j) {
        x[j + 1] = mod_floor(tail[j], S.N);
        acc += S.b[j] * x[j + 1];
    }
    x[0] = mod_floor(acc, S.N);
    return x;
}

IntVec dual_point_from_a(const SnfBasis& S, const Int& a) {
    IntVec y(S.dim());
    y[0] = mod_floor(a, S.N);
    for (std::size_t j = 1; j < S.dim(); ++j) y[j] = mod_floor(-S.b[j - 1] * a, S.N);
    return y;
}

IntVec sample_ln_uniform(const SnfBasis& S, RngStream& rng) {
    IntVec tail(S.dim() - 1);
    for (auto& t : tail) t = rng.below_int(S.N);
    return ln_point_from_coords(S, tail);
}

IntVec sample_dual_uniform(const SnfBasis& S, RngStream& rng) {
    return dual_point_from_a(S, rng.below_int(S.N));
}

Phi3Result phi3(const SnfBasis& S, const IntVec& x) {
    if (x.size() != S.dim()) throw ContractError("dimension mismatch");
    Int d = 1;
    for (const auto& bi : S.b) d += bi * bi;
    const Int inv = mod_inverse(mod_floor(d, S.N), S.N);
    Int num = x[0];
    for (std::size_t j = 1; j < x.size(); ++j) num -= x[j] * S.b[j - 1];
    Phi3Result out;
    out.a = mod_floor(-num * inv, S.N);
    out.y = dual_point_from_a(S, out.a);
    return out;
}

namespace {

// Back-map core shared by the public entry point and build-time probes; the
// norm precondition is checked by the caller.
BackmapResult backmap_core(const SnfReduction& red, const IntVec& x0) {
    const std::size_t n = red.snf.dim();
    if (x0.size() != n) throw ContractError("dimension mismatch");
    const RatVec z = solve_exact(to_rat(red.snf.matrix()), to_rat_vec(x0));
    IntVec zi(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i].get_den() != 1)
            throw ContractError("input point is not in the reduced lattice");
        zi[i] = z[i].get_num();
    }
    const IntVec w = red.M * (red.post * zi);
    BackmapResult out;
    out.coeffs = w;
    out.v_hat.assign(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (w[j] != 0) out.v_hat[i] += red.B_input(i, j) * Rat(w[j]);
    out.err2 = 0;
    const Rat t(red.T);
    for (std::size_t i = 0; i < n; ++i) {
        Rat e = out.v_hat[i] - Rat(x0[i]) / t;
        out.err2 += e * e;
    }
    return out;
}

struct PipelineState {
    IntMatrix C2, C3, M, post;
    Int N, delta;
    IntVec b;
    int sign = 1;
};

// Elimination + sign flip + prime rounding + column rotation + first-row
// reduction, all over integer matrices C = T * (snapped basis).
PipelineState run_pipeline(const IntMatrix& C_in) {
    const std::size_t n = C_in.rows();
    PipelineState st;
    IntMatrix C = C_in;
    st.M = IntMatrix::identity(n);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const Int k = C(i, j);
            if (k == 0) continue;
            C.add_col(j, i - 1, -k);
            st.M.add_col(j, i - 1, -k);
        }
    }
    const Int corner = C(0, n - 1);
    if (corner == 0) throw PrecisionError("degenerate truncation: zero determinant column");
    st.sign = corner < 0 ? -1 : 1;
    const Int base_val = int_abs(corner);

    NextPrime np = next_prime_from(base_val);
    for (int attempt = 0;; ++attempt) {
        if (attempt >= 64)
            throw ContractError("no admissible prime rounding found");
        st.N = np.p;
        st.delta = np.p - base_val;
        st.C2 = C_in;
        st.C2(0, n - 1) += Int(st.sign) * st.delta;
        st.C3 = st.C2 * st.M;
        assert(st.C3(0, n - 1) == Int(st.sign) * st.N);

        IntMatrix S = IntMatrix::identity(n);
        S(n - 1, n - 1) = st.sign;
        IntMatrix P(n, n);
        P(n - 1, 0) = 1;
        for (std::size_t j = 1; j < n; ++j) P(j - 1, j) = 1;
        IntMatrix B4 = st.C3 * (S * P);
        IntMatrix Rmod = IntMatrix::identity(n);
        for (std::size_t j = 1; j < n; ++j)
            Rmod(0, j) = -floor_div(B4(0, j), st.N);
        st.post = S * (P * Rmod);
        B4 = st.C3 * st.post;

        st.b.assign(n > 0 ? n - 1 : 0, Int(0));
        for (std::size_t j = 1; j < n; ++j) st.b[j - 1] = B4(0, j);

        // Keep the image map invertible: sum b_i^2 + 1 must be a unit mod N.
        Int g = 1;
        for (const auto& bi : st.b) g += bi * bi;
        if (mod_floor(g, st.N) != 0) break;
        np = next_prime_from(st.N + 1);
    }
    return st;
}

using SnapFn = std::function<Int(std::size_t, std::size_t, const Int&)>;
using InputFn = std::function<RatMatrix(const Int&)>;

SnfReduction reduce_impl(std::size_t n, const Rat& det_hint, const Rat& r11_hint,
                         const SnapFn& snap, const InputFn& input_at,
                         const SnfReduceOptions& opt) {
    if (n == 0) throw ContractError("empty basis");
    if (opt.a < 0 || opt.b < 0) throw ContractError("exponent parameters must be nonnegative");
    const Int nI(static_cast<unsigned long>(n));

    // First-column lower bound on the shortest vector: |R11| / 2^((n-1)/2),
    // rounded conservatively.  Overestimating T is harmless.
    const Rat q_rat = ceil_rat(det_hint * Rat(pow_int(2, static_cast<unsigned long>(n / 2))) / r11_hint);
    Int q = q_rat.get_num();
    if (q < 1) q = 1;

    Int T;
    if (opt.t_override) {
        T = *opt.t_override;
        if (T < 1) throw ContractError("scaling denominator must be positive");
    } else {
        const unsigned long exp_n =
            opt.strict ? static_cast<unsigned long>(opt.a + opt.b + 1) : 2ul;
        T = pow_int(2, static_cast<unsigned long>(n)) * pow_int(nI, exp_n) * q;
    }

    for (int iter = 0; iter < 48; ++iter) {
        RatMatrix B_in = input_at(T);
        Rat det_in = rat_abs(det_exact(B_in));

        IntMatrix C(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) C(i, j) = snap(i, j, T);
        for (std::size_t i = 1; i < n; ++i) C(i, i - 1) = 1;

        PipelineState st;
        try {
            st = run_pipeline(C);
        } catch (const PrecisionError&) {
            T *= 2;
            continue;
        }

        // Exact certificate for the distance guarantee: for any admissible
        // x0, the coefficient vector is (C2/T)^-1 (x0/T), the entrywise
        // basis discrepancy is at most (delta + n + 1)/T in Frobenius norm
        // times T, so the bound holds whenever
        //   (delta+n+1)^2 * |C2^-1|_F^2 * det^2 * n^(2(a+b)) <= 1.
        Rat sum_inv2 = 0;
        {
            const RatMatrix inv = inverse_exact(to_rat(st.C2));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) sum_inv2 += inv(i, j) * inv(i, j);
        }
        const Rat lhs = Rat((st.delta + nI + 1) * (st.delta + nI + 1)) * sum_inv2 *
                        det_in * det_in *
                        Rat(pow_int(nI, static_cast<unsigned long>(2 * (opt.a + opt.b))));
        const bool cert = lhs <= 1;
        if (opt.strict && !opt.t_override && !cert) {
            T *= 2;
            continue;
        }

        SnfReduction red{std::move(B_in), T,         st.delta,   std::move(st.C2),
                         std::move(st.C3), std::move(st.M), std::move(st.post),
                         SnfBasis(st.N, std::move(st.b)), opt.a,  opt.b,
                         opt.strict, cert};

        // Build-time probes: columns of C2 and their sum are lattice points;
        // verify exact round-tripping, and the distance bound where the norm
        // precondition applies.
        const Rat radius2 = Rat(red.T * red.T) * det_in * det_in *
                            Rat(pow_int(nI, static_cast<unsigned long>(2 * opt.a)));
        const Rat err_cap = Rat(1, pow_int(nI, static_cast<unsigned long>(2 * opt.b)));
        std::vector<IntVec> probes;
        IntVec ones(n, Int(1));
        for (std::size_t j = 0; j < n; ++j) {
            IntVec col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = red.C2(i, j);
            probes.push_back(std::move(col));
        }
        probes.push_back(red.C2 * ones);
        for (const auto& x0 : probes) {
            const BackmapResult br = backmap_core(red, x0);
            const IntVec round_trip = red.C2 * br.coeffs;
            if (round_trip != x0)
                throw ContractError("reduction self-check failed: transform mismatch");
            if (red.bound_certified && norm2_exact(x0) <= radius2 && !(br.err2 <= err_cap))
                throw ContractError("reduction self-check failed: distance bound");
        }
        return red;
    }
    throw BudgetError("scaling denominator search did not converge");
}

}  // namespace

SnfReduction reduce_to_snf(const RatMatrix& R, const SnfReduceOptions& opt) {
    if (R.rows() != R.cols() || R.rows() == 0)
        throw ContractError("basis must be square and nonempty");
    const std::size_t n = R.rows();
    Rat det = 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (R(i, j) != 0) throw ContractError("basis must be upper-triangular");
        if (R(i, i) == 0) throw ContractError("diagonal entries must be nonzero");
        det *= R(i, i);
    }
    const Rat r11 = rat_abs(R(0, 0));
    const SnapFn snap = [&R](std::size_t i, std::size_t j, const Int& T) {
        return round_nearest(R(i, j) * Rat(T));
    };
    const InputFn input_at = [&R](const Int&) { return R; };
    return reduce_impl(n, rat_abs(det), r11, snap, input_at, opt);
}

SnfReduction reduce_to_snf(const FloatMatrix& R, const SnfReduceOptions& opt) {
    if (R.rows() != R.cols() || R.rows() == 0)
        throw ContractError("basis must be square and nonempty");
    const std::size_t n = R.rows();
    // mpf values are binary rationals, so these conversions are exact.
    auto to_exact = [](const mpf_class& f) {
        Rat q;
        mpq_set_f(q.get_mpq_t(), f.get_mpf_t());
        return q;
    };
    Rat det = 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (mpf_sgn(R(i, j).get_mpf_t()) != 0)
                throw ContractError("basis must be upper-triangular");
        if (mpf_sgn(R(i, i).get_mpf_t()) == 0)
            throw ContractError("diagonal entries must be nonzero");
        det *= to_exact(R(i, i));
    }
    RatMatrix Rq(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) Rq(i, j) = to_exact(R(i, j));
    const SnapFn snap = [&Rq](std::size_t i, std::size_t j, const Int& T) {
        return round_nearest(Rq(i, j) * Rat(T));
    };
    // Certify against the snapped matrix: entries round(T r) / T.
    const InputFn input_at = [&Rq, n](const Int& T) {
        RatMatrix B(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                B(i, j) = Rat(round_nearest(Rq(i, j) * Rat(T)), T);
                B(i, j).canonicalize();
            }
        return B;
    };
    return reduce_impl(n, rat_abs(det), rat_abs(to_exact(R(0, 0))), snap, input_at, opt);
}

BackmapResult backmap(const SnfReduction& red, const IntVec& x0) {
    const std::size_t n = red.snf.dim();
    const Int nI(static_cast<unsigned long>(n));
    const Rat det_in = rat_abs(det_exact(red.B_input));
    const Rat radius2 = Rat(red.T * red.T) * det_in * det_in *
                        Rat(pow_int(nI, static_cast<unsigned long>(2 * red.a_param)));
    if (!(norm2_exact(x0) <= radius2))
        throw ContractError("norm precondition violated: distance bound not guaranteed");
    return backmap_core(red, x0);
}

std::string write_snf(const SnfBasis& S) {
    std::ostringstream out;
    out << S.dim() << ' ' << S.N.get_str() << '\n';
    for (std::size_t j = 0; j < S.b.size(); ++j) {
        if (j) out << ' ';
        out << S.b[j].get_str();
    }
    out << '\n';
    return out.str();
}

SnfBasis read_snf(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header line");
    std::istringstream h(line);
    long n = 0;
    std::string n_tok, N_tok, extra;
    if (!(h >> n_tok >> N_tok) || (h >> extra))
        throw ParseError(1, "expected dimension and modulus");
    try {
        n = std::stol(n_tok);
    } catch (...) {
        throw ParseError(1, "bad dimension '" + n_tok + "'");
    }
    if (n < 1) throw ParseError(1, "dimension must be positive");
    Int N;
    if (mpz_set_str(N.get_mpz_t(), N_tok.c_str(), 10) != 0)
        throw ParseError(1, "bad modulus '" + N_tok + "'");
    if (!std::getline(in, line)) {
        if (n == 1) line.clear();
        else throw ParseError(2, "missing first-row entries");
    }
    std::istringstream body(line);
    IntVec b;
    std::string tok;
    while (body >> tok) {
        Int v;
        if (mpz_set_str(v.get_mpz_t(), tok.c_str(), 10) != 0)
            throw ParseError(2, "bad entry '" + tok + "'");
        b.push_back(v);
    }
    if (b.size() != static_cast<std::size_t>(n - 1))
        throw ParseError(2, "expected " + std::to_string(n - 1) + " entries, found " +
                                std::to_string(b.size()));
    return SnfBasis(std::move(N), std::move(b));
}

SnfBasis read_snf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    return read_snf(in);
}

std::string write_reduction(const SnfReduction& red) {
    std::ostringstream out;
    out << write_snf(red.snf);
    out << write_matrix(red.M);
    out << write_matrix(red.post);
    out << "T " << red.T.get_str() << '\n';
    out << "delta " << red.delta.get_str() << '\n';
    return out.str();
}

}  // namespace latsnf
