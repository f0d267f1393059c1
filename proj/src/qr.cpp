#include "latsnf/qr.hpp"

#include "latsnf/errors.hpp"

namespace latsnf {

FloatMatrix::FloatMatrix(std::size_t rows, std::size_t cols, mp_bitcnt_t prec)
    : rows_(rows), cols_(cols), prec_(prec) {
    data_.reserve(rows * cols);
    for (std::size_t i = 0; i < rows * cols; ++i)
        data_.emplace_back(0, prec);
}

namespace {

mpf_class dot_cols(const FloatMatrix& a, std::size_t ca, const FloatMatrix& b,
                   std::size_t cb, mp_bitcnt_t prec) {
    mpf_class s(0, prec), t(0, prec);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        t = a(i, ca) * b(i, cb);
        s += t;
    }
    return s;
}

}  // namespace

QrFactor qr(const IntMatrix& B, mp_bitcnt_t precision_bits) {
    if (B.rows() == 0 || B.rows() != B.cols())
        throw ContractError("qr: matrix must be square and nonempty");
    if (precision_bits < 128)
        throw ContractError("qr: precision_bits must be at least 128");
    const std::size_t n = B.rows();
    // Work with guard bits; certify against the caller's precision.
    const mp_bitcnt_t wp = precision_bits + 64;

    FloatMatrix Bf(n, n, wp);
    Int max_entry = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Bf(i, j) = mpf_class(B(i, j), wp);
            Int a = int_abs(B(i, j));
            if (a > max_entry) max_entry = a;
        }

    FloatMatrix Q(n, n, wp), R(n, n, wp);
    mpf_class scale(max_entry, wp);
    mpf_class tol(0, wp);
    mpf_div_2exp(tol.get_mpf_t(), scale.get_mpf_t(), precision_bits / 2);

    mpf_class v(0, wp), r(0, wp), nrm(0, wp);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<mpf_class> w(n, mpf_class(0, wp));
        for (std::size_t i = 0; i < n; ++i) w[i] = Bf(i, j);
        // Two orthogonalization sweeps (classical Gram-Schmidt, repeated) keep
        // the loss of orthogonality near the working precision.
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (std::size_t k = 0; k < j; ++k) {
                r = 0;
                for (std::size_t i = 0; i < n; ++i) r += Q(i, k) * w[i];
                if (sweep == 0)
                    R(k, j) = r;
                else
                    R(k, j) += r;
                for (std::size_t i = 0; i < n; ++i) w[i] -= r * Q(i, k);
            }
        }
        nrm = 0;
        for (std::size_t i = 0; i < n; ++i) nrm += w[i] * w[i];
        mpf_sqrt(nrm.get_mpf_t(), nrm.get_mpf_t());
        if (nrm <= tol)
            throw PrecisionError(
                "qr: cannot certify a positive diagonal entry at " +
                std::to_string(precision_bits) + " bits (column " +
                std::to_string(j) + ")");
        R(j, j) = nrm;
        for (std::size_t i = 0; i < n; ++i) Q(i, j) = w[i] / nrm;
    }

    // Certify: orthonormality and reconstruction residuals.
    mpf_class limit(0, wp), one(1, wp);
    mpf_div_2exp(limit.get_mpf_t(), one.get_mpf_t(), precision_bits / 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            mpf_class d = dot_cols(Q, a, Q, b, wp);
            if (a == b) d -= 1;
            if (abs(d) > limit)
                throw PrecisionError("qr: orthonormality residual too large");
        }
    mpf_class recon_limit = tol;  // scaled by |B|_max
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            mpf_class s(0, wp);
            for (std::size_t k = 0; k <= j; ++k) s += Q(i, k) * R(k, j);
            s -= Bf(i, j);
            if (abs(s) > recon_limit)
                throw PrecisionError("qr: reconstruction residual too large");
        }

    return {std::move(Q), std::move(R), precision_bits};
}

std::vector<mpf_class> qt_times(const QrFactor& f, const IntVec& v) {
    const std::size_t n = f.Q.rows();
    if (v.size() != n) throw ContractError("qt_times: dimension mismatch");
    const mp_bitcnt_t wp = f.Q.precision();
    std::vector<mpf_class> out(n, mpf_class(0, wp));
    mpf_class x(0, wp);
    for (std::size_t j = 0; j < n; ++j) {
        mpf_class s(0, wp);
        for (std::size_t i = 0; i < n; ++i) {
            x = mpf_class(v[i], wp);
            s += f.Q(i, j) * x;
        }
        out[j] = s;
    }
    return out;
}

Int round_mpf(const mpf_class& x) {
    mpf_class shifted(x, x.get_prec() + 8);
    shifted += 0.5;
    mpf_class fl(0, shifted.get_prec());
    mpf_floor(fl.get_mpf_t(), shifted.get_mpf_t());
    Int z;
    mpz_set_f(z.get_mpz_t(), fl.get_mpf_t());
    return z;
}

}  // namespace latsnf
