#include "latsnf/linalg.hpp"

#include <algorithm>

#include "latsnf/errors.hpp"

namespace latsnf {

namespace {

void require_square(const IntMatrix& a, const char* who) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw ContractError(std::string(who) + ": matrix must be square and nonempty");
}

}  // namespace

HnfResult hnf(const IntMatrix& A) {
    require_square(A, "hnf");
    const std::size_t n = A.rows();
    IntMatrix H = A;
    IntMatrix U = IntMatrix::identity(n);

    auto col_op = [&](std::size_t j, std::size_t k, const Int& c) {
        H.add_col(j, k, c);
        U.add_col(j, k, c);
    };

    // Clear rows bottom-up.  When row i is processed, columns i..limit-1 have
    // zeros in all rows below i, so Euclidean column ops among them leave the
    // already-finished rows untouched.
    for (std::size_t i = n; i-- > 0;) {
        std::size_t limit = i + 1;  // columns 0..i may still be active in row i
        // Euclidean reduction across the active columns of row i.
        while (true) {
            std::size_t pivot = limit;
            for (std::size_t j = 0; j < limit; ++j)
                if (H(i, j) != 0 &&
                    (pivot == limit || int_abs(H(i, j)) < int_abs(H(i, pivot))))
                    pivot = j;
            if (pivot == limit)
                throw ContractError("hnf: matrix is singular");
            bool others = false;
            for (std::size_t j = 0; j < limit; ++j) {
                if (j == pivot || H(i, j) == 0) continue;
                Int q = -floor_div(H(i, j), H(i, pivot));
                // Round toward the nearest multiple to shrink fast.
                Int r = H(i, j) + q * H(i, pivot);
                if (2 * r > int_abs(H(i, pivot)))
                    q -= (H(i, pivot) > 0 ? 1 : -1);
                col_op(j, pivot, q);
                if (H(i, j) != 0) others = true;
            }
            if (!others) {
                if (pivot != i) {
                    H.swap_cols(pivot, i);
                    U.swap_cols(pivot, i);
                }
                break;
            }
        }
        if (H(i, i) < 0) {
            H.negate_col(i);
            U.negate_col(i);
        }
        // Reduce the entries to the right of the diagonal in this row into
        // [0, H(i,i)); column i has zeros below row i, so this is safe.
        for (std::size_t j = i + 1; j < n; ++j) {
            Int q = -floor_div(H(i, j), H(i, i));
            if (q != 0) col_op(j, i, q);
        }
    }
    return {H, U};
}

LllResult lll(const IntMatrix& Bin, const Rat& delta) {
    require_square(Bin, "lll");
    if (!(delta > Rat(1, 4) && delta < 1))
        throw ContractError("lll: delta must lie in (1/4, 1)");
    const std::size_t n = Bin.rows();
    IntMatrix B = Bin;
    IntMatrix U = IntMatrix::identity(n);

    // Exact Gram-Schmidt state: mu(i,j) for j < i and squared lengths of the
    // orthogonalized vectors.
    RatMatrix mu(n, n);
    RatVec bstar2(n);

    auto dot_bb = [&](std::size_t a, std::size_t b) {
        Rat s = 0;
        for (std::size_t i = 0; i < n; ++i) s += Rat(B(i, a)) * Rat(B(i, b));
        return s;
    };

    auto compute_gs = [&](std::size_t upto) {
        // Recompute rows 0..upto of the GS data from scratch.  Instances here
        // are small; clarity over incremental updates.
        for (std::size_t i = 0; i <= upto; ++i) {
            Rat norm2 = dot_bb(i, i);
            for (std::size_t j = 0; j < i; ++j) {
                Rat proj = dot_bb(i, j);
                for (std::size_t k = 0; k < j; ++k)
                    proj -= mu(i, k) * mu(j, k) * bstar2[k];
                if (bstar2[j] == 0)
                    throw ContractError("lll: input columns are dependent");
                mu(i, j) = proj / bstar2[j];
                norm2 -= mu(i, j) * mu(i, j) * bstar2[j];
            }
            bstar2[i] = norm2;
        }
    };

    compute_gs(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        if (bstar2[i] == 0) throw ContractError("lll: matrix is singular");

    std::size_t k = 1;
    while (k < n) {
        // Size-reduce column k against k-1 ... 0.
        for (std::size_t j = k; j-- > 0;) {
            Int q = round_nearest(mu(k, j));
            if (q != 0) {
                B.add_col(k, j, -q);
                U.add_col(k, j, -q);
                for (std::size_t t = 0; t < j; ++t)
                    mu(k, t) -= Rat(q) * mu(j, t);
                mu(k, j) -= Rat(q);
            }
        }
        // Lovasz condition between k-1 and k, decided exactly.
        if (bstar2[k] >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar2[k - 1]) {
            ++k;
        } else {
            B.swap_cols(k, k - 1);
            U.swap_cols(k, k - 1);
            compute_gs(n - 1);
            k = (k > 1) ? k - 1 : 1;
        }
    }
    return {B, U};
}

Int det_exact(const IntMatrix& A) {
    require_square(A, "det_exact");
    const std::size_t n = A.rows();
    IntMatrix m = A;
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(),
                             prev.get_mpz_t());
            }
        prev = m(k, k);
    }
    return sign > 0 ? m(n - 1, n - 1) : Int(-m(n - 1, n - 1));
}

Rat det_exact(const RatMatrix& A) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw ContractError("det_exact: matrix must be square and nonempty");
    const std::size_t n = A.rows();
    RatMatrix m = A;
    Rat det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && m(p, k) == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            det = -det;
        }
        det *= m(k, k);
        Rat inv = Rat(1) / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            Rat f = m(i, k) * inv;
            if (f == 0) continue;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

namespace {

// Gauss-Jordan on [A | rhs], exact.
RatMatrix eliminate(const RatMatrix& A, RatMatrix rhs, const char* who) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw ContractError(std::string(who) + ": matrix must be square");
    if (rhs.rows() != A.rows())
        throw ContractError(std::string(who) + ": shape mismatch");
    const std::size_t n = A.rows();
    RatMatrix m = A;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && m(p, k) == 0) ++p;
        if (p == n) throw ContractError(std::string(who) + ": matrix is singular");
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(k, j), m(p, j));
            }
        if (p != k)
            for (std::size_t j = 0; j < rhs.cols(); ++j)
                std::swap(rhs(k, j), rhs(p, j));
        Rat inv = Rat(1) / m(k, k);
        for (std::size_t j = 0; j < n; ++j) m(k, j) *= inv;
        for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(k, j) *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || m(i, k) == 0) continue;
            Rat f = m(i, k);
            for (std::size_t j = 0; j < n; ++j) m(i, j) -= f * m(k, j);
            for (std::size_t j = 0; j < rhs.cols(); ++j)
                rhs(i, j) -= f * rhs(k, j);
        }
    }
    return rhs;
}

}  // namespace

RatVec solve_exact(const RatMatrix& A, const RatVec& b) {
    RatMatrix rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
    RatMatrix x = eliminate(A, rhs, "solve_exact");
    RatVec out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(i, 0);
    return out;
}

RatMatrix inverse_exact(const RatMatrix& A) {
    return eliminate(A, RatMatrix(to_rat(IntMatrix::identity(A.rows()))),
                     "inverse_exact");
}

bool is_unimodular(const IntMatrix& U) {
    if (U.rows() != U.cols() || U.rows() == 0) return false;
    Int d = det_exact(U);
    return d == 1 || d == -1;
}

}  // namespace latsnf
