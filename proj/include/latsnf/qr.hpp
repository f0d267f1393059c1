#pragma once

#include <cstddef>
#include <vector>

#include "latsnf/matrix.hpp"

namespace latsnf {

// Fixed-precision real matrix used only by the QR factorization and its
// consumers.  Every entry carries the same explicit mantissa precision, so no
// operation silently falls back to a global default.
class FloatMatrix {
  public:
    FloatMatrix() = default;
    FloatMatrix(std::size_t rows, std::size_t cols, mp_bitcnt_t prec);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    mp_bitcnt_t precision() const { return prec_; }

    mpf_class& operator()(std::size_t i, std::size_t j) {
        return data_[i * cols_ + j];
    }
    const mpf_class& operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    mp_bitcnt_t prec_ = 0;
    std::vector<mpf_class> data_;
};

// Q orthonormal (to within the certified residuals), R upper-triangular with
// strictly positive diagonal, B = Q * R.
struct QrFactor {
    FloatMatrix Q;
    FloatMatrix R;
    mp_bitcnt_t precision_bits;
};

// Gram-Schmidt QR at the requested precision (>= 128 bits; default 256).
// Before returning, the residuals |Q^T Q - I|_max and |Q R - B|_max are
// checked against 2^-(precision_bits/2); PrecisionError if the factorization
// cannot be certified at this precision (callers retry with more bits).
QrFactor qr(const IntMatrix& B, mp_bitcnt_t precision_bits = 256);

// y = Q^T v at the factorization's precision.
std::vector<mpf_class> qt_times(const QrFactor& f, const IntVec& v);

// Nearest integer to an mpf value (ties toward +infinity).
Int round_mpf(const mpf_class& x);

}  // namespace latsnf
