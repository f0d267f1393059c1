#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "latsnf/errors.hpp"
#include "latsnf/numeric.hpp"

namespace latsnf {

// Dense row-major matrix.  Lattice vectors are always integer combinations of
// the COLUMNS of a basis matrix.
template <typename T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    std::vector<T> col(std::size_t j) const {
        std::vector<T> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    void set_col(std::size_t j, const std::vector<T>& v) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    void swap_cols(std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < rows_; ++i)
            std::swap((*this)(i, a), (*this)(i, b));
    }

    // col_j += c * col_k
    void add_col(std::size_t j, std::size_t k, const T& c) {
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, j) += c * (*this)(i, k);
    }

    void negate_col(std::size_t j) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = -(*this)(i, j);
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& x) {
    std::vector<T> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T s = T(0);
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

RatMatrix to_rat(const IntMatrix& a);
// Fails with ContractError unless every entry is integral.
IntMatrix to_int(const RatMatrix& a);

// Text format: first line "rows cols", then one line per row with entries
// separated by single spaces; rationals rendered as p/q; newline-terminated,
// no trailing whitespace.
std::string write_matrix(const IntMatrix& a);
std::string write_matrix(const RatMatrix& a);
IntMatrix read_int_matrix(std::istream& in);
RatMatrix read_rat_matrix(std::istream& in);
IntMatrix read_int_matrix_file(const std::string& path);
RatMatrix read_rat_matrix_file(const std::string& path);

// Column-vector convenience (n-by-1 matrix blocks).
std::string write_vector(const IntVec& v);
IntVec read_int_vector_file(const std::string& path);

}  // namespace latsnf
