#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmfuse {

using Vec = std::vector<double>;

// Dense row-major matrix. The only tensor type in the toolkit; vectors are
// plain std::vector<double>.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    Vec& values() { return data_; }
    const Vec& values() const { return data_; }

    void fill(double v) { data_.assign(data_.size(), v); }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

// y = A x
Vec matvec(const Matrix& a, const Vec& x);
// y = A^T x
Vec matvec_transposed(const Matrix& a, const Vec& x);
// A += u v^T (outer-product accumulate)
void add_outer(Matrix& a, const Vec& u, const Vec& v);

inline void check_dim(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("dimension mismatch: " + what);
}

double dot(const Vec& a, const Vec& b);
void axpy(double alpha, const Vec& x, Vec& y);  // y += alpha * x
bool all_finite(const Vec& v);
bool all_finite(const Matrix& m);

}  // namespace mmfuse
