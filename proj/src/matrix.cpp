#include "mmfuse/matrix.hpp"

#include <cmath>

namespace mmfuse {

Vec matvec(const Matrix& a, const Vec& x) {
    check_dim(a.cols() == x.size(), "matvec A[" + std::to_string(a.rows()) + "x" +
                                        std::to_string(a.cols()) + "] * x[" +
                                        std::to_string(x.size()) + "]");
    Vec y(a.rows(), 0.0);
    const double* ad = a.data();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double acc = 0.0;
        const double* row = ad + r * a.cols();
        for (std::size_t c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

Vec matvec_transposed(const Matrix& a, const Vec& x) {
    check_dim(a.rows() == x.size(), "matvec_transposed A^T[" + std::to_string(a.cols()) + "x" +
                                        std::to_string(a.rows()) + "] * x[" +
                                        std::to_string(x.size()) + "]");
    Vec y(a.cols(), 0.0);
    const double* ad = a.data();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double xr = x[r];
        const double* row = ad + r * a.cols();
        for (std::size_t c = 0; c < a.cols(); ++c) y[c] += row[c] * xr;
    }
    return y;
}

void add_outer(Matrix& a, const Vec& u, const Vec& v) {
    check_dim(a.rows() == u.size() && a.cols() == v.size(), "add_outer");
    double* ad = a.data();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double* row = ad + r * a.cols();
        const double ur = u[r];
        for (std::size_t c = 0; c < a.cols(); ++c) row[c] += ur * v[c];
    }
}

double dot(const Vec& a, const Vec& b) {
    check_dim(a.size() == b.size(), "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const Vec& x, Vec& y) {
    check_dim(x.size() == y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.values()); }

}  // namespace mmfuse
