#ifndef RESIST_MATRIX_HPP
#define RESIST_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace resist {

// Minimal dense row-major matrix. Everything in this project is desk scale
// (M x M mixing matrices, M x d states), so no BLAS backing is warranted.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::vector<double> row(int i) const {
        return std::vector<double>(a_.begin() + static_cast<std::size_t>(i) * cols_,
                                   a_.begin() + static_cast<std::size_t>(i + 1) * cols_);
    }
    std::vector<double> col(int j) const {
        std::vector<double> c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_col(int j, const std::vector<double>& c) {
        for (int i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix dimension mismatch");
        Matrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

private:
    int rows_, cols_;
    std::vector<double> a_;
};

// y = A x
inline std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != static_cast<int>(x.size())) throw std::invalid_argument("mat_vec dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

// yT = xT A
inline std::vector<double> vec_mat(const std::vector<double>& x, const Matrix& a) {
    if (a.rows() != static_cast<int>(x.size())) throw std::invalid_argument("vec_mat dimension mismatch");
    std::vector<double> y(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double xi = x[i];
        if (xi == 0.0) continue;
        for (int j = 0; j < a.cols(); ++j) y[j] += xi * a(i, j);
    }
    return y;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<double> vsub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

inline std::vector<double> vadd(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

inline std::vector<double> vscale(double s, const std::vector<double>& a) {
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = s * a[i];
    return c;
}

}  // namespace resist

#endif
