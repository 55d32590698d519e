#include "relu_landscape/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace relu_landscape {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec add: size mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec sub: size mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec operator*(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::from_columns(const std::vector<Vec>& columns) {
    if (columns.empty()) return Mat();
    Mat m(columns[0].size(), columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != m.rows_) throw std::invalid_argument("from_columns: ragged input");
        for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = columns[j][i];
    }
    return m;
}

Vec Mat::apply(const Vec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("Mat::apply: size mismatch");
    Vec r(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * x[j];
    return r;
}

Vec Mat::apply_transposed(const Vec& x) const {
    if (x.size() != rows_) throw std::invalid_argument("Mat::apply_transposed: size mismatch");
    Vec r(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) r[j] += (*this)(i, j) * x[i];
    return r;
}

Mat Mat::multiply(const Mat& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("Mat::multiply: size mismatch");
    Mat r(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            for (std::size_t j = 0; j < other.cols_; ++j) r(i, j) += aik * other(k, j);
        }
    return r;
}

Mat Mat::transposed() const {
    Mat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

namespace {

// LU decomposition with partial pivoting. Returns false on (near-)singularity
// only through a zero pivot; the determinant is accumulated in det.
bool lu_decompose(Mat& m, std::vector<std::size_t>& perm, double& det) {
    const std::size_t n = m.rows();
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m(i, k)) > best) {
                best = std::abs(m(i, k));
                pivot = i;
            }
        }
        if (best == 0.0) {
            det = 0.0;
            return false;
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pivot, j));
            std::swap(perm[k], perm[pivot]);
            det = -det;
        }
        det *= m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= m(i, k) * m(k, j);
        }
    }
    return true;
}

}  // namespace

double Mat::determinant() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant: non-square");
    Mat work = *this;
    std::vector<std::size_t> perm;
    double det = 0.0;
    lu_decompose(work, perm, det);
    return det;
}

Mat Mat::inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("inverse: non-square");
    const std::size_t n = rows_;
    Mat work = *this;
    std::vector<std::size_t> perm;
    double det = 0.0;
    if (!lu_decompose(work, perm, det) || std::abs(det) <= 1e-12)
        throw std::invalid_argument("inverse: matrix is singular (|det| <= 1e-12)");
    Mat inv(n, n);
    Vec col(n), y(n);
    for (std::size_t c = 0; c < n; ++c) {
        // Solve A x = e_c using the permuted LU factors.
        for (std::size_t i = 0; i < n; ++i) col[i] = (perm[i] == c) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = col[i];
            for (std::size_t j = 0; j < i; ++j) y[i] -= work(i, j) * y[j];
        }
        for (std::size_t i = n; i-- > 0;) {
            double v = y[i];
            for (std::size_t j = i + 1; j < n; ++j) v -= work(i, j) * inv(j, c);
            inv(i, c) = v / work(i, i);
        }
    }
    return inv;
}

std::vector<Vec> orthogonal_complement_basis(const Vec& seed) {
    const std::size_t n = seed.size();
    std::vector<Vec> basis;
    basis.push_back(seed);
    for (std::size_t e = 0; e < n && basis.size() < n; ++e) {
        Vec v(n, 0.0);
        v[e] = 1.0;
        for (const Vec& b : basis) {
            const double c = dot(v, b);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * b[i];
        }
        const double len = norm2(v);
        if (len > 1e-8) {
            for (double& x : v) x /= len;
            basis.push_back(v);
        }
    }
    if (basis.size() != n) throw std::runtime_error("orthogonal_complement_basis: degenerate seed");
    basis.erase(basis.begin());
    return basis;
}

}  // namespace relu_landscape
