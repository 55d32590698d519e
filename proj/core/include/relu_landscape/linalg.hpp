#pragma once

#include <cstddef>
#include <vector>

namespace relu_landscape {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);

/// Dense row-major matrix, sized for input dimensions <= ~10.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    static Mat identity(std::size_t n);
    /// Builds the matrix whose j-th column is columns[j].
    static Mat from_columns(const std::vector<Vec>& columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Vec apply(const Vec& x) const;            // A x
    Vec apply_transposed(const Vec& x) const; // A^T x
    Mat multiply(const Mat& other) const;     // A B
    Mat transposed() const;

    /// Determinant via LU with partial pivoting.
    double determinant() const;
    /// Throws std::invalid_argument when |det| <= 1e-12.
    Mat inverse() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

/// Orthonormal basis of the orthogonal complement of `seed` (unit vector),
/// by Gram-Schmidt over the standard basis. Returns dim-1 vectors.
std::vector<Vec> orthogonal_complement_basis(const Vec& seed);

}  // namespace relu_landscape
