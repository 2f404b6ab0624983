#pragma once

// Dense kernels for 2x2 .. 4x4 matrices: QR with a positive-diagonal
// convention, one-sided Jacobi singular values, symmetric and general
// eigenvalues, and the singular value function omega_d.
//
// Everything here is value-typed and allocation-free; dimensions are runtime
// values bounded by kMaxDim.

#include <array>
#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace lyadim {

inline constexpr int kMaxDim = 4;

class Vec {
public:
    Vec() = default;
    explicit Vec(int n);
    Vec(std::initializer_list<double> xs);
    static Vec zero(int n);

    int size() const { return n_; }
    double& operator[](int i) { return v_[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v_[static_cast<size_t>(i)]; }

    double norm() const;
    double dot(const Vec& o) const;
    bool all_finite() const;

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s);

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }

private:
    int n_ = 0;
    std::array<double, kMaxDim> v_{};
};

// Square matrix, row-major storage.
class Mat {
public:
    Mat() = default;
    explicit Mat(int n); // zero matrix
    static Mat identity(int n);
    static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i * n_ + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i * n_ + j)]; }

    Vec col(int j) const;
    Vec row(int i) const;
    Mat transposed() const;
    double trace() const;
    double det() const; // LU with partial pivoting
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(double s, Mat a) { return a *= s; }
    friend Mat operator*(const Mat& a, const Mat& b);
    friend Vec operator*(const Mat& a, const Vec& x);

private:
    int n_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

Mat inverse(const Mat& m); // throws NumericError on (near-)singular input

// Singular values in descending order.
struct SingularSpectrum {
    int n = 0;
    std::array<double, kMaxDim> sigma{};

    double operator[](int i) const { return sigma[static_cast<size_t>(i)]; }
    double max() const { return sigma[0]; }
    double min() const { return sigma[static_cast<size_t>(n - 1)]; }
};

struct QrPair {
    Mat q;
    Mat r;
};

// Householder QR, then the diagonal of R is made nonnegative by flipping the
// sign of R rows and matching Q columns. Singular input is allowed (zero
// diagonal entries remain zero).
QrPair qr_posdiag(const Mat& m);

// One-sided Jacobi on columns; converges when the off-diagonal Gram mass
// drops below 1e-14 * ||m||_F^2. Handles exactly singular input.
SingularSpectrum singular_values(const Mat& m);

// Singular value function: omega_0 = 1, omega_d = sigma_1...sigma_d for
// integer d, and sigma_1...sigma_j * sigma_{j+1}^s for d = j + s with
// s in (0,1). A zero sigma_{j+1} with s > 0 gives 0. Requires d in [0, n].
double omega_d(const SingularSpectrum& s, double d);

// Eigenvalues of a symmetric matrix, descending. Throws ConfigError if the
// input is not symmetric.
std::vector<double> eigen_symmetric(const Mat& m);

// All eigenvalues of a general real matrix via the characteristic polynomial
// (closed-form solves for n <= 4, with Newton polishing). Sorted by
// descending real part; ties broken by descending imaginary part.
std::vector<std::complex<double>> eigen_general(const Mat& m);

} // namespace lyadim
