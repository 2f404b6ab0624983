#include "lyadim/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "lyadim/errors.hpp"

namespace lyadim {

namespace {

void check_dim(int n, const char* who) {
    if (n < 2 || n > kMaxDim)
        throw ConfigError(std::string(who) + ": dimension must be in [2, 4]");
}

double sign_nonzero(double x) { return x < 0.0 ? -1.0 : 1.0; }

} // namespace

Vec::Vec(int n) : n_(n) {
    check_dim(n, "Vec");
}

Vec::Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    check_dim(n_, "Vec");
    int i = 0;
    for (double x : xs) v_[static_cast<size_t>(i++)] = x;
}

Vec Vec::zero(int n) { return Vec(n); }

double Vec::norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += v_[static_cast<size_t>(i)] * v_[static_cast<size_t>(i)];
    return std::sqrt(s);
}

double Vec::dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)[i] * o[i];
    return s;
}

bool Vec::all_finite() const {
    for (int i = 0; i < n_; ++i)
        if (!std::isfinite((*this)[i])) return false;
    return true;
}

Vec& Vec::operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) (*this)[i] += o[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) (*this)[i] -= o[i];
    return *this;
}

Vec& Vec::operator*=(double s) {
    for (int i = 0; i < n_; ++i) (*this)[i] *= s;
    return *this;
}

Mat::Mat(int n) : n_(n) {
    check_dim(n, "Mat");
}

Mat Mat::identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Mat m(static_cast<int>(rows.size()));
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m.n_)
            throw ConfigError("Mat::from_rows: ragged rows");
        int j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

Vec Mat::col(int j) const {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = (*this)(i, j);
    return v;
}

Vec Mat::row(int i) const {
    Vec v(n_);
    for (int j = 0; j < n_; ++j) v[j] = (*this)(i, j);
    return v;
}

Mat Mat::transposed() const {
    Mat t(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Mat::trace() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

double Mat::det() const {
    // LU with partial pivoting.
    Mat a = *this;
    double d = 1.0;
    for (int k = 0; k < n_; ++k) {
        int piv = k;
        for (int i = k + 1; i < n_; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n_; ++j) std::swap(a(piv, j), a(k, j));
            d = -d;
        }
        d *= a(k, k);
        for (int i = k + 1; i < n_; ++i) {
            double f = a(i, k) / a(k, k);
            for (int j = k + 1; j < n_; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

double Mat::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_ * n_; ++i) s += a_[static_cast<size_t>(i)] * a_[static_cast<size_t>(i)];
    return std::sqrt(s);
}

double Mat::max_abs() const {
    double m = 0.0;
    for (int i = 0; i < n_ * n_; ++i) m = std::max(m, std::abs(a_[static_cast<size_t>(i)]));
    return m;
}

bool Mat::all_finite() const {
    for (int i = 0; i < n_ * n_; ++i)
        if (!std::isfinite(a_[static_cast<size_t>(i)])) return false;
    return true;
}

Mat& Mat::operator+=(const Mat& o) {
    for (int i = 0; i < n_ * n_; ++i) a_[static_cast<size_t>(i)] += o.a_[static_cast<size_t>(i)];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    for (int i = 0; i < n_ * n_; ++i) a_[static_cast<size_t>(i)] -= o.a_[static_cast<size_t>(i)];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (int i = 0; i < n_ * n_; ++i) a_[static_cast<size_t>(i)] *= s;
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    int n = a.size();
    Mat c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double aik = a(i, k);
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec operator*(const Mat& a, const Vec& x) {
    int n = a.size();
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Mat inverse(const Mat& m) {
    int n = m.size();
    Mat a = m;
    Mat inv = Mat::identity(n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw NumericError("inverse: singular matrix");
        if (piv != k)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(k, j));
                std::swap(inv(piv, j), inv(k, j));
            }
        double p = a(k, k);
        for (int j = 0; j < n; ++j) {
            a(k, j) /= p;
            inv(k, j) /= p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            double f = a(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

QrPair qr_posdiag(const Mat& m) {
    int n = m.size();
    Mat r = m;
    Mat q = Mat::identity(n);

    std::array<double, kMaxDim> v{};
    for (int k = 0; k < n - 1; ++k) {
        double normx = 0.0;
        for (int i = k; i < n; ++i) normx += r(i, k) * r(i, k);
        normx = std::sqrt(normx);
        if (normx == 0.0) continue;

        double alpha = -sign_nonzero(r(k, k)) * normx;
        v[static_cast<size_t>(k)] = r(k, k) - alpha;
        for (int i = k + 1; i < n; ++i) v[static_cast<size_t>(i)] = r(i, k);
        double vnorm2 = 0.0;
        for (int i = k; i < n; ++i) vnorm2 += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
        if (vnorm2 == 0.0) continue;

        // R <- H R on the trailing block.
        for (int j = k; j < n; ++j) {
            double w = 0.0;
            for (int i = k; i < n; ++i) w += v[static_cast<size_t>(i)] * r(i, j);
            w = 2.0 * w / vnorm2;
            for (int i = k; i < n; ++i) r(i, j) -= w * v[static_cast<size_t>(i)];
        }
        // Q <- Q H.
        for (int i = 0; i < n; ++i) {
            double w = 0.0;
            for (int j = k; j < n; ++j) w += q(i, j) * v[static_cast<size_t>(j)];
            w = 2.0 * w / vnorm2;
            for (int j = k; j < n; ++j) q(i, j) -= w * v[static_cast<size_t>(j)];
        }
        r(k, k) = alpha;
        for (int i = k + 1; i < n; ++i) r(i, k) = 0.0;
    }
    // Exact zeros below the diagonal.
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) r(i, j) = 0.0;

    // Make the R diagonal nonnegative: flip R row k and Q column k together.
    for (int k = 0; k < n; ++k) {
        if (r(k, k) < 0.0) {
            for (int j = 0; j < n; ++j) r(k, j) = -r(k, j);
            for (int i = 0; i < n; ++i) q(i, k) = -q(i, k);
        }
    }
    return {q, r};
}

SingularSpectrum singular_values(const Mat& m) {
    int n = m.size();
    Mat b = m;
    double fro2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fro2 += b(i, j) * b(i, j);

    SingularSpectrum out;
    out.n = n;
    if (fro2 == 0.0) return out;
    if (!m.all_finite()) throw NumericError("singular_values: non-finite entries");

    const double threshold = 1e-14 * fro2;
    const int max_sweeps = 60;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        // Off-diagonal Gram mass (Frobenius norm of the off-diagonal of B^T B).
        double off2 = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double g = 0.0;
                for (int i = 0; i < n; ++i) g += b(i, p) * b(i, q);
                off2 += 2.0 * g * g;
            }
        if (std::sqrt(off2) < threshold) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (int i = 0; i < n; ++i) {
                    alpha += b(i, p) * b(i, p);
                    beta += b(i, q) * b(i, q);
                    gamma += b(i, p) * b(i, q);
                }
                if (gamma == 0.0) continue;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = sign_nonzero(zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (int i = 0; i < n; ++i) {
                    double bp = b(i, p), bq = b(i, q);
                    b(i, p) = c * bp - s * bq;
                    b(i, q) = s * bp + c * bq;
                }
            }
    }
    if (!converged) throw NumericError("singular_values: Jacobi sweep did not converge");

    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += b(i, j) * b(i, j);
        out.sigma[static_cast<size_t>(j)] = std::sqrt(s);
    }
    std::sort(out.sigma.begin(), out.sigma.begin() + n, std::greater<double>());
    return out;
}

double omega_d(const SingularSpectrum& s, double d) {
    if (!(d >= 0.0 && d <= static_cast<double>(s.n)))
        throw ConfigError("omega_d: d must lie in [0, n]");
    int j = static_cast<int>(std::floor(d));
    double frac = d - j;
    if (j == s.n) { // d == n exactly
        j = s.n;
        frac = 0.0;
    }
    double w = 1.0;
    for (int i = 0; i < j; ++i) w *= s.sigma[static_cast<size_t>(i)];
    if (frac > 0.0) w *= std::pow(s.sigma[static_cast<size_t>(j)], frac);
    return w;
}

std::vector<double> eigen_symmetric(const Mat& m) {
    int n = m.size();
    double scale = m.max_abs();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * (1.0 + scale))
                throw ConfigError("eigen_symmetric: matrix is not symmetric");

    Mat a = m;
    const int max_sweeps = 50;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-15 * (1.0 + a.frobenius_norm())) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = sign_nonzero(theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int i = 0; i < n; ++i) {
                    double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
            }
    }
    std::vector<double> eig(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<size_t>(i)] = a(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

namespace {

using cplx = std::complex<double>;

// p(z) and p'(z) of the monic polynomial z^n + c[0] z^{n-1} + ... + c[n-1].
void horner(const std::vector<double>& c, cplx z, cplx& p, cplx& dp) {
    p = cplx(1.0, 0.0);
    dp = cplx(0.0, 0.0);
    for (double ck : c) {
        dp = dp * z + p;
        p = p * z + ck;
    }
}

void polish_root(const std::vector<double>& c, cplx& z) {
    cplx p, dp;
    horner(c, z, p, dp);
    double best = std::abs(p);
    cplx best_z = z;
    for (int it = 0; it < 4; ++it) {
        if (std::abs(dp) < 1e-300) break;
        cplx step = p / dp;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        z -= step;
        horner(c, z, p, dp);
        double res = std::abs(p);
        if (res < best) {
            best = res;
            best_z = z;
        } else {
            break;
        }
    }
    z = best_z;
}

std::vector<cplx> solve_quadratic(double a, double b) {
    // z^2 + a z + b
    double disc = a * a - 4.0 * b;
    if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        double q = -0.5 * (a + sign_nonzero(a) * sq);
        double r1, r2;
        if (q != 0.0) {
            r1 = q;
            r2 = b / q;
        } else {
            r1 = r2 = -0.5 * a;
        }
        return {cplx(r1, 0.0), cplx(r2, 0.0)};
    }
    double re = -0.5 * a;
    double im = 0.5 * std::sqrt(-disc);
    return {cplx(re, im), cplx(re, -im)};
}

double cubic_one_real_root(double a, double b, double c) {
    // z^3 + a z^2 + b z + c; returns one real root (always exists).
    double p = b - a * a / 3.0;
    double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    double shift = -a / 3.0;
    double t;
    if (p == 0.0) {
        t = std::cbrt(-q);
    } else {
        double disc = 0.25 * q * q + p * p * p / 27.0;
        if (disc > 0.0) {
            double sq = std::sqrt(disc);
            double u = std::cbrt(-0.5 * q + sq);
            double v = std::cbrt(-0.5 * q - sq);
            t = u + v;
        } else {
            // Three real roots: trigonometric form (p < 0 here).
            double rho = std::sqrt(-p * p * p / 27.0);
            double arg = -0.5 * q / rho;
            arg = std::clamp(arg, -1.0, 1.0);
            double phi = std::acos(arg);
            t = 2.0 * std::sqrt(-p / 3.0) * std::cos(phi / 3.0);
        }
    }
    double z = t + shift;
    // Newton polish on the original cubic.
    for (int it = 0; it < 8; ++it) {
        double f = ((z + a) * z + b) * z + c;
        double df = (3.0 * z + 2.0 * a) * z + b;
        if (df == 0.0) break;
        double step = f / df;
        if (!std::isfinite(step)) break;
        z -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
}

std::vector<cplx> solve_cubic(double a, double b, double c) {
    double r0 = cubic_one_real_root(a, b, c);
    // Deflate: z^3 + a z^2 + b z + c = (z - r0)(z^2 + e z + f).
    double e = a + r0;
    double f = b + r0 * e;
    auto rest = solve_quadratic(e, f);
    return {cplx(r0, 0.0), rest[0], rest[1]};
}

std::vector<cplx> solve_quartic(double a, double b, double c, double d) {
    // Depressed quartic: z = y - a/4, y^4 + p y^2 + q y + r.
    double a2 = a * a;
    double p = b - 3.0 * a2 / 8.0;
    double q = c - a * b / 2.0 + a2 * a / 8.0;
    double r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    double shift = -a / 4.0;

    std::vector<cplx> ys;
    if (std::abs(q) <= 1e-14 * (1.0 + std::abs(p) + std::abs(r))) {
        // Biquadratic: w^2 + p w + r with y^2 = w.
        auto ws = solve_quadratic(p, r);
        for (const cplx& w : ws) {
            cplx s = std::sqrt(w);
            ys.push_back(s);
            ys.push_back(-s);
        }
    } else {
        // Ferrari resolvent: t^3 - p t^2 - 4 r t + (4 p r - q^2) = 0.
        double t = cubic_one_real_root(-p, -4.0 * r, 4.0 * p * r - q * q);
        cplx s2(t - p, 0.0);
        cplx s = std::sqrt(s2);
        if (std::abs(s) < 1e-150) s = cplx(1e-150, 0.0);
        cplx half_t(0.5 * t, 0.0);
        cplx u = cplx(q, 0.0) / (2.0 * s);
        // (y^2 + t/2)^2 = (s y - u)^2  =>  two quadratics.
        // y^2 - s y + (t/2 + u) = 0 and y^2 + s y + (t/2 - u) = 0
        for (int branch = 0; branch < 2; ++branch) {
            cplx e = branch == 0 ? -s : s;
            cplx f = branch == 0 ? half_t + u : half_t - u;
            cplx disc = e * e - 4.0 * f;
            cplx sq = std::sqrt(disc);
            ys.push_back(0.5 * (-e + sq));
            ys.push_back(0.5 * (-e - sq));
        }
    }
    std::vector<cplx> roots;
    roots.reserve(4);
    for (const cplx& y : ys) roots.push_back(y + shift);
    return roots;
}

} // namespace

std::vector<std::complex<double>> eigen_general(const Mat& m) {
    if (!m.all_finite()) throw NumericError("eigen_general: non-finite entries");
    int n = m.size();

    // Characteristic polynomial via Faddeev-LeVerrier.
    std::vector<double> c(static_cast<size_t>(n));
    Mat mk = m;
    c[0] = -mk.trace();
    for (int k = 2; k <= n; ++k) {
        Mat shifted = mk;
        for (int i = 0; i < n; ++i) shifted(i, i) += c[static_cast<size_t>(k - 2)];
        mk = m * shifted;
        c[static_cast<size_t>(k - 1)] = -mk.trace() / static_cast<double>(k);
    }

    std::vector<cplx> roots;
    if (n == 2)
        roots = solve_quadratic(c[0], c[1]);
    else if (n == 3)
        roots = solve_cubic(c[0], c[1], c[2]);
    else
        roots = solve_quartic(c[0], c[1], c[2], c[3]);

    for (cplx& z : roots) polish_root(c, z);

    std::sort(roots.begin(), roots.end(), [](const cplx& x, const cplx& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return roots;
}

} // namespace lyadim
