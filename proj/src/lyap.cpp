#include "lyadim/lyap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "lyadim/errors.hpp"

namespace lyadim {

namespace {

void check_chain(const FactorSequence& seq) {
    if (seq.factors.empty()) throw ConfigError("factor chain is empty");
    int n = seq.factors.front().size();
    for (const Mat& f : seq.factors) {
        if (f.size() != n) throw ConfigError("factor chain has mixed dimensions");
        if (!f.all_finite()) throw NumericError("factor chain has non-finite entries");
    }
    if (!(seq.total_time() > 0.0)) throw ConfigError("factor chain has non-positive total time");
}

std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
}

} // namespace

ProductSvdResult product_svd(const FactorSequence& seq, int sweeps) {
    if (sweeps < 1) throw ConfigError("product_svd: sweeps must be >= 1");
    check_chain(seq);

    const int nf = static_cast<int>(seq.factors.size());
    const int n = seq.factors.front().size();
    const double total_time = seq.total_time();

    // The sweep factorizes a[0]*a[1]*...*a[nf-1], so load the chain reversed:
    // a[0] is the newest segment and the product equals the full fundamental
    // matrix factors[last]*...*factors[first].
    std::vector<Mat> a(static_cast<size_t>(nf));
    for (int j = 0; j < nf; ++j) a[static_cast<size_t>(j)] = seq.factors[static_cast<size_t>(nf - 1 - j)];

    std::vector<Mat> r(static_cast<size_t>(nf));
    ProductSvdResult out;
    out.sweeps = sweeps;
    out.u = Mat::identity(n);
    out.v = Mat::identity(n);
    out.les.assign(static_cast<size_t>(n), 0.0);
    out.r_diagonals.assign(static_cast<size_t>(nf), {});

    for (int sweep = 1; sweep <= sweeps; ++sweep) {
        Mat q = Mat::identity(n); // plays Q_{j+1}, identity beyond the chain end
        for (int j = nf - 1; j >= 0; --j) {
            QrPair qr = qr_posdiag(a[static_cast<size_t>(j)] * q);
            for (int i = 0; i < n; ++i)
                if (qr.r(i, i) == 0.0) {
                    int original = sweep == 1 ? nf - 1 - j : j;
                    throw SingularFactorError("product_svd: exactly singular factor", original);
                }
            r[static_cast<size_t>(j)] = qr.r;
            q = qr.q;
        }
        // q now holds Q_1, the orthogonal factor absorbed on this sweep.
        if (sweep % 2 == 1)
            out.u = out.u * q;
        else
            out.v = out.v * q;

        if (sweep == sweeps) {
            for (int j = 0; j < nf; ++j)
                for (int i = 0; i < n; ++i) {
                    double d = r[static_cast<size_t>(j)](i, i);
                    out.r_diagonals[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
                    out.les[static_cast<size_t>(i)] += std::log(d);
                }
            for (double& x : out.les) x /= total_time;
        } else {
            // Transpose-reverse the R chain for the next sweep.
            for (int j = 0; j < nf; ++j)
                a[static_cast<size_t>(j)] = r[static_cast<size_t>(nf - 1 - j)].transposed();
        }
    }
    return out;
}

FtLeSpectrum finite_time_les(const FactorSequence& seq, int sweeps) {
    ProductSvdResult svd = product_svd(seq, sweeps);
    FtLeSpectrum sp;
    sp.t = seq.total_time();
    sp.u0 = seq.origin;
    sp.les = sorted_desc(std::move(svd.les));
    return sp;
}

FtLeSpectrum finite_time_les(const SystemSpec& spec, const Vec& u0, double seg_len,
                             int n_factors, int sweeps, const IntegratorConfig& cfg) {
    return finite_time_les(factor_sequence(spec, u0, seg_len, n_factors, cfg), sweeps);
}

std::vector<double> benettin_les(const FactorSequence& seq) {
    check_chain(seq);
    const int n = seq.factors.front().size();
    Mat q = Mat::identity(n);
    std::vector<double> sums(static_cast<size_t>(n), 0.0);
    for (size_t k = 0; k < seq.factors.size(); ++k) {
        QrPair qr = qr_posdiag(seq.factors[k] * q);
        q = qr.q;
        for (int i = 0; i < n; ++i) {
            double d = qr.r(i, i);
            if (d == 0.0)
                throw SingularFactorError("benettin_les: exactly singular factor",
                                          static_cast<int>(k));
            sums[static_cast<size_t>(i)] += std::log(d);
        }
    }
    for (double& x : sums) x /= seq.total_time();
    return sorted_desc(std::move(sums));
}

std::vector<double> lce_column_exponents(const FactorSequence& seq) {
    check_chain(seq);
    const int n = seq.factors.front().size();
    Mat m = Mat::identity(n);
    for (const Mat& f : seq.factors) m = f * m; // newest factor multiplies on the left
    if (!m.all_finite())
        throw NumericError("lce_column_exponents: explicit product overflowed");
    SingularSpectrum sv = singular_values(m);
    if (sv.min() <= 0.0 || sv.max() / sv.min() >= 1e12)
        throw NumericError("lce_column_exponents: explicit product is too ill-conditioned "
                           "(condition number >= 1e12)");
    std::vector<double> lce(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        lce[static_cast<size_t>(j)] = std::log(m.col(j).norm()) / seq.total_time();
    return sorted_desc(std::move(lce));
}

KyDimension kaplan_yorke(std::span<const double> exponents, std::string source) {
    const int n = static_cast<int>(exponents.size());
    if (n < 1) throw ConfigError("kaplan_yorke: empty exponent list");
    double scale = 0.0;
    for (double le : exponents) {
        if (!std::isfinite(le)) throw ConfigError("kaplan_yorke: non-finite exponent");
        scale = std::max(scale, std::abs(le));
    }
    for (int i = 0; i + 1 < n; ++i)
        if (exponents[static_cast<size_t>(i + 1)] > exponents[static_cast<size_t>(i)] + 1e-12 * scale)
            throw ConfigError("kaplan_yorke: exponents must be in descending order");

    int j = 0;
    double sum = 0.0, sum_j = 0.0;
    for (int m = 1; m <= n; ++m) {
        sum += exponents[static_cast<size_t>(m - 1)];
        if (sum >= 0.0) {
            j = m;
            sum_j = sum;
        }
    }
    if (j == 0) return {0, 0.0, 0.0, std::move(source)};
    if (j == n) return {n, 0.0, static_cast<double>(n), std::move(source)};
    double next = exponents[static_cast<size_t>(j)]; // strictly negative at the maximal j
    double s = sum_j / -next;
    return {j, s, static_cast<double>(j) + s, std::move(source)};
}

KyDimension local_dimension_at_equilibrium(const SystemSpec& spec, const Equilibrium& eq) {
    std::vector<std::complex<double>> evs = eigen_general(spec.jacobian(eq.point));
    std::vector<double> exps;
    exps.reserve(evs.size());
    for (const auto& ev : evs) {
        if (spec.kind() == SystemKind::flow) {
            exps.push_back(ev.real());
        } else {
            double mod = std::abs(ev);
            if (mod == 0.0)
                throw NumericError("local_dimension_at_equilibrium: zero eigenvalue modulus");
            exps.push_back(std::log(mod));
        }
    }
    std::sort(exps.begin(), exps.end(), std::greater<double>());

    const int n = static_cast<int>(exps.size());
    int j = 0;
    double sum = 0.0, sum_j = 0.0;
    for (int m = 1; m <= n; ++m) {
        sum += exps[static_cast<size_t>(m - 1)];
        // A partial sum that is negative only by a sliver of the next
        // contraction rate still selects m: this keeps the interpolated
        // dimension continuous across a marginal loss of stability.
        bool admissible = m == n ? sum >= 0.0
                                 : sum >= -0.01 * std::abs(exps[static_cast<size_t>(m)]);
        if (admissible) {
            j = m;
            sum_j = sum;
        }
    }
    const std::string source = "equilibrium eigen real parts";
    if (j == 0) return {0, 0.0, 0.0, source};
    if (j == n) return {n, 0.0, static_cast<double>(n), source};
    double s = sum_j / -exps[static_cast<size_t>(j)];
    double d = static_cast<double>(j) + s;
    if (s < 0.0) {
        int jf = static_cast<int>(std::floor(d));
        return {jf, d - jf, d, source};
    }
    return {j, s, d, source};
}

SweepResult sweep_max_dimension(const SystemSpec& spec, const std::vector<Vec>& points,
                                double seg_len, int n_factors, int sweeps,
                                const IntegratorConfig& cfg, int jobs) {
    if (points.empty()) throw ConfigError("sweep_max_dimension: empty point set");
    if (jobs < 1) throw ConfigError("sweep_max_dimension: jobs must be >= 1");

    std::vector<SweepEntry> table(points.size());
    auto work = [&](size_t i) {
        SweepEntry& e = table[i];
        e.index = static_cast<int>(i);
        e.point = points[i];
        try {
            FtLeSpectrum sp = finite_time_les(spec, points[i], seg_len, n_factors, sweeps, cfg);
            e.ky = kaplan_yorke(sp.les);
            e.les = std::move(sp);
        } catch (const std::exception& err) {
            e.error = err.what();
        }
    };

    int workers = std::min<int>(jobs, static_cast<int>(points.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < points.size(); ++i) work(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }

    // Order-independent reduction: strict improvement keeps the lowest index.
    int best = -1;
    for (size_t i = 0; i < table.size(); ++i) {
        if (!table[i].ky) continue;
        if (best < 0 || table[i].ky->d > table[static_cast<size_t>(best)].ky->d)
            best = static_cast<int>(i);
    }
    if (best < 0) throw NumericError("sweep_max_dimension: every grid point failed");

    SweepResult res;
    res.max_dim = *table[static_cast<size_t>(best)].ky;
    res.argmax_index = best;
    res.argmax_point = table[static_cast<size_t>(best)].point;
    res.table = std::move(table);
    return res;
}

} // namespace lyadim
