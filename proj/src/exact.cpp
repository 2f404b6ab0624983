#include "lyadim/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "lyadim/errors.hpp"

namespace lyadim {

const char* to_string(ExactTheorem t) {
    switch (t) {
    case ExactTheorem::henon: return "henon";
    case ExactTheorem::lorenz: return "lorenz";
    case ExactTheorem::gd: return "gd";
    case ExactTheorem::yang_tigan: return "yang_tigan";
    case ExactTheorem::shimizu_morioka: return "shimizu_morioka";
    }
    return "?";
}

const char* to_string(ExactOutcome o) {
    switch (o) {
    case ExactOutcome::formula: return "Formula";
    case ExactOutcome::convergence_to_equilibria: return "ConvergenceToEquilibria";
    case ExactOutcome::not_applicable: return "NotApplicable";
    }
    return "?";
}

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

// Pushes a margin and reports whether it is satisfied; unsatisfied ids land
// in `fails` so the report can name what blocked applicability.
bool push(ExactDimReport& rep, std::vector<std::string>& fails, std::string id,
          double margin, bool strict) {
    ConditionMargin c{std::move(id), margin, strict};
    bool ok = c.satisfied();
    if (!ok) fails.push_back(c.id);
    rep.conditions.push_back(std::move(c));
    return ok;
}

void merge_fails(std::vector<std::string>& into, const std::vector<std::string>& from) {
    into.insert(into.end(), from.begin(), from.end());
}

// Roots of a*x^2 + b*x + c, ascending, via the cancellation-free q form.
// Caller guarantees a != 0 and a positive discriminant, so q != 0.
std::array<double, 2> quadratic_roots(double a, double b, double c, double disc) {
    double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = q / a;
    double r2 = c / q;
    if (r1 > r2) std::swap(r1, r2);
    return {r1, r2};
}

// Distinct-real-roots margin with the tangency guard, filling gamma_roots on
// success.
double gamma_root_margin(ExactDimReport& rep, double a, double b, double c) {
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (a == 0.0) return -std::max(1.0, scale * scale);
    double disc = b * b - 4.0 * a * c;
    double margin = disc - 1e-12 * scale * scale;
    if (margin > 0.0) rep.gamma_roots = quadratic_roots(a, b, c, disc);
    return margin;
}

} // namespace

ExactDimReport henon_exact(double a, double b) {
    require(a > 0.0, "henon_exact: requires a > 0");
    require(b > 0.0 && b < 1.0, "henon_exact: requires b in (0, 1)");

    ExactDimReport rep;
    rep.theorem = ExactTheorem::henon;
    double x_minus = 0.5 * (b - 1.0 - std::sqrt((b - 1.0) * (b - 1.0) + 4.0 * a));
    double sigma1 = std::sqrt(x_minus * x_minus + b) - x_minus;
    double d = 1.0 + 1.0 / (1.0 - std::log(b) / std::log(sigma1));
    rep.outcome = ExactOutcome::formula;
    rep.value = d;
    rep.candidate_value = d;
    return rep;
}

ExactDimReport lorenz_exact(double sigma, double r, double b) {
    require(sigma > 0.0 && r > 0.0 && b > 0.0, "lorenz_exact: requires sigma, r, b > 0");

    ExactDimReport rep;
    rep.theorem = ExactTheorem::lorenz;
    rep.candidate_value =
        3.0 - 2.0 * (sigma + b + 1.0) /
                  (sigma + 1.0 + std::sqrt((sigma - 1.0) * (sigma - 1.0) + 4.0 * sigma * r));

    // Shared building blocks: c0 = b(b+sigma-1)^2 - 4 sigma(sigma b + b - b^2),
    // p = c0 + sigma^2 (r-1)(b-4) (case (a) is p <= 0), q = c0 - 3 sigma^2 (r-1).
    double c0 = b * (b + sigma - 1.0) * (b + sigma - 1.0) -
                4.0 * sigma * (sigma * b + b - b * b);
    double p = c0 + sigma * sigma * (r - 1.0) * (b - 4.0);
    double q = c0 - 3.0 * sigma * sigma * (r - 1.0);

    std::vector<std::string> fails;
    bool ok = push(rep, fails, "lorenz.r_above_one", r - 1.0, true);
    ok &= push(rep, fails, "lorenz.r_above_quadratic_bound",
               (r - 1.0) - c0 / (3.0 * sigma * sigma), false);

    std::vector<std::string> case_fails;
    bool case_a = push(rep, case_fails, "lorenz.case_a.coefficient_nonpositive", -p, false);
    if (!case_a) {
        // Case (b): gamma^2 p + gamma (2(2 sigma - b) p + 4 b (sigma+1) q)
        //           + (2 sigma - b)^2 p = 0.
        double lin = 2.0 * (2.0 * sigma - b) * p + 4.0 * b * (sigma + 1.0) * q;
        double cst = (2.0 * sigma - b) * (2.0 * sigma - b) * p;
        bool case_b = push(rep, case_fails, "lorenz.case_b.two_real_gamma_roots",
                           gamma_root_margin(rep, p, lin, cst), true);
        if (case_b)
            case_b = push(rep, case_fails, "lorenz.case_b.greater_gamma_root_positive",
                          (*rep.gamma_roots)[1], true);
        if (!case_b) merge_fails(fails, case_fails);
        ok &= case_b;
    }

    std::vector<std::string> window_fails;
    double window_lo = sigma * r - (b - sigma) * (b - 1.0);
    double window_hi = (b + 1.0) * (b + sigma) - sigma * r;
    bool equilibria = push(rep, window_fails, "lorenz.equilibria_window",
                           std::min(window_lo, window_hi), true);
    bool origin = push(rep, window_fails, "lorenz.origin_window", -window_hi, true);

    if (ok && origin) {
        rep.outcome = ExactOutcome::formula;
        rep.value = rep.candidate_value;
    } else if (ok && equilibria) {
        rep.outcome = ExactOutcome::convergence_to_equilibria;
    } else {
        rep.outcome = ExactOutcome::not_applicable;
        if (!origin && !equilibria) merge_fails(fails, window_fails);
        rep.failing_ids = std::move(fails);
    }
    return rep;
}

ExactDimReport gd_exact(double sigma, double r, double b, double A) {
    require(sigma > 0.0 && r > 0.0 && b > 0.0 && A > 0.0,
            "gd_exact: requires sigma, r, b, A > 0");

    ExactDimReport rep;
    rep.theorem = ExactTheorem::gd;
    rep.candidate_value =
        3.0 - 2.0 * (sigma + 2.0) /
                  (sigma + 1.0 + std::sqrt((sigma - 1.0) * (sigma - 1.0) + 4.0 * sigma * r));

    std::vector<std::string> fails1, fails2;
    bool case1 =
        push(rep, fails1, "gd.case1.sigma_matches_ar", -std::abs(sigma - A * r), false);
    case1 &= push(rep, fails1, "gd.case1.four_sigma_r_above_window",
                  4.0 * sigma * r - (b + 1.0) * (b + sigma), true);

    bool case2 = push(rep, fails2, "gd.case2.b_is_one", -std::abs(b - 1.0), false);
    case2 &= push(rep, fails2, "gd.case2.r_above_two", r - 2.0, true);
    double lower = (2.0 * std::sqrt(3.0) - 3.0) / 3.0 * A * r;
    double window = sigma - lower;
    if (r > 4.0) {
        double upper = (3.0 * r + 2.0 * std::sqrt(r * (2.0 * r + 1.0))) / (r - 4.0) * A * r;
        window = std::min(window, upper - sigma);
    }
    case2 &= push(rep, fails2, "gd.case2.sigma_window", window, true);

    if (case1 || case2) {
        rep.outcome = ExactOutcome::formula;
        rep.value = rep.candidate_value;
    } else {
        rep.outcome = ExactOutcome::not_applicable;
        merge_fails(rep.failing_ids, fails1);
        merge_fails(rep.failing_ids, fails2);
    }
    return rep;
}

ExactDimReport yang_exact(double sigma, double r, double b) {
    require(sigma > 0.0 && b > 0.0, "yang_exact: requires sigma, b > 0");
    require(std::isfinite(r), "yang_exact: requires finite r");

    ExactDimReport rep;
    rep.theorem = ExactTheorem::yang_tigan;
    double radicand = sigma * sigma + 4.0 * sigma * r;
    if (radicand >= 0.0)
        rep.candidate_value = 3.0 - 2.0 * (sigma + b) / (sigma + std::sqrt(radicand));

    std::vector<std::string> fails;
    if (r == 0.0) {
        bool ok = push(rep, fails, "yang.r_zero.b_below_sigma", b * (sigma - b), true);
        // sigma - (sigma+b)^2 / (4(sigma-b)) >= 0, cleared of the denominator
        // 4(sigma-b), which the previous condition keeps positive.
        ok &= push(rep, fails, "yang.r_zero.sigma_dominates",
                   4.0 * sigma * (sigma - b) - (sigma + b) * (sigma + b), false);
        rep.outcome = ok ? ExactOutcome::convergence_to_equilibria : ExactOutcome::not_applicable;
        if (!ok) rep.failing_ids = std::move(fails);
        return rep;
    }
    if (r < 0.0) {
        bool ok = push(rep, fails, "yang.r_negative.stability_bound",
                       r * sigma + b * (sigma - b), true);
        rep.outcome = ok ? ExactOutcome::convergence_to_equilibria : ExactOutcome::not_applicable;
        if (!ok) rep.failing_ids = std::move(fails);
        return rep;
    }

    // r > 0: 4 b r sigma^2 (gamma + 2 sigma - b)^2 + 16 sigma b gamma e = 0
    // with e = r sigma^2 + b(sigma+b)^2 - 4 sigma(sigma r + sigma b - b^2),
    // expanded to a2 gamma^2 + (2(2 sigma - b) a2 + 16 sigma b e) gamma
    // + (2 sigma - b)^2 a2.
    double e = r * sigma * sigma + b * (sigma + b) * (sigma + b) -
               4.0 * sigma * (sigma * r + sigma * b - b * b);
    double a2 = 4.0 * b * r * sigma * sigma;
    double lin = 2.0 * (2.0 * sigma - b) * a2 + 16.0 * sigma * b * e;
    double cst = (2.0 * sigma - b) * (2.0 * sigma - b) * a2;
    bool ok = push(rep, fails, "yang.r_positive.two_real_gamma_roots",
                   gamma_root_margin(rep, a2, lin, cst), true);
    if (ok)
        ok = push(rep, fails, "yang.r_positive.greater_gamma_root_positive",
                  (*rep.gamma_roots)[1], true);

    std::vector<std::string> window_fails;
    double window_lo = r * sigma - b * (b - sigma);
    double window_hi = b * (sigma + b) - r * sigma;
    bool equilibria = push(rep, window_fails, "yang.r_positive.equilibria_window",
                           std::min(window_lo, window_hi), true);
    bool origin = push(rep, window_fails, "yang.r_positive.origin_window", -window_hi, true);

    if (ok && origin) {
        rep.outcome = ExactOutcome::formula;
        rep.value = rep.candidate_value;
    } else if (ok && equilibria) {
        rep.outcome = ExactOutcome::convergence_to_equilibria;
    } else {
        rep.outcome = ExactOutcome::not_applicable;
        if (!origin && !equilibria) merge_fails(fails, window_fails);
        rep.failing_ids = std::move(fails);
    }
    return rep;
}

ExactDimReport shimizu_morioka_exact(double alpha, double lambda) {
    require(alpha > 0.0 && lambda > 0.0, "shimizu_morioka_exact: requires alpha, lambda > 0");

    ExactDimReport rep;
    rep.theorem = ExactTheorem::shimizu_morioka;
    rep.candidate_value =
        3.0 - 2.0 * (lambda + alpha) / (lambda + std::sqrt(4.0 + lambda * lambda));

    // A negative square-root argument fails its inequality outright; the
    // argument itself then serves as the (negative) margin.
    std::vector<std::string> fails;
    double arg1 = 10.0 + 3.0 / alpha - 13.0 * alpha;
    bool ok = push(rep, fails, "sm.lambda_upper_root_bound",
                   arg1 >= 0.0 ? std::sqrt(arg1) - (lambda - 4.0) : arg1, false);
    ok &= push(rep, fails, "sm.lambda_below_inverse_alpha", 1.0 / alpha - alpha - lambda, true);
    double arg2 = (8.0 + 15.0 * alpha - 8.0 * alpha * alpha - 24.0 * alpha * alpha * alpha) /
                  (2.0 * alpha * (alpha + 1.0));
    ok &= push(rep, fails, "sm.lambda_lower_root_bound",
               arg2 >= 0.0 ? std::sqrt(arg2) - (4.0 - lambda) : arg2, false);

    if (ok) {
        rep.outcome = ExactOutcome::formula;
        rep.value = rep.candidate_value;
    } else {
        rep.outcome = ExactOutcome::not_applicable;
        rep.failing_ids = std::move(fails);
    }
    return rep;
}

double leonov_margin(const SystemSpec& spec, const Mat& s,
                     const std::function<double(const Vec&)>& v_term, int j,
                     double s_frac, const std::vector<Vec>& points, int jobs) {
    int n = spec.dim();
    if (s.size() != n) throw ConfigError("leonov_margin: S dimension mismatch");
    if (points.empty()) throw ConfigError("leonov_margin: empty point list");
    if (jobs < 1) throw ConfigError("leonov_margin: jobs must be >= 1");
    if (j < 0 || j > n || s_frac < 0.0 || s_frac > 1.0 || (s_frac > 0.0 && j + 1 > n))
        throw ConfigError("leonov_margin: requires 0 <= j <= n, s in [0, 1], j + s <= n");
    if (!v_term) throw ConfigError("leonov_margin: missing v_term");

    Mat s_inv;
    try {
        s_inv = inverse(s);
    } catch (const NumericError&) {
        throw ConfigError("leonov_margin: S must be invertible");
    }

    auto point_value = [&](const Vec& u) {
        Mat m = s * spec.jacobian(u) * s_inv;
        std::vector<double> lam(static_cast<size_t>(n));
        if (spec.kind() == SystemKind::flow) {
            Mat h = m;
            for (int a = 0; a < n; ++a)
                for (int c = 0; c < n; ++c) h(a, c) = 0.5 * (m(a, c) + m(c, a));
            lam = eigen_symmetric(h);
        } else {
            SingularSpectrum sv = singular_values(m);
            if (sv.min() <= 0.0)
                throw NumericError("leonov_margin: singular map Jacobian in the sample");
            for (int i = 0; i < n; ++i) lam[static_cast<size_t>(i)] = std::log(sv[i]);
        }
        double total = v_term(u);
        for (int i = 0; i < j; ++i) total += lam[static_cast<size_t>(i)];
        if (s_frac > 0.0) total += s_frac * lam[static_cast<size_t>(j)];
        return total;
    };

    std::vector<double> vals(points.size());
    int workers = std::min<int>(jobs, static_cast<int>(points.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < points.size(); ++i) vals[i] = point_value(points[i]);
    } else {
        std::atomic<size_t> next{0};
        std::atomic<bool> failed{false};
        std::mutex guard;
        std::exception_ptr failure;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
                    if (failed.load()) return;
                    try {
                        vals[i] = point_value(points[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(guard);
                        if (!failure) failure = std::current_exception();
                        failed.store(true);
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return *std::max_element(vals.begin(), vals.end());
}

} // namespace lyadim
