#include "lyadim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "lyadim/atlas.hpp"
#include "lyadim/errors.hpp"
#include "lyadim/exact.hpp"
#include "lyadim/flow.hpp"
#include "lyadim/lyap.hpp"
#include "lyadim/report.hpp"
#include "lyadim/smallmat.hpp"
#include "lyadim/systems.hpp"

namespace lyadim {

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void note(const std::string& line) {
        detail += line;
        detail += "; ";
    }
    void that(bool cond, const std::string& what) {
        ok = ok && cond;
        detail += cond ? "[ok] " : "[FAIL] ";
        detail += what;
        detail += "; ";
    }
    void close(const std::string& what, double observed, double expected, double tol) {
        bool pass = std::isfinite(observed) && std::abs(observed - expected) <= tol;
        ok = ok && pass;
        detail += pass ? "[ok] " : "[FAIL] ";
        detail += what + " = " + format_double(observed) + ", expected " +
                  format_double(expected) + " +/- " + format_double(tol) + "; ";
    }
    void below(const std::string& what, double observed, double bound) {
        bool pass = std::isfinite(observed) && observed <= bound;
        ok = ok && pass;
        detail += pass ? "[ok] " : "[FAIL] ";
        detail += what + " = " + format_double(observed) + " <= " + format_double(bound) + "; ";
    }
};

// Runs shared across criteria so the cross-check suite reuses the exact
// factor chains the headline numbers came from.
struct SharedRuns {
    std::vector<Vec> lorenz_pts;
    std::optional<double> lorenz_max_d;
    std::optional<FactorSequence> gd_seq;
    std::optional<FactorSequence> henon_seq;
    std::optional<AttractorSample> gd_classified;
};

double sum_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", s);
    return buf;
}

Mat random_mat(std::mt19937& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Mat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    return m;
}

// Orthogonal x diagonal x orthogonal with diagonal entries in [0.5, 2]:
// condition number at most 4, so short chains stay far from degeneracy.
Mat well_conditioned_factor(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> d(0.5, 2.0);
    Mat q1 = qr_posdiag(random_mat(rng, n, -1.0, 1.0)).q;
    Mat q2 = qr_posdiag(random_mat(rng, n, -1.0, 1.0)).q;
    Mat diag(n);
    for (int i = 0; i < n; ++i) diag(i, i) = d(rng);
    return q1 * diag * q2;
}

Mat explicit_product(const FactorSequence& seq) {
    Mat m = Mat::identity(seq.factors.front().size());
    for (const Mat& f : seq.factors) m = f * m; // oldest first
    return m;
}

// Chain whose product has well-separated singular values. Each factor is
// P_{k+1} D_k P_k^T with shared orthogonal P's, so the product telescopes to
// P_L (D_{L-1}...D_0) P_0^T and adjacent product singular values stay a factor
// total_gap apart. The sweep error contracts like the square of the inverse
// gap per sweep, so clustered products (iid random factors) converge too
// slowly for a tight oracle while separated ones converge in a few sweeps.
// Individual factors remain mild: condition number about total_gap^(2/len).
FactorSequence gap_chain(std::mt19937& rng, int dim, int len, double total_gap) {
    double g = std::pow(total_gap, 1.0 / len);
    std::uniform_real_distribution<double> jitter(0.8, 1.25);
    FactorSequence seq;
    seq.seg_len = 0.25;
    seq.origin = Vec(dim);
    Mat p_prev = qr_posdiag(random_mat(rng, dim, -1.0, 1.0)).q;
    for (int k = 0; k < len; ++k) {
        Mat p_next = qr_posdiag(random_mat(rng, dim, -1.0, 1.0)).q;
        Mat diag(dim);
        for (int i = 0; i < dim; ++i)
            diag(i, i) = jitter(rng) * std::pow(g, double(dim - 1 - i));
        seq.factors.push_back(p_next * (diag * p_prev.transposed()));
        p_prev = p_next;
    }
    return seq;
}

std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
}

// ---------------------------------------------------------------- criteria

void criterion_lorenz_exact(Checker& ck, SharedRuns&, const AcceptanceOptions&) {
    ExactDimReport a = lorenz_exact(10.0, 28.0, 8.0 / 3.0);
    ck.that(a.outcome == ExactOutcome::formula, "outcome at r=28 is Formula");
    ck.close("lorenz_exact(10,28,8/3)", a.value.value_or(NAN), 2.4013, 5e-4);

    ExactDimReport b = lorenz_exact(10.0, 24.5, 8.0 / 3.0);
    ck.that(b.outcome == ExactOutcome::formula, "outcome at r=24.5 is Formula");
    ck.close("lorenz_exact(10,24.5,8/3)", b.value.value_or(NAN), 2.3727, 5e-4);
}

void criterion_equilibrium_identity(Checker& ck, SharedRuns&, const AcceptanceOptions&) {
    const double sigmas[] = {4.0, 7.0, 10.0, 13.0, 16.0};
    const double bs[] = {1.0, 2.0, 8.0 / 3.0, 3.5};
    double worst = 0.0;
    int count = 0;
    for (double sigma : sigmas) {
        for (double b : bs) {
            // r chosen so the chaotic-branch window holds with margin
            double r = 1.3 * (b + 1.0) * (b + sigma) / sigma + 2.0;
            ExactDimReport rep = lorenz_exact(sigma, r, b);
            if (!rep.candidate_value) {
                ck.that(false, "candidate value missing at sigma=" + format_double(sigma) +
                                   " b=" + format_double(b));
                continue;
            }
            SystemSpec spec = SystemSpec::make(
                SystemId::lorenz, {{"sigma", sigma}, {"r", r}, {"b", b}});
            KyDimension ky = local_dimension_at_equilibrium(spec, spec.equilibria()[0]);
            worst = std::max(worst, std::abs(ky.d - *rep.candidate_value));
            ++count;
        }
    }
    ck.note(std::to_string(count) + " grid points");
    ck.below("max |local KY at origin - closed form|", worst, 1e-9);
}

void criterion_stable_pair_dimension(Checker& ck, SharedRuns&, const AcceptanceOptions&) {
    SystemSpec spec = SystemSpec::make(SystemId::lorenz, {{"r", 24.5}});
    std::vector<Equilibrium> eqs = spec.equilibria();
    ck.that(eqs.size() == 3, "three equilibria at r=24.5");
    KyDimension ky = local_dimension_at_equilibrium(spec, eqs[1]);
    ck.close("local dimension at S1", ky.d, 1.9989, 1e-3);
}

void criterion_lorenz_sweep(Checker& ck, SharedRuns& shared, const AcceptanceOptions& opt) {
    SystemSpec spec = SystemSpec::make(SystemId::lorenz);
    IntegratorConfig cfg;
    AttractorSample sample =
        settle(spec, spec.default_seed(), /*transient=*/100.0, /*t_sample=*/50.0,
               /*sample_every=*/1.0, cfg);
    ck.that(sample.classification == AttractorClass::pending, "settled sample is bounded");
    std::vector<Vec> pts = grid_points(sample, 50);
    ck.that(pts.size() == 50, "50 grid points");

    SweepResult res = sweep_max_dimension(spec, pts, 0.1, 5000, 3, cfg, opt.jobs);
    ck.close("max finite-time dimension (T=500)", res.max_dim.d, 2.0565, 0.02);

    shared.lorenz_pts = std::move(pts);
    shared.lorenz_max_d = res.max_dim.d;
}

void criterion_gd(Checker& ck, SharedRuns& shared, const AcceptanceOptions& opt) {
    ExactDimReport rep = gd_exact(4.0, 700.0, 1.0, 0.0052);
    ck.that(rep.outcome == ExactOutcome::formula, "outcome is Formula");
    ck.close("gd_exact(4,700,1,0.0052)", rep.value.value_or(NAN), 2.8917, 5e-4);

    SystemSpec spec = SystemSpec::make(SystemId::generalized_lorenz);
    IntegratorConfig cfg;
    Vec seed = spec.default_seed();
    FactorSequence seq = factor_sequence(spec, seed, 0.1, 10000, cfg);
    FtLeSpectrum sp = finite_time_les(seq, 3);
    KyDimension ky = kaplan_yorke(sp.les);
    ck.close("hidden-run dimension (T=1000)", ky.d, 2.1322, 0.05);
    ck.close("sum of exponents", sum_of(sp.les), -6.0, 1e-3);
    shared.gd_seq = std::move(seq);

    AttractorSample sample = settle(spec, seed, 100.0, 100.0, 0.25, cfg);
    ck.that(sample.classification == AttractorClass::pending, "settled sample is bounded");
    if (sample.classification == AttractorClass::pending) {
        ClassifyOptions copt;
        copt.trial_transient = 300.0;
        copt.trial_time = 50.0;
        copt.jobs = opt.jobs;
        AttractorSample out = classify_excitation(spec, std::move(sample), copt, cfg);
        ck.that(out.classification == AttractorClass::hidden,
                std::string("classification = ") + to_string(out.classification) +
                    ", expected Hidden");
        shared.gd_classified = std::move(out);
    }
}

void criterion_henon(Checker& ck, SharedRuns& shared, const AcceptanceOptions&) {
    ExactDimReport rep = henon_exact(1.4, 0.3);
    // Independent oracle in extended precision: the saddle fixed point's
    // stretch rate sqrt(x^2 + b) - x and the one-positive-exponent
    // interpolation 1 + ln(s1)/(ln(s1) - ln(b)).
    const long double a = 1.4L, b = 0.3L;
    long double xm = ((b - 1.0L) - sqrtl((b - 1.0L) * (b - 1.0L) + 4.0L * a)) / 2.0L;
    long double s1 = sqrtl(xm * xm + b) - xm;
    long double oracle = 1.0L + logl(s1) / (logl(s1) - logl(b));
    ck.that(rep.outcome == ExactOutcome::formula, "outcome is Formula");
    ck.close("henon_exact(1.4,0.3)", rep.value.value_or(NAN), static_cast<double>(oracle), 1e-9);

    SystemSpec spec = SystemSpec::make(SystemId::henon);
    IntegratorConfig cfg;
    FactorSequence seq = factor_sequence(spec, spec.default_seed(), 1.0, 100000, cfg);
    FtLeSpectrum sp = finite_time_les(seq, 3);
    ck.close("sum of exponents over 1e5 iterations", sum_of(sp.les), std::log(0.3), 1e-6);
    shared.henon_seq = std::move(seq);
}

void criterion_shimizu_morioka(Checker& ck, SharedRuns&, const AcceptanceOptions&) {
    ExactDimReport rep = shimizu_morioka_exact(0.4, 0.9);
    ck.that(rep.outcome == ExactOutcome::formula, "outcome is Formula");
    bool margins = !rep.conditions.empty();
    for (const ConditionMargin& c : rep.conditions) margins = margins && c.margin > 0.0;
    ck.that(margins, "all condition margins strictly positive");
    double oracle = 3.0 - 2.6 / (0.9 + std::sqrt(4.81));
    ck.close("shimizu_morioka_exact(0.4,0.9)", rep.value.value_or(NAN), oracle, 1e-9);
}

void criterion_yang(Checker& ck, SharedRuns&, const AcceptanceOptions&) {
    std::mt19937 rng(81750u);
    std::uniform_real_distribution<double> us(1.0, 20.0), ub(0.5, 5.0), ur(0.1, 50.0);
    double worst_res = 0.0, worst_formula = 0.0;
    int with_roots = 0, with_formula = 0;
    for (int k = 0; k < 50; ++k) {
        double sigma = us(rng), b = ub(rng), r = ur(rng);
        ExactDimReport rep = yang_exact(sigma, r, b);
        if (rep.gamma_roots) {
            ++with_roots;
            double e = r * sigma * sigma + b * (sigma + b) * (sigma + b) -
                       4.0 * sigma * (sigma * r + sigma * b - b * b);
            double a2 = 4.0 * b * r * sigma * sigma;
            double lin = 2.0 * (2.0 * sigma - b) * a2 + 16.0 * sigma * b * e;
            double cst = (2.0 * sigma - b) * (2.0 * sigma - b) * a2;
            for (double g : *rep.gamma_roots) {
                double t1 = a2 * g * g, t2 = lin * g, t3 = cst;
                double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), 1e-300});
                worst_res = std::max(worst_res, std::abs(t1 + t2 + t3) / scale);
            }
        }
        if (rep.outcome == ExactOutcome::formula && rep.value) {
            ++with_formula;
            double direct =
                3.0 - 2.0 * (sigma + b) / (sigma + std::sqrt(sigma * sigma + 4.0 * sigma * r));
            worst_formula = std::max(worst_formula, std::abs(*rep.value - direct));
        }
    }
    ck.note(std::to_string(with_roots) + "/50 draws with real roots, " +
            std::to_string(with_formula) + " on the formula branch");
    ck.that(with_roots > 0, "sample exercises the root branch");
    ck.below("max relative quadratic residual", worst_res, 1e-8);
    ck.below("max |formula - direct evaluation|", worst_formula, 1e-12);
}

void criterion_product_svd_oracle(Checker& ck, SharedRuns&, const AcceptanceOptions&) {
    std::mt19937 rng(91750u);
    std::uniform_int_distribution<int> len(4, 8);
    double worst = 0.0;
    for (int chain = 0; chain < 200; ++chain) {
        FactorSequence seq = gap_chain(rng, 3, len(rng), 1000.0);

        ProductSvdResult res = product_svd(seq, 3);
        std::vector<double> ln_sum = sorted_desc(res.les);
        for (double& v : ln_sum) v *= seq.total_time();

        SingularSpectrum sv = singular_values(explicit_product(seq));
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(ln_sum[static_cast<size_t>(i)] - std::log(sv[i])));
    }
    ck.below("max |sum ln diag R - ln sigma(product)| over 200 chains", worst, 1e-6);
}

void check_horn(Checker& ck) {
    std::mt19937 rng(101750u);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        Mat a = random_mat(rng, 3, -2.0, 2.0);
        Mat b = random_mat(rng, 3, -2.0, 2.0);
        SingularSpectrum sab = singular_values(a * b);
        SingularSpectrum sa = singular_values(a);
        SingularSpectrum sb = singular_values(b);
        for (double d = 0.25; d <= 3.0 + 1e-12; d += 0.25) {
            double lhs = omega_d(sab, d);
            double rhs = omega_d(sa, d) * omega_d(sb, d);
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
        }
    }
    ck.below("Horn submultiplicativity: max omega_d(AB)/(omega_d(A)omega_d(B))", worst,
             1.0 + 1e-10);
}

void check_le_lce(Checker& ck) {
    std::mt19937 rng(111750u);
    std::uniform_int_distribution<int> len(1, 6);
    // Singular-value exponents against column-norm exponents: at finite
    // horizon the i-th singular value is bounded by sqrt(n-i+1) times the
    // i-th largest column norm (Courant-Fischer over the span of the n-i
    // smallest columns), the bottom one needs no constant, and the top
    // column norm never exceeds the top singular value.
    double worst_mid = 0.0, worst_bottom = 0.0, worst_top = 0.0;
    for (int chain = 0; chain < 200; ++chain) {
        FactorSequence seq;
        seq.seg_len = 0.5;
        seq.origin = Vec(3);
        int n = len(rng);
        for (int k = 0; k < n; ++k) seq.factors.push_back(well_conditioned_factor(rng, 3));
        double t = seq.total_time();

        SingularSpectrum sv = singular_values(explicit_product(seq));
        std::vector<double> le(3);
        for (int i = 0; i < 3; ++i) le[static_cast<size_t>(i)] = std::log(sv[i]) / t;
        std::vector<double> lce = lce_column_exponents(seq);

        for (int i = 0; i < 3; ++i) {
            double allow = std::log(3.0 - i) / (2.0 * t);
            worst_mid = std::max(worst_mid, le[static_cast<size_t>(i)] -
                                                lce[static_cast<size_t>(i)] - allow);
        }
        worst_bottom = std::max(worst_bottom, le[2] - lce[2]);
        worst_top = std::max(worst_top, lce[0] - le[0]);
    }
    ck.below("LE_i - LCE_i - ln(n-i+1)/(2T) max", worst_mid, 1e-9);
    ck.below("LE_n - LCE_n max", worst_bottom, 1e-9);
    ck.below("LCE_1 - LE_1 max", worst_top, 1e-9);
}

void check_ky_convex(Checker& ck) {
    std::mt19937 rng(121750u);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> dims(2, 4);
    double worst = 0.0;
    int interior = 0;
    for (int k = 0; k < 500; ++k) {
        int n = dims(rng);
        std::vector<double> les(static_cast<size_t>(n));
        for (double& x : les) x = u(rng);
        les = sorted_desc(les);
        KyDimension ky = kaplan_yorke(les);
        if (ky.j < 1 || ky.j >= n) continue;
        ++interior;
        double sum_j = std::accumulate(les.begin(), les.begin() + ky.j, 0.0);
        double sum_j1 = sum_j + les[static_cast<size_t>(ky.j)];
        worst = std::max(worst, std::abs((1.0 - ky.s) * sum_j + ky.s * sum_j1));
    }
    ck.note(std::to_string(interior) + "/500 spectra interpolate strictly inside");
    ck.below("KY convex identity residual", worst, 1e-12);
}

void check_semigroup_cocycle(Checker& ck) {
    IntegratorConfig cfg;

    // Map composition: iterating t+s steps is literally the same loop as s
    // then t, so the agreement is exact.
    {
        SystemSpec henon = SystemSpec::make(SystemId::henon);
        Vec u = henon.default_seed();
        Vec both = u;
        for (int k = 0; k < 10; ++k) both = henon.vector_field(both);
        Vec part = u;
        for (int k = 0; k < 3; ++k) part = henon.vector_field(part);
        for (int k = 0; k < 7; ++k) part = henon.vector_field(part);
        ck.below("henon semigroup sup-diff (s=3,t=7)", (both - part).norm(), 1e-12);
    }

    // Flow composition on a contracting regime over the full t,s <= 10 range
    // and on the chaotic regime over horizons short enough that the 1e-6
    // budget is not consumed by exponential error growth.
    {
        SystemSpec stable = SystemSpec::make(SystemId::lorenz, {{"r", 0.5}});
        Vec u0(3);
        u0[0] = 1.0;
        u0[1] = 1.0;
        u0[2] = 1.0;
        const double pairs[][2] = {{2.2, 7.8}, {9.5, 0.4}, {5.0, 5.0}};
        double worst = 0.0;
        for (const auto& ts : pairs) {
            Vec whole = integrate_segment(stable, u0, ts[0] + ts[1], cfg).u;
            Vec split = integrate_segment(stable, integrate_segment(stable, u0, ts[0], cfg).u,
                                          ts[1], cfg).u;
            Vec diff = whole - split;
            worst = std::max(worst, diff.norm());
        }
        ck.below("lorenz r=0.5 semigroup sup-diff (t,s <= 10)", worst, 1e-6);
    }
    {
        SystemSpec lorenz = SystemSpec::make(SystemId::lorenz);
        Vec u0(3);
        u0[0] = 1.0;
        u0[1] = 1.0;
        u0[2] = 1.0;
        const double pairs[][2] = {{0.6, 0.9}, {1.4, 0.1}, {0.75, 0.75}};
        double worst = 0.0;
        for (const auto& ts : pairs) {
            Vec whole = integrate_segment(lorenz, u0, ts[0] + ts[1], cfg).u;
            Vec split = integrate_segment(lorenz, integrate_segment(lorenz, u0, ts[0], cfg).u,
                                          ts[1], cfg).u;
            Vec diff = whole - split;
            worst = std::max(worst, diff.norm());
        }
        ck.below("lorenz r=28 semigroup sup-diff (t+s <= 1.5)", worst, 1e-6);
    }

    // Factor-chain product versus a single fundamental-matrix segment,
    // compared through singular values. Horizons keep the condition number
    // of the true product below ~1e10 so a 1e-5 relative comparison is
    // meaningful in double precision.
    {
        SystemSpec lorenz = SystemSpec::make(SystemId::lorenz);
        Vec u0(3);
        u0[0] = 1.0;
        u0[1] = 1.0;
        u0[2] = 1.0;
        Vec start = integrate_segment(lorenz, u0, 30.0, cfg).u; // on the attractor
        FactorSequence seq = factor_sequence(lorenz, start, 0.1, 15, cfg);
        Mat prod = explicit_product(seq);
        Mat whole = integrate_segment(lorenz, start, 1.5, cfg).phi;
        SingularSpectrum sp = singular_values(prod);
        SingularSpectrum sw = singular_values(whole);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(sp[i] - sw[i]) / sw[i]);
        ck.below("lorenz cocycle relative singular-value diff (T=1.5)", worst, 1e-5);
    }
    {
        SystemSpec gl = SystemSpec::make(SystemId::generalized_lorenz);
        Vec start = gl.default_seed();
        FactorSequence seq = factor_sequence(gl, start, 0.05, 6, cfg);
        Mat prod = explicit_product(seq);
        Mat whole = integrate_segment(gl, start, 0.3, cfg).phi;
        SingularSpectrum sp = singular_values(prod);
        SingularSpectrum sw = singular_values(whole);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(sp[i] - sw[i]) / sw[i]);
        ck.below("generalized-lorenz cocycle relative singular-value diff (T=0.3)", worst, 1e-5);
    }
    {
        SystemSpec henon = SystemSpec::make(SystemId::henon);
        IntegratorConfig mcfg;
        FactorSequence parts = factor_sequence(henon, henon.default_seed(), 1.0, 5, mcfg);
        FactorSequence whole = factor_sequence(henon, henon.default_seed(), 5.0, 1, mcfg);
        SingularSpectrum sp = singular_values(explicit_product(parts));
        SingularSpectrum sw = singular_values(whole.factors.front());
        double worst = 0.0;
        for (int i = 0; i < 2; ++i)
            worst = std::max(worst, std::abs(sp[i] - sw[i]) / sw[i]);
        ck.below("henon cocycle relative singular-value diff (T=5)", worst, 1e-5);
    }
}

void check_benettin(Checker& ck, SharedRuns& shared) {
    // Per-exponent comparison of the two accumulation paths. Single-pass QR
    // carries a frame-alignment constant of order |ln cos(angle)| / T, so the
    // exponent-level check is run on the long hidden-attractor and henon
    // chains; the lorenz sweep (T = 500, constant ~2e-3) is compared through
    // the quantity it reports, the grid maximum of the dimension.
    struct Item {
        const char* name;
        const FactorSequence* seq;
    };
    std::vector<Item> items;
    if (shared.gd_seq) items.push_back({"generalized-lorenz", &*shared.gd_seq});
    if (shared.henon_seq) items.push_back({"henon", &*shared.henon_seq});
    for (const Item& item : items) {
        std::vector<double> qr_path = sorted_desc(benettin_les(*item.seq));
        std::vector<double> svd_path = finite_time_les(*item.seq, 3).les;
        double worst = 0.0;
        for (std::size_t i = 0; i < qr_path.size(); ++i)
            worst = std::max(worst, std::abs(qr_path[i] - svd_path[i]));
        ck.below(std::string(item.name) + " |benettin - product svd| max", worst, 1e-4);
    }
    if (!shared.lorenz_pts.empty() && shared.lorenz_max_d) {
        SystemSpec spec = SystemSpec::make(SystemId::lorenz);
        IntegratorConfig cfg;
        double max_d = 0.0;
        for (const Vec& p : shared.lorenz_pts) {
            FactorSequence seq = factor_sequence(spec, p, 0.1, 5000, cfg);
            KyDimension ky = kaplan_yorke(sorted_desc(benettin_les(seq)));
            max_d = std::max(max_d, ky.d);
        }
        ck.below("lorenz sweep max dimension |benettin - product svd|",
                 std::abs(max_d - *shared.lorenz_max_d), 1e-4);
    } else {
        ck.note("lorenz sweep comparison skipped (--fast)");
    }
}

void criterion_properties(Checker& ck, SharedRuns& shared, const AcceptanceOptions&) {
    check_horn(ck);
    check_le_lce(ck);
    check_ky_convex(ck);
    check_semigroup_cocycle(ck);
    check_benettin(ck, shared);
}

void criterion_classification(Checker& ck, SharedRuns& shared, const AcceptanceOptions& opt) {
    IntegratorConfig cfg;

    // Both lorenz verdicts use a dense reference sample (0.1 spacing over
    // 400 time units) and delta_attr = 2.5: attracted trial clouds then sit
    // below ~1.5 while trials stalled near the stable foci stay above ~5, so
    // the verdicts hold for any threshold in [1.5, 4].
    {
        SystemSpec spec = SystemSpec::make(SystemId::lorenz);
        AttractorSample sample = settle(spec, spec.default_seed(), 100.0, 400.0, 0.1, cfg);
        ck.that(sample.classification == AttractorClass::pending, "r=28 sample is bounded");
        if (sample.classification == AttractorClass::pending) {
            ClassifyOptions copt;
            copt.trial_transient = 300.0;
            copt.trial_time = 50.0;
            copt.delta_attr = 2.5;
            copt.jobs = opt.jobs;
            AttractorSample out = classify_excitation(spec, std::move(sample), copt, cfg);
            ck.that(out.classification == AttractorClass::self_excited,
                    std::string("r=28 classification = ") + to_string(out.classification) +
                        ", expected SelfExcited");
            ck.that(out.exciting_equilibria.size() == 3,
                    "r=28 excited from all three equilibria (got " +
                        std::to_string(out.exciting_equilibria.size()) + ")");
        }
    }

    {
        SystemSpec spec = SystemSpec::make(SystemId::lorenz, {{"r", 24.5}});
        // Seed just off the origin along its expanding eigendirection; the
        // escaping orbit lands on the chaotic set, which coexists with the
        // stable symmetric pair at this r.
        double lam = (-11.0 + std::sqrt(81.0 + 40.0 * 24.5)) / 2.0;
        Vec dir(3);
        dir[0] = 10.0;
        dir[1] = lam + 10.0;
        dir[2] = 0.0;
        dir *= 1e-3 / dir.norm();
        AttractorSample sample = settle(spec, dir, 500.0, 400.0, 0.1, cfg);
        ck.that(sample.classification == AttractorClass::pending,
                std::string("r=24.5 sample is bounded and non-equilibrium (got ") +
                    to_string(sample.classification) + ")");
        if (sample.classification == AttractorClass::pending) {
            ClassifyOptions copt;
            copt.trial_transient = 2000.0; // the near-Hopf foci contract slowly
            copt.trial_time = 50.0;
            copt.delta_attr = 2.5;
            copt.jobs = opt.jobs;
            AttractorSample out = classify_excitation(spec, std::move(sample), copt, cfg);
            ck.that(out.classification == AttractorClass::self_excited,
                    std::string("r=24.5 classification = ") + to_string(out.classification) +
                        ", expected SelfExcited");
            bool only_origin = out.exciting_equilibria.size() == 1 &&
                               out.exciting_equilibria.front() == "S0";
            std::string got;
            for (const std::string& label : out.exciting_equilibria) got += label + " ";
            ck.that(only_origin, "r=24.5 excited from the origin only (got " + got + ")");
        }
    }

    {
        ck.that(shared.gd_classified.has_value(), "generalized-lorenz classification available");
        if (shared.gd_classified)
            ck.that(shared.gd_classified->classification == AttractorClass::hidden,
                    std::string("generalized-lorenz classification = ") +
                        to_string(shared.gd_classified->classification) + ", expected Hidden");
    }
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    struct Entry {
        const char* name;
        void (*fn)(Checker&, SharedRuns&, const AcceptanceOptions&);
        bool skip_in_fast;
    };
    const Entry entries[] = {
        {"lorenz exact dimension values", criterion_lorenz_exact, false},
        {"lorenz equilibrium formula identity on a parameter grid", criterion_equilibrium_identity,
         false},
        {"lorenz stable-pair local dimension at r=24.5", criterion_stable_pair_dimension, false},
        {"lorenz attractor dimension sweep", criterion_lorenz_sweep, false},
        {"glukhovsky-dolzhansky exact value, hidden run, divergence", criterion_gd, false},
        {"henon exact value and determinant identity", criterion_henon, false},
        {"shimizu-morioka margins and exact value", criterion_shimizu_morioka, false},
        {"yang quadratic residuals and formula branch", criterion_yang, false},
        {"product svd against the explicit-product oracle", criterion_product_svd_oracle, false},
        {"property suites (horn, le/lce, ky, semigroup/cocycle, benettin)", criterion_properties,
         false},
        {"self-excitation classifications", criterion_classification, false},
    };

    std::vector<CriterionResult> results;
    SharedRuns shared;
    int index = 0;
    for (const Entry& entry : entries) {
        ++index;
        CriterionResult res;
        res.index = index;
        res.name = entry.name;
        if (opt.fast && index == 4) {
            res.skipped = true;
            res.passed = true;
            res.detail = "skipped (--fast)";
            results.push_back(std::move(res));
            continue;
        }
        Checker ck;
        auto t0 = std::chrono::steady_clock::now();
        try {
            entry.fn(ck, shared, opt);
        } catch (const std::exception& e) {
            ck.ok = false;
            ck.detail += std::string("[FAIL] exception: ") + e.what() + "; ";
        }
        auto t1 = std::chrono::steady_clock::now();
        res.passed = ck.ok;
        res.detail = ck.detail;
        res.seconds = std::chrono::duration<double>(t1 - t0).count();
        results.push_back(std::move(res));
    }
    return results;
}

std::string acceptance_report(const std::vector<CriterionResult>& results) {
    std::string out;
    int failed = 0;
    for (const CriterionResult& r : results) {
        if (r.skipped)
            out += "SKIP ";
        else if (r.passed)
            out += "PASS ";
        else
            out += "FAIL ";
        out += std::to_string(r.index) + " " + r.name + " (" + fmt_seconds(r.seconds) + "s): " +
               r.detail + "\n";
        if (!r.passed && !r.skipped) ++failed;
    }
    out += failed == 0 ? "acceptance: all criteria passed\n"
                       : "acceptance: " + std::to_string(failed) + " criteria FAILED\n";
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const CriterionResult& r : results)
        if (!r.skipped && !r.passed) return false;
    return true;
}

} // namespace lyadim
