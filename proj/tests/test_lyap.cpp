#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "lyadim/errors.hpp"
#include "lyadim/exact.hpp"
#include "lyadim/flow.hpp"
#include "lyadim/lyap.hpp"
#include "lyadim/smallmat.hpp"
#include "lyadim/systems.hpp"

using namespace lyadim;

namespace {

Mat random_mat(std::mt19937& rng, int n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Mat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    return m;
}

Mat random_orthogonal(std::mt19937& rng, int n) { return qr_posdiag(random_mat(rng, n)).q; }

Mat explicit_product(const FactorSequence& seq) {
    Mat m = Mat::identity(seq.factors.front().size());
    for (const Mat& f : seq.factors) m = f * m;
    return m;
}

FactorSequence make_chain(std::vector<Mat> factors, double seg_len) {
    FactorSequence seq;
    seq.seg_len = seg_len;
    seq.origin = Vec::zero(factors.front().size());
    seq.factors = std::move(factors);
    return seq;
}

// Chain whose ordered product telescopes to P_L (D_{L-1}...D_0) P_0^T, giving
// it singular-value gaps of total_gap between adjacent positions while every
// individual factor keeps condition number total_gap^(2/len). The sweep error
// contracts like the inverse product gap squared per sweep, so these chains
// converge fast; iid random factors have clustered products and do not.
FactorSequence gap_chain(std::mt19937& rng, int dim, int len, double total_gap) {
    double g = std::pow(total_gap, 1.0 / len);
    std::uniform_real_distribution<double> jitter(0.8, 1.25);
    std::vector<Mat> factors;
    Mat p_prev = random_orthogonal(rng, dim);
    for (int k = 0; k < len; ++k) {
        Mat p_next = random_orthogonal(rng, dim);
        Mat diag(dim);
        for (int i = 0; i < dim; ++i)
            diag(i, i) = jitter(rng) * std::pow(g, double(dim - 1 - i));
        factors.push_back(p_next * (diag * p_prev.transposed()));
        p_prev = p_next;
    }
    return make_chain(std::move(factors), 0.25);
}

std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
}

double sum_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

} // namespace

TEST_CASE("product_svd of one factor in U*Sigma form is exact after two sweeps") {
    std::mt19937 rng(4001u);
    for (int trial = 0; trial < 20; ++trial) {
        Mat d(3);
        d(0, 0) = 1.7;
        d(1, 1) = 0.9;
        d(2, 2) = 0.31;
        FactorSequence seq = make_chain({random_orthogonal(rng, 3) * d}, 0.5);
        ProductSvdResult res = product_svd(seq, 2);
        CHECK(res.sweeps == 2);
        CHECK(std::abs(res.les[0] - std::log(1.7) / 0.5) <= 1e-10);
        CHECK(std::abs(res.les[1] - std::log(0.9) / 0.5) <= 1e-10);
        CHECK(std::abs(res.les[2] - std::log(0.31) / 0.5) <= 1e-10);
    }
}

TEST_CASE("product_svd of a generic factor converges to its singular values") {
    std::mt19937 rng(4002u);
    Mat d(3);
    d(0, 0) = 1.0;
    d(1, 1) = 0.1;
    d(2, 2) = 0.01;
    Mat f = random_orthogonal(rng, 3) * d * random_orthogonal(rng, 3);
    FactorSequence seq = make_chain({f}, 1.0);
    SingularSpectrum sv = singular_values(f);
    ProductSvdResult res = product_svd(seq, 8);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(res.les[static_cast<size_t>(i)] - std::log(sv[i])) <= 1e-9);
}

TEST_CASE("product_svd is exact on commuting diagonal chains") {
    std::vector<Mat> factors;
    Mat d(2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    for (int k = 0; k < 6; ++k) factors.push_back(d);
    FactorSequence seq = make_chain(std::move(factors), 0.5);
    ProductSvdResult res = product_svd(seq, 3);
    CHECK(std::abs(res.les[0] - std::log(2.0) / 0.5) <= 1e-14);
    CHECK(std::abs(res.les[1] - std::log(0.5) / 0.5) <= 1e-14);
    CHECK(res.r_diagonals.size() == 6);
    for (const auto& diag : res.r_diagonals)
        for (int i = 0; i < 2; ++i) CHECK(diag[static_cast<size_t>(i)] > 0.0);
}

TEST_CASE("product_svd matches the explicit-product oracle on separated chains") {
    std::mt19937 rng(4003u);
    std::uniform_int_distribution<int> len(4, 8);
    for (int trial = 0; trial < 60; ++trial) {
        FactorSequence seq = gap_chain(rng, 3, len(rng), 1000.0);
        ProductSvdResult res = product_svd(seq, 3);
        std::vector<double> ln = sorted_desc(res.les);
        SingularSpectrum sv = singular_values(explicit_product(seq));
        double t = seq.total_time();
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(ln[static_cast<size_t>(i)] * t - std::log(sv[i])) <= 1e-6);
    }
}

TEST_CASE("additional sweeps leave converged chains unchanged") {
    std::mt19937 rng(4004u);
    auto drift = [](const FactorSequence& seq, int sweeps) {
        std::vector<double> a = sorted_desc(product_svd(seq, sweeps).les);
        std::vector<double> b = sorted_desc(product_svd(seq, sweeps + 1).les);
        double worst = 0.0;
        for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        return worst;
    };

    for (int trial = 0; trial < 20; ++trial)
        CHECK(drift(gap_chain(rng, 3, 6, 1000.0), 5) <= 1e-8);

    IntegratorConfig cfg;
    SystemSpec lorenz = SystemSpec::make(SystemId::lorenz);
    Vec start = integrate_segment(lorenz, Vec{1.0, 1.0, 1.0}, 30.0, cfg).u;
    CHECK(drift(factor_sequence(lorenz, start, 0.1, 500, cfg), 3) <= 1e-8);

    SystemSpec henon = SystemSpec::make(SystemId::henon);
    CHECK(drift(factor_sequence(henon, Vec{0.0, 0.0}, 1.0, 2000, cfg), 3) <= 1e-8);
}

TEST_CASE("product_svd reports the singular factor's chain position") {
    std::mt19937 rng(4005u);
    // rank-deficient with an exactly zero column, so the R diagonal zero is
    // exact rather than rounded
    Mat singular = Mat::from_rows({{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.5, 0.5}});
    auto wc = [&rng]() {
        Mat d(3);
        d(0, 0) = 1.3;
        d(1, 1) = 1.0;
        d(2, 2) = 0.8;
        return random_orthogonal(rng, 3) * d * random_orthogonal(rng, 3);
    };

    FactorSequence first = make_chain({singular, wc(), wc()}, 1.0);
    try {
        product_svd(first, 3);
        FAIL("expected SingularFactorError");
    } catch (const SingularFactorError& e) {
        CHECK(e.factor_index() == 0);
    }

    FactorSequence last = make_chain({wc(), wc(), Mat(3)}, 1.0);
    try {
        product_svd(last, 3);
        FAIL("expected SingularFactorError");
    } catch (const SingularFactorError& e) {
        CHECK(e.factor_index() == 2);
    }
}

TEST_CASE("product_svd input validation") {
    FactorSequence empty;
    empty.seg_len = 1.0;
    CHECK_THROWS_AS(product_svd(empty, 3), ConfigError);

    FactorSequence chain = make_chain({Mat::identity(2)}, 1.0);
    CHECK_THROWS_AS(product_svd(chain, 0), ConfigError);

    FactorSequence zero_len = make_chain({Mat::identity(2)}, 0.0);
    CHECK_THROWS_AS(product_svd(zero_len, 3), ConfigError);

    FactorSequence mixed = make_chain({Mat::identity(2), Mat::identity(3)}, 1.0);
    CHECK_THROWS_AS(product_svd(mixed, 3), ConfigError);

    Mat bad = Mat::identity(2);
    bad(0, 1) = std::nan("");
    FactorSequence nonfinite = make_chain({bad}, 1.0);
    CHECK_THROWS_AS(product_svd(nonfinite, 3), NumericError);
}

TEST_CASE("benettin_les on identity chains and against the svd path") {
    FactorSequence ident = make_chain({Mat::identity(3), Mat::identity(3)}, 1.0);
    for (double v : benettin_les(ident)) CHECK(v == 0.0);

    IntegratorConfig cfg;
    SystemSpec henon = SystemSpec::make(SystemId::henon);
    FactorSequence seq = factor_sequence(henon, Vec{0.0, 0.0}, 1.0, 30000, cfg);
    std::vector<double> b = sorted_desc(benettin_les(seq));
    std::vector<double> s = finite_time_les(seq, 3).les;
    for (size_t i = 0; i < b.size(); ++i) CHECK(std::abs(b[i] - s[i]) <= 1e-4);
    CHECK(std::abs(sum_of(b) - std::log(0.3)) <= 1e-9);

    FactorSequence sing = make_chain({Mat::from_rows({{0.0, 0.0}, {0.0, 1.0}})}, 1.0);
    CHECK_THROWS_AS(benettin_les(sing), SingularFactorError);
}

TEST_CASE("lce column exponents: diagonal chains, conditioning guard, ordering") {
    Mat d(2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    FactorSequence diag = make_chain({d, d, d}, 1.0);
    std::vector<double> lce = lce_column_exponents(diag);
    CHECK(std::abs(lce[0] - std::log(2.0)) <= 1e-12);
    CHECK(std::abs(lce[1] - std::log(0.5)) <= 1e-12);

    Mat hard(2);
    hard(0, 0) = 1e4;
    hard(1, 1) = 1e-4;
    FactorSequence overflow = make_chain({hard, hard}, 1.0);
    CHECK_THROWS_AS(lce_column_exponents(overflow), NumericError);
}

TEST_CASE("finite-time LEs sit below column exponents with the dimensional constant") {
    std::mt19937 rng(4006u);
    std::uniform_int_distribution<int> len(1, 6);
    std::uniform_real_distribution<double> dd(0.5, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Mat> factors;
        int n = len(rng);
        for (int k = 0; k < n; ++k) {
            Mat d(3);
            for (int i = 0; i < 3; ++i) d(i, i) = dd(rng);
            factors.push_back(random_orthogonal(rng, 3) * d * random_orthogonal(rng, 3));
        }
        FactorSequence seq = make_chain(std::move(factors), 0.5);
        double t = seq.total_time();
        SingularSpectrum sv = singular_values(explicit_product(seq));
        std::vector<double> lce = lce_column_exponents(seq);
        for (int i = 0; i < 3; ++i) {
            double le = std::log(sv[i]) / t;
            double allowance = std::log(3.0 - i) / (2.0 * t);
            CHECK(le <= lce[static_cast<size_t>(i)] + allowance + 1e-9);
        }
        // the bottom index needs no constant and the top reverses
        CHECK(std::log(sv[2]) / t <= lce[2] + 1e-9);
        CHECK(lce[0] <= std::log(sv[0]) / t + 1e-9);
    }
}

TEST_CASE("kaplan_yorke handles the interpolation bookkeeping") {
    std::vector<double> caption = {11.8277, -8.0 / 3.0, -22.8277};
    KyDimension ky = kaplan_yorke(caption);
    CHECK(ky.j == 2);
    CHECK(std::abs(ky.s - (11.8277 - 8.0 / 3.0) / 22.8277) <= 1e-12);
    CHECK(std::abs(ky.d - 2.4013) <= 1e-4);
    double convex = (1.0 - ky.s) * (caption[0] + caption[1]) +
                    ky.s * (caption[0] + caption[1] + caption[2]);
    CHECK(std::abs(convex) <= 1e-12);
    CHECK(ky.source == "finite-time LEs");

    ky = kaplan_yorke(std::vector<double>{-0.5, -1.0});
    CHECK(ky.j == 0);
    CHECK(ky.s == 0.0);
    CHECK(ky.d == 0.0);

    ky = kaplan_yorke(std::vector<double>{1.0, 0.5, 0.2});
    CHECK(ky.j == 3);
    CHECK(ky.s == 0.0);
    CHECK(ky.d == 3.0);

    // exact zeros count toward j
    ky = kaplan_yorke(std::vector<double>{1.0, -1.0, -2.0});
    CHECK(ky.j == 2);
    CHECK(ky.d == doctest::Approx(2.0));

    ky = kaplan_yorke(std::vector<double>{0.5, -0.5});
    CHECK(ky.j == 2);
    CHECK(ky.d == 2.0);

    ky = kaplan_yorke(std::vector<double>{3.0, 2.0, 1.0}, "LCE");
    CHECK(ky.source == "LCE");
    CHECK(ky.d == 3.0); // all-positive spectrum saturates at j = n
}

TEST_CASE("kaplan_yorke rejects malformed spectra") {
    CHECK_THROWS_AS(kaplan_yorke(std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(kaplan_yorke(std::vector<double>{-1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(kaplan_yorke(std::vector<double>{1.0, std::nan("")}), ConfigError);
}

TEST_CASE("kaplan_yorke invariants on random spectra") {
    std::mt19937 rng(4007u);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> dims(2, 4);
    for (int trial = 0; trial < 300; ++trial) {
        int n = dims(rng);
        std::vector<double> les(static_cast<size_t>(n));
        for (double& x : les) x = u(rng);
        les = sorted_desc(les);
        KyDimension ky = kaplan_yorke(les);
        CHECK(ky.j >= 0);
        CHECK(ky.j <= n);
        CHECK(ky.s >= 0.0);
        CHECK(ky.s < 1.0);
        CHECK(ky.d == doctest::Approx(double(ky.j) + ky.s).epsilon(1e-15));
        if (ky.j >= 1 && ky.j < n) {
            double sum_j = std::accumulate(les.begin(), les.begin() + ky.j, 0.0);
            double sum_next = sum_j + les[static_cast<size_t>(ky.j)];
            CHECK(std::abs((1.0 - ky.s) * sum_j + ky.s * sum_next) <= 1e-12);
        }
    }
}

TEST_CASE("local dimension at the benchmark equilibria") {
    SystemSpec chaotic = SystemSpec::make(SystemId::lorenz);
    std::vector<Equilibrium> eqs = chaotic.equilibria();
    KyDimension ky = local_dimension_at_equilibrium(chaotic, eqs[0]);
    CHECK(std::abs(ky.d - 2.4013) <= 1e-4);
    CHECK(ky.source == "equilibrium eigen real parts");

    SystemSpec marginal = SystemSpec::make(SystemId::lorenz, {{"r", 24.5}});
    eqs = marginal.equilibria();
    ky = local_dimension_at_equilibrium(marginal, eqs[1]);
    CHECK(std::abs(ky.d - 1.9989) <= 1e-3);
    CHECK(ky.j == 1);
    CHECK(ky.s >= 0.0);
    CHECK(ky.s < 1.0);

    SystemSpec tame = SystemSpec::make(SystemId::lorenz, {{"r", 0.5}});
    eqs = tame.equilibria();
    ky = local_dimension_at_equilibrium(tame, eqs[0]);
    CHECK(ky.d == 0.0);

    SystemSpec henon = SystemSpec::make(SystemId::henon);
    eqs = henon.equilibria();
    ky = local_dimension_at_equilibrium(henon, eqs[0]);
    ExactDimReport rep = henon_exact(1.4, 0.3);
    REQUIRE(rep.value.has_value());
    CHECK(std::abs(ky.d - *rep.value) <= 1e-9);
}

TEST_CASE("finite-time LEs at a stationary point reach the eigenvalue real parts") {
    SystemSpec lorenz = SystemSpec::make(SystemId::lorenz);
    IntegratorConfig cfg;
    double root = std::sqrt(1201.0);
    std::vector<double> eig = {(-11.0 + root) / 2.0, -8.0 / 3.0, (-11.0 - root) / 2.0};

    FtLeSpectrum sp = finite_time_les(lorenz, Vec::zero(3), 0.5, 1000, 3, cfg);
    CHECK(sp.t == doctest::Approx(500.0));
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(sp.les[static_cast<size_t>(i)] - eig[static_cast<size_t>(i)]) <= 1e-3);

    // shorter horizon: the non-normal transient constant is still visible
    sp = finite_time_les(lorenz, Vec::zero(3), 0.5, 100, 3, cfg);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(sp.les[static_cast<size_t>(i)] - eig[static_cast<size_t>(i)]) <= 5e-3);

    KyDimension ky = kaplan_yorke(sp.les);
    CHECK(std::abs(ky.d - 2.4013) <= 1e-3);
}

TEST_CASE("exponent sums follow divergence and determinant identities") {
    IntegratorConfig cfg;
    SystemSpec lorenz = SystemSpec::make(SystemId::lorenz);
    FtLeSpectrum sp = finite_time_les(lorenz, Vec{1.0, 1.0, 1.0}, 0.1, 1000, 3, cfg);
    CHECK(std::abs(sum_of(sp.les) - (-41.0 / 3.0)) <= 1e-3);

    SystemSpec henon = SystemSpec::make(SystemId::henon);
    sp = finite_time_les(henon, Vec{0.0, 0.0}, 1.0, 10000, 3, cfg);
    CHECK(std::abs(sum_of(sp.les) - std::log(0.3)) <= 1e-6);
    CHECK(sp.les[0] >= sp.les[1]);
}

TEST_CASE("similarity transforms shift exponents by at most ln cond / T") {
    SystemSpec lorenz = SystemSpec::make(SystemId::lorenz);
    IntegratorConfig cfg;
    Vec start = integrate_segment(lorenz, Vec{1.0, 1.0, 1.0}, 30.0, cfg).u;
    FactorSequence seq = factor_sequence(lorenz, start, 0.1, 100, cfg);
    double t = seq.total_time();

    std::mt19937 rng(4008u);
    Mat p = random_orthogonal(rng, 3);
    Mat d(3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 1.0 / 3.0;
    p = p * d * random_orthogonal(rng, 3);
    SingularSpectrum ps = singular_values(p);
    double bound = std::log(ps.max() / ps.min()) / t + 1e-9;

    std::vector<double> base = finite_time_les(seq, 4).les;

    FactorSequence post = seq;
    post.factors.front() = post.factors.front() * p;
    std::vector<double> shifted = finite_time_les(post, 4).les;
    for (size_t i = 0; i < 3; ++i) CHECK(std::abs(shifted[i] - base[i]) <= bound);

    FactorSequence pre = seq;
    pre.factors.back() = p * pre.factors.back();
    shifted = finite_time_les(pre, 4).les;
    for (size_t i = 0; i < 3; ++i) CHECK(std::abs(shifted[i] - base[i]) <= bound);
}

TEST_CASE("sweep_max_dimension reduces deterministically and records failures") {
    SystemSpec henon = SystemSpec::make(SystemId::henon);
    IntegratorConfig cfg;
    Vec p0{0.0, 0.0};
    Vec p1{0.1, 0.1};

    FtLeSpectrum sp = finite_time_les(henon, p0, 1.0, 2000, 3, cfg);
    KyDimension single = kaplan_yorke(sp.les);
    SweepResult res = sweep_max_dimension(henon, {p0}, 1.0, 2000, 3, cfg);
    CHECK(res.max_dim.d == single.d);
    CHECK(res.argmax_index == 0);
    REQUIRE(res.table.size() == 1);
    CHECK(res.table[0].error.empty());

    // identical points tie; the lower index wins
    res = sweep_max_dimension(henon, {p0, p0}, 1.0, 2000, 3, cfg);
    CHECK(res.argmax_index == 0);

    SweepResult serial = sweep_max_dimension(henon, {p0, p1}, 1.0, 2000, 3, cfg, 1);
    SweepResult threaded = sweep_max_dimension(henon, {p0, p1}, 1.0, 2000, 3, cfg, 3);
    CHECK(serial.max_dim.d == threaded.max_dim.d);
    CHECK(serial.argmax_index == threaded.argmax_index);

    Vec bad{std::nan(""), 0.0};
    res = sweep_max_dimension(henon, {p0, bad}, 1.0, 2000, 3, cfg);
    CHECK(res.argmax_index == 0);
    REQUIRE(res.table.size() == 2);
    CHECK(res.table[1].error != "");
    CHECK_FALSE(res.table[1].les.has_value());

    CHECK_THROWS_AS(sweep_max_dimension(henon, {bad}, 1.0, 2000, 3, cfg), NumericError);
    CHECK_THROWS_AS(sweep_max_dimension(henon, {}, 1.0, 2000, 3, cfg), ConfigError);
}
