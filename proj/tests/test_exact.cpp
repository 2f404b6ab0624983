#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <doctest.h>

#include "lyadim/errors.hpp"
#include "lyadim/exact.hpp"
#include "lyadim/lyap.hpp"
#include "lyadim/systems.hpp"

using namespace lyadim;

namespace {

bool has_failing(const ExactDimReport& rep, const std::string& id) {
    return std::find(rep.failing_ids.begin(), rep.failing_ids.end(), id) !=
           rep.failing_ids.end();
}

const ConditionMargin& condition(const ExactDimReport& rep, const std::string& id) {
    for (const ConditionMargin& c : rep.conditions)
        if (c.id == id) return c;
    FAIL("missing condition ", id);
    static ConditionMargin dummy;
    return dummy;
}

void check_invariants(const ExactDimReport& rep) {
    CHECK(rep.value.has_value() == (rep.outcome == ExactOutcome::formula));
    CHECK((rep.outcome == ExactOutcome::not_applicable) == !rep.failing_ids.empty());
    for (const std::string& id : rep.failing_ids)
        CHECK_FALSE(condition(rep, id).satisfied());
    if (rep.gamma_roots) CHECK((*rep.gamma_roots)[0] < (*rep.gamma_roots)[1]);
    if (rep.value) {
        CHECK(rep.candidate_value.has_value());
        CHECK(*rep.value == *rep.candidate_value);
    }
}

} // namespace

TEST_CASE("henon dimension formula at the classic parameters") {
    ExactDimReport rep = henon_exact(1.4, 0.3);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    CHECK(rep.conditions.empty());

    double a = 1.4, b = 0.3;
    double x = ((b - 1.0) - std::sqrt((b - 1.0) * (b - 1.0) + 4.0 * a)) / 2.0;
    double s1 = std::sqrt(x * x + b) - x;
    double d = 1.0 + std::log(s1) / (std::log(s1) - std::log(b));
    CHECK(*rep.value == doctest::Approx(d).epsilon(1e-12));
    CHECK(*rep.value == doctest::Approx(1.4953).epsilon(1e-4));
}

TEST_CASE("henon dimension stays inside (1, 2) across the parameter domain") {
    for (double a : {0.2, 0.7, 1.4, 2.5})
        for (double b : {0.05, 0.3, 0.6, 0.95}) {
            ExactDimReport rep = henon_exact(a, b);
            check_invariants(rep);
            REQUIRE(rep.outcome == ExactOutcome::formula);
            CHECK(*rep.value > 1.0);
            CHECK(*rep.value < 2.0);
        }
}

TEST_CASE("henon formula rejects parameters outside its domain") {
    CHECK_THROWS_AS((void)henon_exact(0.0, 0.3), ConfigError);
    CHECK_THROWS_AS((void)henon_exact(-1.0, 0.3), ConfigError);
    CHECK_THROWS_AS((void)henon_exact(1.4, 0.0), ConfigError);
    CHECK_THROWS_AS((void)henon_exact(1.4, 1.0), ConfigError);
    CHECK_THROWS_AS((void)henon_exact(1.4, 1.3), ConfigError);
}

TEST_CASE("henon formula equals the dimension from the fixed-point eigenvalues") {
    SystemSpec henon = SystemSpec::make(SystemId::henon);
    KyDimension local = local_dimension_at_equilibrium(henon, henon.equilibria()[0]);
    ExactDimReport rep = henon_exact(1.4, 0.3);
    CHECK(local.d == doctest::Approx(*rep.value).epsilon(1e-9));
}

TEST_CASE("lorenz case (a) formula at the standard chaotic parameters") {
    ExactDimReport rep = lorenz_exact(10.0, 28.0, 8.0 / 3.0);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    double expect =
        3.0 - 2.0 * (10.0 + 8.0 / 3.0 + 1.0) / (11.0 + std::sqrt(81.0 + 40.0 * 28.0));
    CHECK(*rep.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(*rep.value == doctest::Approx(2.4013).epsilon(5e-4));
    CHECK(condition(rep, "lorenz.r_above_one").satisfied());
    CHECK(condition(rep, "lorenz.case_a.coefficient_nonpositive").satisfied());
    CHECK(condition(rep, "lorenz.origin_window").satisfied());
}

TEST_CASE("lorenz formula below the subcritical Hopf point") {
    ExactDimReport rep = lorenz_exact(10.0, 24.5, 8.0 / 3.0);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    CHECK(*rep.value == doctest::Approx(2.3727).epsilon(5e-4));
}

TEST_CASE("lorenz report for r below one is not applicable") {
    ExactDimReport rep = lorenz_exact(10.0, 0.5, 8.0 / 3.0);
    check_invariants(rep);
    CHECK(rep.outcome == ExactOutcome::not_applicable);
    CHECK(has_failing(rep, "lorenz.r_above_one"));
    CHECK_FALSE(rep.value.has_value());
    CHECK(rep.candidate_value.has_value());
}

TEST_CASE("lorenz equilibria window gives convergence instead of a formula") {
    ExactDimReport rep = lorenz_exact(10.0, 4.0, 8.0 / 3.0);
    check_invariants(rep);
    CHECK(rep.outcome == ExactOutcome::convergence_to_equilibria);
    CHECK(rep.failing_ids.empty());
    CHECK_FALSE(rep.value.has_value());
    CHECK(condition(rep, "lorenz.equilibria_window").satisfied());
}

TEST_CASE("lorenz case (b) engages the gamma quadratic") {
    ExactDimReport rep = lorenz_exact(2.0, 30.0, 5.0);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    double expect = 3.0 - 16.0 / (3.0 + std::sqrt(241.0));
    CHECK(*rep.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK_FALSE(condition(rep, "lorenz.case_a.coefficient_nonpositive").satisfied());
    REQUIRE(rep.gamma_roots.has_value());
    // For sigma=2, r=30, b=5 the gamma quadratic is 376 g^2 - 6032 g + 376 = 0;
    // both roots must satisfy it and come back ascending and positive.
    double g0 = (*rep.gamma_roots)[0];
    double g1 = (*rep.gamma_roots)[1];
    CHECK(g0 < g1);
    CHECK(g0 > 0.0);
    for (double g : {g0, g1}) {
        double res = 376.0 * g * g - 6032.0 * g + 376.0;
        double scale = 376.0 * g * g + 6032.0 * g + 376.0;
        CHECK(std::abs(res) <= 1e-10 * scale);
    }
    CHECK(g0 * g1 == doctest::Approx(1.0).epsilon(1e-10)); // (2 sigma - b)^2 = 1
    CHECK(condition(rep, "lorenz.case_b.two_real_gamma_roots").satisfied());
    CHECK(condition(rep, "lorenz.case_b.greater_gamma_root_positive").satisfied());
}

TEST_CASE("lorenz formula rejects non-positive parameters") {
    CHECK_THROWS_AS((void)lorenz_exact(0.0, 28.0, 8.0 / 3.0), ConfigError);
    CHECK_THROWS_AS((void)lorenz_exact(10.0, -1.0, 8.0 / 3.0), ConfigError);
    CHECK_THROWS_AS((void)lorenz_exact(10.0, 28.0, 0.0), ConfigError);
}

TEST_CASE("glukhovsky-dolzhansky default parameters satisfy case 2") {
    ExactDimReport rep = gd_exact(4.0, 700.0, 1.0, 0.0052);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    double expect = 3.0 - 12.0 / (5.0 + std::sqrt(11209.0));
    CHECK(*rep.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(*rep.value == doctest::Approx(2.8917).epsilon(5e-4));
    CHECK(condition(rep, "gd.case2.b_is_one").satisfied());
    CHECK(condition(rep, "gd.case2.r_above_two").satisfied());
    CHECK(condition(rep, "gd.case2.sigma_window").satisfied());
}

TEST_CASE("glukhovsky-dolzhansky case 1 with sigma matching A r") {
    ExactDimReport rep = gd_exact(5.0, 500.0, 2.0, 0.01);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    double expect = 3.0 - 14.0 / (6.0 + std::sqrt(10016.0));
    CHECK(*rep.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(condition(rep, "gd.case1.sigma_matches_ar").satisfied());
    CHECK(condition(rep, "gd.case1.four_sigma_r_above_window").satisfied());
}

TEST_CASE("glukhovsky-dolzhansky reports both case failures when neither holds") {
    ExactDimReport rep = gd_exact(1.0, 1.5, 3.0, 1.0);
    check_invariants(rep);
    CHECK(rep.outcome == ExactOutcome::not_applicable);
    CHECK(has_failing(rep, "gd.case1.sigma_matches_ar"));
    CHECK(has_failing(rep, "gd.case2.b_is_one"));
}

TEST_CASE("glukhovsky-dolzhansky formula rejects non-positive parameters") {
    CHECK_THROWS_AS((void)gd_exact(4.0, 700.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS((void)gd_exact(4.0, 0.0, 1.0, 0.0052), ConfigError);
    CHECK_THROWS_AS((void)gd_exact(-4.0, 700.0, 1.0, 0.0052), ConfigError);
}

TEST_CASE("yang formula at the default chaotic parameters") {
    ExactDimReport rep = yang_exact(10.0, 16.0, 8.0 / 3.0);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    double expect =
        3.0 - 2.0 * (10.0 + 8.0 / 3.0) / (10.0 + std::sqrt(100.0 + 640.0));
    CHECK(*rep.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(*rep.value == doctest::Approx(2.319050).epsilon(1e-6));
    REQUIRE(rep.gamma_roots.has_value());
}

TEST_CASE("yang positive-r equilibria window gives convergence") {
    ExactDimReport rep = yang_exact(10.0, 2.0, 8.0 / 3.0);
    check_invariants(rep);
    CHECK(rep.outcome == ExactOutcome::convergence_to_equilibria);
    CHECK(rep.failing_ids.empty());
}

TEST_CASE("yang r = 0 branch") {
    ExactDimReport conv = yang_exact(10.0, 0.0, 2.0);
    check_invariants(conv);
    CHECK(conv.outcome == ExactOutcome::convergence_to_equilibria);
    CHECK(condition(conv, "yang.r_zero.b_below_sigma").satisfied());

    ExactDimReport na = yang_exact(10.0, 0.0, 9.0);
    check_invariants(na);
    CHECK(na.outcome == ExactOutcome::not_applicable);
    CHECK(has_failing(na, "yang.r_zero.sigma_dominates"));
}

TEST_CASE("yang negative-r branch") {
    ExactDimReport conv = yang_exact(10.0, -1.0, 8.0 / 3.0);
    check_invariants(conv);
    CHECK(conv.outcome == ExactOutcome::convergence_to_equilibria);

    ExactDimReport na = yang_exact(10.0, -3.0, 8.0 / 3.0);
    check_invariants(na);
    CHECK(na.outcome == ExactOutcome::not_applicable);
    CHECK(has_failing(na, "yang.r_negative.stability_bound"));
}

TEST_CASE("tigan parameters route through the yang theorem") {
    YangParams yp = tigan_to_yang(2.1, 0.6, 30.0);
    ExactDimReport via_yang = yang_exact(yp.sigma, yp.r, yp.b);
    REQUIRE(via_yang.outcome == ExactOutcome::formula);
    double expect = 3.0 - 2.0 * (2.1 + 0.6) /
                              (2.1 + std::sqrt(2.1 * 2.1 + 4.0 * 2.1 * 27.9));
    CHECK(*via_yang.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(*via_yang.value == doctest::Approx(2.69234).epsilon(1e-5));
}

TEST_CASE("shimizu-morioka formula under all three root bounds") {
    ExactDimReport rep = shimizu_morioka_exact(0.4, 0.9);
    check_invariants(rep);
    REQUIRE(rep.outcome == ExactOutcome::formula);
    double expect = 3.0 - 2.6 / (0.9 + std::sqrt(4.81));
    CHECK(*rep.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(*rep.value == doctest::Approx(2.1594).epsilon(1e-4));
    CHECK(condition(rep, "sm.lambda_upper_root_bound").satisfied());
    CHECK(condition(rep, "sm.lambda_below_inverse_alpha").satisfied());
    CHECK(condition(rep, "sm.lambda_lower_root_bound").satisfied());
}

TEST_CASE("shimizu-morioka inverse-alpha bound fails for large lambda") {
    ExactDimReport rep = shimizu_morioka_exact(0.9, 3.0);
    check_invariants(rep);
    CHECK(rep.outcome == ExactOutcome::not_applicable);
    CHECK(has_failing(rep, "sm.lambda_below_inverse_alpha"));
}

TEST_CASE("shimizu-morioka upper root bound fails on a negative radicand") {
    ExactDimReport rep = shimizu_morioka_exact(1.2, 0.5);
    check_invariants(rep);
    CHECK(rep.outcome == ExactOutcome::not_applicable);
    CHECK(has_failing(rep, "sm.lambda_upper_root_bound"));
}

TEST_CASE("shimizu-morioka formula rejects non-positive parameters") {
    CHECK_THROWS_AS((void)shimizu_morioka_exact(0.0, 0.9), ConfigError);
    CHECK_THROWS_AS((void)shimizu_morioka_exact(0.4, -0.1), ConfigError);
}

TEST_CASE("report invariants hold across a parameter scan") {
    for (double r : {0.2, 0.9, 1.5, 4.0, 13.926, 20.0, 24.5, 28.0, 100.0, 700.0}) {
        check_invariants(lorenz_exact(10.0, r, 8.0 / 3.0));
        check_invariants(lorenz_exact(2.0, r, 5.0));
        check_invariants(yang_exact(10.0, r - 5.0, 8.0 / 3.0));
        check_invariants(gd_exact(4.0, r, 1.0, 0.0052));
        check_invariants(gd_exact(0.01 * r, r, 2.0, 0.01));
    }
    for (double lam : {0.1, 0.5, 0.9, 1.5, 3.0})
        for (double alpha : {0.2, 0.4, 0.9, 1.2})
            check_invariants(shimizu_morioka_exact(alpha, lam));
}

TEST_CASE("leonov margin at the lorenz origin matches the symmetrized spectrum") {
    SystemSpec spec = SystemSpec::make(SystemId::lorenz);
    std::vector<Vec> pts{Vec(3)};
    auto zero = [](const Vec&) { return 0.0; };

    // Symmetrized Jacobian at the origin: 2x2 block [[-10, 19], [19, -1]]
    // plus the decoupled -8/3 axis, eigenvalues (-11 +- sqrt(1525))/2 and -8/3.
    double lam1 = (-11.0 + std::sqrt(1525.0)) / 2.0;
    double lam2 = -8.0 / 3.0;

    CHECK(leonov_margin(spec, Mat::identity(3), zero, 2, 0.0, pts) ==
          doctest::Approx(lam1 + lam2).epsilon(1e-12));
    CHECK(leonov_margin(spec, Mat::identity(3), zero, 1, 0.5, pts) ==
          doctest::Approx(lam1 + 0.5 * lam2).epsilon(1e-12));
    CHECK(leonov_margin(spec, Mat::identity(3), zero, 0, 0.0, pts) == 0.0);
}

TEST_CASE("leonov margin adds the lyapunov-function term and takes the worst point") {
    SystemSpec spec = SystemSpec::make(SystemId::lorenz);
    auto zero = [](const Vec&) { return 0.0; };
    auto shift = [](const Vec&) { return 0.7; };
    std::vector<Vec> origin{Vec(3)};
    std::vector<Vec> away{Vec{5.0, 5.0, 20.0}};

    double m0 = leonov_margin(spec, Mat::identity(3), zero, 2, 0.0, origin);
    CHECK(leonov_margin(spec, Mat::identity(3), shift, 2, 0.0, origin) ==
          doctest::Approx(m0 + 0.7).epsilon(1e-12));

    double m1 = leonov_margin(spec, Mat::identity(3), zero, 2, 0.0, away);
    std::vector<Vec> both{origin[0], away[0]};
    CHECK(leonov_margin(spec, Mat::identity(3), zero, 2, 0.0, both) ==
          doctest::Approx(std::max(m0, m1)).epsilon(1e-14));
}

TEST_CASE("leonov margin for a map uses log singular values") {
    SystemSpec henon = SystemSpec::make(SystemId::henon);
    Vec fp = henon.equilibria()[0].point;
    double b = 0.3;
    double x = fp[0];
    // J = [[-2x, b], [1, 0]]: trace of J J^T is 4x^2 + b^2 + 1, det is -b.
    double t = 4.0 * x * x + b * b + 1.0;
    double s1 = std::sqrt((t + std::sqrt(t * t - 4.0 * b * b)) / 2.0);
    auto zero = [](const Vec&) { return 0.0; };
    CHECK(leonov_margin(henon, Mat::identity(2), zero, 1, 0.0, {fp}) ==
          doctest::Approx(std::log(s1)).epsilon(1e-12));
}

TEST_CASE("leonov margin is deterministic across job counts") {
    SystemSpec spec = SystemSpec::make(SystemId::lorenz);
    auto zero = [](const Vec&) { return 0.0; };
    std::vector<Vec> pts;
    for (int i = 0; i < 17; ++i)
        pts.push_back(Vec{0.3 * i, -0.2 * i, 1.0 + 0.5 * i});
    double one = leonov_margin(spec, Mat::identity(3), zero, 2, 0.25, pts, 1);
    double three = leonov_margin(spec, Mat::identity(3), zero, 2, 0.25, pts, 3);
    CHECK(one == three);
}

TEST_CASE("leonov margin validates its inputs") {
    SystemSpec spec = SystemSpec::make(SystemId::lorenz);
    auto zero = [](const Vec&) { return 0.0; };
    std::vector<Vec> pts{Vec(3)};

    CHECK_THROWS_AS((void)leonov_margin(spec, Mat::identity(3), zero, 2, 0.0, {}),
                    ConfigError);
    Mat singular(3);
    singular(0, 0) = 1.0;
    singular(1, 1) = 1.0;
    CHECK_THROWS_AS((void)leonov_margin(spec, singular, zero, 2, 0.0, pts),
                    ConfigError);
    CHECK_THROWS_AS((void)leonov_margin(spec, Mat::identity(3), zero, -1, 0.0, pts),
                    ConfigError);
    CHECK_THROWS_AS((void)leonov_margin(spec, Mat::identity(3), zero, 4, 0.0, pts),
                    ConfigError);
    CHECK_THROWS_AS((void)leonov_margin(spec, Mat::identity(3), zero, 2, 1.2, pts),
                    ConfigError);
    CHECK_THROWS_AS((void)leonov_margin(spec, Mat::identity(3), zero, 2, -0.1, pts),
                    ConfigError);
    CHECK_THROWS_AS((void)leonov_margin(spec, Mat::identity(3), zero, 3, 0.5, pts),
                    ConfigError);
}
