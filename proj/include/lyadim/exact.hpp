#pragma once

// Closed-form Lyapunov dimension theorems for the catalog systems, with the
// full condition predicates evaluated as signed margins, plus a sampled
// verifier for the eigenvalue-sum contraction condition behind them.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lyadim/smallmat.hpp"
#include "lyadim/systems.hpp"

namespace lyadim {

enum class ExactTheorem { henon, lorenz, gd, yang_tigan, shimizu_morioka };
enum class ExactOutcome { formula, convergence_to_equilibria, not_applicable };

const char* to_string(ExactTheorem t);
const char* to_string(ExactOutcome o);

// One inequality of a theorem, rewritten so that margin > 0 (strict) or
// margin >= 0 (non-strict) means satisfied. Margins are always finite; their
// magnitude is diagnostic only.
struct ConditionMargin {
    std::string id;
    double margin = 0.0;
    bool strict = true;

    bool satisfied() const { return strict ? margin > 0.0 : margin >= 0.0; }
};

struct ExactDimReport {
    ExactTheorem theorem;
    ExactOutcome outcome = ExactOutcome::not_applicable;

    // Certified dimension; set iff outcome == formula.
    std::optional<double> value;
    // The formula's right-hand side evaluated regardless of the conditions.
    // When the conditions fail this is only an unverified candidate (the
    // theorems keep it as an upper bound in several settings); absent when
    // not evaluable over the reals.
    std::optional<double> candidate_value;

    std::vector<ConditionMargin> conditions;
    std::vector<std::string> failing_ids; // when outcome == not_applicable

    // Roots of the gamma quadratic (ascending), when it has two distinct
    // real roots; used by the Lorenz case (b) and Yang r > 0 branches.
    std::optional<std::array<double, 2>> gamma_roots;
};

// d = 1 + 1/(1 - ln b / ln sigma1(x_-)) at the left stationary point
// x_- = (b - 1 - sqrt((b-1)^2 + 4a))/2, sigma1 = sqrt(x_-^2 + b) - x_-.
// Requires a > 0, b in (0, 1).
ExactDimReport henon_exact(double a, double b);

// d = 3 - 2(sigma+b+1)/(sigma+1+sqrt((sigma-1)^2+4 sigma r)) under r > 1,
// a quadratic lower bound on r - 1, case (a) or case (b) (two distinct real
// gamma roots with the greater one positive), and sigma r above the
// equilibria window. Inside the window the outcome is convergence to
// equilibria. Requires sigma, r, b > 0.
ExactDimReport lorenz_exact(double sigma, double r, double b);

// Generalized Lorenz / Glukhovsky-Dolzhansky form with the A y z coupling:
// d = 3 - 2(sigma+2)/(sigma+1+sqrt((sigma-1)^2+4 sigma r)) under either
// case 1 (sigma = A r and 4 sigma r > (b+1)(b+sigma)) or case 2 (b = 1,
// r > 2, sigma inside an interval proportional to A r). Margins for both
// cases are always reported. Requires sigma, r, b, A > 0.
ExactDimReport gd_exact(double sigma, double r, double b, double A);

// Yang system branches on the sign of r: r = 0 and r < 0 give convergence
// to equilibria under their margins; r > 0 requires two distinct real roots
// of the gamma quadratic with the greater one positive, then either the
// equilibria window or d = 3 - 2(sigma+b)/(sigma+sqrt(sigma^2+4 sigma r)).
// Requires sigma, b > 0; r may be any real. Tigan parameters route here
// through tigan_to_yang.
ExactDimReport yang_exact(double sigma, double r, double b);

// Transformed Shimizu-Morioka: d = 3 - 2(lambda+alpha)/(lambda+sqrt(4+lambda^2))
// when all three root-bound inequalities hold (a negative square-root
// argument fails its condition). Requires alpha, lambda > 0.
ExactDimReport shimizu_morioka_exact(double alpha, double lambda);

// Worst case over the sampled points of
//   lam_1(u) + ... + lam_j(u) + s * lam_{j+1}(u) + v_term(u),
// where for flows lam_i are the descending eigenvalues of the symmetrized
// S J(u) S^{-1} and for maps the natural logs of its singular values; v_term
// supplies the derivative (flows) or increment (maps) of the caller's
// Lyapunov function, often identically zero. A negative result certifies the
// contraction condition on the sample only, not on a whole invariant set.
// Requires invertible S, 0 <= j <= n, s in [0, 1] with j + s <= n, and a
// nonempty point list.
double leonov_margin(const SystemSpec& spec, const Mat& s,
                     const std::function<double(const Vec&)>& v_term, int j,
                     double s_frac, const std::vector<Vec>& points, int jobs = 1);

} // namespace lyadim
