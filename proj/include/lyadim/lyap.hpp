#pragma once

// Finite-time Lyapunov exponents from factor chains (product SVD sweeps with
// a Benettin-style QR path as an independent cross-check), column-norm
// exponents, and the Kaplan-Yorke dimension.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyadim/flow.hpp"
#include "lyadim/smallmat.hpp"
#include "lyadim/systems.hpp"

namespace lyadim {

struct FtLeSpectrum {
    double t = 0.0;           // time horizon (iterations for maps)
    Vec u0;                   // orbit start
    std::vector<double> les;  // descending
};

struct KyDimension {
    int j = 0;
    double s = 0.0;     // in [0, 1)
    double d = 0.0;     // j + s
    std::string source; // which exponent vector was interpolated
};

struct ProductSvdResult {
    std::vector<double> les;  // per-diagonal-position exponents, unsorted
    // Positive R diagonals of the final sweep, in sweep order (newest segment
    // first); diagnostic.
    std::vector<std::array<double, kMaxDim>> r_diagonals;
    Mat u; // accumulated left orthogonal factor (odd sweeps)
    Mat v; // accumulated right orthogonal factor (even sweeps)
    int sweeps = 0;
};

// Alternating QR sweeps over the factor chain; each sweep runs backward over
// the chain, the R chain is transposed and reversed between sweeps, and the
// exponents come from the R diagonals of the final sweep divided by the total
// time. Throws SingularFactorError if a factor is exactly singular.
ProductSvdResult product_svd(const FactorSequence& seq, int sweeps);

// factor_sequence + product_svd; exponents sorted descending.
FtLeSpectrum finite_time_les(const SystemSpec& spec, const Vec& u0, double seg_len,
                             int n_factors, int sweeps, const IntegratorConfig& cfg);
FtLeSpectrum finite_time_les(const FactorSequence& seq, int sweeps);

// Single-pass QR accumulation (independent cross-check path); descending.
std::vector<double> benettin_les(const FactorSequence& seq);

// Exponents of the explicit ordered product's column norms, descending.
// Errors out when the explicit product is too ill-conditioned to trust
// (condition number >= 1e12).
std::vector<double> lce_column_exponents(const FactorSequence& seq);

// Kaplan-Yorke dimension of a descending exponent list: j is the largest m
// with LE_1 + ... + LE_m >= 0 (exact zeros count toward j), s interpolates
// into the next exponent; d = 0 when j = 0 and d = n when j = n.
KyDimension kaplan_yorke(std::span<const double> exponents,
                         std::string source = "finite-time LEs");

// Dimension at an equilibrium from the Jacobian spectrum (eigenvalue real
// parts for flows, log moduli for maps). Keeps the interpolation index at a
// marginally-stable pair (partial sums within 1% of |next exponent| count as
// admissible), which extends the formula continuously across a Hopf loss of
// stability.
KyDimension local_dimension_at_equilibrium(const SystemSpec& spec, const Equilibrium& eq);

struct SweepEntry {
    int index = -1;
    Vec point;
    std::optional<FtLeSpectrum> les;
    std::optional<KyDimension> ky;
    std::string error; // empty on success
};

struct SweepResult {
    KyDimension max_dim;
    int argmax_index = -1;
    Vec argmax_point;
    std::vector<SweepEntry> table;
};

// Per-point finite-time spectra and dimensions over a point set; the maximum
// is reduced deterministically (ties go to the lower point index). Per-point
// failures are recorded in the table; throws only if every point fails.
SweepResult sweep_max_dimension(const SystemSpec& spec, const std::vector<Vec>& points,
                                double seg_len, int n_factors, int sweeps,
                                const IntegratorConfig& cfg, int jobs = 1);

} // namespace lyadim
