#pragma once

// Variational integration along orbits: a Dormand-Prince 5(4) embedded pair
// with PI step-size control drives both the state and the fundamental matrix
// of the linearization. Map systems iterate exactly; the "factor" of a
// segment is then a finite product of Jacobians.

#include <vector>

#include "lyadim/smallmat.hpp"
#include "lyadim/systems.hpp"

namespace lyadim {

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;
    double initial_step = 1e-9;
    double max_step = 0.0; // 0 means "length of the integration interval"
};

struct ExtendedState {
    Vec u;   // state after the segment
    Mat phi; // fundamental matrix of the segment (identity at segment start)
};

// Segment fundamental matrices along one orbit, oldest first. The ordered
// product factors[last] * ... * factors[first] equals the fundamental matrix
// of the whole run started at `origin`.
struct FactorSequence {
    std::vector<Mat> factors;
    double seg_len = 0.0;
    Vec origin;

    double total_time() const { return seg_len * static_cast<double>(factors.size()); }
};

struct OrbitSample {
    double t;
    Vec u;
};

// Integrates state + fundamental matrix over [0, dt] starting at u0 with the
// fundamental matrix reset to the identity. Flows only.
ExtendedState integrate_segment(const SystemSpec& spec, const Vec& u0, double dt,
                                const IntegratorConfig& cfg);

// n_factors consecutive segments of length seg_len (flows), or products of
// seg_len Jacobians per factor (maps; seg_len must be a positive integer).
FactorSequence factor_sequence(const SystemSpec& spec, const Vec& u0, double seg_len,
                               int n_factors, const IntegratorConfig& cfg);

// State-only trajectory sampled at multiples of sample_every plus the final
// time. For maps, times are iteration counts and sample_every is a stride.
std::vector<OrbitSample> orbit(const SystemSpec& spec, const Vec& u0, double t_total,
                               double sample_every, const IntegratorConfig& cfg);

} // namespace lyadim
