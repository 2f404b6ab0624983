#pragma once

// Attractor sampling and excitation classification: settle a seed onto its
// limit set, probe equilibrium neighborhoods to separate self-excited from
// hidden attractors, and pick grid points for dimension sweeps.

#include <string>
#include <vector>

#include "lyadim/flow.hpp"
#include "lyadim/smallmat.hpp"
#include "lyadim/systems.hpp"

namespace lyadim {

enum class AttractorClass {
    pending, // bounded, non-equilibrium, excitation not yet probed
    self_excited,
    hidden,
    converged_to_equilibrium,
    unbounded,
};

const char* to_string(AttractorClass c);

struct AttractorSample {
    Vec seed;
    double transient = 0.0;
    double sample_every = 0.0;
    std::vector<OrbitSample> points; // post-transient states

    AttractorClass classification = AttractorClass::pending;
    std::vector<std::string> exciting_equilibria; // set when self_excited
    std::string equilibrium_label;                // set when converged_to_equilibrium
    std::string reason;                           // set when unbounded

    // Audit trail of the excitation probe, for reproducibility of a verdict
    // that otherwise rests on negative evidence.
    double epsilon_scale = 0.0;
    int trials_per_equilibrium = 0;
    double delta_attr = 0.0;
};

// Integrates `transient`, discards it, then samples every `sample_every` up
// to transient + t_sample. Unbounded when the norm passes divergence_bound at
// a sample time or the integrator fails (the reason records it);
// converged_to_equilibrium when the last few samples all sit within eps_eq of
// one equilibrium and the endpoint residual is below 10 * eps_eq; otherwise
// the classification is left pending. For maps the durations are iteration
// counts.
AttractorSample settle(const SystemSpec& spec, const Vec& seed, double transient,
                       double t_sample, double sample_every, const IntegratorConfig& cfg,
                       double divergence_bound = 1e6, double eps_eq = 1e-6);

struct ClassifyOptions {
    double epsilon_scale = 1e-3; // trial radius = epsilon_scale * (1 + ||eq||)
    int trials = 8;              // per equilibrium; half along unstable eigenvectors
    double trial_transient = 300.0;
    double trial_time = 100.0;
    double sample_every = 0.25; // maps need integer-valued trial knobs
    double delta_attr = 1.0;    // one-sided cloud distance for "attracted"
    double divergence_bound = 1e6;
    double eps_eq = 1e-6;
    int jobs = 1;
};

// Launches deterministic trials from a small sphere around every equilibrium
// and marks the equilibrium exciting when some trial's post-transient cloud
// stays within delta_attr (one-sided nearest-neighbor distance) of the
// sample. No exciting equilibrium means hidden. Failed or
// converged-to-equilibrium trials count as non-exciting. Requires a sample
// with pending classification (bounded, non-equilibrium).
AttractorSample classify_excitation(const SystemSpec& spec, AttractorSample sample,
                                    const ClassifyOptions& opt = {},
                                    const IntegratorConfig& cfg = {});

// k points by uniform stride over the sample, deterministic: index (i*N)/k.
// k = 1 gives the first post-transient point, k = N the full sample.
std::vector<Vec> grid_points(const AttractorSample& sample, int k);

} // namespace lyadim
