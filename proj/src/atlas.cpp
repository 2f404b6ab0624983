#include "lyadim/atlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "lyadim/errors.hpp"

namespace lyadim {

const char* to_string(AttractorClass c) {
    switch (c) {
    case AttractorClass::pending: return "Pending";
    case AttractorClass::self_excited: return "SelfExcited";
    case AttractorClass::hidden: return "Hidden";
    case AttractorClass::converged_to_equilibrium: return "ConvergedToEquilibrium";
    case AttractorClass::unbounded: return "Unbounded";
    }
    return "?";
}

namespace {

double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

// Inverse iteration on (m - shift I), the shift nudged by `nudge` so the
// inverse exists; returns a unit vector, or a zero vector when every attempt
// degenerates.
Vec inverse_iterate(const Mat& m, double shift, double nudge) {
    int n = m.size();
    for (int attempt = 0; attempt < 4; ++attempt, nudge *= 100.0) {
        Mat shifted = m;
        for (int i = 0; i < n; ++i) shifted(i, i) -= shift + nudge;
        Mat inv;
        try {
            inv = inverse(shifted);
        } catch (const NumericError&) {
            continue;
        }
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = 1.0 / (1.0 + i);
        bool ok = true;
        for (int it = 0; it < 8 && ok; ++it) {
            v = inv * v;
            double nv = v.norm();
            ok = v.all_finite() && nv > 0.0;
            if (ok) v *= 1.0 / nv;
        }
        if (ok) return v;
    }
    return Vec::zero(n);
}

// Unit directions spanning the unstable eigenspaces of the Jacobian at an
// equilibrium; a complex pair contributes two spanning directions of its
// invariant plane.
std::vector<Vec> unstable_directions(const SystemSpec& spec, const Equilibrium& eq) {
    Mat j = spec.jacobian(eq.point);
    int n = j.size();
    double scale = 1.0 + j.max_abs();
    std::vector<Vec> dirs;
    for (const auto& ev : eq.eigenvalues) {
        bool unstable = spec.kind() == SystemKind::flow ? ev.real() > 1e-9 * scale
                                                        : std::abs(ev) > 1.0 + 1e-9;
        if (!unstable) continue;
        if (std::abs(ev.imag()) <= 1e-9 * scale) {
            Vec v = inverse_iterate(j, ev.real(), 1e-6 * scale);
            if (v.norm() > 0.0) dirs.push_back(v);
        } else if (ev.imag() > 0.0) { // take each conjugate pair once
            // The pair's invariant plane is the null space of
            // (J - Re I)^2 + Im^2 I.
            Mat ja = j;
            for (int i = 0; i < n; ++i) ja(i, i) -= ev.real();
            Mat plane = ja * ja;
            for (int i = 0; i < n; ++i) plane(i, i) += ev.imag() * ev.imag();
            Vec v = inverse_iterate(plane, 0.0, 1e-6 * scale * scale);
            if (v.norm() > 0.0) {
                dirs.push_back(v);
                Vec w = j * v;
                w -= v.dot(w) * v;
                double nw = w.norm();
                if (nw > 1e-12 * scale) {
                    w *= 1.0 / nw;
                    dirs.push_back(w);
                }
            }
        }
    }
    return dirs;
}

// `trials` unit directions: +/- unstable eigendirections fill the first
// half, coordinate axes (alternating sign) the rest.
std::vector<Vec> trial_directions(const SystemSpec& spec, const Equilibrium& eq, int trials) {
    int n = spec.dim();
    std::vector<Vec> dirs;
    dirs.reserve(static_cast<size_t>(trials));
    for (const Vec& v : unstable_directions(spec, eq)) {
        if (static_cast<int>(dirs.size()) >= trials / 2) break;
        dirs.push_back(v);
        if (static_cast<int>(dirs.size()) < trials / 2) dirs.push_back(-1.0 * v);
    }
    for (int k = 0; static_cast<int>(dirs.size()) < trials; ++k) {
        Vec e = Vec::zero(n);
        e[(k / 2) % n] = k % 2 == 0 ? 1.0 : -1.0;
        dirs.push_back(e);
    }
    return dirs;
}

} // namespace

AttractorSample settle(const SystemSpec& spec, const Vec& seed, double transient,
                       double t_sample, double sample_every, const IntegratorConfig& cfg,
                       double divergence_bound, double eps_eq) {
    if (!(transient > 0.0) || !(t_sample > 0.0))
        throw ConfigError("settle: transient and t_sample must be > 0");
    if (!(divergence_bound > 0.0) || !(eps_eq > 0.0))
        throw ConfigError("settle: divergence_bound and eps_eq must be > 0");
    if (seed.size() != spec.dim()) throw ConfigError("settle: seed dimension mismatch");

    AttractorSample out;
    out.seed = seed;
    out.transient = transient;
    out.sample_every = sample_every;

    std::vector<OrbitSample> traj;
    try {
        traj = orbit(spec, seed, transient + t_sample, sample_every, cfg);
    } catch (const IntegrationError& err) {
        out.classification = AttractorClass::unbounded;
        out.reason = err.what();
        return out;
    }
    for (const OrbitSample& s : traj) {
        if (s.u.norm() > divergence_bound) {
            std::ostringstream reason;
            reason << "norm exceeded divergence bound " << divergence_bound << " at t = " << s.t;
            out.classification = AttractorClass::unbounded;
            out.reason = reason.str();
            out.points.clear();
            return out;
        }
        if (s.t >= transient - 1e-9 * std::max(1.0, transient)) out.points.push_back(s);
    }

    const size_t window = std::min<size_t>(10, out.points.size());
    const Vec& end = out.points.back().u;
    for (const Equilibrium& eq : spec.equilibria()) {
        double worst = 0.0;
        for (size_t i = out.points.size() - window; i < out.points.size(); ++i)
            worst = std::max(worst, dist(out.points[i].u, eq.point));
        if (worst > eps_eq) continue;
        Vec residual = spec.vector_field(end);
        if (spec.kind() == SystemKind::map) residual -= end;
        if (residual.norm() <= 10.0 * eps_eq) {
            out.classification = AttractorClass::converged_to_equilibrium;
            out.equilibrium_label = eq.label;
            return out;
        }
    }
    return out;
}

AttractorSample classify_excitation(const SystemSpec& spec, AttractorSample sample,
                                    const ClassifyOptions& opt, const IntegratorConfig& cfg) {
    if (sample.classification != AttractorClass::pending)
        throw ConfigError("classify_excitation: sample must be bounded and non-equilibrium");
    if (sample.points.empty()) throw ConfigError("classify_excitation: empty sample");
    if (opt.trials < 1 || opt.jobs < 1 || !(opt.epsilon_scale > 0.0) || !(opt.delta_attr > 0.0))
        throw ConfigError("classify_excitation: invalid options");

    std::vector<Equilibrium> eqs = spec.equilibria();
    struct Trial {
        size_t eq;
        Vec start;
        bool attracted = false;
    };
    std::vector<Trial> trials;
    for (size_t e = 0; e < eqs.size(); ++e) {
        double radius = opt.epsilon_scale * (1.0 + eqs[e].point.norm());
        for (const Vec& d : trial_directions(spec, eqs[e], opt.trials))
            trials.push_back({e, eqs[e].point + radius * d, false});
    }

    auto run_trial = [&](Trial& tr) {
        AttractorSample probe;
        try {
            probe = settle(spec, tr.start, opt.trial_transient, opt.trial_time,
                           opt.sample_every, cfg, opt.divergence_bound, opt.eps_eq);
        } catch (const std::exception&) {
            return; // a failed trial is non-exciting
        }
        if (probe.classification != AttractorClass::pending) return;
        double worst = 0.0;
        for (const OrbitSample& p : probe.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const OrbitSample& a : sample.points)
                best = std::min(best, dist(p.u, a.u));
            worst = std::max(worst, best);
            if (worst > opt.delta_attr) break;
        }
        tr.attracted = worst <= opt.delta_attr;
    };

    int workers = std::min<int>(opt.jobs, static_cast<int>(trials.size()));
    if (workers <= 1) {
        for (Trial& tr : trials) run_trial(tr);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < trials.size(); i = next.fetch_add(1))
                    run_trial(trials[i]);
            });
        for (auto& th : pool) th.join();
    }

    sample.epsilon_scale = opt.epsilon_scale;
    sample.trials_per_equilibrium = opt.trials;
    sample.delta_attr = opt.delta_attr;
    sample.exciting_equilibria.clear();
    for (size_t e = 0; e < eqs.size(); ++e)
        for (const Trial& tr : trials)
            if (tr.eq == e && tr.attracted) {
                sample.exciting_equilibria.push_back(eqs[e].label);
                break;
            }
    sample.classification = sample.exciting_equilibria.empty() ? AttractorClass::hidden
                                                               : AttractorClass::self_excited;
    return sample;
}

std::vector<Vec> grid_points(const AttractorSample& sample, int k) {
    long long n = static_cast<long long>(sample.points.size());
    if (k < 1) throw ConfigError("grid_points: k must be >= 1");
    if (n < k) throw ConfigError("grid_points: sample has fewer points than requested");
    std::vector<Vec> pts;
    pts.reserve(static_cast<size_t>(k));
    for (long long i = 0; i < k; ++i)
        pts.push_back(sample.points[static_cast<size_t>(i * n / k)].u);
    return pts;
}

} // namespace lyadim
