#include "lyadim/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lyadim/errors.hpp"

namespace lyadim {

namespace {

constexpr int kMaxState = kMaxDim + kMaxDim * kMaxDim; // state + fundamental matrix
using State = std::array<double, kMaxState>;

void validate_config(const IntegratorConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw ConfigError("integrator: rel_tol and abs_tol must be > 0");
    if (!(cfg.initial_step > 0.0)) throw ConfigError("integrator: initial_step must be > 0");
    if (cfg.max_step < 0.0) throw ConfigError("integrator: max_step must be >= 0");
}

// Dormand-Prince 5(4) pair with PI step control (the classic controller
// constants: safety 0.9, beta 0.04, step ratio clamped to [1/5, 10]).
template <class Rhs>
void dp54_drive(const Rhs& rhs, int m, double t0, double t1, State& y,
                const IntegratorConfig& cfg) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    // Difference between the 5th and the embedded 4th order weights.
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const double interval = t1 - t0;
    if (!(interval > 0.0)) throw ConfigError("integrator: integration interval must be > 0");
    for (int i = 0; i < m; ++i)
        if (!std::isfinite(y[static_cast<size_t>(i)]))
            throw IntegrationError("integrator: non-finite initial state", t0);

    const double hmax = cfg.max_step > 0.0 ? std::min(cfg.max_step, interval) : interval;
    double h = std::min(cfg.initial_step, hmax);

    State k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, ynew{};
    rhs(y.data(), k1.data());

    const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    const double facc1 = 5.0, facc2 = 0.1; // 1/min-shrink, 1/max-growth
    double facold = 1e-4;

    double t = t0;
    bool last = false;
    while (!last) {
        const double hmin = 16.0 * std::numeric_limits<double>::epsilon() *
                            std::max({std::abs(t), std::abs(t1), 1.0});
        if (h < hmin)
            throw IntegrationError("integrator: step size underflow", t);
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        auto stage = [&](const State& base, State& out,
                         std::initializer_list<std::pair<const State*, double>> terms) {
            for (int i = 0; i < m; ++i) {
                double s = 0.0;
                for (const auto& [k, w] : terms) s += w * (*k)[static_cast<size_t>(i)];
                out[static_cast<size_t>(i)] = base[static_cast<size_t>(i)] + h * s;
            }
        };

        stage(y, ytmp, {{&k1, a21}});
        rhs(ytmp.data(), k2.data());
        stage(y, ytmp, {{&k1, a31}, {&k2, a32}});
        rhs(ytmp.data(), k3.data());
        stage(y, ytmp, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
        rhs(ytmp.data(), k4.data());
        stage(y, ytmp, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
        rhs(ytmp.data(), k5.data());
        stage(y, ytmp, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
        rhs(ytmp.data(), k6.data());
        stage(y, ynew, {{&k1, b1}, {&k3, b3}, {&k4, b4}, {&k5, b5}, {&k6, b6}});
        rhs(ynew.data(), k7.data()); // FSAL stage

        double err = 0.0;
        for (int i = 0; i < m; ++i) {
            size_t s = static_cast<size_t>(i);
            double ei = h * (e1 * k1[s] + e3 * k3[s] + e4 * k4[s] + e5 * k5[s] + e6 * k6[s] +
                             e7 * k7[s]);
            double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[s]), std::abs(ynew[s]));
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / static_cast<double>(m));

        if (!std::isfinite(err)) {
            // Non-finite stage values: shrink hard and retry.
            last = false;
            h *= 0.1;
            continue;
        }

        double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            facold = std::max(err, 1e-4);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            h = std::min(h / fac, hmax);
        } else {
            last = false;
            h /= std::min(facc1, fac11 / safe);
        }
    }
    for (int i = 0; i < m; ++i)
        if (!std::isfinite(y[static_cast<size_t>(i)]))
            throw IntegrationError("integrator: non-finite state", t1);
}

struct PlainRhs {
    const SystemSpec& spec;
    int n;
    void operator()(const double* y, double* dy) const {
        Vec u(n);
        for (int i = 0; i < n; ++i) u[i] = y[i];
        Vec f = spec.vector_field(u);
        for (int i = 0; i < n; ++i) dy[i] = f[i];
    }
};

// State plus row-major fundamental matrix: d(Phi)/dt = J(u) Phi.
struct VariationalRhs {
    const SystemSpec& spec;
    int n;
    void operator()(const double* y, double* dy) const {
        Vec u(n);
        for (int i = 0; i < n; ++i) u[i] = y[i];
        Vec f = spec.vector_field(u);
        Mat j = spec.jacobian(u);
        for (int i = 0; i < n; ++i) dy[i] = f[i];
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += j(r, k) * y[n + k * n + c];
                dy[n + r * n + c] = s;
            }
    }
};

void require_flow(const SystemSpec& spec, const char* who) {
    if (spec.kind() != SystemKind::flow)
        throw ConfigError(std::string(who) + ": requires a continuous-time system");
}

int checked_iteration_count(double value, const char* what) {
    if (!(value > 0.0) || value != std::floor(value) || value > 2e9)
        throw ConfigError(std::string(what) + " must be a positive integer for map systems");
    return static_cast<int>(value);
}

} // namespace

ExtendedState integrate_segment(const SystemSpec& spec, const Vec& u0, double dt,
                                const IntegratorConfig& cfg) {
    require_flow(spec, "integrate_segment");
    validate_config(cfg);
    if (!(dt > 0.0)) throw ConfigError("integrate_segment: dt must be > 0");
    int n = spec.dim();
    if (u0.size() != n) throw ConfigError("integrate_segment: state dimension mismatch");

    State y{};
    for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] = u0[i];
    for (int i = 0; i < n; ++i) y[static_cast<size_t>(n + i * n + i)] = 1.0;

    VariationalRhs rhs{spec, n};
    dp54_drive(rhs, n + n * n, 0.0, dt, y, cfg);

    ExtendedState out{Vec(n), Mat(n)};
    for (int i = 0; i < n; ++i) out.u[i] = y[static_cast<size_t>(i)];
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.phi(r, c) = y[static_cast<size_t>(n + r * n + c)];
    return out;
}

FactorSequence factor_sequence(const SystemSpec& spec, const Vec& u0, double seg_len,
                               int n_factors, const IntegratorConfig& cfg) {
    if (n_factors < 1) throw ConfigError("factor_sequence: n_factors must be >= 1");
    int n = spec.dim();
    if (u0.size() != n) throw ConfigError("factor_sequence: state dimension mismatch");

    FactorSequence seq;
    seq.seg_len = seg_len;
    seq.origin = u0;
    seq.factors.reserve(static_cast<size_t>(n_factors));

    if (spec.kind() == SystemKind::flow) {
        validate_config(cfg);
        if (!(seg_len > 0.0)) throw ConfigError("factor_sequence: seg_len must be > 0");
        Vec u = u0;
        for (int f = 0; f < n_factors; ++f) {
            ExtendedState st;
            try {
                st = integrate_segment(spec, u, seg_len, cfg);
            } catch (const IntegrationError& e) {
                throw IntegrationError("factor_sequence: " + std::string(e.what()),
                                       seg_len * f + e.time());
            }
            seq.factors.push_back(st.phi);
            u = st.u;
        }
    } else {
        int steps = checked_iteration_count(seg_len, "factor_sequence: seg_len");
        Vec u = u0;
        long iter = 0;
        for (int f = 0; f < n_factors; ++f) {
            Mat factor = Mat::identity(n);
            for (int s = 0; s < steps; ++s) {
                factor = spec.jacobian(u) * factor;
                u = spec.vector_field(u);
                ++iter;
                if (!u.all_finite())
                    throw IntegrationError("factor_sequence: non-finite state",
                                           static_cast<double>(iter));
            }
            seq.factors.push_back(factor);
        }
    }
    return seq;
}

std::vector<OrbitSample> orbit(const SystemSpec& spec, const Vec& u0, double t_total,
                               double sample_every, const IntegratorConfig& cfg) {
    int n = spec.dim();
    if (u0.size() != n) throw ConfigError("orbit: state dimension mismatch");
    if (!(t_total > 0.0)) throw ConfigError("orbit: t_total must be > 0");
    if (!(sample_every > 0.0)) throw ConfigError("orbit: sample_every must be > 0");

    std::vector<OrbitSample> samples;
    samples.push_back({0.0, u0});

    if (spec.kind() == SystemKind::flow) {
        validate_config(cfg);
        State y{};
        for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] = u0[i];
        PlainRhs rhs{spec, n};
        double t = 0.0;
        while (t < t_total) {
            double t_next = std::min(t + sample_every, t_total);
            dp54_drive(rhs, n, t, t_next, y, cfg);
            t = t_next;
            Vec u(n);
            for (int i = 0; i < n; ++i) u[i] = y[static_cast<size_t>(i)];
            samples.push_back({t, u});
        }
    } else {
        long total = checked_iteration_count(t_total, "orbit: t_total");
        long stride = checked_iteration_count(sample_every, "orbit: sample_every");
        Vec u = u0;
        for (long k = 1; k <= total; ++k) {
            u = spec.vector_field(u);
            if (!u.all_finite())
                throw IntegrationError("orbit: non-finite state", static_cast<double>(k));
            if (k % stride == 0 || k == total) samples.push_back({static_cast<double>(k), u});
        }
    }
    return samples;
}

} // namespace lyadim
