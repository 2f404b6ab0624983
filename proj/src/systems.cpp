#include "lyadim/systems.hpp"

#include <cmath>

#include "lyadim/errors.hpp"

namespace lyadim {

namespace {

const std::vector<SystemInfo>& catalog_impl() {
    static const std::vector<SystemInfo> cat = {
        {SystemId::lorenz,
         "lorenz",
         SystemKind::flow,
         3,
         {{"sigma", 10.0, "> 0"}, {"r", 28.0, "> 0"}, {"b", 8.0 / 3.0, "> 0"}}},
        {SystemId::glukhovsky_dolzhansky,
         "glukhovsky_dolzhansky",
         SystemKind::flow,
         3,
         {{"sigma", 4.0, "> 0"}, {"R", 252.0, "> 0"}, {"a0", 3.25 / 81.0, ">= 0"}}},
        {SystemId::generalized_lorenz,
         "generalized_lorenz",
         SystemKind::flow,
         3,
         {{"sigma", 4.0, "> 0"}, {"r", 700.0, "> 0"}, {"b", 1.0, "> 0"}, {"A", 0.0052, ">= 0"}}},
        {SystemId::yang,
         "yang",
         SystemKind::flow,
         3,
         {{"sigma", 10.0, "> 0"}, {"r", 16.0, "real"}, {"b", 8.0 / 3.0, "> 0"}}},
        {SystemId::tigan,
         "tigan",
         SystemKind::flow,
         3,
         {{"a", 2.1, "> 0"}, {"b", 0.6, "> 0"}, {"c", 30.0, "real"}}},
        {SystemId::shimizu_morioka,
         "shimizu_morioka",
         SystemKind::flow,
         3,
         {{"alpha", 0.4, "> 0"}, {"lambda", 0.9, "> 0"}}},
        {SystemId::shimizu_morioka_transformed,
         "shimizu_morioka_transformed",
         SystemKind::flow,
         3,
         {{"alpha", 0.4, "> 0"}, {"lambda", 0.9, "> 0"}}},
        {SystemId::henon,
         "henon",
         SystemKind::map,
         2,
         {{"a", 1.4, "> 0"}, {"b", 0.3, "in (0, 1)"}}},
    };
    return cat;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

StabilityClass classify_exponents(const std::vector<double>& exps) {
    const double tol = 1e-9;
    double max_e = exps.front();
    for (double e : exps) max_e = std::max(max_e, e);
    if (max_e < -tol) return StabilityClass::stable;
    if (max_e <= tol) return StabilityClass::center_margin;
    return StabilityClass::saddle;
}

// Positive root of aq w^2 + bq w + cq = 0 given that exactly one positive
// root exists (cq / aq < 0). Evaluated in the cancellation-free form.
double positive_quadratic_root(double aq, double bq, double cq) {
    double disc = bq * bq - 4.0 * aq * cq;
    double sq = std::sqrt(disc);
    double q = -0.5 * (bq + (bq < 0.0 ? -sq : sq));
    double r1 = q / aq;
    double r2 = q != 0.0 ? cq / q : 0.0;
    return std::max(r1, r2);
}

} // namespace

const std::vector<SystemInfo>& SystemSpec::catalog() { return catalog_impl(); }

const SystemInfo& SystemSpec::info(SystemId id) {
    for (const auto& s : catalog_impl())
        if (s.id == id) return s;
    throw ConfigError("unknown system id");
}

std::optional<SystemId> SystemSpec::parse_id(std::string_view name) {
    for (const auto& s : catalog_impl())
        if (s.name == name) return s.id;
    return std::nullopt;
}

SystemSpec::SystemSpec(SystemId id, std::array<double, 4> p)
    : id_(id), kind_(info(id).kind), dim_(info(id).dim), p_(p) {}

SystemSpec SystemSpec::make(SystemId id, const std::map<std::string, double>& params) {
    const SystemInfo& meta = info(id);
    std::array<double, 4> p{};
    for (size_t i = 0; i < meta.params.size(); ++i) p[i] = meta.params[i].default_value;

    for (const auto& [name, value] : params) {
        bool known = false;
        for (size_t i = 0; i < meta.params.size(); ++i) {
            if (meta.params[i].name == name) {
                if (!std::isfinite(value))
                    throw ConfigError(meta.name + ": parameter " + name + " must be finite");
                p[i] = value;
                known = true;
                break;
            }
        }
        require(known, meta.name + ": unknown parameter '" + name + "'");
    }

    switch (id) {
    case SystemId::lorenz:
        require(p[0] > 0 && p[1] > 0 && p[2] > 0, "lorenz: sigma, r, b must be > 0");
        break;
    case SystemId::glukhovsky_dolzhansky:
        require(p[0] > 0 && p[1] > 0, "glukhovsky_dolzhansky: sigma, R must be > 0");
        require(p[2] >= 0, "glukhovsky_dolzhansky: a0 must be >= 0");
        break;
    case SystemId::generalized_lorenz:
        require(p[0] > 0 && p[1] > 0 && p[2] > 0, "generalized_lorenz: sigma, r, b must be > 0");
        require(p[3] >= 0, "generalized_lorenz: A must be >= 0");
        break;
    case SystemId::yang:
        require(p[0] > 0 && p[2] > 0, "yang: sigma, b must be > 0");
        break;
    case SystemId::tigan:
        require(p[0] > 0 && p[1] > 0, "tigan: a, b must be > 0");
        break;
    case SystemId::shimizu_morioka:
    case SystemId::shimizu_morioka_transformed:
        require(p[0] > 0 && p[1] > 0, "shimizu_morioka: alpha, lambda must be > 0");
        break;
    case SystemId::henon:
        require(p[0] > 0, "henon: a must be > 0");
        require(p[1] > 0 && p[1] < 1, "henon: b must lie in (0, 1)");
        break;
    }
    return SystemSpec(id, p);
}

double SystemSpec::param(std::string_view name) const {
    const SystemInfo& meta = info(id_);
    for (size_t i = 0; i < meta.params.size(); ++i)
        if (meta.params[i].name == name) return p_[i];
    throw ConfigError(meta.name + ": unknown parameter '" + std::string(name) + "'");
}

Vec SystemSpec::vector_field(const Vec& u) const {
    if (u.size() != dim_) throw ConfigError("vector_field: state dimension mismatch");
    switch (id_) {
    case SystemId::lorenz: {
        double sigma = p_[0], r = p_[1], b = p_[2];
        return {sigma * (u[1] - u[0]), r * u[0] - u[1] - u[0] * u[2], -b * u[2] + u[0] * u[1]};
    }
    case SystemId::glukhovsky_dolzhansky: {
        double sigma = p_[0], R = p_[1], a0 = p_[2];
        return {-sigma * u[0] + u[2] + a0 * u[1] * u[2], R - u[1] - u[0] * u[2],
                -u[2] + u[0] * u[1]};
    }
    case SystemId::generalized_lorenz: {
        double sigma = p_[0], r = p_[1], b = p_[2], A = p_[3];
        return {sigma * (u[1] - u[0]) - A * u[1] * u[2], r * u[0] - u[1] - u[0] * u[2],
                -b * u[2] + u[0] * u[1]};
    }
    case SystemId::yang: {
        double sigma = p_[0], r = p_[1], b = p_[2];
        return {sigma * (u[1] - u[0]), r * u[0] - u[0] * u[2], -b * u[2] + u[0] * u[1]};
    }
    case SystemId::tigan: {
        double a = p_[0], b = p_[1], c = p_[2];
        return {a * (u[1] - u[0]), (c - a) * u[0] - a * u[0] * u[2], -b * u[2] + u[0] * u[1]};
    }
    case SystemId::shimizu_morioka: {
        double alpha = p_[0], lambda = p_[1];
        return {u[1], u[0] - lambda * u[1] - u[0] * u[2], -alpha * u[2] + u[0] * u[0]};
    }
    case SystemId::shimizu_morioka_transformed: {
        double alpha = p_[0], lambda = p_[1];
        return {u[1], u[0] - lambda * u[1] - u[0] * u[2] + 0.5 * u[0] * u[0] * u[0],
                -alpha * u[2] + u[0] * u[1] + (1.0 + 0.5 * alpha) * u[0] * u[0]};
    }
    case SystemId::henon: {
        double a = p_[0], b = p_[1];
        return {a + b * u[1] - u[0] * u[0], u[0]};
    }
    }
    throw ConfigError("vector_field: unknown system");
}

Mat SystemSpec::jacobian(const Vec& u) const {
    if (u.size() != dim_) throw ConfigError("jacobian: state dimension mismatch");
    switch (id_) {
    case SystemId::lorenz: {
        double sigma = p_[0], r = p_[1], b = p_[2];
        return Mat::from_rows({{-sigma, sigma, 0.0},
                               {r - u[2], -1.0, -u[0]},
                               {u[1], u[0], -b}});
    }
    case SystemId::glukhovsky_dolzhansky: {
        double sigma = p_[0], a0 = p_[2];
        return Mat::from_rows({{-sigma, a0 * u[2], 1.0 + a0 * u[1]},
                               {-u[2], -1.0, -u[0]},
                               {u[1], u[0], -1.0}});
    }
    case SystemId::generalized_lorenz: {
        double sigma = p_[0], r = p_[1], b = p_[2], A = p_[3];
        return Mat::from_rows({{-sigma, sigma - A * u[2], -A * u[1]},
                               {r - u[2], -1.0, -u[0]},
                               {u[1], u[0], -b}});
    }
    case SystemId::yang: {
        double sigma = p_[0], r = p_[1], b = p_[2];
        return Mat::from_rows({{-sigma, sigma, 0.0},
                               {r - u[2], 0.0, -u[0]},
                               {u[1], u[0], -b}});
    }
    case SystemId::tigan: {
        double a = p_[0], b = p_[1], c = p_[2];
        return Mat::from_rows({{-a, a, 0.0},
                               {(c - a) - a * u[2], 0.0, -a * u[0]},
                               {u[1], u[0], -b}});
    }
    case SystemId::shimizu_morioka: {
        double alpha = p_[0], lambda = p_[1];
        return Mat::from_rows({{0.0, 1.0, 0.0},
                               {1.0 - u[2], -lambda, -u[0]},
                               {2.0 * u[0], 0.0, -alpha}});
    }
    case SystemId::shimizu_morioka_transformed: {
        double alpha = p_[0], lambda = p_[1];
        return Mat::from_rows(
            {{0.0, 1.0, 0.0},
             {1.0 - u[2] + 1.5 * u[0] * u[0], -lambda, -u[0]},
             {u[1] + (2.0 + alpha) * u[0], u[0], -alpha}});
    }
    case SystemId::henon: {
        double b = p_[1];
        return Mat::from_rows({{-2.0 * u[0], b}, {1.0, 0.0}});
    }
    }
    throw ConfigError("jacobian: unknown system");
}

namespace {

// A couple of Newton steps to push equilibrium residuals to roundoff level.
Vec polish_equilibrium(const SystemSpec& spec, Vec u) {
    for (int it = 0; it < 2; ++it) {
        Vec f = spec.vector_field(u);
        Mat j = spec.jacobian(u);
        if (spec.kind() == SystemKind::map) {
            f -= u;
            j -= Mat::identity(spec.dim());
        }
        try {
            u -= inverse(j) * f;
        } catch (const NumericError&) {
            break; // non-hyperbolic: keep the analytic value
        }
    }
    return u;
}

Equilibrium make_equilibrium(const SystemSpec& spec, std::string label, Vec point) {
    Equilibrium eq;
    eq.label = std::move(label);
    eq.point = polish_equilibrium(spec, point);
    eq.eigenvalues = eigen_general(spec.jacobian(eq.point));
    std::vector<double> exps;
    exps.reserve(eq.eigenvalues.size());
    for (const auto& ev : eq.eigenvalues)
        exps.push_back(spec.kind() == SystemKind::flow ? ev.real() : std::log(std::abs(ev)));
    eq.stability = classify_exponents(exps);
    return eq;
}

} // namespace

std::vector<Equilibrium> SystemSpec::equilibria() const {
    std::vector<Equilibrium> out;
    switch (id_) {
    case SystemId::lorenz: {
        double r = p_[1], b = p_[2];
        out.push_back(make_equilibrium(*this, "S0", Vec::zero(3)));
        if (r > 1.0) {
            double x = std::sqrt(b * (r - 1.0));
            out.push_back(make_equilibrium(*this, "S1", {x, x, r - 1.0}));
            out.push_back(make_equilibrium(*this, "S2", {-x, -x, r - 1.0}));
        }
        break;
    }
    case SystemId::generalized_lorenz: {
        double sigma = p_[0], r = p_[1], b = p_[2], A = p_[3];
        out.push_back(make_equilibrium(*this, "S0", Vec::zero(3)));
        if (r > 1.0) {
            // x^2 = w solves sigma w^2 + (A r^2 b - sigma b (r - 2)) w
            //                - sigma b^2 (r - 1) = 0.
            double w = positive_quadratic_root(sigma, A * r * r * b - sigma * b * (r - 2.0),
                                               -sigma * b * b * (r - 1.0));
            double x = std::sqrt(w);
            double y = r * b * x / (b + w);
            double z = r * w / (b + w);
            out.push_back(make_equilibrium(*this, "S1", {x, y, z}));
            out.push_back(make_equilibrium(*this, "S2", {-x, -y, z}));
        }
        break;
    }
    case SystemId::glukhovsky_dolzhansky: {
        double sigma = p_[0], R = p_[1], a0 = p_[2];
        out.push_back(make_equilibrium(*this, "S0", {0.0, R, 0.0}));
        // 1 + x^2 = v solves sigma v^2 - R v - a0 R^2 = 0.
        double v = positive_quadratic_root(sigma, -R, -a0 * R * R);
        if (v > 1.0) {
            double x = std::sqrt(v - 1.0);
            double y = R / v;
            out.push_back(make_equilibrium(*this, "S1", {x, y, x * y}));
            out.push_back(make_equilibrium(*this, "S2", {-x, y, -x * y}));
        }
        break;
    }
    case SystemId::yang: {
        double r = p_[1], b = p_[2];
        out.push_back(make_equilibrium(*this, "S0", Vec::zero(3)));
        if (r > 0.0) {
            double x = std::sqrt(b * r);
            out.push_back(make_equilibrium(*this, "S1", {x, x, r}));
            out.push_back(make_equilibrium(*this, "S2", {-x, -x, r}));
        }
        break;
    }
    case SystemId::tigan: {
        double a = p_[0], b = p_[1], c = p_[2];
        out.push_back(make_equilibrium(*this, "S0", Vec::zero(3)));
        if (c - a > 0.0) {
            double x = std::sqrt(b * (c - a) / a);
            out.push_back(make_equilibrium(*this, "S1", {x, x, (c - a) / a}));
            out.push_back(make_equilibrium(*this, "S2", {-x, -x, (c - a) / a}));
        }
        break;
    }
    case SystemId::shimizu_morioka: {
        double alpha = p_[0];
        out.push_back(make_equilibrium(*this, "S0", Vec::zero(3)));
        double x = std::sqrt(alpha);
        out.push_back(make_equilibrium(*this, "S1", {x, 0.0, 1.0}));
        out.push_back(make_equilibrium(*this, "S2", {-x, 0.0, 1.0}));
        break;
    }
    case SystemId::shimizu_morioka_transformed: {
        double alpha = p_[0];
        out.push_back(make_equilibrium(*this, "S0", Vec::zero(3)));
        double x = std::sqrt(alpha);
        out.push_back(make_equilibrium(*this, "S1", {x, 0.0, 1.0 + 0.5 * alpha}));
        out.push_back(make_equilibrium(*this, "S2", {-x, 0.0, 1.0 + 0.5 * alpha}));
        break;
    }
    case SystemId::henon: {
        double a = p_[0], b = p_[1];
        double disc = (b - 1.0) * (b - 1.0) + 4.0 * a;
        double sq = std::sqrt(disc);
        double x_minus = 0.5 * (b - 1.0 - sq);
        double x_plus = 0.5 * (b - 1.0 + sq);
        out.push_back(make_equilibrium(*this, "S0", {x_minus, x_minus}));
        out.push_back(make_equilibrium(*this, "S1", {x_plus, x_plus}));
        break;
    }
    }
    return out;
}

Vec SystemSpec::default_seed() const {
    switch (id_) {
    case SystemId::lorenz:
    case SystemId::yang:
    case SystemId::tigan:
        return {1.0, 1.0, 1.0};
    case SystemId::generalized_lorenz:
        return {-14.551336132013954, -173.86811769236883, 718.92035664071227};
    case SystemId::glukhovsky_dolzhansky:
        return generalized_lorenz_state_to_gd(
            p_[0], p_[1], p_[2],
            {-14.551336132013954, -173.86811769236883, 718.92035664071227});
    case SystemId::shimizu_morioka:
    case SystemId::shimizu_morioka_transformed:
        return {0.1, 0.1, 0.1};
    case SystemId::henon:
        return {0.0, 0.0};
    }
    throw ConfigError("default_seed: unknown system");
}

YangParams tigan_to_yang(double a, double b, double c) {
    if (!(a > 0) || !(b > 0)) throw ConfigError("tigan_to_yang: a, b must be > 0");
    return {a, c - a, b};
}

Vec tigan_state_to_yang(double a, const Vec& u) {
    if (!(a > 0)) throw ConfigError("tigan_state_to_yang: a must be > 0");
    double s = std::sqrt(a);
    return {s * u[0], s * u[1], a * u[2]};
}

GenLorenzParams gd_to_generalized_lorenz(double sigma, double R, double a0) {
    if (!(sigma > 0) || !(R > 0) || !(a0 >= 0))
        throw ConfigError("gd_to_generalized_lorenz: need sigma, R > 0 and a0 >= 0");
    double k = a0 * R + 1.0;
    return {sigma, (R / sigma) * k, 1.0, a0 * sigma * sigma / (k * k)};
}

Vec gd_state_to_generalized_lorenz(double sigma, double R, double a0, const Vec& u) {
    if (!(sigma > 0) || !(R > 0) || !(a0 >= 0))
        throw ConfigError("gd_state_to_generalized_lorenz: need sigma, R > 0 and a0 >= 0");
    double c = sigma / (a0 * R + 1.0);
    return {u[0], u[2] / c, (R - u[1]) / c};
}

Vec generalized_lorenz_state_to_gd(double sigma, double R, double a0, const Vec& u) {
    if (!(sigma > 0) || !(R > 0) || !(a0 >= 0))
        throw ConfigError("generalized_lorenz_state_to_gd: need sigma, R > 0 and a0 >= 0");
    double c = sigma / (a0 * R + 1.0);
    return {u[0], R - c * u[2], c * u[1]};
}

Vec shimizu_morioka_state_to_transformed(const Vec& u) {
    return {u[0], u[1], u[2] + 0.5 * u[0] * u[0]};
}

} // namespace lyadim
