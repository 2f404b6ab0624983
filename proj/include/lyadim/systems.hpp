#pragma once

// Benchmark system catalog: right-hand sides, Jacobians, equilibria with
// stability classes, and the coordinate/parameter transforms connecting the
// Tigan, Yang, Glukhovsky-Dolzhansky and generalized Lorenz families.

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyadim/smallmat.hpp"

namespace lyadim {

enum class SystemId {
    lorenz,
    glukhovsky_dolzhansky,
    generalized_lorenz,
    yang,
    tigan,
    shimizu_morioka,
    shimizu_morioka_transformed,
    henon,
};

enum class SystemKind { flow, map };

enum class StabilityClass { stable, saddle, center_margin };

struct Equilibrium {
    std::string label; // "S0", "S1", ...
    Vec point;
    StabilityClass stability;
    std::vector<std::complex<double>> eigenvalues; // of the Jacobian at point
};

struct ParamInfo {
    std::string name;
    double default_value;
    std::string constraint; // human-readable, e.g. "> 0"
};

struct SystemInfo {
    SystemId id;
    std::string name;
    SystemKind kind;
    int dim;
    std::vector<ParamInfo> params;
};

class SystemSpec {
public:
    // Catalog metadata for every supported system, in a fixed order.
    static const std::vector<SystemInfo>& catalog();
    static const SystemInfo& info(SystemId id);
    static std::optional<SystemId> parse_id(std::string_view name);

    // Validates parameter names and constraints; missing names take defaults.
    static SystemSpec make(SystemId id, const std::map<std::string, double>& params = {});

    SystemId id() const { return id_; }
    const std::string& name() const { return SystemSpec::info(id_).name; }
    SystemKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double param(std::string_view name) const;

    // Flow: du/dt at u. Map: the image of u under one iteration.
    Vec vector_field(const Vec& u) const;
    Mat jacobian(const Vec& u) const;

    // Analytic equilibria (Newton-polished), deterministic order: the
    // origin-like point first, then the symmetric pair.
    std::vector<Equilibrium> equilibria() const;

    // Reference seed used by the CLI when none is given.
    Vec default_seed() const;

private:
    SystemSpec(SystemId id, std::array<double, 4> p);

    SystemId id_;
    SystemKind kind_;
    int dim_;
    std::array<double, 4> p_{}; // values in catalog parameter order
};

// Parameter transform: Tigan (a, b, c) to Yang (sigma, r, b) with
// sigma = a, r = c - a, b = b.
struct YangParams {
    double sigma, r, b;
};
YangParams tigan_to_yang(double a, double b, double c);

// State conjugacy carrying Tigan orbits onto Yang orbits.
Vec tigan_state_to_yang(double a, const Vec& u);

// Parameter transform: Glukhovsky-Dolzhansky (sigma, R, a0) to the
// generalized Lorenz system (sigma, r, b, A) with
// A = a0 sigma^2 / (a0 R + 1)^2, r = (R / sigma)(a0 R + 1), b = 1.
struct GenLorenzParams {
    double sigma, r, b, A;
};
GenLorenzParams gd_to_generalized_lorenz(double sigma, double R, double a0);

// State conjugacy carrying Glukhovsky-Dolzhansky orbits onto generalized
// Lorenz orbits, and its inverse.
Vec gd_state_to_generalized_lorenz(double sigma, double R, double a0, const Vec& u);
Vec generalized_lorenz_state_to_gd(double sigma, double R, double a0, const Vec& u);

// State conjugacy carrying Shimizu-Morioka orbits onto the transformed
// variant (z picks up +x^2/2).
Vec shimizu_morioka_state_to_transformed(const Vec& u);

} // namespace lyadim
