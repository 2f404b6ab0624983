#pragma once

// Run configuration plus CSV/JSON/SVG report emission. Everything here is
// deterministic: identical inputs produce byte-identical output.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "lyadim/atlas.hpp"
#include "lyadim/exact.hpp"
#include "lyadim/flow.hpp"
#include "lyadim/lyap.hpp"
#include "lyadim/systems.hpp"

namespace lyadim {

// Flat run configuration. JSON config files use exactly these keys, and each
// one can be overridden by the command-line flag of the same name.
struct RunConfig {
    std::string system = "lorenz";
    std::map<std::string, double> params; // overrides of catalog defaults
    std::vector<double> seed;             // empty: system default seed
    double seg_len = 0.1;
    int n_factors = 10000;
    int sweeps = 3;
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;
    double initial_step = 1e-9;
    double transient = 100.0;
    int grid = 50;
    int jobs = 1;
    bool json = false;
    std::string svg; // output path; empty means no plot

    bool operator==(const RunConfig&) const = default;
};

// Strict parse: unknown keys, wrong types, and out-of-range values throw
// ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

// Range/consistency checks shared by the config file and flag paths; throws
// ConfigError. Instantiates the system to validate id, params and seed size.
SystemSpec validate(const RunConfig& c);

IntegratorConfig integrator_config(const RunConfig& c);

// One locale-free formatter for all numeric text output: 15 significant
// digits, shortest form.
std::string format_double(double x);

// RFC-4180-style CSV: header row first, CRLF line endings, cells quoted only
// when they contain a delimiter, quote, or newline.
class CsvWriter {
  public:
    explicit CsvWriter(const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    const std::string& text() const { return out_; }

  private:
    void emit(const std::vector<std::string>& cells);
    std::string out_;
    std::size_t cols_ = 0;
};

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const KyDimension& ky);
nlohmann::json to_json(const FtLeSpectrum& sp, const KyDimension& ky);
nlohmann::json to_json(const ExactDimReport& rep);
nlohmann::json to_json(const AttractorSample& sample, bool include_points = false);
nlohmann::json to_json(const SweepResult& res);

// Columns: t, LE1..LEn, j, s, d (map systems label columns per iteration).
std::string les_csv(const FtLeSpectrum& sp, const KyDimension& ky, SystemKind kind);
std::string sweep_csv(const SweepResult& res);
std::string points_csv(const std::vector<OrbitSample>& points, int dim);

// Static scatter of state coordinates (ix, iy) in a fixed 800x600 viewport
// with axes autoscaled to the data.
std::string svg_scatter(const std::vector<OrbitSample>& points, int ix, int iy,
                        const std::string& title);

} // namespace lyadim
