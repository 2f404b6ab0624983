#include "lyadim/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "lyadim/errors.hpp"

namespace lyadim {

namespace {

double number_or_throw(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
    return v.get<double>();
}

int int_or_throw(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
    long long raw = v.get<long long>();
    if (raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max())
        throw ConfigError("config: '" + key + "' out of range");
    return static_cast<int>(raw);
}

std::string fmt(double x, int precision) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed2(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "system") {
            if (!value.is_string()) throw ConfigError("config: 'system' must be a string");
            c.system = value.get<std::string>();
        } else if (key == "params") {
            if (!value.is_object()) throw ConfigError("config: 'params' must be an object");
            for (const auto& [name, num] : value.items())
                c.params[name] = number_or_throw(num, "params." + name);
        } else if (key == "seed") {
            if (!value.is_array()) throw ConfigError("config: 'seed' must be an array");
            c.seed.clear();
            for (const auto& num : value) c.seed.push_back(number_or_throw(num, "seed"));
        } else if (key == "seg_len") {
            c.seg_len = number_or_throw(value, key);
        } else if (key == "n_factors") {
            c.n_factors = int_or_throw(value, key);
        } else if (key == "sweeps") {
            c.sweeps = int_or_throw(value, key);
        } else if (key == "rel_tol") {
            c.rel_tol = number_or_throw(value, key);
        } else if (key == "abs_tol") {
            c.abs_tol = number_or_throw(value, key);
        } else if (key == "initial_step") {
            c.initial_step = number_or_throw(value, key);
        } else if (key == "transient") {
            c.transient = number_or_throw(value, key);
        } else if (key == "grid") {
            c.grid = int_or_throw(value, key);
        } else if (key == "jobs") {
            c.jobs = int_or_throw(value, key);
        } else if (key == "json") {
            if (!value.is_boolean()) throw ConfigError("config: 'json' must be a boolean");
            c.json = value.get<bool>();
        } else if (key == "svg") {
            if (!value.is_string()) throw ConfigError("config: 'svg' must be a string");
            c.svg = value.get<std::string>();
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    return c;
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, value] : c.params) params[name] = value;
    return nlohmann::json{{"system", c.system},
                          {"params", params},
                          {"seed", c.seed},
                          {"seg_len", c.seg_len},
                          {"n_factors", c.n_factors},
                          {"sweeps", c.sweeps},
                          {"rel_tol", c.rel_tol},
                          {"abs_tol", c.abs_tol},
                          {"initial_step", c.initial_step},
                          {"transient", c.transient},
                          {"grid", c.grid},
                          {"jobs", c.jobs},
                          {"json", c.json},
                          {"svg", c.svg}};
}

SystemSpec validate(const RunConfig& c) {
    auto id = SystemSpec::parse_id(c.system);
    if (!id) throw ConfigError("config: unknown system '" + c.system + "'");
    SystemSpec spec = SystemSpec::make(*id, c.params);
    if (!(c.seg_len > 0.0) || !std::isfinite(c.seg_len))
        throw ConfigError("config: seg_len must be positive");
    if (c.n_factors < 1) throw ConfigError("config: n_factors must be >= 1");
    if (c.sweeps < 1) throw ConfigError("config: sweeps must be >= 1");
    if (!(c.rel_tol > 0.0) || !std::isfinite(c.rel_tol))
        throw ConfigError("config: rel_tol must be positive");
    if (!(c.abs_tol > 0.0) || !std::isfinite(c.abs_tol))
        throw ConfigError("config: abs_tol must be positive");
    if (!(c.initial_step > 0.0) || !std::isfinite(c.initial_step))
        throw ConfigError("config: initial_step must be positive");
    if (!(c.transient >= 0.0) || !std::isfinite(c.transient))
        throw ConfigError("config: transient must be >= 0");
    if (c.grid < 1) throw ConfigError("config: grid must be >= 1");
    if (c.jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (!c.seed.empty()) {
        if (static_cast<int>(c.seed.size()) != spec.dim())
            throw ConfigError("config: seed must have " + std::to_string(spec.dim()) +
                              " components for " + c.system);
        for (double x : c.seed)
            if (!std::isfinite(x)) throw ConfigError("config: seed must be finite");
    }
    return spec;
}

IntegratorConfig integrator_config(const RunConfig& c) {
    IntegratorConfig cfg;
    cfg.rel_tol = c.rel_tol;
    cfg.abs_tol = c.abs_tol;
    cfg.initial_step = c.initial_step;
    return cfg;
}

std::string format_double(double x) { return fmt(x, 15); }

CsvWriter::CsvWriter(const std::vector<std::string>& header) : cols_(header.size()) {
    emit(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_)
        throw ConfigError("csv: row has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(cols_));
    emit(cells);
}

void CsvWriter::emit(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ += ',';
        const std::string& cell = cells[i];
        bool quote = cell.find_first_of(",\"\r\n") != std::string::npos;
        if (!quote) {
            out_ += cell;
        } else {
            out_ += '"';
            for (char c : cell) {
                out_ += c;
                if (c == '"') out_ += '"';
            }
            out_ += '"';
        }
    }
    out_ += "\r\n";
}

nlohmann::json to_json(const Vec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

nlohmann::json to_json(const KyDimension& ky) {
    return nlohmann::json{{"j", ky.j}, {"s", ky.s}, {"d", ky.d}, {"source", ky.source}};
}

nlohmann::json to_json(const FtLeSpectrum& sp, const KyDimension& ky) {
    return nlohmann::json{
        {"t", sp.t}, {"u0", to_json(sp.u0)}, {"les", sp.les}, {"ky", to_json(ky)}};
}

nlohmann::json to_json(const ExactDimReport& rep) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& c : rep.conditions)
        conditions.push_back(nlohmann::json{{"id", c.id},
                                            {"margin", c.margin},
                                            {"strict", c.strict},
                                            {"satisfied", c.satisfied()}});
    nlohmann::json out{{"theorem", to_string(rep.theorem)},
                       {"outcome", to_string(rep.outcome)},
                       {"conditions", conditions},
                       {"failing_ids", rep.failing_ids}};
    if (rep.value) out["value"] = *rep.value;
    if (rep.candidate_value) out["candidate_value"] = *rep.candidate_value;
    if (rep.gamma_roots)
        out["gamma_roots"] = nlohmann::json::array({(*rep.gamma_roots)[0], (*rep.gamma_roots)[1]});
    return out;
}

nlohmann::json to_json(const AttractorSample& sample, bool include_points) {
    nlohmann::json out{{"classification", to_string(sample.classification)},
                       {"seed", to_json(sample.seed)},
                       {"transient", sample.transient},
                       {"sample_every", sample.sample_every},
                       {"n_points", sample.points.size()},
                       {"exciting_equilibria", sample.exciting_equilibria},
                       {"equilibrium_label", sample.equilibrium_label},
                       {"reason", sample.reason},
                       {"epsilon_scale", sample.epsilon_scale},
                       {"trials_per_equilibrium", sample.trials_per_equilibrium},
                       {"delta_attr", sample.delta_attr}};
    if (include_points) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : sample.points) {
            nlohmann::json row = nlohmann::json::array();
            row.push_back(p.t);
            for (int i = 0; i < p.u.size(); ++i) row.push_back(p.u[i]);
            pts.push_back(std::move(row));
        }
        out["points"] = std::move(pts);
    }
    return out;
}

nlohmann::json to_json(const SweepResult& res) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& e : res.table) {
        nlohmann::json row{{"index", e.index}, {"point", to_json(e.point)}};
        if (e.les) {
            row["t"] = e.les->t;
            row["les"] = e.les->les;
        }
        if (e.ky) row["ky"] = to_json(*e.ky);
        if (!e.error.empty()) row["error"] = e.error;
        table.push_back(std::move(row));
    }
    return nlohmann::json{{"max", to_json(res.max_dim)},
                          {"argmax_index", res.argmax_index},
                          {"argmax_point", to_json(res.argmax_point)},
                          {"table", std::move(table)}};
}

std::string les_csv(const FtLeSpectrum& sp, const KyDimension& ky, SystemKind kind) {
    const bool per_iter = kind == SystemKind::map;
    std::vector<std::string> header;
    header.push_back(per_iter ? "t_iterations" : "t");
    for (std::size_t i = 0; i < sp.les.size(); ++i) {
        std::string name = "LE" + std::to_string(i + 1);
        if (per_iter) name += "_per_iteration";
        header.push_back(std::move(name));
    }
    header.insert(header.end(), {"j", "s", "d"});
    CsvWriter csv(header);

    std::vector<std::string> cells;
    cells.push_back(format_double(sp.t));
    for (double le : sp.les) cells.push_back(format_double(le));
    cells.push_back(std::to_string(ky.j));
    cells.push_back(format_double(ky.s));
    cells.push_back(format_double(ky.d));
    csv.row(cells);
    return csv.text();
}

std::string sweep_csv(const SweepResult& res) {
    int dim = 0;
    std::size_t n_les = 0;
    for (const auto& e : res.table) {
        dim = std::max(dim, e.point.size());
        if (e.les) n_les = std::max(n_les, e.les->les.size());
    }
    std::vector<std::string> header{"index"};
    for (int i = 0; i < dim; ++i) header.push_back("u" + std::to_string(i + 1));
    for (std::size_t i = 0; i < n_les; ++i) header.push_back("LE" + std::to_string(i + 1));
    header.insert(header.end(), {"t", "j", "s", "d", "error"});
    CsvWriter csv(header);

    for (const auto& e : res.table) {
        std::vector<std::string> cells;
        cells.push_back(std::to_string(e.index));
        for (int i = 0; i < dim; ++i)
            cells.push_back(i < e.point.size() ? format_double(e.point[i]) : "");
        for (std::size_t i = 0; i < n_les; ++i)
            cells.push_back(e.les && i < e.les->les.size() ? format_double(e.les->les[i]) : "");
        cells.push_back(e.les ? format_double(e.les->t) : "");
        cells.push_back(e.ky ? std::to_string(e.ky->j) : "");
        cells.push_back(e.ky ? format_double(e.ky->s) : "");
        cells.push_back(e.ky ? format_double(e.ky->d) : "");
        cells.push_back(e.error);
        csv.row(cells);
    }
    return csv.text();
}

std::string points_csv(const std::vector<OrbitSample>& points, int dim) {
    std::vector<std::string> header{"t"};
    for (int i = 0; i < dim; ++i) header.push_back("u" + std::to_string(i + 1));
    CsvWriter csv(header);
    for (const auto& p : points) {
        std::vector<std::string> cells{format_double(p.t)};
        for (int i = 0; i < dim; ++i) cells.push_back(i < p.u.size() ? format_double(p.u[i]) : "");
        csv.row(cells);
    }
    return csv.text();
}

std::string svg_scatter(const std::vector<OrbitSample>& points, int ix, int iy,
                        const std::string& title) {
    if (points.empty()) throw ConfigError("svg_scatter: no points");
    const int dim = points.front().u.size();
    if (ix < 0 || ix >= dim || iy < 0 || iy >= dim)
        throw ConfigError("svg_scatter: coordinate index out of range");

    double xmin = points.front().u[ix], xmax = xmin;
    double ymin = points.front().u[iy], ymax = ymin;
    for (const auto& p : points) {
        xmin = std::min(xmin, p.u[ix]);
        xmax = std::max(xmax, p.u[ix]);
        ymin = std::min(ymin, p.u[iy]);
        ymax = std::max(ymax, p.u[iy]);
    }
    auto pad = [](double& lo, double& hi) {
        double span = hi - lo;
        if (span <= 0.0) {
            lo -= 1.0;
            hi += 1.0;
        } else {
            lo -= 0.05 * span;
            hi += 0.05 * span;
        }
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    const double width = 800, height = 600;
    const double left = 70, right = 20, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           escape_xml(title) + "</text>\n";

    // axes with five labelled ticks each
    svg += "<line x1=\"" + fmt_fixed2(left) + "\" y1=\"" + fmt_fixed2(top) + "\" x2=\"" +
           fmt_fixed2(left) + "\" y2=\"" + fmt_fixed2(top + plot_h) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt_fixed2(left) + "\" y1=\"" + fmt_fixed2(top + plot_h) + "\" x2=\"" +
           fmt_fixed2(left + plot_w) + "\" y2=\"" + fmt_fixed2(top + plot_h) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = xmin + (xmax - xmin) * k / 4.0;
        double yv = ymin + (ymax - ymin) * k / 4.0;
        double xp = sx(xv), yp = sy(yv);
        svg += "<line x1=\"" + fmt_fixed2(xp) + "\" y1=\"" + fmt_fixed2(top + plot_h) + "\" x2=\"" +
               fmt_fixed2(xp) + "\" y2=\"" + fmt_fixed2(top + plot_h + 5) +
               "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_fixed2(xp) + "\" y=\"" + fmt_fixed2(top + plot_h + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(xv, 6) + "</text>\n";
        svg += "<line x1=\"" + fmt_fixed2(left - 5) + "\" y1=\"" + fmt_fixed2(yp) + "\" x2=\"" +
               fmt_fixed2(left) + "\" y2=\"" + fmt_fixed2(yp) +
               "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_fixed2(left - 8) + "\" y=\"" + fmt_fixed2(yp + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(yv, 6) +
               "</text>\n";
    }

    for (const auto& p : points)
        svg += "<circle cx=\"" + fmt_fixed2(sx(p.u[ix])) + "\" cy=\"" + fmt_fixed2(sy(p.u[iy])) +
               "\" r=\"1.5\" fill=\"#1f6feb\" fill-opacity=\"0.6\"/>\n";

    svg += "</svg>\n";
    return svg;
}

} // namespace lyadim
