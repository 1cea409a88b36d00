#include "metamorph/field_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace metamorph {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    if (path.empty()) throw IoError("output path is empty");
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

double parse_double(std::string_view token, const std::string& column, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw IoError("CSV parse failure in column '" + column + "' at line " +
                      std::to_string(line));
    if (!std::isfinite(v))
        throw IoError("non-finite value in column '" + column + "' at line " +
                      std::to_string(line));
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string token;
    std::stringstream ss(line);
    while (std::getline(ss, token, ',')) out.push_back(token);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Strict-object reader: every key must be consumed, leftovers are errors.
class StrictObject {
  public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ScenarioError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& required(const std::string& key) {
        if (!j_.contains(key)) throw ScenarioError(path_ + "." + key + ": missing required key");
        seen_.insert(key);
        return j_.at(key);
    }

    const json* optional(const std::string& key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = required(key);
        if (!v.is_number()) throw ScenarioError(path_ + "." + key + ": expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_number()) throw ScenarioError(path_ + "." + key + ": expected a number");
        return v->get<double>();
    }

    int integer_or(const std::string& key, int fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ScenarioError(path_ + "." + key + ": expected an integer");
        return v->get<int>();
    }

    std::string string_or(const std::string& key, const std::string& fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ScenarioError(path_ + "." + key + ": expected a string");
        return v->get<std::string>();
    }

    std::string text(const std::string& key) {
        const json& v = required(key);
        if (!v.is_string()) throw ScenarioError(path_ + "." + key + ": expected a string");
        return v.get<std::string>();
    }

    const std::string& path() const { return path_; }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw ScenarioError(path_ + "." + item.key() + ": unknown key");
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

ReferenceSheet parse_sheet(const json& j, const std::string& path) {
    StrictObject o(j, path);
    ReferenceSheet sheet;
    sheet.b0 = o.number("b0");
    sheet.r0 = o.number("r0");
    o.finish();
    if (!(sheet.r0 > 0.0)) throw ScenarioError(path + ".r0: must be > 0");
    return sheet;
}

Axis parse_axis(const json& j, const std::string& label, const std::string& path) {
    StrictObject o(j, path);
    Axis ax;
    ax.label = label;
    ax.min = o.number("min");
    ax.max = o.number("max");
    const json& c = o.required("count");
    if (!c.is_number_integer()) throw ScenarioError(path + ".count: expected an integer");
    ax.count = c.get<int>();
    o.finish();
    if (ax.count < 1) throw ScenarioError(path + ".count: must be >= 1");
    if (ax.count > 1 && !(ax.min < ax.max)) throw ScenarioError(path + ": needs min < max");
    return ax;
}

GridSpec parse_grid(const json& j, const std::string& path,
                    const std::vector<std::string>& labels) {
    if (!j.is_object()) throw ScenarioError(path + ": expected an object");
    GridSpec grid;
    std::set<std::string> seen;
    for (const std::string& label : labels) {
        if (!j.contains(label))
            throw ScenarioError(path + "." + label + ": missing required key");
        grid.axes.push_back(parse_axis(j.at(label), label, path + "." + label));
        seen.insert(label);
    }
    for (const auto& item : j.items())
        if (!seen.count(item.key()))
            throw ScenarioError(path + "." + item.key() + ": unknown key");
    return grid;
}

QuadratureSpec parse_quadrature(const json* j, const std::string& path) {
    QuadratureSpec q;
    if (!j) return q;
    StrictObject o(*j, path);
    q.panels = o.integer_or("panels", q.panels);
    q.nodes_per_panel = o.integer_or("nodes_per_panel", q.nodes_per_panel);
    q.truncation_eps = o.number_or("truncation_eps", q.truncation_eps);
    q.max_halfwidth = o.number_or("max_halfwidth", q.max_halfwidth);
    o.finish();
    try {
        validate(q);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return q;
}

SourceSpec parse_source(const json& j, const std::string& path) {
    StrictObject o(j, path);
    SourceSpec spec;
    const std::string type = o.text("type");
    if (type == "gaussian") {
        spec.type = SourceSpec::Type::Gaussian;
        spec.sigma = Complex(o.number_or("sigma_re", 1.0), o.number_or("sigma_im", 0.0));
        spec.lambda = o.number_or("lambda", 0.0);
        if (!(spec.sigma.real() > 0.0)) throw ScenarioError(path + ".sigma_re: must be > 0");
    } else if (type == "plane_wave") {
        spec.type = SourceSpec::Type::PlaneWave;
        spec.k = o.number("k");
    } else if (type == "gaussian_poly") {
        spec.type = SourceSpec::Type::GaussianPoly;
        spec.poly = {o.number_or("c0", 1.0), o.number_or("c1", 0.0), o.number_or("c2", 0.0)};
    } else {
        throw ScenarioError(path + ".type: unknown source type '" + type + "'");
    }
    o.finish();
    return spec;
}

BeamSpec parse_beam(const json& j, const std::string& path) {
    StrictObject o(j, path);
    BeamSpec beam;
    beam.k = o.number("k");
    beam.a = o.number("a");
    const std::string branch = o.string_or("branch", "-");
    if (branch == "-") beam.sign = -1;
    else if (branch == "+") beam.sign = 1;
    else throw ScenarioError(path + ".branch: must be \"+\" or \"-\"");
    beam.nodes = o.integer_or("nodes", beam.nodes);
    beam.amplitude = o.number_or("amplitude", beam.amplitude);
    o.finish();
    try {
        validate(beam);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return beam;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void export_field_csv(const SampledField& field, const std::filesystem::path& path) {
    validate(field);
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    for (std::size_t a = 0; a < field.grid.axes.size(); ++a) {
        if (a) out << ',';
        out << field.grid.axes[a].label;
    }
    out << ",re,im\n";
    const std::size_t total = field.grid.node_count();
    const std::size_t naxes = field.grid.axes.size();
    std::vector<std::size_t> idx(naxes, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t a = naxes; a-- > 0;) {
            idx[a] = rem % field.grid.axes[a].count;
            rem /= field.grid.axes[a].count;
        }
        for (std::size_t a = 0; a < naxes; ++a)
            out << format_double(field.grid.coordinate(a, idx[a])) << ',';
        out << format_double(field.values[flat].real()) << ','
            << format_double(field.values[flat].imag()) << '\n';
    }
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

SampledField import_field_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::in | std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv(line);
    if (header.size() < 3) throw IoError("CSV header needs at least one axis plus re,im");
    if (header[header.size() - 2] != "re") throw IoError("missing column 're'");
    if (header[header.size() - 1] != "im") throw IoError("missing column 'im'");
    const std::size_t naxes = header.size() - 2;

    std::vector<std::vector<double>> coords(naxes);
    std::vector<Complex> raw_values;
    std::vector<std::vector<double>> raw_coords(naxes);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != header.size())
            throw IoError("CSV row at line " + std::to_string(lineno) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(header.size()));
        for (std::size_t a = 0; a < naxes; ++a)
            raw_coords[a].push_back(parse_double(cells[a], header[a], lineno));
        const double re = parse_double(cells[naxes], "re", lineno);
        const double im = parse_double(cells[naxes + 1], "im", lineno);
        raw_values.emplace_back(re, im);
    }
    if (raw_values.empty()) throw IoError("CSV contains no data rows");

    SampledField field;
    std::vector<std::vector<double>> uniq(naxes);
    for (std::size_t a = 0; a < naxes; ++a) {
        uniq[a] = raw_coords[a];
        std::sort(uniq[a].begin(), uniq[a].end());
        uniq[a].erase(std::unique(uniq[a].begin(), uniq[a].end()), uniq[a].end());
        Axis ax;
        ax.label = header[a];
        ax.min = uniq[a].front();
        ax.max = uniq[a].back();
        ax.count = static_cast<int>(uniq[a].size());
        field.grid.axes.push_back(ax);
    }
    const std::size_t total = field.grid.node_count();
    if (total != raw_values.size())
        throw IoError("CSV rows do not form a complete rectangular lattice (" +
                      std::to_string(raw_values.size()) + " rows, lattice needs " +
                      std::to_string(total) + ")");
    for (std::size_t a = 0; a < naxes; ++a) {
        const Axis& ax = field.grid.axes[a];
        const double span = std::abs(ax.max - ax.min) + 1.0;
        for (int i = 0; i < ax.count; ++i)
            if (std::abs(uniq[a][i] - field.grid.coordinate(a, i)) > 1e-9 * span)
                throw IoError("axis '" + ax.label + "' is not uniformly spaced");
    }

    field.values.assign(total, Complex{});
    std::vector<bool> seen(total, false);
    for (std::size_t rowi = 0; rowi < raw_values.size(); ++rowi) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < naxes; ++a) {
            const auto& u = uniq[a];
            const auto it = std::lower_bound(u.begin(), u.end(), raw_coords[a][rowi]);
            if (it == u.end() || *it != raw_coords[a][rowi])
                throw IoError("internal lattice lookup failure");
            flat = flat * u.size() + static_cast<std::size_t>(it - u.begin());
        }
        if (seen[flat]) throw IoError("duplicate node coordinates in CSV (lattice error)");
        seen[flat] = true;
        field.values[flat] = raw_values[rowi];
    }
    validate(field);
    return field;
}

void export_heatmap(const SampledField& field, HeatmapMode mode,
                    const std::filesystem::path& path) {
    validate(field);
    if (field.grid.axes.size() != 2) throw std::invalid_argument("heatmap requires a 2D field");
    const std::size_t w = field.grid.axes[0].count;
    const std::size_t hgt = field.grid.axes[1].count;
    double maxmag = 0.0;
    for (const Complex& v : field.values) maxmag = std::max(maxmag, std::abs(v));
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    out << "P5\n" << w << " " << hgt << "\n255\n";
    std::vector<unsigned char> row(w);
    for (std::size_t jimg = 0; jimg < hgt; ++jimg) {
        const std::size_t j = hgt - 1 - jimg;  // image up = axis up
        for (std::size_t i = 0; i < w; ++i) {
            const Complex v = field.at(i, j);
            double t;
            if (mode == HeatmapMode::Magnitude) {
                t = maxmag > 0.0 ? std::abs(v) / maxmag : 0.0;
            } else {
                t = (std::arg(v) + kPi) / (2.0 * kPi);
            }
            const double scaled = std::nearbyint(t * 255.0);
            row[i] = static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(w));
    }
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

SourceFunction make_source(const SourceSpec& spec) {
    switch (spec.type) {
        case SourceSpec::Type::Gaussian: {
            const Complex sigma = spec.sigma;
            const double lambda = spec.lambda;
            return SourceFunction{
                [sigma, lambda](double u) {
                    return cexp_guarded(-kPi * sigma * u * u -
                                        Complex(0.0, 2.0 * kPi * lambda * u));
                },
                DecayBound{1.0, kPi * sigma.real(), 0.0}};
        }
        case SourceSpec::Type::PlaneWave: {
            const double k = spec.k;
            return SourceFunction{
                [k](double u) { return std::exp(Complex(0.0, -k * u)); },
                DecayBound{1.0, 0.0, 0.0}};
        }
        case SourceSpec::Type::GaussianPoly: {
            const auto c = spec.poly;
            const double alpha = 0.9 * kPi;
            double C = 0.0;
            for (int i = 0; i <= 2000; ++i) {
                const double u = -10.0 + i * 0.01;
                const double mag =
                    std::abs(c[0] + c[1] * u + c[2] * u * u) * std::exp(-kPi * u * u);
                C = std::max(C, mag * std::exp(alpha * u * u));
            }
            return SourceFunction{
                [c](double u) {
                    return Complex((c[0] + c[1] * u + c[2] * u * u) * std::exp(-kPi * u * u),
                                   0.0);
                },
                DecayBound{1.05 * C + 1e-12, alpha, 0.0}};
        }
    }
    throw std::invalid_argument("unknown source type");
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario JSON parse error: ") + e.what());
    }
    StrictObject o(j, "scenario");
    Scenario sc;
    const std::string kind = o.text("kind");
    sc.hbar = o.number_or("hbar", 1.0);
    if (!(sc.hbar > 0.0)) throw ScenarioError("scenario.hbar: must be > 0");
    if (kind == "transform") {
        TransformScenario t;
        t.source = parse_source(o.required("source"), "scenario.source");
        t.sheet = parse_sheet(o.required("sheet"), "scenario.sheet");
        t.grid = parse_grid(o.required("grid"), "scenario.grid", {"x", "y"});
        t.quad = parse_quadrature(o.optional("quadrature"), "scenario.quadrature");
        sc.body = std::move(t);
    } else if (kind == "beam") {
        BeamScenario b;
        b.beam = parse_beam(o.required("beam"), "scenario.beam");
        b.grid = parse_grid(o.required("grid"), "scenario.grid", {"u1", "u2"});
        b.residual_tol = o.number_or("residual_tol", 1e-3);
        if (!(b.residual_tol > 0.0)) throw ScenarioError("scenario.residual_tol: must be > 0");
        sc.body = std::move(b);
    } else if (kind == "verify") {
        VerifyScenario v;
        v.suite = o.string_or("suite", "all");
        sc.body = std::move(v);
    } else if (kind == "invert") {
        InvertScenario iv;
        iv.field_csv = o.text("field_csv");
        iv.sheet = parse_sheet(o.required("sheet"), "scenario.sheet");
        const json& pts = o.required("points");
        if (!pts.is_array()) throw ScenarioError("scenario.points: expected an array");
        for (const auto& p : pts) {
            if (!p.is_number()) throw ScenarioError("scenario.points: expected numbers");
            iv.points.push_back(p.get<double>());
        }
        iv.quad = parse_quadrature(o.optional("quadrature"), "scenario.quadrature");
        sc.body = std::move(iv);
    } else {
        throw ScenarioError("scenario.kind: unknown kind '" + kind + "'");
    }
    o.finish();
    try {
        if (auto* t = std::get_if<TransformScenario>(&sc.body)) validate(t->grid);
        if (auto* b = std::get_if<BeamScenario>(&sc.body)) validate(b->grid);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("scenario.grid: ") + e.what());
    }
    return sc;
}

}  // namespace metamorph
