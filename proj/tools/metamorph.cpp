#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "metamorph/field_io.hpp"
#include "metamorph/helmholtz.hpp"
#include "metamorph/simd/kernels.hpp"
#include "metamorph/transform.hpp"
#include "metamorph/verify.hpp"

namespace {

// exit codes: 0 success, 1 usage/scenario error, 2 verification failure,
// 3 I/O or numeric error
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerifyFail = 2;
constexpr int kRuntime = 3;

using metamorph::Complex;
using metamorph::Hbar;
using metamorph::Scenario;

struct GlobalFlags {
    double hbar = 0.0;  // 0 = take from scenario
    std::uint64_t seed = 42;
    double tol_scale = 1.0;
    std::string json_report;
    bool swap_br = false;
};

Hbar effective_hbar(const GlobalFlags& flags, const Scenario& sc) {
    return Hbar{flags.hbar > 0.0 ? flags.hbar : sc.hbar};
}

int run_transform(const std::string& scenario_path, const std::string& output_path,
                  const GlobalFlags& flags) {
    const Scenario sc = metamorph::load_scenario(scenario_path);
    const auto* body = std::get_if<metamorph::TransformScenario>(&sc.body);
    if (!body) throw metamorph::ScenarioError("scenario.kind: expected a transform scenario");
    const Hbar h = effective_hbar(flags, sc);
    const metamorph::SourceFunction source = metamorph::make_source(body->source);
    const metamorph::SampledField field =
        metamorph::forward_grid(source, body->grid, body->sheet, h, body->quad);
    metamorph::export_field_csv(field, output_path);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const Complex& v : field.values) {
        lo = std::min(lo, std::abs(v));
        hi = std::max(hi, std::abs(v));
    }
    std::printf("transform: %zu nodes, |F| in [%.6g, %.6g], wrote %s\n",
                field.values.size(), lo, hi, output_path.c_str());
    return kOk;
}

int run_beam(const std::string& scenario_path, const std::string& prefix,
             const GlobalFlags& flags) {
    const Scenario sc = metamorph::load_scenario(scenario_path);
    const auto* body = std::get_if<metamorph::BeamScenario>(&sc.body);
    if (!body) throw metamorph::ScenarioError("scenario.kind: expected a beam scenario");
    (void)effective_hbar(flags, sc);  // beams live in physical coordinates
    const metamorph::SampledField field =
        metamorph::reconstruct_physical_field(body->beam, body->grid);
    metamorph::export_field_csv(field, prefix + ".csv");
    metamorph::export_heatmap(field, metamorph::HeatmapMode::Magnitude, prefix + "_magnitude.pgm");

    const metamorph::SampledField res = metamorph::helmholtz_residual(field, body->beam.k);
    const double maxf = metamorph::max_abs_field(field);
    const double metric = maxf > 0.0 ? metamorph::max_interior_abs(res) /
                                           (body->beam.k * body->beam.k * maxf)
                                     : 0.0;
    const bool pass = metric <= body->residual_tol;
    std::printf("beam: k=%.6g a=%.6g nodes=%zu max|F|=%.6g residual/k^2|F|=%.3e tol=%.1e %s\n",
                body->beam.k, body->beam.a, field.values.size(), maxf, metric,
                body->residual_tol, pass ? "PASS" : "FAIL");
    if (!flags.json_report.empty()) {
        nlohmann::json j{{"k", body->beam.k},
                         {"a", body->beam.a},
                         {"max_field", maxf},
                         {"residual_metric", metric},
                         {"residual_tol", body->residual_tol},
                         {"pass", pass}};
        std::ofstream(flags.json_report) << j.dump(2) << "\n";
    }
    return pass ? kOk : kVerifyFail;
}

int run_invert(const std::string& scenario_path, const std::string& output_path,
               const GlobalFlags& flags) {
    const Scenario sc = metamorph::load_scenario(scenario_path);
    const auto* body = std::get_if<metamorph::InvertScenario>(&sc.body);
    if (!body) throw metamorph::ScenarioError("scenario.kind: expected an invert scenario");
    const Hbar h = effective_hbar(flags, sc);
    metamorph::SampledField field = metamorph::import_field_csv(body->field_csv);
    field.sheet = body->sheet;
    field.hbar = h.value;
    std::ofstream out(output_path);
    if (!out) throw metamorph::IoError("cannot open '" + output_path + "' for writing");
    out << "u,re,im\n";
    for (double u : body->points) {
        const Complex v = metamorph::inverse(field, u, h, body->quad);
        out << metamorph::format_double(u) << ',' << metamorph::format_double(v.real()) << ','
            << metamorph::format_double(v.imag()) << '\n';
    }
    std::printf("invert: %zu points, wrote %s\n", body->points.size(), output_path.c_str());
    return kOk;
}

int run_verify(const std::string& suite, const GlobalFlags& flags) {
    const bool known = suite == "all" || suite == "closed-forms" || suite == "annihilators" ||
                       suite == "roundtrip" || suite == "helmholtz";
    if (!known) {
        std::fprintf(stderr, "unknown suite '%s' (use all|closed-forms|annihilators|roundtrip|helmholtz)\n",
                     suite.c_str());
        return kUsage;
    }
    metamorph::verify::VerifyOptions opts;
    opts.seed = flags.seed;
    opts.tol_scale = flags.tol_scale;
    opts.swap_br = flags.swap_br;
    const metamorph::verify::Results results = metamorph::verify::run_suite(suite, opts);
    std::printf("%-42s %14s %10s  %s\n", "check", "max residual", "tolerance", "status");
    for (const auto& r : results)
        std::printf("%-42s %14.4e %10.1e  %s\n", r.name.c_str(), r.max_residual, r.tolerance,
                    r.pass ? "PASS" : "FAIL");
    const bool pass = metamorph::verify::all_pass(results);
    std::printf("suite %s: %s (%zu checks, backend %s)\n", suite.c_str(),
                pass ? "PASS" : "FAIL", results.size(),
                metamorph::simd::backend_name(metamorph::simd::active_backend()));
    if (!flags.json_report.empty()) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : results)
            checks.push_back({{"name", r.name},
                              {"max_residual", r.max_residual},
                              {"tolerance", r.tolerance},
                              {"pass", r.pass},
                              {"seconds", r.seconds}});
        nlohmann::json j{{"suite", suite},
                         {"seed", flags.seed},
                         {"tol_scale", flags.tol_scale},
                         {"checks", checks},
                         {"pass", pass}};
        std::ofstream(flags.json_report) << j.dump(2) << "\n";
    }
    return pass ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metamorphism transform toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalFlags flags;
    app.add_option("--hbar", flags.hbar, "override the scenario hbar (> 0)");
    app.add_option("--seed", flags.seed, "seed for randomized verification probes");
    app.add_option("--tol-scale", flags.tol_scale, "global tolerance multiplier");
    app.add_option("--json-report", flags.json_report, "write a machine-readable report");
    app.add_flag("--debug-swap-br", flags.swap_br,
                 "negative control: swap the b/r derivative slots in verify");

    std::string scenario_path, output_path, suite = "all";
    CLI::App* transform = app.add_subcommand("transform", "forward transform on a grid");
    transform->add_option("scenario", scenario_path, "scenario JSON")->required();
    transform->add_option("output", output_path, "output CSV path")->required();

    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("suite", suite, "all|closed-forms|annihilators|roundtrip|helmholtz");

    CLI::App* beam = app.add_subcommand("beam", "synthesize a beam field");
    beam->add_option("scenario", scenario_path, "scenario JSON")->required();
    beam->add_option("prefix", output_path, "output path prefix")->required();

    CLI::App* invert = app.add_subcommand("invert", "invert a sheet slice at sample points");
    invert->add_option("scenario", scenario_path, "scenario JSON")->required();
    invert->add_option("output", output_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (transform->parsed()) return run_transform(scenario_path, output_path, flags);
        if (verify->parsed()) return run_verify(suite, flags);
        if (beam->parsed()) return run_beam(scenario_path, output_path, flags);
        if (invert->parsed()) return run_invert(scenario_path, output_path, flags);
        return kUsage;
    } catch (const metamorph::ScenarioError& e) {
        std::fprintf(stderr, "scenario error: %s\n", e.what());
        return kUsage;
    } catch (const metamorph::QuadratureError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kRuntime;
    } catch (const metamorph::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
}
