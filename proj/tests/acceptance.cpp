// Acceptance gate: one pass/fail line per criterion, each with its measured
// residuals, tolerance and wall time. Exit code 0 iff every criterion holds.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "metamorph/field_io.hpp"
#include "metamorph/helmholtz.hpp"
#include "metamorph/simd/kernels.hpp"
#include "metamorph/verify.hpp"

namespace fs = std::filesystem;
using metamorph::verify::CheckResult;

namespace {

struct Criterion {
    std::string label;
    std::vector<std::string> checks;
    double time_limit_s;  // 0 = no limit
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// Fig-style beam panels: byte-determinism of the PGM outputs.
CheckResult pgm_determinism() {
    CheckResult r;
    r.name = "beam_pgm_byte_determinism";
    r.tolerance = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const fs::path dir = fs::temp_directory_path() / "metamorph_acceptance";
        fs::create_directories(dir);
        int mismatches = 0;
        for (double a : {0.5, 8.0}) {
            metamorph::BeamSpec spec;
            spec.k = 2.0 * metamorph::kPi;
            spec.a = a;
            metamorph::GridSpec grid;
            grid.axes = {metamorph::Axis{"u1", -6.0, 6.0, 241},
                         metamorph::Axis{"u2", 0.0, 12.0, 241}};
            const fs::path p1 = dir / ("beam_a" + std::to_string(a) + "_run1.pgm");
            const fs::path p2 = dir / ("beam_a" + std::to_string(a) + "_run2.pgm");
            const metamorph::SampledField f1 =
                metamorph::reconstruct_physical_field(spec, grid);
            metamorph::export_heatmap(f1, metamorph::HeatmapMode::Magnitude, p1);
            const metamorph::SampledField f2 =
                metamorph::reconstruct_physical_field(spec, grid);
            metamorph::export_heatmap(f2, metamorph::HeatmapMode::Magnitude, p2);
            if (slurp(p1) != slurp(p2) || slurp(p1).empty()) ++mismatches;
        }
        r.max_residual = mismatches;
        r.pass = mismatches == 0;
    } catch (const std::exception& e) {
        r.pass = false;
        r.max_residual = std::numeric_limits<double>::infinity();
        r.name += std::string(" [error: ") + e.what() + "]";
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

int main() {
    metamorph::verify::VerifyOptions opts;  // seed 42
    std::map<std::string, CheckResult> results;
    {
        const auto all = metamorph::verify::run_suite("all", opts);
        for (const CheckResult& r : all) results[r.name] = r;
    }
    {
        const CheckResult pgm = pgm_determinism();
        results[pgm.name] = pgm;
    }

    const std::vector<Criterion> criteria = {
        {"C1 oracle equivalence (closed forms vs numeric forward, 5x5x3x3 lattice)",
         {"oracle_wave_packet", "oracle_plane_wave", "oracle_point_mass",
          "oracle_point_mass_derivative"},
         30.0},
        {"C2 annihilation suite (C1, C2, S1, S2 at 20 seeded points each)",
         {"annihilate_C1", "annihilate_C2", "annihilate_S1", "annihilate_S2"},
         10.0},
        {"C3 reproducing property (cross-sheet restoration)",
         {"reproduce_same_sheet", "reproduce_cross_sheet"},
         60.0},
        {"C4 inverse round trip (3 sources x 11 points, calibrated constant)",
         {"inverse_roundtrip_three_sources", "inverse_calibration_stable"},
         120.0},
        {"C5 sesqui-unitarity (pairing equals the L2 inner product)",
         {"sesqui_unitarity_gaussian_pairs"},
         0.0},
        {"C6 order reduction (intertwining and image-chart eigenvalues)",
         {"intertwine_gaussian", "intertwine_gaussian_times_u", "D0_plane_wave_eigenvalue",
          "D_plane_wave_eigenvalue", "D_matches_D0_through_lift"},
         0.0},
        {"C7 transmuted equation (plane-wave on/off shell, generic lift)",
         {"transmuted_plane_wave", "transmuted_plane_wave_violated (expect >)",
          "transmuted_generic_lift"},
         0.0},
        {"C8 structural conditions (difference identity, plane-wave solution)",
         {"structural_2d_plane_wave", "structural_2d_constant_values",
          "structural_2d_difference_identity"},
         0.0},
        {"C9 beam reproduction (interior residual bound, deterministic PGMs)",
         {"beam_field_residual_wide_and_narrow", "beam_pgm_byte_determinism"},
         120.0},
        {"C10 3D suite (generic lift, structural constants)",
         {"lift_f5_generic_solution", "structural_3d_constant_values",
          "transmuted_3d_plane_wave", "structural_3d_plane_wave"},
         0.0},
        {"C11 grid convergence (second-order residual stencil)",
         {"helmholtz_residual_second_order"},
         0.0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        bool pass = true;
        double seconds = 0.0;
        std::string detail;
        for (const std::string& name : c.checks) {
            const auto it = results.find(name);
            if (it == results.end()) {
                pass = false;
                detail += " missing:" + name;
                continue;
            }
            seconds += it->second.seconds;
            if (!it->second.pass) {
                pass = false;
                char buf[160];
                std::snprintf(buf, sizeof(buf), " %s=%.3e(tol %.1e)", name.c_str(),
                              it->second.max_residual, it->second.tolerance);
                detail += buf;
            }
        }
        if (c.time_limit_s > 0.0 && seconds > c.time_limit_s) {
            pass = false;
            detail += " over-time";
        }
        std::string timing = "";
        if (c.time_limit_s > 0.0)
            timing = " / limit " + std::to_string(static_cast<int>(c.time_limit_s)) + "s";
        std::printf("[%s] %s (%.1fs%s)%s\n", pass ? "PASS" : "FAIL", c.label.c_str(), seconds,
                    timing.c_str(), detail.c_str());
        if (!pass) ++failures;
    }
    std::printf("acceptance: %d/%zu criteria pass (backend %s)\n",
                static_cast<int>(criteria.size()) - failures, criteria.size(),
                metamorph::simd::backend_name(metamorph::simd::active_backend()));
    return failures == 0 ? 0 : 1;
}
