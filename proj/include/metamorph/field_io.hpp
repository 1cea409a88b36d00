#pragma once

#include <array>
#include <filesystem>
#include <variant>

#include "metamorph/core.hpp"
#include "metamorph/helmholtz.hpp"
#include "metamorph/transform.hpp"

namespace metamorph {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Scenario schema violations (unknown keys, bad ranges); CLI exit code 1.
class ScenarioError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// CSV: header row of axis labels plus re,im; one row per node in row-major
/// order; shortest round-trip decimals; LF endings.
void export_field_csv(const SampledField& field, const std::filesystem::path& path);
SampledField import_field_csv(const std::filesystem::path& path);

enum class HeatmapMode { Magnitude, Phase };

/// Binary PGM (P5, maxval 255). Magnitude maps [0, max|F|] linearly; phase
/// maps [-pi, pi]. Image row 0 carries the max second-axis coordinate.
void export_heatmap(const SampledField& field, HeatmapMode mode,
                    const std::filesystem::path& path);

struct SourceSpec {
    enum class Type { Gaussian, PlaneWave, GaussianPoly };
    Type type = Type::Gaussian;
    Complex sigma{1.0, 0.0};       // gaussian
    double lambda = 0.0;           // gaussian
    double k = 0.0;                // plane wave
    std::array<double, 3> poly{1.0, 0.0, 0.0};  // (c0 + c1 u + c2 u^2) e^{-pi u^2}
};

SourceFunction make_source(const SourceSpec& spec);

struct TransformScenario {
    SourceSpec source;
    ReferenceSheet sheet;
    GridSpec grid;
    QuadratureSpec quad;
};

struct BeamScenario {
    BeamSpec beam;
    GridSpec grid;
    double residual_tol = 1e-3;
};

struct InvertScenario {
    std::string field_csv;
    ReferenceSheet sheet;
    std::vector<double> points;
    QuadratureSpec quad;
};

struct VerifyScenario {
    std::string suite = "all";
};

struct Scenario {
    double hbar = 1.0;
    std::variant<TransformScenario, BeamScenario, VerifyScenario, InvertScenario> body;
};

/// Parses and validates a scenario JSON file. Strict: unknown keys are
/// rejected with their JSON path.
Scenario load_scenario(const std::filesystem::path& path);

/// Shortest round-trip decimal form of v.
std::string format_double(double v);

}  // namespace metamorph
