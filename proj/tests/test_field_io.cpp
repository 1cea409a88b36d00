#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "metamorph/field_io.hpp"

using namespace metamorph;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("metamorph_test_" + name);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

SampledField make_field_2d(int nx, int ny, unsigned seed) {
    SampledField f;
    f.grid.axes = {Axis{"x", -1.0, 1.0, nx}, Axis{"y", 0.0, 2.0, ny}};
    f.values.resize(f.grid.node_count());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(-30.0, 30.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Complex& v : f.values)
        v = Complex(u(rng) * std::exp2(mag(rng)), u(rng) * std::exp2(mag(rng)));
    return f;
}

}  // namespace

TEST_CASE("csv format is pinned byte for byte") {
    SampledField f;
    f.grid.axes = {Axis{"u", 0.0, 0.0, 1}};
    f.values = {Complex(1.0, 2.0)};
    const fs::path p = temp_file("pin.csv");
    export_field_csv(f, p);
    CHECK(slurp(p) == "u,re,im\n0,1,2\n");
    fs::remove(p);
    CHECK_THROWS_AS(export_field_csv(f, fs::path{}), IoError);
}

TEST_CASE("csv round trip is bit exact") {
    const SampledField f = make_field_2d(5, 7, 99);
    const fs::path p = temp_file("roundtrip.csv");
    export_field_csv(f, p);
    const SampledField g = import_field_csv(p);
    REQUIRE(g.values.size() == f.values.size());
    REQUIRE(g.grid.axes.size() == 2);
    CHECK(g.grid.axes[0].count == 5);
    CHECK(g.grid.axes[1].count == 7);
    CHECK(std::memcmp(f.values.data(), g.values.data(),
                      f.values.size() * sizeof(Complex)) == 0);
    fs::remove(p);
}

TEST_CASE("csv import rejects malformed lattices") {
    const fs::path p = temp_file("bad.csv");

    write_text(p, "x,re\n0,1\n");
    CHECK_THROWS_WITH_AS(import_field_csv(p), doctest::Contains("im"), IoError);

    write_text(p, "x,y,re,im\n0,0,1,0\n0,1,2,0\n1,0,3,0\n");  // missing (1,1)
    CHECK_THROWS_AS(import_field_csv(p), IoError);

    write_text(p, "x,re,im\n0,1,0\n0,2,0\n");  // duplicate node
    CHECK_THROWS_AS(import_field_csv(p), IoError);

    write_text(p, "x,re,im\n0,nan,0\n");
    CHECK_THROWS_AS(import_field_csv(p), IoError);

    write_text(p, "x,re,im\n0,oops,0\n");
    CHECK_THROWS_AS(import_field_csv(p), IoError);

    write_text(p, "x,re,im\n0,1\n");  // ragged row
    CHECK_THROWS_AS(import_field_csv(p), IoError);
    fs::remove(p);
}

TEST_CASE("heatmaps are deterministic and pinned") {
    SampledField f;
    f.grid.axes = {Axis{"x", 0.0, 1.0, 3}, Axis{"y", 0.0, 1.0, 2}};
    f.values.assign(6, Complex(0.5, 0.0));
    const fs::path p1 = temp_file("a.pgm");
    const fs::path p2 = temp_file("b.pgm");
    export_heatmap(f, HeatmapMode::Magnitude, p1);
    export_heatmap(f, HeatmapMode::Magnitude, p2);
    const std::string a = slurp(p1);
    CHECK(a == slurp(p2));
    CHECK(a == std::string("P5\n3 2\n255\n") + std::string(6, static_cast<char>(255)));

    for (Complex& v : f.values) v = Complex{};
    export_heatmap(f, HeatmapMode::Magnitude, p1);
    CHECK(slurp(p1) == std::string("P5\n3 2\n255\n") + std::string(6, '\0'));

    // image row 0 carries the larger second-axis coordinate
    f.values = {Complex(0, 0), Complex(1, 0), Complex(0, 0),
                Complex(1, 0), Complex(0, 0), Complex(1, 0)};
    // field(i, j): value = j (column-constant gradient along axis 1)
    export_heatmap(f, HeatmapMode::Magnitude, p1);
    const std::string img = slurp(p1);
    const std::string body = img.substr(img.size() - 6);
    CHECK(static_cast<unsigned char>(body[0]) == 255);  // top row = max y
    CHECK(static_cast<unsigned char>(body[3]) == 0);

    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("phase heatmap maps [-pi, pi] linearly") {
    SampledField f;
    f.grid.axes = {Axis{"x", 0.0, 1.0, 2}, Axis{"y", 0.0, 0.0, 1}};
    f.values = {Complex(-1.0, -1e-300), Complex(1.0, 0.0)};  // arg -> -pi, 0
    const fs::path p = temp_file("phase.pgm");
    export_heatmap(f, HeatmapMode::Phase, p);
    const std::string img = slurp(p);
    CHECK(static_cast<unsigned char>(img[img.size() - 2]) == 0);
    CHECK(static_cast<unsigned char>(img[img.size() - 1]) == 128);
    fs::remove(p);
}

TEST_CASE("scenario loading is strict") {
    const fs::path p = temp_file("scenario.json");

    write_text(p, R"({"kind":"beam","beam":{"k":6.283,"a":0.5},
                     "grid":{"u1":{"min":-1,"max":1,"count":5},
                             "u2":{"min":0,"max":2,"count":5}}})");
    const Scenario sc = load_scenario(p);
    CHECK(sc.hbar == 1.0);
    const auto& beam = std::get<BeamScenario>(sc.body);
    CHECK(beam.beam.sign == -1);
    CHECK(beam.beam.nodes == 512);
    CHECK(beam.residual_tol == 1e-3);

    write_text(p, R"({"kind":"transform","source":{"type":"gaussian"},
                     "sheet":{"b0":0,"r0":-1},
                     "grid":{"x":{"min":-1,"max":1,"count":3},
                             "y":{"min":-1,"max":1,"count":3}}})");
    CHECK_THROWS_WITH_AS(load_scenario(p), doctest::Contains("sheet.r0"), ScenarioError);

    write_text(p, R"({"kind":"verify","suite":"all","foo":1})");
    CHECK_THROWS_WITH_AS(load_scenario(p), doctest::Contains("foo"), ScenarioError);

    write_text(p, R"({"kind":"wibble"})");
    CHECK_THROWS_AS(load_scenario(p), ScenarioError);

    write_text(p, "{ not json");
    CHECK_THROWS_AS(load_scenario(p), ScenarioError);

    write_text(p, R"({"kind":"invert","field_csv":"f.csv","points":[0,1],
                     "sheet":{"b0":0,"r0":1}})");
    const Scenario iv = load_scenario(p);
    CHECK(std::get<InvertScenario>(iv.body).points.size() == 2);
    fs::remove(p);
}

TEST_CASE("wide and narrow beam heatmaps are visibly different") {
    GridSpec grid;
    grid.axes = {Axis{"u1", -6.0, 6.0, 61}, Axis{"u2", 0.0, 12.0, 61}};
    BeamSpec wide;
    wide.k = 2.0 * kPi;
    wide.a = 0.5;
    BeamSpec narrow = wide;
    narrow.a = 8.0;
    const fs::path pw = temp_file("wide.pgm");
    const fs::path pn = temp_file("narrow.pgm");
    export_heatmap(reconstruct_physical_field(wide, grid), HeatmapMode::Magnitude, pw);
    export_heatmap(reconstruct_physical_field(narrow, grid), HeatmapMode::Magnitude, pn);
    const std::string a = slurp(pw);
    const std::string b = slurp(pn);
    REQUIRE(a.size() == b.size());
    std::size_t differing = 0;
    for (std::size_t i = a.size() - 61 * 61; i < a.size(); ++i)
        if (a[i] != b[i]) ++differing;
    CHECK(differing > 61 * 61 / 5);
    fs::remove(pw);
    fs::remove(pn);
}

TEST_CASE("format_double emits shortest round-trip decimals") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.5) == "-0.5");
}
