#include "metamorph/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "metamorph/closed_forms.hpp"
#include "metamorph/field_io.hpp"
#include "metamorph/helmholtz.hpp"
#include "metamorph/jets.hpp"
#include "metamorph/quadrature.hpp"
#include "metamorph/simd/kernels.hpp"
#include "metamorph/transform.hpp"

namespace metamorph::verify {

namespace {

constexpr Complex kI{0.0, 1.0};

using Clock = std::chrono::steady_clock;

class Suite {
  public:
    explicit Suite(const VerifyOptions& opts) : opts_(opts) {}

    // body returns the max residual; pass iff residual <= tol * tol_scale
    template <typename Body>
    void check(const std::string& name, double tol, Body&& body) {
        CheckResult r;
        r.name = name;
        r.tolerance = tol * opts_.tol_scale;
        const auto t0 = Clock::now();
        try {
            r.max_residual = body();
            r.pass = r.max_residual <= r.tolerance;
        } catch (const std::exception& e) {
            r.max_residual = std::numeric_limits<double>::infinity();
            r.pass = false;
            r.name += std::string(" [error: ") + e.what() + "]";
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        results_.push_back(std::move(r));
    }

    // inverted check: passes iff the measured value EXCEEDS the threshold
    template <typename Body>
    void check_at_least(const std::string& name, double threshold, Body&& body) {
        CheckResult r;
        r.name = name + " (expect >)";
        r.tolerance = threshold;
        const auto t0 = Clock::now();
        try {
            r.max_residual = body();
            r.pass = r.max_residual > threshold;
        } catch (const std::exception& e) {
            r.max_residual = 0.0;
            r.pass = false;
            r.name += std::string(" [error: ") + e.what() + "]";
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        results_.push_back(std::move(r));
    }

    std::mt19937_64 rng() const { return std::mt19937_64(opts_.seed); }
    const VerifyOptions& opts() const { return opts_; }
    Results take() { return std::move(results_); }

  private:
    VerifyOptions opts_;
    Results results_;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

PhasePoint random_point(std::mt19937_64& rng) {
    return PhasePoint{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0),
                      uniform(rng, 0.6, 1.8)};
}

Complex random_disk(std::mt19937_64& rng, double radius) {
    return Complex(uniform(rng, -radius, radius), uniform(rng, -radius, radius));
}

ComplexChart random_chart(std::mt19937_64& rng) {
    return phase_to_complex(random_point(rng));
}

double rel_diff(Complex got, Complex want, double floor_scale) {
    return std::abs(got - want) / std::max(std::abs(want), floor_scale);
}

// ---- shared fixtures ------------------------------------------------------

const Hbar kH{1.0};

SourceFunction gaussian_source() {
    return {[](double u) { return Complex(std::exp(-kPi * u * u), 0.0); },
            DecayBound{1.0, kPi, 0.0}};
}

SourceFunction packet_source(Complex sigma, double lambda) {
    return {[sigma, lambda](double u) {
                return cexp_guarded(-kPi * sigma * u * u - 2.0 * kPi * kI * lambda * u);
            },
            DecayBound{1.0, kPi * sigma.real(), 0.0}};
}

// normalized point-mass approximant sqrt(s) e^{-pi s u^2} and its negated derivative
SourceFunction delta_approx(double s) {
    return {[s](double u) { return Complex(std::sqrt(s) * std::exp(-kPi * s * u * u), 0.0); },
            DecayBound{std::sqrt(s), kPi * s, 0.0}};
}

SourceFunction delta1_approx(double s) {
    const double ustar = 1.0 / std::sqrt(0.2 * kPi * s);
    const double C = std::sqrt(s) * 2.0 * kPi * s * ustar * std::exp(-0.1 * kPi * s * ustar * ustar);
    return {[s](double u) {
                return Complex(std::sqrt(s) * 2.0 * kPi * s * u * std::exp(-kPi * s * u * u),
                               0.0);
            },
            DecayBound{1.05 * C, 0.9 * kPi * s, 0.0}};
}

std::vector<PhasePoint> oracle_lattice() {
    std::vector<PhasePoint> pts;
    for (double x : {-5.0, -2.5, 0.0, 2.5, 5.0})
        for (double y : {-1.0, -0.5, 0.0, 0.5, 1.0})
            for (double b : {-1.0, 0.0, 1.0})
                for (double r : {0.5, 1.0, 2.0}) pts.push_back(PhasePoint{x, y, b, r});
    return pts;
}

double lattice_oracle_error(const SourceFunction& f,
                            const std::function<Complex(const PhasePoint&)>& closed,
                            QuadratureSpec q, double floor_frac = 1e-5) {
    // tight tail cutoff; the relative error is floored at floor_frac of the
    // lattice peak so zeros and exponentially tiny values are held to a
    // matching absolute bar instead of an undefined ratio
    q.truncation_eps = 1e-14;
    const auto pts = oracle_lattice();
    double max_want = 0.0;
    std::vector<Complex> wants(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        wants[i] = closed(pts[i]);
        max_want = std::max(max_want, std::abs(wants[i]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Complex got = forward_value(f, pts[i], kH, q);
        worst = std::max(worst, rel_diff(got, wants[i], floor_frac * max_want));
    }
    return worst;
}

FieldFunction packet_field(Complex sigma, double lambda) {
    return [sigma, lambda](const PhasePoint& p) {
        return wave_packet_metamorphism(WavePacketSpec{sigma, lambda}, p, kH);
    };
}

FieldFunction plane_field(double k) {
    return [k](const PhasePoint& p) { return plane_wave_metamorphism(PlaneWaveSpec{k}, p, kH); };
}

FieldFunction delta_field(int order) {
    return [order](const PhasePoint& p) { return delta_metamorphism(order, p, kH); };
}

// exp(alpha t + beta s1 + gamma s2) as an analytic jet
F3Jet exp_f3(Complex alpha, Complex beta, Complex gamma) {
    const auto val = [=](Complex t, Complex s1, Complex s2) {
        return cexp_guarded(alpha * t + beta * s1 + gamma * s2);
    };
    F3Jet jet;
    jet.value = val;
    jet.dt = [=](Complex t, Complex s1, Complex s2) { return alpha * val(t, s1, s2); };
    jet.ds1 = [=](Complex t, Complex s1, Complex s2) { return beta * val(t, s1, s2); };
    jet.ds2 = [=](Complex t, Complex s1, Complex s2) { return gamma * val(t, s1, s2); };
    jet.ds1s1 = [=](Complex t, Complex s1, Complex s2) { return beta * beta * val(t, s1, s2); };
    jet.ds2s2 = [=](Complex t, Complex s1, Complex s2) { return gamma * gamma * val(t, s1, s2); };
    return jet;
}

// plane-wave f3 carrying the chart constant i so its lift is the tensor
// transform of e^{-i(k1 u1 + k2 u2)} exactly
F3Jet plane_wave_f3(double k1, double k2, double hb) {
    const Complex a = (k1 * k1 - k2 * k2) / (8.0 * kPi * kI * hb);
    F3Jet jet = exp_f3(a, -kI * k1, -kI * k2);
    F3Jet scaled;
    const auto wrap = [](F3Jet::Fn fn) {
        return [fn](Complex t, Complex s1, Complex s2) { return kI * fn(t, s1, s2); };
    };
    scaled.value = wrap(jet.value);
    scaled.dt = wrap(jet.dt);
    scaled.ds1 = wrap(jet.ds1);
    scaled.ds2 = wrap(jet.ds2);
    scaled.ds1s1 = wrap(jet.ds1s1);
    scaled.ds2s2 = wrap(jet.ds2s2);
    return scaled;
}

// random multivariate polynomial jet in 5 complex arguments, degree <= 2
struct Poly5 {
    struct Term {
        Complex coef;
        std::array<int, 5> pow;
    };
    std::vector<Term> terms;

    Complex eval(const F5Jet::Args& a) const {
        Complex total{};
        for (const Term& t : terms) {
            Complex m = t.coef;
            for (int v = 0; v < 5; ++v)
                for (int p = 0; p < t.pow[v]; ++p) m *= a[v];
            total += m;
        }
        return total;
    }

    Poly5 derivative(int var) const {
        Poly5 out;
        for (const Term& t : terms) {
            if (t.pow[var] == 0) continue;
            Term d = t;
            d.coef *= static_cast<double>(t.pow[var]);
            d.pow[var] -= 1;
            out.terms.push_back(d);
        }
        return out;
    }
};

F5Jet poly5_jet(const Poly5& p) {
    F5Jet jet;
    const auto fn = [](Poly5 q) {
        return [q](const F5Jet::Args& a) { return q.eval(a); };
    };
    jet.value = fn(p);
    jet.dt1 = fn(p.derivative(0));
    jet.dt2 = fn(p.derivative(1));
    jet.ds1 = fn(p.derivative(2));
    jet.ds2 = fn(p.derivative(3));
    jet.ds3 = fn(p.derivative(4));
    jet.ds1s1 = fn(p.derivative(2).derivative(2));
    jet.ds2s2 = fn(p.derivative(3).derivative(3));
    jet.ds3s3 = fn(p.derivative(4).derivative(4));
    return jet;
}

F5Jet exp_f5(const std::array<Complex, 5>& c) {
    const auto val = [c](const F5Jet::Args& a) {
        Complex e{};
        for (int v = 0; v < 5; ++v) e += c[v] * a[v];
        return cexp_guarded(e);
    };
    F5Jet jet;
    jet.value = val;
    jet.dt1 = [c, val](const F5Jet::Args& a) { return c[0] * val(a); };
    jet.dt2 = [c, val](const F5Jet::Args& a) { return c[1] * val(a); };
    jet.ds1 = [c, val](const F5Jet::Args& a) { return c[2] * val(a); };
    jet.ds2 = [c, val](const F5Jet::Args& a) { return c[3] * val(a); };
    jet.ds3 = [c, val](const F5Jet::Args& a) { return c[4] * val(a); };
    jet.ds1s1 = [c, val](const F5Jet::Args& a) { return c[2] * c[2] * val(a); };
    jet.ds2s2 = [c, val](const F5Jet::Args& a) { return c[3] * c[3] * val(a); };
    jet.ds3s3 = [c, val](const F5Jet::Args& a) { return c[4] * c[4] * val(a); };
    return jet;
}

MultiChart random_chart_n(std::mt19937_64& rng, int n) {
    MultiChart mc;
    for (int j = 0; j < n; ++j) mc.dims.push_back(random_chart(rng));
    return mc;
}

}  // namespace

// ---- closed forms ----------------------------------------------------------

Results closed_forms_suite(const VerifyOptions& opts) {
    Suite suite(opts);
    const QuadratureSpec q{};

    suite.check("oracle_wave_packet", 1e-8, [&] {
        const WavePacketSpec spec{Complex(1.0, 0.0), 0.25};
        return lattice_oracle_error(packet_source(spec.sigma, spec.lambda),
                                    [&](const PhasePoint& p) {
                                        return wave_packet_metamorphism(spec, p, kH);
                                    },
                                    q);
    });

    suite.check("oracle_plane_wave", 1e-8, [&] {
        const double k = 1.0;
        SourceFunction f{[k](double u) { return std::exp(Complex(0.0, -k * u)); },
                         DecayBound{1.0, 0.0, 0.0}};
        return lattice_oracle_error(
            f, [&](const PhasePoint& p) { return plane_wave_metamorphism(PlaneWaveSpec{k}, p, kH); },
            q);
    });

    suite.check("oracle_point_mass", 1e-8, [&] {
        const double s = 1e11;
        return lattice_oracle_error(
            delta_approx(s), [&](const PhasePoint& p) { return delta_metamorphism(0, p, kH); }, q);
    });

    suite.check("oracle_point_mass_derivative", 1e-8, [&] {
        // the closed form vanishes on z = 0; those points are held to the
        // 1e-3-of-peak absolute bar (the ratio is undefined at a zero)
        const double s = 3e10;
        return lattice_oracle_error(
            delta1_approx(s), [&](const PhasePoint& p) { return delta_metamorphism(1, p, kH); },
            q, 1e-3);
    });

    suite.check("packet_chart_vs_direct_form", 1e-12, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const PhasePoint p = random_point(rng);
            const Complex sigma = Complex(uniform(rng, 0.3, 2.0), uniform(rng, -0.5, 0.5));
            const double lambda = uniform(rng, -1.0, 1.0);
            const Complex a = wave_packet_metamorphism(WavePacketSpec{sigma, lambda}, p, kH);
            const Complex b = detail::packet_direct(sigma, lambda, p, kH.value);
            worst = std::max(worst, rel_diff(a, b, 1e-30));
        }
        return worst;
    });

    suite.check("kernel_hermitian", 1e-13, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const PhasePoint p = random_point(rng);
            const PhasePoint p0 = random_point(rng);
            const Complex a = reproducing_kernel(p, p0, kH);
            const Complex b = std::conj(reproducing_kernel(p0, p, kH));
            worst = std::max(worst, rel_diff(a, b, 1e-30));
        }
        return worst;
    });

    suite.check("kernel_coherent_state_route", 1e-12, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const PhasePoint p = random_point(rng);
            const PhasePoint p0 = random_point(rng);
            const double hb = kH.value;
            const Complex sigma0 = hb * Complex(p0.r * p0.r, p0.b);
            const Complex lambda0 = -hb * (p0.x + Complex(p0.b, -p0.r * p0.r) * p0.y);
            const Complex c0 =
                std::sqrt(hb * p0.r) *
                cexp_guarded(-kPi * hb * Complex(p0.r * p0.r, p0.b) * p0.y * p0.y -
                             2.0 * kPi * kI * hb * p0.x * p0.y);
            const Complex route = std::conj(c0 * detail::packet_direct(sigma0, lambda0, p, hb));
            const Complex direct = reproducing_kernel(p, p0, kH);
            worst = std::max(worst, rel_diff(direct, route, 1e-30));
        }
        return worst;
    });

    suite.check("packet_f2_lift_matches", 1e-12, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            const PhasePoint p = random_point(rng);
            const WavePacketSpec spec{Complex(uniform(rng, 0.4, 1.6), uniform(rng, -0.3, 0.3)),
                                      uniform(rng, -0.8, 0.8)};
            const FieldFunction lifted = lift_G(wave_packet_f2(spec, kH), kH);
            worst = std::max(
                worst, rel_diff(lifted(p), wave_packet_metamorphism(spec, p, kH), 1e-30));
        }
        return worst;
    });

    suite.check("plane_wave_f2_lift_matches", 1e-12, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            const PhasePoint p = random_point(rng);
            const double k = uniform(rng, -3.0, 3.0);
            const FieldFunction lifted = lift_G(plane_wave_f2(k, kH), kH);
            worst = std::max(
                worst,
                rel_diff(lifted(p), plane_wave_metamorphism(PlaneWaveSpec{k}, p, kH), 1e-30));
        }
        return worst;
    });

    suite.check("plane_wave_small_sigma_limit", 1e-8, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        const double sigma = 1e-10;
        for (int i = 0; i < 20; ++i) {
            const ComplexChart c = random_chart(rng);
            const double k = uniform(rng, -2.0, 2.0);
            const HoloJet packet =
                wave_packet_f2(WavePacketSpec{Complex(sigma, 0.0), k / (2.0 * kPi)}, kH);
            const HoloJet wave = plane_wave_f2(k, kH);
            worst = std::max(worst, rel_diff(packet.value(c.z, c.w), wave.value(c.z, c.w), 1e-30));
        }
        return worst;
    });

    suite.check("f2_holomorphy_cauchy_riemann", 1e-8, [&] {
        auto rng = suite.rng();
        const HoloJet packet = wave_packet_f2(WavePacketSpec{Complex(1.0, 0.0), 0.5}, kH);
        const HoloJet wave = plane_wave_f2(1.5, kH);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const ComplexChart c = random_chart(rng);
            for (const HoloJet* jet : {&packet, &wave}) {
                worst = std::max(worst, cauchy_riemann_residual(
                                            [&](Complex z) { return jet->value(z, c.w); }, c.z));
                worst = std::max(worst, cauchy_riemann_residual(
                                            [&](Complex w) { return jet->value(c.z, w); }, c.w));
            }
        }
        return worst;
    });

    suite.check("jet_partials_consistent", 1e-6, [&] {
        auto rng = suite.rng();
        const HoloJet packet = wave_packet_f2(WavePacketSpec{Complex(0.8, 0.2), 0.4}, kH);
        const HoloJet wave = plane_wave_f2(2.0, kH);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const ComplexChart c = random_chart(rng);
            worst = std::max(worst, jet_consistency_residual(packet, c.z, c.w));
            worst = std::max(worst, jet_consistency_residual(wave, c.z, c.w));
        }
        return worst;
    });

    suite.check("point_mass_bracket_is_z", 1e-13, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            const PhasePoint p = random_point(rng);
            const Complex d0 = delta_metamorphism(0, p, kH);
            const Complex d1 = delta_metamorphism(1, p, kH);
            const Complex z = phase_to_complex(p).z;
            const Complex want = -2.0 * kPi * kI * kH.value * z * d0;
            worst = std::max(worst, rel_diff(d1, want, 1e-12 * std::abs(d0)));
        }
        return worst;
    });

    suite.check("lift_exponent_two_forms", 1e-12, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            const PhasePoint p = random_point(rng);
            const Complex w(p.b, p.r * p.r);
            const Complex e1 = cexp_guarded(-kPi * kH.value * p.x * p.x / Complex(p.r * p.r, -p.b));
            const Complex e2 = cexp_guarded(-kPi * kI * kH.value * p.x * p.x / w);
            worst = std::max(worst, rel_diff(e1, e2, 1e-30));
        }
        return worst;
    });

    suite.check("gaussian_integral_oracle", 1e-10, [&] {
        // frozen independent value for (a=1, z=i), plus random spot checks
        // against the panel quadrature engine
        double worst = rel_diff(gaussian_integral(Complex(1.0, 0.0), kI),
                                Complex(23.140692632779267, 0.0), 1e-30);
        auto rng = suite.rng();
        for (int i = 0; i < 10; ++i) {
            const Complex a(uniform(rng, 0.5, 2.0), uniform(rng, -0.5, 0.5));
            const Complex z = random_disk(rng, 1.0);
            // integral of e^{-pi a u^2 - 2 pi i z u} via the forward engine at
            // a synthetic phase point: forward with x=y=b=0 and r^2 = a only
            // works for real a, so integrate directly on panels instead
            const GaussLegendreRule& rule = gauss_legendre(32);
            Complex total{};
            const double L = 7.0;
            const int panels = 64;
            const double pw = 2.0 * L / panels;
            for (int pnl = 0; pnl < panels; ++pnl) {
                const double mid = -L + (pnl + 0.5) * pw;
                for (int n = 0; n < 32; ++n) {
                    const double u = mid + 0.5 * pw * rule.nodes[n];
                    total += 0.5 * pw * rule.weights[n] *
                             std::exp(-kPi * a * u * u - 2.0 * kPi * kI * z * u);
                }
            }
            worst = std::max(worst, rel_diff(gaussian_integral(a, z), total, 1e-30));
        }
        return worst;
    });

    return suite.take();
}

// ---- annihilators and order reduction --------------------------------------

Results annihilator_suite(const VerifyOptions& opts) {
    Suite suite(opts);
    const FdScheme fd{1e-5, 1e-4, opts.swap_br};
    const QuadratureSpec q{};

    const std::vector<std::pair<std::string, FieldFunction>> fields = {
        {"wave_packet", packet_field(Complex(1.0, 0.0), 0.3)},
        {"plane_wave", plane_field(1.5)},
        {"point_mass", delta_field(0)},
        {"point_mass_derivative", delta_field(1)},
    };

    for (const auto which : {Annihilator::C1, Annihilator::C2, Annihilator::S1, Annihilator::S2}) {
        const char* names[] = {"annihilate_C1", "annihilate_C2", "annihilate_S1", "annihilate_S2"};
        suite.check(names[static_cast<int>(which)], 1e-5, [&, which] {
            auto rng = suite.rng();
            double worst = 0.0;
            for (const auto& [fname, field] : fields) {
                for (int i = 0; i < 20; ++i) {
                    const PhasePoint p = random_point(rng);
                    const OperatorSample s = apply_annihilator_scaled(which, field, p, kH, fd);
                    worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
                }
            }
            return worst;
        });
    }

    suite.check("zero_field_annihilated", 0.0, [&] {
        const FieldFunction zero = [](const PhasePoint&) { return Complex{}; };
        double worst = 0.0;
        auto rng = suite.rng();
        for (const auto which :
             {Annihilator::C1, Annihilator::C2, Annihilator::S1, Annihilator::S2})
            worst = std::max(worst,
                             std::abs(apply_annihilator(which, zero, random_point(rng), kH, fd)));
        return worst;
    });

    suite.check("structural_zero_nonzero_classification", 0.0, [&] {
        // S1 on lift_G(f2) vanishes iff the structural residual of f2 does;
        // tested as a classification on one solution and one non-solution
        auto rng = suite.rng();
        const HoloJet sol = plane_wave_f2(1.0, kH);
        HoloJet nonsol;  // f2 = 1(z,w): constant, structural residual -2 pi i hbar
        nonsol.value = [](Complex, Complex) { return Complex(1.0, 0.0); };
        nonsol.dz = [](Complex, Complex) { return Complex{}; };
        nonsol.dw = [](Complex, Complex) { return Complex{}; };
        nonsol.dzz = [](Complex, Complex) { return Complex{}; };
        int misclassified = 0;
        for (int i = 0; i < 10; ++i) {
            const PhasePoint p = random_point(rng);
            const ComplexChart c = phase_to_complex(p);
            const auto fd_res_sol = apply_annihilator_scaled(Annihilator::S1, lift_G(sol, kH), p,
                                                             kH, fd);
            const auto st_sol = structural_residual_scaled(sol, c.z, c.w, kH);
            const bool fd_zero = std::abs(fd_res_sol.value) < 1e-4 * fd_res_sol.scale;
            const bool st_zero = std::abs(st_sol.value) < 1e-9 * st_sol.scale;
            if (fd_zero != st_zero) ++misclassified;
            const auto fd_res_non =
                apply_annihilator_scaled(Annihilator::S1, lift_G(nonsol, kH), p, kH, fd);
            const auto st_non = structural_residual_scaled(nonsol, c.z, c.w, kH);
            const bool fd_nonzero = std::abs(fd_res_non.value) > 1e-3 * fd_res_non.scale;
            const bool st_nonzero = std::abs(st_non.value) > 1e-3 * st_non.scale;
            if (fd_nonzero != st_nonzero) ++misclassified;
        }
        return static_cast<double>(misclassified);
    });

    suite.check("S2_redundant_with_S1", 1e-5, [&] {
        auto rng = suite.rng();
        const HoloJet jets[] = {plane_wave_f2(1.0, kH),
                                wave_packet_f2(WavePacketSpec{Complex(1.0, 0.0), 0.5}, kH)};
        double worst = 0.0;
        for (const HoloJet& jet : jets) {
            const FieldFunction F = lift_G(jet, kH);
            for (int i = 0; i < 10; ++i) {
                const PhasePoint p = random_point(rng);
                const auto s1 = apply_annihilator_scaled(Annihilator::S1, F, p, kH, fd);
                if (std::abs(s1.value) > 1e-5 * s1.scale) continue;
                const auto s2 = apply_annihilator_scaled(Annihilator::S2, F, p, kH, fd);
                worst = std::max(worst, std::abs(s2.value) / (s2.scale + 1e-300));
            }
        }
        return worst;
    });

    suite.check("intertwine_gaussian", 1e-5, [&] {
        SourceFunction f = gaussian_source();
        SourceFunction fpp{[](double u) {
                               return Complex((-2.0 * kPi + 4.0 * kPi * kPi * u * u) *
                                                  std::exp(-kPi * u * u),
                                              0.0);
                           },
                           DecayBound{50.0, 0.9 * kPi, 0.0}};
        const FieldFunction F = [&](const PhasePoint& p) { return forward_value(f, p, kH, q); };
        double worst = 0.0;
        for (const PhasePoint p : {PhasePoint{0.2, 0.1, 0.0, 1.0},
                                   PhasePoint{0.5, -0.3, 0.4, 1.2},
                                   PhasePoint{-0.3, 0.2, -0.5, 0.9}}) {
            const Complex got = apply_D0(F, p, kH, fd);
            const Complex want = forward_value(fpp, p, kH, q);
            worst = std::max(worst, std::abs(got - want));
        }
        return worst;
    });

    suite.check("intertwine_gaussian_times_u", 1e-5, [&] {
        SourceFunction f{[](double u) { return Complex(u * std::exp(-kPi * u * u), 0.0); },
                         DecayBound{0.85, 0.9 * kPi, 0.0}};
        SourceFunction fpp{[](double u) {
                               return Complex(
                                   (-6.0 * kPi * u + 4.0 * kPi * kPi * u * u * u) *
                                       std::exp(-kPi * u * u),
                                   0.0);
                           },
                           DecayBound{100.0, 0.9 * kPi, 0.0}};
        const FieldFunction F = [&](const PhasePoint& p) { return forward_value(f, p, kH, q); };
        double worst = 0.0;
        for (const PhasePoint p :
             {PhasePoint{0.2, 0.1, 0.0, 1.0}, PhasePoint{0.5, -0.3, 0.4, 1.2}}) {
            const Complex got = apply_D0(F, p, kH, fd);
            const Complex want = forward_value(fpp, p, kH, q);
            worst = std::max(worst, std::abs(got - want));
        }
        return worst;
    });

    suite.check("D0_plane_wave_eigenvalue", 1e-5, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        const FieldFunction F = plane_field(k);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const PhasePoint p = random_point(rng);
            const Complex got = apply_D0(F, p, kH, fd);
            const Complex want = -k * k * F(p);
            worst = std::max(worst, rel_diff(got, want, 1e-30));
        }
        return worst;
    });

    suite.check("D_plane_wave_eigenvalue", 1e-9, [&] {
        auto rng = suite.rng();
        const double k = 2.0;
        const HoloJet jet = plane_wave_f2(k, kH);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const ComplexChart c = random_chart(rng);
            const Complex got = apply_D(jet, c.z, c.w, kH);
            const Complex want = -k * k * jet.value(c.z, c.w);
            worst = std::max(worst, rel_diff(got, want, 1e-30));
        }
        return worst;
    });

    suite.check("D_matches_D0_through_lift", 1e-5, [&] {
        auto rng = suite.rng();
        const HoloJet jet = plane_wave_f2(1.2, kH);
        HoloJet djet;
        djet.value = [jet](Complex z, Complex w) { return apply_D(jet, z, w, kH); };
        const FieldFunction lhs = lift_G(djet, kH);
        const FieldFunction rhs_field = lift_G(jet, kH);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const PhasePoint p = random_point(rng);
            const Complex rhs = apply_D0(rhs_field, p, kH, fd);
            worst = std::max(worst, std::abs(lhs(p) - rhs));
        }
        return worst;
    });

    suite.check("schrodinger_coords_roundtrip", 1e-14, [&] {
        auto rng = suite.rng();
        double worst = 0.0;
        for (int i = 0; i < 30; ++i) {
            const ComplexChart c = random_chart(rng);
            const Complex v = random_disk(rng, 2.0);
            const auto fwd = schrodinger_coords(c.z, c.w, v);
            const auto back = schrodinger_coords_inverse(fwd[0], fwd[1], fwd[2]);
            worst = std::max(worst, std::abs(back[0] - c.z) + std::abs(back[1] - c.w) +
                                        std::abs(back[2] - v));
        }
        return worst;
    });

    return suite.take();
}

// ---- pairing / reproduce / inverse -----------------------------------------

namespace {

Complex l2_inner_1d(const std::function<Complex(double)>& f1,
                    const std::function<Complex(double)>& f2) {
    const GaussLegendreRule& rule = gauss_legendre(32);
    Complex total{};
    const double L = 7.0;
    const int panels = 80;
    const double pw = 2.0 * L / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double mid = -L + (pnl + 0.5) * pw;
        for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
            const double u = mid + 0.5 * pw * rule.nodes[n];
            total += 0.5 * pw * rule.weights[n] * f1(u) * std::conj(f2(u));
        }
    }
    return total;
}

}  // namespace

Results roundtrip_suite(const VerifyOptions& opts) {
    Suite suite(opts);
    const QuadratureSpec q{};
    const ReferenceSheet sheet{0.0, 1.0};
    const GridSpec grid = make_xy_grid(-4.0, 4.0, 257, -4.0, 4.0, 257);

    suite.check("sesqui_unitarity_gaussian_pairs", 1e-4, [&] {
        const auto shifted = [](double y0) {
            return SourceFunction{[y0](double u) {
                                      return Complex(std::exp(-kPi * (u - y0) * (u - y0)), 0.0);
                                  },
                                  DecayBound{1.0, kPi, y0}};
        };
        // wide-sigma packets have a wide x footprint; the pairing grid must
        // reach the 1e-8 boundary-decay bar for every source here
        const GridSpec pg = make_xy_grid(-5.0, 5.0, 321, -5.0, 5.0, 321);
        const std::vector<SourceFunction> sources = {
            gaussian_source(),                      // 0
            shifted(1.0),                           // 1
            packet_source(Complex(2.0, 0.0), 0.0),  // 2
            packet_source(Complex(1.0, 0.0), 0.5),  // 3
            packet_source(Complex(1.0, 0.0), -0.3), // 4
            shifted(-0.5),                          // 5
            packet_source(Complex(1.5, 0.3), 0.2),  // 6
        };
        std::vector<SampledField> fields;
        fields.reserve(sources.size());
        for (const SourceFunction& s : sources)
            fields.push_back(forward_grid(s, pg, sheet, kH, q));
        const std::pair<int, int> idx_pairs[] = {{0, 0}, {0, 1}, {2, 0}, {3, 4}, {5, 6}};
        double worst = 0.0;
        for (const auto& [ia, ib] : idx_pairs) {
            const Complex got = pairing(fields[ia], fields[ib], sheet, kH);
            const Complex want = l2_inner_1d(sources[ia].f, sources[ib].f);
            worst = std::max(worst, std::abs(got - want));
        }
        return worst;
    });

    suite.check("pairing_zero_field", 0.0, [&] {
        const SampledField F = forward_grid(gaussian_source(), grid, sheet, kH, q);
        SampledField zero = F;
        for (Complex& v : zero.values) v = Complex{};
        return std::abs(pairing(F, zero, sheet, kH));
    });

    suite.check("reproduce_same_sheet", 1e-4, [&] {
        const SampledField F = forward_grid(gaussian_source(), grid, sheet, kH, q);
        const PhasePoint p{0.0, 0.0, 0.0, 1.0};
        const Complex got = reproduce(F, p, sheet, kH);
        return std::abs(got - Complex(1.0 / std::sqrt(2.0), 0.0));
    });

    suite.check("reproduce_cross_sheet", 1e-3, [&] {
        // the r=2 target widens the sheet kernel, so restoration needs a
        // larger slice for the boundary-decay bar
        const GridSpec wide = make_xy_grid(-7.0, 7.0, 449, -7.0, 7.0, 449);
        const SampledField F = forward_grid(gaussian_source(), wide, sheet, kH, q);
        const WavePacketSpec spec{Complex(1.0, 0.0), 0.0};
        double worst = 0.0;
        for (const auto& [b, r] : std::vector<std::pair<double, double>>{{1.0, 2.0},
                                                                         {-1.0, 0.5}}) {
            for (const auto& [x, y] :
                 std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.5, -0.3}, {-0.4, 0.2}}) {
                const PhasePoint p{x, y, b, r};
                const Complex got = reproduce(F, p, sheet, kH);
                const Complex want = wave_packet_metamorphism(spec, p, kH);
                worst = std::max(worst, std::abs(got - want));
            }
        }
        return worst;
    });

    suite.check("inverse_roundtrip_three_sources", 1e-4, [&] {
        struct Case {
            SourceFunction f;
            double fmax;
        };
        SourceSpec poly;
        poly.type = SourceSpec::Type::GaussianPoly;
        poly.poly = {0.5, -0.3, 0.8};
        std::vector<Case> cases;
        cases.push_back({gaussian_source(), 1.0});
        {
            SourceFunction fp = make_source(poly);
            double fmax = 0.0;
            for (int i = 0; i <= 400; ++i) {
                const double u = -4.0 + i * 0.02;
                fmax = std::max(fmax, std::abs(fp.f(u)));
            }
            cases.push_back({fp, fmax});
        }
        cases.push_back({packet_source(Complex(1.0, 0.2), 0.5), 1.0});
        double worst = 0.0;
        for (const Case& c : cases) {
            const SampledField F = forward_grid(c.f, grid, sheet, kH, q);
            for (int i = 0; i <= 10; ++i) {
                const double u = -2.0 + 0.4 * i;
                const Complex got = inverse(F, u, kH, q);
                worst = std::max(worst, std::abs(got - c.f.f(u)) / c.fmax);
            }
        }
        return worst;
    });

    suite.check("inverse_calibration_stable", 1e-3, [&] {
        const double c_ref = inverse_calibration(kH, sheet, q);
        double worst = 0.0;
        // refit the constant on other functions; it must not move
        SourceSpec poly;
        poly.type = SourceSpec::Type::GaussianPoly;
        poly.poly = {1.0, 0.0, 0.4};
        for (const SourceFunction& f : {packet_source(Complex(0.7, 0.0), 0.2),
                                        make_source(poly)}) {
            const SampledField F = forward_grid(f, grid, sheet, kH, q);
            const Complex got = inverse(F, 0.3, kH, q);
            const Complex want = f.f(0.3);
            // implied constant ratio
            const double implied = c_ref * std::abs(want / got);
            worst = std::max(worst, std::abs(implied - c_ref) / c_ref);
        }
        return worst;
    });

    suite.check("inverse_bounded_source_wide_grid", 1e-3, [&] {
        const double k = 1.0;
        SourceFunction f{[k](double u) { return std::exp(Complex(0.0, -k * u)); },
                         DecayBound{1.0, 0.0, 0.0}};
        const GridSpec wide = make_xy_grid(-6.0, 6.0, 301, -6.0, 6.0, 301);
        const SampledField F = forward_grid(f, wide, sheet, kH, q);
        const Complex got = inverse(F, 1.0, kH, q);
        return std::abs(got - std::exp(Complex(0.0, -1.0)));
    });

    suite.check("quadrature_convergence_doubling", 0.5, [&] {
        // (a) the production engine: node doubling must gain >= 100x until the
        // 1e-12 floor (its panel rule already sits at the floor from n=2);
        // (b) a fixed-panel probe of the same Gauss-Legendre rule must show
        // the genuine >= 100x gain per doubling. Returns the defect count.
        const WavePacketSpec spec{Complex(1.0, 0.0), 0.0};
        const SourceFunction f = packet_source(spec.sigma, spec.lambda);
        const PhasePoint p{0.8, 0.3, 0.5, 1.0};
        const Complex want = wave_packet_metamorphism(spec, p, kH);
        double defects = 0.0;
        double prev_err = -1.0;
        for (int nodes : {2, 4, 8, 16}) {
            QuadratureSpec qq = q;
            qq.nodes_per_panel = nodes;
            qq.truncation_eps = 1e-14;
            const double err = std::abs(forward_value(f, p, kH, qq) - want) / std::abs(want);
            if (prev_err > 1e-12 && !(err <= prev_err / 100.0 || err <= 1e-12)) defects += 1.0;
            prev_err = err;
        }
        // fixed 4-panel probe: integral of e^{-pi u^2 - 3 pi i u} over [-4, 4]
        const Complex probe_want = gaussian_integral(Complex(1.0, 0.0), Complex(1.5, 0.0));
        prev_err = -1.0;
        for (int nodes : {4, 8, 16, 32}) {
            const GaussLegendreRule& rule = gauss_legendre(nodes);
            Complex total{};
            const int panels = 4;
            const double pw = 8.0 / panels;
            for (int pnl = 0; pnl < panels; ++pnl) {
                const double mid = -4.0 + (pnl + 0.5) * pw;
                for (int n = 0; n < nodes; ++n) {
                    const double u = mid + 0.5 * pw * rule.nodes[n];
                    total += 0.5 * pw * rule.weights[n] *
                             std::exp(Complex(-kPi * u * u, -3.0 * kPi * u));
                }
            }
            const double err = std::abs(total - probe_want) / std::abs(probe_want);
            if (prev_err > 1e-12 && !(err <= prev_err / 100.0 || err <= 1e-12)) defects += 1.0;
            prev_err = err;
        }
        return defects;
    });

    return suite.take();
}

// ---- helmholtz --------------------------------------------------------------

Results helmholtz_suite(const VerifyOptions& opts) {
    Suite suite(opts);

    suite.check("transmuted_plane_wave", 1e-9, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        const double k1 = 0.6 * k, k2 = 0.8 * k;
        const HoloJetN f4 = plane_wave_f4(k1, k2, kH);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const MultiChart mc = random_chart_n(rng, 2);
            const OperatorSample s = transmuted_residual_2d_scaled(f4, mc, k, kH);
            worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
        }
        return worst;
    });

    suite.check_at_least("transmuted_plane_wave_violated", 1e-2, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        const double k1 = 0.6 * k;
        const double k2 = std::sqrt(k * k + 1.0 - k1 * k1);  // k1^2+k2^2 = k^2 + 1
        const HoloJetN f4 = plane_wave_f4(k1, k2, kH);
        double smallest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 20; ++i) {
            // probe near the canonical chart, where the defect dominates
            MultiChart mc;
            for (int d = 0; d < 2; ++d) {
                const PhasePoint p{uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1),
                                   uniform(rng, -0.1, 0.1), uniform(rng, 0.95, 1.05)};
                mc.dims.push_back(phase_to_complex(p));
            }
            const OperatorSample s = transmuted_residual_2d_scaled(f4, mc, k, kH);
            smallest = std::min(smallest, std::abs(s.value) / (s.scale + 1e-300));
        }
        return smallest;
    });

    suite.check("transmuted_generic_lift", 1e-8, [&] {
        auto rng = suite.rng();
        const double k = 2.0;
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const F3Jet f3 = exp_f3(random_disk(rng, 0.6), random_disk(rng, 0.6),
                                    random_disk(rng, 0.6));
            const HoloJetN f4 = lift_f3_to_f4(f3, k, kH);
            const MultiChart mc = random_chart_n(rng, 2);
            const OperatorSample s = transmuted_residual_2d_scaled(f4, mc, k, kH);
            worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
        }
        return worst;
    });

    suite.check("full_metamorphism_two_routes", 1e-10, [&] {
        auto rng = suite.rng();
        const double k = 1.8;
        const F3Jet f3 = exp_f3(Complex(0.2, -0.3), Complex(-0.4, 0.1), Complex(0.3, 0.2));
        const FieldFunction2 direct = full_metamorphism_2d(f3, k, kH);
        const FieldFunction2 tensor = tensor_lift_2d(lift_f3_to_f4(f3, k, kH), kH);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const PhasePoint p1 = random_point(rng);
            const PhasePoint p2 = random_point(rng);
            worst = std::max(worst, rel_diff(direct(p1, p2), tensor(p1, p2), 1e-30));
        }
        return worst;
    });

    suite.check("plane_wave_pipeline", 1e-9, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        const double k1 = 0.6 * k, k2 = 0.8 * k;
        const FieldFunction2 route = full_metamorphism_2d(plane_wave_f3(k1, k2, kH.value), k, kH);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const PhasePoint p1 = random_point(rng);
            const PhasePoint p2 = random_point(rng);
            const Complex want = plane_wave_metamorphism(PlaneWaveSpec{k1}, p1, kH) *
                                 plane_wave_metamorphism(PlaneWaveSpec{k2}, p2, kH);
            worst = std::max(worst, rel_diff(route(p1, p2), want, 1e-30));
        }
        return worst;
    });

    suite.check("structural_2d_plane_wave", 1e-9, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        const F3Jet f3 = plane_wave_f3(0.6 * k, 0.8 * k, kH.value);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Complex t = random_disk(rng, 0.5);
            const Complex s1 = random_disk(rng, 1.0);
            const Complex s2 = random_disk(rng, 1.0);
            const auto res = structural_residuals_2d_scaled(f3, t, s1, s2, k, kH);
            for (const OperatorSample& s : res)
                worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
        }
        return worst;
    });

    suite.check("structural_2d_constant_values", 1e-14, [&] {
        const double k = 1.7;
        F3Jet one;
        one.value = [](Complex, Complex, Complex) { return Complex(1.0, 0.0); };
        one.dt = one.ds1 = one.ds2 = one.ds1s1 = one.ds2s2 =
            [](Complex, Complex, Complex) { return Complex{}; };
        const auto res = structural_residuals_2d(one, Complex(0.1, 0.1), Complex(0.2, 0.0),
                                                 Complex(-0.1, 0.2), k, kH);
        const double k2 = k * k;
        double worst = std::abs(res[0] - Complex(-0.5 * k2, 0.0));
        worst = std::max(worst, std::abs(res[1] - Complex(0.5 * k2, 0.0)));
        worst = std::max(worst, std::abs(res[2] - Complex(k2, 0.0)));
        return worst / k2;
    });

    suite.check("structural_2d_difference_identity", 1e-13, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const F3Jet f3 = exp_f3(random_disk(rng, 0.7), random_disk(rng, 0.7),
                                    random_disk(rng, 0.7));
            const Complex t = random_disk(rng, 0.5);
            const Complex s1 = random_disk(rng, 1.0);
            const Complex s2 = random_disk(rng, 1.0);
            const auto res = structural_residuals_2d_scaled(f3, t, s1, s2, k, kH);
            const double scale = res[2].scale + 1e-300;
            worst = std::max(worst,
                             std::abs(res[2].value - (res[1].value - res[0].value)) / scale);
        }
        return worst;
    });

    suite.check("opposite_time_flow", 1e-13, [&] {
        // on f3 = e^t the second-derivative terms vanish, so the sum isolates
        // the shared t-frequency and the difference isolates the opposed
        // half-k^2 pairings
        const double k = 1.3;
        const F3Jet f3 = exp_f3(Complex(1.0, 0.0), Complex{}, Complex{});
        const Complex t(0.2, 0.1);
        const auto res = structural_residuals_2d(f3, t, Complex{}, Complex{}, k, kH);
        const Complex v = cexp_guarded(t);
        const Complex sum_want = 8.0 * kPi * kI * v;
        const Complex diff_want = k * k * v;
        double worst = std::abs(res[0] + res[1] - sum_want) / std::abs(sum_want);
        worst = std::max(worst, std::abs(res[1] - res[0] - diff_want) / std::abs(diff_want));
        return worst;
    });

    suite.check("beam_f3_degenerate_values", 1e-8, [&] {
        // a=0 at the origin integrates the constant 1; a=1, k=2 matches the
        // error-function oracle
        BeamSpec flat;
        flat.k = 2.0;
        flat.a = 0.0;
        const Complex v1 = gaussian_beam_f3(flat, Complex{}, Complex{}, Complex{}, kH);
        double worst = std::abs(v1 - Complex(4.0, 0.0)) / 4.0;
        BeamSpec ap;
        ap.k = 2.0;
        ap.a = 1.0;
        const Complex v2 = gaussian_beam_f3(ap, Complex{}, Complex{}, Complex{}, kH);
        const double want = std::sqrt(kPi) * std::erf(2.0);
        worst = std::max(worst, std::abs(v2 - Complex(want, 0.0)) / want);
        return worst;
    });

    suite.check("beam_f3_brute_force_oracle", 1e-6, [&] {
        BeamSpec spec;
        spec.k = 2.0;
        spec.a = 0.5;
        const Complex t(0.0, 0.1), s1(0.2, 0.0), s2(0.3, 0.0);
        const Complex got = gaussian_beam_f3(spec, t, s1, s2, kH);
        // brute-force rule with 10x the nodes
        const int n = 5120;
        const GaussLegendreRule& rule = gauss_legendre(n);
        Complex total{};
        for (int j = 0; j < n; ++j) {
            const double k1 = spec.k * rule.nodes[j];
            const double kap = std::sqrt(std::max(spec.k * spec.k - k1 * k1, 0.0));
            const Complex e = (2.0 * k1 * k1 - spec.k * spec.k) / (8.0 * kPi * kI) * t -
                              kI * k1 * s1 - kI * kap * s2;
            total += spec.k * rule.weights[j] * std::exp(-spec.a * k1 * k1) * std::exp(e);
        }
        return std::abs(got - total) / std::abs(total);
    });

    suite.check("beam_f3_structural", 1e-8, [&] {
        auto rng = suite.rng();
        BeamSpec spec;
        spec.k = 2.0;
        spec.a = 0.5;
        const F3Jet jet = gaussian_beam_f3_jet(spec, kH);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const Complex t = random_disk(rng, 0.2);
            const Complex s1 = random_disk(rng, 0.5);
            const Complex s2 = random_disk(rng, 0.5);
            const auto res = structural_residuals_2d_scaled(jet, t, s1, s2, spec.k, kH);
            for (const OperatorSample& s : res)
                worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
        }
        return worst;
    });

    suite.check("beam_field_residual_wide_and_narrow", 1e-3, [&] {
        double worst = 0.0;
        for (double a : {0.5, 8.0}) {
            BeamSpec spec;
            spec.k = 2.0 * kPi;
            spec.a = a;
            GridSpec grid;
            grid.axes = {Axis{"u1", -1.8, 1.8, 241}, Axis{"u2", 0.0, 3.6, 241}};
            const SampledField F = reconstruct_physical_field(spec, grid);
            const SampledField res = helmholtz_residual(F, spec.k);
            const double metric = max_interior_abs(res) /
                                  (spec.k * spec.k * max_abs_field(F));
            worst = std::max(worst, metric);
        }
        return worst;
    });

    suite.check("beam_field_origin_value", 1e-8, [&] {
        BeamSpec spec;
        spec.k = 2.0;
        spec.a = 1.0;
        const Complex got = physical_beam_value(spec, 0.0, 0.0);
        const double want = std::sqrt(kPi) * std::erf(2.0);
        return std::abs(got - Complex(want, 0.0)) / want;
    });

    suite.check("beam_zero_amplitude", 0.0, [&] {
        BeamSpec spec;
        spec.k = 2.0;
        spec.a = 1.0;
        spec.amplitude = 0.0;
        GridSpec grid;
        grid.axes = {Axis{"u1", -1.0, 1.0, 5}, Axis{"u2", 0.0, 1.0, 5}};
        const SampledField F = reconstruct_physical_field(spec, grid);
        return max_abs_field(F);
    });

    suite.check("helmholtz_residual_constant_field", 1e-12, [&] {
        const double k = 1.4;
        SampledField F;
        F.grid.axes = {Axis{"u1", 0.0, 1.0, 7}, Axis{"u2", 0.0, 1.0, 7}};
        F.values.assign(49, Complex(2.0, -1.0));
        const SampledField res = helmholtz_residual(F, k);
        double worst = 0.0;
        for (const Complex& v : res.values)
            if (std::isfinite(v.real()))
                worst = std::max(worst, std::abs(v - k * k * Complex(2.0, -1.0)));
        return worst / (k * k);
    });

    suite.check("helmholtz_residual_second_order", 4.5 - 4.0, [&] {
        // returns |ratio - 4| for the h -> h/2 refinement of a sampled exact
        // plane wave; pass iff within [3.5, 4.5]
        const double k = 2.0;
        const double k1 = 0.6 * k, k2 = 0.8 * k;
        const auto sample = [&](int n) {
            SampledField F;
            F.grid.axes = {Axis{"u1", 0.0, 1.0, n}, Axis{"u2", 0.0, 1.0, n}};
            F.values.resize(F.grid.node_count());
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    F.at(i, j) = std::exp(Complex(0.0, -(k1 * F.grid.coordinate(0, i) +
                                                         k2 * F.grid.coordinate(1, j))));
            return max_interior_abs(helmholtz_residual(F, k));
        };
        const double coarse = sample(41);
        const double fine = sample(81);
        return std::abs(coarse / fine - 4.0);
    });

    suite.check("transmuted_3d_plane_wave", 1e-9, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        const double k1 = 0.48 * k, k2 = 0.6 * k, k3 = 0.64 * k;  // squares sum to 1
        const HoloJet a = plane_wave_f2(k1, kH);
        const HoloJet b = plane_wave_f2(k2, kH);
        const HoloJet c = plane_wave_f2(k3, kH);
        HoloJetN f6;
        f6.n = 3;
        f6.value = [=](const MultiChart& mc) {
            return a.value(mc.dims[0].z, mc.dims[0].w) * b.value(mc.dims[1].z, mc.dims[1].w) *
                   c.value(mc.dims[2].z, mc.dims[2].w);
        };
        const auto mk = [&](int which, bool second) {
            return [=](const MultiChart& mc) {
                const HoloJet* js[3] = {&a, &b, &c};
                Complex prod(1.0, 0.0);
                for (int j = 0; j < 3; ++j) {
                    const Complex z = mc.dims[j].z, w = mc.dims[j].w;
                    if (j == which) prod *= second ? js[j]->dzz(z, w) : js[j]->dz(z, w);
                    else prod *= js[j]->value(z, w);
                }
                return prod;
            };
        };
        const auto mkw = [&](int which) {
            return [=](const MultiChart& mc) {
                const HoloJet* js[3] = {&a, &b, &c};
                Complex prod(1.0, 0.0);
                for (int j = 0; j < 3; ++j) {
                    const Complex z = mc.dims[j].z, w = mc.dims[j].w;
                    prod *= (j == which) ? js[j]->dw(z, w) : js[j]->value(z, w);
                }
                return prod;
            };
        };
        for (int j = 0; j < 3; ++j) {
            f6.dz.push_back(mk(j, false));
            f6.dzz.push_back(mk(j, true));
            f6.dw.push_back(mkw(j));
        }
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const MultiChart mc = random_chart_n(rng, 3);
            const OperatorSample s = transmuted_residual_3d_scaled(f6, mc, k, kH);
            worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
        }
        return worst;
    });

    suite.check("lift_f5_generic_solution", 1e-8, [&] {
        auto rng = suite.rng();
        const double k = 1.6;
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            Poly5 poly;
            for (int t = 0; t < 6; ++t) {
                Poly5::Term term;
                term.coef = random_disk(rng, 0.8);
                term.pow = {0, 0, 0, 0, 0};
                int budget = 2;
                for (int v = 0; v < 5 && budget > 0; ++v) {
                    const int p = static_cast<int>(uniform(rng, 0.0, 1.99));
                    term.pow[v] = std::min(p, budget);
                    budget -= term.pow[v];
                }
                poly.terms.push_back(term);
            }
            const HoloJetN f6 = lift_f5_to_f6(poly5_jet(poly), k, kH);
            for (int i = 0; i < 4; ++i) {
                const MultiChart mc = random_chart_n(rng, 3);
                const OperatorSample s = transmuted_residual_3d_scaled(f6, mc, k, kH);
                worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
            }
        }
        return worst;
    });

    suite.check("lift_f5_constant_value", 1e-12, [&] {
        // f5 = 1 at w_j = i: prefactor e^{-k^2/(4 pi hbar)} / sqrt(i)^3
        const double k = 1.2;
        Poly5 one;
        one.terms.push_back({Complex(1.0, 0.0), {0, 0, 0, 0, 0}});
        const HoloJetN f6 = lift_f5_to_f6(poly5_jet(one), k, kH);
        MultiChart mc;
        for (int j = 0; j < 3; ++j) mc.dims.push_back(ComplexChart{Complex{}, kI});
        const Complex si = principal_sqrt(kI);
        const Complex want = std::exp(-k * k / (4.0 * kPi)) / (si * si * si);
        return rel_diff(f6.value(mc), want, 1e-30);
    });

    suite.check("structural_3d_constant_values", 1e-14, [&] {
        const double k = 1.9;
        Poly5 one;
        one.terms.push_back({Complex(1.0, 0.0), {0, 0, 0, 0, 0}});
        const F5Jet jet = poly5_jet(one);
        const F5Jet::Args args = {Complex(0.1, 0.0), Complex(0.0, 0.1), Complex(0.2, 0.1),
                                  Complex(-0.1, 0.0), Complex(0.0, -0.2)};
        const auto res = structural_residuals_3d(jet, args, k, kH);
        const double third = k * k / 3.0;
        double worst = std::abs(res[0] - Complex(third, 0.0));
        worst = std::max(worst, std::abs(res[1] - Complex(third, 0.0)));
        worst = std::max(worst, std::abs(res[2] - Complex(-third, 0.0)));
        return worst / third;
    });

    suite.check("structural_3d_plane_wave", 1e-9, [&] {
        auto rng = suite.rng();
        const double k = 1.5;
        const double k1 = 0.48 * k, k2 = 0.6 * k, k3 = 0.64 * k;
        std::array<Complex, 5> c;
        c[0] = (k1 * k1 - k * k / 3.0) / (4.0 * kPi * kI);
        c[1] = (k2 * k2 - k * k / 3.0) / (4.0 * kPi * kI);
        c[2] = -kI * k1;
        c[3] = -kI * k2;
        c[4] = -kI * k3;
        const F5Jet jet = exp_f5(c);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            F5Jet::Args args;
            for (auto& a : args) a = random_disk(rng, 0.6);
            const auto res = structural_residuals_3d_scaled(jet, args, k, kH);
            for (const OperatorSample& s : res)
                worst = std::max(worst, std::abs(s.value) / (s.scale + 1e-300));
        }
        return worst;
    });

    suite.check("beam_cross_check_numeric_transform", 1e-3, [&] {
        auto rng = suite.rng();
        BeamSpec spec;
        spec.k = 2.0 * kPi;
        spec.a = 0.5;
        const F3Jet jet = gaussian_beam_f3_jet(spec, kH);
        const FieldFunction2 image_route = full_metamorphism_2d(jet, spec.k, kH);
        QuadratureSpec qq;
        qq.truncation_eps = 1e-10;

        // the numeric route: tensor-structure reassociation of the double
        // quadrature sum over the plane-wave superposition
        const int bn = 1024;
        const GaussLegendreRule& rule = gauss_legendre(bn);
        std::vector<double> k1v(bn), kapv(bn), dens(bn);
        for (int j = 0; j < bn; ++j) {
            k1v[j] = spec.k * rule.nodes[j];
            kapv[j] = std::sqrt(std::max(spec.k * spec.k - k1v[j] * k1v[j], 0.0));
            dens[j] = spec.k * rule.weights[j] * std::exp(-spec.a * k1v[j] * k1v[j]);
        }
        const auto axis_transforms = [&](const PhasePoint& p, const std::vector<double>& kvals,
                                         int sign_flip) {
            // I_j = sum_i w_i K(u_i; p) e^{-i k_j u_i} for every j
            const auto plan = detail::forward_plan(DecayBound{1.0, 0.0, 0.0}, p, kH.value, qq);
            const std::size_t n = plan.nodes.size();
            std::vector<double> wre(n), wim(n), ere(n), eim(n);
            const double beta = kPi * kH.value * p.r * p.r;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = plan.nodes[i] - p.y;
                const Complex kern =
                    cexp_guarded(Complex(-beta * v * v,
                                         kPi * kH.value * p.b * v * v -
                                             2.0 * kPi * kH.value * p.x * v));
                const Complex wt = plan.weights[i] * kern;
                wre[i] = wt.real();
                wim[i] = wt.imag();
            }
            std::vector<Complex> out(kvals.size());
            std::vector<double> ph(n);
            for (std::size_t j = 0; j < kvals.size(); ++j) {
                const double kj = sign_flip * kvals[j];
                for (std::size_t i = 0; i < n; ++i) ph[i] = -kj * plan.nodes[i];
                out[j] = simd::weighted_phase_sum(wre, wim, ph);
            }
            return out;
        };
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const PhasePoint p1{uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6),
                                uniform(rng, -0.4, 0.4), uniform(rng, 0.9, 1.3)};
            const PhasePoint p2{uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6),
                                uniform(rng, -0.4, 0.4), uniform(rng, 0.9, 1.3)};
            const auto I1 = axis_transforms(p1, k1v, 1);
            const auto I2 = axis_transforms(p2, kapv, -spec.sign);
            Complex numeric{};
            for (int j = 0; j < bn; ++j) numeric += dens[j] * I1[j] * I2[j];
            numeric *= std::sqrt(kH.value * p1.r) * std::sqrt(kH.value * p2.r);
            // chart-route differs by the exact per-dimension root constant i
            const Complex image = kI * image_route(p1, p2);
            worst = std::max(worst, rel_diff(numeric, image, 1e-30));
        }
        return worst;
    });

    return suite.take();
}

Results run_suite(const std::string& suite, const VerifyOptions& opts) {
    if (suite == "closed-forms") return closed_forms_suite(opts);
    if (suite == "annihilators") return annihilator_suite(opts);
    if (suite == "roundtrip") return roundtrip_suite(opts);
    if (suite == "helmholtz") return helmholtz_suite(opts);
    if (suite == "all") {
        Results all;
        for (const char* name : {"closed-forms", "annihilators", "roundtrip", "helmholtz"}) {
            Results part = run_suite(name, opts);
            all.insert(all.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
        }
        return all;
    }
    throw std::invalid_argument("unknown verify suite '" + suite + "'");
}

bool all_pass(const Results& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

}  // namespace metamorph::verify
