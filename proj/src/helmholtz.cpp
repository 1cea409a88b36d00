#include "metamorph/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metamorph/closed_forms.hpp"
#include "metamorph/parallel.hpp"
#include "metamorph/quadrature.hpp"
#include "metamorph/simd/kernels.hpp"

namespace metamorph {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_dims(const HoloJetN& jet, const MultiChart& mc, int n) {
    if (jet.n != n || static_cast<int>(mc.dims.size()) != n)
        throw std::invalid_argument("chart/jet dimension mismatch");
    for (const ComplexChart& c : mc.dims)
        if (!(c.w.imag() > 0.0)) throw std::invalid_argument("chart requires Im(w) > 0");
}

OperatorSample euler_sum(const HoloJetN& jet, const MultiChart& mc, double k, double hb) {
    const Complex v = jet.value(mc);
    Complex total{};
    double scale = std::abs(v);
    Complex wsum{};
    for (int j = 0; j < jet.n; ++j) {
        const Complex z = mc.dims[j].z;
        const Complex w = mc.dims[j].w;
        const Complex ez = 2.0 * w * z * jet.dz[j](mc);
        const Complex ew = 2.0 * w * w * jet.dw[j](mc);
        total += ez + ew;
        scale += std::abs(ez) + std::abs(ew);
        wsum += w;
    }
    const Complex zo = (wsum + k * k / (2.0 * kPi * kI * hb)) * v;
    total += zo;
    scale += std::abs(zo);
    return {total, scale};
}

struct BeamTables {
    std::vector<double> k1, kappa, dens;  // dens = amplitude * e^{-a k1^2} * gl weight
    double weight_l1 = 0.0;
};

BeamTables beam_tables(const BeamSpec& spec, int nodes) {
    const GaussLegendreRule& rule = gauss_legendre(nodes);
    BeamTables t;
    t.k1.resize(nodes);
    t.kappa.resize(nodes);
    t.dens.resize(nodes);
    for (int j = 0; j < nodes; ++j) {
        const double k1 = spec.k * rule.nodes[j];
        t.k1[j] = k1;
        t.kappa[j] = std::sqrt(std::max(spec.k * spec.k - k1 * k1, 0.0));
        t.dens[j] = spec.amplitude * std::exp(-spec.a * k1 * k1) * spec.k * rule.weights[j];
        t.weight_l1 += std::abs(t.dens[j]);
    }
    return t;
}

// Adaptive beam integral with a per-node complex exponent supplied by expo.
template <typename Expo>
Complex beam_adaptive(const BeamSpec& spec, const Expo& expo) {
    int nodes = std::max(spec.nodes, 8);
    Complex prev{};
    bool have_prev = false;
    for (; nodes <= (1 << 16); nodes *= 2) {
        const BeamTables t = beam_tables(spec, nodes);
        std::vector<double> wre(nodes), wim(nodes), ere(nodes), eim(nodes);
        for (int j = 0; j < nodes; ++j) {
            const auto [weight, e] = expo(t.k1[j], t.kappa[j]);
            const Complex wc = t.dens[j] * weight;
            wre[j] = wc.real();
            wim[j] = wc.imag();
            ere[j] = e.real();
            eim[j] = e.imag();
        }
        const Complex val = simd::weighted_cexp_sum(wre, wim, ere, eim);
        if (have_prev) {
            const double tol = 1e-8 * std::max(std::abs(val), 1e-12 * t.weight_l1);
            if (std::abs(val - prev) <= tol) return val;
        }
        prev = val;
        have_prev = true;
    }
    throw QuadratureError("beam quadrature did not converge under node doubling");
}

}  // namespace

void validate(const BeamSpec& spec) {
    if (!(spec.k > 0.0)) throw std::invalid_argument("beam requires k > 0");
    if (!(spec.a >= 0.0)) throw std::invalid_argument("beam requires a >= 0");
    if (spec.sign != -1 && spec.sign != 1)
        throw std::invalid_argument("beam branch sign must be -1 or +1");
    if (spec.nodes < 2) throw std::invalid_argument("beam needs at least 2 nodes");
    if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude))
        throw std::invalid_argument("beam amplitude must be finite and >= 0");
}

OperatorSample transmuted_residual_2d_scaled(const HoloJetN& f4, const MultiChart& mc, double k,
                                             Hbar h) {
    validate(h);
    require_dims(f4, mc, 2);
    return euler_sum(f4, mc, k, h.value);
}

Complex transmuted_residual_2d(const HoloJetN& f4, const MultiChart& mc, double k, Hbar h) {
    return transmuted_residual_2d_scaled(f4, mc, k, h).value;
}

OperatorSample transmuted_residual_3d_scaled(const HoloJetN& f6, const MultiChart& mc, double k,
                                             Hbar h) {
    validate(h);
    require_dims(f6, mc, 3);
    return euler_sum(f6, mc, k, h.value);
}

Complex transmuted_residual_3d(const HoloJetN& f6, const MultiChart& mc, double k, Hbar h) {
    return transmuted_residual_3d_scaled(f6, mc, k, h).value;
}

HoloJetN lift_f3_to_f4(const F3Jet& f3, double k, Hbar h) {
    validate(h);
    const double hb = h.value;
    const double k2 = k * k;
    const auto pref = [k2, hb](Complex w1, Complex w2) {
        const Complex expo = k2 * (1.0 / w1 + 1.0 / w2) / (8.0 * kPi * kI * hb);
        return cexp_guarded(expo) / (principal_sqrt(w1) * principal_sqrt(w2));
    };
    const auto args = [](const MultiChart& mc) {
        const Complex w1 = mc.dims[0].w, w2 = mc.dims[1].w;
        return std::array<Complex, 3>{1.0 / w1 - 1.0 / w2, mc.dims[0].z / w1, mc.dims[1].z / w2};
    };
    HoloJetN jet;
    jet.n = 2;
    jet.value = [f3, pref, args](const MultiChart& mc) {
        const auto a = args(mc);
        return pref(mc.dims[0].w, mc.dims[1].w) * f3.value(a[0], a[1], a[2]);
    };
    jet.dz = {[f3, pref, args](const MultiChart& mc) {
                  const auto a = args(mc);
                  return pref(mc.dims[0].w, mc.dims[1].w) * f3.ds1(a[0], a[1], a[2]) /
                         mc.dims[0].w;
              },
              [f3, pref, args](const MultiChart& mc) {
                  const auto a = args(mc);
                  return pref(mc.dims[0].w, mc.dims[1].w) * f3.ds2(a[0], a[1], a[2]) /
                         mc.dims[1].w;
              }};
    jet.dzz = {[f3, pref, args](const MultiChart& mc) {
                   const auto a = args(mc);
                   const Complex w1 = mc.dims[0].w;
                   return pref(w1, mc.dims[1].w) * f3.ds1s1(a[0], a[1], a[2]) / (w1 * w1);
               },
               [f3, pref, args](const MultiChart& mc) {
                   const auto a = args(mc);
                   const Complex w2 = mc.dims[1].w;
                   return pref(mc.dims[0].w, w2) * f3.ds2s2(a[0], a[1], a[2]) / (w2 * w2);
               }};
    jet.dw = {[f3, pref, args, k2, hb](const MultiChart& mc) {
                  const auto a = args(mc);
                  const Complex w1 = mc.dims[0].w;
                  const Complex P = pref(w1, mc.dims[1].w);
                  const Complex dpref =
                      -k2 / (8.0 * kPi * kI * hb * w1 * w1) - 0.5 / w1;  // d log(pref)/d w1
                  const Complex v = f3.value(a[0], a[1], a[2]);
                  const Complex chain = -f3.dt(a[0], a[1], a[2]) / (w1 * w1) -
                                        f3.ds1(a[0], a[1], a[2]) * mc.dims[0].z / (w1 * w1);
                  return P * (dpref * v + chain);
              },
              [f3, pref, args, k2, hb](const MultiChart& mc) {
                  const auto a = args(mc);
                  const Complex w2 = mc.dims[1].w;
                  const Complex P = pref(mc.dims[0].w, w2);
                  const Complex dpref = -k2 / (8.0 * kPi * kI * hb * w2 * w2) - 0.5 / w2;
                  const Complex v = f3.value(a[0], a[1], a[2]);
                  const Complex chain = f3.dt(a[0], a[1], a[2]) / (w2 * w2) -
                                        f3.ds2(a[0], a[1], a[2]) * mc.dims[1].z / (w2 * w2);
                  return P * (dpref * v + chain);
              }};
    return jet;
}

FieldFunction2 full_metamorphism_2d(const F3Jet& f3, double k, Hbar h) {
    validate(h);
    const double hb = h.value;
    const double kbar = k / (2.0 * kPi);
    const double shift = kbar * kbar / (2.0 * hb * hb);
    return [f3, hb, shift](const PhasePoint& p1, const PhasePoint& p2) -> Complex {
        const ComplexChart c1 = phase_to_complex(p1);
        const ComplexChart c2 = phase_to_complex(p2);
        const Complex expo = -kPi * kI * hb *
                             ((p1.x * p1.x + shift) / c1.w + (p2.x * p2.x + shift) / c2.w);
        const Complex t = 1.0 / c1.w - 1.0 / c2.w;
        return std::sqrt(p1.r) * std::sqrt(p2.r) /
               (principal_sqrt(c1.w) * principal_sqrt(c2.w)) * cexp_guarded(expo) *
               f3.value(t, c1.z / c1.w, c2.z / c2.w);
    };
}

FieldFunction2 tensor_lift_2d(const HoloJetN& f4, Hbar h) {
    validate(h);
    if (f4.n != 2) throw std::invalid_argument("tensor_lift_2d needs an n=2 jet");
    const double hb = h.value;
    return [f4, hb](const PhasePoint& p1, const PhasePoint& p2) -> Complex {
        MultiChart mc{{phase_to_complex(p1), phase_to_complex(p2)}};
        const Complex expo = -kPi * kI * hb *
                             (p1.x * p1.x / mc.dims[0].w + p2.x * p2.x / mc.dims[1].w);
        return std::sqrt(p1.r) * std::sqrt(p2.r) * cexp_guarded(expo) * f4.value(mc);
    };
}

HoloJetN plane_wave_f4(double k1, double k2, Hbar h) {
    validate(h);
    const HoloJet a = plane_wave_f2(k1, h);
    const HoloJet b = plane_wave_f2(k2, h);
    HoloJetN jet;
    jet.n = 2;
    const auto at = [](const MultiChart& mc, int j) { return mc.dims[j]; };
    jet.value = [a, b, at](const MultiChart& mc) {
        return a.value(at(mc, 0).z, at(mc, 0).w) * b.value(at(mc, 1).z, at(mc, 1).w);
    };
    jet.dz = {[a, b, at](const MultiChart& mc) {
                  return a.dz(at(mc, 0).z, at(mc, 0).w) * b.value(at(mc, 1).z, at(mc, 1).w);
              },
              [a, b, at](const MultiChart& mc) {
                  return a.value(at(mc, 0).z, at(mc, 0).w) * b.dz(at(mc, 1).z, at(mc, 1).w);
              }};
    jet.dw = {[a, b, at](const MultiChart& mc) {
                  return a.dw(at(mc, 0).z, at(mc, 0).w) * b.value(at(mc, 1).z, at(mc, 1).w);
              },
              [a, b, at](const MultiChart& mc) {
                  return a.value(at(mc, 0).z, at(mc, 0).w) * b.dw(at(mc, 1).z, at(mc, 1).w);
              }};
    jet.dzz = {[a, b, at](const MultiChart& mc) {
                   return a.dzz(at(mc, 0).z, at(mc, 0).w) * b.value(at(mc, 1).z, at(mc, 1).w);
               },
               [a, b, at](const MultiChart& mc) {
                   return a.value(at(mc, 0).z, at(mc, 0).w) * b.dzz(at(mc, 1).z, at(mc, 1).w);
               }};
    return jet;
}

std::array<OperatorSample, 3> structural_residuals_2d_scaled(const F3Jet& f3, Complex t,
                                                             Complex s1, Complex s2, double k,
                                                             Hbar h) {
    validate(h);
    const double hb = h.value;
    const Complex v = f3.value(t, s1, s2);
    const Complex dt = f3.dt(t, s1, s2);
    const Complex d11 = f3.ds1s1(t, s1, s2);
    const Complex d22 = f3.ds2s2(t, s1, s2);
    const Complex tfreq = 4.0 * kPi * kI * hb * dt;
    const Complex half = 0.5 * k * k * v;

    const Complex first = tfreq - d22 - half;
    const Complex second = tfreq + d11 + half;
    const Complex third = second - first;
    const Complex third_direct = d11 + d22 + k * k * v;
    const double tscale = std::abs(tfreq) + std::abs(d11) + std::abs(d22) + std::abs(half) +
                          std::abs(v) + 1e-300;
    if (std::abs(third - third_direct) > 1e-12 * tscale)
        throw std::logic_error("structural residual difference identity violated");

    const double s_first = std::abs(tfreq) + std::abs(d22) + std::abs(half) + std::abs(v);
    const double s_second = std::abs(tfreq) + std::abs(d11) + std::abs(half) + std::abs(v);
    const double s_third = std::abs(d11) + std::abs(d22) + std::abs(k * k * v) + std::abs(v);
    return {OperatorSample{first, s_first}, OperatorSample{second, s_second},
            OperatorSample{third, s_third}};
}

std::array<Complex, 3> structural_residuals_2d(const F3Jet& f3, Complex t, Complex s1,
                                               Complex s2, double k, Hbar h) {
    const auto s = structural_residuals_2d_scaled(f3, t, s1, s2, k, h);
    return {s[0].value, s[1].value, s[2].value};
}

Complex gaussian_beam_f3(const BeamSpec& spec, Complex t, Complex s1, Complex s2, Hbar h) {
    validate(spec);
    validate(h);
    const double hb = h.value;
    const double k2 = spec.k * spec.k;
    const double sgn = spec.sign;
    return beam_adaptive(spec, [&](double k1, double kappa) {
        const Complex e = (2.0 * k1 * k1 - k2) / (8.0 * kPi * kI * hb) * t - kI * k1 * s1 +
                          sgn * kI * kappa * s2;
        return std::pair<Complex, Complex>(1.0, e);
    });
}

F3Jet gaussian_beam_f3_jet(const BeamSpec& spec, Hbar h) {
    validate(spec);
    validate(h);
    const double hb = h.value;
    const double k2 = spec.k * spec.k;
    const double sgn = spec.sign;
    const auto integral = [spec, hb, k2, sgn](Complex t, Complex s1, Complex s2,
                                              int deriv) -> Complex {
        return beam_adaptive(spec, [&](double k1, double kappa) {
            const Complex c = (2.0 * k1 * k1 - k2) / (8.0 * kPi * kI * hb);
            const Complex e = c * t - kI * k1 * s1 + sgn * kI * kappa * s2;
            Complex weight{1.0, 0.0};
            switch (deriv) {
                case 1: weight = c; break;                          // d/dt
                case 2: weight = -kI * k1; break;                   // d/ds1
                case 3: weight = sgn * kI * kappa; break;           // d/ds2
                case 4: weight = -k1 * k1; break;                   // d2/ds1^2
                case 5: weight = -kappa * kappa; break;             // d2/ds2^2
            }
            return std::pair<Complex, Complex>(weight, e);
        });
    };
    F3Jet jet;
    jet.value = [integral](Complex t, Complex s1, Complex s2) { return integral(t, s1, s2, 0); };
    jet.dt = [integral](Complex t, Complex s1, Complex s2) { return integral(t, s1, s2, 1); };
    jet.ds1 = [integral](Complex t, Complex s1, Complex s2) { return integral(t, s1, s2, 2); };
    jet.ds2 = [integral](Complex t, Complex s1, Complex s2) { return integral(t, s1, s2, 3); };
    jet.ds1s1 = [integral](Complex t, Complex s1, Complex s2) { return integral(t, s1, s2, 4); };
    jet.ds2s2 = [integral](Complex t, Complex s1, Complex s2) { return integral(t, s1, s2, 5); };
    return jet;
}

Complex physical_beam_value(const BeamSpec& spec, double u1, double u2) {
    validate(spec);
    const double sgn = spec.sign;
    return beam_adaptive(spec, [&](double k1, double kappa) {
        return std::pair<Complex, Complex>(1.0, Complex(0.0, -k1 * u1 + sgn * kappa * u2));
    });
}

SampledField reconstruct_physical_field(const BeamSpec& spec, const GridSpec& grid) {
    validate(spec);
    validate(grid);
    if (grid.axes.size() != 2) throw std::invalid_argument("physical beam grid must be 2D");

    // settle the node count once at witness points, then keep it fixed
    int nodes = std::max(spec.nodes, 8);
    {
        const double u1s[3] = {grid.axes[0].min, grid.axes[0].max,
                               0.5 * (grid.axes[0].min + grid.axes[0].max)};
        const double u2s[3] = {grid.axes[1].min, grid.axes[1].max,
                               0.5 * (grid.axes[1].min + grid.axes[1].max)};
        for (; nodes <= (1 << 16); nodes *= 2) {
            const BeamTables ta = beam_tables(spec, nodes);
            const BeamTables tb = beam_tables(spec, nodes * 2);
            const std::vector<double> wim(tb.k1.size(), 0.0);
            double worst = 0.0;
            for (double u1 : u1s)
                for (double u2 : u2s) {
                    std::vector<double> ph(ta.k1.size());
                    for (std::size_t j = 0; j < ta.k1.size(); ++j)
                        ph[j] = -ta.k1[j] * u1 + spec.sign * ta.kappa[j] * u2;
                    const Complex a = simd::weighted_phase_sum(
                        ta.dens, std::span(wim).first(ta.k1.size()), ph);
                    std::vector<double> ph2(tb.k1.size());
                    for (std::size_t j = 0; j < tb.k1.size(); ++j)
                        ph2[j] = -tb.k1[j] * u1 + spec.sign * tb.kappa[j] * u2;
                    const Complex b = simd::weighted_phase_sum(tb.dens, wim, ph2);
                    worst = std::max(worst, std::abs(a - b));
                }
            if (worst <= 1e-9 * std::max(ta.weight_l1, 1e-300)) break;
        }
        if (nodes > (1 << 16))
            throw QuadratureError("beam field quadrature did not converge under node doubling");
    }

    const BeamTables t = beam_tables(spec, nodes);
    SampledField out;
    out.grid = grid;
    out.values.resize(grid.node_count());
    out.coords = FieldCoords::Physical;
    const std::size_t n1 = grid.axes[0].count;
    const std::size_t n2 = grid.axes[1].count;
    parallel_for(n1, [&](std::size_t i) {
        const double u1 = grid.coordinate(0, i);
        std::vector<double> ph(t.k1.size());
        std::vector<double> wim(t.k1.size(), 0.0);
        for (std::size_t j2 = 0; j2 < n2; ++j2) {
            const double u2 = grid.coordinate(1, j2);
            for (std::size_t j = 0; j < t.k1.size(); ++j)
                ph[j] = -t.k1[j] * u1 + spec.sign * t.kappa[j] * u2;
            out.at(i, j2) = simd::weighted_phase_sum(t.dens, wim, ph);
        }
    });
    return out;
}

SampledField helmholtz_residual(const SampledField& F, double k) {
    validate(F);
    const std::size_t dims = F.grid.axes.size();
    if (dims != 2 && dims != 3)
        throw std::invalid_argument("helmholtz_residual needs a 2D or 3D field");
    for (const Axis& ax : F.grid.axes)
        if (ax.count < 5)
            throw std::invalid_argument("helmholtz_residual needs at least 5 nodes per axis");

    SampledField out;
    out.grid = F.grid;
    out.coords = F.coords;
    out.hbar = F.hbar;
    out.values.assign(F.values.size(),
                      Complex(std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN()));
    const double k2 = k * k;
    if (dims == 2) {
        const std::size_t n0 = F.grid.axes[0].count;
        const std::size_t n1 = F.grid.axes[1].count;
        const double h0 = F.grid.step(0);
        const double h1 = F.grid.step(1);
        for (std::size_t i = 1; i + 1 < n0; ++i)
            for (std::size_t j = 1; j + 1 < n1; ++j) {
                const Complex c = F.at(i, j);
                const Complex lap =
                    (F.at(i + 1, j) - 2.0 * c + F.at(i - 1, j)) / (h0 * h0) +
                    (F.at(i, j + 1) - 2.0 * c + F.at(i, j - 1)) / (h1 * h1);
                out.at(i, j) = lap + k2 * c;
            }
        return out;
    }
    const std::size_t n0 = F.grid.axes[0].count;
    const std::size_t n1 = F.grid.axes[1].count;
    const std::size_t n2 = F.grid.axes[2].count;
    const double h0 = F.grid.step(0);
    const double h1 = F.grid.step(1);
    const double h2 = F.grid.step(2);
    const auto idx = [&](std::size_t i, std::size_t j, std::size_t l) {
        return (i * n1 + j) * n2 + l;
    };
    for (std::size_t i = 1; i + 1 < n0; ++i)
        for (std::size_t j = 1; j + 1 < n1; ++j)
            for (std::size_t l = 1; l + 1 < n2; ++l) {
                const Complex c = F.values[idx(i, j, l)];
                const Complex lap =
                    (F.values[idx(i + 1, j, l)] - 2.0 * c + F.values[idx(i - 1, j, l)]) /
                        (h0 * h0) +
                    (F.values[idx(i, j + 1, l)] - 2.0 * c + F.values[idx(i, j - 1, l)]) /
                        (h1 * h1) +
                    (F.values[idx(i, j, l + 1)] - 2.0 * c + F.values[idx(i, j, l - 1)]) /
                        (h2 * h2);
                out.values[idx(i, j, l)] = lap + k2 * c;
            }
    return out;
}

double max_interior_abs(const SampledField& F) {
    double m = 0.0;
    for (const Complex& v : F.values)
        if (std::isfinite(v.real()) && std::isfinite(v.imag())) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_field(const SampledField& F) {
    double m = 0.0;
    for (const Complex& v : F.values) m = std::max(m, std::abs(v));
    return m;
}

HoloJetN lift_f5_to_f6(const F5Jet& f5, double k, Hbar h) {
    validate(h);
    const double hb = h.value;
    const double k2 = k * k;
    const auto pref = [k2, hb](const MultiChart& mc) {
        const Complex w1 = mc.dims[0].w, w2 = mc.dims[1].w, w3 = mc.dims[2].w;
        const Complex expo = k2 * (1.0 / w1 + 1.0 / w2 + 1.0 / w3) / (12.0 * kPi * kI * hb);
        return cexp_guarded(expo) /
               (principal_sqrt(w1) * principal_sqrt(w2) * principal_sqrt(w3));
    };
    const auto args = [](const MultiChart& mc) -> F5Jet::Args {
        const Complex w1 = mc.dims[0].w, w2 = mc.dims[1].w, w3 = mc.dims[2].w;
        return {1.0 / w1 - 1.0 / w3, 1.0 / w2 - 1.0 / w3, mc.dims[0].z / w1, mc.dims[1].z / w2,
                mc.dims[2].z / w3};
    };
    HoloJetN jet;
    jet.n = 3;
    jet.value = [f5, pref, args](const MultiChart& mc) { return pref(mc) * f5.value(args(mc)); };
    for (int j = 0; j < 3; ++j) {
        jet.dz.push_back([f5, pref, args, j](const MultiChart& mc) {
            const auto a = args(mc);
            const F5Jet::Fn& ds = (j == 0) ? f5.ds1 : (j == 1) ? f5.ds2 : f5.ds3;
            return pref(mc) * ds(a) / mc.dims[j].w;
        });
        jet.dzz.push_back([f5, pref, args, j](const MultiChart& mc) {
            const auto a = args(mc);
            const F5Jet::Fn& dss = (j == 0) ? f5.ds1s1 : (j == 1) ? f5.ds2s2 : f5.ds3s3;
            return pref(mc) * dss(a) / (mc.dims[j].w * mc.dims[j].w);
        });
        jet.dw.push_back([f5, pref, args, j, k2, hb](const MultiChart& mc) {
            const auto a = args(mc);
            const Complex w = mc.dims[j].w;
            const Complex z = mc.dims[j].z;
            const Complex dlog = -k2 / (12.0 * kPi * kI * hb * w * w) - 0.5 / w;
            Complex chain = 0.0;
            if (j == 0) chain = -f5.dt1(a) / (w * w) - f5.ds1(a) * z / (w * w);
            if (j == 1) chain = -f5.dt2(a) / (w * w) - f5.ds2(a) * z / (w * w);
            if (j == 2)
                chain = (f5.dt1(a) + f5.dt2(a)) / (w * w) - f5.ds3(a) * z / (w * w);
            return pref(mc) * (dlog * f5.value(a) + chain);
        });
    }
    return jet;
}

std::array<OperatorSample, 3> structural_residuals_3d_scaled(const F5Jet& f5,
                                                             const F5Jet::Args& args, double k,
                                                             Hbar h) {
    validate(h);
    const double hb = h.value;
    const Complex v = f5.value(args);
    const Complex t1 = 4.0 * kPi * kI * hb * f5.dt1(args);
    const Complex t2 = 4.0 * kPi * kI * hb * f5.dt2(args);
    const Complex d11 = f5.ds1s1(args);
    const Complex d22 = f5.ds2s2(args);
    const Complex d33 = f5.ds3s3(args);
    const Complex third_k = k * k / 3.0 * v;
    const Complex r1 = t1 + d11 + third_k;
    const Complex r2 = t2 + d22 + third_k;
    const Complex r3 = t1 + t2 - d33 - third_k;
    const double s1 = std::abs(t1) + std::abs(d11) + std::abs(third_k) + std::abs(v);
    const double s2 = std::abs(t2) + std::abs(d22) + std::abs(third_k) + std::abs(v);
    const double s3 =
        std::abs(t1) + std::abs(t2) + std::abs(d33) + std::abs(third_k) + std::abs(v);
    return {OperatorSample{r1, s1}, OperatorSample{r2, s2}, OperatorSample{r3, s3}};
}

std::array<Complex, 3> structural_residuals_3d(const F5Jet& f5, const F5Jet::Args& args,
                                               double k, Hbar h) {
    const auto s = structural_residuals_3d_scaled(f5, args, k, h);
    return {s[0].value, s[1].value, s[2].value};
}

Complex forward_2d(const std::function<Complex(double, double)>& f, const DecayBound& d1,
                   const DecayBound& d2, const PhasePoint& p1, const PhasePoint& p2, Hbar h,
                   const QuadratureSpec& q) {
    validate(p1);
    validate(p2);
    validate(h);
    validate(q);
    const double hb = h.value;
    const auto plan1 = detail::forward_plan(d1, p1, hb, q);
    const auto plan2 = detail::forward_plan(d2, p2, hb, q);
    const std::size_t n1 = plan1.nodes.size();
    const std::size_t n2 = plan2.nodes.size();

    std::vector<double> ere1(n1), eim1(n1), wre(n1), wim(n1);
    const double beta1 = kPi * hb * p1.r * p1.r;
    for (std::size_t i = 0; i < n1; ++i) {
        const double v = plan1.nodes[i] - p1.y;
        ere1[i] = -beta1 * v * v;
        eim1[i] = kPi * hb * p1.b * v * v - 2.0 * kPi * hb * p1.x * v;
    }
    std::vector<double> inner_wre(n2), inner_wim(n2), ere2(n2), eim2(n2);
    const double beta2 = kPi * hb * p2.r * p2.r;
    for (std::size_t j = 0; j < n2; ++j) {
        const double u2 = plan2.nodes[j];
        for (std::size_t i = 0; i < n1; ++i) {
            const Complex fv = f(plan1.nodes[i], u2);
            if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag()))
                throw QuadratureError("non-finite integrand sample in forward_2d");
            wre[i] = plan1.weights[i] * fv.real();
            wim[i] = plan1.weights[i] * fv.imag();
        }
        const Complex inner = simd::weighted_cexp_sum(wre, wim, ere1, eim1);
        const Complex wt = plan2.weights[j] * inner;
        inner_wre[j] = wt.real();
        inner_wim[j] = wt.imag();
        const double v = u2 - p2.y;
        ere2[j] = -beta2 * v * v;
        eim2[j] = kPi * hb * p2.b * v * v - 2.0 * kPi * hb * p2.x * v;
    }
    const Complex outer = simd::weighted_cexp_sum(inner_wre, inner_wim, ere2, eim2);
    return std::sqrt(hb * p1.r) * std::sqrt(hb * p2.r) * outer;
}

}  // namespace metamorph
