#include "branchflow/data.hpp"

#include <algorithm>
#include <cmath>

namespace branchflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAxisEps = 1e-12;

struct Taper {
    double psi = 0.0;
    double dpsi = 0.0;
};

Taper taper_eval(double z) {
    const double e = std::exp(-z * z / (2.0 * kTaperW3));
    return {z * e, (1.0 - z * z / kTaperW3) * e};
}

}  // namespace

DataParams make_data_params(double eps, DataKind kind, double amplitude) {
    std::string errs;
    if (!(eps > 0.0 && eps <= 0.25)) errs += "eps must lie in (0, 0.25]; ";
    if (!std::isfinite(amplitude)) errs += "amplitude must be finite; ";
    if (!errs.empty()) throw ValidationError("make_data_params: " + errs);
    return DataParams{eps, kind, amplitude};
}

GEval g_eps_eval(double r2, double eps) {
    if (r2 < 0.0) throw ValidationError("g_eps_eval: negative radius");
    if (r2 == 0.0) return {};  // the closed forms are valid at arbitrarily small r > 0
    const double r = r2;
    const double u = std::pow(r, -eps);
    const double c = std::cos(u), si = std::sin(u);
    const double w = 1.0 + r * r;
    const double rho = std::pow(w, -6.0);
    const double rhop = -12.0 * r * std::pow(w, -7.0);
    const double rhopp = -12.0 * std::pow(w, -7.0) + 168.0 * r * r * std::pow(w, -8.0);
    GEval out;
    out.g = r * c * rho;
    out.dg = c * rho + eps * std::pow(r, -eps) * si * rho + r * c * rhop;
    out.d2g = (eps - eps * eps) * std::pow(r, -eps - 1.0) * si * rho -
              eps * eps * std::pow(r, -2.0 * eps - 1.0) * c * rho + 2.0 * c * rhop +
              2.0 * eps * std::pow(r, -eps) * si * rhop + r * c * rhopp;
    return out;
}

double h1_d11_analytic(double x1, double x2, double eps) {
    const double r = std::hypot(x1, x2);
    if (r == 0.0) return 0.0;  // closed form is evaluated at arbitrarily small r > 0
    const GEval e = g_eps_eval(r, eps);
    return 3.0 * e.dg * x1 / r + e.d2g * x1 * x1 * x1 / (r * r) -
           e.dg * x1 * x1 * x1 / (r * r * r);
}

namespace {

/// Wavenumber convention matching derivative(): the unpaired Nyquist mode is
/// treated as zero, so projections built from these wavenumbers are exactly
/// annihilated by the spectral first derivatives used in the diagnostics.
double deriv_wavenumber(const GridSpec& g, int m) {
    return (2 * std::abs(fft_freq(g.N, m)) == g.N) ? 0.0 : wavenumber(g, m);
}

/// Remove the gradient component (k . vhat) k / |k|^2 and, independently,
/// the omega_3 component along (k2, -k1, 0) (orthogonal to k), so that the
/// discrete divergence and vorticity-z vanish identically. Both removals are
/// tiny for the analytic family (aliasing-scale); the k = 0 mode is untouched.
void project_constraints(const GridSpec& g, std::vector<Spectrum>& vhat, bool kill_omega3) {
    const int n = g.n;
    const int N = g.N;
    const long long total = static_cast<long long>(g.size());
    const long long plane = static_cast<long long>(N) * N;
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < total; ++flat) {
        std::array<double, 3> k{deriv_wavenumber(g, static_cast<int>(flat % N)),
                                deriv_wavenumber(g, static_cast<int>((flat / N) % N)),
                                n == 3 ? deriv_wavenumber(g, static_cast<int>(flat / plane)) : 0.0};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0) continue;
        std::complex<double> kdot = 0.0;
        for (int i = 0; i < n; ++i) kdot += k[i] * vhat[i][flat];
        kdot /= k2;
        for (int i = 0; i < n; ++i) vhat[i][flat] -= k[i] * kdot;
        if (kill_omega3) {
            const double e2 = k[0] * k[0] + k[1] * k[1];
            if (e2 > 0.0) {
                // component along (k1, k2) in the (v2, -v1) sense: zeroing the
                // projection of vhat onto (k2, -k1, 0) kills i(k1 v2 - k2 v1).
                const std::complex<double> a = (k[1] * vhat[0][flat] - k[0] * vhat[1][flat]) / e2;
                vhat[0][flat] -= k[1] * a;
                vhat[1][flat] += k[0] * a;
            }
        }
    }
}

VectorField sample_singular(const DataParams& dp, const GridSpec& g, bool planar_2d) {
    VectorField h(g);
    const int N = g.N;
    const int Nz = (g.n == 3) ? N : 1;
    const double amp = dp.amplitude;
#pragma omp parallel for collapse(2) schedule(static)
    for (int j2 = 0; j2 < Nz; ++j2)
        for (int j1 = 0; j1 < N; ++j1) {
            const double x3 = planar_2d ? 0.0 : g.coord(j2);
            const Taper tp = planar_2d ? Taper{0.0, 1.0} : taper_eval(x3);
            const double x2 = g.coord(j1);
            for (int j0 = 0; j0 < N; ++j0) {
                const double x1 = g.coord(j0);
                const double r = std::hypot(x1, x2);
                const std::size_t p = j0 + std::size_t(N) * (j1 + std::size_t(N) * j2);
                if (r < kAxisEps) continue;  // all components vanish on the axis
                const GEval e = g_eps_eval(r, dp.eps);
                h.comp[0].samples[p] = amp * x1 * e.g * tp.dpsi;
                h.comp[1].samples[p] = amp * x2 * e.g * tp.dpsi;
                if (!planar_2d) {
                    const double q = e.g + 0.5 * r * e.dg;
                    h.comp[2].samples[p] = amp * -2.0 * tp.psi * q;
                }
            }
        }
    return h;
}

}  // namespace

VectorField make_singular_data_raw(const DataParams& dp, const GridSpec& g) {
    if (g.n != 3) throw ValidationError("make_singular_data: construction is 3-D");
    return sample_singular(dp, g, false);
}

VectorField make_singular_data(const DataParams& dp, const GridSpec& g) {
    VectorField h = make_singular_data_raw(dp, g);
    std::vector<Spectrum> vhat(3);
    for (int i = 0; i < 3; ++i) vhat[i] = to_spectral(h.comp[i]);
    project_constraints(g, vhat, true);
    for (int i = 0; i < 3; ++i) h.comp[i] = from_spectral(g, vhat[i]);
    return h;
}

VectorField make_radial_data_2d(const DataParams& dp, const GridSpec& g) {
    if (g.n != 2) throw ValidationError("make_radial_data_2d: grid must be 2-D");
    VectorField h = sample_singular(dp, g, true);
    std::vector<Spectrum> vhat(2);
    for (int i = 0; i < 2; ++i) vhat[i] = to_spectral(h.comp[i]);
    // kill only the vorticity component; the radial (gradient) part is the data
    const int N = g.N;
    const long long total = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < total; ++flat) {
        std::array<double, 2> k{deriv_wavenumber(g, static_cast<int>(flat % N)),
                                deriv_wavenumber(g, static_cast<int>(flat / N))};
        const double e2 = k[0] * k[0] + k[1] * k[1];
        if (e2 == 0.0) continue;
        const std::complex<double> a = (k[1] * vhat[0][flat] - k[0] * vhat[1][flat]) / e2;
        vhat[0][flat] -= k[1] * a;
        vhat[1][flat] += k[0] * a;
    }
    for (int i = 0; i < 2; ++i) h.comp[i] = from_spectral(g, vhat[i]);
    return h;
}

VectorField make_smooth_data(const GridSpec& g, double amplitude) {
    if (g.n != 3) throw ValidationError("make_smooth_data: construction is 3-D");
    VectorField h(g);
    const int N = g.N;
#pragma omp parallel for collapse(2) schedule(static)
    for (int j2 = 0; j2 < N; ++j2)
        for (int j1 = 0; j1 < N; ++j1) {
            const double x3 = g.coord(j2), x2 = g.coord(j1);
            for (int j0 = 0; j0 < N; ++j0) {
                const double x1 = g.coord(j0);
                const double a3 =
                    amplitude * std::exp(-(x1 * x1 + x2 * x2 + x3 * x3) / (2.0 * kSmoothW));
                const std::size_t p = j0 + std::size_t(N) * (j1 + std::size_t(N) * j2);
                h.comp[0].samples[p] = -x2 / kSmoothW * a3;  // d A3 / d x2
                h.comp[1].samples[p] = x1 / kSmoothW * a3;   // -d A3 / d x1
            }
        }
    // periodization aliasing leaves an O(1e-8) discrete divergence; project it
    // away so the sampled family satisfies the constraint identically
    std::vector<Spectrum> vhat(3);
    for (int i = 0; i < 3; ++i) vhat[i] = to_spectral(h.comp[i]);
    project_constraints(g, vhat, false);
    for (int i = 0; i < 3; ++i) h.comp[i] = from_spectral(g, vhat[i]);
    return h;
}

double divergence_sup(const VectorField& v) {
    const GridSpec& g = v.grid();
    ScalarField div(g);
    for (int i = 0; i < g.n; ++i) {
        MultiIndex beta{0, 0, 0};
        beta[i] = 1;
        ScalarField d = derivative(v.comp[i], beta);
        for (std::size_t p = 0; p < div.samples.size(); ++p) div.samples[p] += d.samples[p];
    }
    return sup_norm(div);
}

VectorField curl(const VectorField& v) {
    if (v.grid().n != 3) throw ValidationError("curl: field must be 3-D");
    const GridSpec& g = v.grid();
    VectorField w(g, v.t());
    auto d = [&](int comp, int axis) {
        MultiIndex beta{0, 0, 0};
        beta[axis] = 1;
        return derivative(v.comp[comp], beta);
    };
    const ScalarField d21 = d(2, 1), d12 = d(1, 2), d02 = d(0, 2), d20 = d(2, 0), d10 = d(1, 0),
                      d01 = d(0, 1);
    for (std::size_t p = 0; p < g.size(); ++p) {
        w.comp[0].samples[p] = d21.samples[p] - d12.samples[p];
        w.comp[1].samples[p] = d02.samples[p] - d20.samples[p];
        w.comp[2].samples[p] = d10.samples[p] - d01.samples[p];
    }
    return w;
}

ScalarField vorticity_z(const VectorField& v) {
    const GridSpec& g = v.grid();
    ScalarField w(g, v.t());
    const ScalarField d10 = derivative(v.comp[1], {1, 0, 0});
    const ScalarField d01 = derivative(v.comp[0], {0, 1, 0});
    for (std::size_t p = 0; p < g.size(); ++p)
        w.samples[p] = d10.samples[p] - d01.samples[p];
    return w;
}

DecayReport decay_report(const ScalarField& f, double l, int m, double cap) {
    if (l < 0.0 || m < 0 || m > 2) throw ValidationError("decay_report: need l >= 0, 0 <= m <= 2");
    const GridSpec& g = f.grid;
    DecayReport rep;
    rep.l = l;
    rep.cap = cap;
    std::vector<MultiIndex> betas{{0, 0, 0}};
    for (int i = 0; i < g.n; ++i) {
        if (m >= 1) {
            MultiIndex b{0, 0, 0};
            b[i] = 1;
            betas.push_back(b);
        }
        if (m >= 2)
            for (int j = i; j < g.n; ++j) {
                MultiIndex b{0, 0, 0};
                b[i] += 1;
                b[j] += 1;
                betas.push_back(b);
            }
    }
    const int N = g.N;
    const int Nz = (g.n == 3) ? N : 1;
    for (const auto& b : betas) {
        ScalarField df = (order(b) == 0) ? f : derivative(f, b);
        double c = 0.0;
        for (int j2 = 0; j2 < Nz; ++j2)
            for (int j1 = 0; j1 < N; ++j1)
                for (int j0 = 0; j0 < N; ++j0) {
                    const double x1 = g.coord(j0), x2 = g.coord(j1);
                    const double x3 = (g.n == 3) ? g.coord(j2) : 0.0;
                    const double rr = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                    if (rr < 1.0 || rr > g.L - 1.0) continue;
                    const std::size_t p = j0 + std::size_t(N) * (j1 + std::size_t(N) * j2);
                    c = std::max(c, std::abs(df.samples[p]) * (1.0 + std::pow(rr, l)));
                }
        rep.entries.push_back({b, c});
        if (c > cap) rep.within_cap = false;
    }
    return rep;
}

SingularityReport singularity_scaling(const DataParams& dp, int n_annuli) {
    if (!(dp.eps >= 0.05 && dp.eps <= 0.25))
        throw ValidationError("singularity_scaling: eps must lie in [0.05, 0.25]");
    if (n_annuli < 3) throw ValidationError("singularity_scaling: need at least 3 annuli");
    const double eps = dp.eps;
    const double rho0 = std::pow((std::pow(2.0, eps) - 1.0) / (2.0 * kPi), 1.0 / eps);
    SingularityReport rep;
    rep.alpha_estimate = 1.0 - 2.0 * eps;
    for (int j = 0; j < n_annuli; ++j) {
        const double rho = rho0 * std::pow(2.0, -j);
        double sup = 0.0;
        const int nr = 400, nth = 181;
        for (int ir = 0; ir < nr; ++ir) {
            const double r = rho * std::pow(2.0, double(ir) / (nr - 1));
            for (int it = 0; it < nth; ++it) {
                const double th = 2.0 * kPi * it / (nth - 1);
                sup = std::max(sup, std::abs(h1_d11_analytic(r * std::cos(th), r * std::sin(th), eps)));
            }
        }
        rep.radii.push_back(rho);
        rep.sup_second_derivative.push_back(sup);
    }
    // least-squares slope of log sup vs log rho
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int j = 0; j < n_annuli; ++j) {
        const double x = std::log(rep.radii[j]), y = std::log(rep.sup_second_derivative[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_slope = (n_annuli * sxy - sx * sy) / (n_annuli * sxx - sx * sx);
    return rep;
}

}  // namespace branchflow
