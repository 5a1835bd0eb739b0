#include "branchflow/kernels.hpp"

#include <cmath>

namespace branchflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline double ksq_at(const GridSpec& g, long long flat) {
    const int N = g.N;
    const long long plane = static_cast<long long>(N) * N;
    const double k0 = wavenumber(g, static_cast<int>(flat % N));
    const double k1 = wavenumber(g, static_cast<int>((flat / N) % N));
    double k2 = k0 * k0 + k1 * k1;
    if (g.n == 3) {
        const double kz = wavenumber(g, static_cast<int>(flat / plane));
        k2 += kz * kz;
    }
    return k2;
}

// Exact subinterval integrals I0 = int_0^h e^{-a w} dw, I1 = int_0^h w e^{-a w} dw,
// with w measured back from the newer node. Series below x = a h = 1e-2 to avoid
// cancellation in I1.
inline void duhamel_interval_weights(double a, double h, double& w0, double& w1) {
    const double x = a * h;
    double i0, i1;
    if (x < 1e-2) {
        i0 = h * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0);
        i1 = h * h * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0 + x * x * x * x / 144.0);
    } else {
        const double e = std::exp(-x);
        i0 = (1.0 - e) / a;
        i1 = (1.0 - (1.0 + x) * e) / (a * a);
    }
    w0 = i1 / h;       // weight of the older node
    w1 = i0 - i1 / h;  // weight of the newer node
}

}  // namespace

double heat_kernel_point(int n, const HeatParams& hp, double r) {
    if (!(hp.s_visc > 0.0)) throw ValidationError("heat_kernel_point: s_visc must be > 0");
    if (!(hp.dt > 0.0))
        throw ValidationError("heat_kernel_point: dt must be > 0 (dt = 0 is a delta)");
    const double sd = hp.s_visc * hp.dt;
    return std::pow(4.0 * kPi * sd, -0.5 * n) * std::exp(-r * r / (4.0 * sd));
}

void apply_heat_multiplier(const GridSpec& g, double s_visc, double dt, Spectrum& modes) {
    if (dt == 0.0) return;
    const long long total = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < total; ++flat)
        modes[flat] *= std::exp(-s_visc * ksq_at(g, flat) * dt);
}

ScalarField heat_propagate(const ScalarField& f, const HeatParams& hp) {
    if (!(hp.s_visc > 0.0)) throw ValidationError("heat_propagate: s_visc must be > 0");
    if (hp.dt < 0.0) throw ValidationError("heat_propagate: dt must be >= 0");
    if (hp.dt == 0.0) return f;
    Spectrum modes = to_spectral(f);
    apply_heat_multiplier(f.grid, hp.s_visc, hp.dt, modes);
    return from_spectral(f.grid, modes, f.t + hp.dt);
}

VectorField heat_propagate(const VectorField& v, const HeatParams& hp) {
    VectorField out = v;
    for (auto& c : out.comp) c = heat_propagate(c, hp);
    return out;
}

void leray_project_spectra(const GridSpec& g, std::vector<Spectrum>& vhat) {
    const int n = g.n;
    const int N = g.N;
    const long long total = static_cast<long long>(g.size());
    const long long plane = static_cast<long long>(N) * N;
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < total; ++flat) {
        std::array<double, 3> k{wavenumber(g, static_cast<int>(flat % N)),
                                wavenumber(g, static_cast<int>((flat / N) % N)),
                                n == 3 ? wavenumber(g, static_cast<int>(flat / plane)) : 0.0};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0) continue;  // identity on the mean mode
        std::complex<double> kdot = 0.0;
        for (int i = 0; i < n; ++i) kdot += k[i] * vhat[i][flat];
        kdot /= k2;
        for (int i = 0; i < n; ++i) vhat[i][flat] -= k[i] * kdot;
    }
}

VectorField leray_project(const VectorField& v) {
    const GridSpec& g = v.grid();
    std::vector<Spectrum> vhat(g.n);
    for (int i = 0; i < g.n; ++i) vhat[i] = to_spectral(v.comp[i]);
    leray_project_spectra(g, vhat);
    VectorField out(g, v.t());
    for (int i = 0; i < g.n; ++i) out.comp[i] = from_spectral(g, vhat[i], v.t());
    return out;
}

std::vector<Spectrum> pressure_gradient_spectra(const GridSpec& g,
                                                const std::vector<Spectrum>& vhat) {
    const int n = g.n;
    // velocity-gradient samples from dealiased spectra
    std::vector<std::vector<ScalarField>> dv(n, std::vector<ScalarField>(n));
    for (int i = 0; i < n; ++i) {
        Spectrum vi = vhat[i];
        dealias(g, vi);
        for (int j = 0; j < n; ++j) {
            MultiIndex beta{0, 0, 0};
            beta[j] = 1;
            dv[i][j] = from_spectral(g, derivative_spectrum(g, vi, beta));
        }
    }
    ScalarField S(g);
    const long long total = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < total; ++p) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int m = 0; m < n; ++m) acc += dv[m][j].samples[p] * dv[j][m].samples[p];
        S.samples[p] = acc;
    }
    Spectrum shat = to_spectral(S);
    dealias(g, shat);
    std::vector<Spectrum> out(n, Spectrum(g.size()));
    const int N = g.N;
    const long long plane = static_cast<long long>(N) * N;
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < total; ++flat) {
        std::array<double, 3> k{wavenumber(g, static_cast<int>(flat % N)),
                                wavenumber(g, static_cast<int>((flat / N) % N)),
                                n == 3 ? wavenumber(g, static_cast<int>(flat / plane)) : 0.0};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        for (int i = 0; i < n; ++i) {
            if (k2 == 0.0) {
                out[i][flat] = 0.0;  // zero-mean pressure gradient gauge
            } else {
                out[i][flat] = std::complex<double>(0.0, -k[i] / k2) * shat[flat];
            }
        }
    }
    return out;
}

VectorField pressure_gradient_term(const VectorField& v) {
    const GridSpec& g = v.grid();
    std::vector<Spectrum> vhat(g.n);
    for (int i = 0; i < g.n; ++i) vhat[i] = to_spectral(v.comp[i]);
    auto phat = pressure_gradient_spectra(g, vhat);
    VectorField out(g, v.t());
    for (int i = 0; i < g.n; ++i) out.comp[i] = from_spectral(g, phat[i], v.t());
    return out;
}

DuhamelAccumulator::DuhamelAccumulator(const GridSpec& g, double s_visc, double dt, int ncomp)
    : grid_(g),
      decay_(g.size()),
      w0_(g.size()),
      w1_(g.size()),
      acc_(ncomp, Spectrum(g.size(), 0.0)) {
    if (!(dt > 0.0)) throw ValidationError("DuhamelAccumulator: dt must be > 0");
    const long long total = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < total; ++flat) {
        const double a = s_visc * ksq_at(g, flat);
        decay_[flat] = std::exp(-a * dt);
        duhamel_interval_weights(a, dt, w0_[flat], w1_[flat]);
    }
}

void DuhamelAccumulator::advance(const std::vector<Spectrum>& src_prev,
                                 const std::vector<Spectrum>& src_curr) {
    const long long total = static_cast<long long>(grid_.size());
    for (std::size_t c = 0; c < acc_.size(); ++c) {
        auto& a = acc_[c];
        const auto& p = src_prev[c];
        const auto& q = src_curr[c];
#pragma omp parallel for schedule(static)
        for (long long flat = 0; flat < total; ++flat)
            a[flat] = decay_[flat] * a[flat] + w0_[flat] * p[flat] + w1_[flat] * q[flat];
    }
    ++steps_;
}

Spectrum duhamel(const std::vector<Spectrum>& g_nodes, const GridSpec& g, const TimeGrid& tg,
                 double s_visc, int m_target, const MultiIndex& beta) {
    if (order(beta) > 1) throw ValidationError("duhamel: kernel derivative |beta| > 1");
    if (m_target < 0 || m_target >= tg.M) throw ValidationError("duhamel: node out of range");
    if (m_target == 0) return Spectrum(g.size(), 0.0);  // empty integral
    if (static_cast<int>(g_nodes.size()) < m_target + 1)
        throw ValidationError("duhamel: source not defined up to target node");
    DuhamelAccumulator acc(g, s_visc, tg.dt(), 1);
    for (int m = 1; m <= m_target; ++m)
        acc.advance({g_nodes[m - 1]}, {g_nodes[m]});
    Spectrum out = acc.value()[0];
    if (order(beta) == 1) out = derivative_spectrum(g, out, beta);
    return out;
}

namespace ref {

void apply_heat_multiplier(const GridSpec& g, double s_visc, double dt, Spectrum& modes) {
    if (dt == 0.0) return;
    const long long total = static_cast<long long>(g.size());
    for (long long flat = 0; flat < total; ++flat)
        modes[flat] *= std::exp(-s_visc * ksq_at(g, flat) * dt);
}

void leray_project_spectra(const GridSpec& g, std::vector<Spectrum>& vhat) {
    const int n = g.n;
    const int N = g.N;
    const long long total = static_cast<long long>(g.size());
    const long long plane = static_cast<long long>(N) * N;
    for (long long flat = 0; flat < total; ++flat) {
        std::array<double, 3> k{wavenumber(g, static_cast<int>(flat % N)),
                                wavenumber(g, static_cast<int>((flat / N) % N)),
                                n == 3 ? wavenumber(g, static_cast<int>(flat / plane)) : 0.0};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0) continue;
        std::complex<double> kdot = 0.0;
        for (int i = 0; i < n; ++i) kdot += k[i] * vhat[i][flat];
        kdot /= k2;
        for (int i = 0; i < n; ++i) vhat[i][flat] -= k[i] * kdot;
    }
}

void duhamel_step(const GridSpec& g, double s_visc, double dt, std::vector<Spectrum>& acc,
                  const std::vector<Spectrum>& src_prev, const std::vector<Spectrum>& src_curr) {
    const long long total = static_cast<long long>(g.size());
    for (std::size_t c = 0; c < acc.size(); ++c) {
        for (long long flat = 0; flat < total; ++flat) {
            const double a = s_visc * ksq_at(g, flat);
            double w0, w1;
            duhamel_interval_weights(a, dt, w0, w1);
            acc[c][flat] = std::exp(-a * dt) * acc[c][flat] + w0 * src_prev[c][flat] +
                           w1 * src_curr[c][flat];
        }
    }
}

}  // namespace ref

}  // namespace branchflow
