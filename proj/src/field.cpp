#include "branchflow/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace branchflow {

GridSpec make_grid(int n, int N, double L) {
    std::string errs;
    if (n != 2 && n != 3) errs += "n must be 2 or 3; ";
    if (N < 8) errs += "N must be >= 8; ";
    if (N % 2 != 0) errs += "N must be even; ";
    if (!(L > 0.0)) errs += "L must be > 0; ";
    if (!errs.empty()) throw ValidationError("make_grid: " + errs);
    return GridSpec{n, N, L};
}

TimeGrid make_time_grid(double s_start, double T_end, int M) {
    std::string errs;
    if (!(T_end > s_start)) errs += "T_end must exceed s_start; ";
    if (M < 2) errs += "M must be >= 2; ";
    if (!errs.empty()) throw ValidationError("make_time_grid: " + errs);
    return TimeGrid{s_start, T_end, M};
}

namespace {

// One cached in-place c2c plan pair per (n, N). FFTW plan creation is not
// thread-safe; execution here goes through a shared buffer under the lock.
struct PlanSet {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t size = 0;

    ~PlanSet() {
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        if (buf) fftw_free(buf);
    }
};

std::mutex g_fft_mutex;

PlanSet& plans_for(const GridSpec& g) {
    static std::map<std::pair<int, int>, PlanSet> cache;
    auto key = std::make_pair(g.n, g.N);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    PlanSet& p = cache[key];
    p.size = g.size();
    p.buf = fftw_alloc_complex(p.size);
    // rank-n transform; our storage is axis-0-fastest, FFTW expects row-major,
    // so axis order is reversed. All axes have equal length: no reordering needed.
    std::vector<int> dims(g.n, g.N);
    p.fwd = fftw_plan_dft(g.n, dims.data(), p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft(g.n, dims.data(), p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    return p;
}

}  // namespace

Spectrum to_spectral(const ScalarField& f) {
    std::lock_guard<std::mutex> lock(g_fft_mutex);
    PlanSet& p = plans_for(f.grid);
    for (std::size_t i = 0; i < p.size; ++i) {
        p.buf[i][0] = f.samples[i];
        p.buf[i][1] = 0.0;
    }
    fftw_execute(p.fwd);
    Spectrum out(p.size);
    for (std::size_t i = 0; i < p.size; ++i) out[i] = {p.buf[i][0], p.buf[i][1]};
    return out;
}

ScalarField from_spectral(const GridSpec& g, const Spectrum& modes, double t) {
    if (modes.size() != g.size())
        throw ValidationError("from_spectral: spectrum size does not match grid");
    std::lock_guard<std::mutex> lock(g_fft_mutex);
    PlanSet& p = plans_for(g);
    for (std::size_t i = 0; i < p.size; ++i) {
        p.buf[i][0] = modes[i].real();
        p.buf[i][1] = modes[i].imag();
    }
    fftw_execute(p.inv);
    ScalarField out(g, t);
    const double norm = 1.0 / static_cast<double>(p.size);
    for (std::size_t i = 0; i < p.size; ++i) out.samples[i] = p.buf[i][0] * norm;
    return out;
}

ScalarField spectral_roundtrip(const ScalarField& f) {
    return from_spectral(f.grid, to_spectral(f), f.t);
}

void for_each_mode(const GridSpec& g,
                   const std::function<void(std::size_t, const std::array<double, 3>&)>& fn) {
    const int N = g.N;
    const std::size_t total = g.size();
    std::array<double, 3> k{0.0, 0.0, 0.0};
    std::array<int, 3> idx{0, 0, 0};
    for (std::size_t flat = 0; flat < total; ++flat) {
        k[0] = wavenumber(g, idx[0]);
        k[1] = wavenumber(g, idx[1]);
        k[2] = (g.n == 3) ? wavenumber(g, idx[2]) : 0.0;
        fn(flat, k);
        if (++idx[0] == N) {
            idx[0] = 0;
            if (++idx[1] == N) {
                idx[1] = 0;
                ++idx[2];
            }
        }
    }
}

Spectrum derivative_spectrum(const GridSpec& g, const Spectrum& modes, const MultiIndex& beta) {
    if (order(beta) > 2) throw ValidationError("derivative: |beta| > 2 not supported");
    for (int d = g.n; d < 3; ++d)
        if (beta[d] != 0) throw ValidationError("derivative: beta exceeds dimension");
    Spectrum out(modes.size());
    const int N = g.N;
    const std::size_t total = g.size();
    const std::size_t plane = static_cast<std::size_t>(N) * N;
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < static_cast<long long>(total); ++flat) {
        const int m0 = static_cast<int>(flat % N);
        const int m1 = static_cast<int>((flat / N) % N);
        const int m2 = static_cast<int>(flat / plane);
        const std::array<int, 3> midx{m0, m1, m2};
        std::complex<double> mult{1.0, 0.0};
        for (int d = 0; d < g.n; ++d) {
            if (beta[d] == 0) continue;
            // Nyquist mode has no signed partner; odd derivatives zero it.
            if (beta[d] % 2 == 1 && midx[d] == N / 2) {
                mult = 0.0;
                break;
            }
            const std::complex<double> ik{0.0, wavenumber(g, midx[d])};
            for (int q = 0; q < beta[d]; ++q) mult *= ik;
        }
        out[flat] = mult * modes[flat];
    }
    return out;
}

ScalarField derivative(const ScalarField& f, const MultiIndex& beta) {
    if (order(beta) == 0) return f;
    return from_spectral(f.grid, derivative_spectrum(f.grid, to_spectral(f), beta), f.t);
}

ScalarField laplacian(const ScalarField& f) {
    Spectrum modes = to_spectral(f);
    const GridSpec& g = f.grid;
    const int N = g.N;
    const std::size_t total = g.size();
    const std::size_t plane = static_cast<std::size_t>(N) * N;
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < static_cast<long long>(total); ++flat) {
        const int m0 = static_cast<int>(flat % N);
        const int m1 = static_cast<int>((flat / N) % N);
        const int m2 = static_cast<int>(flat / plane);
        double k2 = wavenumber(g, m0) * wavenumber(g, m0) + wavenumber(g, m1) * wavenumber(g, m1);
        if (g.n == 3) k2 += wavenumber(g, m2) * wavenumber(g, m2);
        modes[flat] *= -k2;
    }
    return from_spectral(g, modes, f.t);
}

void dealias(const GridSpec& g, Spectrum& modes) {
    const int N = g.N;
    const int cutoff = N / 3;
    const std::size_t total = g.size();
    const std::size_t plane = static_cast<std::size_t>(N) * N;
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < static_cast<long long>(total); ++flat) {
        const int m0 = static_cast<int>(flat % N);
        const int m1 = static_cast<int>((flat / N) % N);
        const int m2 = static_cast<int>(flat / plane);
        bool kill = std::abs(fft_freq(N, m0)) > cutoff || std::abs(fft_freq(N, m1)) > cutoff;
        if (g.n == 3) kill = kill || std::abs(fft_freq(N, m2)) > cutoff;
        if (kill) modes[flat] = 0.0;
    }
}

double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.samples) m = std::max(m, std::abs(v));
    return m;
}

double sup_norm(const VectorField& v) {
    double m = 0.0;
    for (const auto& c : v.comp) m = std::max(m, sup_norm(c));
    return m;
}

void check_finite(const ScalarField& f, const char* what) {
    for (double v : f.samples)
        if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite samples in ") + what);
}

ScalarField restrict_spectral(const ScalarField& fine, const GridSpec& coarse) {
    const GridSpec& gf = fine.grid;
    if (coarse.n != gf.n || coarse.L != gf.L)
        throw ValidationError("restrict_spectral: grids must share box and dimension");
    if (coarse.N > gf.N)
        throw ValidationError("restrict_spectral: target grid must be no finer than the source");
    const Spectrum F = to_spectral(fine);
    Spectrum C(coarse.size(), 0.0);
    const int Nc = coarse.N, Nf = gf.N;
    const double scale = double(coarse.size()) / double(gf.size());
    const int Nz = (coarse.n == 3) ? Nc : 1;
    auto fine_index = [&](int freq) { return (freq >= 0) ? freq : freq + Nf; };
    for (int m2 = 0; m2 < Nz; ++m2)
        for (int m1 = 0; m1 < Nc; ++m1)
            for (int m0 = 0; m0 < Nc; ++m0) {
                const int f0 = fft_freq(Nc, m0), f1 = fft_freq(Nc, m1), f2 = fft_freq(Nz, m2);
                if (std::abs(f0) >= (Nc + 1) / 2 || std::abs(f1) >= (Nc + 1) / 2 ||
                    (coarse.n == 3 && std::abs(f2) >= (Nc + 1) / 2))
                    continue;
                const std::size_t src =
                    fine_index(f0) +
                    std::size_t(Nf) * (fine_index(f1) + std::size_t(Nf) * fine_index(f2));
                C[m0 + std::size_t(Nc) * (m1 + std::size_t(Nc) * m2)] = F[src] * scale;
            }
    return from_spectral(coarse, C, fine.t);
}

VectorField restrict_spectral(const VectorField& fine, const GridSpec& coarse) {
    VectorField out(coarse, fine.t());
    for (int i = 0; i < coarse.n; ++i) out.comp[i] = restrict_spectral(fine.comp[i], coarse);
    return out;
}

ScalarField sample_function(const GridSpec& g,
                            const std::function<double(const std::array<double, 3>&)>& fn,
                            double t) {
    ScalarField out(g, t);
    const int N = g.N;
    const std::size_t plane = static_cast<std::size_t>(N) * N;
    const std::size_t total = g.size();
#pragma omp parallel for schedule(static)
    for (long long flat = 0; flat < static_cast<long long>(total); ++flat) {
        const int j0 = static_cast<int>(flat % N);
        const int j1 = static_cast<int>((flat / N) % N);
        const int j2 = static_cast<int>(flat / plane);
        std::array<double, 3> x{g.coord(j0), g.coord(j1), g.n == 3 ? g.coord(j2) : 0.0};
        out.samples[flat] = fn(x);
    }
    return out;
}

}  // namespace branchflow
