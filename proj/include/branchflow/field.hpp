#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "branchflow/grid.hpp"

namespace branchflow {

using Spectrum = std::vector<std::complex<double>>;

/// Real-valued samples on a GridSpec at one time instant.
/// Storage is axis-0-fastest: flat index j0 + N*(j1 + N*j2).
struct ScalarField {
    GridSpec grid;
    double t = 0.0;
    std::vector<double> samples;

    ScalarField() = default;
    ScalarField(const GridSpec& g, double time = 0.0)
        : grid(g), t(time), samples(g.size(), 0.0) {}
};

/// n ScalarFields sharing one grid and one time stamp.
struct VectorField {
    std::vector<ScalarField> comp;

    VectorField() = default;
    VectorField(const GridSpec& g, double time = 0.0)
        : comp(g.n, ScalarField(g, time)) {}

    const GridSpec& grid() const { return comp.at(0).grid; }
    double t() const { return comp.at(0).t; }
    void set_t(double time) {
        for (auto& c : comp) c.t = time;
    }
    int n() const { return static_cast<int>(comp.size()); }
};

// DFT convention: unnormalized forward (F[m] = sum_j f[j] exp(-2*pi*i*m.j/N)),
// inverse divides by N^n. Physical wavenumber of index m along an axis is
// k = (pi/L) * freq(m) with freq the usual signed FFT frequency.

/// Signed integer frequency of DFT index m (0..N-1).
inline int fft_freq(int N, int m) { return (m <= N / 2) ? m : m - N; }

/// Physical wavenumber of DFT index m.
inline double wavenumber(const GridSpec& g, int m) {
    return (3.14159265358979323846 / g.L) * fft_freq(g.N, m);
}

Spectrum to_spectral(const ScalarField& f);
ScalarField from_spectral(const GridSpec& g, const Spectrum& modes, double t = 0.0);

/// Forward then inverse transform (the round-trip identity up to roundoff).
ScalarField spectral_roundtrip(const ScalarField& f);

/// Spectral derivative D^beta for |beta| <= 2.
ScalarField derivative(const ScalarField& f, const MultiIndex& beta);
Spectrum derivative_spectrum(const GridSpec& g, const Spectrum& modes, const MultiIndex& beta);

/// Spectral Laplacian (multiplier -|k|^2).
ScalarField laplacian(const ScalarField& f);

/// 2/3-rule truncation: zero every mode with |freq_j| > floor(N/3) on any axis.
void dealias(const GridSpec& g, Spectrum& modes);

/// Iterate all modes; fn(flat, k) receives the flat index and wavevector.
void for_each_mode(const GridSpec& g,
                   const std::function<void(std::size_t, const std::array<double, 3>&)>& fn);

double sup_norm(const ScalarField& f);
double sup_norm(const VectorField& v);
void check_finite(const ScalarField& f, const char* what);

/// Evaluate an analytic function of position on the grid.
ScalarField sample_function(const GridSpec& g,
                            const std::function<double(const std::array<double, 3>&)>& fn,
                            double t = 0.0);

/// Spectral restriction onto a coarser grid with the same box: keep the
/// modes the coarse grid represents (|freq| < N_coarse/2 on every axis,
/// Nyquist dropped), rescale, and inverse-transform on the coarse grid.
ScalarField restrict_spectral(const ScalarField& fine, const GridSpec& coarse);
VectorField restrict_spectral(const VectorField& fine, const GridSpec& coarse);

}  // namespace branchflow
