#pragma once

#include <vector>

#include "branchflow/field.hpp"
#include "branchflow/grid.hpp"

namespace branchflow {

/// Heat semigroup parameters: diffusion coefficient and elapsed time.
struct HeatParams {
    double s_visc = 0.05;
    double dt = 0.0;
};

/// Pointwise Gaussian kernel (4 pi s dt)^{-n/2} exp(-r^2 / (4 s dt)).
/// Exists for unit tests and the bound-integral evaluator; all dynamic
/// kernel actions are spectral multipliers.
double heat_kernel_point(int n, const HeatParams& hp, double r);

/// In-place spectral heat multiplier exp(-s |k|^2 dt).
void apply_heat_multiplier(const GridSpec& g, double s_visc, double dt, Spectrum& modes);

ScalarField heat_propagate(const ScalarField& f, const HeatParams& hp);
VectorField heat_propagate(const VectorField& v, const HeatParams& hp);

/// In-place spectral Leray projection P = I - k k^T / |k|^2 (identity at k = 0).
void leray_project_spectra(const GridSpec& g, std::vector<Spectrum>& vhat);

VectorField leray_project(const VectorField& v);

/// Gradient-of-pressure contribution of Eq-of-motion: multiplier -i k_i/|k|^2
/// applied to the transform of sum_{j,m} v_{m,j} v_{j,m} (dealiased products).
VectorField pressure_gradient_term(const VectorField& v);

/// Same, acting on dealiased spectra of v; returns the n component spectra.
std::vector<Spectrum> pressure_gradient_spectra(const GridSpec& g,
                                                const std::vector<Spectrum>& vhat);

/// Streaming evaluator of the space-time heat convolution g * G^s on a
/// uniform time grid. Per mode the time integral uses piecewise-linear
/// interpolation of the source with the exponential factor integrated in
/// closed form on each subinterval, so the accumulator recurrence
///   S_m = e^{-a dt} S_{m-1} + w0(a) src_{m-1} + w1(a) src_m,  a = s |k|^2,
/// reproduces the full integral from node 0 up to node m.
class DuhamelAccumulator {
  public:
    DuhamelAccumulator(const GridSpec& g, double s_visc, double dt, int ncomp);

    /// Fold in the subinterval [t_{m-1}, t_m].
    void advance(const std::vector<Spectrum>& src_prev, const std::vector<Spectrum>& src_curr);

    /// Integral spectra up to the most recently advanced node.
    const std::vector<Spectrum>& value() const { return acc_; }

    int nodes_advanced() const { return steps_; }

  private:
    GridSpec grid_;
    std::vector<double> decay_, w0_, w1_;
    std::vector<Spectrum> acc_;
    int steps_ = 0;
};

/// One-shot Duhamel convolution of a per-node source trajectory up to node
/// m_target, with an optional first-order kernel-derivative multiplier
/// (convolution against D^beta G^s, |beta| <= 1). m_target = 0 gives zero.
Spectrum duhamel(const std::vector<Spectrum>& g_nodes, const GridSpec& g, const TimeGrid& tg,
                 double s_visc, int m_target, const MultiIndex& beta = {0, 0, 0});

/// Serial reference implementations of the three multiplier kernels, kept
/// for determinism tests and the kernel benchmark.
namespace ref {
void apply_heat_multiplier(const GridSpec& g, double s_visc, double dt, Spectrum& modes);
void leray_project_spectra(const GridSpec& g, std::vector<Spectrum>& vhat);
void duhamel_step(const GridSpec& g, double s_visc, double dt, std::vector<Spectrum>& acc,
                  const std::vector<Spectrum>& src_prev, const std::vector<Spectrum>& src_curr);
}  // namespace ref

}  // namespace branchflow
