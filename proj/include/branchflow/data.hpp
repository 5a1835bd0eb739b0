#pragma once

#include <vector>

#include "branchflow/field.hpp"
#include "branchflow/grid.hpp"

namespace branchflow {

enum class DataKind { singular, smooth };

/// Initial-data family parameters.
struct DataParams {
    double eps = 0.1;  // singularity exponent, 0 < eps <= 0.25
    DataKind kind = DataKind::singular;
    double amplitude = 1.0;
};

DataParams make_data_params(double eps, DataKind kind, double amplitude = 1.0);

/// Radial profile g(r) = r cos(r^{-eps}) (1 + r^2)^{-6} and its first two
/// derivatives, by the closed-form expressions (r = 0 returns zeros: the
/// Cartesian combinations below carry r-prefactors that force the limit).
struct GEval {
    double g = 0.0;
    double dg = 0.0;
    double d2g = 0.0;
};
GEval g_eps_eval(double r2, double eps);

/// In-plane second derivative d^2 h_1 / dx_1^2 of the closed form at (x1, x2)
/// in the x3 = 0 plane; the quantity whose near-axis growth ~ r^{-2 eps} the
/// scaling diagnostic measures. Analytic, never spectral.
double h1_d11_analytic(double x1, double x2, double eps);

/// The singular 3-D family: with q = g + r g'/2 and the x3 taper
/// psi(z) = z exp(-z^2/(2 w3)),
///   h = (x1 g psi'(x3), x2 g psi'(x3), -2 psi(x3) q),
/// which is divergence-free analytically for any psi. After sampling, a
/// per-mode constraint projection removes the (small, aliasing-borne)
/// gradient and vorticity-z components so that the discrete divergence and
/// omega_3 vanish to machine precision.
VectorField make_singular_data(const DataParams& dp, const GridSpec& g);

/// Same family without the constraint projection (diagnostics/tests).
VectorField make_singular_data_raw(const DataParams& dp, const GridSpec& g);

/// Width of the x3 taper.
inline constexpr double kTaperW3 = 1.0;

/// Smooth control family: curl of A = (0, 0, a exp(-|x|^2 / (2 w))), w = 0.8,
/// exactly divergence-free and rapidly decaying.
VectorField make_smooth_data(const GridSpec& g, double amplitude);
inline constexpr double kSmoothW = 0.8;

/// 2-D radial analogue (x1 g, x2 g) with the vorticity component removed
/// per mode (omega_3(0) = 0 exactly); the trivializing 2-D case.
VectorField make_radial_data_2d(const DataParams& dp, const GridSpec& g);

/// Sup norm of the spectral divergence.
double divergence_sup(const VectorField& v);

/// Spectral curl (n = 3).
VectorField curl(const VectorField& v);

/// omega_3 = d v2/dx1 - d v1/dx2 (works for n = 2 and n = 3).
ScalarField vorticity_z(const VectorField& v);

///// Polynomial-decay constants: smallest c with |D^gamma f| <= c/(1+|x|^l)
/// over grid points with 1 <= |x| <= L-1, per |gamma| <= m.
struct DecayEntry {
    MultiIndex beta{0, 0, 0};
    double c = 0.0;
};
struct DecayReport {
    double l = 0.0;
    std::vector<DecayEntry> entries;
    double cap = 0.0;
    bool within_cap = true;
};
DecayReport decay_report(const ScalarField& f, double l, int m, double cap = 10.0);

/// Annulus-ladder scaling fit of sup |h_{1,11}| ~ r^{-2 eps}.
struct SingularityReport {
    std::vector<double> radii;                  // strictly decreasing
    std::vector<double> sup_second_derivative;  // per annulus [rho, 2 rho]
    double fitted_slope = 0.0;
    double alpha_estimate = 0.0;  // 1 - 2 eps
};
/// The ladder starts at rho0 = ((2^eps - 1)/(2 pi))^{1/eps} — the largest
/// radius at which the phase r^{-eps} sweeps a full period across one
/// annulus, so every annulus sup tracks the envelope — and descends by
/// factors of 2.
SingularityReport singularity_scaling(const DataParams& dp, int n_annuli = 6);

}  // namespace branchflow
