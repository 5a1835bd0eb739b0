#pragma once

#include <vector>

#include "branchflow/scheme.hpp"

namespace branchflow {

/// Per-node force frames f = -nu Lap v.
Trajectory synthesize_force(const Trajectory& traj, double nu);

/// Per-interior-node residual norms (centered time differences; endpoints
/// excluded, so entry m corresponds to node m + 1).
struct ResidualReport {
    std::vector<double> sup;
    std::vector<double> l2;
    double sup_max = 0.0;
};

/// R = d_t v + (v . grad) v - pressure_gradient_term(v).
ResidualReport euler_residual(const Trajectory& traj);

/// R = d_t v - nu Lap v + (v . grad) v - pressure_gradient_term(v) - f.
ResidualReport nse_residual(const Trajectory& traj, const Trajectory& force, double nu);

/// Composite C2-style norm (sum over |beta| <= 2 of sup |D^beta .|) of the
/// first component of a frame, by spectral differentiation. If max_freq > 0,
/// modes with any |signed freq| > max_freq are zeroed first; a fixed band lets
/// the same computed field be compared across grids of different resolution.
double c2_comp1_spectral(const VectorField& frame, int max_freq = -1);

/// The same norm for the exact singular datum h_1 = (x1 g) psi'(x3),
/// evaluated from the closed forms on the N-grid via the factorization
/// sup |D^beta h_1| = sup-in-plane x sup-in-x3. This is the reflected
/// branch's terminal frame by construction.
double c2_comp1_analytic(const GridSpec& g, double eps);

struct WitnessRun {
    int N = 0;
    int k_backward = 0, k_forward = 0;
    double shared_data_gap = 0.0;  // sup gap of the two branch initial frames
    double terminal_gap = 0.0;     // composite-sup gap at t = T
    double residual_A = 0.0, residual_B = 0.0;  // max interior sup residuals
    double c2_terminal_A = 0.0, c2_terminal_B = 0.0;
    double force_l2_max = 0.0;
    double seconds = 0.0;
};

struct WitnessReport {
    std::vector<WitnessRun> runs;         // one per ladder resolution
    std::vector<double> log_ratio_A;      // ln c2A(N_{i+1}) / c2A(N_i)
    std::vector<double> log_ratio_B;
    std::vector<double> target_log_ratio; // 2 eps ln(N_{i+1}/N_i)
};

/// Points per axis of the fixed reference grid the witness data is sampled
/// on before spectral restriction to each ladder grid. One reference sample
/// makes the ladder members share their in-band data exactly, so branch A's
/// terminal can be compared across resolutions; branch B's pinned terminal
/// still reveals more of the reference spectrum as the grid refines.
inline constexpr int kWitnessRefN = 96;

/// Data on the reference grid for the witness pipeline (singular family, or
/// the smooth control family).
VectorField witness_reference_data(const DataParams& dp, double L);

/// The witness pipeline at one resolution: backward solve from the (spectrally
/// restricted) h^-, extract h^E = v^{E,-}(T), forward branch A from h^E,
/// reflected branch B; residuals, gaps, and terminal C2 norms. Exposed
/// separately so the CLI can emit per-branch artifacts. h_ref, when given,
/// must live on the kWitnessRefN grid; otherwise it is built internally.
struct WitnessBranches {
    Trajectory branch_A;
    Trajectory branch_B;
    WitnessRun run;
};
WitnessBranches run_witness_single(const DataParams& dp, const SchemeParams& sp,
                                   const GridSpec& grid, int common_band = -1,
                                   const VectorField* h_ref = nullptr);

/// Grid-ladder driver (independent runs per N).
WitnessReport run_witness(const DataParams& dp, const SchemeParams& sp,
                          const std::vector<int>& grid_Ns, double L);

/// Scheme parameters for the witness pipeline (small diffusion, short
/// horizon, generous iteration budget so every resolved shell reaches the
/// fixed point and residuals sit at tolerance scale on all ladder grids).
SchemeParams witness_scheme_params(const DataParams& dp);

/// Eq.-level bound integral I(Delta) = |L_const int_0^Delta (1/4) (4 pi)^{-n/2}
/// sigma^{-5/2} exp(-1/(4 sigma)) d sigma|, via the substitution u = 1/(4 sigma)
/// and adaptive Simpson quadrature.
double bound_integral(double delta, double L_const, int n);

}  // namespace branchflow
