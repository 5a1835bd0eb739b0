#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "branchflow/data.hpp"
#include "branchflow/field.hpp"
#include "branchflow/grid.hpp"

namespace branchflow {

enum class Direction { forward, reversed };

/// All scheme knobs. s doubles as diffusion coefficient and start time; nu is
/// the force-synthesis viscosity and defaults to s (decouple deliberately for
/// experiments only).
struct SchemeParams {
    double s = 0.05;
    double nu = 0.05;
    double T = 0.1;
    int M = 17;
    int k_max = 40;
    double tol = 1e-8;
    Direction direction = Direction::forward;
    DataParams dp{};
};
SchemeParams make_scheme_params(double s, double nu, double T, int M, int k_max, double tol,
                                Direction direction, const DataParams& dp);

/// A velocity field per time-grid node; the object the Picard iteration maps.
struct Trajectory {
    TimeGrid tg;
    std::vector<VectorField> frames;

    const GridSpec& grid() const { return frames.at(0).grid(); }
};

/// Thrown when an iterate exceeds the blow-up guard.
struct BlowUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractionIter {
    int k = 0;
    double delta_norm = 0.0;    // ||delta v^(k)|| composite sup over nodes
    double reduced_norm = 0.0;  // ||delta v^{*,(k)}||
    double linear_norm = 0.0;   // ||s Lap delta v^(k) * G^s||
};

struct ContractionReport {
    std::vector<ContractionIter> iters;
    std::vector<double> ratios;  // r_k = reduced(k) / reduced(k-1), k >= 2
    bool converged = false;
    bool contraction_ok = false;  // all ratios <= 1/2
    int k_stop = 0;
    double T_used = 0.0;  // admissible horizon found by the auto-search
};

/// v^(0): every node is the heat propagation of h from time s.
Trajectory init_iterate(const VectorField& h, const SchemeParams& sp);

/// N_i = -sum_j v_j v_{i,j} + pressure_gradient_term(v)_i with dealiased
/// quadratic products (inputs and outputs band-limited to |freq| <= N/3).
VectorField nonlinear_term(const VectorField& v);
std::vector<Spectrum> nonlinear_spectra(const GridSpec& g, const std::vector<Spectrum>& vhat);

/// One Picard step: v^(k)(t) = h *_sp G^s + (N^(k-1) - s Lap v^(k-1)) * G^s.
/// Direction reversed flips the sign of N. Frame 0 stays pinned to h.
Trajectory picard_step(const Trajectory& prev, const VectorField& h, const SchemeParams& sp);

/// Increment and reduced increment. The reduced increment is formed from the
/// increment itself: delta v^{*,(k)} = delta v^(k) + s Lap delta v^(k) * G^s
/// (the quantity the contraction lemma controls; see README on the deviation
/// from a literal reading of the definition).
std::pair<Trajectory, Trajectory> increments(const Trajectory& curr, const Trajectory& prev,
                                             const SchemeParams& sp);

/// Composite sup over nodes, excluding the first interior node for singular
/// data (the documented transient window of one time step).
double scheme_trajectory_norm(const Trajectory& traj, const SchemeParams& sp);

/// Iterate to tol / k_max at fixed T, recording norms and ratios.
std::pair<Trajectory, ContractionReport> iterate_fixed_point(const VectorField& h,
                                                             const SchemeParams& sp);

/// Horizon auto-search: halve T - s until every measured ratio r_k (k >= 2)
/// is <= 1/2, or T - s < 1e-3. Returns the report at the admissible horizon.
ContractionReport contraction_report(const VectorField& h, const SchemeParams& sp);

/// Full solve at the given parameters (no auto-search).
std::pair<Trajectory, ContractionReport> solve_fixed_point(const VectorField& h,
                                                           const SchemeParams& sp);

/// Relabel node times from [s, T] to [0, T - s]; samples untouched.
Trajectory time_shift(const Trajectory& traj);

enum class ReversalPath { negation, direct };

/// Solve the time-reversed Euler system from h_minus. Path negation (primary):
/// solve forward from -h_minus and negate. Path direct: scheme with the
/// nonlinearity sign flipped. The two agree to roundoff.
std::pair<Trajectory, ContractionReport> solve_reversed(const VectorField& h_minus,
                                                        const SchemeParams& sp,
                                                        ReversalPath path = ReversalPath::negation);

}  // namespace branchflow
