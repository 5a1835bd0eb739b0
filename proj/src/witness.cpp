#include "branchflow/witness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "branchflow/kernels.hpp"
#include "branchflow/norms.hpp"

namespace branchflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

VectorField lap_scaled(const VectorField& v, double factor) {
    const GridSpec& g = v.grid();
    VectorField out(g, v.t());
    for (int i = 0; i < g.n; ++i) {
        ScalarField l = laplacian(v.comp[i]);
        for (std::size_t p = 0; p < g.size(); ++p) out.comp[i].samples[p] = factor * l.samples[p];
    }
    return out;
}

double l2_norm_vec(const VectorField& v) {
    const double cell = std::pow(v.grid().dx(), v.grid().n);
    double acc = 0.0;
    for (const auto& c : v.comp)
        for (double s : c.samples) acc += s * s;
    return std::sqrt(acc * cell);
}

}  // namespace

Trajectory synthesize_force(const Trajectory& traj, double nu) {
    if (!(nu > 0.0)) throw ValidationError("synthesize_force: nu must be > 0");
    Trajectory force{traj.tg, {}};
    force.frames.reserve(traj.tg.M);
    for (const auto& frame : traj.frames) force.frames.push_back(lap_scaled(frame, -nu));
    return force;
}

ResidualReport euler_residual(const Trajectory& traj) {
    if (traj.tg.M < 3) throw ValidationError("euler_residual: need M >= 3");
    const GridSpec& g = traj.grid();
    const double dt = traj.tg.dt();
    ResidualReport rep;
    for (int m = 1; m < traj.tg.M - 1; ++m) {
        VectorField nl = nonlinear_term(traj.frames[m]);
        VectorField r(g, traj.tg.node(m));
        for (int i = 0; i < g.n; ++i)
            for (std::size_t p = 0; p < g.size(); ++p)
                r.comp[i].samples[p] = (traj.frames[m + 1].comp[i].samples[p] -
                                        traj.frames[m - 1].comp[i].samples[p]) /
                                           (2.0 * dt) -
                                       nl.comp[i].samples[p];
        rep.sup.push_back(sup_norm(r));
        rep.l2.push_back(l2_norm_vec(r));
        rep.sup_max = std::max(rep.sup_max, rep.sup.back());
    }
    return rep;
}

ResidualReport nse_residual(const Trajectory& traj, const Trajectory& force, double nu) {
    if (traj.tg.M < 3) throw ValidationError("nse_residual: need M >= 3");
    const GridSpec& g = traj.grid();
    const double dt = traj.tg.dt();
    ResidualReport rep;
    for (int m = 1; m < traj.tg.M - 1; ++m) {
        VectorField nl = nonlinear_term(traj.frames[m]);
        VectorField lap = lap_scaled(traj.frames[m], nu);
        VectorField r(g, traj.tg.node(m));
        for (int i = 0; i < g.n; ++i)
            for (std::size_t p = 0; p < g.size(); ++p)
                r.comp[i].samples[p] = (traj.frames[m + 1].comp[i].samples[p] -
                                        traj.frames[m - 1].comp[i].samples[p]) /
                                           (2.0 * dt) -
                                       lap.comp[i].samples[p] - nl.comp[i].samples[p] -
                                       force.frames[m].comp[i].samples[p];
        rep.sup.push_back(sup_norm(r));
        rep.l2.push_back(l2_norm_vec(r));
        rep.sup_max = std::max(rep.sup_max, rep.sup.back());
    }
    return rep;
}

double c2_comp1_spectral(const VectorField& frame, int max_freq) {
    const GridSpec& g = frame.grid();
    Spectrum fh = to_spectral(frame.comp[0]);
    if (max_freq > 0) {
        std::size_t p = 0;
        for (int m2 = 0; m2 < (g.n == 3 ? g.N : 1); ++m2)
            for (int m1 = 0; m1 < g.N; ++m1)
                for (int m0 = 0; m0 < g.N; ++m0, ++p) {
                    bool kill = std::abs(fft_freq(g.N, m0)) > max_freq ||
                                std::abs(fft_freq(g.N, m1)) > max_freq;
                    if (g.n == 3) kill = kill || std::abs(fft_freq(g.N, m2)) > max_freq;
                    if (kill) fh[p] = 0.0;
                }
    }
    double tot = 0.0;
    for (const auto& b : multiindices_up_to_2(g.n))
        tot += sup_norm(from_spectral(g, (order(b) == 0) ? fh : derivative_spectrum(g, fh, b)));
    return tot;
}

double c2_comp1_analytic(const GridSpec& g, double eps) {
    // in-plane factors of h_1 = f(x1, x2) psi'(x3), f = x1 g(r):
    // sup over the (x1, x2) grid of f and its derivatives up to order 2
    double Sf = 0.0, Sf1 = 0.0, Sf2 = 0.0, Sf11 = 0.0, Sf22 = 0.0, Sf12 = 0.0;
    for (int j1 = 0; j1 < g.N; ++j1)
        for (int j0 = 0; j0 < g.N; ++j0) {
            const double x1 = g.coord(j0), x2 = g.coord(j1);
            const double r = std::hypot(x1, x2);
            if (r < 1e-14) continue;
            const GEval e = g_eps_eval(r, eps);
            Sf = std::max(Sf, std::abs(x1 * e.g));
            Sf1 = std::max(Sf1, std::abs(e.g + x1 * x1 * e.dg / r));
            Sf2 = std::max(Sf2, std::abs(x1 * x2 * e.dg / r));
            Sf11 = std::max(Sf11, std::abs(3.0 * e.dg * x1 / r + e.d2g * x1 * x1 * x1 / (r * r) -
                                           e.dg * x1 * x1 * x1 / (r * r * r)));
            Sf22 = std::max(Sf22, std::abs(x1 * e.dg / r + x1 * x2 * x2 * e.d2g / (r * r) -
                                           x1 * x2 * x2 * e.dg / (r * r * r)));
            Sf12 = std::max(Sf12, std::abs(x2 * e.dg / r + x1 * x1 * x2 * e.d2g / (r * r) -
                                           x1 * x1 * x2 * e.dg / (r * r * r)));
        }
    // x3 factors: psi', psi'', psi''' on the grid line
    double P0 = 0.0, P1 = 0.0, P2 = 0.0;
    for (int j = 0; j < g.N; ++j) {
        const double z = g.coord(j);
        const double e = std::exp(-z * z / (2.0 * kTaperW3));
        P0 = std::max(P0, std::abs((1.0 - z * z / kTaperW3) * e));
        P1 = std::max(P1, std::abs((z * z * z / (kTaperW3 * kTaperW3) - 3.0 * z / kTaperW3) * e));
        P2 = std::max(P2, std::abs((-z * z * z * z / (kTaperW3 * kTaperW3 * kTaperW3) +
                                    6.0 * z * z / (kTaperW3 * kTaperW3) - 3.0 / kTaperW3) *
                                   e));
    }
    // sum over |beta| <= 2 of the factorized sups
    return Sf * P0 + Sf1 * P0 + Sf2 * P0 + Sf * P1 + Sf11 * P0 + Sf22 * P0 + Sf12 * P0 +
           Sf1 * P1 + Sf2 * P1 + Sf * P2;
}

SchemeParams witness_scheme_params(const DataParams& dp) {
    SchemeParams sp;
    sp.dp = dp;
    sp.s = 0.05;
    sp.nu = 0.05;
    sp.T = 0.1;
    sp.M = 17;
    sp.k_max = 40;
    sp.tol = 1e-8;
    return sp;
}

VectorField witness_reference_data(const DataParams& dp, double L) {
    const GridSpec ref = make_grid(3, kWitnessRefN, L);
    return (dp.kind == DataKind::singular) ? make_singular_data(dp, ref)
                                           : make_smooth_data(ref, dp.amplitude);
}

WitnessBranches run_witness_single(const DataParams& dp, const SchemeParams& sp,
                                   const GridSpec& grid, int common_band,
                                   const VectorField* h_ref) {
    const auto t0 = std::chrono::steady_clock::now();
    VectorField h_ref_local;
    if (h_ref == nullptr) {
        h_ref_local = witness_reference_data(dp, grid.L);
        h_ref = &h_ref_local;
    }
    VectorField h_minus = restrict_spectral(*h_ref, grid);

    // backward solve from h^- (negation path), giving v^{E,-} on [s, T]
    auto [W, rep_b] = solve_reversed(h_minus, sp, ReversalPath::negation);

    // h^E = v^{E,-}(T); branch A forward from h^E; branch B = reflected W
    const VectorField& hE = W.frames.back();
    auto [A, rep_a] = solve_fixed_point(hE, sp);
    Trajectory B{W.tg, {}};
    B.frames.reserve(W.tg.M);
    for (int m = W.tg.M - 1; m >= 0; --m) {
        VectorField f = W.frames[m];
        f.set_t(W.tg.node(W.tg.M - 1 - m));
        B.frames.push_back(std::move(f));
    }

    WitnessBranches out{std::move(A), std::move(B), {}};
    WitnessRun& run = out.run;
    run.N = grid.N;
    run.k_backward = rep_b.k_stop;
    run.k_forward = rep_a.k_stop;
    double gap0 = 0.0, gapT = 0.0;
    for (int i = 0; i < grid.n; ++i)
        for (std::size_t p = 0; p < grid.size(); ++p) {
            gap0 = std::max(gap0, std::abs(out.branch_A.frames.front().comp[i].samples[p] -
                                           out.branch_B.frames.front().comp[i].samples[p]));
            gapT = std::max(gapT, std::abs(out.branch_A.frames.back().comp[i].samples[p] -
                                           out.branch_B.frames.back().comp[i].samples[p]));
        }
    run.shared_data_gap = gap0;
    run.terminal_gap = gapT;
    run.residual_A = euler_residual(out.branch_A).sup_max;
    run.residual_B = euler_residual(out.branch_B).sup_max;
    run.c2_terminal_A = c2_comp1_spectral(out.branch_A.frames.back(), common_band);
    // singular family: branch B's terminal is the sampled datum; its norm is
    // taken from the closed forms at the grid's own resolution (the
    // grid-scale rendering of "h not in C2"). Smooth control: measured on
    // the frame itself, where it must be resolution-stable.
    run.c2_terminal_B = (dp.kind == DataKind::singular)
                            ? c2_comp1_analytic(grid, dp.eps)
                            : c2_comp1_spectral(out.branch_B.frames.back());
    Trajectory force = synthesize_force(out.branch_A, sp.nu);
    for (const auto& f : force.frames)
        run.force_l2_max = std::max(run.force_l2_max, l2_norm_vec(f));
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

WitnessReport run_witness(const DataParams& dp, const SchemeParams& sp,
                          const std::vector<int>& grid_Ns, double L) {
    if (grid_Ns.size() < 2) throw ValidationError("run_witness: ladder needs >= 2 resolutions");
    // branch A terminals are compared in the band the coarsest ladder grid
    // resolves after dealiasing; branch B terminals are the exact datum
    // evaluated on each grid, so they carry their own grid's bandwidth
    const int band = *std::min_element(grid_Ns.begin(), grid_Ns.end()) / 3;
    const VectorField h_ref = witness_reference_data(dp, L);
    WitnessReport rep;
    for (int N : grid_Ns)
        rep.runs.push_back(run_witness_single(dp, sp, make_grid(3, N, L), band, &h_ref).run);
    for (std::size_t i = 0; i + 1 < rep.runs.size(); ++i) {
        rep.log_ratio_A.push_back(
            std::log(rep.runs[i + 1].c2_terminal_A / rep.runs[i].c2_terminal_A));
        rep.log_ratio_B.push_back(
            std::log(rep.runs[i + 1].c2_terminal_B / rep.runs[i].c2_terminal_B));
        rep.target_log_ratio.push_back(2.0 * dp.eps *
                                       std::log(double(rep.runs[i + 1].N) / rep.runs[i].N));
    }
    return rep;
}

namespace {

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 48);
}

}  // namespace

double bound_integral(double delta, double L_const, int n) {
    if (!(delta > 0.0)) throw ValidationError("bound_integral: delta must be > 0");
    if (L_const < 0.0) throw ValidationError("bound_integral: L_const must be >= 0");
    if (L_const == 0.0) return 0.0;
    // substitution u = 1/(4 sigma):
    // I = 2 L (4 pi)^{-n/2} int_{1/(4 delta)}^infty sqrt(u) e^{-u} du
    const double u0 = 1.0 / (4.0 * delta);
    auto f = [](double u) { return std::sqrt(u) * std::exp(-u); };
    const double tail = integrate(f, u0, u0 + 80.0, 1e-13);
    return 2.0 * L_const * std::pow(4.0 * kPi, -0.5 * n) * tail;
}

}  // namespace branchflow
