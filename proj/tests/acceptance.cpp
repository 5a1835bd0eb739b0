// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "branchflow/data.hpp"
#include "branchflow/field.hpp"
#include "branchflow/kernels.hpp"
#include "branchflow/norms.hpp"
#include "branchflow/scheme.hpp"
#include "branchflow/witness.hpp"

namespace bf = branchflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

class Criterion {
  public:
    Criterion(int id, const char* title) : id_(id), title_(title) {
        t0_ = std::chrono::steady_clock::now();
    }
    void check(bool ok, const char* what) {
        if (!ok) {
            ok_ = false;
            std::printf("  [criterion %d] failed: %s\n", id_, what);
        }
    }
    void note(const char* fmt, double a, double b = 0.0) { std::printf(fmt, a, b); }
    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        std::printf("criterion %2d %-34s %s  (%.1f s)\n", id_, title_, ok_ ? "PASS" : "FAIL",
                    secs);
        std::fflush(stdout);
        if (!ok_) ++g_failures;
    }

  private:
    int id_;
    const char* title_;
    bool ok_ = true;
    std::chrono::steady_clock::time_point t0_;
};

double grad_sup(const bf::VectorField& v) {
    double out = 0.0;
    for (int i = 0; i < v.grid().n; ++i)
        for (int j = 0; j < v.grid().n; ++j) {
            bf::MultiIndex b{0, 0, 0};
            b[j] = 1;
            out = std::max(out, bf::sup_norm(bf::derivative(v.comp[i], b)));
        }
    return std::max(out, 1e-300);
}

bf::SchemeParams desk_params(bf::DataKind kind, int M = 17) {
    bf::SchemeParams sp;
    sp.dp = bf::make_data_params(0.1, kind);
    sp.s = 0.05;
    sp.nu = 0.05;
    sp.T = 0.1;
    sp.M = M;
    sp.k_max = 40;
    sp.tol = 1e-8;
    return sp;
}

void criterion_1() {
    Criterion c(1, "data identities");
    const bf::GridSpec g = bf::make_grid(3, 64, 8.0);
    const bf::VectorField hs = bf::make_singular_data(bf::make_data_params(0.1, bf::DataKind::singular), g);
    const double ss = grad_sup(hs);
    c.check(bf::divergence_sup(hs) / ss <= 1e-8, "singular divergence > 1e-8 relative");
    c.check(bf::sup_norm(bf::vorticity_z(hs)) / ss <= 1e-8, "singular omega3 > 1e-8x");
    const bf::VectorField hm = bf::make_smooth_data(g, 1.0);
    c.check(bf::divergence_sup(hm) / grad_sup(hm) <= 1e-12, "smooth divergence > 1e-12x");
}

void criterion_2() {
    Criterion c(2, "kernel identities");
    const bf::GridSpec g = bf::make_grid(3, 32, 8.0);
    // random-ish smooth field
    bf::VectorField v(g);
    for (int i = 0; i < 3; ++i)
        v.comp[i] = bf::sample_function(g, [i, &g](const std::array<double, 3>& x) {
            return std::sin(kPi / g.L * (x[0] + i)) * std::cos(2.0 * kPi / g.L * x[1]) *
                   std::cos(kPi / g.L * x[2]);
        });
    // Leray idempotence
    const bf::VectorField p1 = bf::leray_project(v);
    const bf::VectorField p2 = bf::leray_project(p1);
    double gap = 0.0;
    for (int i = 0; i < 3; ++i)
        for (std::size_t q = 0; q < g.size(); ++q)
            gap = std::max(gap, std::abs(p1.comp[i].samples[q] - p2.comp[i].samples[q]));
    c.check(gap <= 1e-12, "Leray projection not idempotent to 1e-12");
    // gradient annihilation
    const bf::ScalarField phi = bf::sample_function(g, [&g](const std::array<double, 3>& x) {
        return std::sin(2.0 * kPi / g.L * x[0]) * std::sin(kPi / g.L * x[2]);
    });
    bf::VectorField grad(g);
    for (int i = 0; i < 3; ++i) {
        bf::MultiIndex b{0, 0, 0};
        b[i] = 1;
        grad.comp[i] = bf::derivative(phi, b);
    }
    c.check(bf::sup_norm(bf::leray_project(grad)) <= 1e-12, "gradient not annihilated");
    // heat semigroup composition
    bf::ScalarField a = bf::heat_propagate(v.comp[0], {0.05, 0.03});
    a = bf::heat_propagate(a, {0.05, 0.02});
    const bf::ScalarField b = bf::heat_propagate(v.comp[0], {0.05, 0.05});
    double hgap = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q)
        hgap = std::max(hgap, std::abs(a.samples[q] - b.samples[q]));
    c.check(hgap <= 1e-12, "heat semigroup composition violated");
    // Duhamel single-mode closed form: constant source on one mode
    const bf::TimeGrid tg = bf::make_time_grid(0.0, 0.1, 33);
    const double s_visc = 0.05;
    const double k = 2.0 * kPi / g.L;
    const double aa = s_visc * k * k;
    bf::Spectrum src(g.size(), 0.0);
    src[2] = 1.0;  // mode freq (2, 0, 0) along fastest axis
    std::vector<bf::Spectrum> nodes(33, src);
    const bf::Spectrum out = bf::duhamel(nodes, g, tg, s_visc, 32);
    const double expect = (1.0 - std::exp(-aa * 0.1)) / aa;
    c.check(std::abs(out[2].real() - expect) <= 1e-10, "Duhamel closed form off by > 1e-10");
}

void criterion_3() {
    Criterion c(3, "time-quadrature convergence");
    // manufactured solution: pure heat flow v(t) = e^{s Lap (t-s)} h; the
    // centered-difference residual of d_t v - s Lap v decays at order 2 in dt
    const bf::GridSpec g = bf::make_grid(3, 32, 8.0);
    const bf::VectorField h = bf::make_smooth_data(g, 1.0);
    std::vector<double> dts, res;
    for (int M : {9, 17, 33}) {
        const bf::SchemeParams sp = desk_params(bf::DataKind::smooth, M);
        const bf::Trajectory traj = bf::init_iterate(h, sp);
        double worst = 0.0;
        for (int m = 1; m < M - 1; ++m) {
            double sup = 0.0;
            for (int i = 0; i < 3; ++i) {
                const bf::ScalarField lap = bf::laplacian(traj.frames[m].comp[i]);
                for (std::size_t q = 0; q < g.size(); ++q) {
                    const double dvdt = (traj.frames[m + 1].comp[i].samples[q] -
                                         traj.frames[m - 1].comp[i].samples[q]) /
                                        (2.0 * traj.tg.dt());
                    sup = std::max(sup, std::abs(dvdt - sp.s * lap.samples[q]));
                }
            }
            worst = std::max(worst, sup);
        }
        dts.push_back(traj.tg.dt());
        res.push_back(worst);
    }
    const double slope1 = std::log(res[0] / res[1]) / std::log(dts[0] / dts[1]);
    const double slope2 = std::log(res[1] / res[2]) / std::log(dts[1] / dts[2]);
    std::printf("  [criterion 3] slopes %.3f, %.3f\n", slope1, slope2);
    c.check(slope1 >= 1.8, "slope M 9->17 below 1.8");
    c.check(slope2 >= 1.8, "slope M 17->33 below 1.8");
}

void criterion_4_5() {
    {
        Criterion c(4, "contraction of the Picard map");
        for (bf::DataKind kind : {bf::DataKind::smooth, bf::DataKind::singular}) {
            const bf::GridSpec g = bf::make_grid(3, 32, 8.0);
            const bf::VectorField h =
                (kind == bf::DataKind::smooth)
                    ? bf::make_smooth_data(g, 1.0)
                    : bf::make_singular_data(bf::make_data_params(0.1, kind), g);
            const bf::ContractionReport rep = bf::contraction_report(h, desk_params(kind));
            c.check(rep.contraction_ok, "auto-search found no admissible horizon");
            c.check(rep.T_used - 0.05 >= 1e-3, "admissible horizon below 1e-3");
            for (double r : rep.ratios) c.check(r <= 0.5, "a measured ratio exceeds 1/2");
            c.check(!rep.iters.empty() && rep.iters.back().linear_norm < 1e-8,
                    "linear-term norm did not fall below tol");
        }
    }
    {
        Criterion c(5, "fixed point solves Euler");
        for (bf::DataKind kind : {bf::DataKind::smooth, bf::DataKind::singular}) {
            const bf::GridSpec g = bf::make_grid(3, 32, 8.0);
            const bf::VectorField h =
                (kind == bf::DataKind::smooth)
                    ? bf::make_smooth_data(g, 1.0)
                    : bf::make_singular_data(bf::make_data_params(0.1, kind), g);
            auto [traj, rep] = bf::solve_fixed_point(h, desk_params(kind));
            c.check(rep.converged, "solve did not converge");
            const bf::ResidualReport res = bf::euler_residual(traj);
            std::printf("  [criterion 5] residual %.2e (%s)\n", res.sup_max,
                        kind == bf::DataKind::smooth ? "smooth" : "singular");
            // residual is time-quadrature-limited (O(dt^2)), not tol-limited;
            // 1e-6 matches the witness-branch residual bar
            c.check(res.sup_max <= 1e-6, "Euler residual above 1e-6");
            const double scale = grad_sup(h);
            for (const auto& f : traj.frames)
                c.check(bf::divergence_sup(f) / scale <= 1e-6,
                        "incompressibility drift above 1e-6 relative");
        }
    }
}

void criterion_6() {
    Criterion c(6, "time-reversal consistency");
    const bf::GridSpec g = bf::make_grid(3, 32, 8.0);
    const bf::VectorField h = bf::make_smooth_data(g, 1.0);
    const bf::SchemeParams sp = desk_params(bf::DataKind::smooth);
    auto [wa, ra] = bf::solve_reversed(h, sp, bf::ReversalPath::negation);
    auto [wb, rb] = bf::solve_reversed(h, sp, bf::ReversalPath::direct);
    c.check(ra.converged && rb.converged, "a reversed solve failed to converge");
    double gap = 0.0;
    for (int m = 0; m < sp.M; ++m)
        for (int i = 0; i < 3; ++i)
            for (std::size_t q = 0; q < g.size(); ++q)
                gap = std::max(gap, std::abs(wa.frames[m].comp[i].samples[q] -
                                             wb.frames[m].comp[i].samples[q]));
    std::printf("  [criterion 6] path gap %.2e\n", gap);
    c.check(gap <= 1e-10, "reversal paths disagree beyond 1e-10");
    // round trip
    auto [fwd, rf] = bf::solve_fixed_point(h, sp);
    auto [bwd, rr] = bf::solve_reversed(fwd.frames.back(), sp);
    c.check(rf.converged && rr.converged, "round-trip solves failed to converge");
    double rt = 0.0;
    for (int i = 0; i < 3; ++i)
        for (std::size_t q = 0; q < g.size(); ++q)
            rt = std::max(rt, std::abs(bwd.frames.back().comp[i].samples[q] -
                                       h.comp[i].samples[q]));
    std::printf("  [criterion 6] round-trip gap %.2e\n", rt);
    c.check(rt <= 1e-6, "round trip misses the data beyond combined tolerance");
}

void criterion_7() {
    Criterion c(7, "singularity scaling");
    for (double eps : {0.05, 0.1}) {
        const bf::SingularityReport r =
            bf::singularity_scaling(bf::make_data_params(eps, bf::DataKind::singular));
        std::printf("  [criterion 7] eps %.2f slope %.4f (target %.2f)\n", eps, r.fitted_slope,
                    -2.0 * eps);
        c.check(std::abs(r.fitted_slope + 2.0 * eps) <= 0.15, "slope outside -2 eps +- 0.15");
    }
}

void criterion_8() {
    Criterion c(8, "non-uniqueness witness ladder");
    const bf::DataParams dp = bf::make_data_params(0.1, bf::DataKind::singular);
    const bf::SchemeParams sp = bf::witness_scheme_params(dp);
    const std::vector<int> ladder{32, 48, 64};
    const bf::WitnessReport rep = bf::run_witness(dp, sp, ladder, 8.0);
    for (const auto& r : rep.runs) {
        std::printf(
            "  [criterion 8] N=%d resA %.2e resB %.2e c2A %.4f c2B %.4f gap0 %.2e gapT %.2e\n",
            r.N, r.residual_A, r.residual_B, r.c2_terminal_A, r.c2_terminal_B,
            r.shared_data_gap, r.terminal_gap);
        c.check(r.residual_A <= 1e-6 && r.residual_B <= 1e-6,
                "a branch residual exceeds the 1e-6 pass bar");
        c.check(r.shared_data_gap <= 10.0 * std::max({r.residual_A, r.residual_B, 1e-12}),
                "shared-data gap above 10x residual scale");
        c.check(std::isfinite(r.force_l2_max) && r.force_l2_max >= 0.0, "force norm not finite");
    }
    for (std::size_t i = 0; i < rep.log_ratio_B.size(); ++i) {
        std::printf("  [criterion 8] rung %zu lnB %.4f (target %.4f) lnA %.4f\n", i,
                    rep.log_ratio_B[i], rep.target_log_ratio[i], rep.log_ratio_A[i]);
        c.check(std::abs(rep.log_ratio_B[i] - rep.target_log_ratio[i]) <= 0.15,
                "reflected-branch growth off the 2 eps rate");
        c.check(std::abs(std::exp(rep.log_ratio_A[i]) - 1.0) <= 0.05,
                "forward-branch terminal norm varies beyond 5%");
    }
    // NSE cancellation identity on the coarsest rung
    const bf::WitnessBranches wb = bf::run_witness_single(dp, sp, bf::make_grid(3, 32, 8.0), 10);
    const bf::Trajectory force = bf::synthesize_force(wb.branch_A, sp.nu);
    const bf::ResidualReport re = bf::euler_residual(wb.branch_A);
    const bf::ResidualReport rn = bf::nse_residual(wb.branch_A, force, sp.nu);
    double cancel = 0.0;
    for (std::size_t m = 0; m < re.sup.size(); ++m)
        cancel = std::max(cancel, std::abs(rn.sup[m] - re.sup[m]));
    std::printf("  [criterion 8] NSE cancellation gap %.2e\n", cancel);
    c.check(cancel <= 1e-12, "NSE cancellation identity broken");
}

void criterion_9() {
    Criterion c(9, "bound integral");
    const double limit = bf::bound_integral(1e6, 1.0, 3);
    c.check(std::abs(limit - 1.0 / (8.0 * kPi)) <= 1e-6, "large-horizon limit off 1/(8 pi)");
    // ladder chosen inside the small-horizon regime: I(Delta)/Delta peaks
    // near Delta ~ 0.3 and is only monotone below it
    const double r1 = bf::bound_integral(0.1, 1.0, 3) / 0.1;
    const double r2 = bf::bound_integral(0.05, 1.0, 3) / 0.05;
    const double r3 = bf::bound_integral(0.01, 1.0, 3) / 0.01;
    c.check(r3 < r2 && r2 < r1, "I(Delta)/Delta not strictly decreasing");
}

void criterion_10() {
    Criterion c(10, "2-D vorticity-free reduction");
    const bf::GridSpec g = bf::make_grid(2, 32, 8.0);
    const bf::VectorField h =
        bf::make_radial_data_2d(bf::make_data_params(0.1, bf::DataKind::singular), g);
    auto [traj, rep] = bf::solve_fixed_point(h, desk_params(bf::DataKind::singular));
    c.check(rep.converged, "2-D solve failed to converge");
    const double scale = grad_sup(h);
    double worst = 0.0;
    for (const auto& f : traj.frames)
        worst = std::max(worst, bf::sup_norm(bf::vorticity_z(f)) / scale);
    std::printf("  [criterion 10] max relative omega3 %.2e\n", worst);
    c.check(worst <= 1e-8, "omega3 drifts above 1e-8 relative");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf(g_failures == 0 ? "all criteria passed\n" : "%d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
