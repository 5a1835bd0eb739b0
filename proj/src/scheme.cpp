#include "branchflow/scheme.hpp"

#include <cmath>
#include <string>

#include "branchflow/kernels.hpp"
#include "branchflow/norms.hpp"

namespace branchflow {

namespace {

std::vector<Spectrum> to_spectra(const VectorField& v) {
    std::vector<Spectrum> out(v.n());
    for (int i = 0; i < v.n(); ++i) out[i] = to_spectral(v.comp[i]);
    return out;
}

VectorField from_spectra(const GridSpec& g, const std::vector<Spectrum>& vhat, double t) {
    VectorField v(g, t);
    for (int i = 0; i < g.n; ++i) v.comp[i] = from_spectral(g, vhat[i], t);
    return v;
}

double mode_ksq(const GridSpec& g, long long flat) {
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

/// source = sign * N(v) - s Lap v, as spectra (the Duhamel integrand).
std::vector<Spectrum> picard_source(const GridSpec& g, const std::vector<Spectrum>& vhat,
                                    double s_visc, double sign) {
    std::vector<Spectrum> src = nonlinear_spectra(g, vhat);
    const long long total = static_cast<long long>(g.size());
    for (int i = 0; i < g.n; ++i) {
#pragma omp parallel for schedule(static)
        for (long long flat = 0; flat < total; ++flat)
            src[i][flat] = sign * src[i][flat] + s_visc * mode_ksq(g, flat) * vhat[i][flat];
    }
    return src;
}

}  // namespace

SchemeParams make_scheme_params(double s, double nu, double T, int M, int k_max, double tol,
                                Direction direction, const DataParams& dp) {
    std::string errs;
    if (!(s > 0.0)) errs += "s must be > 0; ";
    if (!(T > s)) errs += "T must exceed s; ";
    if (!(nu > 0.0)) errs += "nu must be > 0; ";
    if (M < 3) errs += "M must be >= 3; ";
    if (k_max < 1) errs += "k_max must be >= 1; ";
    if (!(tol > 0.0)) errs += "tol must be > 0; ";
    if (!errs.empty()) throw ValidationError("make_scheme_params: " + errs);
    return SchemeParams{s, nu, T, M, k_max, tol, direction, dp};
}

Trajectory init_iterate(const VectorField& h, const SchemeParams& sp) {
    const GridSpec& g = h.grid();
    Trajectory traj{make_time_grid(sp.s, sp.T, sp.M), {}};
    traj.frames.reserve(sp.M);
    std::vector<Spectrum> hhat = to_spectra(h);
    for (int m = 0; m < sp.M; ++m) {
        const double t = traj.tg.node(m);
        if (m == 0) {
            VectorField f = h;
            f.set_t(t);
            traj.frames.push_back(std::move(f));
            continue;
        }
        std::vector<Spectrum> vh = hhat;
        for (int i = 0; i < g.n; ++i) apply_heat_multiplier(g, sp.s, t - sp.s, vh[i]);
        traj.frames.push_back(from_spectra(g, vh, t));
    }
    return traj;
}

std::vector<Spectrum> nonlinear_spectra(const GridSpec& g, const std::vector<Spectrum>& vhat) {
    const int n = g.n;
    const long long total = static_cast<long long>(g.size());
    // band-limited samples of v and grad v
    std::vector<ScalarField> vd(n);
    std::vector<std::vector<ScalarField>> dv(n, std::vector<ScalarField>(n));
    for (int i = 0; i < n; ++i) {
        Spectrum vi = vhat[i];
        dealias(g, vi);
        vd[i] = from_spectral(g, vi);
        for (int j = 0; j < n; ++j) {
            MultiIndex beta{0, 0, 0};
            beta[j] = 1;
            dv[i][j] = from_spectral(g, derivative_spectrum(g, vi, beta));
        }
    }
    // advection sum_j v_j d_j v_i, dealiased after the product
    std::vector<Spectrum> out(n);
    for (int i = 0; i < n; ++i) {
        ScalarField adv(g);
#pragma omp parallel for schedule(static)
        for (long long p = 0; p < total; ++p) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += vd[j].samples[p] * dv[i][j].samples[p];
            adv.samples[p] = acc;
        }
        out[i] = to_spectral(adv);
        dealias(g, out[i]);
    }
    // N_i = -advection + pressure gradient term
    std::vector<Spectrum> press = pressure_gradient_spectra(g, vhat);
    for (int i = 0; i < n; ++i) {
#pragma omp parallel for schedule(static)
        for (long long flat = 0; flat < total; ++flat)
            out[i][flat] = -out[i][flat] + press[i][flat];
    }
    return out;
}

VectorField nonlinear_term(const VectorField& v) {
    return from_spectra(v.grid(), nonlinear_spectra(v.grid(), to_spectra(v)), v.t());
}

Trajectory picard_step(const Trajectory& prev, const VectorField& h, const SchemeParams& sp) {
    const GridSpec& g = prev.grid();
    const TimeGrid& tg = prev.tg;
    const double sign = (sp.direction == Direction::forward) ? 1.0 : -1.0;
    const double guard = 1e6 * std::max(composite_norm(h), 1e-300);

    std::vector<Spectrum> hhat = to_spectra(h);
    Trajectory next{tg, {}};
    next.frames.reserve(tg.M);
    {
        VectorField f = h;
        f.set_t(tg.node(0));
        next.frames.push_back(std::move(f));
    }
    DuhamelAccumulator acc(g, sp.s, tg.dt(), g.n);
    std::vector<Spectrum> src_prev = picard_source(g, to_spectra(prev.frames[0]), sp.s, sign);
    for (int m = 1; m < tg.M; ++m) {
        std::vector<Spectrum> src_curr = picard_source(g, to_spectra(prev.frames[m]), sp.s, sign);
        acc.advance(src_prev, src_curr);
        const double t = tg.node(m);
        std::vector<Spectrum> vh = hhat;
        for (int i = 0; i < g.n; ++i) {
            apply_heat_multiplier(g, sp.s, t - sp.s, vh[i]);
            const auto& a = acc.value()[i];
            for (std::size_t flat = 0; flat < vh[i].size(); ++flat) vh[i][flat] += a[flat];
        }
        VectorField frame = from_spectra(g, vh, t);
        if (!(sup_norm(frame) <= guard))  // negated form so NaN also trips the guard
            throw BlowUpError("picard_step: blow-up guard tripped at node " + std::to_string(m) +
                              " (t = " + std::to_string(t) + ")");
        next.frames.push_back(std::move(frame));
        src_prev = std::move(src_curr);
    }
    return next;
}

std::pair<Trajectory, Trajectory> increments(const Trajectory& curr, const Trajectory& prev,
                                             const SchemeParams& sp) {
    if (!(curr.grid() == prev.grid()) || !(curr.tg == prev.tg))
        throw ValidationError("increments: trajectory grids differ");
    const GridSpec& g = curr.grid();
    Trajectory delta{curr.tg, {}};
    delta.frames.reserve(curr.tg.M);
    for (int m = 0; m < curr.tg.M; ++m) {
        VectorField d(g, curr.tg.node(m));
        for (int i = 0; i < g.n; ++i)
            for (std::size_t p = 0; p < g.size(); ++p)
                d.comp[i].samples[p] =
                    curr.frames[m].comp[i].samples[p] - prev.frames[m].comp[i].samples[p];
        delta.frames.push_back(std::move(d));
    }
    // reduced = delta + s Lap delta * G^s, streamed like the Picard step
    Trajectory reduced{curr.tg, {}};
    reduced.frames.reserve(curr.tg.M);
    reduced.frames.push_back(delta.frames[0]);
    DuhamelAccumulator acc(g, sp.s, curr.tg.dt(), g.n);
    auto lap_spec = [&](const VectorField& v) {
        std::vector<Spectrum> s = to_spectra(v);
        const long long total = static_cast<long long>(g.size());
        for (int i = 0; i < g.n; ++i) {
#pragma omp parallel for schedule(static)
            for (long long flat = 0; flat < total; ++flat)
                s[i][flat] *= -sp.s * mode_ksq(g, flat);
        }
        return s;
    };
    std::vector<Spectrum> src_prev = lap_spec(delta.frames[0]);
    for (int m = 1; m < curr.tg.M; ++m) {
        std::vector<Spectrum> src_curr = lap_spec(delta.frames[m]);
        acc.advance(src_prev, src_curr);
        VectorField r(g, curr.tg.node(m));
        for (int i = 0; i < g.n; ++i) {
            ScalarField corr = from_spectral(g, acc.value()[i]);
            for (std::size_t p = 0; p < g.size(); ++p)
                r.comp[i].samples[p] = delta.frames[m].comp[i].samples[p] + corr.samples[p];
        }
        reduced.frames.push_back(std::move(r));
        src_prev = std::move(src_curr);
    }
    return {std::move(delta), std::move(reduced)};
}

double scheme_trajectory_norm(const Trajectory& traj, const SchemeParams& sp) {
    const int M = traj.tg.M;
    double s = composite_norm(traj.frames[0]);
    const int first_interior = (sp.dp.kind == DataKind::singular) ? 2 : 1;
    for (int m = first_interior; m < M; ++m)
        s = std::max(s, composite_norm(traj.frames[m]));
    return s;
}

std::pair<Trajectory, ContractionReport> iterate_fixed_point(const VectorField& h,
                                                             const SchemeParams& sp) {
    ContractionReport rep;
    rep.T_used = sp.T;
    Trajectory prev = init_iterate(h, sp);
    Trajectory curr = prev;
    double last_reduced = -1.0;
    for (int k = 1; k <= sp.k_max; ++k) {
        Trajectory next = picard_step(curr, h, sp);
        auto [delta, reduced] = increments(next, curr, sp);
        ContractionIter it;
        it.k = k;
        it.delta_norm = scheme_trajectory_norm(delta, sp);
        it.reduced_norm = scheme_trajectory_norm(reduced, sp);
        // Lemma 1 quantity: the linear correction alone
        {
            double lin = 0.0;
            const GridSpec& g = h.grid();
            for (int m = 1; m < sp.M; ++m) {
                VectorField d(g);
                for (int i = 0; i < g.n; ++i)
                    for (std::size_t p = 0; p < g.size(); ++p)
                        d.comp[i].samples[p] = reduced.frames[m].comp[i].samples[p] -
                                               delta.frames[m].comp[i].samples[p];
                if (!(sp.dp.kind == DataKind::singular && m == 1))
                    lin = std::max(lin, composite_norm(d));
            }
            it.linear_norm = lin;
        }
        rep.iters.push_back(it);
        if (last_reduced > 1e2 * 2.2e-16 * std::max(1.0, composite_norm(h)))
            rep.ratios.push_back(it.reduced_norm / last_reduced);
        last_reduced = it.reduced_norm;
        prev = std::move(curr);
        curr = std::move(next);
        rep.k_stop = k;
        if (it.reduced_norm < sp.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.contraction_ok = true;
    for (double r : rep.ratios)
        if (!(r <= 0.5)) rep.contraction_ok = false;
    return {std::move(curr), std::move(rep)};
}

ContractionReport contraction_report(const VectorField& h, const SchemeParams& sp) {
    SchemeParams trial = sp;
    while (true) {
        ContractionReport rep;
        bool blew_up = false;
        try {
            rep = iterate_fixed_point(h, trial).second;
        } catch (const BlowUpError&) {
            blew_up = true;
        }
        if (!blew_up && rep.contraction_ok && (rep.converged || !rep.ratios.empty())) return rep;
        const double horizon = (trial.T - trial.s) / 2.0;
        if (horizon < 1e-3) {
            rep.contraction_ok = false;
            return rep;  // no admissible T; caller inspects the flag
        }
        trial.T = trial.s + horizon;
    }
}

std::pair<Trajectory, ContractionReport> solve_fixed_point(const VectorField& h,
                                                           const SchemeParams& sp) {
    return iterate_fixed_point(h, sp);
}

Trajectory time_shift(const Trajectory& traj) {
    Trajectory out{TimeGrid{0.0, traj.tg.T_end - traj.tg.s_start, traj.tg.M}, traj.frames};
    for (int m = 0; m < out.tg.M; ++m) out.frames[m].set_t(out.tg.node(m));
    return out;
}

std::pair<Trajectory, ContractionReport> solve_reversed(const VectorField& h_minus,
                                                        const SchemeParams& sp,
                                                        ReversalPath path) {
    if (path == ReversalPath::direct) {
        SchemeParams rp = sp;
        rp.direction = Direction::reversed;
        return iterate_fixed_point(h_minus, rp);
    }
    const GridSpec& g = h_minus.grid();
    VectorField neg(g, h_minus.t());
    for (int i = 0; i < g.n; ++i)
        for (std::size_t p = 0; p < g.size(); ++p)
            neg.comp[i].samples[p] = -h_minus.comp[i].samples[p];
    SchemeParams fp = sp;
    fp.direction = Direction::forward;
    auto [traj, rep] = iterate_fixed_point(neg, fp);
    for (auto& frame : traj.frames)
        for (auto& c : frame.comp)
            for (auto& x : c.samples) x = -x;
    return {std::move(traj), std::move(rep)};
}

}  // namespace branchflow
