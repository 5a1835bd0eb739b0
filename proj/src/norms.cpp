#include "branchflow/norms.hpp"

#include <cmath>

namespace branchflow {

std::vector<MultiIndex> multiindices_up_to_2(int n) {
    std::vector<MultiIndex> betas{{0, 0, 0}};
    for (int i = 0; i < n; ++i) {
        MultiIndex b{0, 0, 0};
        b[i] = 1;
        betas.push_back(b);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            MultiIndex b{0, 0, 0};
            b[i] += 1;
            b[j] += 1;
            betas.push_back(b);
        }
    return betas;
}

namespace {

double l2_norm(const ScalarField& f) {
    const double cell = std::pow(f.grid.dx(), f.grid.n);
    double acc = 0.0;
    for (double s : f.samples) acc += s * s;
    return std::sqrt(acc * cell);
}

}  // namespace

NormReport norm_suite(const ScalarField& f) {
    NormReport rep;
    Spectrum fh = to_spectral(f);
    double h2sq = 0.0;
    for (const auto& b : multiindices_up_to_2(f.grid.n)) {
        ScalarField df =
            (order(b) == 0) ? f : from_spectral(f.grid, derivative_spectrum(f.grid, fh, b), f.t);
        const double s = sup_norm(df);
        rep.sup_by_multiindex.emplace_back(b, s);
        rep.composite += s;
        const double l2 = l2_norm(df);
        h2sq += l2 * l2;
        if (order(b) == 0) rep.l2 = l2;
    }
    rep.h2 = std::sqrt(h2sq);
    return rep;
}

NormReport norm_suite(const VectorField& v) {
    NormReport rep;
    std::vector<NormReport> per;
    per.reserve(v.n());
    for (int i = 0; i < v.n(); ++i) per.push_back(norm_suite(v.comp[i]));
    double h2sq = 0.0;
    for (std::size_t e = 0; e < per[0].sup_by_multiindex.size(); ++e) {
        double s = 0.0;
        for (const auto& p : per) s = std::max(s, p.sup_by_multiindex[e].second);
        rep.sup_by_multiindex.emplace_back(per[0].sup_by_multiindex[e].first, s);
        rep.composite += s;
    }
    for (const auto& p : per) {
        rep.l2 = std::max(rep.l2, p.l2);
        h2sq += p.h2 * p.h2;
    }
    rep.h2 = std::sqrt(h2sq);
    return rep;
}

double composite_norm(const VectorField& v) { return norm_suite(v).composite; }

double trajectory_composite_sup(const std::vector<VectorField>& frames, int m_lo, int m_hi) {
    if (frames.empty() || m_lo < 0 || m_hi >= static_cast<int>(frames.size()) || m_lo > m_hi)
        throw ValidationError("trajectory_composite_sup: empty or invalid node range");
    double s = 0.0;
    for (int m = m_lo; m <= m_hi; ++m) s = std::max(s, composite_norm(frames[m]));
    return s;
}

namespace {

/// Periodic multilinear interpolation of f at physical point x.
double interp_periodic(const ScalarField& f, const std::array<double, 3>& x) {
    const GridSpec& g = f.grid;
    const int N = g.N;
    std::array<int, 3> j0{0, 0, 0};
    std::array<double, 3> w{0.0, 0.0, 0.0};
    for (int d = 0; d < g.n; ++d) {
        double u = (x[d] + g.L) / g.dx();
        double fl = std::floor(u);
        w[d] = u - fl;
        j0[d] = static_cast<int>(fl) % N;
        if (j0[d] < 0) j0[d] += N;
    }
    double acc = 0.0;
    const int corners = 1 << g.n;
    for (int c = 0; c < corners; ++c) {
        double weight = 1.0;
        std::array<int, 3> j = j0;
        for (int d = 0; d < g.n; ++d) {
            const int bit = (c >> d) & 1;
            weight *= bit ? w[d] : (1.0 - w[d]);
            j[d] = (j0[d] + bit) % N;
        }
        acc += weight * f.samples[j[0] + std::size_t(N) * (j[1] + std::size_t(N) * (g.n == 3 ? j[2] : 0))];
    }
    return acc;
}

}  // namespace

ArctanEmbedReport arctan_embed(const ScalarField& f, int n_xi, double tol) {
    const GridSpec& g = f.grid;
    constexpr double kHalfPi = 1.57079632679489661923;
    ArctanEmbedReport rep;
    rep.xi_grid = GridSpec{g.n, n_xi, kHalfPi};
    rep.transformed = ScalarField(rep.xi_grid, f.t);
    const int N = n_xi;
    const int Nz = (g.n == 3) ? N : 1;
    double interior_sup = 0.0;
    for (int j2 = 0; j2 < Nz; ++j2)
        for (int j1 = 0; j1 < N; ++j1)
            for (int j0 = 0; j0 < N; ++j0) {
                const std::array<int, 3> jj{j0, j1, j2};
                std::array<double, 3> x{0.0, 0.0, 0.0};
                bool outside = false;
                bool boundary = false;
                for (int d = 0; d < g.n; ++d) {
                    // cell-centered xi nodes keep tan() finite at the edges
                    const double xi = -kHalfPi + (jj[d] + 0.5) * (2.0 * kHalfPi / N);
                    x[d] = std::tan(xi);
                    if (std::abs(x[d]) > g.L) outside = true;
                    // "boundary-adjacent": outermost shell still inside the box
                    if (std::abs(x[d]) > 0.6 * g.L) boundary = true;
                }
                const double val = outside ? 0.0 : interp_periodic(f, x);
                if (outside) boundary = false;
                rep.transformed.samples[j0 + std::size_t(N) * (j1 + std::size_t(N) * j2)] = val;
                if (boundary)
                    rep.boundary_sup = std::max(rep.boundary_sup, std::abs(val));
                else
                    interior_sup = std::max(interior_sup, std::abs(val));
            }
    rep.embeds = rep.boundary_sup <= tol * std::max(interior_sup, 1e-300);
    return rep;
}

}  // namespace branchflow
