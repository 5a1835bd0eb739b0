#pragma once

#include <utility>
#include <vector>

#include "branchflow/field.hpp"
#include "branchflow/grid.hpp"

namespace branchflow {

/// Norm suite for one field: per-multiindex sup norms (|beta| <= 2, spectral
/// derivatives), L2, H2, and the composite sum-of-sups norm.
struct NormReport {
    std::vector<std::pair<MultiIndex, double>> sup_by_multiindex;
    double l2 = 0.0;
    double h2 = 0.0;
    double composite = 0.0;  // sum of the sup entries
};

/// All multiindices |beta| <= 2 in dimension n, in a fixed documented order
/// (0, then first, then second derivatives, mixed ones once each).
std::vector<MultiIndex> multiindices_up_to_2(int n);

NormReport norm_suite(const ScalarField& f);
/// Vector fields: each sup entry is the max over components.
NormReport norm_suite(const VectorField& v);

/// Just the composite number (sum over |beta| <= 2 of sup |D^beta v|, max
/// over components per multiindex).
double composite_norm(const VectorField& v);

/// Sup of composite_norm over frames [m_lo, m_hi] inclusive.
double trajectory_composite_sup(const std::vector<VectorField>& frames, int m_lo, int m_hi);

/// x_i -> arctan(x_i) compactification diagnostic: resample f at tan(xi) on a
/// uniform xi-grid over (-pi/2, pi/2)^n (periodic multilinear interpolation in
/// x; points with |tan(xi)| > L evaluate to 0, the decayed far field).
struct ArctanEmbedReport {
    GridSpec xi_grid;          // L = pi/2 cube
    ScalarField transformed;   // samples on the xi-grid
    double boundary_sup = 0.0; // sup over boundary-adjacent xi layers
    bool embeds = false;       // boundary_sup <= tol * interior sup
};
ArctanEmbedReport arctan_embed(const ScalarField& f, int n_xi = 64, double tol = 1e-3);

}  // namespace branchflow
