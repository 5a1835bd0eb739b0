#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace branchflow {

/// Multi-index for spatial derivatives, trailing entries zero for n = 2.
using MultiIndex = std::array<int, 3>;

inline int order(const MultiIndex& beta) { return beta[0] + beta[1] + beta[2]; }

/// Uniform periodic lattice on the cube [-L, L]^n with N points per axis.
struct GridSpec {
    int n = 3;       // spatial dimension
    int N = 32;      // points per axis, even
    double L = 8.0;  // half-extent

    double dx() const { return 2.0 * L / N; }
    double coord(int j) const { return -L + j * dx(); }
    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(N);
        return s;
    }
    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int n, int N, double L);

/// Uniform time lattice on [s_start, T_end] with M nodes.
struct TimeGrid {
    double s_start = 0.0;
    double T_end = 1.0;
    int M = 2;

    double dt() const { return (T_end - s_start) / (M - 1); }
    double node(int m) const { return s_start + m * dt(); }
    bool operator==(const TimeGrid&) const = default;
};

TimeGrid make_time_grid(double s_start, double T_end, int M);

/// Raised by parameter checks everywhere in the library.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace branchflow
