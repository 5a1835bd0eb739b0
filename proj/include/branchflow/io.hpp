#pragma once

#include <string>
#include <vector>

#include "branchflow/field.hpp"
#include "branchflow/grid.hpp"

namespace branchflow {

inline constexpr const char* kDftConvention = "unnormalized-forward/normalized-inverse";
inline constexpr int kSnapshotVersion = 1;

/// One raw little-endian f64 file per component (axis-0-fastest) plus a JSON
/// sidecar {n, N, L, t, component, dft_convention, version}. Files are
/// <stem>_c<i>.f64 / <stem>_c<i>.json inside dir.
void write_snapshot(const VectorField& v, const std::string& dir, const std::string& stem);
VectorField read_snapshot(const std::string& dir, const std::string& stem, int ncomp);

/// CSV with a header row; numeric cells printed with max_digits10 so that
/// identical runs produce bitwise-identical files.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& text);

}  // namespace branchflow
