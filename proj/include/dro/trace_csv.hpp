#pragma once

#include <string>
#include <vector>

#include "dro/sim.hpp"

// Trace CSV, format v1. Line 1 is the version marker comment, line 2 the
// column header, then one row per stored step. Values are serialized with
// 17 significant digits so re-parsing reproduces the in-memory doubles
// exactly. Column order is fixed:
//
//   t, x_1..x_n, xhat_1..xhat_n, zbar_1..zbar_n, thetahat_1..thetahat_p,
//   thetatilde_1..thetatilde_p, delta, det_phi, min_eig_phi, eps_1..eps_p,
//   swap_residual, V0

namespace dro {

inline constexpr const char* kTraceCsvMarker = "# drem-observer trace v1";

std::string trace_csv_header(const Dimensions& dims);

void write_trace_csv(const Trace& trace, const std::string& path);

/// Reads a v1 trace CSV. Populates every CSV-backed column; the z and z_hat
/// columns (not serialized) are left empty. Extra columns are ignored.
/// Raises ConfigError for a missing file, wrong marker, or a header lacking
/// the v1 columns.
Trace read_trace_csv(const std::string& path);

}  // namespace dro
