#pragma once

namespace holovar {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

// All numerical tolerances in force, kept in one record so every report can
// echo the exact values used.
struct Tolerances {
  double eps_group = 1e-10;    // defining-equation residual for group membership
  double eps_rel = 1e-8;       // relation residual for variety membership
  double eps_align = 1e-6;     // gauge-alignment acceptance
  double eps_center = 1e-4;    // snap radius for central elements
  double delta_branch = 1e-6;  // angular exclusion zone around -1 for log/sqrt
  double sigma_tol = 1e-8;     // singular-value threshold for kernel dimension
};

}  // namespace holovar
