#pragma once

namespace projspec {

/// Relative tolerances shared by every module. One record is threaded through
/// the whole pipeline; the CLI overrides individual fields.
struct Tolerances {
  double normal = 1e-8;    // ‖A*A − AA*‖_F ≤ normal·‖A‖_F²
  double eig = 1e-9;       // decomposition residual ≤ eig·‖A‖_F
  double unitary = 1e-10;  // ‖U*U − I‖_F
  double line = 1e-6;      // distinctness / incidence of lines
  double recon = 1e-6;     // product re-expansion vs. source polynomial
  double commute = 1e-8;   // ‖[A,B]‖_F ≤ commute·(‖A‖_F + ‖B‖_F)²
};

}  // namespace projspec
