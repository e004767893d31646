#pragma once

#include "ginprod/matrix.hpp"

namespace ginprod {

struct SchurResult {
  SquareMatrix Q;  // orthogonal
  SquareMatrix T;  // quasi-upper-triangular, A = Q T Q^T
};

// Real Schur factorization: Householder reduction to Hessenberg form, then
// Francis double-shift QR. 2x2 diagonal blocks of T always hold complex
// conjugate pairs; real pairs are split. Deflation when
// |h(k,k-1)| <= tol (|h(k-1,k-1)| + |h(k,k)|); max_sweeps bounds the QR
// iterations spent on any one deflation. Throws NumericFailure otherwise.
SchurResult real_schur(const SquareMatrix& A, double tol = 1e-12, int max_sweeps = 300);

// T only, after diagonal balancing by powers of two (the balancing is a
// similarity, so T has the eigenvalues of A, but A != Q T Q^T).
SquareMatrix real_schur_form(const SquareMatrix& A, double tol = 1e-12, int max_sweeps = 300);

// Reduce to upper Hessenberg form; if Q is given it is overwritten with the
// accumulated orthogonal transformation (A = Q H Q^T).
void hessenberg_reduce(SquareMatrix& A, SquareMatrix* Q);

// Scale rows and columns by powers of two to equalize their norms.
void balance(SquareMatrix& A);

}  // namespace ginprod
