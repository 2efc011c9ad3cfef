#pragma once

#include <vector>

#include "chs/dense.hpp"

namespace chs {

struct JacobiOptions {
  int max_sweeps = 60;
  // Stop once off(A)_F <= rel_tol * ||A||_F.
  double rel_tol = 1e-15;
  bool want_vectors = false;
};

struct SymmetricEigen {
  Vector values;                  // ascending
  DenseMatrix vectors;            // column k pairs with values[k]; empty unless requested
  std::vector<double> off_norms;  // off-diagonal Frobenius norm before sweep 1 and after each sweep
  int sweeps = 0;
  double trace = 0.0;             // trace of the matrix that was diagonalised
};

// Cyclic Jacobi rotations on a symmetric matrix.
SymmetricEigen jacobi_eigen(DenseMatrix A, const JacobiOptions& opts = {});

// Eigenvalues only (ascending): Householder tridiagonalisation followed by
// implicit QL with Wilkinson shifts. Much cheaper than Jacobi for n > 100.
Vector symmetric_eigenvalues(DenseMatrix A);

struct GeneralizedEigen {
  Vector values;        // ascending eigenvalues of B^{-1} A
  DenseMatrix vectors;  // B-orthonormal columns (on request)
  SymmetricEigen reduced;  // filled only when vectors are requested
};

// Eigenvalues of the symmetric-definite pencil (A, B) via B = L L^T and a
// Jacobi solve of L^{-1} A L^{-T}. Throws NumericalError if B is not SPD or
// A is non-symmetric beyond 1e-12 relative.
GeneralizedEigen dense_generalized_eig(const DenseMatrix& A, const DenseMatrix& B,
                                       bool want_vectors = false);

// max_k ||A v_k - lambda_k B v_k|| / ||A||_F over the computed pairs.
double max_pair_residual(const DenseMatrix& A, const DenseMatrix& B, const GeneralizedEigen& eig);

}  // namespace chs
