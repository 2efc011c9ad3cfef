#include "chs/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chs/error.hpp"
#include "chs/simd.hpp"

namespace chs {
namespace {

double off_norm(const DenseMatrix& A) {
  double s = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j)
      if (i != j) s += A(i, j) * A(i, j);
  return std::sqrt(s);
}

double frobenius(const DenseMatrix& A) {
  const auto d = A.data();
  return std::sqrt(dot(d, d));
}

}  // namespace

SymmetricEigen jacobi_eigen(DenseMatrix A, const JacobiOptions& opts) {
  if (A.rows() != A.cols()) throw DimensionError("eigensolver needs a square matrix");
  if (!is_symmetric(A, 1e-12)) throw NumericalError("eigensolver: matrix is not symmetric");
  symmetrize(A);
  const std::size_t n = A.rows();
  SymmetricEigen out;
  for (std::size_t i = 0; i < n; ++i) out.trace += A(i, i);

  // Rows of W are the eigenvectors, so rotations touch contiguous memory.
  DenseMatrix W;
  if (opts.want_vectors) W = DenseMatrix::identity(n);

  const auto& kern = simd::active();
  const double scale = frobenius(A);
  double off = off_norm(A);
  out.off_norms.push_back(off);

  while (off > opts.rel_tol * scale && out.sweeps < opts.max_sweeps) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double app = A(p, p);
        const double aqq = A(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        kern.rotate(A.row(p).data(), A.row(q).data(), n, c, s);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          A(k, p) = A(p, k);
          A(k, q) = A(q, k);
        }
        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        if (opts.want_vectors) kern.rotate(W.row(p).data(), W.row(q).data(), n, c, s);
      }
    }
    ++out.sweeps;
    off = off_norm(A);
    out.off_norms.push_back(off);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return A(a, a) < A(b, b); });
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = A(order[k], order[k]);
  if (opts.want_vectors) {
    out.vectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = W(order[k], i);
  }
  return out;
}

Vector symmetric_eigenvalues(DenseMatrix A) {
  if (A.rows() != A.cols()) throw DimensionError("eigensolver needs a square matrix");
  if (!is_symmetric(A, 1e-12)) throw NumericalError("eigensolver: matrix is not symmetric");
  symmetrize(A);
  const std::size_t n = A.rows();
  Vector d(n), e(n, 0.0);
  if (n == 0) return d;

  // Householder reduction to tridiagonal form, working on the lower triangle
  // row by row from the bottom.
  Vector p(n);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double sc = 0.0;
      for (std::size_t k = 0; k <= l; ++k) sc += std::abs(A(i, k));
      if (sc == 0.0) {
        e[i] = A(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          A(i, k) /= sc;
          h += A(i, k) * A(i, k);
        }
        const double f = A(i, l);
        const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = sc * g;
        h -= f * g;
        A(i, l) = f - g;
        double ff = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          double gg = 0.0;
          for (std::size_t k = 0; k <= j; ++k) gg += A(j, k) * A(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) gg += A(k, j) * A(i, k);
          p[j] = gg / h;
          ff += p[j] * A(i, j);
        }
        const double hh = ff / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          const double fj = A(i, j);
          const double gj = p[j] - hh * fj;
          p[j] = gj;
          for (std::size_t k = 0; k <= j; ++k) A(j, k) -= fj * p[k] + gj * A(i, k);
        }
      }
    } else {
      e[i] = A(i, l);
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = A(i, i);

  // Implicit QL on the tridiagonal (d, e).
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw ConvergenceError("tridiagonal QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
        double s = 1.0, c = 1.0, pp = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= pp;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - pp;
          r = (d[i] - g) * s + 2.0 * c * b;
          pp = s * r;
          d[i + 1] = g + pp;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= pp;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

GeneralizedEigen dense_generalized_eig(const DenseMatrix& A, const DenseMatrix& B,
                                       bool want_vectors) {
  require_dim(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(),
              "generalized eigenproblem");
  if (!is_symmetric(A, 1e-12)) throw NumericalError("generalized eigenproblem: A is not symmetric");
  const std::size_t n = A.rows();
  const Cholesky chol(B);
  const DenseMatrix& L = chol.lower();

  // X = L^{-1} A, then C = L^{-1} X^T = L^{-1} A L^{-T}.
  auto forward = [&](DenseMatrix X) {
    for (std::size_t i = 0; i < n; ++i) {
      auto xi = X.row(i);
      for (std::size_t k = 0; k < i; ++k) axpy(-L(i, k), X.row(k), xi);
      scale(1.0 / L(i, i), xi);
    }
    return X;
  };
  DenseMatrix C = forward(forward(A).transpose());
  symmetrize(C);

  GeneralizedEigen out;
  if (!want_vectors) {
    out.values = symmetric_eigenvalues(std::move(C));
    return out;
  }
  JacobiOptions opts;
  opts.want_vectors = want_vectors;
  out.reduced = jacobi_eigen(std::move(C), opts);
  out.values = out.reduced.values;
  if (want_vectors) {
    out.vectors = DenseMatrix(n, n);
    Vector z(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) z[i] = out.reduced.vectors(i, k);
      for (std::size_t i = n; i-- > 0;) {
        double s = z[i];
        for (std::size_t l = i + 1; l < n; ++l) s -= L(l, i) * v[l];
        v[i] = s / L(i, i);
      }
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[i];
    }
  }
  return out;
}

double max_pair_residual(const DenseMatrix& A, const DenseMatrix& B, const GeneralizedEigen& eig) {
  if (eig.vectors.rows() != A.rows()) throw InvalidArgument("eigenvectors were not computed");
  const std::size_t n = A.rows();
  const double anorm = frobenius(A);
  double worst = 0.0;
  Vector v(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) v[i] = eig.vectors(i, k);
    Vector r = A * v;
    axpy(-eig.values[k], B * v, r);
    worst = std::max(worst, norm2(r) / (anorm * std::max(norm2(v), 1e-300)));
  }
  return worst;
}

}  // namespace chs
