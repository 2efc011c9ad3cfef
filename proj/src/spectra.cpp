#include "chs/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chs/error.hpp"

namespace chs {
namespace {

void guard_size(std::size_t n) {
  if (n > kSpectraNodeLimit)
    throw InvalidArgument("spectral checks are limited to " + std::to_string(kSpectraNodeLimit) +
                          " nodes, got " + std::to_string(n));
}

DenseMatrix block_diag(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.rows(), m = b.rows();
  DenseMatrix out(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(n + i, n + j) = b(i, j);
  return out;
}

void fill_extremes(SpectralReport& r) {
  const Vector& ev = r.eigenvalues;
  r.lambda_min = ev.front();
  r.lambda_max = ev.back();
  r.abs_min = std::abs(ev.front());
  r.abs_max = 0.0;
  for (double v : ev) {
    r.abs_min = std::min(r.abs_min, std::abs(v));
    r.abs_max = std::max(r.abs_max, std::abs(v));
  }
  r.kappa = r.abs_max / r.abs_min;
}

// Largest distance between two sorted lists of equal length.
double max_sorted_gap(Vector a, Vector b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

// Compressed extremes must lie inside [lo - slack, hi + slack].
void add_containment(SpectralReport& r, const SpectralReport& full) {
  r.bound_lo = full.lambda_min;
  r.bound_hi = full.lambda_max;
  r.add("compressed lambda_min >= untruncated lambda_min", r.lambda_min >= full.lambda_min - kBoundSlack,
        r.lambda_min - full.lambda_min);
  r.add("compressed lambda_max <= untruncated lambda_max", r.lambda_max <= full.lambda_max + kBoundSlack,
        full.lambda_max - r.lambda_max);
}

std::string describe(const TruncationMask& mask) {
  return std::to_string(mask.active_count) + "/" + std::to_string(mask.size()) + " truncated";
}

}  // namespace

bool SpectralReport::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const BoundVerdict& v) { return v.pass; });
}

void SpectralReport::add(std::string name, bool ok, double margin) {
  verdicts.push_back({std::move(name), ok, margin});
}

DenseBlocks dense_blocks(const FemOperators& ops) {
  guard_size(ops.size());
  DenseBlocks b;
  b.kbar = to_dense(ops.K);
  add_outer(b.kbar, 1.0, ops.m, ops.m);
  b.mass = to_dense(ops.M);
  b.eta = ops.eta;
  return b;
}

DenseMatrix dense_saddle(const DenseBlocks& b) {
  const std::size_t n = b.kbar.rows();
  DenseMatrix out(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(i, j) = b.kbar(i, j);
      out(i, n + j) = b.mass(i, j);
      out(n + i, j) = b.mass(i, j);
      out(n + i, n + j) = -b.eta * b.kbar(i, j);
    }
  }
  return out;
}

DenseMatrix dense_schur(const DenseBlocks& b) {
  const Cholesky kbar(b.kbar);
  DenseMatrix S = add(b.eta, b.kbar, 1.0, matmul(b.mass, kbar.solve(b.mass)));
  symmetrize(S);
  return S;
}

DenseMatrix dense_schur_pre(const DenseBlocks& b) {
  return add(1.0, dense_schur(b), 2.0 * std::sqrt(b.eta), b.mass);
}

DenseMatrix dense_bd(const DenseBlocks& b) {
  const double s = std::sqrt(b.eta);
  return block_diag(add(1.0, b.kbar, 1.0 / s, b.mass), add(b.eta, b.kbar, s, b.mass));
}

DenseMatrix dense_bdsc(const DenseBlocks& b) { return block_diag(b.kbar, dense_schur_pre(b)); }

std::vector<std::size_t> compressed_indices(const TruncationMask& mask) {
  std::vector<std::size_t> keep = mask.free_nodes();
  for (std::size_t i = 0; i < mask.size(); ++i) keep.push_back(mask.size() + i);
  return keep;
}

Vector bd_mu_values(const DenseBlocks& b) {
  const DenseMatrix rhs = add(1.0, b.kbar, 1.0 / std::sqrt(b.eta), b.mass);
  return dense_generalized_eig(b.kbar, rhs).values;
}

Vector bd_predicted(const Vector& mu) {
  Vector out;
  for (double m : mu) {
    const double a = std::sqrt(m * m + (1.0 - m) * (1.0 - m));
    out.push_back(-a);
    out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vector bdsc_predicted(const Vector& mu) {
  Vector out;
  for (double m : mu) {
    const double disc = std::sqrt(m * m * m * m + 6.0 * m * m - 8.0 * m + 5.0);
    out.push_back(0.5 * (1.0 - m * m) - 0.5 * disc);
    out.push_back(0.5 * (1.0 - m * m) + 0.5 * disc);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SpectralReport check_bd_bounds(const FemOperators& ops, const TruncationMask* mask) {
  const DenseBlocks b = dense_blocks(ops);
  const DenseMatrix A = dense_saddle(b);
  const DenseMatrix B = dense_bd(b);

  SpectralReport full;
  full.precond = "bd";
  full.n_nodes = ops.size();
  full.eta = ops.eta;
  full.eigenvalues = dense_generalized_eig(A, B).values;
  fill_extremes(full);
  const double lo = 1.0 / std::numbers::sqrt2;
  full.bound_lo = lo;
  full.bound_hi = 1.0;
  full.add("|lambda| >= 1/sqrt2", full.abs_min >= lo - kBoundSlack, full.abs_min - lo);
  full.add("|lambda| < 1", full.abs_max < 1.0, 1.0 - full.abs_max);
  full.add("kappa < sqrt2", full.kappa < std::numbers::sqrt2 + kBoundSlack,
           std::numbers::sqrt2 - full.kappa);
  const double gap = max_sorted_gap(full.eigenvalues, bd_predicted(bd_mu_values(b)));
  full.add("per-mu prediction", gap <= 1e-7, 1e-7 - gap);
  if (!mask) return full;

  const auto keep = compressed_indices(*mask);
  SpectralReport r;
  r.precond = "bd";
  r.n_nodes = ops.size();
  r.mask = describe(*mask);
  r.eta = ops.eta;
  r.eigenvalues =
      dense_generalized_eig(principal_submatrix(A, keep), principal_submatrix(B, keep)).values;
  fill_extremes(r);
  add_containment(r, full);
  return r;
}

SpectralReport check_schur_bounds(const FemOperators& ops) {
  const DenseBlocks b = dense_blocks(ops);
  const DenseMatrix S = dense_schur(b);
  const DenseMatrix Spre = dense_schur_pre(b);
  SpectralReport r;
  r.precond = "schur";
  r.n_nodes = ops.size();
  r.eta = ops.eta;

  bool s_spd = true, diff_spd = true;
  try {
    Cholesky chk(S);
  } catch (const NumericalError&) {
    s_spd = false;
  }
  try {
    Cholesky chk(add(1.0, Spre, -1.0, S));
  } catch (const NumericalError&) {
    diff_spd = false;
  }
  r.add("S is SPD", s_spd, 0.0);
  r.add("S_pre - S is SPD", diff_spd, 0.0);
  if (!s_spd) throw NumericalError("Schur complement is not SPD");

  r.eigenvalues = dense_generalized_eig(S, Spre).values;
  fill_extremes(r);
  r.bound_lo = 0.5;
  r.bound_hi = 1.0;
  r.add("lambda >= 1/2", r.lambda_min >= 0.5 - kBoundSlack, r.lambda_min - 0.5);
  r.add("lambda < 1", r.lambda_max < 1.0, 1.0 - r.lambda_max);
  r.add("kappa < 2", r.kappa < 2.0, 2.0 - r.kappa);
  return r;
}

SpectralReport check_bdsc_bounds(const FemOperators& ops, const TruncationMask* mask) {
  const DenseBlocks b = dense_blocks(ops);
  const DenseMatrix A = dense_saddle(b);
  const DenseMatrix B = dense_bdsc(b);

  SpectralReport full;
  full.precond = "bdsc";
  full.n_nodes = ops.size();
  full.eta = ops.eta;
  full.eigenvalues = dense_generalized_eig(A, B).values;
  fill_extremes(full);
  const double golden = 0.5 * (1.0 + std::sqrt(5.0));
  const double neg_hi = 1.0 - std::numbers::sqrt2;
  full.bound_lo = -1.0;
  full.bound_hi = golden;
  bool inside = true;
  double margin = std::numeric_limits<double>::infinity();
  for (double l : full.eigenvalues) {
    // Signed distance into the nearer admissible interval.
    const double m = l < 0.0 ? std::min(l + 1.0, neg_hi - l) : std::min(l - 1.0, golden - l);
    margin = std::min(margin, m);
    inside = inside && m >= -kBoundSlack;
  }
  full.add("spectrum in [-1, 1-sqrt2] u [1, (1+sqrt5)/2]", inside, margin);
  full.add("kappa <= (1+sqrt5) / (2 (sqrt2-1))", full.kappa <= kBdscKappaBound + kBoundSlack,
           kBdscKappaBound - full.kappa);
  const double gap = max_sorted_gap(full.eigenvalues, bdsc_predicted(bd_mu_values(b)));
  full.add("per-mu quadratic roots", gap <= 1e-7, 1e-7 - gap);
  if (!mask) return full;

  const auto keep = compressed_indices(*mask);
  SpectralReport r;
  r.precond = "bdsc";
  r.n_nodes = ops.size();
  r.mask = describe(*mask);
  r.eta = ops.eta;
  r.eigenvalues =
      dense_generalized_eig(principal_submatrix(A, keep), principal_submatrix(B, keep)).values;
  fill_extremes(r);
  add_containment(r, full);
  return r;
}

SpectralReport check_btdsc_bounds(const FemOperators& ops) {
  const DenseBlocks b = dense_blocks(ops);
  const std::size_t n = ops.size();
  const DenseMatrix S = dense_schur(b);
  const DenseMatrix Spre = dense_schur_pre(b);
  const Cholesky kbar(b.kbar);
  const Cholesky spre(Spre);

  // X = B^{-1} A for B = [Kbar, 0; M, -S_pre], A = [Kbar, M; M, -eta Kbar].
  const DenseMatrix A = dense_saddle(b);
  DenseMatrix top(n, 2 * n), bottom_rhs(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2 * n; ++j) top(i, j) = A(i, j);
  const DenseMatrix X1 = kbar.solve(top);
  const DenseMatrix MX1 = matmul(b.mass, X1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2 * n; ++j) bottom_rhs(i, j) = MX1(i, j) - A(n + i, j);
  const DenseMatrix X2 = spre.solve(bottom_rhs);

  double id_err = 0.0, zero_err = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      id_err = std::max(id_err, std::abs(X1(i, j) - (i == j ? 1.0 : 0.0)));
      zero_err = std::max(zero_err, std::abs(X2(i, j)));
      scale = std::max(scale, std::abs(X2(i, n + j)));
    }
  }

  SpectralReport r;
  r.precond = "btdsc";
  r.n_nodes = n;
  r.eta = ops.eta;
  r.add("(1,1) block of B^{-1}A is I", id_err <= 1e-8, 1e-8 - id_err);
  r.add("(2,1) block of B^{-1}A is 0", zero_err <= 1e-8 * scale, 1e-8 * scale - zero_err);

  // The (2,2) block must be S_pre^{-1} S.
  DenseMatrix X22(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) X22(i, j) = X2(i, n + j);
  const double block_err = add(1.0, matmul(Spre, X22), -1.0, S).max_abs();
  r.add("(2,2) block equals S_pre^{-1} S", block_err <= 1e-8 * S.max_abs(), 1e-8 * S.max_abs() - block_err);

  const Vector schur = dense_generalized_eig(S, Spre).values;
  const std::size_t ones_in_schur =
      static_cast<std::size_t>(std::count_if(schur.begin(), schur.end(), [](double v) { return std::abs(v - 1.0) <= 1e-10; }));
  r.eigenvalues.assign(n, 1.0);
  r.eigenvalues.insert(r.eigenvalues.end(), schur.begin(), schur.end());
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end());
  fill_extremes(r);
  r.bound_lo = 0.5;
  r.bound_hi = 1.0;
  r.add("eigenvalue 1 has multiplicity n", ones_in_schur == 0, ones_in_schur == 0 ? 0.0 : -1.0);
  r.add("remaining eigenvalues >= 1/2", schur.front() >= 0.5 - kBoundSlack, schur.front() - 0.5);
  r.add("remaining eigenvalues < 1", schur.back() < 1.0, 1.0 - schur.back());
  return r;
}

PoincareVerdict check_poincare(const DenseMatrix& A, const TruncationMask& mask, double tol) {
  require_dim(A.rows() == mask.size(), "Poincare check");
  guard_size(A.rows());
  PoincareVerdict v;
  const auto keep = mask.free_nodes();
  v.lambda = jacobi_eigen(A).values;
  v.mu = keep.empty() ? Vector{} : jacobi_eigen(principal_submatrix(A, keep)).values;
  const std::size_t n = v.lambda.size(), k = v.mu.size();
  const double scale = std::max(1.0, std::max(std::abs(v.lambda.front()), std::abs(v.lambda.back())));
  v.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    v.worst = std::max(v.worst, v.lambda[i] - v.mu[i]);
    v.worst = std::max(v.worst, v.mu[i] - v.lambda[n - k + i]);
  }
  if (k == 0) v.worst = 0.0;
  v.pass = v.worst <= tol * scale;
  return v;
}

}  // namespace chs
