#include "gfbs/metric.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gfbs/errors.hpp"

namespace gfbs {

CocoerciveMap CocoerciveMap::zero() { return CocoerciveMap{}; }

CocoerciveMap CocoerciveMap::affine(const Matrix& L, const Vector& c) {
  if (L.rows() != L.cols()) fail(ErrorCode::NonSquare, "cocoercive linear part must be square");
  if (c.size() != L.rows()) fail(ErrorCode::DimensionMismatch, "offset size does not match linear part");
  const Matrix sym = 0.5 * (L + L.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  CocoerciveMap B;
  B.beta = L.size() ? std::max(0.0, es.eigenvalues().maxCoeff()) : 0.0;
  if (B.beta > 0.0 || c.norm() > 0.0) B.eval = [L, c](const Vector& x) -> Vector { return L * x + c; };
  return B;
}

DegenerateMetric DegenerateMetric::build(const Matrix& matrix, double psd_tol) {
  if (matrix.rows() != matrix.cols()) fail(ErrorCode::NonSquare, "metric must be square");
  const Matrix sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& ev = es.eigenvalues();
  const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double tol = psd_tol >= 0.0 ? psd_tol : 1e-10 * scale;

  const double asym = matrix.size() ? (matrix - matrix.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > tol) fail(ErrorCode::NotSymmetric, "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  if (ev.size() && ev.minCoeff() < -tol)
    fail(ErrorCode::NotPSD, "eigenvalue " + std::to_string(ev.minCoeff()) + " below -psd_tol");

  DegenerateMetric Q;
  Q.matrix_ = sym;
  Q.psd_tol_ = tol;
  Q.eig_basis_ = es.eigenvectors();
  Q.eig_values_ = ev;
  std::vector<Index> positive;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= tol) {
      Q.eig_values_[i] = 0.0;
    } else {
      positive.push_back(i);
    }
  }
  Q.rank_ = static_cast<Index>(positive.size());
  if (Q.rank_ == 0) fail(ErrorCode::ZeroMetric, "metric has rank 0");
  Q.range_basis_.resize(sym.rows(), Q.rank_);
  Q.range_values_.resize(Q.rank_);
  for (Index k = 0; k < Q.rank_; ++k) {
    Q.range_basis_.col(k) = Q.eig_basis_.col(positive[k]);
    Q.range_values_[k] = Q.eig_values_[positive[k]];
  }
  Q.nu_ = Q.range_values_.minCoeff();
  return Q;
}

void DegenerateMetric::check_dim(Index n) const {
  if (n != dim())
    fail(ErrorCode::DimensionMismatch,
         "vector of size " + std::to_string(n) + " against metric of size " + std::to_string(dim()));
}

Vector DegenerateMetric::apply(const Vector& x) const {
  check_dim(x.size());
  return matrix_ * x;
}

double DegenerateMetric::inner(const Vector& x, const Vector& y) const {
  check_dim(x.size());
  check_dim(y.size());
  return x.dot(matrix_ * y);
}

double DegenerateMetric::norm_sq(const Vector& x) const { return std::max(0.0, inner(x, x)); }

double DegenerateMetric::norm(const Vector& x) const { return std::sqrt(norm_sq(x)); }

Vector DegenerateMetric::pinv_apply(const Vector& y) const {
  check_dim(y.size());
  const Vector coeff = (range_basis_.transpose() * y).cwiseQuotient(range_values_);
  return range_basis_ * coeff;
}

Vector DegenerateMetric::range_project(const Vector& y) const {
  check_dim(y.size());
  return range_basis_ * (range_basis_.transpose() * y);
}

Vector DegenerateMetric::sqrt_apply(const Vector& x) const {
  check_dim(x.size());
  const Vector coeff = (range_basis_.transpose() * x).cwiseProduct(range_values_.cwiseSqrt());
  return range_basis_ * coeff;
}

DegenerateMetric build_metric(const Matrix& matrix, double psd_tol) { return DegenerateMetric::build(matrix, psd_tol); }

double q_norm(const DegenerateMetric& Q, const BlockVector& x) { return Q.norm(x.flatten()); }

BlockVector pinv_apply(const DegenerateMetric& Q, const BlockVector& y) {
  return BlockVector(y.layout(), Q.pinv_apply(y.flatten()));
}

BlockVector range_project(const DegenerateMetric& Q, const BlockVector& y) {
  return BlockVector(y.layout(), Q.range_project(y.flatten()));
}

PsdCertificate psd_certificate(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) fail(ErrorCode::NonSquare, "psd_certificate needs a square matrix");
  PsdCertificate cert;
  if (M.size() == 0) {
    cert.is_psd = true;
    return cert;
  }
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  cert.min_eigenvalue = es.eigenvalues().minCoeff();
  cert.is_psd = cert.min_eigenvalue >= -tol;
  return cert;
}

CheckReport verify_fact_f1(const DegenerateMetric& Q, const CocoerciveMap& B,
                           const std::vector<std::pair<Vector, Vector>>& samples,
                           const std::vector<double>& eta_grid, double tol) {
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (const Vector* x : {&samples[s].first, &samples[s].second}) {
      const Vector bx = B(*x);
      const double off = (bx - Q.range_project(bx)).norm();
      if (off > 1e-8 * (1.0 + bx.norm()))
        fail(ErrorCode::RangeViolation, "sample " + std::to_string(s) + " has Bx outside ran Q by " + std::to_string(off));
    }
  }

  SlackTracker norm_bound("fact_f1_i", tol);
  SlackTracker cauchy("fact_f1_ii", tol);
  std::vector<SlackTracker> young;
  for (double eta : eta_grid) young.emplace_back("fact_f1_iii_eta=" + std::to_string(eta), tol);

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& [x, y] = samples[s];
    const Vector bx = B(x);
    const Vector w = Q.pinv_apply(bx);
    const double w_sq = Q.norm_sq(w);
    const double y_sq = Q.norm_sq(y);
    const long loc = static_cast<long>(s);
    norm_bound.observe(Q.nu() * w_sq, bx.squaredNorm(), loc);
    const double ip = bx.dot(y);
    cauchy.observe(ip, std::sqrt(w_sq) * std::sqrt(y_sq), loc);
    for (std::size_t e = 0; e < eta_grid.size(); ++e) {
      const double eta = eta_grid[e];
      young[e].observe(ip, eta * w_sq + y_sq / (4.0 * eta), loc);
    }
  }

  CheckReport report;
  report.add(norm_bound.result());
  report.add(cauchy.result());
  for (auto& t : young) report.add(t.result());
  return report;
}

}  // namespace gfbs
