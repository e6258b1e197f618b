#include "paracurves/linalg.hpp"

#include <algorithm>

#include "paracurves/errors.hpp"

namespace paracurves::linalg {

double rank_cutoff(const Eigen::VectorXd& singular_values, double rel_tol, double reference) {
  double top = singular_values.size() > 0 ? singular_values.maxCoeff() : 0.0;
  double scale = reference > 0.0 ? reference : top;
  return rel_tol * scale;
}

int numerical_rank(const Eigen::MatrixXd& a, double rel_tol, double reference) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  double cut = rank_cutoff(s, rel_tol, reference);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol, double reference) {
  const Eigen::Index cols = a.cols();
  if (cols == 0) return Eigen::MatrixXd(0, 0);
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  double cut = rank_cutoff(s, rel_tol, reference);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  // singular values are sorted in decreasing order
  return svd.matrixV().rightCols(cols - r);
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a, double rel_tol, double reference) {
  if (a.cols() == 0 || a.rows() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
  double top = diag.size() > 0 ? diag.maxCoeff() : 0.0;
  double cut = rel_tol * (reference > 0.0 ? reference : top);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (diag(i) > cut) ++r;
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), r);
  return q;
}

Eigen::MatrixXd intersect(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rel_tol) {
  Eigen::MatrixXd qa = orthonormal_basis(a, rel_tol);
  Eigen::MatrixXd qb = orthonormal_basis(b, rel_tol);
  if (qa.cols() == 0 || qb.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::MatrixXd stacked(qa.rows(), qa.cols() + qb.cols());
  stacked << qa, -qb;
  Eigen::MatrixXd kernel = null_space(stacked, rel_tol, 1.0);
  if (kernel.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  return orthonormal_basis(qa * kernel.topRows(qa.cols()), rel_tol, 1.0);
}

Stencil derivative_stencil(const std::vector<double>& nodes, std::size_t i, int width) {
  const std::size_t count = nodes.size();
  if (count < 2 || i >= count) throw PreconditionError("derivative stencil needs two nodes around the sample");
  const std::size_t w = std::min(count, static_cast<std::size_t>(std::max(width, 2)));
  std::size_t first = i >= w / 2 ? i - w / 2 : 0;
  first = std::min(first, count - w);
  // Fornberg's recursion, derivative orders 0 and 1
  const double z = nodes[i];
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(w), 2);
  double c1 = 1.0, c4 = nodes[first] - z;
  c(0, 0) = 1.0;
  for (std::size_t a = 1; a < w; ++a) {
    const auto ia = static_cast<Eigen::Index>(a);
    double c2 = 1.0, c5 = c4;
    c4 = nodes[first + a] - z;
    for (std::size_t b = 0; b < a; ++b) {
      const auto ib = static_cast<Eigen::Index>(b);
      const double c3 = nodes[first + a] - nodes[first + b];
      if (c3 == 0.0) throw PreconditionError("derivative stencil nodes must be distinct");
      c2 *= c3;
      if (b + 1 == a) {
        c(ia, 1) = c1 * (c(ia - 1, 0) - c5 * c(ia - 1, 1)) / c2;
        c(ia, 0) = -c1 * c5 * c(ia - 1, 0) / c2;
      }
      c(ib, 1) = (c4 * c(ib, 1) - c(ib, 0)) / c3;
      c(ib, 0) = c4 * c(ib, 0) / c3;
    }
    c1 = c2;
  }
  return Stencil{first, c.col(1)};
}

}  // namespace paracurves::linalg
