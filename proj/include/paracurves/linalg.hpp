#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace paracurves::linalg {

/// Relative singular-value cutoff used for every rank decision in the library.
inline constexpr double kRankTolerance = 1e-8;

/// Singular values at or below `rel_tol * reference` count as zero. A
/// non-positive `reference` means "use the largest singular value".
double rank_cutoff(const Eigen::VectorXd& singular_values, double rel_tol, double reference);

int numerical_rank(const Eigen::MatrixXd& a, double rel_tol = kRankTolerance, double reference = -1.0);

/// Orthonormal basis (as columns) of the kernel of `a`.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol = kRankTolerance,
                           double reference = -1.0);

/// Orthonormal basis (as columns) of the column span of `a`, via column-pivoted QR.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a, double rel_tol = kRankTolerance,
                                  double reference = -1.0);

/// Orthonormal basis of span(a) ∩ span(b).
Eigen::MatrixXd intersect(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          double rel_tol = kRankTolerance);

/// Residual of the orthogonal projection of `x` onto the span of the orthonormal columns `q`.
inline Eigen::VectorXd residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& x) {
  if (q.cols() == 0) return x;
  return x - q * (q.transpose() * x);
}

/// First-derivative weights at nodes[i] over the window [first, first + weights.size()).
struct Stencil {
  std::size_t first = 0;
  Eigen::VectorXd weights;

  template <class V>
  V apply(const std::vector<V>& values) const {
    V out = weights(0) * values[first];
    for (Eigen::Index k = 1; k < weights.size(); ++k) out += weights(k) * values[first + static_cast<std::size_t>(k)];
    return out;
  }
};

/// Fornberg weights on up to `width` neighbouring nodes (which may be unevenly spaced): the
/// window is centred on i where it fits and shifted inward near the ends.
Stencil derivative_stencil(const std::vector<double>& nodes, std::size_t i, int width = 5);

}  // namespace paracurves::linalg
