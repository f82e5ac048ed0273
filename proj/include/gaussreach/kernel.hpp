#pragma once

#include <Eigen/Core>
#include <vector>

#include "gaussreach/geometry.hpp"

namespace gaussreach {

struct SpectralTerm {
  int freq = 1;      // positive integer frequency
  double weight = 0; // nonnegative, per-dimension weights sum to 1
};

/// Stationary unit-variance covariance on the circle/torus given by a finite
/// cosine expansion per dimension, C(lag) = prod_d sum_j a_j cos(j*lag_d).
/// Finite expansions keep every derivative exact and make the spectral
/// sampler an exact Karhunen-Loeve construction.
class TrigKernel {
 public:
  explicit TrigKernel(std::vector<std::vector<SpectralTerm>> dims);

  int dim() const { return static_cast<int>(dims_.size()); }
  const std::vector<SpectralTerm>& terms(int d) const { return dims_.at(d); }

  /// Induced-metric coefficient per dimension, lambda_d = sum_j a_j j^2.
  double lambda(int d) const;
  /// Fourth spectral moment per dimension, mu_d = sum_j a_j j^4.
  double quartic_moment(int d) const;

  /// 1-D factor C_d(u) = sum_j a_j cos(j u).
  double factor_eval(int d, double u) const;
  /// 1 - C_d(u) via sum_j a_j * 2 sin^2(j u / 2); no cancellation near u = 0.
  double factor_one_minus(int d, double u) const;
  /// order-th derivative of the 1-D factor.
  double factor_deriv(int d, double u, int order) const;

  /// True when every dimension carries at least two distinct frequencies with
  /// positive weight (necessary for a nondegenerate (f, f', f'') joint law).
  bool has_two_frequencies_per_dim() const;

 private:
  std::vector<std::vector<SpectralTerm>> dims_;
};

double kernel_eval(const TrigKernel& kernel, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

/// 1 - C(x,y), assembled from the per-dimension one-minus factors so that
/// near-coincident points lose no precision.
double kernel_one_minus(const TrigKernel& kernel, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y);

/// Table of mixed partial derivatives of C with respect to the coordinate
/// lags u = wrap(x - y), at a fixed pair. Derivatives with respect to x pick
/// up a +1 sign per order, with respect to y a -1 sign per order.
class KernelDerivs {
 public:
  KernelDerivs(const TrigKernel& kernel, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y, int max_order);

  int dim() const { return m_; }
  int max_order() const { return max_order_; }
  const Eigen::VectorXd& lag() const { return lag_; }

  /// d^{p+q} C / du_1^p du_2^q  (q must be 0 when dim == 1).
  double lag_deriv(int p, int q = 0) const;

  /// First derivative with respect to x_i resp. y_i.
  double dx(int i) const { return lag_deriv(i == 0 ? 1 : 0, i == 0 ? 0 : 1); }
  double dy(int i) const { return -dx(i); }

 private:
  int m_;
  int max_order_;
  Eigen::VectorXd lag_;
  Eigen::MatrixXd table_;  // (max_order+1) x (max_order+1); column 0 when m=1
};

KernelDerivs kernel_derivs(const TrigKernel& kernel, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, int max_order);

/// Per-dimension induced-metric coefficients (the orthonormal frame is
/// lambda^{-1/2} d/du per dimension).
Eigen::VectorXd induced_metric_coeff(const TrigKernel& kernel);

struct KernelValidation {
  bool unit_variance = false;
  double psd_min_eigenvalue = 0.0;    // of the N x N grid covariance
  double joint_min_eigenvalue = 0.0;  // of the (f, grad f, hess f) covariance
  bool nondegenerate = false;
};

/// Reports validity diagnostics; never throws on a degenerate kernel.
KernelValidation validate_kernel(const TrigKernel& kernel, const ManifoldGrid& grid);

}  // namespace gaussreach
