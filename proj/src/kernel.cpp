#include "gaussreach/kernel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>

namespace gaussreach {

namespace {
constexpr double kWeightTol = 1e-12;

// d^order/du^order of cos(j u), evaluated via the 4-cycle of trig functions.
double cos_cycle(int order, double ju) {
  switch (order & 3) {
    case 0: return std::cos(ju);
    case 1: return -std::sin(ju);
    case 2: return -std::cos(ju);
    default: return std::sin(ju);
  }
}
}  // namespace

TrigKernel::TrigKernel(std::vector<std::vector<SpectralTerm>> dims)
    : dims_(std::move(dims)) {
  if (dims_.empty() || dims_.size() > 2)
    throw std::invalid_argument("TrigKernel: need 1 or 2 dimensions");
  for (const auto& terms : dims_) {
    if (terms.empty()) throw std::invalid_argument("TrigKernel: empty spectrum");
    double total = 0.0;
    std::set<int> seen;
    for (const auto& t : terms) {
      if (t.freq < 1) throw std::invalid_argument("TrigKernel: frequency must be >= 1");
      if (t.weight < 0.0) throw std::invalid_argument("TrigKernel: negative weight");
      if (!seen.insert(t.freq).second)
        throw std::invalid_argument("TrigKernel: duplicate frequency");
      total += t.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol)
      throw std::invalid_argument("TrigKernel: weights must sum to 1");
  }
}

double TrigKernel::lambda(int d) const {
  double s = 0.0;
  for (const auto& t : terms(d)) s += t.weight * t.freq * t.freq;
  return s;
}

double TrigKernel::quartic_moment(int d) const {
  double s = 0.0;
  for (const auto& t : terms(d)) {
    double j2 = static_cast<double>(t.freq) * t.freq;
    s += t.weight * j2 * j2;
  }
  return s;
}

double TrigKernel::factor_eval(int d, double u) const {
  double s = 0.0;
  for (const auto& t : terms(d)) s += t.weight * std::cos(t.freq * u);
  return s;
}

double TrigKernel::factor_one_minus(int d, double u) const {
  double s = 0.0;
  for (const auto& t : terms(d)) {
    double h = std::sin(0.5 * t.freq * u);
    s += t.weight * 2.0 * h * h;
  }
  return s;
}

double TrigKernel::factor_deriv(int d, double u, int order) const {
  double s = 0.0;
  for (const auto& t : terms(d)) {
    double jp = std::pow(static_cast<double>(t.freq), order);
    s += t.weight * jp * cos_cycle(order, t.freq * u);
  }
  return s;
}

bool TrigKernel::has_two_frequencies_per_dim() const {
  for (int d = 0; d < dim(); ++d) {
    int positive = 0;
    for (const auto& t : terms(d))
      if (t.weight > 0.0) ++positive;
    if (positive < 2) return false;
  }
  return true;
}

double kernel_eval(const TrigKernel& kernel, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  if (x.size() != kernel.dim() || y.size() != kernel.dim())
    throw std::invalid_argument("kernel_eval: point dimension mismatch");
  Eigen::VectorXd lag = wrap_distance(x, y);
  double c = 1.0;
  for (int d = 0; d < kernel.dim(); ++d) c *= kernel.factor_eval(d, lag[d]);
  return c;
}

double kernel_one_minus(const TrigKernel& kernel, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y) {
  Eigen::VectorXd lag = wrap_distance(x, y);
  // 1 - C1*C2 = (1-C1) + C1*(1-C2), recursively over dimensions.
  double one_minus = kernel.factor_one_minus(0, lag[0]);
  double prod = 1.0 - one_minus;
  for (int d = 1; d < kernel.dim(); ++d) {
    double om_d = kernel.factor_one_minus(d, lag[d]);
    one_minus += prod * om_d;
    prod *= 1.0 - om_d;
  }
  return one_minus;
}

KernelDerivs::KernelDerivs(const TrigKernel& kernel, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, int max_order)
    : m_(kernel.dim()), max_order_(max_order) {
  if (max_order < 0 || max_order > 6)
    throw std::invalid_argument("kernel_derivs: order must be in [0, 6]");
  lag_ = wrap_distance(x, y);
  table_.setZero(max_order + 1, max_order + 1);
  if (m_ == 1) {
    for (int p = 0; p <= max_order; ++p)
      table_(p, 0) = kernel.factor_deriv(0, lag_[0], p);
  } else {
    Eigen::VectorXd f0(max_order + 1), f1(max_order + 1);
    for (int p = 0; p <= max_order; ++p) {
      f0[p] = kernel.factor_deriv(0, lag_[0], p);
      f1[p] = kernel.factor_deriv(1, lag_[1], p);
    }
    for (int p = 0; p <= max_order; ++p)
      for (int q = 0; p + q <= max_order; ++q) table_(p, q) = f0[p] * f1[q];
  }
}

double KernelDerivs::lag_deriv(int p, int q) const {
  if (p < 0 || q < 0 || p + q > max_order_)
    throw std::invalid_argument("KernelDerivs: order out of range");
  if (m_ == 1 && q != 0)
    throw std::invalid_argument("KernelDerivs: second lag index on a 1-D kernel");
  return table_(p, q);
}

KernelDerivs kernel_derivs(const TrigKernel& kernel, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, int max_order) {
  return KernelDerivs(kernel, x, y, max_order);
}

Eigen::VectorXd induced_metric_coeff(const TrigKernel& kernel) {
  Eigen::VectorXd lambda(kernel.dim());
  for (int d = 0; d < kernel.dim(); ++d) lambda[d] = kernel.lambda(d);
  return lambda;
}

namespace {

// Covariance of the joint vector (f, df_1..df_m, d2f_{ij} for i<=j) at one
// point. Entry signs follow from one derivative per x/y argument: each
// y-derivative flips the lag-derivative sign once; even counts cancel.
Eigen::MatrixXd joint_derivative_covariance(const TrigKernel& kernel) {
  int m = kernel.dim();
  std::vector<std::array<int, 2>> orders;  // per-dimension derivative orders
  orders.push_back({0, 0});
  for (int i = 0; i < m; ++i) {
    std::array<int, 2> o{0, 0};
    o[i] = 1;
    orders.push_back(o);
  }
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      std::array<int, 2> o{0, 0};
      o[i] += 1;
      o[j] += 1;
      orders.push_back(o);
    }

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
  KernelDerivs at_zero(kernel, zero, zero, 6);
  int n = static_cast<int>(orders.size());
  Eigen::MatrixXd cov(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int ny = orders[b][0] + orders[b][1];
      double sign = (ny % 2 == 0) ? 1.0 : -1.0;
      cov(a, b) = sign * at_zero.lag_deriv(orders[a][0] + orders[b][0],
                                           m == 1 ? 0 : orders[a][1] + orders[b][1]);
    }
  return cov;
}

}  // namespace

KernelValidation validate_kernel(const TrigKernel& kernel, const ManifoldGrid& grid) {
  if (kernel.dim() != grid.dim)
    throw std::invalid_argument("validate_kernel: kernel/grid dimension mismatch");

  KernelValidation report;
  Eigen::VectorXd p0 = grid.point(0);
  report.unit_variance = std::abs(kernel_eval(kernel, p0, p0) - 1.0) <= 1e-12;

  Eigen::Index n = grid.size();
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double c = kernel_eval(kernel, grid.point(i), grid.point(j));
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> grid_eig(cov,
                                                          Eigen::EigenvaluesOnly);
  report.psd_min_eigenvalue = grid_eig.eigenvalues().minCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> joint_eig(
      joint_derivative_covariance(kernel), Eigen::EigenvaluesOnly);
  report.joint_min_eigenvalue = joint_eig.eigenvalues().minCoeff();

  report.nondegenerate =
      kernel.has_two_frequencies_per_dim() && report.joint_min_eigenvalue > 1e-8;
  return report;
}

}  // namespace gaussreach
