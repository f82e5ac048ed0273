#include "gaussreach/sampler.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gaussreach/parallel.hpp"
#include "gaussreach/rng.hpp"

namespace gaussreach {

namespace {

// nth derivative of cos(j u) resp. sin(j u), without the j^n factor.
double trig_deriv(bool is_sin, int order, double ju) {
  int phase = order & 3;
  if (is_sin) phase = (phase + 3) & 3;  // sin = cos shifted by -1 in the cycle
  switch (phase) {
    case 0: return std::cos(ju);
    case 1: return -std::sin(ju);
    case 2: return -std::cos(ju);
    default: return std::sin(ju);
  }
}

}  // namespace

KlExpansion::KlExpansion(const TrigKernel& kernel) : m_(kernel.dim()) {
  if (m_ == 1) {
    for (const auto& t : kernel.terms(0)) {
      double amp = std::sqrt(t.weight);
      for (bool is_sin : {false, true}) {
        BasisFn fn;
        fn.freq = {t.freq, 1};
        fn.is_sin = {is_sin, false};
        fn.amplitude = amp;
        basis_.push_back(fn);
      }
    }
  } else {
    for (const auto& t0 : kernel.terms(0))
      for (const auto& t1 : kernel.terms(1)) {
        double amp = std::sqrt(t0.weight * t1.weight);
        for (bool s0 : {false, true})
          for (bool s1 : {false, true}) {
            BasisFn fn;
            fn.freq = {t0.freq, t1.freq};
            fn.is_sin = {s0, s1};
            fn.amplitude = amp;
            basis_.push_back(fn);
          }
      }
  }
}

Eigen::MatrixXd KlExpansion::basis_matrix(const Eigen::MatrixXd& pts,
                                          const std::array<int, 2>& order) const {
  if (pts.cols() != m_)
    throw std::invalid_argument("KlExpansion: point dimension mismatch");
  Eigen::Index p = pts.rows();
  Eigen::MatrixXd out(basis_size(), p);
  for (int b = 0; b < basis_size(); ++b) {
    const BasisFn& fn = basis_[static_cast<std::size_t>(b)];
    double scale = fn.amplitude;
    for (int d = 0; d < m_; ++d)
      scale *= std::pow(static_cast<double>(fn.freq[d]), order[d]);
    for (Eigen::Index i = 0; i < p; ++i) {
      double v = scale;
      for (int d = 0; d < m_; ++d)
        v *= trig_deriv(fn.is_sin[d], order[d], fn.freq[d] * pts(i, d));
      out(b, i) = v;
    }
  }
  return out;
}

Eigen::MatrixXd KlExpansion::sample_coefficients(int k, std::uint64_t seed,
                                                 int threads) const {
  Eigen::MatrixXd coeff(k, basis_size());
  parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    for (int b = 0; b < basis_size(); ++b)
      coeff(static_cast<Eigen::Index>(r), b) =
          basis_[static_cast<std::size_t>(b)].amplitude * rng.normal();
  });
  return coeff;
}

int d2_index(int i, int j, int m) {
  if (i > j) std::swap(i, j);
  // (0,0) -> 0; for m=2 additionally (0,1) -> 1, (1,1) -> 2.
  return i * (2 * m - i - 1) / 2 + j;
}

Eigen::MatrixXd FieldBatch::eval_values(const Eigen::MatrixXd& pts) const {
  if (!kl) throw std::invalid_argument("FieldBatch: off-grid evaluation needs the kl method");
  return kl_coeff * kl->basis_matrix(pts, {0, 0});
}

Eigen::MatrixXd FieldBatch::eval_d1(const Eigen::MatrixXd& pts, int d) const {
  if (!kl) throw std::invalid_argument("FieldBatch: off-grid evaluation needs the kl method");
  std::array<int, 2> order{0, 0};
  order[static_cast<std::size_t>(d)] = 1;
  return kl_coeff * kl->basis_matrix(pts, order);
}

Eigen::MatrixXd FieldBatch::eval_d2(const Eigen::MatrixXd& pts, int i, int j) const {
  if (!kl) throw std::invalid_argument("FieldBatch: off-grid evaluation needs the kl method");
  std::array<int, 2> order{0, 0};
  order[static_cast<std::size_t>(i)] += 1;
  order[static_cast<std::size_t>(j)] += 1;
  return kl_coeff * kl->basis_matrix(pts, order);
}

FieldBatch sample_kl(const TrigKernel& kernel, const ManifoldGrid& grid, int k,
                     std::uint64_t seed, int threads) {
  if (k < 1) throw std::invalid_argument("sample_kl: k must be >= 1");
  if (kernel.dim() != grid.dim)
    throw std::invalid_argument("sample_kl: kernel/grid dimension mismatch");

  FieldBatch batch;
  batch.grid = grid;
  batch.k = k;
  batch.seed = seed;
  batch.method = SampleMethod::kl;
  batch.kl = std::make_shared<KlExpansion>(kernel);
  batch.kl_coeff = batch.kl->sample_coefficients(k, seed, threads);

  int m = grid.dim;
  batch.values = batch.kl_coeff * batch.kl->basis_matrix(grid.points, {0, 0});
  for (int d = 0; d < m; ++d) {
    std::array<int, 2> order{0, 0};
    order[static_cast<std::size_t>(d)] = 1;
    batch.d1.push_back(batch.kl_coeff * batch.kl->basis_matrix(grid.points, order));
  }
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      std::array<int, 2> order{0, 0};
      order[static_cast<std::size_t>(i)] += 1;
      order[static_cast<std::size_t>(j)] += 1;
      batch.d2.push_back(batch.kl_coeff * batch.kl->basis_matrix(grid.points, order));
    }
  return batch;
}

PointSample sample_kl_at_points(const TrigKernel& kernel, const Eigen::MatrixXd& pts,
                                int k, std::uint64_t seed, int threads) {
  if (k < 1) throw std::invalid_argument("sample_kl_at_points: k must be >= 1");
  KlExpansion kl(kernel);
  Eigen::MatrixXd coeff = kl.sample_coefficients(k, seed, threads);
  PointSample out;
  out.values = coeff * kl.basis_matrix(pts, {0, 0});
  for (int d = 0; d < kernel.dim(); ++d) {
    std::array<int, 2> order{0, 0};
    order[static_cast<std::size_t>(d)] = 1;
    out.d1.push_back(coeff * kl.basis_matrix(pts, order));
  }
  return out;
}

FieldBatch sample_cholesky(const TrigKernel& kernel, const ManifoldGrid& grid,
                           int k, std::uint64_t seed, int threads) {
  if (k < 1) throw std::invalid_argument("sample_cholesky: k must be >= 1");
  if (kernel.dim() != grid.dim)
    throw std::invalid_argument("sample_cholesky: kernel/grid dimension mismatch");

  int m = grid.dim;
  Eigen::Index n = grid.size();
  Eigen::Index dim = n * (1 + m);
  if (dim > 8192)
    throw std::invalid_argument("sample_cholesky: joint covariance dimension exceeds 8192");

  // Blocks: values, then one first-derivative block per dimension.
  Eigen::MatrixXd cov(dim, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      KernelDerivs kd(kernel, grid.point(i), grid.point(j), 2);
      cov(i, j) = kd.lag_deriv(0, 0);
      for (int d = 0; d < m; ++d) {
        // y-derivative flips the lag sign once; x- and y-derivatives together
        // flip it twice.
        double first = (d == 0) ? kd.lag_deriv(1, 0) : kd.lag_deriv(0, 1);
        cov(i, n * (1 + d) + j) = -first;
        cov(n * (1 + d) + i, j) = first;
        for (int c = 0; c < m; ++c) {
          int p = (c == 0 ? 1 : 0) + (d == 0 ? 1 : 0);
          int q = (c == 1 ? 1 : 0) + (d == 1 ? 1 : 0);
          cov(n * (1 + c) + i, n * (1 + d) + j) =
              -kd.lag_deriv(p, m == 1 ? 0 : q);
        }
      }
    }

  double base = cov.trace() / static_cast<double>(dim);
  double jitter = 1e-12 * base;
  const double jitter_cap = 1e-6 * base;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (;;) {
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) break;
    jitter *= 10.0;
    if (jitter > jitter_cap)
      throw NumericalError("sample_cholesky: factorization failed, final jitter " +
                           std::to_string(jitter / 10.0));
  }
  Eigen::MatrixXd lower = llt.matrixL();

  FieldBatch batch;
  batch.grid = grid;
  batch.k = k;
  batch.seed = seed;
  batch.method = SampleMethod::cholesky;
  batch.values.resize(k, n);
  for (int d = 0; d < m; ++d) batch.d1.emplace_back(k, n);

  parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = rng.normal();
    Eigen::VectorXd s = lower * z;
    Eigen::Index row = static_cast<Eigen::Index>(r);
    batch.values.row(row) = s.head(n).transpose();
    for (int d = 0; d < m; ++d)
      batch.d1[static_cast<std::size_t>(d)].row(row) =
          s.segment(n * (1 + d), n).transpose();
  });
  return batch;
}

namespace {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& mat) {
  for (Eigen::Index i = 0; i < mat.rows(); ++i)
    for (Eigen::Index j = 0; j < mat.cols(); ++j) write_pod(os, mat(i, j));
}

Eigen::MatrixXd read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd mat(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) mat(i, j) = read_pod<double>(is);
  return mat;
}

}  // namespace

void write_batch(const std::string& path, const FieldBatch& batch) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_batch: cannot open " + path);
  os.write("GRFB1", 5);
  write_pod<std::uint8_t>(os, batch.method == SampleMethod::kl ? 0 : 1);
  std::uint8_t flags = 0;
  if (batch.has_d1()) flags |= 1;
  if (batch.has_d2()) flags |= 2;
  write_pod<std::uint8_t>(os, flags);
  write_pod<std::uint8_t>(os, 0);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(batch.grid.dim));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(batch.grid.n_per_dim));
  write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(batch.grid.size()));
  write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(batch.k));
  write_pod<std::uint64_t>(os, batch.seed);
  write_matrix(os, batch.values);
  for (const auto& mat : batch.d1) write_matrix(os, mat);
  for (const auto& mat : batch.d2) write_matrix(os, mat);
  if (!os) throw std::runtime_error("write_batch: write failed for " + path);
}

FieldBatch read_batch(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_batch: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "GRFB1", 5) != 0)
    throw std::runtime_error("read_batch: bad magic in " + path);
  auto method = read_pod<std::uint8_t>(is);
  auto flags = read_pod<std::uint8_t>(is);
  read_pod<std::uint8_t>(is);
  auto m = read_pod<std::uint32_t>(is);
  auto n_per_dim = read_pod<std::uint32_t>(is);
  auto n = static_cast<Eigen::Index>(read_pod<std::uint64_t>(is));
  auto k = static_cast<Eigen::Index>(read_pod<std::uint64_t>(is));

  FieldBatch batch;
  batch.seed = read_pod<std::uint64_t>(is);
  batch.method = method == 0 ? SampleMethod::kl : SampleMethod::cholesky;
  batch.grid = build_uniform_grid(static_cast<int>(m), static_cast<int>(n_per_dim));
  if (batch.grid.size() != n) throw std::runtime_error("read_batch: size mismatch");
  batch.k = static_cast<int>(k);
  batch.values = read_matrix(is, k, n);
  if (flags & 1)
    for (std::uint32_t d = 0; d < m; ++d) batch.d1.push_back(read_matrix(is, k, n));
  if (flags & 2) {
    int pairs = static_cast<int>(m) * (static_cast<int>(m) + 1) / 2;
    for (int p = 0; p < pairs; ++p) batch.d2.push_back(read_matrix(is, k, n));
  }
  if (!is) throw std::runtime_error("read_batch: truncated file " + path);
  return batch;
}

}  // namespace gaussreach
