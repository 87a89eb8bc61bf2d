#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "pggsvd/mi.hpp"

namespace pggsvd {

void NoiseQuadrature::validate() const {
  if (samples < 1) throw std::invalid_argument("quadrature needs at least one sample");
}

void gauss_hermite_rule(int n, RVector& nodes, RVector& weights) {
  if (n < 1) throw std::invalid_argument("Gauss-Hermite rule needs n >= 1");
  // Golub-Welsch on the symmetric Jacobi matrix of the Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes = eig.eigenvalues();
  weights = eig.eigenvectors().row(0).transpose().array().square() * std::sqrt(std::numbers::pi);
}

NoiseSamples draw_noise(const NoiseQuadrature& q, int dim) {
  q.validate();
  if (dim < 0) throw std::invalid_argument("noise dimension must be nonnegative");
  NoiseSamples out;
  if (q.kind == QuadratureKind::MonteCarlo) {
    out.monte_carlo = true;
    out.z.resize(dim, q.samples);
    std::mt19937_64 rng(q.seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (int l = 0; l < q.samples; ++l) {
      for (int i = 0; i < dim; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        out.z(i, l) = cplx(re, im);
      }
    }
    out.weights = RVector::Constant(q.samples, 1.0 / q.samples);
    return out;
  }

  if (dim > kMaxGaussHermiteDim) {
    throw std::invalid_argument("Gauss-Hermite quadrature supports at most " +
                                std::to_string(kMaxGaussHermiteDim) +
                                " complex dimensions, got " + std::to_string(dim));
  }
  out.monte_carlo = false;
  RVector nodes, w;
  gauss_hermite_rule(q.samples, nodes, w);
  w /= std::sqrt(std::numbers::pi);
  const int real_dims = 2 * dim;
  Eigen::Index total = 1;
  for (int i = 0; i < real_dims; ++i) total *= q.samples;
  out.z.resize(dim, total);
  out.weights.resize(total);
  for (Eigen::Index idx = 0; idx < total; ++idx) {
    Eigen::Index rest = idx;
    double weight = 1.0;
    for (int i = 0; i < dim; ++i) {
      const Eigen::Index a = rest % q.samples;
      rest /= q.samples;
      const Eigen::Index b = rest % q.samples;
      rest /= q.samples;
      out.z(i, idx) = cplx(nodes(a), nodes(b));
      weight *= w(a) * w(b);
    }
    out.weights(idx) = weight;
  }
  return out;
}

NoiseSamples select_rows(const NoiseSamples& full, const std::vector<int>& rows) {
  NoiseSamples out;
  out.monte_carlo = full.monte_carlo;
  out.weights = full.weights;
  out.z.resize(static_cast<Eigen::Index>(rows.size()), full.count());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.z.row(static_cast<Eigen::Index>(i)) = full.z.row(rows[i]);
  }
  return out;
}

double standard_error(const RVector& per_sample, const NoiseSamples& noise) {
  if (!noise.monte_carlo) return 0.0;
  const Eigen::Index n = per_sample.size();
  if (n < 2) return 0.0;
  const double mean = per_sample.mean();
  const double var = (per_sample.array() - mean).square().sum() / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace pggsvd
