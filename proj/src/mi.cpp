#include "pggsvd/mi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pggsvd {

namespace {

void check_inputs(const CMatrix& t, double noise_var) {
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw std::invalid_argument("noise variance must be positive and finite");
  }
  if (!t.allFinite()) throw std::invalid_argument("channel matrix has non-finite entries");
}

}  // namespace

MiEvaluation evaluate_mi(const CMatrix& t, const CMatrix& symbols, double noise_var,
                         const NoiseSamples& noise, MiTerms terms) {
  check_inputs(t, noise_var);
  const Eigen::Index d = t.rows();
  const Eigen::Index n = t.cols();
  const Eigen::Index count = symbols.cols();
  const Eigen::Index samples = noise.count();
  if (symbols.rows() != n) throw std::invalid_argument("symbol dimension does not match channel");
  if (noise.dim() != d) throw std::invalid_argument("noise dimension does not match channel");

  MiEvaluation out;
  out.additions = static_cast<std::uint64_t>(count) * static_cast<std::uint64_t>(count);
  out.per_sample = RVector::Zero(samples);
  if (terms.mmse) out.mmse = CMatrix::Zero(n, n);
  CMatrix acc_ye, acc_post;
  if (terms.gradient) {
    acc_ye = CMatrix::Zero(d, n);
    acc_post = CMatrix::Zero(n, n);
  }

  // Noiseless received points, stored per receive dimension as contiguous
  // columns so the distance loop vectorizes over the alphabet.
  const CMatrix tx = t * symbols;
  Eigen::ArrayXXd tx_re(count, d), tx_im(count, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    tx_re.col(i) = tx.row(i).real().transpose();
    tx_im.col(i) = tx.row(i).imag().transpose();
  }

  const double sigma = std::sqrt(noise_var);
  const double inv_var = 1.0 / noise_var;
  const double log_count = std::log(static_cast<double>(count));
  const double inv_count = 1.0 / static_cast<double>(count);

  Eigen::ArrayXd dist(count), expo(count);
  CVector y(d), xhat(n), err(n);
  for (Eigen::Index l = 0; l < samples; ++l) {
    const CVector noise_l = sigma * noise.z.col(l);
    // Same summation order as the distance loop so that terms with
    // T(x_m - x_k) = 0 give an exponent of exactly zero.
    double noise_norm = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      noise_norm += noise_l(i).real() * noise_l(i).real() + noise_l(i).imag() * noise_l(i).imag();
    }
    const double weight = noise.weights(l) * inv_count;
    double lse_sum = 0.0;
    for (Eigen::Index m = 0; m < count; ++m) {
      y = tx.col(m) + noise_l;
      dist.setZero();
      for (Eigen::Index i = 0; i < d; ++i) {
        dist += (tx_re.col(i) - y(i).real()).square() + (tx_im.col(i) - y(i).imag()).square();
      }
      // Exponent of the k-th term: -(|T(x_m - x_k) + n|^2 - |n|^2) / sigma^2.
      expo = (noise_norm - dist) * inv_var;
      const double top = expo.maxCoeff();
      expo = (expo - top).exp();
      const double total = expo.sum();
      lse_sum += top + std::log(total);

      if (terms.mmse || terms.gradient) {
        expo /= total;  // posterior probabilities of each x_k given y
        xhat = symbols * expo.matrix().cast<cplx>();
        err = symbols.col(m) - xhat;
        if (terms.mmse) out.mmse.noalias() += weight * err * err.adjoint();
        if (terms.gradient) {
          // sum_k w_k (y - T x_k)(x_m - x_k)^H = y e^H + T (S_post - xhat x_m^H)
          acc_ye.noalias() += weight * y * err.adjoint();
          acc_post.noalias() +=
              weight * (symbols * expo.matrix().cast<cplx>().asDiagonal() * symbols.adjoint() -
                        xhat * symbols.col(m).adjoint());
        }
      }
    }
    out.per_sample(l) = log_count - lse_sum * inv_count;
  }

  out.nats = noise.weights.dot(out.per_sample);
  if (terms.gradient) {
    // At T = 0 every posterior is uniform and the terms cancel; only rounding remains.
    out.grad_t = t.isZero(0.0) ? CMatrix::Zero(d, n) : CMatrix((acc_ye + t * acc_post) * inv_var);
  }
  return out;
}

CMatrix clip_to_unit_interval(const CMatrix& e) {
  const CMatrix herm = 0.5 * (e + e.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  const RVector vals = eig.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  return eig.eigenvectors() * vals.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
}

MiResult mutual_information(const CMatrix& t, const Constellation& c, double noise_var,
                            const NoiseQuadrature& q) {
  check_inputs(t, noise_var);
  const int n = static_cast<int>(t.cols());
  const CMatrix symbols = product_points(c, n);
  const NoiseSamples noise = draw_noise(q, static_cast<int>(t.rows()));
  const MiEvaluation ev = evaluate_mi(t, symbols, noise_var, noise);
  MiResult r;
  const double cap = n * c.log2_order();
  r.bits = std::clamp(ev.nats / std::numbers::ln2, 0.0, cap);
  r.additions = ev.additions;
  r.std_error = standard_error(ev.per_sample, noise) / std::numbers::ln2;
  return r;
}

CMatrix mmse_matrix(const CMatrix& t, const Constellation& c, double noise_var,
                    const NoiseQuadrature& q) {
  check_inputs(t, noise_var);
  const CMatrix symbols = product_points(c, static_cast<int>(t.cols()));
  const NoiseSamples noise = draw_noise(q, static_cast<int>(t.rows()));
  const MiEvaluation ev = evaluate_mi(t, symbols, noise_var, noise, {.mmse = true});
  return clip_to_unit_interval(ev.mmse);
}

CMatrix mi_gradient(const CMatrix& h_eff, const CMatrix& g, const Constellation& c,
                    double noise_var, const NoiseQuadrature& q) {
  if (h_eff.cols() != g.rows()) throw std::invalid_argument("mi_gradient: H G dimension mismatch");
  const CMatrix t = h_eff * g;
  check_inputs(t, noise_var);
  const CMatrix symbols = product_points(c, static_cast<int>(t.cols()));
  const NoiseSamples noise = draw_noise(q, static_cast<int>(t.rows()));
  const MiEvaluation ev = evaluate_mi(t, symbols, noise_var, noise, {.gradient = true});
  return h_eff.adjoint() * ev.grad_t / std::numbers::ln2;
}

CMatrix mmse_gradient(const CMatrix& h_eff, const CMatrix& g, const Constellation& c,
                      double noise_var, const NoiseQuadrature& q) {
  if (h_eff.cols() != g.rows()) {
    throw std::invalid_argument("mmse_gradient: H G dimension mismatch");
  }
  const CMatrix e = mmse_matrix(h_eff * g, c, noise_var, q);
  return h_eff.adjoint() * h_eff * g * e / (noise_var * std::numbers::ln2);
}

}  // namespace pggsvd
