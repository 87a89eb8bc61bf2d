#pragma once

#include <cstdint>
#include <vector>

#include "pggsvd/constellation.hpp"
#include "pggsvd/types.hpp"

namespace pggsvd {

enum class QuadratureKind { MonteCarlo, GaussHermite };

/// How the expectation over receiver noise is evaluated. For Monte Carlo,
/// `samples` is the number of complex noise vectors; for Gauss-Hermite it is
/// the number of nodes per real dimension (only up to two complex dimensions).
struct NoiseQuadrature {
  QuadratureKind kind = QuadratureKind::MonteCarlo;
  int samples = 500;
  std::uint64_t seed = 1;

  void validate() const;
};

inline constexpr int kMaxGaussHermiteDim = 2;

/// Unit-variance circularly symmetric noise vectors (columns of `z`) with
/// quadrature weights summing to one.
struct NoiseSamples {
  CMatrix z;
  RVector weights;
  bool monte_carlo = true;

  Eigen::Index count() const { return z.cols(); }
  Eigen::Index dim() const { return z.rows(); }
};

/// Deterministic in (q.seed, dim). The same seed with the same dimension
/// always yields the same draws, which is what common random numbers rely on.
NoiseSamples draw_noise(const NoiseQuadrature& q, int dim);

/// Keeps the samples but only the listed rows; used to carve per-group noise out
/// of a full receiver batch.
NoiseSamples select_rows(const NoiseSamples& full, const std::vector<int>& rows);

/// Nodes and weights for \int e^{-t^2} f(t) dt.
void gauss_hermite_rule(int n, RVector& nodes, RVector& weights);

struct MiResult {
  double bits = 0.0;
  std::uint64_t additions = 0;  // exponential-sum terms per noise realization, M^{2N}
  double std_error = 0.0;       // quadrature standard error in bits (0 for Gauss-Hermite)
};

/// I(x; T x + n) for x uniform on the product constellation and n ~ CN(0, noise_var I).
MiResult mutual_information(const CMatrix& t, const Constellation& c, double noise_var,
                            const NoiseQuadrature& q);

/// E[(x - E[x|y])(x - E[x|y])^H], projected onto 0 <= E <= I.
CMatrix mmse_matrix(const CMatrix& t, const Constellation& c, double noise_var,
                    const NoiseQuadrature& q);

/// dI/dG^* (Wirtinger, bits) of the quadrature estimate of I(x; H G x + n).
/// This is the exact derivative of what mutual_information() returns with the
/// same quadrature, so it agrees with finite differences.
CMatrix mi_gradient(const CMatrix& h_eff, const CMatrix& g, const Constellation& c,
                    double noise_var, const NoiseQuadrature& q);

/// Closed form (1 / (noise_var ln 2)) H^H H G E with E = mmse_matrix(H G).
/// Equals mi_gradient in expectation over the noise.
CMatrix mmse_gradient(const CMatrix& h_eff, const CMatrix& g, const Constellation& c,
                      double noise_var, const NoiseQuadrature& q);

/// Low-level evaluator over caller-supplied symbols and noise. All quantities
/// are in nats.
struct MiTerms {
  bool mmse = false;
  bool gradient = false;
};

struct MiEvaluation {
  double nats = 0.0;
  RVector per_sample;  // MI estimate from each noise sample (weights applied outside)
  CMatrix mmse;        // raw estimate, N x N, when requested
  CMatrix grad_t;      // dI/dT^*, d x N, when requested
  std::uint64_t additions = 0;
};

/// `symbols` is N x K with K = M^N (all product vectors), `noise.z` is d x L.
MiEvaluation evaluate_mi(const CMatrix& t, const CMatrix& symbols, double noise_var,
                         const NoiseSamples& noise, MiTerms terms = {});

/// Quadrature standard error (nats) of a weighted per-sample estimate.
double standard_error(const RVector& per_sample, const NoiseSamples& noise);

/// Nearest matrix (Frobenius) to the Hermitian part of `e` with eigenvalues in [0, 1].
CMatrix clip_to_unit_interval(const CMatrix& e);

}  // namespace pggsvd
