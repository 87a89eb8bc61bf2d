#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pggsvd/constellation.hpp"
#include "pggsvd/gsvd.hpp"
#include "pggsvd/mi.hpp"
#include "pggsvd/precoders.hpp"

namespace pggsvd {

struct SecrecyEstimate {
  double bits = 0.0;      // max(0, raw_bits)
  double raw_bits = 0.0;  // I_b - I_e before clamping
  double std_error = 0.0;
  double bob_bits = 0.0;
  double eve_bits = 0.0;
};

/// Exact full-matrix products are limited to M^N_t <= 2^20 symbol vectors.
inline constexpr std::size_t kExactEnumerationLimit = std::size_t{1} << 20;

/// I(y_b; x) - I(y_e; x) for y = H G x + n, enumerating all M^{N} inputs.
/// Bob and Eve draw their noise from the same seed.
SecrecyEstimate secrecy_rate_exact(const CMatrix& g, const WiretapChannel& channel,
                                   const Constellation& c, const NoiseQuadrature& q);

/// Secrecy rate of a grouped precoder evaluated group by group. With Monte
/// Carlo noise the draws are the full receiver batches of secrecy_rate_exact
/// rotated into the GSVD frame, so both evaluators see identical noise.
class GroupedEvaluator {
 public:
  GroupedEvaluator(const WiretapModel& model, const Constellation& c, const NoiseQuadrature& q);

  struct Result {
    SecrecyEstimate total;
    RVector bob_bits;  // per group
    RVector eve_bits;  // per group
  };

  Result evaluate(const PgGsvdPrecoder& pre) const { return evaluate(pre, true); }
  double objective(const PgGsvdPrecoder& pre) const { return evaluate(pre).total.raw_bits; }

  /// Objective without the precoder validity check (rotations need not be
  /// unitary); for derivative checks.
  double objective_unchecked(const PgGsvdPrecoder& pre) const {
    return evaluate(pre, false).total.raw_bits;
  }

  /// Gradient of the group objective I_b,s - I_e,s (bits). `power` holds
  /// d/dP_s,ii and `rotation` holds d/dV_s^* (Wirtinger). Power derivatives
  /// are exact derivatives of the estimate where the power is positive and
  /// the MMSE form (gain^2 / noise) (V E V^H)_ii where it is zero.
  struct GroupGradient {
    RVector power;
    CMatrix rotation;
  };
  GroupGradient gradient(const PgGsvdPrecoder& pre, int group) const;

  const WiretapModel& model() const { return model_; }
  std::uint64_t additions_per_group() const;

 private:
  struct Side {
    double noise_var = 1.0;
    const RVector* gain = nullptr;
    const std::vector<int>* row = nullptr;
    NoiseSamples rotated;  // Monte Carlo only
  };

  struct SideTerms {
    std::vector<int> slots;
    CMatrix t;
    NoiseSamples noise;
  };

  Result evaluate(const PgGsvdPrecoder& pre, bool check) const;
  SideTerms side_terms(const Side& side, const PgGsvdPrecoder& pre, int group) const;

  const WiretapModel& model_;
  Constellation constellation_;
  NoiseQuadrature quadrature_;
  CMatrix symbols_;
  Side bob_;
  Side eve_;
};

SecrecyEstimate secrecy_rate_grouped(const PgGsvdPrecoder& pre, const WiretapModel& model,
                                     const Constellation& c, const NoiseQuadrature& q);

/// rank(H_ba) log2 M: the high-SNR ceiling of the GSVD design.
double gsvd_high_snr_bound(const WiretapChannel& channel, const Constellation& c,
                           double tol = 0.0);

struct Theorem2Check {
  bool holds = false;
  int k = 0;
  int n2 = 0;  // rank(H_ea)
  int r = 0;
};

/// Evaluates (k - N_2) Ns >= N_t and cross-checks r = k - N_2 against the GSVD.
Theorem2Check theorem2_condition(const WiretapChannel& channel, int ns, double tol = 0.0);

/// Count that may exceed 64 bits; `exact` is set whenever it fits.
struct AdditionCount {
  std::optional<std::uint64_t> exact;
  long double value = 0.0L;

  /// Integer text when exact, otherwise 3-significant-figure scientific.
  std::string text() const;
};

struct ComplexityReport {
  AdditionCount gsvd;   // N_t M
  AdditionCount alg1;   // S M^{2 Ns}
  AdditionCount full;   // M^{2 N_t}
};

ComplexityReport addition_counts(int nt, int ns, int groups, int order);

}  // namespace pggsvd
