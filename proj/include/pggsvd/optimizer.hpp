#pragma once

#include <vector>

#include "pggsvd/constellation.hpp"
#include "pggsvd/mi.hpp"
#include "pggsvd/precoders.hpp"
#include "pggsvd/secrecy.hpp"

namespace pggsvd {

/// Starting point of the alternating ascent.
///  - Uniform: equal power on every position Bob can see, DFT rotations.
///  - Gsvd: the GSVD baseline allocation with identity rotations.
///  - HighSnr: high_snr_construction (needs the one-Bob-only-per-group pairing).
///  - Best: whichever of the feasible candidates scores highest.
enum class Initialization { Uniform, Gsvd, HighSnr, Best };

struct OptimOptions {
  int max_iters = 100;
  double epsilon = 1e-4;       // stop once an iteration gains no more than this (bits)
  double initial_step = 1.0;   // first trial step, relative to P / active positions and |V| = 1
  double backtrack = 0.5;
  int max_halvings = 20;
  NoiseQuadrature quadrature;
  Initialization init = Initialization::Uniform;

  void validate() const;
};

struct OptimResult {
  PgGsvdPrecoder precoder;
  std::vector<double> trace;  // objective (bits, clamped at 0) after init and after each iteration
  int iterations = 0;
  SecrecyEstimate estimate;
  Initialization chosen_init = Initialization::Uniform;
};

/// Alternating projected ascent on the powers and retracted ascent on the
/// rotations of every group, with backtracking on the common-random-number
/// objective. Only strictly improving steps are accepted.
OptimResult optimize_pg_gsvd(const WiretapModel& model, const Constellation& c,
                             double total_power, PairingStrategy strategy,
                             const OptimOptions& opts);

/// Same iteration from a caller-supplied starting precoder.
OptimResult optimize_pg_gsvd(const WiretapModel& model, const Constellation& c,
                             double total_power, const PgGsvdPrecoder& start,
                             const OptimOptions& opts);

/// Convenience: decomposes the channel first.
OptimResult optimize_pg_gsvd(const WiretapChannel& channel, const Constellation& c,
                             double total_power, int ns, PairingStrategy strategy,
                             const OptimOptions& opts, double tol = 0.0);

/// Uniform-power / DFT starting point for a given pairing.
PgGsvdPrecoder uniform_start(const WiretapModel& model, const std::vector<int>& perm,
                             double total_power);

const char* to_string(Initialization init);

}  // namespace pggsvd
