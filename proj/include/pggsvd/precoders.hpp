#pragma once

#include <vector>

#include "pggsvd/constellation.hpp"
#include "pggsvd/gsvd.hpp"
#include "pggsvd/mi.hpp"
#include "pggsvd/types.hpp"

namespace pggsvd {

/// Classification of a GSVD position: which receivers can see it.
enum class Block { EveOnly, Shared, BobOnly, Dead };

/// Per-position scalar gains of the decoupled channels. Position j carries
/// power P_j = weight[j] * p_j and reaches Bob with amplitude
/// bob[j] * sqrt(P_j) on row bob_row[j] of U_ba^H y_b (likewise for Eve).
/// Positions beyond N_t are padding with zero gains and zero weight.
struct HattedGains {
  RVector bob;
  RVector eve;
  RVector weight;
  std::vector<int> bob_row;  // -1 where Bob sees nothing
  std::vector<int> eve_row;  // -1 where Eve sees nothing
  int eve_only = 0;
  int shared = 0;
  int bob_only = 0;
  int dead = 0;

  int size() const { return static_cast<int>(bob.size()); }
  Block block(int pos) const;
  bool usable(int pos) const { return weight(pos) > 0.0; }
};

HattedGains hatted_gains(const GsvdDecomposition& d, int padded_size);
inline HattedGains hatted_gains(const GsvdDecomposition& d) { return hatted_gains(d, d.nt); }

/// Everything the grouped design needs about one channel realization.
struct WiretapModel {
  WiretapChannel channel;
  GsvdDecomposition decomposition;
  HattedGains gains;
  int ns = 1;

  int padded_size() const { return gains.size(); }
  int groups() const { return padded_size() / ns; }
};

/// Decomposes the channel and pads the position count up to a multiple of ns.
WiretapModel make_model(const WiretapChannel& channel, int ns, double tol = 0.0);

enum class PairingStrategy { Theorem2, BobAdvantageInterleave, Auto };

/// Number of groups S = ceil(N_t / ns) and whether Theorem2 pairing is
/// possible: (k - N_2) ns >= N_t, i.e. at least one Bob-only position per group.
bool theorem2_feasible(const HattedGains& h, int ns);

/// Permutation of positions; group s occupies slots [s ns, (s+1) ns).
/// Theorem2 puts a Bob-only position in the last slot of every group.
/// BobAdvantageInterleave deals positions sorted by descending bob - eve gain
/// round-robin across groups. Auto picks Theorem2 when feasible.
std::vector<int> pair_subchannels(const HattedGains& h, int ns, PairingStrategy strategy);

/// Per-group diagonal powers P_s and unitary rotations V_s under a pairing.
/// powers[s](i) is the power spent on the position perm[s ns + i].
struct PgGsvdPrecoder {
  std::vector<int> perm;
  int ns = 1;
  std::vector<RVector> powers;
  std::vector<CMatrix> rotations;

  int groups() const { return static_cast<int>(powers.size()); }
  int size() const { return static_cast<int>(perm.size()); }
  double total_power() const;
  int position(int group, int slot) const { return perm[group * ns + slot]; }

  /// Throws std::invalid_argument if the shapes disagree, perm is not a
  /// bijection, a power is negative, or a rotation is not unitary within tol.
  void validate(double tol = 1e-9) const;
};

/// Precoder with all powers zero and identity rotations.
PgGsvdPrecoder empty_precoder(const std::vector<int>& perm, int ns);

/// G = U_a A P^{1/2} V with P_jj = powers / weight and V scattered from the
/// V_s by the permutation. Shape N_t x padded size.
CMatrix assemble_G(const WiretapModel& model, const PgGsvdPrecoder& pre);

/// Baseline GSVD precoder: diagonal power per position.
struct GsvdPrecoder {
  RVector powers;  // P_j = weight_j p_j actually spent on each position
  CMatrix g;
  double objective_bits = 0.0;  // decoupled secrecy objective under the quadrature used
};

/// Maximizes sum_j [I(bob_j^2 P_j / s_b) - I(eve_j^2 P_j / s_e)] over
/// sum_j P_j <= P, P_j >= 0 with scalar mutual informations. Positions whose
/// Bob gain does not exceed Eve's never receive power.
GsvdPrecoder gsvd_precoder(const WiretapModel& model, const Constellation& c, double total_power,
                           const NoiseQuadrature& q);

/// The GSVD allocation as a grouped precoder (identity rotations).
PgGsvdPrecoder as_grouped(const GsvdPrecoder& g, const std::vector<int>& perm, int ns);

/// High-SNR construction: Theorem2 pairing, all power on the last slot of each
/// group (a Bob-only position), and V_s whose last row superposes the ns
/// symbols into one distinguishable point set.
PgGsvdPrecoder high_snr_construction(const WiretapModel& model, const Constellation& c,
                                     double total_power);

/// Unit vector v with sum_i v_i x_i injective over the product constellation.
CVector superposition_weights(const Constellation& c, int ns);

/// Unitary ns x ns DFT matrix.
CMatrix dft_matrix(int ns);

/// Nearest unitary matrix (polar factor).
CMatrix polar_unitary(const CMatrix& m);

}  // namespace pggsvd
