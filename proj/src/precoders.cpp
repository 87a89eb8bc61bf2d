#include "pggsvd/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace pggsvd {

Block HattedGains::block(int pos) const {
  const bool b = bob(pos) > 0.0;
  const bool e = eve(pos) > 0.0;
  if (b && e) return Block::Shared;
  if (b) return Block::BobOnly;
  if (e) return Block::EveOnly;
  return Block::Dead;
}

HattedGains hatted_gains(const GsvdDecomposition& d, int padded_size) {
  if (padded_size < d.nt) throw std::invalid_argument("hatted_gains: padded size below N_t");
  HattedGains h;
  h.bob = RVector::Zero(padded_size);
  h.eve = RVector::Zero(padded_size);
  h.weight = RVector::Zero(padded_size);
  h.bob_row.assign(padded_size, -1);
  h.eve_row.assign(padded_size, -1);
  h.eve_only = d.eve_only();
  h.shared = d.s;
  h.bob_only = d.r;
  h.dead = padded_size - d.k;

  const int visible_bob = d.r + d.s;
  for (int j = 0; j < d.k; ++j) {
    // Column j of A = [Omega 0; 0 0] sets the transmit power per unit p_j.
    h.weight(j) = d.omega.col(j).squaredNorm();
    const double root = std::sqrt(h.weight(j));
    double sb = 0.0;
    double se = 0.0;
    if (j < h.eve_only) {
      se = 1.0;
    } else if (j < h.eve_only + d.s) {
      sb = d.b(j - h.eve_only);
      se = d.e(j - h.eve_only);
    } else {
      sb = 1.0;
    }
    if (sb > 0.0) {
      h.bob(j) = sb / root;
      h.bob_row[j] = d.nr - visible_bob + (j - h.eve_only);
    }
    if (se > 0.0) {
      h.eve(j) = se / root;
      h.eve_row[j] = j;
    }
  }
  return h;
}

WiretapModel make_model(const WiretapChannel& channel, int ns, double tol) {
  if (ns < 1) throw std::invalid_argument("group size must be at least 1");
  WiretapModel m;
  m.channel = channel;
  m.decomposition = gsvd(channel, tol);
  m.ns = ns;
  const int nt = channel.nt();
  const int padded = ((nt + ns - 1) / ns) * ns;
  m.gains = hatted_gains(m.decomposition, std::max(padded, ns));
  return m;
}

bool theorem2_feasible(const HattedGains& h, int ns) {
  const int groups = (h.size() + ns - 1) / ns;
  return h.bob_only >= groups;
}

std::vector<int> pair_subchannels(const HattedGains& h, int ns, PairingStrategy strategy) {
  const int n = h.size();
  if (ns < 1 || n % ns != 0) {
    throw std::invalid_argument("pairing needs the (padded) position count to be a multiple of Ns");
  }
  const int groups = n / ns;
  if (strategy == PairingStrategy::Auto) {
    strategy = theorem2_feasible(h, ns) ? PairingStrategy::Theorem2
                                        : PairingStrategy::BobAdvantageInterleave;
  }

  auto by_advantage = [&](std::vector<int> idx) {
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return h.bob(a) - h.eve(a) > h.bob(b) - h.eve(b);
    });
    return idx;
  };

  std::vector<int> perm(n);
  if (strategy == PairingStrategy::BobAdvantageInterleave) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto sorted = by_advantage(all);
    for (int s = 0; s < groups; ++s) {
      for (int i = 0; i < ns; ++i) perm[s * ns + i] = sorted[i * groups + s];
    }
    return perm;
  }

  if (!theorem2_feasible(h, ns)) {
    std::ostringstream os;
    os << "pairing with a Bob-only position per group infeasible: (k - N2) * Ns = "
       << h.bob_only << " * " << ns << " = " << h.bob_only * ns << " < N_t = " << n;
    throw InfeasibleError(os.str());
  }
  std::vector<int> bob_only;
  std::vector<int> rest;
  for (int j = 0; j < n; ++j) {
    (h.block(j) == Block::BobOnly ? bob_only : rest).push_back(j);
  }
  std::stable_sort(bob_only.begin(), bob_only.end(),
                   [&](int a, int b) { return h.bob(a) > h.bob(b); });
  for (int s = 0; s < groups; ++s) perm[s * ns + ns - 1] = bob_only[s];
  rest.insert(rest.end(), bob_only.begin() + groups, bob_only.end());
  rest = by_advantage(rest);
  std::size_t next = 0;
  for (int i = 0; i + 1 < ns; ++i) {
    for (int s = 0; s < groups; ++s) perm[s * ns + i] = rest[next++];
  }
  return perm;
}

double PgGsvdPrecoder::total_power() const {
  double total = 0.0;
  for (const auto& p : powers) total += p.sum();
  return total;
}

void PgGsvdPrecoder::validate(double tol) const {
  if (ns < 1 || perm.size() % ns != 0) throw std::invalid_argument("precoder: bad group size");
  const int n = size();
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw std::invalid_argument("precoder: perm is not a bijection");
    seen[p] = 1;
  }
  const auto groups_expected = static_cast<std::size_t>(n / ns);
  if (powers.size() != groups_expected || rotations.size() != groups_expected) {
    throw std::invalid_argument("precoder: group count mismatch");
  }
  for (std::size_t s = 0; s < groups_expected; ++s) {
    if (powers[s].size() != ns || rotations[s].rows() != ns || rotations[s].cols() != ns) {
      throw std::invalid_argument("precoder: group shape mismatch");
    }
    if (!powers[s].allFinite() || (powers[s].array() < 0.0).any()) {
      throw std::invalid_argument("precoder: powers must be finite and nonnegative");
    }
    const double dev =
        (rotations[s].adjoint() * rotations[s] - CMatrix::Identity(ns, ns)).norm();
    if (!(dev <= tol)) {
      std::ostringstream os;
      os << "precoder: V_" << s << " is not unitary (deviation " << dev << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

PgGsvdPrecoder empty_precoder(const std::vector<int>& perm, int ns) {
  PgGsvdPrecoder pre;
  pre.perm = perm;
  pre.ns = ns;
  const int groups = static_cast<int>(perm.size()) / ns;
  pre.powers.assign(groups, RVector::Zero(ns));
  pre.rotations.assign(groups, CMatrix::Identity(ns, ns));
  return pre;
}

namespace {

// U_a [Omega 0; 0 0] diag(sqrt(P_j / w_j)) for the padded position set.
CMatrix scaled_basis(const WiretapModel& model, const RVector& position_power) {
  const auto& d = model.decomposition;
  const auto& h = model.gains;
  const int n = h.size();
  CMatrix a = CMatrix::Zero(d.nt, n);
  a.topLeftCorner(d.k, d.k) = d.omega;
  RVector amp = RVector::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (position_power(j) == 0.0) continue;
    if (!h.usable(j)) {
      throw std::invalid_argument("power assigned to position " + std::to_string(j) +
                                  " which has no transmit direction");
    }
    amp(j) = std::sqrt(position_power(j) / h.weight(j));
  }
  return d.u_a * a * amp.cast<cplx>().asDiagonal();
}

}  // namespace

CMatrix assemble_G(const WiretapModel& model, const PgGsvdPrecoder& pre) {
  const int n = model.padded_size();
  if (pre.size() != n) {
    throw std::invalid_argument("assemble_G: precoder covers " + std::to_string(pre.size()) +
                                " positions, model has " + std::to_string(n));
  }
  pre.validate();
  RVector position_power = RVector::Zero(n);
  CMatrix v = CMatrix::Zero(n, n);
  for (int s = 0; s < pre.groups(); ++s) {
    for (int i = 0; i < pre.ns; ++i) {
      position_power(pre.position(s, i)) = pre.powers[s](i);
      for (int j = 0; j < pre.ns; ++j) {
        v(pre.position(s, i), pre.position(s, j)) = pre.rotations[s](i, j);
      }
    }
  }
  return scaled_basis(model, position_power) * v;
}

namespace {

// Secrecy contribution of one scalar position as a function of its power,
// tabulated with common noise draws.
class ScalarSecrecy {
 public:
  ScalarSecrecy(const Constellation& c, const NoiseQuadrature& q)
      : symbols_(product_points(c, 1)), noise_(draw_noise(q, 1)) {}

  double mi_bits(double snr) const {
    if (snr <= 0.0) return 0.0;
    CMatrix t(1, 1);
    t(0, 0) = std::sqrt(snr);
    return evaluate_mi(t, symbols_, 1.0, noise_).nats / std::numbers::ln2;
  }

  double value(double bob_snr_per_watt, double eve_snr_per_watt, double power) const {
    if (power <= 0.0) return 0.0;
    return mi_bits(bob_snr_per_watt * power) - mi_bits(eve_snr_per_watt * power);
  }

 private:
  CMatrix symbols_;
  NoiseSamples noise_;
};

}  // namespace

GsvdPrecoder gsvd_precoder(const WiretapModel& model, const Constellation& c, double total_power,
                           const NoiseQuadrature& q) {
  if (!(total_power >= 0.0)) throw std::invalid_argument("total power must be nonnegative");
  const auto& h = model.gains;
  const int n = h.size();
  GsvdPrecoder out;
  out.powers = RVector::Zero(n);

  std::vector<int> active;
  RVector alpha = RVector::Zero(n);
  RVector beta = RVector::Zero(n);
  for (int j = 0; j < n; ++j) {
    alpha(j) = h.bob(j) * h.bob(j) / model.channel.noise_bob;
    beta(j) = h.eve(j) * h.eve(j) / model.channel.noise_eve;
    if (h.usable(j) && alpha(j) > beta(j)) active.push_back(j);
  }
  if (active.empty() || total_power == 0.0) {
    out.g = scaled_basis(model, out.powers);
    return out;
  }

  const ScalarSecrecy f(c, q);
  constexpr int kGrid = 61;
  RVector levels(kGrid + 1);
  levels(0) = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    levels(g + 1) = total_power * std::pow(10.0, -6.0 + 6.0 * g / (kGrid - 1));
  }
  const auto na = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd table(na, kGrid + 1);
  for (Eigen::Index a = 0; a < na; ++a) {
    for (int g = 0; g <= kGrid; ++g) {
      table(a, g) = f.value(alpha(active[a]), beta(active[a]), levels(g));
    }
  }

  // Lagrangian relaxation: each position maximizes f_j(P) - lambda P on the
  // grid; lambda is bisected until the budget is met.
  auto choose = [&](double lambda, std::vector<int>& pick) {
    double used = 0.0;
    for (Eigen::Index a = 0; a < na; ++a) {
      int best = 0;
      double best_val = 0.0;
      for (int g = 1; g <= kGrid; ++g) {
        const double v = table(a, g) - lambda * levels(g);
        if (v > best_val) {
          best_val = v;
          best = g;
        }
      }
      pick[a] = best;
      used += levels(best);
    }
    return used;
  };
  std::vector<int> pick(na);
  double lo = 0.0;
  double hi = 0.0;
  for (Eigen::Index a = 0; a < na; ++a) {
    for (int g = 1; g <= kGrid; ++g) hi = std::max(hi, table(a, g) / levels(g));
  }
  hi = hi * 2.0 + 1e-300;
  if (choose(0.0, pick) > total_power) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (choose(mid, pick) > total_power) lo = mid; else hi = mid;
    }
    choose(hi, pick);
  }

  RVector power(na);
  for (Eigen::Index a = 0; a < na; ++a) power(a) = levels(pick[a]);

  // Give unspent budget to whichever position gains the most from it.
  const double leftover = total_power - power.sum();
  if (leftover > 1e-12 * total_power) {
    Eigen::Index best = -1;
    double best_gain = 0.0;
    for (Eigen::Index a = 0; a < na; ++a) {
      const int j = active[a];
      const double gain = f.value(alpha(j), beta(j), power(a) + leftover) -
                          f.value(alpha(j), beta(j), power(a));
      if (gain > best_gain) {
        best_gain = gain;
        best = a;
      }
    }
    if (best >= 0) power(best) += leftover;
  }

  double objective = 0.0;
  for (Eigen::Index a = 0; a < na; ++a) {
    const int j = active[a];
    out.powers(j) = power(a);
    objective += f.value(alpha(j), beta(j), power(a));
  }
  // Never exceed the budget through rounding.
  const double spent = out.powers.sum();
  if (spent > total_power) out.powers *= total_power / spent;
  out.objective_bits = objective;
  out.g = scaled_basis(model, out.powers);
  return out;
}

PgGsvdPrecoder as_grouped(const GsvdPrecoder& g, const std::vector<int>& perm, int ns) {
  PgGsvdPrecoder pre = empty_precoder(perm, ns);
  for (int s = 0; s < pre.groups(); ++s) {
    for (int i = 0; i < ns; ++i) pre.powers[s](i) = g.powers(pre.position(s, i));
  }
  return pre;
}

CMatrix dft_matrix(int ns) {
  CMatrix f(ns, ns);
  for (int a = 0; a < ns; ++a) {
    for (int b = 0; b < ns; ++b) {
      f(a, b) = std::polar(1.0 / std::sqrt(ns), -2.0 * std::numbers::pi * a * b / ns);
    }
  }
  return f;
}

CMatrix polar_unitary(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CVector superposition_weights(const Constellation& c, int ns) {
  CVector v(ns);
  if (c.scheme == Scheme::BPSK) {
    // Alternate real and imaginary axes, doubling the weight every two symbols.
    for (int i = 0; i < ns; ++i) {
      const double level = std::ldexp(1.0, (ns - 1 - i) / 2);
      v(i) = (ns - 1 - i) % 2 == 0 ? cplx(level, 0.0) : cplx(0.0, level);
    }
  } else {
    // Square QAM with side L: weights L^(ns-1-i) nest the grids into one
    // L^ns-ary square grid.
    const double side = std::sqrt(static_cast<double>(c.order));
    for (int i = 0; i < ns; ++i) v(i) = std::pow(side, ns - 1 - i);
  }
  return v / v.norm();
}

PgGsvdPrecoder high_snr_construction(const WiretapModel& model, const Constellation& c,
                                     double total_power) {
  if (!(total_power >= 0.0)) throw std::invalid_argument("total power must be nonnegative");
  const int ns = model.ns;
  const auto perm = pair_subchannels(model.gains, ns, PairingStrategy::Theorem2);
  PgGsvdPrecoder pre = empty_precoder(perm, ns);

  const CVector v = superposition_weights(c, ns);
  CMatrix rot = CMatrix::Identity(ns, ns);
  if (ns > 1) {
    // Unitary whose last row is v^T: complete conj(v) to a basis, take the
    // adjoint, fix the phase, and move that row last.
    Eigen::HouseholderQR<CMatrix> qr(CMatrix(v.conjugate()));
    const CMatrix basis = CMatrix(qr.householderQ()).adjoint();
    Eigen::Index ref = 0;
    v.cwiseAbs().maxCoeff(&ref);
    const cplx phase = basis(0, ref) / v(ref);
    for (int i = 0; i < ns; ++i) {
      rot.row(i) = basis.row((i + 1) % ns);
    }
    rot.row(ns - 1) /= phase;
  }
  const double per_group = total_power / pre.groups();
  for (int s = 0; s < pre.groups(); ++s) {
    pre.powers[s](ns - 1) = per_group;
    pre.rotations[s] = rot;
  }
  return pre;
}

}  // namespace pggsvd
