#include "pggsvd/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace pggsvd {

namespace {

double to_bits(double nats) { return nats / std::numbers::ln2; }

std::size_t checked_enumeration(const Constellation& c, int n) {
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    count *= static_cast<std::size_t>(c.order);
    if (count > kExactEnumerationLimit) {
      throw EnumerationOverflow("exact secrecy rate needs " + std::to_string(c.order) + "^" +
                                std::to_string(n) + " symbol vectors (limit 2^20); use the "
                                "grouped evaluator instead");
    }
  }
  return count;
}

}  // namespace

SecrecyEstimate secrecy_rate_exact(const CMatrix& g, const WiretapChannel& channel,
                                   const Constellation& c, const NoiseQuadrature& q) {
  channel.validate();
  if (g.rows() != channel.nt()) {
    throw std::invalid_argument("precoder has " + std::to_string(g.rows()) +
                                " rows, channel has N_t = " + std::to_string(channel.nt()));
  }
  checked_enumeration(c, static_cast<int>(g.cols()));
  const CMatrix symbols = product_points(c, static_cast<int>(g.cols()));

  const NoiseSamples nb = draw_noise(q, channel.nr());
  const NoiseSamples ne = draw_noise(q, channel.ne());
  const MiEvaluation bob = evaluate_mi(channel.h_bob * g, symbols, channel.noise_bob, nb);
  const MiEvaluation eve = evaluate_mi(channel.h_eve * g, symbols, channel.noise_eve, ne);

  SecrecyEstimate out;
  out.bob_bits = to_bits(bob.nats);
  out.eve_bits = to_bits(eve.nats);
  out.raw_bits = out.bob_bits - out.eve_bits;
  out.bits = std::max(0.0, out.raw_bits);
  if (nb.monte_carlo) {
    out.std_error = to_bits(standard_error(bob.per_sample - eve.per_sample, nb));
  }
  return out;
}

GroupedEvaluator::GroupedEvaluator(const WiretapModel& model, const Constellation& c,
                                   const NoiseQuadrature& q)
    : model_(model), constellation_(c), quadrature_(q) {
  q.validate();
  checked_enumeration(c, model.ns);
  symbols_ = product_points(c, model.ns);
  const WiretapChannel& ch = model.channel;
  bob_.noise_var = ch.noise_bob;
  bob_.gain = &model.gains.bob;
  bob_.row = &model.gains.bob_row;
  eve_.noise_var = ch.noise_eve;
  eve_.gain = &model.gains.eve;
  eve_.row = &model.gains.eve_row;
  if (q.kind == QuadratureKind::MonteCarlo) {
    // Same batches as secrecy_rate_exact, expressed in the GSVD receive frames.
    NoiseSamples nb = draw_noise(q, ch.nr());
    NoiseSamples ne = draw_noise(q, ch.ne());
    nb.z = model.decomposition.u_bob.adjoint() * nb.z;
    ne.z = model.decomposition.u_eve.adjoint() * ne.z;
    bob_.rotated = std::move(nb);
    eve_.rotated = std::move(ne);
  }
}

std::uint64_t GroupedEvaluator::additions_per_group() const {
  const auto k = static_cast<std::uint64_t>(symbols_.cols());
  return k * k;
}

GroupedEvaluator::SideTerms GroupedEvaluator::side_terms(const Side& side,
                                                         const PgGsvdPrecoder& pre,
                                                         int group) const {
  SideTerms out;
  std::vector<int> rows;
  for (int i = 0; i < pre.ns; ++i) {
    const int pos = pre.position(group, i);
    const double amp = (*side.gain)(pos) * std::sqrt(std::max(0.0, pre.powers[group](i)));
    if (amp > 0.0) {
      out.slots.push_back(i);
      rows.push_back((*side.row)[pos]);
    }
  }
  const int d = static_cast<int>(out.slots.size());
  out.t.resize(d, pre.ns);
  for (int a = 0; a < d; ++a) {
    const int i = out.slots[a];
    const int pos = pre.position(group, i);
    const double amp = (*side.gain)(pos) * std::sqrt(pre.powers[group](i));
    out.t.row(a) = amp * pre.rotations[group].row(i);
  }
  if (d > 0) {
    out.noise = quadrature_.kind == QuadratureKind::MonteCarlo ? select_rows(side.rotated, rows)
                                                               : draw_noise(quadrature_, d);
  }
  return out;
}

GroupedEvaluator::Result GroupedEvaluator::evaluate(const PgGsvdPrecoder& pre, bool check) const {
  if (pre.size() != model_.padded_size() || pre.ns != model_.ns) {
    throw std::invalid_argument("grouped precoder does not match the model layout");
  }
  if (check) pre.validate();
  const int groups = pre.groups();
  Result out;
  out.bob_bits = RVector::Zero(groups);
  out.eve_bits = RVector::Zero(groups);
  const bool mc = quadrature_.kind == QuadratureKind::MonteCarlo;
  RVector per_sample;
  if (mc) per_sample = RVector::Zero(quadrature_.samples);

  for (int s = 0; s < groups; ++s) {
    for (int side = 0; side < 2; ++side) {
      const Side& sd = side == 0 ? bob_ : eve_;
      const SideTerms st = side_terms(sd, pre, s);
      if (st.slots.empty()) continue;
      const MiEvaluation ev = evaluate_mi(st.t, symbols_, sd.noise_var, st.noise);
      const double sign = side == 0 ? 1.0 : -1.0;
      (side == 0 ? out.bob_bits : out.eve_bits)(s) = to_bits(ev.nats);
      if (mc) per_sample += sign * ev.per_sample;
    }
  }
  SecrecyEstimate& t = out.total;
  t.bob_bits = out.bob_bits.sum();
  t.eve_bits = out.eve_bits.sum();
  t.raw_bits = t.bob_bits - t.eve_bits;
  t.bits = std::max(0.0, t.raw_bits);
  if (mc) {
    NoiseSamples ref;
    ref.monte_carlo = true;
    ref.weights = RVector::Constant(quadrature_.samples, 1.0 / quadrature_.samples);
    t.std_error = to_bits(standard_error(per_sample, ref));
  }
  return out;
}

GroupedEvaluator::GroupGradient GroupedEvaluator::gradient(const PgGsvdPrecoder& pre,
                                                           int group) const {
  const int ns = pre.ns;
  GroupGradient out;
  out.power = RVector::Zero(ns);
  out.rotation = CMatrix::Zero(ns, ns);
  const CMatrix& v = pre.rotations[group];

  for (int side = 0; side < 2; ++side) {
    const Side& sd = side == 0 ? bob_ : eve_;
    const double sign = side == 0 ? 1.0 : -1.0;
    const SideTerms st = side_terms(sd, pre, group);
    CMatrix e = CMatrix::Identity(ns, ns);
    CMatrix grad_g = CMatrix::Zero(ns, ns);  // dI/dG^* with G = P^{1/2} V
    if (!st.slots.empty()) {
      const MiEvaluation ev = evaluate_mi(st.t, symbols_, sd.noise_var, st.noise,
                                          {.mmse = true, .gradient = true});
      if (!ev.grad_t.allFinite() || !ev.mmse.allFinite()) {
        throw std::runtime_error("non-finite gradient in group " + std::to_string(group));
      }
      e = clip_to_unit_interval(ev.mmse);
      for (std::size_t a = 0; a < st.slots.size(); ++a) {
        const int i = st.slots[a];
        grad_g.row(i) = (*sd.gain)(pre.position(group, i)) * ev.grad_t.row(a);
      }
    }
    const CMatrix vev = v * e * v.adjoint();
    for (int i = 0; i < ns; ++i) {
      const double gain = (*sd.gain)(pre.position(group, i));
      if (gain <= 0.0) continue;
      const double p = std::max(0.0, pre.powers[group](i));
      const double lambda = std::sqrt(p);
      double dp;
      if (lambda > 0.0) {
        dp = (grad_g.row(i).conjugate().cwiseProduct(v.row(i))).sum().real() / lambda;
        out.rotation.row(i) += sign * lambda * grad_g.row(i) / std::numbers::ln2;
      } else {
        dp = gain * gain * vev(i, i).real() / sd.noise_var;
      }
      out.power(i) += sign * dp / std::numbers::ln2;
    }
  }
  if (!out.power.allFinite() || !out.rotation.allFinite()) {
    throw std::runtime_error("non-finite gradient in group " + std::to_string(group));
  }
  return out;
}

SecrecyEstimate secrecy_rate_grouped(const PgGsvdPrecoder& pre, const WiretapModel& model,
                                     const Constellation& c, const NoiseQuadrature& q) {
  return GroupedEvaluator(model, c, q).evaluate(pre).total;
}

double gsvd_high_snr_bound(const WiretapChannel& channel, const Constellation& c, double tol) {
  channel.validate();
  const int n1 = numerical_rank(channel.h_bob, resolve_rank_tolerance(channel, tol));
  return n1 * c.log2_order();
}

Theorem2Check theorem2_condition(const WiretapChannel& channel, int ns, double tol) {
  if (ns < 1) throw std::invalid_argument("group size must be at least 1");
  channel.validate();
  const double t = resolve_rank_tolerance(channel, tol);
  const GsvdDecomposition d = gsvd(channel, tol);
  Theorem2Check out;
  out.k = d.k;
  out.n2 = numerical_rank(channel.h_eve, t);
  out.r = d.r;
  if (out.r != out.k - out.n2) {
    throw std::logic_error("GSVD Bob-only dimension " + std::to_string(out.r) +
                           " disagrees with k - rank(H_ea) = " +
                           std::to_string(out.k - out.n2));
  }
  out.holds = static_cast<long long>(out.k - out.n2) * ns >= channel.nt();
  return out;
}

std::string AdditionCount::text() const {
  if (exact) return std::to_string(*exact);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2Le", value);
  return buf;
}

namespace {

AdditionCount count_of(std::uint64_t factor, int base, int exponent) {
  AdditionCount out;
  out.value = static_cast<long double>(factor) * std::pow(static_cast<long double>(base), exponent);
  std::uint64_t acc = factor;
  bool fits = true;
  for (int i = 0; i < exponent && fits; ++i) {
    fits = !__builtin_mul_overflow(acc, static_cast<std::uint64_t>(base), &acc);
  }
  if (fits) out.exact = acc;
  return out;
}

}  // namespace

ComplexityReport addition_counts(int nt, int ns, int groups, int order) {
  if (nt < 1 || ns < 1 || groups < 1 || order < 2) {
    throw std::invalid_argument("addition_counts: N_t, Ns, S must be positive and M >= 2");
  }
  if (static_cast<long long>(groups) * ns != nt) {
    throw std::invalid_argument("addition_counts: S * Ns must equal N_t");
  }
  ComplexityReport r;
  r.gsvd = count_of(static_cast<std::uint64_t>(nt) * static_cast<std::uint64_t>(order), order, 0);
  r.alg1 = count_of(static_cast<std::uint64_t>(groups), order, 2 * ns);
  r.full = count_of(1, order, 2 * nt);
  return r;
}

}  // namespace pggsvd
