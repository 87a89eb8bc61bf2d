#include "pggsvd/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pggsvd {

void OptimOptions::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be finite and nonnegative");
  }
  if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
    throw std::invalid_argument("initial_step must be positive");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw std::invalid_argument("backtrack factor must lie in (0, 1)");
  }
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be nonnegative");
  quadrature.validate();
}

const char* to_string(Initialization init) {
  switch (init) {
    case Initialization::Uniform: return "uniform";
    case Initialization::Gsvd: return "gsvd";
    case Initialization::HighSnr: return "high_snr";
    case Initialization::Best: return "best";
  }
  return "?";
}

PgGsvdPrecoder uniform_start(const WiretapModel& model, const std::vector<int>& perm,
                             double total_power) {
  PgGsvdPrecoder pre = empty_precoder(perm, model.ns);
  int active = 0;
  for (int j : perm) active += model.gains.usable(j) && model.gains.bob(j) > 0.0;
  const CMatrix f = dft_matrix(model.ns);
  for (int s = 0; s < pre.groups(); ++s) {
    pre.rotations[s] = f;
    for (int i = 0; i < model.ns; ++i) {
      const int pos = pre.position(s, i);
      if (active > 0 && model.gains.usable(pos) && model.gains.bob(pos) > 0.0) {
        pre.powers[s](i) = total_power / active;
      }
    }
  }
  return pre;
}

namespace {

void check_power(double total_power) {
  if (!(total_power >= 0.0) || !std::isfinite(total_power)) {
    throw std::invalid_argument("total power must be finite and nonnegative");
  }
}

double clamp0(double v) { return std::max(0.0, v); }

}  // namespace

OptimResult optimize_pg_gsvd(const WiretapModel& model, const Constellation& c,
                             double total_power, const PgGsvdPrecoder& start,
                             const OptimOptions& opts) {
  opts.validate();
  check_power(total_power);
  if (!std::isfinite(model.channel.noise_bob) || !std::isfinite(model.channel.noise_eve) ||
      model.channel.noise_bob <= 0.0 || model.channel.noise_eve <= 0.0) {
    throw std::invalid_argument("noise variances must be positive and finite");
  }
  const GroupedEvaluator eval(model, c, opts.quadrature);
  const HattedGains& h = model.gains;
  const int groups = start.groups();
  const int ns = start.ns;

  OptimResult out;
  out.precoder = start;
  out.chosen_init = opts.init;
  double f = eval.objective(out.precoder);
  out.trace.push_back(clamp0(f));
  if (total_power == 0.0) {
    out.estimate = eval.evaluate(out.precoder).total;
    return out;
  }

  // Positions that can carry power.
  std::vector<RVector> mask(groups, RVector::Zero(ns));
  int active = 0;
  for (int s = 0; s < groups; ++s) {
    for (int i = 0; i < ns; ++i) {
      const int pos = out.precoder.position(s, i);
      if (h.usable(pos) && (h.bob(pos) > 0.0 || h.eve(pos) > 0.0)) {
        mask[s](i) = 1.0;
        ++active;
      }
    }
  }
  if (active == 0) {
    out.estimate = eval.evaluate(out.precoder).total;
    return out;
  }
  const double base = total_power / active;

  for (int n = 1; n <= opts.max_iters; ++n) {
    const double f_prev = f;

    // Power step: projected ascent, then renormalize to the budget.
    {
      std::vector<RVector> dir(groups);
      double scale = 0.0;
      for (int s = 0; s < groups; ++s) {
        dir[s] = eval.gradient(out.precoder, s).power.cwiseProduct(mask[s]);
        scale = std::max(scale, dir[s].cwiseAbs().maxCoeff());
      }
      if (scale > 0.0) {
        double t = opts.initial_step * base / scale;
        for (int hv = 0; hv <= opts.max_halvings; ++hv, t *= opts.backtrack) {
          PgGsvdPrecoder cand = out.precoder;
          double sum = 0.0;
          for (int s = 0; s < groups; ++s) {
            cand.powers[s] = (cand.powers[s] + t * dir[s]).cwiseMax(0.0).cwiseProduct(mask[s]);
            sum += cand.powers[s].sum();
          }
          if (!(sum > 0.0)) continue;
          for (int s = 0; s < groups; ++s) cand.powers[s] *= total_power / sum;
          const double fc = eval.objective(cand);
          if (fc > f) {
            out.precoder = std::move(cand);
            f = fc;
            break;
          }
        }
      }
    }

    // Rotation step: Euclidean ascent followed by the polar retraction.
    if (ns > 1) {
      std::vector<CMatrix> dir(groups);
      double norm2 = 0.0;
      for (int s = 0; s < groups; ++s) {
        dir[s] = eval.gradient(out.precoder, s).rotation;
        norm2 += dir[s].squaredNorm();
      }
      if (norm2 > 0.0) {
        const double norm = std::sqrt(norm2);
        double t = opts.initial_step;
        for (int hv = 0; hv <= opts.max_halvings; ++hv, t *= opts.backtrack) {
          PgGsvdPrecoder cand = out.precoder;
          for (int s = 0; s < groups; ++s) {
            cand.rotations[s] = polar_unitary(cand.rotations[s] + (t / norm) * dir[s]);
          }
          const double fc = eval.objective(cand);
          if (fc > f) {
            out.precoder = std::move(cand);
            f = fc;
            break;
          }
        }
      }
    }

    out.trace.push_back(clamp0(f));
    out.iterations = n;
    if (f - f_prev <= opts.epsilon) break;
  }
  out.estimate = eval.evaluate(out.precoder).total;
  return out;
}

OptimResult optimize_pg_gsvd(const WiretapModel& model, const Constellation& c,
                             double total_power, PairingStrategy strategy,
                             const OptimOptions& opts) {
  opts.validate();
  check_power(total_power);
  const std::vector<int> perm = pair_subchannels(model.gains, model.ns, strategy);

  std::vector<std::pair<Initialization, PgGsvdPrecoder>> candidates;
  const Initialization init = opts.init;
  const bool best = init == Initialization::Best;
  if (best || init == Initialization::Uniform) {
    candidates.emplace_back(Initialization::Uniform, uniform_start(model, perm, total_power));
  }
  if (best || init == Initialization::Gsvd) {
    const GsvdPrecoder g = gsvd_precoder(model, c, total_power, opts.quadrature);
    candidates.emplace_back(Initialization::Gsvd, as_grouped(g, perm, model.ns));
  }
  if (init == Initialization::HighSnr ||
      (best && theorem2_feasible(model.gains, model.ns))) {
    candidates.emplace_back(Initialization::HighSnr,
                            high_snr_construction(model, c, total_power));
  }

  std::size_t pick = 0;
  if (candidates.size() > 1) {
    const GroupedEvaluator eval(model, c, opts.quadrature);
    double top = eval.objective(candidates[0].second);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      const double v = eval.objective(candidates[i].second);
      if (v > top) {
        top = v;
        pick = i;
      }
    }
  }
  OptimResult r = optimize_pg_gsvd(model, c, total_power, candidates[pick].second, opts);
  r.chosen_init = candidates[pick].first;
  return r;
}

OptimResult optimize_pg_gsvd(const WiretapChannel& channel, const Constellation& c,
                             double total_power, int ns, PairingStrategy strategy,
                             const OptimOptions& opts, double tol) {
  const WiretapModel model = make_model(channel, ns, tol);
  return optimize_pg_gsvd(model, c, total_power, strategy, opts);
}

}  // namespace pggsvd
