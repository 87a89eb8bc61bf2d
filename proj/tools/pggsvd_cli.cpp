#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pggsvd/constellation.hpp"
#include "pggsvd/gsvd.hpp"
#include "pggsvd/harness.hpp"
#include "pggsvd/optimizer.hpp"
#include "pggsvd/precoders.hpp"
#include "pggsvd/secrecy.hpp"

using namespace pggsvd;

namespace {

struct ChannelArgs {
  int nt = 4;
  int nr = 3;
  int ne = 2;
  std::uint64_t seed = 1;
  double tol = 0.0;
};

void add_channel_flags(CLI::App* cmd, ChannelArgs& a) {
  cmd->add_option("--nt", a.nt, "Transmit antennas")->check(CLI::PositiveNumber);
  cmd->add_option("--nr", a.nr, "Bob antennas")->check(CLI::PositiveNumber);
  cmd->add_option("--ne", a.ne, "Eve antennas")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", a.seed, "Channel seed");
  cmd->add_option("--tol", a.tol, "Relative rank tolerance (0 = automatic)");
}

std::string vec_text(const RVector& v) {
  std::string s = "[";
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", v(i));
    s += buf;
  }
  return s + "]";
}

int gsvd_info(const ChannelArgs& a) {
  const WiretapChannel ch = generate_channel(a.nt, a.nr, a.ne, a.seed);
  const GsvdDecomposition d = gsvd(ch, a.tol);
  const auto [hb, he] = reconstruct(d);
  const double err = std::max((hb - ch.h_bob).norm() / std::max(1.0, ch.h_bob.norm()),
                              (he - ch.h_eve).norm() / std::max(1.0, ch.h_eve.norm()));
  const HattedGains h = hatted_gains(d);
  std::printf("channel %dx%dx%d seed %llu\n", a.nt, a.nr, a.ne,
              static_cast<unsigned long long>(a.seed));
  std::printf("k=%d r=%d s=%d eve_only=%d\n", d.k, d.r, d.s, d.eve_only());
  std::printf("b=%s\ne=%s\n", vec_text(d.b).c_str(), vec_text(d.e).c_str());
  std::printf("gain_bob=%s\ngain_eve=%s\nweight=%s\n", vec_text(h.bob).c_str(),
              vec_text(h.eve).c_str(), vec_text(h.weight).c_str());
  std::printf("reconstruction_error=%.3e\n", err);
  return 0;
}

int counts(int nt, int ns, const std::string& mod) {
  if (nt % ns != 0) throw std::invalid_argument("--nt must be a multiple of --ns");
  const Constellation c = constellation_from_token(mod);
  const ComplexityReport r = addition_counts(nt, ns, nt / ns, c.order);
  std::printf("system N_t=%d Ns=%d S=%d %s (M=%d)\n", nt, ns, nt / ns, c.token().c_str(),
              c.order);
  std::printf("gsvd_additions=%s\nalg1_additions=%s\nfull_additions=%s\n",
              r.gsvd.text().c_str(), r.alg1.text().c_str(), r.full.text().c_str());
  return 0;
}

int bound(const ChannelArgs& a, const std::string& mod, int ns) {
  const WiretapChannel ch = generate_channel(a.nt, a.nr, a.ne, a.seed);
  const Constellation c = constellation_from_token(mod);
  const double b = gsvd_high_snr_bound(ch, c, a.tol);
  const Theorem2Check t = theorem2_condition(ch, ns, a.tol);
  std::printf("gsvd_high_snr_bound_bits=%.17g\n", b);
  std::printf("pg_gsvd_ceiling_bits=%.17g\n", a.nt * c.log2_order());
  std::printf("k=%d n2=%d r=%d\n", t.k, t.n2, t.r);
  std::printf("condition (k-n2)*ns=%d >= nt=%d: %s\n", (t.k - t.n2) * ns, a.nt,
              t.holds ? "true" : "false");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure linear precoding for MIMO wiretap channels with finite-alphabet inputs"};
  app.require_subcommand(1);

  ChannelArgs info_args;
  auto* info = app.add_subcommand("gsvd-info", "Decompose a seeded channel pair");
  add_channel_flags(info, info_args);

  ChannelArgs opt_args;
  double snr_db = 30.0;
  std::string mod = "qpsk";
  int ns = 2;
  std::string strategy = "auto";
  std::string init = "best";
  int max_iters = 100;
  double eps = 1e-4;
  int mc_samples = 500;
  std::uint64_t noise_seed = 1;
  auto* opt = app.add_subcommand("optimize", "Run the grouped precoder optimizer; prints iter,rate_bits");
  add_channel_flags(opt, opt_args);
  opt->add_option("--snr-db", snr_db, "SNR in dB (P = 10^(snr/10) N_r)");
  opt->add_option("--mod", mod, "bpsk, qpsk or qamN");
  opt->add_option("--ns", ns, "Group size")->check(CLI::PositiveNumber);
  opt->add_option("--strategy", strategy, "theorem2, interleave or auto");
  opt->add_option("--init", init, "uniform, gsvd, high_snr or best");
  opt->add_option("--max-iters", max_iters)->check(CLI::NonNegativeNumber);
  opt->add_option("--eps", eps)->check(CLI::NonNegativeNumber);
  opt->add_option("--mc-samples", mc_samples)->check(CLI::PositiveNumber);
  opt->add_option("--noise-seed", noise_seed);

  int c_nt = 0;
  int c_ns = 2;
  std::string c_mod;
  auto* cnt = app.add_subcommand("counts", "Addition counts per design");
  cnt->add_option("--nt", c_nt, "Transmit antennas (default: 4 and 64)");
  cnt->add_option("--ns", c_ns)->check(CLI::PositiveNumber);
  cnt->add_option("--mod", c_mod, "Constellation (default: bpsk and qpsk)");

  ChannelArgs b_args;
  std::string b_mod = "qpsk";
  int b_ns = 2;
  auto* bnd = app.add_subcommand("bound", "High-SNR diagnostics for a seeded channel");
  add_channel_flags(bnd, b_args);
  bnd->add_option("--mod", b_mod);
  bnd->add_option("--ns", b_ns)->check(CLI::PositiveNumber);

  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  auto* sweep = app.add_subcommand("sweep", "SNR sweep over designs; writes CSV and CSV.meta");
  sweep->add_option("--config", config_path, "key = value config file");
  sweep->add_option("--out", out_path, "Output CSV (stdout when omitted)");
  sweep->add_option("--set", overrides, "Override, key=value (repeatable)");
  std::string sw_seed, sw_noise, sw_mc;
  sweep->add_option("--seed", sw_seed, "Channel seed override");
  sweep->add_option("--noise-seed", sw_noise, "Noise seed override");
  sweep->add_option("--mc-samples", sw_mc, "Monte Carlo sample override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", e.what()}, {"kind", "usage"}}.dump() << std::endl;
    return 2;
  }

  try {
    if (*info) return gsvd_info(info_args);
    if (*opt) {
      const Constellation c = constellation_from_token(mod);
      const WiretapChannel ch = generate_channel(opt_args.nt, opt_args.nr, opt_args.ne,
                                                 opt_args.seed);
      OptimOptions o;
      o.max_iters = max_iters;
      o.epsilon = eps;
      o.quadrature.samples = mc_samples;
      o.quadrature.seed = noise_seed;
      o.init = init_from_token(init);
      const OptimResult r = optimize_pg_gsvd(ch, c, power_for_snr(snr_db, opt_args.nr), ns,
                                             strategy_from_token(strategy), o, opt_args.tol);
      std::printf("iter,rate_bits\n");
      for (std::size_t i = 0; i < r.trace.size(); ++i) std::printf("%zu,%.17g\n", i, r.trace[i]);
      return 0;
    }
    if (*cnt) {
      const std::vector<int> nts = c_nt > 0 ? std::vector<int>{c_nt} : std::vector<int>{4, 64};
      const std::vector<std::string> mods =
          c_mod.empty() ? std::vector<std::string>{"bpsk", "qpsk"} : std::vector<std::string>{c_mod};
      for (int n : nts) {
        for (const auto& m : mods) counts(n, c_ns, m);
      }
      return 0;
    }
    if (*bnd) return bound(b_args, b_mod, b_ns);
    if (*sweep) {
      ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!sw_seed.empty()) cfg.set("channel_seed", sw_seed);
      if (!sw_noise.empty()) cfg.set("noise_seed", sw_noise);
      if (!sw_mc.empty()) cfg.set("mc_samples", sw_mc);
      const SecrecyCurve curve = run_sweep(cfg);
      if (!out_path.empty()) {
        curve.write_csv(out_path);
      } else {
        std::printf("%s\n", kCurveHeader);
        for (const auto& r : curve.rows) {
          char rate[40] = "";
          if (r.rate_bits) std::snprintf(rate, sizeof rate, "%.17g", *r.rate_bits);
          std::printf("%.17g,%s,%s,%d,%llu\n", r.snr_db, to_string(r.design), rate, r.iterations,
                      static_cast<unsigned long long>(r.additions));
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"kind", "runtime"}}.dump() << std::endl;
    return 1;
  }
  return 0;
}
