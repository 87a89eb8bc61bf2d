#include <doctest.h>

#include "pggsvd/harness.hpp"
#include "pggsvd/optimizer.hpp"
#include "test_util.hpp"

using namespace pggsvd;

namespace {

OptimOptions options(int samples, std::uint64_t seed, Initialization init, int iters = 30) {
  OptimOptions o;
  o.max_iters = iters;
  o.quadrature = {QuadratureKind::MonteCarlo, samples, seed};
  o.init = init;
  return o;
}

void check_trace(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("zero power stays at zero") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const OptimResult r = optimize_pg_gsvd(generate_channel(4, 3, 2, 1), q, 0.0, 2,
                                         PairingStrategy::Auto, options(100, 1, Initialization::Best));
  CHECK(r.estimate.bits == 0.0);
  CHECK(r.iterations == 0);
  CHECK(r.precoder.total_power() == 0.0);
}

TEST_CASE("uniform start spreads power over Bob-visible positions") {
  const WiretapModel m = make_model(generate_channel(4, 3, 2, 1), 2);
  const auto perm = pair_subchannels(m.gains, 2, PairingStrategy::Auto);
  const PgGsvdPrecoder pre = uniform_start(m, perm, 9.0);
  CHECK(pre.total_power() == doctest::Approx(9.0));
  for (int s = 0; s < pre.groups(); ++s) {
    CHECK((pre.rotations[s] - dft_matrix(2)).norm() < 1e-15);
    for (int i = 0; i < 2; ++i) {
      const int pos = pre.position(s, i);
      CHECK(pre.powers[s](i) == (m.gains.bob(pos) > 0.0 ? doctest::Approx(3.0) : doctest::Approx(0.0)));
    }
  }
}

TEST_CASE("objective traces never decrease and constraints hold") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const WiretapModel m = make_model(generate_channel(4, 3, 2, seed), 2);
    const double p = power_for_snr(5.0, 3);
    const OptimResult r = optimize_pg_gsvd(m, q, p, PairingStrategy::BobAdvantageInterleave,
                                           options(150, seed, Initialization::Uniform, 15));
    CAPTURE(seed);
    check_trace(r.trace);
    CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.precoder.total_power() == doctest::Approx(p).epsilon(1e-9));
    for (const auto& v : r.precoder.rotations) CHECK(testutil::unitarity_error(v) < 1e-9);
    CHECK(r.trace.back() >= r.trace.front());
    CHECK(r.trace.back() == doctest::Approx(r.estimate.bits));
  }
}

TEST_CASE("best start is at least as good as the gsvd allocation") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const WiretapModel m = make_model(generate_channel(4, 3, 2, 6), 2);
  const NoiseQuadrature nq{QuadratureKind::MonteCarlo, 200, 9};
  for (double snr : {-5.0, 15.0}) {
    const double p = power_for_snr(snr, 3);
    const OptimResult r =
        optimize_pg_gsvd(m, q, p, PairingStrategy::Auto, options(200, 9, Initialization::Best, 10));
    const auto perm = pair_subchannels(m.gains, 2, PairingStrategy::Auto);
    const double g = secrecy_rate_grouped(as_grouped(gsvd_precoder(m, q, p, nq), perm, 2), m, q, nq).bits;
    CHECK(r.estimate.bits >= g - 1e-12);
  }
}

TEST_CASE("4x3x2 qpsk at 30 dB nears the 8-bit ceiling") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const OptimResult r = optimize_pg_gsvd(generate_channel(4, 3, 2, 1), q, power_for_snr(30, 3), 2,
                                         PairingStrategy::Auto, options(500, 1, Initialization::Best));
  CHECK(r.estimate.bits >= 8.0 - 0.3);
}

TEST_CASE("single group searches the full precoder space") {
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  const WiretapChannel ch = generate_channel(3, 2, 2, 4);
  const WiretapModel m = make_model(ch, 3);
  CHECK(m.groups() == 1);
  const NoiseQuadrature nq{QuadratureKind::MonteCarlo, 200, 2};
  const OptimResult r = optimize_pg_gsvd(m, b, power_for_snr(10, 2), PairingStrategy::Auto,
                                         options(200, 2, Initialization::Uniform, 10));
  check_trace(r.trace);
  const SecrecyEstimate e = secrecy_rate_exact(assemble_G(m, r.precoder), ch, b, nq);
  CHECK(std::abs(e.bits - r.estimate.bits) < 1e-8);
}

TEST_CASE("infeasible pairing request propagates") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  CHECK_THROWS_AS(optimize_pg_gsvd(generate_channel(4, 3, 2, 1), q, 10.0, 1, PairingStrategy::Theorem2,
                                   options(50, 1, Initialization::Uniform)),
                  InfeasibleError);
}

TEST_CASE("invalid options and channels are rejected") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const WiretapChannel ch = generate_channel(4, 3, 2, 1);
  OptimOptions o = options(50, 1, Initialization::Uniform);
  o.backtrack = 1.5;
  CHECK_THROWS_AS(optimize_pg_gsvd(ch, q, 1.0, 2, PairingStrategy::Auto, o), std::invalid_argument);
  o = options(50, 1, Initialization::Uniform);
  CHECK_THROWS_AS(optimize_pg_gsvd(ch, q, -1.0, 2, PairingStrategy::Auto, o), std::invalid_argument);
  WiretapChannel bad = ch;
  bad.noise_eve = 0.0;
  CHECK_THROWS_AS(optimize_pg_gsvd(bad, q, 1.0, 2, PairingStrategy::Auto, o), std::invalid_argument);
}

}
