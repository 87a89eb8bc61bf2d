#include <doctest.h>

#include <cmath>

#include "pggsvd/harness.hpp"
#include "pggsvd/secrecy.hpp"
#include "test_util.hpp"

using namespace pggsvd;

namespace {

NoiseQuadrature mc(int samples, std::uint64_t seed = 1) {
  return {QuadratureKind::MonteCarlo, samples, seed};
}

PgGsvdPrecoder random_precoder(const WiretapModel& m, double power, std::mt19937_64& rng) {
  PgGsvdPrecoder pre =
      empty_precoder(pair_subchannels(m.gains, m.ns, PairingStrategy::Auto), m.ns);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0;
  for (int s = 0; s < pre.groups(); ++s) {
    pre.rotations[s] = polar_unitary(testutil::random_matrix(m.ns, m.ns, rng));
    for (int i = 0; i < m.ns; ++i) {
      if (m.gains.usable(pre.position(s, i))) pre.powers[s](i) = u(rng);
      sum += pre.powers[s](i);
    }
  }
  for (auto& p : pre.powers) p *= power / sum;
  return pre;
}

}  // namespace

TEST_SUITE("secrecy") {

TEST_CASE("exact rate: zero precoder") {
  const WiretapChannel ch = generate_channel(2, 2, 2, 1);
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const SecrecyEstimate r = secrecy_rate_exact(CMatrix::Zero(2, 2), ch, q, mc(200));
  CHECK(r.bits == 0.0);
  CHECK(r.raw_bits == 0.0);
}

TEST_CASE("exact rate: silent eavesdropper and strong Bob give 2 bits") {
  WiretapChannel ch;
  ch.h_bob = CMatrix::Identity(2, 2);
  ch.h_eve = CMatrix::Zero(2, 2);
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  const SecrecyEstimate r = secrecy_rate_exact(100.0 * CMatrix::Identity(2, 2), ch, b, mc(300));
  CHECK(r.bits == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.eve_bits == 0.0);
}

TEST_CASE("exact rate: identical receivers leak everything") {
  std::mt19937_64 rng(41);
  WiretapChannel ch;
  ch.h_bob = testutil::random_matrix(2, 2, rng);
  ch.h_eve = ch.h_bob;
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  for (int t = 0; t < 3; ++t) {
    const CMatrix g = testutil::random_matrix(2, 2, rng);
    CHECK(secrecy_rate_exact(g, ch, q, mc(200, t)).raw_bits == 0.0);
  }
}

TEST_CASE("exact rate refuses oversized enumerations") {
  const WiretapChannel ch = generate_channel(11, 2, 2, 1);
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  CHECK_THROWS_AS(secrecy_rate_exact(CMatrix::Identity(11, 11), ch, q, mc(10)),
                  EnumerationOverflow);
}

TEST_CASE("grouped rate: zero power and the high-SNR construction") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const WiretapModel m = make_model(generate_channel(4, 3, 2, 1), 2);
  const auto perm = pair_subchannels(m.gains, 2, PairingStrategy::Auto);
  CHECK(secrecy_rate_grouped(empty_precoder(perm, 2), m, q, mc(100)).bits == 0.0);

  const GroupedEvaluator eval(m, q, mc(300));
  for (double p : {0.0, 1.0, 1e4}) {
    const auto r = eval.evaluate(high_snr_construction(m, q, p));
    CHECK(r.eve_bits.cwiseAbs().maxCoeff() == 0.0);
    if (p == 0.0) CHECK(r.total.bits == 0.0);
  }
}

TEST_CASE("grouped rate equals the full-matrix rate with shared draws") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(42);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const WiretapChannel ch = generate_channel(4, 3, 2, seed);
    const WiretapModel m = make_model(ch, 2);
    for (double snr : {-10.0, 10.0, 30.0}) {
      const PgGsvdPrecoder pre = random_precoder(m, power_for_snr(snr, 3), rng);
      const NoiseQuadrature nq = mc(300, seed);
      const SecrecyEstimate g = secrecy_rate_grouped(pre, m, q, nq);
      const SecrecyEstimate e = secrecy_rate_exact(assemble_G(m, pre), ch, q, nq);
      CAPTURE(seed);
      CAPTURE(snr);
      CHECK(std::abs(g.raw_bits - e.raw_bits) <= 2.0 * e.std_error + 1e-9);
      CHECK(std::abs(g.raw_bits - e.raw_bits) < 1e-8);
    }
  }
}

TEST_CASE("group gradients match finite differences of the grouped estimate") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(43);
  const WiretapModel m = make_model(generate_channel(4, 3, 2, 2), 2);
  const GroupedEvaluator eval(m, q, mc(200, 3));
  PgGsvdPrecoder pre = random_precoder(m, 6.0, rng);
  const double h = 1e-6;
  for (int s = 0; s < pre.groups(); ++s) {
    const auto grad = eval.gradient(pre, s);
    for (int i = 0; i < 2; ++i) {
      if (pre.powers[s](i) <= 0.0) continue;
      PgGsvdPrecoder a = pre, b = pre;
      a.powers[s](i) += h;
      b.powers[s](i) -= h;
      const double fd = (eval.objective(a) - eval.objective(b)) / (2 * h);
      CHECK(grad.power(i) == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
      for (int j = 0; j < 2; ++j) {
        // Perturbed V_s is no longer unitary.
        auto f = [&](cplx delta) {
          PgGsvdPrecoder c = pre;
          c.rotations[s](i, j) += delta;
          return eval.objective_unchecked(c);
        };
        const double dre = (f({h, 0}) - f({-h, 0})) / (2 * h);
        const double dim = (f({0, h}) - f({0, -h})) / (2 * h);
        const cplx want = 0.5 * cplx(dre, dim);
        CHECK(std::abs(grad.rotation(i, j) - want) < 1e-4 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST_CASE("high-SNR ceiling of the GSVD design") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  CHECK(gsvd_high_snr_bound(generate_channel(4, 3, 2, 1), q) == 6.0);
  CHECK(gsvd_high_snr_bound(generate_channel(3, 3, 2, 1), q) == 6.0);
  WiretapChannel ch = generate_channel(4, 3, 2, 1);
  ch.h_bob.setZero();
  CHECK(gsvd_high_snr_bound(ch, q) == 0.0);
}

TEST_CASE("one-Bob-only-per-group condition") {
  Theorem2Check t = theorem2_condition(generate_channel(4, 3, 2, 1), 2);
  CHECK(t.holds);
  CHECK(t.k == 4);
  CHECK(t.n2 == 2);
  CHECK(t.r == 2);
  t = theorem2_condition(generate_channel(64, 48, 48, 2), 2);
  CHECK(!t.holds);
  CHECK(t.k == 64);
  CHECK(t.n2 == 48);
  CHECK(t.r == 16);
  WiretapChannel ch = generate_channel(4, 3, 2, 1);
  ch.h_eve = CMatrix(0, 4);
  t = theorem2_condition(ch, 2);
  CHECK(t.k == 3);
  CHECK(t.n2 == 0);
  CHECK(t.holds == (3 * 2 >= 4));
  CHECK(!theorem2_condition(ch, 1).holds);
}

TEST_CASE("addition counts") {
  auto check = [](int nt, int ns, int s, int m, std::uint64_t g, std::uint64_t a) {
    const ComplexityReport r = addition_counts(nt, ns, s, m);
    CHECK(r.gsvd.exact.value() == g);
    CHECK(r.alg1.exact.value() == a);
    return r;
  };
  CHECK(check(4, 2, 2, 2, 8, 32).full.exact.value() == 256);
  CHECK(check(4, 2, 2, 4, 16, 512).full.exact.value() == 65536);
  const ComplexityReport b = check(64, 2, 32, 2, 128, 512);
  const ComplexityReport q = check(64, 2, 32, 4, 256, 8192);
  CHECK(!b.full.exact);
  CHECK(!q.full.exact);
  CHECK(b.full.text() == "3.40e+38");
  CHECK(q.full.text() == "1.16e+77");
  CHECK(static_cast<double>(b.full.value) == doctest::Approx(std::ldexp(1.0, 128)));
  CHECK(static_cast<double>(q.full.value) == doctest::Approx(std::ldexp(1.0, 256)));
  CHECK(addition_counts(4, 2, 2, 2).full.text() == "256");
  CHECK_THROWS_AS(addition_counts(4, 2, 3, 2), std::invalid_argument);
  // 2^64 is the first full count that does not fit.
  CHECK(!addition_counts(32, 2, 16, 2).full.exact);
  CHECK(addition_counts(31, 31, 1, 2).full.exact.value() == (std::uint64_t{1} << 62));
}

}
