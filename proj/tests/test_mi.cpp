#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pggsvd/mi.hpp"
#include "test_util.hpp"

using namespace pggsvd;

namespace {

// I(x; sqrt(snr) x + n) for BPSK with unit-variance complex noise, by
// trapezoidal integration over the in-phase noise component.
double bpsk_mi_oracle(double snr) {
  const double a = std::sqrt(snr);
  const double sd = std::sqrt(0.5);
  const int n = 200001;
  const double lo = -12.0 * sd;
  const double hi = 12.0 * sd;
  const double h = (hi - lo) / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = lo + i * h;
    const double pdf = std::exp(-t * t / (2 * sd * sd)) / (sd * std::sqrt(2 * std::numbers::pi));
    const double z = -4.0 * a * (a + t);
    const double loss = z > 30 ? z / std::numbers::ln2 : std::log2(1.0 + std::exp(z));
    acc += (i == 0 || i == n - 1 ? 0.5 : 1.0) * pdf * loss;
  }
  return 1.0 - acc * h;
}

NoiseQuadrature gh(int nodes) { return {QuadratureKind::GaussHermite, nodes, 1}; }
NoiseQuadrature mc(int samples, std::uint64_t seed = 1) {
  return {QuadratureKind::MonteCarlo, samples, seed};
}

CMatrix scalar(double v) {
  CMatrix t(1, 1);
  t(0, 0) = v;
  return t;
}

}  // namespace

TEST_SUITE("mi") {

TEST_CASE("zero channel carries no information") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  CHECK(mutual_information(CMatrix::Zero(2, 2), q, 1.0, mc(300)).bits == 0.0);
  CHECK(mutual_information(CMatrix::Zero(1, 2), q, 1.0, gh(8)).bits == 0.0);
}

TEST_CASE("bpsk at 0 dB under complex noise") {
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  // Only the in-phase half of CN(0, 1) noise disturbs BPSK, so T = 1 is an
  // effective real SNR of 2 and the integral gives about 0.7215 bits.
  const double oracle = bpsk_mi_oracle(1.0);
  CHECK(oracle == doctest::Approx(0.7215).epsilon(1e-3));
  CHECK(mutual_information(scalar(1.0), b, 1.0, gh(40)).bits ==
        doctest::Approx(oracle).epsilon(1e-6));
  const MiResult m = mutual_information(scalar(1.0), b, 1.0, mc(4000, 7));
  CHECK(std::abs(m.bits - oracle) < 4.0 * m.std_error + 1e-3);
  CHECK(m.std_error > 0.0);
  CHECK(m.additions == 4);
}

TEST_CASE("bpsk at unit in-phase SNR is about 0.486 bits") {
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  const double oracle = bpsk_mi_oracle(0.5);
  CHECK(oracle == doctest::Approx(0.486).epsilon(0.005 / 0.486));
  CHECK(mutual_information(scalar(std::sqrt(0.5)), b, 1.0, gh(40)).bits ==
        doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("bpsk saturates at high SNR") {
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  for (const auto& q : {gh(20), mc(500)}) {
    const double bits = mutual_information(scalar(10.0), b, 1.0, q).bits;
    CHECK(bits >= 0.999);
    CHECK(bits <= 1.0);
  }
  CHECK(bpsk_mi_oracle(100.0) > 0.999);
}

TEST_CASE("qpsk splits into two bpsk channels at half the SNR") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  for (double snr : {0.3, 1.0, 4.0}) {
    CAPTURE(snr);
    CHECK(mutual_information(scalar(std::sqrt(snr)), q, 1.0, gh(40)).bits ==
          doctest::Approx(2.0 * bpsk_mi_oracle(snr / 2.0)).epsilon(1e-6));
  }
}

TEST_CASE("noise variance scales like channel gain") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const double a = mutual_information(scalar(2.0), q, 1.0, gh(30)).bits;
  const double b = mutual_information(scalar(1.0), q, 0.25, gh(30)).bits;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("estimates stay within [0, N log2 M]") {
  std::mt19937_64 rng(11);
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix t = testutil::random_matrix(2, 2, rng) * std::pow(10.0, trial % 5 - 2);
    const double bits = mutual_information(t, q, 1.0, mc(200, trial)).bits;
    CHECK(bits >= 0.0);
    CHECK(bits <= 4.0);
  }
}

TEST_CASE("scaling the channel up never lowers the estimate with shared draws") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix t = testutil::random_matrix(1, 1, rng);
    double prev = -1.0;
    for (double alpha : {0.1, 0.3, 1.0, 2.0, 4.0, 10.0}) {
      const double bits = mutual_information(alpha * t, q, 1.0, mc(500, trial)).bits;
      CHECK(bits >= prev - 1e-12);
      prev = bits;
    }
  }
}

TEST_CASE("unitary receive rotations leave MI unchanged") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(13);
  const CMatrix t = testutil::random_matrix(2, 2, rng);
  const Eigen::HouseholderQR<CMatrix> qr(testutil::random_matrix(2, 2, rng));
  const CMatrix u = qr.householderQ();
  const double a = mutual_information(t, q, 1.0, gh(10)).bits;
  const double b = mutual_information(u * t, q, 1.0, gh(10)).bits;
  CHECK(a == doctest::Approx(b).epsilon(2e-3));
}

TEST_CASE("identical seeds reproduce bit for bit") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(14);
  const CMatrix t = testutil::random_matrix(2, 2, rng);
  CHECK(mutual_information(t, q, 1.0, mc(300, 5)).bits ==
        mutual_information(t, q, 1.0, mc(300, 5)).bits);
  CHECK(mutual_information(t, q, 1.0, mc(300, 5)).bits !=
        mutual_information(t, q, 1.0, mc(300, 6)).bits);
}

TEST_CASE("mmse matrix limits") {
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  const CMatrix e0 = mmse_matrix(CMatrix::Zero(2, 2), q, 1.0, mc(200));
  CHECK((e0 - CMatrix::Identity(2, 2)).norm() < 1e-12);
  const CMatrix e1 = mmse_matrix(scalar(100.0), b, 1.0, mc(500));
  CHECK(std::abs(e1(0, 0)) < 1e-3);
}

TEST_CASE("mmse matrix is Hermitian with eigenvalues in [0, 1]") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix t = testutil::random_matrix(2, 2, rng);
    const CMatrix e = mmse_matrix(t, q, 1.0, mc(100, trial));
    CHECK((e - e.adjoint()).norm() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(e);
    CHECK(es.eigenvalues().minCoeff() >= -1e-6);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-6);
  }
}

TEST_CASE("gradient vanishes at G = 0") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(16);
  const CMatrix h = testutil::random_matrix(2, 2, rng);
  const CMatrix g = CMatrix::Zero(2, 2);
  CHECK(mi_gradient(h, g, q, 1.0, mc(200)).norm() == 0.0);
  CHECK(mmse_gradient(h, g, q, 1.0, mc(200)).norm() == 0.0);
}

TEST_CASE("scalar bpsk gradient is positive at 0 dB") {
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  const CMatrix grad = mi_gradient(scalar(1.0), scalar(1.0), b, 1.0, mc(500));
  CHECK(grad(0, 0).real() > 0.0);
  const double h = 1e-5;
  const double fd = (mutual_information(scalar(1.0 + h), b, 1.0, mc(500)).bits -
                     mutual_information(scalar(1.0 - h), b, 1.0, mc(500)).bits) /
                    (2 * h);
  // d/dg of a real function of a real g is twice the real part of d/dg^*.
  CHECK(2.0 * grad(0, 0).real() == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("2x2 qpsk gradient matches central differences") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  std::mt19937_64 rng(17);
  const CMatrix h = testutil::random_matrix(2, 2, rng);
  const CMatrix g = testutil::random_matrix(2, 2, rng);
  const NoiseQuadrature nq = mc(400, 3);
  const CMatrix grad = mi_gradient(h, g, q, 1.0, nq);
  const double step = 1e-6;
  CMatrix fd(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      auto f = [&](cplx delta) {
        CMatrix gg = g;
        gg(i, j) += delta;
        return mutual_information(h * gg, q, 1.0, nq).bits;
      };
      const double dre = (f({step, 0}) - f({-step, 0})) / (2 * step);
      const double dim = (f({0, step}) - f({0, -step})) / (2 * step);
      fd(i, j) = 0.5 * cplx(dre, dim);
    }
  }
  CHECK((grad - fd).cwiseAbs().maxCoeff() < std::max(1e-4, 1e-3 * grad.norm()));
}

TEST_CASE("pathwise and closed-form gradients agree under dense quadrature") {
  const Constellation b = make_constellation(Scheme::BPSK, 2);
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  for (double g : {0.5, 1.0, 2.0}) {
    CAPTURE(g);
    const CMatrix a = mi_gradient(scalar(1.0), scalar(g), b, 1.0, gh(60));
    const CMatrix c = mmse_gradient(scalar(1.0), scalar(g), b, 1.0, gh(60));
    CHECK(std::abs(a(0, 0) - c(0, 0)) < 1e-4 * std::max(1.0, std::abs(c(0, 0))));
    const CMatrix a2 = mi_gradient(scalar(1.0), scalar(g), q, 1.0, gh(60));
    const CMatrix c2 = mmse_gradient(scalar(1.0), scalar(g), q, 1.0, gh(60));
    CHECK(std::abs(a2(0, 0) - c2(0, 0)) < 1e-4 * std::max(1.0, std::abs(c2(0, 0))));
  }
}

TEST_CASE("quadrature settings are validated") {
  const Constellation q = make_constellation(Scheme::QPSK, 4);
  CHECK_THROWS_AS(mutual_information(CMatrix::Identity(3, 3), q, 1.0, gh(4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mutual_information(scalar(1.0), q, 1.0, mc(0)), std::invalid_argument);
  CHECK_THROWS_AS(mutual_information(scalar(1.0), q, 0.0, mc(10)), std::invalid_argument);
  CHECK_THROWS_AS(mutual_information(scalar(1.0), q, std::nan(""), mc(10)),
                  std::invalid_argument);
}

TEST_CASE("gauss-hermite rule integrates polynomials exactly") {
  RVector x, w;
  gauss_hermite_rule(10, x, w);
  // \int e^{-t^2} t^{2k} dt = Gamma(k + 1/2).
  for (int k = 0; k < 10; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) acc += w(i) * std::pow(x(i), 2 * k);
    CHECK(acc == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-10));
  }
}

TEST_CASE("row selection keeps the shared draws") {
  const NoiseSamples full = draw_noise(mc(50, 9), 3);
  const NoiseSamples sub = select_rows(full, {2, 0});
  REQUIRE(sub.dim() == 2);
  CHECK(sub.z.row(0) == full.z.row(2));
  CHECK(sub.z.row(1) == full.z.row(0));
  CHECK(draw_noise(mc(50, 9), 3).z == full.z);
}

}
