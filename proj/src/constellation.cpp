#include "pggsvd/constellation.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pggsvd {

namespace {

bool is_square_qam_order(int order) {
  if (order < 4) return false;
  if ((order & (order - 1)) != 0) return false;
  int bits = 0;
  for (int m = order; m > 1; m >>= 1) ++bits;
  return bits % 2 == 0;
}

std::vector<cplx> square_qam(int order) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
  // Mean energy of the {±1, ±3, ...}^2 grid is 2(M - 1)/3.
  const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
  std::vector<cplx> pts;
  pts.reserve(order);
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      const double re = 2.0 * i - (side - 1);
      const double im = 2.0 * q - (side - 1);
      pts.emplace_back(re * scale, im * scale);
    }
  }
  return pts;
}

}  // namespace

double Constellation::log2_order() const { return std::log2(static_cast<double>(order)); }

std::string Constellation::token() const {
  switch (scheme) {
    case Scheme::BPSK: return "bpsk";
    case Scheme::QPSK: return "qpsk";
    case Scheme::QAM: return "qam" + std::to_string(order);
  }
  return "?";
}

Constellation make_constellation(Scheme scheme, int order) {
  Constellation c;
  c.scheme = scheme;
  c.order = order;
  switch (scheme) {
    case Scheme::BPSK:
      if (order != 2) {
        throw std::invalid_argument("BPSK requires M = 2, got M = " + std::to_string(order));
      }
      c.points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
      break;
    case Scheme::QPSK:
      if (order != 4) {
        throw std::invalid_argument("QPSK requires M = 4, got M = " + std::to_string(order));
      }
      c.points = square_qam(4);
      break;
    case Scheme::QAM:
      if (!is_square_qam_order(order)) {
        throw std::invalid_argument("QAM requires a square order (4, 16, 64, ...), got M = " +
                                    std::to_string(order));
      }
      c.points = square_qam(order);
      break;
  }
  return c;
}

Constellation constellation_from_token(std::string_view token) {
  std::string t(token);
  for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (t == "bpsk") return make_constellation(Scheme::BPSK, 2);
  if (t == "qpsk") return make_constellation(Scheme::QPSK, 4);
  if (t.rfind("qam", 0) == 0 && t.size() > 3) {
    int order = 0;
    const char* first = t.data() + 3;
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, order);
    if (ec == std::errc() && ptr == last) return make_constellation(Scheme::QAM, order);
  }
  throw std::invalid_argument("unknown modulation '" + std::string(token) +
                              "' (expected bpsk, qpsk, qam16, qam64)");
}

std::size_t product_size(int order, int symbols) {
  if (order < 1 || symbols < 0) throw std::invalid_argument("product_size: bad arguments");
  std::size_t n = 1;
  for (int i = 0; i < symbols; ++i) {
    if (n > kMaxProductSize / static_cast<std::size_t>(order)) {
      throw EnumerationOverflow("M^N = " + std::to_string(order) + "^" + std::to_string(symbols) +
                                " exceeds the enumeration bound of " +
                                std::to_string(kMaxProductSize) + " vectors");
    }
    n *= static_cast<std::size_t>(order);
  }
  return n;
}

CMatrix product_points(const Constellation& c, int symbols) {
  const std::size_t count = product_size(c.order, symbols);
  CMatrix out(symbols, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t rest = j;
    for (int s = symbols - 1; s >= 0; --s) {
      out(s, static_cast<Eigen::Index>(j)) = c.points[rest % c.order];
      rest /= c.order;
    }
  }
  return out;
}

}  // namespace pggsvd
