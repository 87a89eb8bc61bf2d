#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pggsvd/types.hpp"

namespace pggsvd {

enum class Scheme { BPSK, QPSK, QAM };

/// M equiprobable points with zero mean and unit average energy.
struct Constellation {
  Scheme scheme = Scheme::BPSK;
  int order = 2;
  std::vector<cplx> points;

  double log2_order() const;
  std::string token() const;
};

Constellation make_constellation(Scheme scheme, int order);

/// Accepts the CLI tokens "bpsk", "qpsk", "qam16", "qam64" (and "qamM" for
/// any supported square order).
Constellation constellation_from_token(std::string_view token);

/// Largest product alphabet we are willing to enumerate.
inline constexpr std::size_t kMaxProductSize = std::size_t{1} << 24;

/// M^N, or EnumerationOverflow when it exceeds kMaxProductSize.
std::size_t product_size(int order, int symbols);

/// All M^N symbol vectors as the columns of an N x M^N matrix. The first
/// symbol is the most significant digit, so the order is lexicographic in the
/// constellation's point order.
CMatrix product_points(const Constellation& c, int symbols);

}  // namespace pggsvd
