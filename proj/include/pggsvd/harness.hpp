#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pggsvd/constellation.hpp"
#include "pggsvd/gsvd.hpp"
#include "pggsvd/optimizer.hpp"
#include "pggsvd/precoders.hpp"

namespace pggsvd {

/// i.i.d. CN(0, 1) entries for H_ba (N_r x N_t) then H_ea (N_e x N_t), unit
/// noise variances. Deterministic per seed.
WiretapChannel generate_channel(int nt, int nr, int ne, std::uint64_t seed);

/// SplitMix64 finalizer over (seed, index): independent per-point streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

enum class Design { Gsvd, PgGsvd, HighSnr, None };

const char* to_string(Design d);
Design design_from_token(const std::string& token);
PairingStrategy strategy_from_token(const std::string& token);
const char* to_string(PairingStrategy s);
Initialization init_from_token(const std::string& token);

struct ExperimentConfig {
  int nt = 4;
  int nr = 3;
  int ne = 2;
  std::string modulation = "qpsk";
  int ns = 2;
  std::vector<double> snr_grid_db{-10, 0, 10, 20, 30, 40};
  std::vector<Design> designs{Design::Gsvd, Design::PgGsvd};
  std::uint64_t channel_seed = 1;
  std::uint64_t noise_seed = 1;
  int mc_samples = 500;
  int max_iters = 100;
  double epsilon = 1e-4;
  PairingStrategy strategy = PairingStrategy::Auto;
  Initialization init = Initialization::Best;

  /// Throws std::invalid_argument on any inconsistent field.
  void validate() const;

  /// Applies one `key=value` assignment; unknown keys are rejected.
  void set(const std::string& key, const std::string& value);

  /// Canonical `key=value` lines in a fixed order.
  std::string echo() const;

  /// FNV-1a of echo().
  std::uint64_t hash() const;
};

/// Parses a flat `key = value` file (blank lines and `#` comments allowed)
/// on top of the defaults.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<text>");

struct CurveRow {
  double snr_db = 0.0;
  Design design = Design::None;
  std::optional<double> rate_bits;  // empty for skipped rows
  int iterations = 0;
  std::uint64_t additions = 0;
  double std_error = 0.0;
  std::string reason;  // why a row was skipped

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

struct SecrecyCurve {
  std::vector<CurveRow> rows;
  std::map<std::string, std::string> metadata;

  /// Writes `path` (the fixed-header CSV) and `path + ".meta"` (metadata,
  /// per-row standard errors and skip reasons). The CSV depends only on the
  /// rows, so identical runs give byte-identical files.
  void write_csv(const std::string& path) const;
  static SecrecyCurve read_csv(const std::string& path);
};

inline constexpr const char* kCurveHeader = "snr_db,design,rate_bits,iterations,additions";

/// Total power for a given SNR in dB: P = 10^{snr/10} N_r sigma_b^2.
double power_for_snr(double snr_db, int nr, double noise_bob = 1.0);

/// Every design at every SNR point on one seeded channel.
SecrecyCurve run_sweep(const ExperimentConfig& cfg);

}  // namespace pggsvd
