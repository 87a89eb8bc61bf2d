#include "pggsvd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pggsvd/secrecy.hpp"

namespace pggsvd {

WiretapChannel generate_channel(int nt, int nr, int ne, std::uint64_t seed) {
  if (nt < 1 || nr < 0 || ne < 0) throw std::invalid_argument("channel dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  auto fill = [&](CMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double re = normal(rng);
        const double im = normal(rng);
        m(i, j) = cplx(re, im);
      }
    }
  };
  WiretapChannel ch;
  ch.h_bob.resize(nr, nt);
  ch.h_eve.resize(ne, nt);
  fill(ch.h_bob);
  fill(ch.h_eve);
  return ch;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const char* to_string(Design d) {
  switch (d) {
    case Design::Gsvd: return "gsvd";
    case Design::PgGsvd: return "pg_gsvd";
    case Design::HighSnr: return "high_snr";
    case Design::None: return "none";
  }
  return "?";
}

Design design_from_token(const std::string& token) {
  for (Design d : {Design::Gsvd, Design::PgGsvd, Design::HighSnr, Design::None}) {
    if (token == to_string(d)) return d;
  }
  throw std::invalid_argument("unknown design '" + token + "' (gsvd, pg_gsvd, high_snr, none)");
}

const char* to_string(PairingStrategy s) {
  switch (s) {
    case PairingStrategy::Theorem2: return "theorem2";
    case PairingStrategy::BobAdvantageInterleave: return "interleave";
    case PairingStrategy::Auto: return "auto";
  }
  return "?";
}

PairingStrategy strategy_from_token(const std::string& token) {
  for (PairingStrategy s : {PairingStrategy::Theorem2, PairingStrategy::BobAdvantageInterleave,
                            PairingStrategy::Auto}) {
    if (token == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown strategy '" + token + "' (theorem2, interleave, auto)");
}

Initialization init_from_token(const std::string& token) {
  for (Initialization i : {Initialization::Uniform, Initialization::Gsvd, Initialization::HighSnr,
                           Initialization::Best}) {
    if (token == to_string(i)) return i;
  }
  throw std::invalid_argument("unknown init '" + token + "' (uniform, gsvd, high_snr, best)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": '" + v + "' is not a number");
  }
  if (used != v.size() || !std::isfinite(x)) {
    throw std::invalid_argument(key + ": '" + v + "' is not a finite number");
  }
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": '" + v + "' is not an integer");
  }
  if (used != v.size()) throw std::invalid_argument(key + ": '" + v + "' is not an integer");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x;
  if (v.empty() || v[0] == '-') throw std::invalid_argument(key + ": '" + v + "' is not a seed");
  try {
    x = std::stoull(v, &used, 0);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": '" + v + "' is not a seed");
  }
  if (used != v.size()) throw std::invalid_argument(key + ": '" + v + "' is not a seed");
  return x;
}

int parse_dim(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < 0 || x > 1 << 20) throw std::invalid_argument(key + ": out of range");
  return static_cast<int>(x);
}

// "a,b,c" or "start:step:stop" (inclusive).
std::vector<double> parse_grid(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) throw std::invalid_argument(key + ": range must be start:step:stop");
    const double a = parse_double(key, parts[0]);
    const double st = parse_double(key, parts[1]);
    const double b = parse_double(key, parts[2]);
    if (!(st > 0.0)) throw std::invalid_argument(key + ": range step must be positive");
    const long long n = static_cast<long long>(std::floor((b - a) / st + 1e-9));
    if (n < 0 || n > 100000) throw std::invalid_argument(key + ": bad range");
    for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * st);
    return out;
  }
  for (const auto& p : split(v, ',')) out.push_back(parse_double(key, p));
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (nt < 1 || nr < 1 || ne < 0) {
    throw std::invalid_argument("nt and nr must be positive, ne nonnegative");
  }
  if (ns < 1) throw std::invalid_argument("ns must be positive");
  constellation_from_token(modulation);
  if (snr_grid_db.empty()) throw std::invalid_argument("snr_grid_db must not be empty");
  for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
    if (!std::isfinite(snr_grid_db[i])) throw std::invalid_argument("snr_grid_db must be finite");
    if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1])) {
      throw std::invalid_argument("snr_grid_db must be strictly increasing");
    }
  }
  if (designs.empty()) throw std::invalid_argument("designs must not be empty");
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be positive");
  OptimOptions o;
  o.max_iters = max_iters;
  o.epsilon = epsilon;
  o.validate();
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "nt") nt = parse_dim(key, v);
  else if (key == "nr") nr = parse_dim(key, v);
  else if (key == "ne") ne = parse_dim(key, v);
  else if (key == "modulation") modulation = v;
  else if (key == "ns") ns = parse_dim(key, v);
  else if (key == "snr_grid_db") snr_grid_db = parse_grid(key, v);
  else if (key == "designs") {
    designs.clear();
    for (const auto& t : split(v, ',')) designs.push_back(design_from_token(t));
  } else if (key == "channel_seed") channel_seed = parse_u64(key, v);
  else if (key == "noise_seed") noise_seed = parse_u64(key, v);
  else if (key == "mc_samples") mc_samples = parse_dim(key, v);
  else if (key == "max_iters") max_iters = parse_dim(key, v);
  else if (key == "epsilon") epsilon = parse_double(key, v);
  else if (key == "strategy") strategy = strategy_from_token(v);
  else if (key == "init") init = init_from_token(v);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os << "nt=" << nt << "\nnr=" << nr << "\nne=" << ne << "\nmodulation=" << modulation
     << "\nns=" << ns << "\nsnr_grid_db=";
  for (std::size_t i = 0; i < snr_grid_db.size(); ++i) os << (i ? "," : "") << fmt(snr_grid_db[i]);
  os << "\ndesigns=";
  for (std::size_t i = 0; i < designs.size(); ++i) os << (i ? "," : "") << to_string(designs[i]);
  os << "\nchannel_seed=" << channel_seed << "\nnoise_seed=" << noise_seed
     << "\nmc_samples=" << mc_samples << "\nmax_iters=" << max_iters
     << "\nepsilon=" << fmt(epsilon) << "\nstrategy=" << to_string(strategy)
     << "\ninit=" << to_string(init) << "\n";
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : echo()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

double power_for_snr(double snr_db, int nr, double noise_bob) {
  return std::pow(10.0, snr_db / 10.0) * nr * noise_bob;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

SecrecyCurve run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SecrecyCurve curve;
  {
    std::istringstream echo(cfg.echo());
    std::string line;
    while (std::getline(echo, line)) {
      const auto eq = line.find('=');
      curve.metadata["config." + line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  curve.metadata["config_hash"] = hex;
  curve.metadata["channel_seed"] = std::to_string(cfg.channel_seed);
  curve.metadata["noise_seed"] = std::to_string(cfg.noise_seed);
  curve.metadata["timestamp"] = utc_timestamp();

  std::vector<Design> designs;
  for (Design d : cfg.designs) {
    if (d != Design::None && std::find(designs.begin(), designs.end(), d) == designs.end()) {
      designs.push_back(d);
    }
  }
  if (designs.empty()) return curve;

  const Constellation c = constellation_from_token(cfg.modulation);
  const WiretapChannel channel = generate_channel(cfg.nt, cfg.nr, cfg.ne, cfg.channel_seed);
  const WiretapModel model = make_model(channel, cfg.ns);
  curve.metadata["gsvd.k"] = std::to_string(model.decomposition.k);
  curve.metadata["gsvd.r"] = std::to_string(model.decomposition.r);
  curve.metadata["gsvd.s"] = std::to_string(model.decomposition.s);

  const int padded = model.padded_size();
  const ComplexityReport counts = addition_counts(padded, cfg.ns, model.groups(), c.order);
  const std::uint64_t grouped_adds = counts.alg1.exact.value_or(0);
  const auto gsvd_adds = static_cast<std::uint64_t>(cfg.nt) * static_cast<std::uint64_t>(c.order);

  std::vector<int> auto_perm;
  try {
    auto_perm = pair_subchannels(model.gains, cfg.ns, cfg.strategy);
  } catch (const InfeasibleError&) {
    auto_perm = pair_subchannels(model.gains, cfg.ns, PairingStrategy::Auto);
  }

  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
    const double snr = cfg.snr_grid_db[i];
    const double power = power_for_snr(snr, cfg.nr, channel.noise_bob);
    NoiseQuadrature q;
    q.samples = cfg.mc_samples;
    q.seed = derive_seed(cfg.noise_seed, i);
    const GroupedEvaluator eval(model, c, q);

    for (Design d : designs) {
      CurveRow row;
      row.snr_db = snr;
      row.design = d;
      try {
        if (d == Design::Gsvd) {
          const GsvdPrecoder g = gsvd_precoder(model, c, power, q);
          const SecrecyEstimate est = eval.evaluate(as_grouped(g, auto_perm, cfg.ns)).total;
          row.rate_bits = est.bits;
          row.std_error = est.std_error;
          row.additions = gsvd_adds;
        } else if (d == Design::PgGsvd) {
          OptimOptions o;
          o.max_iters = cfg.max_iters;
          o.epsilon = cfg.epsilon;
          o.quadrature = q;
          o.init = cfg.init;
          const OptimResult r = optimize_pg_gsvd(model, c, power, cfg.strategy, o);
          row.rate_bits = r.estimate.bits;
          row.std_error = r.estimate.std_error;
          row.iterations = r.iterations;
          row.additions = grouped_adds;
        } else {
          const SecrecyEstimate est = eval.evaluate(high_snr_construction(model, c, power)).total;
          row.rate_bits = est.bits;
          row.std_error = est.std_error;
          row.additions = grouped_adds;
        }
      } catch (const InfeasibleError& e) {
        row.rate_bits.reset();
        row.reason = e.what();
      }
      curve.rows.push_back(std::move(row));
    }
  }
  return curve;
}

}  // namespace pggsvd
