#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pggsvd/harness.hpp"

namespace pggsvd {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::runtime_error io_error(const std::string& path, const std::string& what) {
  return std::runtime_error(path + ": " + what);
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void SecrecyCurve::write_csv(const std::string& path) const {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error(path, "cannot open for writing");
    out << kCurveHeader << '\n';
    for (const auto& r : rows) {
      out << fmt(r.snr_db) << ',' << to_string(r.design) << ','
          << (r.rate_bits ? fmt(*r.rate_bits) : std::string()) << ',' << r.iterations << ','
          << r.additions << '\n';
    }
    if (!out) throw io_error(path, "write failed");
  }
  const std::string meta_path = path + ".meta";
  std::ofstream meta(meta_path, std::ios::binary | std::ios::trunc);
  if (!meta) throw io_error(meta_path, "cannot open for writing");
  for (const auto& [k, v] : metadata) meta << k << '=' << v << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    meta << "row." << i << ".std_error=" << fmt(rows[i].std_error) << '\n';
    if (!rows[i].reason.empty()) meta << "row." << i << ".reason=" << rows[i].reason << '\n';
  }
  if (!meta) throw io_error(meta_path, "write failed");
}

SecrecyCurve SecrecyCurve::read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  SecrecyCurve curve;
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) {
    throw io_error(path, "missing or unexpected header");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = fields(line);
    const std::string where = "line " + std::to_string(lineno);
    if (f.size() != 5) throw io_error(path, where + ": expected 5 fields");
    CurveRow r;
    try {
      r.snr_db = std::stod(f[0]);
      r.design = design_from_token(f[1]);
      if (!f[2].empty()) r.rate_bits = std::stod(f[2]);
      r.iterations = std::stoi(f[3]);
      r.additions = std::stoull(f[4]);
    } catch (const std::exception& e) {
      throw io_error(path, where + ": " + e.what());
    }
    curve.rows.push_back(std::move(r));
  }

  std::ifstream meta(path + ".meta", std::ios::binary);
  if (!meta) return curve;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("row.", 0) == 0) {
      const auto dot = key.find('.', 4);
      const std::size_t idx = std::stoul(key.substr(4, dot - 4));
      if (idx >= curve.rows.size()) throw io_error(path + ".meta", "row index out of range");
      const std::string field = key.substr(dot + 1);
      if (field == "std_error") curve.rows[idx].std_error = std::stod(value);
      else if (field == "reason") curve.rows[idx].reason = value;
    } else {
      curve.metadata[key] = value;
    }
  }
  return curve;
}

}  // namespace pggsvd
