#include "mscale/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mscale/csv.hpp"
#include "mscale/error.hpp"

namespace mscale {

double relative_l2_error(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (q.masses.empty()) throw Error(ErrorCode::invalid_argument, "reference distribution is empty");
  const Count lo = p.masses.empty() ? q.first : std::min(p.first, q.first);
  const Count hi = p.masses.empty() ? q.last() : std::max(p.last(), q.last());
  double diff = 0.0;
  double ref = 0.0;
  for (Count n = lo; n <= hi; ++n) {
    const double d = p.at(n) - q.at(n);
    diff += d * d;
    ref += q.at(n) * q.at(n);
  }
  if (!(ref > 0.0)) throw Error(ErrorCode::invalid_argument, "reference distribution has zero norm");
  return std::sqrt(diff / ref);
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys, double window_lo,
                    double window_hi) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::dimension_mismatch, "xs and ys differ in length");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < window_lo || xs[i] > window_hi) continue;
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "log-log slope needs positive data");
    }
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 3) throw Error(ErrorCode::invalid_argument, "log-log slope needs at least 3 points");
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  if (!(denom > 0.0)) throw Error(ErrorCode::invalid_argument, "x values in the window coincide");
  return (dn * sxy - sx * sy) / denom;
}

std::map<std::string, std::uint64_t> cost_tally(std::span<const DriftDiffusionTable> tables) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& t : tables) out[std::string(to_string(t.method))] += t.total_cost();
  return out;
}

void write_error_records(const std::filesystem::path& path, std::span<const ErrorRecord> records,
                         bool append) {
  const bool header = !append || !std::filesystem::exists(path);
  std::ofstream out;
  if (append && !header) {
    out.open(path, std::ios::app);
    if (!out) throw Error(ErrorCode::io_error, "cannot append to " + path.string());
  } else {
    out = open_output(path);
  }
  if (header) out << "method,budget,error,seed,wall_ms\n";
  for (const auto& r : records) {
    out << r.method << ',' << r.budget << ',' << format_double(r.error) << ',' << r.seed << ','
        << format_double(r.wall_ms) << '\n';
  }
}

}  // namespace mscale
