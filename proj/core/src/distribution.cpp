#include "mscale/distribution.hpp"

#include <numeric>

#include "mscale/csv.hpp"
#include "mscale/error.hpp"

namespace mscale {

double DiscreteDistribution::at(Count n) const {
  if (n < first || n > last()) return 0.0;
  return masses[static_cast<std::size_t>(n - first)];
}

double DiscreteDistribution::total() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    m += static_cast<double>(first + static_cast<Count>(i)) * masses[i];
  }
  return m / total();
}

void DiscreteDistribution::normalize() {
  const double t = total();
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "distribution has zero total mass");
  for (double& m : masses) m /= t;
}

void write_pmf_csv(const std::filesystem::path& path, const DiscreteDistribution& pmf,
                   const char* index_name, const char* value_name) {
  auto out = open_output(path);
  out << index_name << ',' << value_name << '\n';
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    out << pmf.first + static_cast<Count>(i) << ',' << format_double(pmf.masses[i]) << '\n';
  }
}

DiscreteDistribution read_pmf_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  DiscreteDistribution pmf;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto n = static_cast<Count>(std::stoll(csv.rows[r][0]));
    if (r == 0) {
      pmf.first = n;
    } else if (n != pmf.last() + 1) {
      throw Error(ErrorCode::parse_error, path.string() + ": support is not contiguous");
    }
    pmf.masses.push_back(parse_double(csv.rows[r][1]));
  }
  return pmf;
}

}  // namespace mscale
