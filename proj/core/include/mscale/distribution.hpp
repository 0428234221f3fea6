#pragma once

#include <filesystem>
#include <vector>

#include "mscale/reaction_model.hpp"

namespace mscale {

/// Probability mass function on the integers first, first + 1, ...
struct DiscreteDistribution {
  Count first = 0;
  std::vector<double> masses;

  Count last() const { return first + static_cast<Count>(masses.size()) - 1; }
  std::size_t size() const { return masses.size(); }
  /// Mass at n, zero outside the stored support.
  double at(Count n) const;
  double total() const;
  double mean() const;
  /// Divides by the total. Throws Error(invalid_argument) if the total is 0.
  void normalize();
};

/// Columns: n,P (or the given header names).
void write_pmf_csv(const std::filesystem::path& path, const DiscreteDistribution& pmf,
                   const char* index_name = "n", const char* value_name = "P");
DiscreteDistribution read_pmf_csv(const std::filesystem::path& path);

}  // namespace mscale
