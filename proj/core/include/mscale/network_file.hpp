#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mscale/reaction_model.hpp"

namespace mscale {

/// Which analytic fast-subsystem closure QSSMA should use for a network.
enum class QssmaKind { none, linear, dimerisation };

std::string_view to_string(QssmaKind kind);

/// Everything a network definition file describes.
struct NetworkSpec {
  std::string name;
  ReactionNetwork network;
  SlowProjection projection;
  std::optional<StateVector> initial_state;
  std::vector<Count> domain;  // truncated-CME upper bounds, empty when unset
  QssmaKind qssma = QssmaKind::none;
  std::map<std::string, double> parameters;
};

using ParameterOverrides = std::map<std::string, double>;

/// Parses the plain-text network format (see README, "Network files").
/// Overrides replace or add entries of the parameters block before rates are
/// resolved. Throws Error(parse_error) with a line number on malformed input.
NetworkSpec parse_network(std::string_view text, const ParameterOverrides& overrides = {});

/// Reads a network file. A path without an extension that does not exist is
/// retried with ".net" appended.
NetworkSpec load_network(const std::filesystem::path& path,
                         const ParameterOverrides& overrides = {});

/// Parses "NAME=VALUE".
std::pair<std::string, double> parse_override(std::string_view text);

}  // namespace mscale
