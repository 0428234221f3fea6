#include "mscale/network_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mscale/error.hpp"

namespace mscale {

std::string_view to_string(QssmaKind kind) {
  switch (kind) {
    case QssmaKind::none: return "none";
    case QssmaKind::linear: return "linear";
    case QssmaKind::dimerisation: return "dimerisation";
  }
  return "none";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + msg);
}

std::optional<double> to_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

struct RawReaction {
  int line = 0;
  std::string label;
  std::string lhs;
  std::string rhs;
  std::string rate;
  RateConvention convention = RateConvention::volume;
};

struct Document {
  std::map<std::string, std::pair<int, std::string>> keys;
  std::vector<std::pair<int, std::string>> parameter_lines;
  std::vector<RawReaction> reactions;
};

RawReaction parse_reaction_line(int line, std::string_view text) {
  RawReaction r;
  r.line = line;
  const auto colon = text.find(':');
  const auto arrow = text.find("->");
  if (colon == std::string_view::npos || arrow == std::string_view::npos || arrow < colon) {
    parse_fail(line, "expected 'LABEL: reactants -> products @ rate'");
  }
  r.label = std::string(trim(text.substr(0, colon)));
  const auto at = text.find('@', arrow);
  if (at == std::string_view::npos) parse_fail(line, "reaction is missing '@ rate'");
  r.lhs = std::string(trim(text.substr(colon + 1, arrow - colon - 1)));
  r.rhs = std::string(trim(text.substr(arrow + 2, at - arrow - 2)));
  auto words = split_words(text.substr(at + 1));
  if (words.empty()) parse_fail(line, "reaction is missing its rate");
  r.rate = words[0];
  for (std::size_t w = 1; w < words.size(); ++w) {
    if (words[w] == "combined") {
      r.convention = RateConvention::combined;
    } else if (words[w] == "volume") {
      r.convention = RateConvention::volume;
    } else {
      parse_fail(line, "unknown reaction modifier '" + words[w] + "'");
    }
  }
  if (r.label.empty()) parse_fail(line, "reaction label is empty");
  return r;
}

Document tokenize(std::string_view text) {
  Document doc;
  std::string block;
  int line_no = 0;
  std::istringstream is{std::string(text)};
  for (std::string raw; std::getline(is, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "}") {
      if (block.empty()) parse_fail(line_no, "unmatched '}'");
      block.clear();
    } else if (line.back() == '{') {
      if (!block.empty()) parse_fail(line_no, "nested blocks are not allowed");
      block = std::string(trim(line.substr(0, line.size() - 1)));
      if (block != "parameters" && block != "reactions") {
        parse_fail(line_no, "unknown block '" + block + "'");
      }
    } else if (block == "reactions") {
      doc.reactions.push_back(parse_reaction_line(line_no, line));
    } else if (block == "parameters") {
      doc.parameter_lines.emplace_back(line_no, std::string(line));
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) parse_fail(line_no, "expected 'key = value'");
      std::string key(trim(line.substr(0, eq)));
      if (doc.keys.count(key)) parse_fail(line_no, "duplicate key '" + key + "'");
      doc.keys[key] = {line_no, std::string(trim(line.substr(eq + 1)))};
    }
  }
  if (!block.empty()) parse_fail(line_no, "unterminated block '" + block + "'");
  return doc;
}

std::vector<int> parse_side(int line, std::string_view side,
                            const std::vector<std::string>& species) {
  std::vector<int> stoich(species.size(), 0);
  side = trim(side);
  if (side == "0" || side == "∅" || side.empty()) return stoich;
  std::size_t pos = 0;
  while (pos <= side.size()) {
    auto plus = side.find('+', pos);
    if (plus == std::string_view::npos) plus = side.size();
    std::string_view term = trim(side.substr(pos, plus - pos));
    pos = plus + 1;
    std::size_t digits = 0;
    while (digits < term.size() && std::isdigit(static_cast<unsigned char>(term[digits]))) {
      ++digits;
    }
    int mult = 1;
    if (digits > 0) mult = std::stoi(std::string(term.substr(0, digits)));
    std::string name(trim(term.substr(digits)));
    auto it = std::find(species.begin(), species.end(), name);
    if (it == species.end()) parse_fail(line, "unknown species '" + name + "'");
    stoich[static_cast<std::size_t>(it - species.begin())] += mult;
    if (plus == side.size()) break;
  }
  return stoich;
}

}  // namespace

std::pair<std::string, double> parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "expected NAME=VALUE, got '" + std::string(text) + "'");
  }
  auto value = to_number(text.substr(eq + 1));
  if (!value) {
    throw Error(ErrorCode::invalid_argument, "bad numeric value in '" + std::string(text) + "'");
  }
  return {std::string(trim(text.substr(0, eq))), *value};
}

NetworkSpec parse_network(std::string_view text, const ParameterOverrides& overrides) {
  Document doc = tokenize(text);
  NetworkSpec spec;

  for (const auto& [line, body] : doc.parameter_lines) {
    const auto eq = body.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected 'name = value' in parameters");
    auto value = to_number(std::string_view(body).substr(eq + 1));
    if (!value) parse_fail(line, "parameter value is not a number");
    spec.parameters[std::string(trim(std::string_view(body).substr(0, eq)))] = *value;
  }
  for (const auto& [name, value] : overrides) spec.parameters[name] = value;

  auto require = [&doc](const std::string& key) -> std::pair<int, std::string> {
    auto it = doc.keys.find(key);
    if (it == doc.keys.end()) parse_fail(0, "missing required key '" + key + "'");
    return it->second;
  };
  auto resolve = [&spec](int line, const std::string& token) {
    if (auto v = to_number(token)) return *v;
    auto it = spec.parameters.find(token);
    if (it == spec.parameters.end()) parse_fail(line, "unknown parameter '" + token + "'");
    return it->second;
  };
  auto int_list = [](int line, const std::string& value) {
    std::vector<Count> out;
    for (const auto& w : split_words(value)) {
      auto v = to_integer(w);
      if (!v) parse_fail(line, "expected integers, got '" + w + "'");
      out.push_back(*v);
    }
    return out;
  };

  if (auto it = doc.keys.find("name"); it != doc.keys.end()) spec.name = it->second.second;

  const auto [species_line, species_text] = require("species");
  const auto species = split_words(species_text);
  if (species.empty()) parse_fail(species_line, "species list is empty");

  double volume = 1.0;
  if (auto it = doc.keys.find("volume"); it != doc.keys.end()) {
    volume = resolve(it->second.first, it->second.second);
  }

  if (doc.reactions.empty()) parse_fail(0, "reactions block is missing or empty");
  std::vector<Reaction> reactions;
  for (const auto& raw : doc.reactions) {
    Reaction r;
    r.label = raw.label;
    r.reactants = parse_side(raw.line, raw.lhs, species);
    r.products = parse_side(raw.line, raw.rhs, species);
    r.rate = resolve(raw.line, raw.rate);
    r.convention = raw.convention;
    reactions.push_back(std::move(r));
  }

  std::vector<std::size_t> fast;
  if (auto it = doc.keys.find("fast"); it != doc.keys.end()) {
    for (const auto& w : split_words(it->second.second)) {
      auto label = std::find_if(reactions.begin(), reactions.end(),
                                [&w](const Reaction& r) { return r.label == w; });
      if (label != reactions.end()) {
        fast.push_back(static_cast<std::size_t>(label - reactions.begin()));
      } else if (auto idx = to_integer(w); idx && *idx >= 1 &&
                                           *idx <= static_cast<long long>(reactions.size())) {
        fast.push_back(static_cast<std::size_t>(*idx - 1));
      } else {
        parse_fail(it->second.first, "fast list names unknown reaction '" + w + "'");
      }
    }
  }

  try {
    spec.network = ReactionNetwork(species, std::move(reactions), volume, std::move(fast));
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }

  const auto [proj_line, proj_text] = require("slow_projection");
  for (Count c : int_list(proj_line, proj_text)) {
    spec.projection.coefficients.push_back(static_cast<int>(c));
  }
  if (spec.projection.coefficients.size() != species.size()) {
    parse_fail(proj_line, "slow_projection needs one coefficient per species");
  }

  if (auto it = doc.keys.find("adjust_species"); it != doc.keys.end()) {
    const auto idx = spec.network.species_index(it->second.second);
    if (idx >= species.size()) parse_fail(it->second.first, "unknown adjust_species");
    spec.projection.adjust_species = idx;
  }

  if (auto it = doc.keys.find("grid"); it != doc.keys.end()) {
    const auto& g = it->second.second;
    const auto colon = g.find(':');
    auto lo = to_integer(std::string_view(g).substr(0, colon));
    auto hi = colon == std::string::npos ? lo : to_integer(std::string_view(g).substr(colon + 1));
    if (!lo || !hi) parse_fail(it->second.first, "grid must be 'min:max'");
    spec.projection.s_min = *lo;
    spec.projection.s_max = *hi;
  }

  if (auto it = doc.keys.find("qssma"); it != doc.keys.end()) {
    const auto& q = it->second.second;
    if (q == "linear") {
      spec.qssma = QssmaKind::linear;
    } else if (q == "dimerisation" || q == "dimerization") {
      spec.qssma = QssmaKind::dimerisation;
    } else if (q != "none") {
      parse_fail(it->second.first, "unknown qssma closure '" + q + "'");
    }
  }
  if (auto it = doc.keys.find("initial"); it != doc.keys.end()) {
    spec.initial_state = int_list(it->second.first, it->second.second);
    if (spec.initial_state->size() != species.size()) {
      parse_fail(it->second.first, "initial state needs one value per species");
    }
  }
  if (auto it = doc.keys.find("domain"); it != doc.keys.end()) {
    spec.domain = int_list(it->second.first, it->second.second);
    if (spec.domain.size() != species.size()) {
      parse_fail(it->second.first, "domain needs one bound per species");
    }
  }

  static const char* known[] = {"name",  "species", "volume", "fast",   "slow_projection",
                                "adjust_species", "grid", "qssma", "initial", "domain"};
  for (const auto& [key, value] : doc.keys) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      parse_fail(value.first, "unknown key '" + key + "'");
    }
  }
  return spec;
}

NetworkSpec load_network(const std::filesystem::path& path, const ParameterOverrides& overrides) {
  auto resolved = path;
  if (!std::filesystem::exists(resolved) && !resolved.has_extension()) {
    resolved += ".net";
  }
  std::ifstream in(resolved);
  if (!in) throw Error(ErrorCode::io_error, "cannot open network file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_network(buffer.str(), overrides);
  } catch (const Error& e) {
    throw Error(e.code(), resolved.string() + ": " + e.what());
  }
}

}  // namespace mscale
