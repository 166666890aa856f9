#include "ccqed/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "ccqed/errors.hpp"

namespace ccqed {
namespace {

std::string location(const std::string& source, int line, int column) {
  std::ostringstream out;
  out << source;
  if (line > 0) out << ':' << line << ':' << column;
  return out.str();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

[[noreturn]] void fail_value(const ConfigEntry& e, const std::string& why) {
  throw ConfigError(e.source, e.line, e.value_column, "bad value '" + e.value + "' for " + e.key + ": " + why);
}

double to_double(const ConfigEntry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail_value(e, "expected a finite number");
  return v;
}

int to_int(const ConfigEntry& e) {
  int v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail_value(e, "expected an integer");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, int column, const std::string& message)
    : std::runtime_error(location(source, line, column) + ": " + message), line_(line), column_(column) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "gamma",   "kappa",   "g-c",     "sqrtn-g-c",  "n",         "omega-n-minus-omega-c", "delta-c",
      "omega",   "sqrtn-omega", "epsilon", "phi1",   "phi2",      "delta-phi", "eta",     "eta-sqrtn",
      "variable", "start",  "stop",    "count",      "curves",    "solvers",   "fock-start", "fock-max",
      "fock-tol", "format", "output",  "workers"};
  return keys;
}

std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source) {
  const std::vector<std::string>& keys = config_keys();
  std::vector<ConfigEntry> entries;
  std::set<std::string> seen;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find(" #"); hash != std::string::npos) text.erase(hash);
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    const auto eq = text.find('=', first);
    if (eq == std::string::npos)
      throw ConfigError(source, line, static_cast<int>(first) + 1, "expected 'key = value'");

    auto key_end = eq;
    while (key_end > first && is_space(text[key_end - 1])) --key_end;
    ConfigEntry e;
    e.source = source;
    e.line = line;
    e.key = text.substr(first, key_end - first);
    e.key_column = static_cast<int>(first) + 1;
    if (e.key.empty()) throw ConfigError(source, line, e.key_column, "missing key before '='");
    if (std::find(keys.begin(), keys.end(), e.key) == keys.end())
      throw ConfigError(source, line, e.key_column, "unknown key '" + e.key + "'");
    if (!seen.insert(e.key).second) throw ConfigError(source, line, e.key_column, "key '" + e.key + "' given twice");

    auto value_begin = eq + 1;
    while (value_begin < text.size() && is_space(text[value_begin])) ++value_begin;
    auto value_end = text.size();
    while (value_end > value_begin && is_space(text[value_end - 1])) --value_end;
    e.value = text.substr(value_begin, value_end - value_begin);
    e.value_column = static_cast<int>(value_begin) + 1;
    if (e.value.empty()) throw ConfigError(source, line, e.value_column, "missing value for '" + e.key + "'");
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, 0, "cannot open config file");
  return parse_config(in, path);
}

std::optional<int> config_n(const std::vector<ConfigEntry>& entries) {
  std::optional<int> n;
  for (const ConfigEntry& e : entries)
    if (e.key == "n") {
      n = to_int(e);
      if (*n < 1) fail_value(e, "N must be at least 1");
    }
  return n;
}

void apply_config(const std::vector<ConfigEntry>& entries, SweepSpec& spec) {
  PhysicalParams& p = spec.base;
  const ConfigEntry* sqrtn_g = nullptr;
  const ConfigEntry* sqrtn_omega = nullptr;
  const ConfigEntry* eta_sqrtn = nullptr;
  const ConfigEntry* delta_phi = nullptr;

  for (const ConfigEntry& e : entries) {
    const std::string& k = e.key;
    if (k == "gamma") p.gamma = to_double(e);
    else if (k == "kappa") p.kappa = to_double(e);
    else if (k == "g-c") p.g_c = to_double(e);
    else if (k == "n") {
      p.n_emitters = to_int(e);
      if (p.n_emitters < 1) fail_value(e, "N must be at least 1");
    }
    else if (k == "omega-n-minus-omega-c") p.omega_n_minus_omega_c = to_double(e);
    else if (k == "delta-c") p.delta_c = to_double(e);
    else if (k == "omega") p.omega_rabi = to_double(e);
    else if (k == "epsilon") p.epsilon_drive = to_double(e);
    else if (k == "phi1") p.phi1 = to_double(e);
    else if (k == "phi2") p.phi2 = to_double(e);
    else if (k == "eta") p.eta = to_double(e);
    else if (k == "sqrtn-g-c") sqrtn_g = &e;
    else if (k == "sqrtn-omega") sqrtn_omega = &e;
    else if (k == "eta-sqrtn") eta_sqrtn = &e;
    else if (k == "delta-phi") delta_phi = &e;
    else if (k == "variable") {
      if (e.value == "delta-c") spec.variable = SweepVariable::DeltaC;
      else if (e.value == "delta-phi") spec.variable = SweepVariable::DeltaPhi;
      else if (e.value == "eta") spec.variable = SweepVariable::Eta;
      else if (e.value == "n") spec.variable = SweepVariable::N;
      else fail_value(e, "expected delta-c, delta-phi, eta or n");
    }
    else if (k == "start") spec.grid.start = to_double(e);
    else if (k == "stop") spec.grid.stop = to_double(e);
    else if (k == "count") spec.grid.count = to_int(e);
    else if (k == "curves") {
      spec.curves.clear();
      if (e.value == "none") continue;
      for (const std::string& item : split_list(e.value)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos || colon == 0) fail_value(e, "expected label:eta-sqrtn items or 'none'");
        ConfigEntry number = e;
        number.value = item.substr(colon + 1);
        spec.curves.push_back(Curve{item.substr(0, colon), to_double(number)});
      }
    }
    else if (k == "solvers") {
      spec.solvers.clear();
      for (const std::string& item : split_list(e.value)) {
        try {
          spec.solvers.push_back(parse_solver(item));
        } catch (const ParameterError& err) {
          fail_value(e, err.what());
        }
      }
    }
    else if (k == "fock-start") spec.numeric.start_dim = to_int(e);
    else if (k == "fock-max") spec.numeric.max_dim = to_int(e);
    else if (k == "fock-tol") spec.numeric.relative_change = to_double(e);
    else if (k == "format") {
      if (e.value == "csv") spec.format = OutputFormat::Csv;
      else if (e.value == "jsonl") spec.format = OutputFormat::JsonLines;
      else fail_value(e, "expected csv or jsonl");
    }
    else if (k == "output") spec.output_path = e.value;
    else if (k == "workers") spec.workers = to_int(e);
    else throw ConfigError(e.source, e.line, e.key_column, "unknown key '" + k + "'");
  }

  const double root = p.sqrt_n();
  if (sqrtn_g) p.g_c = to_double(*sqrtn_g) / root;
  if (sqrtn_omega) p.omega_rabi = to_double(*sqrtn_omega) / root;
  if (eta_sqrtn) p.eta = to_double(*eta_sqrtn) / root;
  if (delta_phi) p.phi1 = p.phi2 + to_double(*delta_phi);
}

}  // namespace ccqed
