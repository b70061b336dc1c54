#pragma once

// Flat key=value experiment configuration. Every key has a default; files and
// overrides may only set known keys. Outputs are stamped with the resolved
// values and an FNV-1a hash of them.

#include "locmin/types.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace locmin {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Config {
 public:
  // Keys left out of the hash: they name where results go, not what they are.
  static constexpr std::string_view kUnhashed = "out";

  static Config defaults() {
    Config c;
    c.values_ = {
        {"experiment", "default"},
        {"seed", "1"},
        {"out", "results"},
        // sinusoid benchmark
        {"sigma", "1"},
        {"theta0", "9.42477796076938"},
        {"resolution", "4001"},
        {"noise_free", "false"},
        // Monte-Carlo trials
        {"trials", "2000"},
        {"bootstrap_B", "1000"},
        {"gap_B", "200"},
        {"alphas", "0.05,0.1"},
        {"threshold", "asymptotic"},
        {"start", "uniform"},
        {"relaxations", "learned,naive:1,naive:3"},
        {"direction_file", ""},
        {"label_tol", "0.001"},
        {"oracle_resolution", "4001"},
        {"min_spurious", "50"},
        // relaxation discovery
        {"nominal_count", "100"},
        {"start_count", "64"},
        {"discovery_start", "grid"},
        {"mismatch_tol", "0.001"},
        {"dims", "1"},
        // optimizer
        {"tol", "1e-8"},
        {"max_iter", "500"},
        {"memory", "10"},
        // wavefront optics
        {"tau", "0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.2"},
        {"modes", "12"},
        {"grid_size", "64"},
        {"oversampling", "2"},
        {"shell_points", "32"},
        {"bound_trials", "100"},
        {"bound_tau", "0.2"},
        {"bound_screen_rms", "0.1"},
        {"psf_dump", "true"},
        {"toy", "true"},
        {"toy_grid", "16"},
        {"toy_modes", "6"},
        {"toy_flux", "1000"},
        {"toy_rms", "0.3"},
        {"toy_tau", "0.2"},
        {"toy_shell_points", "32"},
        {"toy_restarts", "20"},
        {"toy_alpha", "0.01"},
        {"toy_gap_B", "50"},
        {"toy_max_step", "0.1"},
        {"toy_sigma", "0.01"},
        {"toy_tol", "1e-4"},
    };
    return c;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    if (!has(key)) throw InvalidInput("unknown config key '" + key + "'");
    values_[key] = value;
  }

  // "key=value"
  void set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidInput("expected key=value, got '" + std::string(assignment) + "'");
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  void load(std::istream& in, const std::string& origin = "config") {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
      if (body.empty()) continue;
      try {
        set_assignment(body);
      } catch (const InvalidInput& e) {
        throw InvalidInput(origin + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file '" + path + "'");
    load(in, path);
  }

  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw InvalidInput("unknown config key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key) const { return parse_double(key, get(key)); }

  long long get_int(const std::string& key) const {
    const std::string& v = get(key);
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw InvalidInput("config key '" + key + "': '" + v + "' is not an integer");
    }
    return out;
  }

  long long get_count(const std::string& key, long long min_value = 1) const {
    const long long v = get_int(key);
    if (v < min_value) {
      throw InvalidInput("config key '" + key + "' must be >= " + std::to_string(min_value));
    }
    return v;
  }

  std::uint64_t get_u64(const std::string& key) const {
    const std::string& v = get(key);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw InvalidInput("config key '" + key + "': '" + v + "' is not an unsigned integer");
    }
    return out;
  }

  bool get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidInput("config key '" + key + "': '" + v + "' is not a boolean");
  }

  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(get(key), ',')) out.push_back(parse_double(key, item));
    return out;
  }

  std::vector<std::string> get_words(const std::string& key) const {
    std::vector<std::string> out;
    if (trim(get(key)).empty()) return out;
    for (auto& item : split(get(key), ',')) out.push_back(std::move(item));
    return out;
  }

  std::uint64_t hash() const {
    std::string canon;
    for (const auto& [k, v] : values_) {
      if (k == kUnhashed) continue;
      canon += k + "=" + v + "\n";
    }
    return fnv1a(canon);
  }

  std::string hash_hex() const {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << hash();
    return os.str();
  }

  // Comment block heading every output file.
  std::string stamp(std::string_view command) const {
    std::string s = "# locmin " + std::string(command) + "\n";
    s += "# config_hash=" + hash_hex() + "\n";
    s += "# seed=" + get("seed") + "\n";
    for (const auto& [k, v] : values_) {
      if (k == kUnhashed) continue;
      s += "# " + k + "=" + v + "\n";
    }
    return s;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw InvalidInput("config key '" + key + "': '" + v + "' is not a number");
    }
    return out;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace locmin
