#pragma once

#include <atomic>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "xyent/version.hpp"

namespace xyent {

/// Fixed run-to-run stable number format: 17 significant digits, '.' decimal.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// "start:stop:count" (count evenly spaced points, endpoints included) or a
/// comma-separated list of numbers and such ranges.
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    if (item.empty()) throw std::invalid_argument("empty grid item in '" + text + "'");
    const std::size_t c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(std::stod(item));
    } else {
      const std::size_t c2 = item.find(':', c1 + 1);
      if (c2 == std::string::npos)
        throw std::invalid_argument("grid item '" + item + "' must be start:stop:count");
      const double a = std::stod(item.substr(0, c1));
      const double b = std::stod(item.substr(c1 + 1, c2 - c1 - 1));
      const long n = std::stol(item.substr(c2 + 1));
      if (n < 1) throw std::invalid_argument("grid count must be >= 1 in '" + item + "'");
      if (n == 1) {
        out.push_back(a);
      } else {
        for (long i = 0; i < n; ++i) out.push_back(a + (b - a) * double(i) / double(n - 1));
      }
    }
    pos = comma + 1;
  }
  return out;
}

/// Metadata written alongside every output file as <output>.manifest.json.
struct RunManifest {
  std::string subcommand;
  nlohmann::json parameters;
  double duration_seconds = 0.0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["version"] = version;
    j["parameters"] = parameters;
    j["duration_seconds"] = duration_seconds;
    j["warnings"] = warnings;
    return j;
  }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Ordered parallel map: f(i) fills slot i; output order never depends on
/// completion order.
template <typename F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int nw = std::min(threads, n);
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace xyent
