#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

namespace xyent {

enum class Side { Left, Right };

/// Constant tail of a two-sided chain: coupling J and on-site field v for
/// every site beyond the modification window.
struct TailParams {
  double J = 1.0;
  double v = 0.0;
};

/// Per-site override inside the window. J_x is the bond coupling between
/// sites x and x+1, v_x the field at site x.
struct SiteParams {
  double J = 1.0;
  double v = 0.0;
};

/// Physical description of an open chain: a center block [-N, N] coupled at
/// its two boundary bonds to half-infinite leads that are eventually
/// constant. The left/right lead is initially at inverse temperature
/// beta_l / beta_r; the center is at infinite temperature.
struct ChainSpec {
  int center_halfwidth = 0;  // N >= 0, center block is [-N, N]
  std::map<int, SiteParams> window;
  TailParams left_tail;
  TailParams right_tail;
  double beta_l = 0.0;
  double beta_r = 0.0;

  /// Bond coupling J_x between sites x and x+1.
  double coupling(int x) const {
    auto it = window.find(x);
    if (it != window.end()) return it->second.J;
    return background(x).J;
  }

  /// On-site field v_x.
  double field(int x) const {
    auto it = window.find(x);
    if (it != window.end()) return it->second.v;
    return background(x).v;
  }

  /// First site index at or left of which everything is pure left tail.
  int modification_min() const {
    int m = std::min(0, -center_halfwidth - 1);
    if (!window.empty()) m = std::min(m, window.begin()->first);
    return m;
  }

  /// Last site index at or right of which everything is pure right tail.
  int modification_max() const {
    int m = std::max(0, center_halfwidth + 1);
    if (!window.empty()) m = std::max(m, window.rbegin()->first);
    return m;
  }

  void validate() const {
    const int N = center_halfwidth;
    if (N < 0) throw std::invalid_argument("chain spec: center_halfwidth must be >= 0");
    auto chk = [](double x, const char* what) {
      if (!std::isfinite(x))
        throw std::invalid_argument(std::string("chain spec: non-finite ") + what);
    };
    chk(beta_l, "beta_l");
    chk(beta_r, "beta_r");
    chk(left_tail.J, "left tail J");
    chk(left_tail.v, "left tail v");
    chk(right_tail.J, "right tail J");
    chk(right_tail.v, "right tail v");
    for (const auto& [x, p] : window) {
      chk(p.J, ("window J at site " + std::to_string(x)).c_str());
      chk(p.v, ("window v at site " + std::to_string(x)).c_str());
    }
    if (left_tail.J == 0.0) throw std::invalid_argument("chain spec: zero left tail coupling");
    if (right_tail.J == 0.0) throw std::invalid_argument("chain spec: zero right tail coupling");
    if (coupling(-N - 1) == 0.0)
      throw std::invalid_argument("chain spec: zero boundary coupling J_{-N-1}");
    if (coupling(N) == 0.0)
      throw std::invalid_argument("chain spec: zero boundary coupling J_N");
  }

 private:
  // Background for sites not covered by the window. Sites left of the window
  // (and the negative half-line when the window straddles or is empty) take
  // the left tail; symmetrically on the right. Gaps inside the window span
  // split at 0.
  const TailParams& background(int x) const {
    if (window.empty()) return x < 0 ? left_tail : right_tail;
    const int lo = window.begin()->first;
    const int hi = window.rbegin()->first;
    if (x < lo) return left_tail;
    if (x > hi) return right_tail;
    return x < 0 ? left_tail : right_tail;
  }
};

/// Dense one-particle matrices of the chain truncated to [-M, M] with
/// Dirichlet ends. Global site x maps to storage row/column x + M.
struct FiniteChain {
  int M = 0;
  int N = 0;
  double beta_l = 0.0;
  double beta_r = 0.0;
  Eigen::MatrixXd h;          // full Jacobi restriction
  Eigen::MatrixXd h0;         // decoupled h_l + h_c + h_r
  Eigen::MatrixXd vcoupling;  // the two boundary bonds, h - h0
  Eigen::MatrixXd k;          // -beta_l h_l - beta_r h_r

  int dim() const { return 2 * M + 1; }
  /// Global site index in [-M, M] -> 0-based storage index.
  int idx(int x) const { return x + M; }
};

inline FiniteChain build_finite_chain(const ChainSpec& spec, int M) {
  const int N = spec.center_halfwidth;
  if (M < N + 1) throw std::invalid_argument("build_finite_chain: truncation M too small (need M >= N+1)");
  if (!spec.window.empty() &&
      (spec.window.begin()->first < -M || spec.window.rbegin()->first > M))
    throw std::invalid_argument("build_finite_chain: window does not fit inside [-M, M]");

  FiniteChain c;
  c.M = M;
  c.N = N;
  c.beta_l = spec.beta_l;
  c.beta_r = spec.beta_r;
  const int n = c.dim();
  c.h = Eigen::MatrixXd::Zero(n, n);
  for (int x = -M; x <= M; ++x) c.h(c.idx(x), c.idx(x)) = spec.field(x);
  for (int x = -M; x < M; ++x) {
    const double J = spec.coupling(x);
    c.h(c.idx(x), c.idx(x + 1)) = J;
    c.h(c.idx(x + 1), c.idx(x)) = J;
  }

  c.h0 = c.h;
  c.h0(c.idx(-N - 1), c.idx(-N)) = 0.0;
  c.h0(c.idx(-N), c.idx(-N - 1)) = 0.0;
  c.h0(c.idx(N), c.idx(N + 1)) = 0.0;
  c.h0(c.idx(N + 1), c.idx(N)) = 0.0;
  c.vcoupling = c.h - c.h0;

  c.k = Eigen::MatrixXd::Zero(n, n);
  const int nl = c.idx(-N - 1) + 1;       // sites [-M, -N-1]
  const int r0 = c.idx(N + 1);            // sites [N+1, M]
  c.k.topLeftCorner(nl, nl) = -spec.beta_l * c.h0.topLeftCorner(nl, nl);
  c.k.bottomRightCorner(n - r0, n - r0) = -spec.beta_r * c.h0.bottomRightCorner(n - r0, n - r0);
  return c;
}

/// Parse and validate a chain spec file (JSON; unknown keys rejected).
inline ChainSpec parse_chain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain spec file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("chain spec parse error in " + path + ": " + e.what());
  }

  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("chain spec error in " + path + ": " + msg);
  };
  if (!j.is_object()) fail("top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "center_halfwidth" && key != "window" && key != "left_tail" &&
        key != "right_tail" && key != "beta_l" && key != "beta_r")
      fail("unknown key '" + key + "'");
  }
  for (const char* key : {"center_halfwidth", "window", "left_tail", "right_tail", "beta_l", "beta_r"})
    if (!j.contains(key)) fail(std::string("missing key '") + key + "'");

  auto parse_tail = [&](const nlohmann::json& t, const char* name) {
    if (!t.is_object()) fail(std::string(name) + " must be an object");
    for (const auto& [key, _] : t.items())
      if (key != "J" && key != "v") fail(std::string("unknown key '") + key + "' in " + name);
    if (!t.contains("J") || !t.contains("v")) fail(std::string(name) + " needs keys J and v");
    return TailParams{t.at("J").get<double>(), t.at("v").get<double>()};
  };

  ChainSpec s;
  s.center_halfwidth = j.at("center_halfwidth").get<int>();
  s.left_tail = parse_tail(j.at("left_tail"), "left_tail");
  s.right_tail = parse_tail(j.at("right_tail"), "right_tail");
  s.beta_l = j.at("beta_l").get<double>();
  s.beta_r = j.at("beta_r").get<double>();

  const auto& w = j.at("window");
  if (!w.is_object()) fail("window must be an object");
  for (const auto& [key, val] : w.items()) {
    std::size_t pos = 0;
    int site = 0;
    try {
      site = std::stoi(key, &pos);
    } catch (...) {
      fail("window key '" + key + "' is not a site index");
    }
    if (pos != key.size()) fail("window key '" + key + "' is not a site index");
    if (!val.is_object()) fail("window entry '" + key + "' must be an object");
    for (const auto& [ek, _] : val.items())
      if (ek != "J" && ek != "v") fail("unknown key '" + ek + "' in window entry '" + key + "'");
    if (!val.contains("J") || !val.contains("v")) fail("window entry '" + key + "' needs keys J and v");
    s.window[site] = SiteParams{val.at("J").get<double>(), val.at("v").get<double>()};
  }

  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("chain spec validation error in " + path + ": " + e.what());
  }
  return s;
}

}  // namespace xyent
