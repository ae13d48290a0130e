#include "lapd/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "lapd/neighborhood.hpp"

namespace lapd {

std::string to_string(WeightMode mode) {
  return mode == WeightMode::kOneSided ? "one-sided" : "two-sided";
}

WeightMode parse_weight_mode(const std::string& text) {
  if (text == "one-sided" || text == "one_sided") return WeightMode::kOneSided;
  if (text == "two-sided" || text == "two_sided") return WeightMode::kTwoSided;
  throw Error("params", "unknown weight mode '" + text + "'");
}

PointCloud::PointCloud(Matrix c, std::optional<std::vector<int>> t)
    : coords(std::move(c)), truth(std::move(t)) {
  if (truth && truth->size() != static_cast<std::size_t>(coords.rows()))
    throw Error("datasets", "label count does not match point count");
}

Simplex::Simplex(std::vector<Index> vertices) : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
    throw Error("simplex", "simplex vertices must be distinct");
}

double default_q(int d) { return 1.0 / (1.25 + 0.15 * (d - 2)); }

int default_kappa(Index n) {
  return std::max(1, static_cast<int>(std::ceil(10.0 * std::log(static_cast<double>(n)))));
}

namespace {

void validate(const Params& p) {
  if (p.d < 1) throw Error("params", "intrinsic dimension d must be a positive integer");
  if (p.d > kMaxIntrinsicDim)
    throw Error("params", "intrinsic dimension d above " + std::to_string(kMaxIntrinsicDim) + " is not supported");
  if (p.tau && *p.tau < 0.0) throw Error("params", "tau must be non-negative");
  if (p.e && !(*p.e > 0.0)) throw Error("params", "e must be positive");
  if (p.q && !(*p.q > 0.0 && *p.q < 1.0)) throw Error("params", "q must lie in (0,1)");
  if (p.r0 && !(*p.r0 >= 0.0 && *p.r0 <= 1.0)) throw Error("params", "r0 must lie in [0,1]");
  if (p.B && *p.B < p.d) throw Error("params", "B must be at least d");
  if (p.kappa && *p.kappa < 1) throw Error("params", "kappa must be at least 1");
  if (p.k && *p.k < 2) throw Error("params", "k must be at least 2");
  if (p.m && *p.m < 1) throw Error("params", "m must be at least 1");
  if (p.delta && !(*p.delta > 0.0)) throw Error("params", "delta must be positive");
  if (p.nu && !(*p.nu >= 0.0 && *p.nu < 1.0)) throw Error("params", "nu must lie in [0,1)");
}

Params fill_defaults(Params p, Index n) {
  if (!p.q) p.q = default_q(p.d);
  if (!p.r0) p.r0 = 0.0;
  if (!p.B) p.B = 25;
  if (!p.kappa) p.kappa = default_kappa(n);
  if (!p.k) p.k = 100;
  if (!p.delta) p.delta = 1e-8;
  if (!p.nu) p.nu = 0.01;
  validate(p);
  return p;
}

}  // namespace

Params resolve_params(const Params& user, Index n) {
  validate(user);
  Params p = user;
  if (!p.e) {
    if (!p.tau || *p.tau == 0.0)
      throw Error("params",
                  "no edge length: supply e, or a positive tau (estimating tau is not supported)");
    p.e = std::sqrt(2.0) * *p.tau;
  }
  return fill_defaults(p, n);
}

Params resolve_params(const Params& user, const PointCloud& cloud) {
  validate(user);
  Params p = user;
  if (!p.e) {
    if (p.tau && *p.tau > 0.0) {
      p.e = std::sqrt(2.0) * *p.tau;
    } else {
      const Index rank = fallback_rank(p.d, p.q.value_or(default_q(p.d)), p.B.value_or(25), cloud.size());
      const double med = median_nn_distance(cloud, rank);
      if (!(med > 0.0)) throw Error("params", "cannot derive e: median neighbour distance is 0");
      p.e = med;
    }
  }
  return fill_defaults(p, cloud.size());
}

Index fallback_rank(int d, double q, int B, Index n) {
  // Points within radius e scale like e^d, so the band [e, e/q] holds about
  // (q^-d - 1) times as many as the ball of radius e. Aim for B in the band.
  const double growth = std::pow(q, -d) - 1.0;
  const double want = std::ceil(B / growth);
  // Keep the scale local on small clouds: at most an eighth of the data.
  const double cap = std::max(1.0, std::floor(static_cast<double>(n) / 8.0));
  return static_cast<Index>(std::clamp(want, 1.0, cap));
}

double median_nn_distance(const PointCloud& cloud, Index rank) {
  const Index n = cloud.size();
  if (n < 2) throw Error("params", "need at least two points for a nearest-neighbour scale");
  if (rank < 1 || rank >= n) throw Error("params", "neighbour rank must lie in [1, n-1]");
  const KdTree tree(cloud.coords);
  std::vector<double> nn(n);
  for (Index i = 0; i < n; ++i) {
    const std::span<const double> q(cloud.coords.data() + static_cast<std::ptrdiff_t>(i) * cloud.dim(),
                                    static_cast<std::size_t>(cloud.dim()));
    nn[i] = std::sqrt(tree.nearest(q, static_cast<int>(rank), -1.0, i).back().sq_dist);
  }
  const auto mid = nn.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(nn.begin(), mid, nn.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(nn.begin(), mid);
  return 0.5 * (lower + upper);
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw Error("params", "bad value for '" + key + "': " + text);
  return value;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_params(std::ostream& out, const Params& p) {
  out << "d = " << p.d << '\n';
  auto put = [&](const char* key, const auto& opt) {
    if (!opt) return;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(*opt)>>)
      out << key << " = " << format_double(*opt) << '\n';
    else
      out << key << " = " << *opt << '\n';
  };
  put("tau", p.tau);
  put("e", p.e);
  put("q", p.q);
  put("r0", p.r0);
  put("B", p.B);
  put("kappa", p.kappa);
  put("eta", p.eta);
  put("k", p.k);
  put("m", p.m);
  out << "weight_mode = " << to_string(p.weight_mode) << '\n';
  put("delta", p.delta);
  put("nu", p.nu);
  out << "seed = " << p.seed << '\n';
}

Params read_params(std::istream& in) {
  Params p;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("params", "expected 'key = value': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "d") p.d = parse_number<int>(key, value);
    else if (key == "tau") p.tau = parse_number<double>(key, value);
    else if (key == "e") p.e = parse_number<double>(key, value);
    else if (key == "q") p.q = parse_number<double>(key, value);
    else if (key == "r0") p.r0 = parse_number<double>(key, value);
    else if (key == "B") p.B = parse_number<int>(key, value);
    else if (key == "kappa") p.kappa = parse_number<int>(key, value);
    else if (key == "eta") { if (value != "auto") p.eta = parse_number<double>(key, value); }
    else if (key == "k") p.k = parse_number<int>(key, value);
    else if (key == "m") { if (value != "auto") p.m = parse_number<int>(key, value); }
    else if (key == "weight_mode") p.weight_mode = parse_weight_mode(value);
    else if (key == "delta") p.delta = parse_number<double>(key, value);
    else if (key == "nu") p.nu = parse_number<double>(key, value);
    else if (key == "seed") p.seed = parse_number<std::uint64_t>(key, value);
    else throw Error("params", "unknown key '" + key + "'");
  }
  return p;
}

}  // namespace lapd
