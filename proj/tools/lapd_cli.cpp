// Command-line front end: generate | cluster | eval | diagnose.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lapd/datasets.hpp"
#include "lapd/eval.hpp"
#include "lapd/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lapd;

namespace {

constexpr const char* kVersion = "1.0.0";

/// Raised for bad invocations; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

template <class T>
json maybe(const std::optional<T>& v) {
  if (!v) return "auto";
  if constexpr (std::is_floating_point_v<T>) return number(*v);
  else return *v;
}

json to_json(const Params& p) {
  return {{"d", p.d},         {"tau", maybe(p.tau)},  {"e", maybe(p.e)},         {"q", maybe(p.q)},
          {"r0", maybe(p.r0)}, {"B", maybe(p.B)},      {"kappa", maybe(p.kappa)}, {"eta", maybe(p.eta)},
          {"k", maybe(p.k)},   {"m", maybe(p.m)},      {"weight_mode", to_string(p.weight_mode)},
          {"delta", maybe(p.delta)}, {"nu", maybe(p.nu)}, {"seed", p.seed}};
}

json to_json(const ShapeSpec& s) {
  return {{"kind", to_string(s.kind)}, {"d", s.d},         {"D", s.D},         {"n", s.n},
          {"theta", s.theta},          {"sigma", s.sigma}, {"seed", s.seed}};
}

json to_json(const GapReport& g) {
  json pure = json::object();
  for (const auto& [cls, count] : g.pure_counts) pure[std::to_string(cls)] = count;
  return {{"wlapd", number(g.wlapd)},
          {"wlapd_connected", number(g.wlapd_connected)},
          {"blapd", number(g.blapd)},
          {"pure_counts", pure},
          {"mixed_count", g.mixed_count},
          {"excluded_classes", g.excluded_classes}};
}

json timings_json(const std::vector<StageTiming>& timings) {
  json t = json::object();
  for (const auto& s : timings) t[s.stage] = s.ms;
  return t;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("io", "failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("io", "cannot create directory " + dir.string());
}

std::string joined(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

/// Options shared by `cluster` and `diagnose`.
struct ParamFlags {
  std::optional<int> d;
  std::optional<double> tau, e, q, r0, eta, delta, nu;
  std::optional<int> B, kappa, k, m;
  std::string weight_mode = "one-sided";
  std::uint64_t seed = 0;
  int threads = 0;

  void attach(CLI::App& app) {
    app.add_option("--d", d, "intrinsic dimension (required)");
    app.add_option("--tau", tau, "noise level; e defaults to sqrt(2) tau");
    app.add_option("--e", e, "edge length, overrides the tau-based default");
    app.add_option("--q", q, "edge ratio lower bound");
    app.add_option("--r0", r0, "volume ratio lower bound (0 disables)");
    app.add_option("--B", B, "neighbours per point in the annulus");
    app.add_option("--kappa", kappa, "kappa for the kappa-NN denoising distance");
    app.add_option("--eta", eta, "denoising threshold (default: elbow)");
    app.add_option("--k", k, "number of persistence scales");
    app.add_option("--m", m, "number of clusters (default: estimated)");
    app.add_option("--weight-mode", weight_mode, "one-sided or two-sided")
        ->check(CLI::IsMember({"one-sided", "two-sided"}));
    app.add_option("--delta", delta, "smallest edge weight");
    app.add_option("--nu", nu, "trivial component fraction");
    app.add_option("--seed", seed, "seed recorded with the run");
    app.add_option("--threads", threads, "worker threads, 0 = hardware count")->check(CLI::NonNegativeNumber);
  }

  Params params() const {
    if (!d)
      throw UsageError("--d is required: intrinsic dimension estimation is out of scope, supply it explicitly");
    if (!tau && !e)
      throw UsageError(
          "supply --tau or --e: noise level estimation is out of scope (use --tau 0 for the nearest-neighbour "
          "edge length)");
    Params p;
    p.d = *d;
    p.tau = tau;
    p.e = e;
    p.q = q;
    p.r0 = r0;
    p.B = B;
    p.kappa = kappa;
    p.eta = eta;
    p.k = k;
    p.m = m;
    p.weight_mode = parse_weight_mode(weight_mode);
    p.delta = delta;
    p.nu = nu;
    p.seed = seed;
    return p;
  }
};

std::vector<double> quantiles(std::vector<double> values, const std::vector<double>& at) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double a : at) {
    if (values.empty()) {
      out.push_back(kInfinity);
      continue;
    }
    const auto idx = static_cast<std::size_t>(std::llround(a * static_cast<double>(values.size() - 1)));
    out.push_back(values[idx]);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LAPD multi-manifold clustering"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "sample a synthetic benchmark");
  std::string kind = "hypercubes";
  ShapeSpec spec;
  fs::path gen_out;
  gen->add_option("--kind", kind, "hypercubes, spheres, dollar_sign or three_planes");
  gen->add_option("--d", spec.d, "intrinsic dimension")->required();
  gen->add_option("--D", spec.D, "ambient dimension")->required();
  gen->add_option("--n", spec.n, "number of points")->required();
  gen->add_option("--theta", spec.theta, "intersection angle in radians (hypercubes)");
  gen->add_option("--sigma", spec.sigma, "noise scale; tau = sqrt(3) sigma");
  gen->add_option("--seed", spec.seed, "random seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  // cluster
  auto* clu = app.add_subcommand("cluster", "run the clustering pipeline");
  fs::path clu_points, clu_labels, clu_out;
  ParamFlags clu_flags;
  clu->add_option("--points", clu_points, "CSV of points, one row per point")->required();
  clu->add_option("--labels", clu_labels, "optional truth labels for gap diagnostics");
  clu->add_option("--out", clu_out, "output directory")->required();
  clu_flags.attach(*clu);

  // eval
  auto* ev = app.add_subcommand("eval", "accuracy of predicted labels");
  fs::path ev_pred, ev_truth, ev_manifest;
  ev->add_option("--pred", ev_pred, "predicted labels")->required();
  ev->add_option("--truth", ev_truth, "truth labels")->required();
  ev->add_option("--manifest", ev_manifest, "manifest to record the accuracy in");

  // diagnose
  auto* dia = app.add_subcommand("diagnose", "LAPD gap report against truth labels");
  fs::path dia_points, dia_labels, dia_out;
  ParamFlags dia_flags;
  dia->add_option("--points", dia_points, "CSV of points")->required();
  dia->add_option("--labels", dia_labels, "truth labels")->required();
  dia->add_option("--out", dia_out, "write the report here instead of stdout");
  dia_flags.attach(*dia);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      spec.kind = parse_shape_kind(kind);
      const PointCloud cloud = generate(spec);
      ensure_dir(gen_out);
      save_csv(cloud, gen_out / "points.csv");
      save_labels(*cloud.truth, gen_out / "labels.txt");
      write_json(gen_out / "manifest.json", {{"command", "generate"},
                                             {"argv", joined(argc, argv)},
                                             {"version", kVersion},
                                             {"shape", to_json(spec)},
                                             {"seed", spec.seed},
                                             {"outputs", {"points.csv", "labels.txt"}}});
      std::printf("wrote %lld points in R^%d to %s\n", static_cast<long long>(cloud.size()), spec.D,
                  gen_out.string().c_str());
      return 0;
    }

    if (*clu) {
      const Params user = clu_flags.params();
      set_thread_count(clu_flags.threads);
      const PointCloud cloud = load_csv(clu_points, clu_labels);
      const ClusterResult r = run(cloud, user);

      json result = {{"point_labels", r.point_labels},
                     {"simplex_count", r.simplex_count},
                     {"survivors", r.survivors.size()},
                     {"m_hat", r.m_hat},
                     {"m_selected", r.m_selected},
                     {"m_estimated", r.m_estimated},
                     {"cut_exact", r.cut_exact},
                     {"eta", number(r.eta)},
                     {"eta_estimated", r.eta_estimated},
                     {"scale_counts", r.profile.counts},
                     {"params", to_json(r.params)}};
      if (r.gap_before) result["gap_before"] = to_json(*r.gap_before);
      if (r.gap_after) {
        result["gap_after"] = to_json(*r.gap_after);
        result["wlapd"] = number(r.gap_after->wlapd);
        result["blapd"] = number(r.gap_after->blapd);
      }
      ensure_dir(clu_out);
      write_json(clu_out / "result.json", result);
      save_labels(r.point_labels, clu_out / "labels.txt");
      // Wall-clock figures vary run to run, so they go in the manifest only.
      write_json(clu_out / "manifest.json", {{"command", "cluster"},
                                             {"argv", joined(argc, argv)},
                                             {"version", kVersion},
                                             {"points", fs::absolute(clu_points).string()},
                                             {"labels", clu_labels.empty() ? "" : fs::absolute(clu_labels).string()},
                                             {"params", to_json(r.params)},
                                             {"seed", r.params.seed},
                                             {"threads", clu_flags.threads},
                                             {"runtime_ms", timings_json(r.timings)},
                                             {"outputs", {"result.json", "labels.txt"}}});
      std::printf("m_hat %d, %zu of %zu simplices survive denoising (eta %s)\n", r.m_hat, r.survivors.size(),
                  r.simplex_count, number(r.eta).dump().c_str());
      for (const auto& t : r.timings) std::printf("  %-12s %10.1f ms\n", t.stage.c_str(), t.ms);
      return 0;
    }

    if (*ev) {
      const auto pred = load_labels(ev_pred);
      const auto truth = load_labels(ev_truth);
      if (pred.size() != truth.size())
        throw Error("eval", "label files differ in length (" + std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
      const double acc = accuracy(pred, truth);
      std::printf("%.4f\n", acc);
      if (!ev_manifest.empty()) {
        json doc = json::object();
        if (fs::exists(ev_manifest)) {
          std::ifstream in(ev_manifest);
          doc = json::parse(in);
        }
        doc["accuracy"] = acc;
        doc["accuracy_inputs"] = {fs::absolute(ev_pred).string(), fs::absolute(ev_truth).string()};
        write_json(ev_manifest, doc);
      }
      return 0;
    }

    if (*dia) {
      const Params user = dia_flags.params();
      set_thread_count(dia_flags.threads);
      const PointCloud cloud = load_csv(dia_points, dia_labels);
      const ClusterResult r = run(cloud, user);
      const std::vector<double> at{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
      const auto qs = quantiles(r.knn, at);
      json knn = json::object();
      for (std::size_t i = 0; i < at.size(); ++i) {
        char key[16];
        std::snprintf(key, sizeof key, "q%02d", static_cast<int>(std::lround(at[i] * 100)));
        knn[key] = number(qs[i]);
      }
      const json report = {{"before", to_json(*r.gap_before)},
                           {"after", to_json(*r.gap_after)},
                           {"eta", number(r.eta)},
                           {"eta_estimated", r.eta_estimated},
                           {"kappa", *r.params.kappa},
                           {"knn_quantiles", knn},
                           {"simplex_count", r.simplex_count},
                           {"survivors", r.survivors.size()},
                           {"params", to_json(r.params)}};
      if (dia_out.empty()) std::cout << report.dump(2) << '\n';
      else write_json(dia_out, report);
      return 0;
    }
  } catch (const UsageError& ex) {
    std::fprintf(stderr, "usage error: %s\n", ex.what());
    return 2;
  } catch (const Error& ex) {
    std::fprintf(stderr, "error in stage '%s': %s\n", ex.stage().c_str(), ex.what());
    return 1;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
