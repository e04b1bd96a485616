// Batch front-end: weight analysis, sampling, walks, resistance diagnostics,
// and the exact verification suite. One verb per pipeline stage; every run
// can be reproduced byte-for-byte from its emitted config.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "bpm/bdg.hpp"
#include "bpm/errors.hpp"
#include "bpm/oracle.hpp"
#include "bpm/psi.hpp"
#include "bpm/resistance.hpp"
#include "bpm/samplers.hpp"
#include "bpm/walk.hpp"
#include "bpm/weights.hpp"

namespace {

constexpr const char* kVersion = "bpm 0.3.0";

using nlohmann::json;

struct RunConfig {
  std::string command;
  json weights;
  std::uint64_t seed = 1;
  long count = 1;
  long n = 10;
  long radius = 8;
  long steps = 1024;
  long walkers = 256;
  long maps = 8;
  long fit_lo = 8, fit_hi = 128;
  double lambda = 8.0;
  std::vector<long> R_list = {4, 8, 16};
  long spine_budget = 64;
  long window = 8;
  std::string out_dir;
  std::string format = "json";

  static RunConfig from_json(const json& j) {
    RunConfig c;
    c.command = j.value("command", "");
    if (j.contains("weights")) c.weights = j.at("weights");
    c.seed = j.value("seed", std::uint64_t{1});
    c.count = j.value("count", 1L);
    c.n = j.value("n", 10L);
    c.radius = j.value("radius", 8L);
    c.steps = j.value("steps", 1024L);
    c.walkers = j.value("walkers", 256L);
    c.maps = j.value("maps", 8L);
    if (j.contains("fit_window")) {
      c.fit_lo = j.at("fit_window").at(0).get<long>();
      c.fit_hi = j.at("fit_window").at(1).get<long>();
    }
    c.lambda = j.value("lambda", 8.0);
    if (j.contains("R_list")) c.R_list = j.at("R_list").get<std::vector<long>>();
    c.spine_budget = j.value("spine_budget", 64L);
    c.window = j.value("window", 8L);
    c.out_dir = j.value("out", std::string{});
    c.format = j.value("format", std::string{"json"});
    return c;
  }

  json to_json() const {
    json j;
    j["command"] = command;
    if (!weights.is_null()) j["weights"] = weights;
    j["seed"] = seed;
    j["count"] = count;
    j["n"] = n;
    j["radius"] = radius;
    j["steps"] = steps;
    j["walkers"] = walkers;
    j["maps"] = maps;
    j["fit_window"] = {fit_lo, fit_hi};
    j["lambda"] = lambda;
    j["R_list"] = R_list;
    j["spine_budget"] = spine_budget;
    j["window"] = window;
    if (!out_dir.empty()) j["out"] = out_dir;
    j["format"] = format;
    return j;
  }
};

bpm::weights::WeightPackage package_from(const RunConfig& cfg) {
  if (cfg.weights.is_null()) throw bpm::ConfigError("missing /weights in config");
  const auto fw = bpm::weights::FaceWeights::from_json(cfg.weights.dump());
  return bpm::weights::make_package(fw);
}

// Output sink: file in --out (with emitted config beside it) or stdout.
struct Sink {
  std::ofstream file;
  bool to_file = false;

  explicit Sink(const RunConfig& cfg, const std::string& name) {
    if (!cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      file.open(std::filesystem::path(cfg.out_dir) / name);
      to_file = true;
      std::ofstream meta(std::filesystem::path(cfg.out_dir) / (name + ".meta.json"));
      json m;
      m["config"] = cfg.to_json();
      m["version"] = kVersion;
      meta << m.dump(2) << "\n";
    }
  }

  std::ostream& out() { return to_file ? static_cast<std::ostream&>(file) : std::cout; }
};

bpm::samplers::LimitOptions limit_options(const RunConfig& cfg) {
  bpm::samplers::LimitOptions opts;
  opts.spine_budget = cfg.spine_budget;
  opts.window_each_side = cfg.window;
  return opts;
}

int cmd_analyze_weights(const RunConfig& cfg) {
  const auto pkg = package_from(cfg);
  Sink sink(cfg, "analysis." + cfg.format);
  if (cfg.format == "tsv") {
    auto& os = sink.out();
    os << "i\tpi_i\n";
    for (long i = 0; i <= 24; ++i) os << i << "\t" << pkg.laws.pi(i) << "\n";
    return 0;
  }
  json j;
  j["radius"] = pkg.analysis.radius;
  j["gamma"] = pkg.analysis.gamma;
  j["tau"] = pkg.analysis.tau;
  j["g_of_tau"] = pkg.analysis.g_of_tau;
  j["kappa"] = pkg.laws.kappa();
  j["kappa_tilde"] = pkg.laws.kappa_tilde();
  j["pi"] = json::array();
  for (long i = 0; i <= 24; ++i) j["pi"].push_back(pkg.laws.pi(i));
  for (int r = 1; r <= 3; ++r) {
    const auto m = pkg.laws.moment(r);
    j["moment_" + std::to_string(r)] = m ? json(*m) : json(nullptr);
  }
  sink.out() << j.dump(2) << "\n";
  return 0;
}

int cmd_sample(const RunConfig& cfg) {
  const auto pkg = package_from(cfg);
  Sink sink(cfg, "samples." + cfg.format);
  for (long k = 0; k < cfg.count; ++k) {
    bpm::RngStream rng(cfg.seed, static_cast<std::uint64_t>(k));
    if (cfg.command == "sample-tree") {
      sink.out() << bpm::trees::serialize(bpm::samplers::sample_sgt_n(pkg, cfg.n, rng)) << "\n";
    } else if (cfg.command == "sample-mobile") {
      sink.out() << bpm::labels::serialize(bpm::samplers::sample_mobile_n(pkg, cfg.n, rng))
                 << "\n";
    } else {
      const auto pm = bpm::samplers::sample_map_n(pkg, cfg.n, rng);
      sink.out() << bpm::bdg::to_json(pm) << "\n";
    }
  }
  return 0;
}

int cmd_limit_ball(const RunConfig& cfg) {
  const auto pkg = package_from(cfg);
  Sink sink(cfg, "balls." + cfg.format);
  for (long k = 0; k < cfg.count; ++k) {
    bpm::RngStream rng(cfg.seed, static_cast<std::uint64_t>(k));
    const auto res =
        bpm::samplers::sample_limit_ball(pkg, cfg.radius, rng, limit_options(cfg));
    json j;
    j["certified_radius"] = res.ball.certified_radius;
    j["map"] = json::parse(bpm::bdg::to_json(res.ball.map));
    sink.out() << j.dump() << "\n";
  }
  return 0;
}

int cmd_walk(const RunConfig& cfg) {
  const auto pkg = package_from(cfg);
  Sink sink(cfg, "walk." + (cfg.format == "tsv" ? std::string("tsv") : std::string("json")));
  // Confined walk on one certified ball per seed; averaged curve.
  std::vector<double> avg;
  long total_walkers = 0;
  for (long k = 0; k < cfg.count; ++k) {
    bpm::RngStream rng(cfg.seed, static_cast<std::uint64_t>(k));
    const auto res =
        bpm::samplers::sample_limit_ball(pkg, cfg.radius, rng, limit_options(cfg));
    std::vector<char> unsafe(res.ball.map.vertex_count(), 0);
    const auto dist = res.ball.map.bfs_distances(res.ball.map.root_vertex());
    for (std::size_t v = 0; v < unsafe.size(); ++v) {
      unsafe[v] = dist[v] > res.ball.certified_radius;
    }
    bpm::RngStream wrng = rng.derive(0xA11CE);
    const auto ws = bpm::walk::run_srw(res.ball.map, unsafe, cfg.steps, cfg.walkers, wrng);
    if (avg.size() < ws.returns_at.size()) avg.resize(ws.returns_at.size(), 0.0);
    for (std::size_t i = 0; i < ws.returns_at.size(); ++i) avg[i] += ws.returns_at[i];
    total_walkers += ws.walkers;
  }
  for (auto& a : avg) a /= total_walkers;
  if (cfg.format == "tsv") {
    sink.out() << "n\tp_hat\tstderr\n";
    for (std::size_t i = 0; i < avg.size(); ++i) {
      const double se = std::sqrt(std::max(0.0, avg[i] * (1 - avg[i]) / total_walkers));
      sink.out() << i << "\t" << avg[i] << "\t" << se << "\n";
    }
  } else {
    json j;
    j["p2n"] = avg;
    j["walkers"] = total_walkers;
    sink.out() << j.dump() << "\n";
  }
  return 0;
}

int cmd_spectral(const RunConfig& cfg) {
  const auto pkg = package_from(cfg);
  if (!pkg.laws.condensation()) {
    throw bpm::ConfigError("spectral-run expects a condensation-phase family (kappa < 1)");
  }
  Sink sink(cfg, "spectral.json");
  std::vector<double> avg;
  std::vector<double> slopes;
  long total_walkers = 0;
  for (long k = 0; k < cfg.maps; ++k) {
    bpm::RngStream rng(cfg.seed, static_cast<std::uint64_t>(k));
    const auto res =
        bpm::samplers::sample_limit_ball(pkg, cfg.radius, rng, limit_options(cfg));
    std::vector<char> unsafe(res.ball.map.vertex_count(), 0);
    const auto dist = res.ball.map.bfs_distances(res.ball.map.root_vertex());
    for (std::size_t v = 0; v < unsafe.size(); ++v) {
      unsafe[v] = dist[v] > res.ball.certified_radius;
    }
    bpm::RngStream wrng = rng.derive(0xA11CE);
    const auto ws = bpm::walk::run_srw(res.ball.map, unsafe, cfg.steps, cfg.walkers, wrng);
    if (avg.size() < ws.returns_at.size()) avg.resize(ws.returns_at.size(), 0.0);
    for (std::size_t i = 0; i < ws.returns_at.size(); ++i) avg[i] += ws.returns_at[i];
    total_walkers += ws.walkers;
    try {
      slopes.push_back(bpm::walk::fit_spectral_dimension(ws, cfg.fit_lo, cfg.fit_hi).ds_estimate);
    } catch (const bpm::Error&) {
      // sparse per-map curve; the ensemble fit still stands
    }
  }
  for (auto& a : avg) a /= total_walkers;
  const auto fit = bpm::walk::fit_spectral_dimension(avg, cfg.fit_lo, cfg.fit_hi);
  json j;
  j["ds"] = fit.ds_estimate;
  j["stderr"] = fit.stderr_;
  j["fit_window"] = {cfg.fit_lo, cfg.fit_hi};
  j["per_map_ds"] = slopes;
  double mean = 0, var = 0;
  for (double s : slopes) mean += s;
  if (!slopes.empty()) mean /= slopes.size();
  for (double s : slopes) var += (s - mean) * (s - mean);
  if (slopes.size() > 1) var /= (slopes.size() - 1);
  j["per_map_ds_mean"] = mean;
  j["per_map_ds_stddev"] = std::sqrt(var);
  j["maps"] = cfg.maps;
  sink.out() << j.dump(2) << "\n";
  return 0;
}

int cmd_resistance(const RunConfig& cfg) {
  const auto pkg = package_from(cfg);
  if (!pkg.laws.condensation()) {
    throw bpm::ConfigError("resistance-run expects a condensation-phase family (kappa < 1)");
  }
  Sink sink(cfg, "resistance.json");
  json runs = json::array();
  const long r_needed = *std::max_element(cfg.R_list.begin(), cfg.R_list.end());
  for (long k = 0; k < cfg.count; ++k) {
    bpm::RngStream rng(cfg.seed, static_cast<std::uint64_t>(k));
    bpm::samplers::LimitSampler sampler(pkg, rng, limit_options(cfg));
    auto trunc = sampler.sample_mobile();
    auto sys = bpm::resist::build_star_system(sampler, trunc, 2 * r_needed + 4,
                                              4 * r_needed + 16);
    json run;
    run["seed_stream"] = k;
    const auto vp = bpm::resist::volume_profile(sys, cfg.R_list);
    run["R"] = vp.R;
    run["omega"] = vp.omega;
    run["ball_dstar"] = vp.ball_dstar;
    run["proxy_warning"] = vp.proxy_warning;
    json jl = json::array();
    for (long R : cfg.R_list) {
      const auto rep = bpm::resist::j_lambda(sys, R, cfg.lambda);
      jl.push_back({{"R", rep.R},
                    {"lambda", rep.lambda},
                    {"vol_lower", rep.vol_lower},
                    {"vol_upper", rep.vol_upper},
                    {"res_lower", rep.res_lower},
                    {"res_point", rep.res_point},
                    {"omega", rep.omega},
                    {"reff_boundary", rep.reff_boundary},
                    {"proxy_warning", rep.proxy_warning}});
    }
    run["j_lambda"] = jl;
    runs.push_back(run);
  }
  json j;
  j["runs"] = runs;
  sink.out() << j.dump(2) << "\n";
  return 0;
}

int cmd_export_dot(const RunConfig& cfg) {
  const auto pkg = package_from(cfg);
  bpm::RngStream rng(cfg.seed, 0);
  const auto pm = bpm::samplers::sample_map_n(pkg, cfg.n, rng);
  Sink sink(cfg, "map.dot");
  sink.out() << bpm::bdg::to_dot(pm);
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  // Exact oracle identities plus a quick statistical law check; exit 4 when
  // anything fails.
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  using bpm::weights::FaceWeights;
  const auto ones = bpm::weights::make_package(FaceWeights::all_ones());
  const auto bimodal = bpm::weights::make_package(
      FaceWeights::finite_w({{2, bpm::Rational(1)}}));

  for (long n = 1; n <= 4; ++n) {
    for (const auto* pkg : {&ones, &bimodal}) {
      bool ok = true;
      try {
        const auto mu = bpm::oracle::exact_mu(pkg->tw, n);
        ok = mu.pipeline.support == mu.direct.support && mu.pipeline.sums_to_one();
        for (std::size_t i = 0; ok && i < mu.pipeline.support.size(); ++i) {
          ok = mu.pipeline.probs[i] == mu.direct.probs[i];
        }
      } catch (const bpm::StructuralError&) {
        ok = true;  // empty support (odd n for the bimodal family)
      }
      check("mu_" + std::to_string(n) + " pipeline == direct", ok);
    }
  }
  for (long n = 1; n <= 5; ++n) {
    const auto push = bpm::oracle::exact_nu_pushforward(ones.tw, n);
    const auto tilde = bpm::oracle::exact_nu_tilde(ones.tw, n);
    bool ok = push.support == tilde.support;
    for (std::size_t i = 0; ok && i < push.probs.size(); ++i) ok = push.probs[i] == tilde.probs[i];
    check("psi pushforward n=" + std::to_string(n), ok);
  }
  {
    bool ok = true;
    for (long r = 1; r <= 8; ++r) {
      ok = ok && (bpm::BigInt(bpm::labels::enumerate_bridges(r).size()) ==
                  bpm::labels::bridge_set_size(r));
    }
    check("bridge counts r<=8", ok);
  }
  {
    // pi_i = 2^{-i-1} for w == 1.
    bool ok = true;
    for (long i = 0; i <= 20; ++i) {
      ok = ok && std::fabs(ones.laws.pi(i) - std::pow(2.0, -static_cast<double>(i) - 1)) < 1e-12;
    }
    check("pi law for w==1", ok);
  }
  {
    bpm::RngStream rng(cfg.seed, 0);
    long hits = 0;
    const long trials = 20000;
    for (long t = 0; t < trials; ++t) hits += (bpm::labels::sample_increment_iid(rng) == -1);
    const double p = static_cast<double>(hits) / trials;
    check("increment law P(-1)=1/2 (3 sigma)", std::fabs(p - 0.5) < 3 * std::sqrt(0.25 / trials));
  }
  return failures == 0 ? 0 : 4;
}

int dispatch(const RunConfig& cfg) {
  if (cfg.command == "analyze-weights") return cmd_analyze_weights(cfg);
  if (cfg.command == "sample-tree" || cfg.command == "sample-mobile" ||
      cfg.command == "sample-map") {
    return cmd_sample(cfg);
  }
  if (cfg.command == "limit-ball") return cmd_limit_ball(cfg);
  if (cfg.command == "walk") return cmd_walk(cfg);
  if (cfg.command == "spectral-run") return cmd_spectral(cfg);
  if (cfg.command == "resistance-run") return cmd_resistance(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "export-dot") return cmd_export_dot(cfg);
  throw bpm::ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random bipartite planar maps: sampling and verification"};
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::string weights_inline;
  RunConfig cfg;
  app.add_option("--config", config_path, "JSON run config");
  app.add_option("--weights", weights_inline, "inline weight family JSON");
  app.add_option("--seed", cfg.seed, "base seed");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--format", cfg.format, "json|tsv|dot");
  app.add_option("--jobs", cfg.maps, "worker count hint (sampling is stream-parallel)")
      ->group("");
  app.add_option("--n", cfg.n, "edge count for finite samplers");
  app.add_option("--count", cfg.count, "number of samples");
  app.add_option("--radius", cfg.radius, "ball radius");
  app.add_option("--steps", cfg.steps, "walk steps");
  app.add_option("--walkers", cfg.walkers, "walkers per map");
  app.add_option("--maps", cfg.maps, "ensemble size");
  app.add_option("--lambda", cfg.lambda, "J(lambda) parameter");

  std::vector<std::string> commands = {"analyze-weights", "sample-tree", "sample-mobile",
                                       "sample-map",      "limit-ball",  "walk",
                                       "spectral-run",    "resistance-run", "verify",
                                       "export-dot"};
  std::string command;
  app.add_option("command", command, "one of: analyze-weights sample-tree sample-mobile "
                                     "sample-map limit-ball walk spectral-run "
                                     "resistance-run verify export-dot");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw bpm::ConfigError("cannot open config " + config_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const std::exception& e) {
        throw bpm::ConfigError(std::string("config: ") + e.what());
      }
      RunConfig file_cfg = RunConfig::from_json(j);
      if (!command.empty()) file_cfg.command = command;
      if (cfg.seed != 1) file_cfg.seed = cfg.seed;
      if (!cfg.out_dir.empty()) file_cfg.out_dir = cfg.out_dir;
      cfg = file_cfg;
    } else {
      cfg.command = command;
      if (!weights_inline.empty()) cfg.weights = json::parse(weights_inline);
    }
    if (cfg.command.empty()) throw bpm::ConfigError("no command given");
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
      throw bpm::ConfigError("unknown command '" + cfg.command + "'");
    }
    return dispatch(cfg);
  } catch (const bpm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const bpm::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const bpm::CertificationError& e) {
    std::cerr << "certification error: " << e.what()
              << " (suggested extension " << e.suggested_extension << ")\n";
    return 3;
  } catch (const bpm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
