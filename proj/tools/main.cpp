#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "music2d/scene.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw music2d::ParseError("cannot open scene file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void print_report(const music2d::RunReport& report) {
  std::printf("omega = %.7g, directions = %lld, points M = %lld, signal dim = %lld\n",
              report.omega, static_cast<long long>(report.directions),
              static_cast<long long>(report.points),
              static_cast<long long>(report.signal_dim));
  std::printf("singular values:");
  for (music2d::Index m = 0; m < report.sigma.size(); ++m)
    std::printf(" %.4g", report.sigma(m));
  std::printf("\n");
  std::printf("music map: max = %.6g, cap hit = %s\n", report.music_max,
              report.cap_hit ? "yes" : "no");
  const auto print_stats = [](const char* label, const music2d::CompareStats<double>& stats) {
    std::printf("%s: median rel dev = %.4g, max rel dev = %.4g, argmax distance = %.4g "
                "(%lld pixels)\n",
                label, stats.median_rel_dev, stats.max_rel_dev, stats.argmax_distance,
                static_cast<long long>(stats.pixels));
  };
  std::string label = "music vs " + std::string(music2d::map_kind_name(report.predictor_kind));
  print_stats(label.c_str(), report.comparison);
  if (report.comparison_alt)
    print_stats((label + " (other variant)").c_str(), *report.comparison_alt);
  for (const auto& file : report.files) std::printf("wrote %s\n", file.c_str());
}

int run_command(const std::string& scene_file, const std::string& preset,
                const std::string& out_dir, long long signal_dim, double tau,
                const std::string& variant, double noise, long long seed,
                bool have_signal_dim, bool have_tau, bool have_variant, bool have_noise,
                bool have_seed) {
  nlohmann::json doc = nlohmann::json::object();
  if (!scene_file.empty()) {
    const std::string text = read_file(scene_file);
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& err) {
      throw music2d::ParseError(std::string("scene document is not valid JSON: ") + err.what());
    }
  }
  if (!preset.empty()) doc["preset"] = preset;
  if (doc.empty()) throw music2d::ParseError("no scene: pass a scene file or --preset");

  music2d::SceneConfig config = music2d::parse_scene(doc.dump());
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (have_signal_dim) config.signal_dim = signal_dim;
  if (have_tau) config.tau = tau;
  if (have_variant)
    config.variant = variant == "frame-sum" ? music2d::MuVariant::FrameSum
                                            : music2d::MuVariant::AsWritten;
  if (have_noise) config.noise = noise;
  if (have_seed) config.seed = static_cast<std::uint64_t>(seed);

  print_report(music2d::run_scene(config));
  return 0;
}

int identities_command() {
  const auto report = music2d::run_identities();
  std::printf("circular average vs J0:        max dev = %.3g (tolerance 1e-8)\n",
              report.moment0_max);
  std::printf("circular average vs J1:        max dev = %.3g (tolerance 1e-8)\n",
              report.moment1_max);
  std::printf("model-vector gram vs J0:       max dev = %.3g (tolerance 1e-6)\n",
              report.gram_j0_max);
  std::printf("frame-weighted gram vs J1:     max dev = %.3g (tolerance 1e-6)\n",
              report.gram_j1_max);
  std::printf("adjacent gram magnitude:       %.4f (J0(pi) ~ -0.3042 at lambda/2 spacing)\n",
              report.gram_adjacent_mag);
  std::printf("music/migration identity:      max dev = %.3g (tolerance 1e-8)\n",
              report.migration_identity_max);
  const bool ok = report.all_within_tolerance();
  std::printf("%s\n", ok ? "all identities within tolerance" : "identity check FAILED");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MUSIC-type imaging of thin inclusions, small inclusions, and cracks"};
  app.require_subcommand(1);

  std::string scene_file, preset, out_dir, variant;
  long long signal_dim = 0, seed = 0;
  double tau = 0, noise = 0;

  auto* run = app.add_subcommand("run", "synthesize a scene, image it, export maps");
  run->add_option("scene", scene_file, "scene file (JSON)");
  run->add_option("--preset", preset, "named preset scene");
  run->add_option("--out", out_dir, "output directory for maps");
  auto* opt_dim = run->add_option("--signal-dim", signal_dim, "signal-space dimension override");
  auto* opt_tau = run->add_option("--tau", tau, "relative singular-value threshold");
  auto* opt_variant = run->add_option("--variant", variant, "mu-predictor variant")
                          ->check(CLI::IsMember({"as-written", "frame-sum"}));
  auto* opt_noise = run->add_option("--noise", noise, "relative noise level");
  auto* opt_seed = run->add_option("--seed", seed, "noise seed");

  auto* identities =
      app.add_subcommand("identities", "run the circular-average, gram, and migration checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (identities->parsed()) return identities_command();
    return run_command(scene_file, preset, out_dir, signal_dim, tau, variant, noise, seed,
                       opt_dim->count() > 0, opt_tau->count() > 0, opt_variant->count() > 0,
                       opt_noise->count() > 0, opt_seed->count() > 0);
  } catch (const music2d::ParseError& err) {
    std::cerr << "scene error";
    if (!err.key().empty()) std::cerr << " (key '" << err.key() << "')";
    std::cerr << ": " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
