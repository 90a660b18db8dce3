#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "music2d/geometry.hpp"
#include "music2d/imaging.hpp"
#include "music2d/subspace.hpp"
#include "music2d/synth.hpp"

namespace music2d {

enum class SceneModel { Thin, Small, CrackSoft, CrackHard };
enum class ExportFormat { Csv, Pgm };

// One imaging scene: data model, geometry source, contrasts, array and grid
// parameters, and output destinations. Parsed from a JSON document with flat
// keys plus a nested "geometry" block; see README for the schema.
struct SceneConfig {
  SceneModel model{SceneModel::Thin};
  std::optional<CurveSpec<double>> curve;
  std::vector<SmallInclusion<double>> inclusions;

  double lambda{0.4};
  Index directions{24};
  double eps{5.0};
  double mu{1.0};
  double h{0.02};
  std::vector<double> strengths;  // crack models only
  double spacing{0.0};            // 0 -> lambda / 2

  double xmin{-1}, xmax{1}, ymin{-1}, ymax{1};
  Index nx{128}, ny{128};

  double tau{0.01};
  std::optional<Index> signal_dim;
  double noise{0.0};
  std::uint64_t seed{0};
  double cap{1e6};
  MuVariant variant{MuVariant::AsWritten};

  std::string out_dir;
  bool write_csv{true};
  bool write_pgm{true};

  double omega() const { return 2.0 * std::numbers::pi / lambda; }
  double effective_spacing() const { return spacing > 0 ? spacing : lambda / 2; }
  ImageGrid<double> grid() const { return {xmin, xmax, ymin, ymax, nx, ny}; }
};

SceneConfig preset_scene(const std::string& name);
SceneConfig parse_scene(const std::string& text);

struct RunReport {
  double omega{0};
  Index directions{0};
  Index points{0};       // M
  Index signal_dim{0};
  Eigen::VectorXd sigma;
  MapKind predictor_kind{MapKind::PredictorEps};
  CompareStats<double> comparison;                     // music vs predictor, configured variant
  std::optional<CompareStats<double>> comparison_alt;  // the other mu-type variant
  bool cap_hit{false};
  double music_max{0};
  std::vector<std::string> files;
};

// Full pipeline: synthesize, decompose, image, compare against the matching
// predictor, and export maps to config.out_dir (when set).
RunReport run_scene(const SceneConfig& config);

// csv: "x,y,value" header then one row per pixel, row-major, 17 significant
// digits. pgm: binary P5, 16-bit big-endian, min-max scaled per file
// (constant maps export as all-zero).
void export_map(const FieldMap<double>& map, const std::filesystem::path& path,
                ExportFormat format);

struct IdentityReport {
  double moment0_max{0};             // vs 1e-8
  double moment1_max{0};             // vs 1e-8
  double gram_j0_max{0};             // vs 1e-6
  double gram_j1_max{0};             // vs 1e-6
  double gram_adjacent_mag{0};       // |J0(pi)| ~ 0.304 at half-wavelength spacing
  double migration_identity_max{0};  // vs 1e-8

  bool all_within_tolerance() const {
    return moment0_max <= 1e-8 && moment1_max <= 1e-8 && gram_j0_max <= 1e-6 &&
           gram_j1_max <= 1e-6 && migration_identity_max <= 1e-8;
  }
};

// Self-checks of the circular-average identities, the model-vector Gram
// structure, and the MUSIC/migration relation.
IdentityReport run_identities();

}  // namespace music2d
