#include "music2d/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace music2d {

namespace {

using nlohmann::json;

double require_number(const json& value, const std::string& key) {
  if (!value.is_number()) throw ParseError(key, "key '" + key + "' must be a number");
  return value.get<double>();
}

Index require_integer(const json& value, const std::string& key) {
  if (!value.is_number_integer()) throw ParseError(key, "key '" + key + "' must be an integer");
  return value.get<Index>();
}

std::string require_string(const json& value, const std::string& key) {
  if (!value.is_string()) throw ParseError(key, "key '" + key + "' must be a string");
  return value.get<std::string>();
}

Vec2d require_vec2(const json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number())
    throw ParseError(key, "key '" + key + "' must be an [x, y] pair");
  return {value[0].get<double>(), value[1].get<double>()};
}

SmallInclusion<double> parse_inclusion(const json& node) {
  if (!node.is_object()) throw ParseError("inclusions", "each inclusion must be an object");
  static const std::set<std::string> known{"center", "radius", "area", "eps", "mu", "tensor"};
  for (const auto& [key, value] : node.items())
    if (!known.count(key)) throw ParseError(key, "unknown inclusion key '" + key + "'");
  if (!node.contains("center")) throw ParseError("center", "inclusion without 'center'");
  if (node.contains("mu") && node.contains("tensor"))
    throw ParseError("tensor", "give 'mu' or 'tensor', not both");

  SmallInclusion<double> inc;
  inc.center = require_vec2(node["center"], "center");
  if (node.contains("radius")) inc.radius = require_number(node["radius"], "radius");
  if (node.contains("area")) inc.area = require_number(node["area"], "area");
  if (node.contains("eps")) inc.eps = require_number(node["eps"], "eps");
  if (node.contains("mu"))  // disk tensor from the final area
    inc.tensor = SmallInclusion<double>::disk_tensor(require_number(node["mu"], "mu"), inc.area);
  if (node.contains("tensor")) {
    const auto& value = node["tensor"];
    if (!value.is_array() || value.size() != 2)
      throw ParseError("tensor", "key 'tensor' must be a 2x2 array");
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) inc.tensor(r, c) = require_number(value[r][c], "tensor");
  }
  try {
    inc.validate();
  } catch (const std::invalid_argument& err) {
    throw ParseError("inclusions", err.what());
  }
  return inc;
}

void parse_geometry(const json& node, SceneConfig& config) {
  if (!node.is_object()) throw ParseError("geometry", "'geometry' must be an object");
  config.curve.reset();
  config.inclusions.clear();

  if (node.contains("inclusions")) {
    for (const auto& [key, value] : node.items())
      if (key != "inclusions") throw ParseError(key, "unknown geometry key '" + key + "'");
    const auto& list = node["inclusions"];
    if (!list.is_array() || list.empty())
      throw ParseError("inclusions", "'inclusions' must be a non-empty array");
    for (const auto& item : list) config.inclusions.push_back(parse_inclusion(item));
    return;
  }

  if (!node.contains("curve")) throw ParseError("geometry", "geometry needs 'curve' or 'inclusions'");
  const std::string curve = require_string(node["curve"], "curve");
  std::set<std::string> allowed{"curve"};
  if (curve == "gamma1") {
    config.curve = CurveSpec<double>::gamma1();
  } else if (curve == "gamma2") {
    config.curve = CurveSpec<double>::gamma2();
  } else if (curve == "line") {
    allowed.insert({"from", "to"});
    if (!node.contains("from") || !node.contains("to"))
      throw ParseError("curve", "line curve needs 'from' and 'to'");
    config.curve = CurveSpec<double>::line(require_vec2(node["from"], "from"),
                                           require_vec2(node["to"], "to"));
  } else if (curve == "polyline") {
    allowed.insert("points");
    if (!node.contains("points") || !node["points"].is_array() || node["points"].size() < 2)
      throw ParseError("points", "polyline curve needs a 'points' array of at least 2 points");
    std::vector<Vec2d> pts;
    for (const auto& p : node["points"]) pts.push_back(require_vec2(p, "points"));
    try {
      config.curve = CurveSpec<double>::polyline(std::move(pts));
    } catch (const std::invalid_argument& err) {
      throw ParseError("points", err.what());
    }
  } else {
    throw ParseError("curve", "unknown curve '" + curve + "'");
  }
  for (const auto& [key, value] : node.items())
    if (!allowed.count(key)) throw ParseError(key, "unknown geometry key '" + key + "'");
}

SceneModel parse_model(const std::string& name) {
  if (name == "thin") return SceneModel::Thin;
  if (name == "small") return SceneModel::Small;
  if (name == "crack-soft") return SceneModel::CrackSoft;
  if (name == "crack-hard") return SceneModel::CrackHard;
  throw ParseError("model", "unknown model '" + name + "'");
}

MuVariant parse_variant(const std::string& name) {
  if (name == "as-written") return MuVariant::AsWritten;
  if (name == "frame-sum") return MuVariant::FrameSum;
  throw ParseError("variant", "unknown variant '" + name + "'");
}

void validate_config(const SceneConfig& config) {
  if (!(config.lambda > 0)) throw ParseError("lambda", "'lambda' must be positive");
  if (config.directions < 2) throw ParseError("directions", "'directions' must be >= 2");
  if (!(config.tau > 0 && config.tau < 1)) throw ParseError("tau", "'tau' must be in (0, 1)");
  if (!(config.cap > 0)) throw ParseError("cap", "'cap' must be positive");
  if (config.noise < 0) throw ParseError("noise", "'noise' must be >= 0");
  if (config.spacing < 0) throw ParseError("spacing", "'spacing' must be >= 0");
  if (config.nx < 2 || config.ny < 2) throw ParseError("nx", "grid needs nx, ny >= 2");
  if (!(config.xmax > config.xmin) || !(config.ymax > config.ymin))
    throw ParseError("xmin", "grid extent is empty");

  const bool needs_curve =
      config.model == SceneModel::Thin || config.model == SceneModel::CrackSoft ||
      config.model == SceneModel::CrackHard;
  if (config.curve.has_value() && !config.inclusions.empty())
    throw ParseError("geometry", "scene must have exactly one geometry source");
  if (needs_curve && !config.curve.has_value())
    throw ParseError("geometry", "this model needs a curve geometry");
  if (!needs_curve && config.inclusions.empty())
    throw ParseError("geometry", "the small model needs an inclusion list");
  if (!config.strengths.empty() && config.model != SceneModel::CrackSoft &&
      config.model != SceneModel::CrackHard)
    throw ParseError("strengths", "'strengths' applies to crack models only");
}

SceneConfig parse_scene_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("scene document must be a JSON object");

  SceneConfig config;
  bool have_geometry = false;
  if (doc.contains("preset")) {
    config = preset_scene(require_string(doc["preset"], "preset"));
    have_geometry = true;
  }

  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") {
      continue;
    } else if (key == "model") {
      config.model = parse_model(require_string(value, key));
    } else if (key == "geometry") {
      parse_geometry(value, config);
      have_geometry = true;
    } else if (key == "lambda") {
      config.lambda = require_number(value, key);
    } else if (key == "directions") {
      config.directions = require_integer(value, key);
    } else if (key == "eps") {
      config.eps = require_number(value, key);
    } else if (key == "mu") {
      config.mu = require_number(value, key);
    } else if (key == "h") {
      config.h = require_number(value, key);
    } else if (key == "spacing") {
      config.spacing = require_number(value, key);
    } else if (key == "strengths") {
      if (!value.is_array()) throw ParseError(key, "'strengths' must be an array");
      config.strengths.clear();
      for (const auto& s : value) config.strengths.push_back(require_number(s, key));
    } else if (key == "xmin") {
      config.xmin = require_number(value, key);
    } else if (key == "xmax") {
      config.xmax = require_number(value, key);
    } else if (key == "ymin") {
      config.ymin = require_number(value, key);
    } else if (key == "ymax") {
      config.ymax = require_number(value, key);
    } else if (key == "nx") {
      config.nx = require_integer(value, key);
    } else if (key == "ny") {
      config.ny = require_integer(value, key);
    } else if (key == "tau") {
      config.tau = require_number(value, key);
    } else if (key == "signal_dim") {
      config.signal_dim = require_integer(value, key);
    } else if (key == "noise") {
      config.noise = require_number(value, key);
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(require_integer(value, key));
    } else if (key == "cap") {
      config.cap = require_number(value, key);
    } else if (key == "variant") {
      config.variant = parse_variant(require_string(value, key));
    } else if (key == "out_dir") {
      config.out_dir = require_string(value, key);
    } else if (key == "formats") {
      if (!value.is_array()) throw ParseError(key, "'formats' must be an array");
      config.write_csv = false;
      config.write_pgm = false;
      for (const auto& f : value) {
        const std::string name = require_string(f, key);
        if (name == "csv") config.write_csv = true;
        else if (name == "pgm") config.write_pgm = true;
        else throw ParseError(key, "unknown format '" + name + "'");
      }
    } else {
      throw ParseError(key, "unknown key '" + key + "'");
    }
  }

  if (!have_geometry) throw ParseError("geometry", "scene has no geometry");
  validate_config(config);
  return config;
}

MapKind select_predictor(const SceneConfig& config) {
  switch (config.model) {
    case SceneModel::CrackSoft:
      return MapKind::PredictorTm;
    case SceneModel::CrackHard:
      return MapKind::PredictorTe;
    case SceneModel::Small: {
      const bool zero_tensor = std::all_of(
          config.inclusions.begin(), config.inclusions.end(),
          [](const SmallInclusion<double>& inc) { return inc.tensor.isZero(0); });
      if (zero_tensor) return MapKind::PredictorSmallEps;
      const bool unit_eps =
          std::all_of(config.inclusions.begin(), config.inclusions.end(),
                      [](const SmallInclusion<double>& inc) { return inc.eps == 1.0; });
      return unit_eps ? MapKind::PredictorSmallMu : MapKind::PredictorSmallEpsMu;
    }
    case SceneModel::Thin:
      if (config.mu == 1.0) return MapKind::PredictorEps;
      if (config.eps == 1.0) return MapKind::PredictorMu;
      return MapKind::PredictorEpsMu;
  }
  throw std::logic_error("unreachable");
}

bool variant_sensitive(MapKind kind) {
  return kind == MapKind::PredictorMu || kind == MapKind::PredictorEpsMu ||
         kind == MapKind::PredictorSmallMu || kind == MapKind::PredictorSmallEpsMu;
}

}  // namespace

SceneConfig preset_scene(const std::string& name) {
  SceneConfig config;
  if (name == "gamma1-eps" || name == "gamma1-mu" || name == "gamma1-epsmu") {
    config.model = SceneModel::Thin;
    config.curve = CurveSpec<double>::gamma1();
    config.lambda = 0.4;
    config.directions = 24;
    config.h = 0.02;
    config.eps = name == "gamma1-mu" ? 1.0 : 5.0;
    config.mu = name == "gamma1-eps" ? 1.0 : 5.0;
  } else if (name == "gamma2-soft" || name == "gamma2-hard") {
    config.model = name == "gamma2-soft" ? SceneModel::CrackSoft : SceneModel::CrackHard;
    config.curve = CurveSpec<double>::gamma2();
    config.lambda = 0.4;
    config.directions = 40;
  } else if (name == "point-mu") {
    // single mid-point scene, centred on a pixel of the default 128^2 grid
    const double c = 0.0078125;
    config.model = SceneModel::Thin;
    config.curve = CurveSpec<double>::line({c - 0.05, c}, {c + 0.05, c});
    config.lambda = 0.4;
    config.directions = 24;
    config.eps = 1.0;
    config.mu = 5.0;
  } else if (name == "small3-eps" || name == "small3-mu") {
    config.model = SceneModel::Small;
    config.lambda = 0.4;
    config.directions = 24;
    const Vec2d centers[3] = {{-0.6, -0.5}, {0.7, -0.45}, {0.05, 0.65}};
    for (const auto& center : centers) {
      SmallInclusion<double> inc;
      inc.center = center;
      inc.radius = 0.05;
      if (name == "small3-mu") {
        inc.eps = 1.0;
        inc.tensor = SmallInclusion<double>::disk_tensor(5.0, inc.area);
      }
      config.inclusions.push_back(inc);
    }
  } else {
    throw ParseError("preset", "unknown preset '" + name + "'");
  }
  return config;
}

SceneConfig parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& err) {
    throw ParseError(std::string("scene document is not valid JSON: ") + err.what());
  }
  return parse_scene_json(doc);
}

RunReport run_scene(const SceneConfig& config) {
  validate_config(config);
  const double omega = config.omega();
  const auto dirs = sample_directions(config.directions);

  SceneGeometry<double> geom;
  MsrMatrix<double> msr;
  switch (config.model) {
    case SceneModel::Thin:
      geom = discretize_curve(*config.curve, config.effective_spacing());
      msr = msr_thin(geom, {config.eps, config.mu, config.h}, omega, dirs);
      break;
    case SceneModel::CrackSoft:
    case SceneModel::CrackHard:
      geom = discretize_curve(*config.curve, config.effective_spacing());
      msr = msr_crack(geom,
                      config.model == SceneModel::CrackSoft ? CrackBoundary::SoundSoft
                                                            : CrackBoundary::SoundHard,
                      omega, dirs, config.strengths);
      break;
    case SceneModel::Small: {
      Mat2X<double> centers(2, static_cast<Index>(config.inclusions.size()));
      for (std::size_t m = 0; m < config.inclusions.size(); ++m)
        centers.col(static_cast<Index>(m)) = config.inclusions[m].center;
      geom = point_set_geometry(centers);
      msr = msr_small(config.inclusions, omega, dirs);
      break;
    }
  }
  if (config.noise > 0) msr = add_noise(msr, config.noise, config.seed);

  auto dec = svd(msr);
  dec.signal_dim = config.signal_dim.value_or(estimate_signal_dim(dec.sigma, config.tau));

  const auto grid = config.grid();
  const auto music = music_map(dec, omega, dirs, grid, config.cap);
  const auto migration = migration_map(dec, omega, dirs, grid);
  const MapKind kind = select_predictor(config);
  const auto predictor =
      predictor_map(kind, geom, omega, config.directions, grid, config.variant, config.cap);

  const double exclusion = config.lambda / 4;
  const auto away_from_points = [&](Index, Index, const Vec2d& z) {
    for (Index m = 0; m < geom.size(); ++m)
      if ((z - Vec2d(geom.points.col(m))).norm() < exclusion) return false;
    return true;
  };

  RunReport report;
  report.omega = omega;
  report.directions = config.directions;
  report.points = geom.size();
  report.signal_dim = dec.signal_dim;
  report.sigma = dec.sigma;
  report.predictor_kind = kind;
  report.comparison = compare_maps(music, predictor, away_from_points);
  if (variant_sensitive(kind)) {
    const MuVariant other = config.variant == MuVariant::AsWritten ? MuVariant::FrameSum
                                                                   : MuVariant::AsWritten;
    const auto alt = predictor_map(kind, geom, omega, config.directions, grid, other, config.cap);
    report.comparison_alt = compare_maps(music, alt, away_from_points);
  }
  report.cap_hit = music.cap_hit();
  report.music_max = music.max_value();

  if (!config.out_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    const auto save = [&](const FieldMap<double>& map, const std::string& stem) {
      if (config.write_csv) {
        const fs::path path = dir / (stem + ".csv");
        export_map(map, path, ExportFormat::Csv);
        report.files.push_back(path.string());
      }
      if (config.write_pgm) {
        const fs::path path = dir / (stem + ".pgm");
        export_map(map, path, ExportFormat::Pgm);
        report.files.push_back(path.string());
      }
    };
    save(music, "music");
    save(migration, "migration");
    save(predictor, std::string(map_kind_name(kind)));

    const fs::path sigma_path = dir / "sigma.csv";
    std::ofstream out(sigma_path);
    if (!out) throw std::runtime_error("cannot open " + sigma_path.string());
    out << "sigma\n";
    char buffer[64];
    for (Index m = 0; m < report.sigma.size(); ++m) {
      std::snprintf(buffer, sizeof(buffer), "%.17g\n", report.sigma(m));
      out << buffer;
    }
    if (!out) throw std::runtime_error("failed writing " + sigma_path.string());
    report.files.push_back(sigma_path.string());
  }
  return report;
}

}  // namespace music2d
