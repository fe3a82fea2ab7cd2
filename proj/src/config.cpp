#include "bonus/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace bonus {

void PipelineConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be positive");
  if (!(r1 > 0.0) || !(r1 < r2)) throw std::invalid_argument("config: requires 0 < r1 < r2");
  if (!(w_fg >= 0.0) || !(w_bg >= 0.0))
    throw std::invalid_argument("config: loss weights must be non-negative");
  if (k_neighbors < 1) throw std::invalid_argument("config: k_neighbors must be >= 1");
  if (!(t_b > 0.0) || !(t_b < t_f) || !(t_f < 1.0))
    throw std::invalid_argument("config: requires 0 < t_b < t_f < 1");
  if (!(gamma >= 1.0)) throw std::invalid_argument("config: gamma must be >= 1");
  if (stride < 1) throw std::invalid_argument("config: stride must be >= 1");
  if (!(eps_log > 0.0) || eps_log > 1e-3)
    throw std::invalid_argument("config: eps_log must be in (0, 1e-3]");
  if (min_object_area < 0 || hole_fill_area < 0)
    throw std::invalid_argument("config: area thresholds must be non-negative");
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("config: connectivity must be 4 or 8");
  if (!(match_radius > 0.0))
    throw std::invalid_argument("config: match_radius must be positive");
  if (!(existing_radius >= 0.0))
    throw std::invalid_argument("config: existing_radius must be non-negative");
  if (!(fg_radius >= 0.0)) throw std::invalid_argument("config: fg_radius must be non-negative");
  if (!(dist_clip > 0.0)) throw std::invalid_argument("config: dist_clip must be positive");
}

namespace {

using nlohmann::json;

json to_json(const PipelineConfig& c) {
  return json{{"sigma", c.sigma},
              {"r1", c.r1},
              {"r2", c.r2},
              {"w_fg", c.w_fg},
              {"w_bg", c.w_bg},
              {"peak_threshold", c.peak_threshold},
              {"k_neighbors", c.k_neighbors},
              {"curriculum_period_epochs", c.curriculum_period_epochs},
              {"existing_radius", c.existing_radius},
              {"fg_radius", c.fg_radius},
              {"dist_clip", c.dist_clip},
              {"seed", c.seed},
              {"t_f", c.t_f},
              {"t_b", c.t_b},
              {"gamma", c.gamma},
              {"stride", c.stride},
              {"beta", c.beta},
              {"eps_log", c.eps_log},
              {"bin_threshold", c.bin_threshold},
              {"min_object_area", c.min_object_area},
              {"hole_fill_area", c.hole_fill_area},
              {"connectivity", c.connectivity},
              {"match_radius", c.match_radius}};
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object: " + path);

  PipelineConfig cfg;
  json defaults = to_json(cfg);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key))
      throw std::runtime_error("config: unknown key \"" + key + "\" in " + path);
    defaults[key] = value;
  }
  cfg.sigma = defaults["sigma"].get<double>();
  cfg.r1 = defaults["r1"].get<double>();
  cfg.r2 = defaults["r2"].get<double>();
  cfg.w_fg = defaults["w_fg"].get<double>();
  cfg.w_bg = defaults["w_bg"].get<double>();
  cfg.peak_threshold = defaults["peak_threshold"].get<double>();
  cfg.k_neighbors = defaults["k_neighbors"].get<int>();
  cfg.curriculum_period_epochs = defaults["curriculum_period_epochs"].get<int>();
  cfg.existing_radius = defaults["existing_radius"].get<double>();
  cfg.fg_radius = defaults["fg_radius"].get<double>();
  cfg.dist_clip = defaults["dist_clip"].get<double>();
  cfg.seed = defaults["seed"].get<std::uint64_t>();
  cfg.t_f = defaults["t_f"].get<double>();
  cfg.t_b = defaults["t_b"].get<double>();
  cfg.gamma = defaults["gamma"].get<double>();
  cfg.stride = defaults["stride"].get<int>();
  cfg.beta = defaults["beta"].get<double>();
  cfg.eps_log = defaults["eps_log"].get<double>();
  cfg.bin_threshold = defaults["bin_threshold"].get<double>();
  cfg.min_object_area = defaults["min_object_area"].get<long long>();
  cfg.hole_fill_area = defaults["hole_fill_area"].get<long long>();
  cfg.connectivity = defaults["connectivity"].get<int>();
  cfg.match_radius = defaults["match_radius"].get<double>();
  cfg.validate();
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) { return to_json(cfg).dump(); }

}  // namespace bonus
