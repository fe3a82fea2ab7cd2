#pragma once

#include <cstdint>
#include <string>

namespace bonus {

// Every tunable of the pipeline in one place. Field names double as the JSON
// config schema and as CLI flag names; flags override config-file values.
struct PipelineConfig {
  // heatmap encoding
  double sigma = 4.0;  // Gaussian std-dev, pixels
  double r1 = 8.0;     // foreground radius, pixels
  double r2 = 15.0;    // background radius, pixels; beyond it pixels are ignored
  double w_fg = 1.0;   // detection-loss foreground weight
  double w_bg = 0.1;   // detection-loss background weight

  // peak extraction / curriculum
  double peak_threshold = 0.65;
  int k_neighbors = 4;
  int curriculum_period_epochs = 30;  // caller-side cadence; carried for provenance
  double existing_radius = 8.0;       // overlap radius for pseudo-label dedup

  // coarse labels
  double fg_radius = 2.0;   // Voronoi foreground disk radius
  double dist_clip = 20.0;  // distance-channel clip for cluster features
  std::uint64_t seed = 0;   // k-means seed

  // affinity / boundary loss
  double t_f = 0.6;
  double t_b = 0.05;
  double gamma = 8.0;  // pair radius, pixels
  int stride = 1;      // offset subsampling (1 = full half-disk)
  double beta = 0.1;   // boundary-loss weight in the fine-stage loss
  double eps_log = 1e-7;

  // postprocess
  double bin_threshold = 0.5;
  long long min_object_area = 20;
  long long hole_fill_area = 20;
  int connectivity = 8;  // 4 or 8

  // metrics
  double match_radius = 6.0;

  // Throws std::invalid_argument on any violated invariant
  // (0 < r1 < r2, 0 < t_b < t_f < 1, gamma >= 1, eps_log in (0, 1e-3], ...).
  void validate() const;
};

// JSON (de)serialization against the schema above. Unknown keys are
// rejected. load_config also validates.
PipelineConfig load_config(const std::string& path);
std::string config_to_json(const PipelineConfig& cfg);

}  // namespace bonus
