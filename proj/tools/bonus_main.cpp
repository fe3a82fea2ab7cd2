// bonus: weak-label synthesis, loss kernels, post-processing, and metrics
// for point-supervised nuclei segmentation, driven entirely through files.
// One subcommand per kernel; all parameters come from flags or a JSON config
// (flags win). Exit codes: 0 ok, 1 data error, 2 usage error.

#include <atomic>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bonus/affinity.hpp"
#include "bonus/coarse_labels.hpp"
#include "bonus/config.hpp"
#include "bonus/curriculum.hpp"
#include "bonus/heatmap.hpp"
#include "bonus/io.hpp"
#include "bonus/metrics.hpp"
#include "bonus/postprocess.hpp"
#include "bonus/raster.hpp"

using nlohmann::json;
using namespace bonus;

namespace {

// Per-subcommand config plumbing: --config names a JSON file (falling back
// to $BONUS_CONFIG), individual flags override its values.
struct ConfigArgs {
  std::string config_path;
  PipelineConfig flags;
  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> appliers;

  template <typename T>
  void opt(CLI::App* cmd, const std::string& name, T PipelineConfig::* member,
           const std::string& desc) {
    CLI::Option* o = cmd->add_option("--" + name, flags.*member, desc);
    appliers.emplace_back(o, [this, member](PipelineConfig& c) { c.*member = flags.*member; });
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (default: $BONUS_CONFIG)");
    opt(cmd, "sigma", &PipelineConfig::sigma, "Gaussian std-dev (px)");
    opt(cmd, "r1", &PipelineConfig::r1, "heatmap foreground radius (px)");
    opt(cmd, "r2", &PipelineConfig::r2, "heatmap background radius (px)");
    opt(cmd, "w_fg", &PipelineConfig::w_fg, "detection-loss foreground weight");
    opt(cmd, "w_bg", &PipelineConfig::w_bg, "detection-loss background weight");
    opt(cmd, "peak_threshold", &PipelineConfig::peak_threshold, "peak binarization threshold");
    opt(cmd, "k_neighbors", &PipelineConfig::k_neighbors, "k for curriculum distances");
    opt(cmd, "curriculum_period_epochs", &PipelineConfig::curriculum_period_epochs,
        "caller-side curriculum cadence (provenance only)");
    opt(cmd, "existing_radius", &PipelineConfig::existing_radius,
        "pseudo-label overlap radius (px)");
    opt(cmd, "fg_radius", &PipelineConfig::fg_radius, "Voronoi foreground disk radius (px)");
    opt(cmd, "dist_clip", &PipelineConfig::dist_clip, "cluster feature distance clip (px)");
    opt(cmd, "seed", &PipelineConfig::seed, "k-means seed");
    opt(cmd, "t_f", &PipelineConfig::t_f, "foreground confidence threshold");
    opt(cmd, "t_b", &PipelineConfig::t_b, "background confidence threshold");
    opt(cmd, "gamma", &PipelineConfig::gamma, "affinity pair radius (px)");
    opt(cmd, "stride", &PipelineConfig::stride, "offset subsampling stride");
    opt(cmd, "beta", &PipelineConfig::beta, "boundary-loss weight");
    opt(cmd, "eps_log", &PipelineConfig::eps_log, "log clamp epsilon");
    opt(cmd, "bin_threshold", &PipelineConfig::bin_threshold, "postprocess binarization");
    opt(cmd, "min_object_area", &PipelineConfig::min_object_area, "minimum object area (px^2)");
    opt(cmd, "hole_fill_area", &PipelineConfig::hole_fill_area, "maximum hole area (px^2)");
    opt(cmd, "connectivity", &PipelineConfig::connectivity, "pixel connectivity (4 or 8)");
    opt(cmd, "match_radius", &PipelineConfig::match_radius, "detection match radius (px)");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    std::string path = config_path;
    if (path.empty()) {
      const char* env = std::getenv("BONUS_CONFIG");
      if (env && *env) path = env;
    }
    if (!path.empty()) cfg = load_config(path);
    for (const auto& [o, apply] : appliers)
      if (o->count() > 0) apply(cfg);
    cfg.validate();
    return cfg;
  }
};

json config_json(const PipelineConfig& cfg) { return json::parse(config_to_json(cfg)); }

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json subset_counts_json(const std::array<std::size_t, 4>& counts) {
  return json{{"fg_pos", counts[0]},
              {"fg_neg", counts[1]},
              {"bg_pos", counts[2]},
              {"cross_neg", counts[3]}};
}

// manifest: one whitespace-separated record per line, blank lines skipped
std::vector<std::vector<std::string>> read_manifest(const std::string& path,
                                                    std::size_t fields) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<std::vector<std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> toks{std::istream_iterator<std::string>(ss),
                                  std::istream_iterator<std::string>()};
    if (toks.empty()) continue;
    if (toks.size() != fields)
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected " +
                               std::to_string(fields) + " fields");
    out.push_back(std::move(toks));
  }
  return out;
}

// run fn(i) over [0,n) on `jobs` threads; outputs must be slotted by index
void parallel_foreach(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(n);
  std::vector<std::thread> workers;
  for (int t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  for (std::thread& w : workers) w.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
}

RasterF32 foreground_mask(const InstanceMap& inst) {
  RasterF32 out(inst.height, inst.width);
  for (std::size_t i = 0; i < inst.size(); ++i) out.values[i] = inst.ids[i] > 0 ? 1.0f : 0.0f;
  return out;
}

json eval_pair(const InstanceMap& pred, const InstanceMap& gt) {
  PixelScores px = pixel_accuracy_f1(foreground_mask(pred), foreground_mask(gt));
  PanopticQuality pq = panoptic_quality(pred, gt);
  return json{{"accuracy", px.accuracy}, {"f1", px.f1},
              {"object_dice", object_dice(pred, gt)},
              {"aji", aji(pred, gt)},
              {"dq", pq.dq}, {"sq", pq.sq}, {"pq", pq.pq}};
}

// central finite differences for the gradcheck subcommand
struct GradcheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
};

GradcheckReport run_gradcheck(const std::function<double(const RasterF32&)>& loss_fn,
                              const RasterF32& at, const RasterF32& analytic, double step,
                              int sample_every, const std::vector<std::uint8_t>* exclude) {
  // relative error floored at 1% of the gradient's scale so that pixels with
  // nearly cancelling terms are judged against the problem, not themselves
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    if (!exclude || !(*exclude)[i])
      scale = std::max(scale, std::abs(static_cast<double>(analytic.values[i])));
  const double floor = 0.01 * scale + 1e-12;

  GradcheckReport rep;
  RasterF32 x = at;
  for (std::size_t i = 0; i < x.size(); i += static_cast<std::size_t>(sample_every)) {
    if (exclude && (*exclude)[i]) {
      rep.excluded += 1;
      continue;
    }
    float orig = x.values[i];
    x.values[i] = static_cast<float>(orig + step);
    double lp = loss_fn(x);
    x.values[i] = static_cast<float>(orig - step);
    double lm = loss_fn(x);
    x.values[i] = orig;
    double fd = (lp - lm) / (2.0 * step);
    double a = static_cast<double>(analytic.values[i]);
    double abs_err = std::abs(a - fd);
    rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
    rep.max_rel_err =
        std::max(rep.max_rel_err, abs_err / std::max({std::abs(a), std::abs(fd), floor}));
    rep.checked += 1;
  }
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-supervised nuclei segmentation toolkit"};
  app.require_subcommand(1);
  std::deque<ConfigArgs> cfg_args;

  auto add_cmd = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cfg_args.emplace_back();
    cfg_args.back().attach(cmd);
    return std::pair<CLI::App*, ConfigArgs*>(cmd, &cfg_args.back());
  };

  // heatmap: points -> Gaussian regression target
  {
    auto [cmd, ca] = add_cmd("heatmap", "encode point annotations as a Gaussian target");
    auto points_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto height = std::make_shared<int>(0);
    auto width = std::make_shared<int>(0);
    cmd->add_option("--points", *points_path, "points CSV")->required();
    cmd->add_option("--height", *height, "raster height")->required();
    cmd->add_option("--width", *width, "raster width")->required();
    cmd->add_option("--out", *out_path, "output f32 raster")->required();
    cmd->callback([ca, points_path, out_path, height, width] {
      PipelineConfig cfg = ca->resolve();
      PointSet pts = read_points_csv(*points_path, *height, *width);
      HeatmapTarget t = gaussian_heatmap(pts, *height, *width, cfg.sigma, cfg.r1, cfg.r2);
      write_raster_f32(*out_path, t);
      emit(json{{"points", pts.size()},
                {"height", *height},
                {"width", *width},
                {"out", *out_path},
                {"config", config_json(cfg)}});
    });
  }

  // det-loss: prediction + target -> weighted MSE and gradient
  {
    auto [cmd, ca] = add_cmd("det-loss", "weighted detection regression loss");
    auto pred_path = std::make_shared<std::string>();
    auto target_path = std::make_shared<std::string>();
    auto grad_path = std::make_shared<std::string>();
    cmd->add_option("--pred", *pred_path, "predicted heatmap (f32 raster)")->required();
    cmd->add_option("--target", *target_path, "target heatmap (f32 raster)")->required();
    cmd->add_option("--grad-out", *grad_path, "write d loss / d pred here");
    cmd->callback([ca, pred_path, target_path, grad_path] {
      PipelineConfig cfg = ca->resolve();
      RasterF32 pred = read_raster_f32(*pred_path);
      HeatmapTarget target = read_raster_f32(*target_path);
      ScalarLoss l = detection_loss(pred, target, cfg.w_fg, cfg.w_bg);
      if (!grad_path->empty()) write_raster_f32(*grad_path, l.grad);
      emit(json{{"loss", l.loss}, {"config", config_json(cfg)}});
    });
  }

  // peaks: heatmap -> point detections
  {
    auto [cmd, ca] = add_cmd("peaks", "extract peak points from a probability map");
    auto pred_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--pred", *pred_path, "probability map (f32 raster)")->required();
    cmd->add_option("--out", *out_path, "output points CSV")->required();
    cmd->callback([ca, pred_path, out_path] {
      PipelineConfig cfg = ca->resolve();
      RasterF32 pred = read_raster_f32(*pred_path);
      PeakExtraction pk = extract_peaks(pred, cfg.peak_threshold, cfg.connectivity);
      write_points_csv(*out_path, pk.points);
      emit(json{{"points", pk.points.size()},
                {"out", *out_path},
                {"config", config_json(cfg)}});
    });
  }

  // curriculum: detector output + existing labels -> admitted pseudo-labels
  {
    auto [cmd, ca] = add_cmd("curriculum", "admit easiest pseudo-labels by training difficulty");
    auto pred_path = std::make_shared<std::string>();
    auto existing_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--pred", *pred_path, "detector probability map (f32 raster)")->required();
    cmd->add_option("--existing", *existing_path, "existing labels CSV")->required();
    cmd->add_option("--out", *out_path, "admitted points CSV")->required();
    cmd->callback([ca, pred_path, existing_path, out_path] {
      PipelineConfig cfg = ca->resolve();
      RasterF32 pred = read_raster_f32(*pred_path);
      PointSet existing = read_points_csv(*existing_path, pred.height, pred.width);
      PeakExtraction pk = extract_peaks(pred, cfg.peak_threshold, cfg.connectivity);
      RasterF32 clamped = pred;
      for (float& v : clamped.values) v = std::clamp(v, 0.0f, 1.0f);
      auto stats = component_stats(pk.components, clamped);
      auto cands = candidates_from_components(stats, existing, cfg.k_neighbors);
      long long n_det = static_cast<long long>(cands.size());
      long long n_gt = static_cast<long long>(existing.size());
      PointSet admitted =
          select_pseudo_labels(cands, existing, cfg.existing_radius, n_det, n_gt);
      write_points_csv(*out_path, admitted);
      emit(json{{"n_det", n_det},
                {"n_gt", n_gt},
                {"admitted", admitted.size()},
                {"out", *out_path},
                {"config", config_json(cfg)}});
    });
  }

  // voronoi: points -> tri-state Voronoi supervision
  {
    auto [cmd, ca] = add_cmd("voronoi", "rasterized Voronoi labels from points");
    auto points_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto height = std::make_shared<int>(0);
    auto width = std::make_shared<int>(0);
    cmd->add_option("--points", *points_path, "points CSV")->required();
    cmd->add_option("--height", *height, "raster height")->required();
    cmd->add_option("--width", *width, "raster width")->required();
    cmd->add_option("--out", *out_path, "output tri-state mask (u16 raster)")->required();
    cmd->callback([ca, points_path, out_path, height, width] {
      PipelineConfig cfg = ca->resolve();
      PointSet pts = read_points_csv(*points_path, *height, *width);
      TriMask m = voronoi_labels(pts, *height, *width, cfg.fg_radius);
      write_trimask(*out_path, m);
      emit(json{{"points", pts.size()}, {"out", *out_path}, {"config", config_json(cfg)}});
    });
  }

  // cluster: image + points -> tri-state cluster supervision
  {
    auto [cmd, ca] = add_cmd("cluster", "k-means cluster labels from image and points");
    auto image_path = std::make_shared<std::string>();
    auto points_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--image", *image_path, "RGB PNG image")->required();
    cmd->add_option("--points", *points_path, "points CSV")->required();
    cmd->add_option("--out", *out_path, "output tri-state mask (u16 raster)")->required();
    cmd->callback([ca, image_path, points_path, out_path] {
      PipelineConfig cfg = ca->resolve();
      ImageRGB img = read_image_png(*image_path);
      PointSet pts = read_points_csv(*points_path, img.height, img.width);
      TriMask m = cluster_labels(img, pts, cfg.dist_clip, cfg.seed);
      write_trimask(*out_path, m);
      emit(json{{"points", pts.size()}, {"out", *out_path}, {"config", config_json(cfg)}});
    });
  }

  // ce-loss: prediction + tri-state mask -> masked cross-entropy and gradient
  {
    auto [cmd, ca] = add_cmd("ce-loss", "masked cross-entropy against a tri-state mask");
    auto pred_path = std::make_shared<std::string>();
    auto mask_path = std::make_shared<std::string>();
    auto grad_path = std::make_shared<std::string>();
    cmd->add_option("--pred", *pred_path, "foreground probability (f32 raster)")->required();
    cmd->add_option("--mask", *mask_path, "tri-state mask (u16 raster)")->required();
    cmd->add_option("--grad-out", *grad_path, "write d loss / d pred here");
    cmd->callback([ca, pred_path, mask_path, grad_path] {
      PipelineConfig cfg = ca->resolve();
      RasterF32 pred = read_raster_f32(*pred_path);
      TriMask mask = read_trimask(*mask_path);
      ScalarLoss l = masked_cross_entropy(pred, mask, cfg.eps_log);
      if (!grad_path->empty()) write_raster_f32(*grad_path, l.grad);
      emit(json{{"loss", l.loss}, {"config", config_json(cfg)}});
    });
  }

  // affinity-pairs: coarse prediction -> supervised pixel pairs
  {
    auto [cmd, ca] = add_cmd("affinity-pairs", "build affinity supervision pairs");
    auto prob_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--prob", *prob_path, "coarse probability map (f32 raster)")->required();
    cmd->add_option("--out", *out_path, "output pairs file")->required();
    cmd->callback([ca, prob_path, out_path] {
      PipelineConfig cfg = ca->resolve();
      RasterF32 prob = read_raster_f32(*prob_path);
      CoarseInstancePrediction coarse =
          make_coarse_prediction(prob, cfg.t_f, cfg.t_b, cfg.connectivity);
      std::vector<Offset> offsets = half_disk_offsets(cfg.gamma, cfg.stride);
      std::vector<AffinityPair> pairs = build_affinity_pairs(coarse, offsets);
      write_pairs(*out_path, pairs, prob.height, prob.width);
      std::array<std::size_t, 4> counts{};
      for (const AffinityPair& p : pairs) counts[static_cast<std::size_t>(p.subset)] += 1;
      emit(json{{"pairs", pairs.size()},
                {"subsets", subset_counts_json(counts)},
                {"offsets", offsets.size()},
                {"out", *out_path},
                {"config", config_json(cfg)}});
    });
  }

  // boundary-loss: boundary map + pairs -> path-max MIL loss and gradient
  {
    auto [cmd, ca] = add_cmd("boundary-loss", "boundary-mining loss over affinity pairs");
    auto boundary_path = std::make_shared<std::string>();
    auto pairs_path = std::make_shared<std::string>();
    auto grad_path = std::make_shared<std::string>();
    cmd->add_option("--boundary", *boundary_path, "boundary prediction (f32 raster)")
        ->required();
    cmd->add_option("--pairs", *pairs_path, "pairs file")->required();
    cmd->add_option("--grad-out", *grad_path, "write d loss / d boundary here");
    cmd->callback([ca, boundary_path, pairs_path, grad_path] {
      PipelineConfig cfg = ca->resolve();
      RasterF32 boundary = read_raster_f32(*boundary_path);
      PairsFile pf = read_pairs(*pairs_path);
      if (pf.height != boundary.height || pf.width != boundary.width)
        throw std::runtime_error("pairs file was built for " + std::to_string(pf.height) +
                                 "x" + std::to_string(pf.width) + ", boundary is " +
                                 std::to_string(boundary.height) + "x" +
                                 std::to_string(boundary.width));
      BoundaryLossResult l = boundary_loss(boundary, pf.pairs, cfg.eps_log);
      if (!grad_path->empty()) write_raster_f32(*grad_path, l.grad);
      emit(json{{"loss", l.loss},
                {"subsets", subset_counts_json(l.subset_counts)},
                {"config", config_json(cfg)}});
    });
  }

  // gradcheck: finite-difference report for any loss kernel
  {
    auto [cmd, ca] = add_cmd("gradcheck", "finite-difference check of a loss gradient");
    auto kernel = std::make_shared<std::string>();
    auto pred_path = std::make_shared<std::string>();
    auto target_path = std::make_shared<std::string>();
    auto mask_path = std::make_shared<std::string>();
    auto boundary_path = std::make_shared<std::string>();
    auto pairs_path = std::make_shared<std::string>();
    auto step = std::make_shared<double>(1e-3);
    auto sample = std::make_shared<int>(1);
    cmd->add_option("--kernel", *kernel, "det-loss | ce-loss | boundary-loss")->required();
    cmd->add_option("--pred", *pred_path, "prediction raster (det-loss, ce-loss)");
    cmd->add_option("--target", *target_path, "target raster (det-loss)");
    cmd->add_option("--mask", *mask_path, "tri-state mask (ce-loss)");
    cmd->add_option("--boundary", *boundary_path, "boundary raster (boundary-loss)");
    cmd->add_option("--pairs", *pairs_path, "pairs file (boundary-loss)");
    cmd->add_option("--step", *step, "finite-difference step");
    cmd->add_option("--sample", *sample, "check every n-th pixel");
    cmd->callback([ca, kernel, pred_path, target_path, mask_path, boundary_path, pairs_path,
                   step, sample] {
      PipelineConfig cfg = ca->resolve();
      if (*sample < 1) throw CLI::ValidationError("--sample must be >= 1");
      GradcheckReport rep;
      if (*kernel == "det-loss") {
        if (pred_path->empty() || target_path->empty())
          throw CLI::RequiredError("gradcheck det-loss needs --pred and --target");
        RasterF32 pred = read_raster_f32(*pred_path);
        HeatmapTarget target = read_raster_f32(*target_path);
        ScalarLoss l = detection_loss(pred, target, cfg.w_fg, cfg.w_bg);
        rep = run_gradcheck(
            [&](const RasterF32& x) { return detection_loss(x, target, cfg.w_fg, cfg.w_bg).loss; },
            pred, l.grad, *step, *sample, nullptr);
      } else if (*kernel == "ce-loss") {
        if (pred_path->empty() || mask_path->empty())
          throw CLI::RequiredError("gradcheck ce-loss needs --pred and --mask");
        RasterF32 pred = read_raster_f32(*pred_path);
        TriMask mask = read_trimask(*mask_path);
        ScalarLoss l = masked_cross_entropy(pred, mask, cfg.eps_log);
        rep = run_gradcheck(
            [&](const RasterF32& x) { return masked_cross_entropy(x, mask, cfg.eps_log).loss; },
            pred, l.grad, *step, *sample, nullptr);
      } else if (*kernel == "boundary-loss") {
        if (boundary_path->empty() || pairs_path->empty())
          throw CLI::RequiredError("gradcheck boundary-loss needs --boundary and --pairs");
        RasterF32 boundary = read_raster_f32(*boundary_path);
        PairsFile pf = read_pairs(*pairs_path);
        BoundaryLossResult l = boundary_loss(boundary, pf.pairs, cfg.eps_log);
        std::vector<std::uint8_t> excl =
            boundary_tie_exclusion(boundary, pf.pairs, 2.0 * *step);
        rep = run_gradcheck(
            [&](const RasterF32& x) { return boundary_loss(x, pf.pairs, cfg.eps_log).loss; },
            boundary, l.grad, *step, *sample, &excl);
      } else {
        throw CLI::ValidationError("unknown --kernel \"" + *kernel + "\"");
      }
      emit(json{{"kernel", *kernel},
                {"step", *step},
                {"pixels_checked", rep.checked},
                {"pixels_excluded", rep.excluded},
                {"max_rel_err", rep.max_rel_err},
                {"max_abs_err", rep.max_abs_err},
                {"config", config_json(cfg)}});
    });
  }

  // post: segmentation + boundary -> instance map
  {
    auto [cmd, ca] = add_cmd("post", "post-process probability maps into instances");
    auto seg_path = std::make_shared<std::string>();
    auto boundary_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto list_path = std::make_shared<std::string>();
    auto jobs = std::make_shared<int>(1);
    cmd->add_option("--seg", *seg_path, "segmentation probability (f32 raster)");
    cmd->add_option("--boundary", *boundary_path, "boundary probability (f32 raster)");
    cmd->add_option("--out", *out_path, "output instance map (.bonu u16 or .png)");
    cmd->add_option("--list", *list_path, "manifest: one \"seg boundary out\" per line");
    cmd->add_option("--jobs", *jobs, "parallel files in batch mode");
    cmd->callback([ca, seg_path, boundary_path, out_path, list_path, jobs] {
      PipelineConfig cfg = ca->resolve();
      auto run_one = [&cfg](const std::string& seg_p, const std::string& bnd_p,
                            const std::string& out_p) {
        RasterF32 seg = read_raster_f32(seg_p);
        RasterF32 boundary = read_raster_f32(bnd_p);
        InstanceMap inst = instance_postprocess(seg, boundary, cfg);
        write_instance_map(out_p, inst);
        return inst.max_id();
      };
      if (!list_path->empty()) {
        auto entries = read_manifest(*list_path, 3);
        std::vector<json> results(entries.size());
        parallel_foreach(entries.size(), *jobs, [&](std::size_t i) {
          int32_t max_id = run_one(entries[i][0], entries[i][1], entries[i][2]);
          results[i] = json{{"seg", entries[i][0]}, {"out", entries[i][2]},
                            {"instances", max_id}};
        });
        emit(json{{"files", results}, {"config", config_json(cfg)}});
      } else {
        if (seg_path->empty() || boundary_path->empty() || out_path->empty())
          throw CLI::RequiredError("post needs --seg, --boundary, --out (or --list)");
        int32_t max_id = run_one(*seg_path, *boundary_path, *out_path);
        emit(json{{"instances", max_id}, {"out", *out_path}, {"config", config_json(cfg)}});
      }
    });
  }

  // eval: predicted + ground-truth instance maps -> metric suite
  {
    auto [cmd, ca] = add_cmd("eval", "instance segmentation metrics");
    auto pred_path = std::make_shared<std::string>();
    auto gt_path = std::make_shared<std::string>();
    auto list_path = std::make_shared<std::string>();
    auto jobs = std::make_shared<int>(1);
    cmd->add_option("--pred", *pred_path, "predicted instance map (.bonu u16 or .png)");
    cmd->add_option("--gt", *gt_path, "ground-truth instance map");
    cmd->add_option("--list", *list_path, "manifest: one \"pred gt\" per line");
    cmd->add_option("--jobs", *jobs, "parallel files in batch mode");
    cmd->callback([ca, pred_path, gt_path, list_path, jobs] {
      PipelineConfig cfg = ca->resolve();
      if (!list_path->empty()) {
        auto entries = read_manifest(*list_path, 2);
        std::vector<json> results(entries.size());
        parallel_foreach(entries.size(), *jobs, [&](std::size_t i) {
          InstanceMap pred = read_instance_map(entries[i][0]);
          InstanceMap gt = read_instance_map(entries[i][1]);
          results[i] = eval_pair(pred, gt);
          results[i]["pred"] = entries[i][0];
          results[i]["gt"] = entries[i][1];
        });
        // aggregate means in input order
        json mean;
        for (const char* key : {"accuracy", "f1", "object_dice", "aji", "dq", "sq", "pq"}) {
          double s = 0.0;
          for (const json& r : results) s += r[key].get<double>();
          mean[key] = results.empty() ? 0.0 : s / static_cast<double>(results.size());
        }
        emit(json{{"files", results}, {"mean", mean}, {"config", config_json(cfg)}});
      } else {
        if (pred_path->empty() || gt_path->empty())
          throw CLI::RequiredError("eval needs --pred and --gt (or --list)");
        InstanceMap pred = read_instance_map(*pred_path);
        InstanceMap gt = read_instance_map(*gt_path);
        json j = eval_pair(pred, gt);
        j["config"] = config_json(cfg);
        emit(j);
      }
    });
  }

  // eval-det: point detections against ground-truth points
  {
    auto [cmd, ca] = add_cmd("eval-det", "detection precision/recall/F1");
    auto pred_path = std::make_shared<std::string>();
    auto gt_path = std::make_shared<std::string>();
    cmd->add_option("--pred", *pred_path, "predicted points CSV")->required();
    cmd->add_option("--gt", *gt_path, "ground-truth points CSV")->required();
    cmd->callback([ca, pred_path, gt_path] {
      PipelineConfig cfg = ca->resolve();
      PointSet pred = read_points_csv(*pred_path);
      PointSet gt = read_points_csv(*gt_path);
      DetectionPRF r = detection_prf(pred, gt, cfg.match_radius);
      emit(json{{"precision", r.precision},
                {"recall", r.recall},
                {"f1", r.f1},
                {"tp", r.tp},
                {"pred", pred.size()},
                {"gt", gt.size()},
                {"config", config_json(cfg)}});
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
