#pragma once

#include "bonus/raster.hpp"

namespace bonus {

struct DetectionPRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0;
};

// One-to-one detection matching: globally closest (pred, gt) pairs within
// match_radius are matched greedily (distance ties broken by pred index,
// then gt index). Empty denominators yield 0.
DetectionPRF detection_prf(const PointSet& pred, const PointSet& gt, double match_radius);

struct PixelScores {
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Pixel-level accuracy and F1 over binary masks (interpreted > 0.5).
// Both masks empty -> f1 = 1.
PixelScores pixel_accuracy_f1(const RasterF32& pred_binary, const RasterF32& gt_binary);

// Aggregated Jaccard index. Each gt instance is matched to the pred instance
// of maximal IoU (ties: lower pred id); gt instances with no overlapping
// pred contribute their area to the denominator. Unmatched pred areas are
// added to the denominator. Empty gt and pred -> 1.
double aji(const InstanceMap& pred, const InstanceMap& gt);

struct PanopticQuality {
  double dq = 0.0;
  double sq = 0.0;
  double pq = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
};

// Panoptic quality under strict IoU > 0.5 matching (unique by construction):
// DQ = TP / (TP + FP/2 + FN/2), SQ = mean matched IoU (0 if none),
// PQ = DQ * SQ. Empty gt and pred -> all 1.
PanopticQuality panoptic_quality(const InstanceMap& pred, const InstanceMap& gt);

// Symmetric object-level Dice: on each side, every object is paired with the
// opposite object of maximal overlap (ties: lower id; none -> 0) and its
// Dice is weighted by the object's share of that side's total area; the two
// sides are averaged. Empty vs empty -> 1.
double object_dice(const InstanceMap& pred, const InstanceMap& gt);

}  // namespace bonus
