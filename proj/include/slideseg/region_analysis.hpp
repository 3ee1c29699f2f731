#ifndef SLIDESEG_REGION_ANALYSIS_HPP
#define SLIDESEG_REGION_ANALYSIS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "slideseg/connected.hpp"
#include "slideseg/metrics.hpp"

namespace slideseg {

/// One matched (reference, predicted) region pair at IoU > 0.5.
struct RegionPair {
  int ref_id = 0;
  int pred_id = 0;
  double iou = 0.0;
};

/// Region correspondence between a reference and a predicted mask.
/// Because IoU > 0.5 implies each region overlaps its partner in more than
/// half of either area, the matching is one-to-one by construction.
struct Correspondence {
  std::vector<RegionPair> pairs;
  std::vector<int> unmatched_ref;
  std::vector<int> unmatched_pred;
};

inline bool bbox_overlaps(const Rect& a, const Rect& b) {
  return a.x0 < b.x0 + b.width && b.x0 < a.x0 + a.width &&
         a.y0 < b.y0 + b.height && b.y0 < a.y0 + a.height;
}

/// Pair reference and predicted regions whose IoU exceeds 0.5.
inline Correspondence correspond(const std::vector<Region>& ref_regions,
                                 const std::vector<Region>& pred_regions) {
  Correspondence c;
  std::vector<bool> pred_matched(pred_regions.size(), false);
  for (const Region& r : ref_regions) {
    bool matched = false;
    for (std::size_t j = 0; j < pred_regions.size(); ++j) {
      const Region& p = pred_regions[j];
      if (!bbox_overlaps(r.bbox, p.bbox)) continue;
      const double iou = region_iou(r, p);
      if (iou > 0.5) {
        if (pred_matched[j])
          throw std::logic_error("correspond: predicted region matched twice");
        c.pairs.push_back(RegionPair{r.id, p.id, iou});
        pred_matched[j] = true;
        matched = true;
        break;  // one-to-one: no other predicted region can exceed 0.5
      }
    }
    if (!matched) c.unmatched_ref.push_back(r.id);
  }
  for (std::size_t j = 0; j < pred_regions.size(); ++j)
    if (!pred_matched[j]) c.unmatched_pred.push_back(pred_regions[j].id);
  return c;
}

/// TP/FN/FP region sets derived from a correspondence.
struct RegionClassification {
  std::vector<int> tp_ref;
  std::vector<int> tp_pred;
  std::vector<int> fn_ref;
  std::vector<int> fp_pred;
};

inline RegionClassification classify_regions(const Correspondence& c) {
  RegionClassification out;
  for (const RegionPair& p : c.pairs) {
    out.tp_ref.push_back(p.ref_id);
    out.tp_pred.push_back(p.pred_id);
  }
  out.fn_ref = c.unmatched_ref;
  out.fp_pred = c.unmatched_pred;
  return out;
}

/// Contingency table over the combined pixel sets of one matched pair.
/// tn is not meaningful for a pair (and dsc ignores it), so it stays 0.
inline ContingencyTable pair_contingency(const Region& ref, const Region& pred) {
  ContingencyTable t;
  t.tp = region_intersection(ref, pred);
  t.fn = ref.area - t.tp;
  t.fp = pred.area - t.tp;
  return t;
}

/// Per-image DSC restricted to corresponding region pairs: pair tables are
/// summed per image, images without pairs are excluded from the mean.
struct TpOnlyDsc {
  std::vector<double> per_image;       // one entry per contributing image
  std::vector<std::size_t> contributing;  // indices of images with >= 1 pair
  std::size_t excluded = 0;
  double mean = 0.0;
};

inline TpOnlyDsc tp_only_dsc(const std::vector<std::vector<ContingencyTable>>& per_image_pairs) {
  TpOnlyDsc out;
  double sum = 0.0;
  for (std::size_t i = 0; i < per_image_pairs.size(); ++i) {
    if (per_image_pairs[i].empty()) {
      ++out.excluded;
      continue;
    }
    ContingencyTable total;
    for (const ContingencyTable& t : per_image_pairs[i]) total += t;
    const double d = dsc(total);
    out.per_image.push_back(d);
    out.contributing.push_back(i);
    sum += d;
  }
  if (!out.per_image.empty()) out.mean = sum / static_cast<double>(out.per_image.size());
  return out;
}

/// Counts of regions falling into mm^2 size bins. Default edges are powers
/// of ten from 1e-3 to 1e3 mm^2, with underflow/overflow bins at the ends.
inline std::vector<double> default_area_bin_edges() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

inline std::vector<std::size_t> region_size_histogram(const std::vector<Region>& regions,
                                                      double spacing_um,
                                                      const std::vector<double>& edges =
                                                          default_area_bin_edges()) {
  if (!(spacing_um > 0.0)) throw std::invalid_argument("region_size_histogram: unknown spacing");
  if (edges.size() < 2) throw std::invalid_argument("region_size_histogram: need >= 2 edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw std::invalid_argument("region_size_histogram: edges must increase");

  // bins: [underflow] [e0,e1) ... [e_{k-1},e_k) [overflow]
  std::vector<std::size_t> counts(edges.size() + 1, 0);
  const double px_to_mm2 = (spacing_um / 1000.0) * (spacing_um / 1000.0);
  for (const Region& r : regions) {
    const double area_mm2 = static_cast<double>(r.area) * px_to_mm2;
    std::size_t bin = 0;
    while (bin < edges.size() && area_mm2 >= edges[bin]) ++bin;
    counts[bin] += 1;
  }
  return counts;
}

}  // namespace slideseg

#endif  // SLIDESEG_REGION_ANALYSIS_HPP
