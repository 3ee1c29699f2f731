#ifndef SLIDESEG_EVALUATE_HPP
#define SLIDESEG_EVALUATE_HPP

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slideseg/connected.hpp"
#include "slideseg/io/records.hpp"
#include "slideseg/metrics.hpp"
#include "slideseg/region_analysis.hpp"

namespace slideseg {

struct EvaluationOptions {
  std::int64_t min_ref_region_area = 1600;  // reference-region floor, px
  double alpha = 0.05;
};

/// Reference regions below the configured floor are background-segmentation
/// artefacts and are dropped before region matching. Predicted masks are
/// used as-is; their cleaning belongs to the pipeline.
inline std::vector<Region> reference_regions(const MaskImage& ref, std::int64_t min_area) {
  std::vector<Region> regions = connected_components(ref);
  std::erase_if(regions, [&](const Region& r) { return r.area < min_area; });
  return regions;
}

/// Build the per-scan evaluation row from a prediction/reference mask pair.
inline ScanRecord make_scan_record(const std::string& scan_id, const std::string& cohort,
                                   const std::string& scanner, const MaskImage& pred,
                                   const MaskImage& ref,
                                   const EvaluationOptions& opt = {}) {
  ScanRecord rec;
  rec.scan_id = scan_id;
  rec.cohort = cohort;
  rec.scanner = scanner;

  const ContingencyTable table = contingency(pred, ref);
  rec.stats = summary_stats(table);
  rec.no_prediction = (table.tp + table.fp) == 0;

  const std::vector<Region> ref_regions = reference_regions(ref, opt.min_ref_region_area);
  const std::vector<Region> pred_regions = connected_components(pred);
  const Correspondence corr = correspond(ref_regions, pred_regions);
  rec.tp_regions = static_cast<std::int64_t>(corr.pairs.size());
  rec.fn_regions = static_cast<std::int64_t>(corr.unmatched_ref.size());
  rec.fp_regions = static_cast<std::int64_t>(corr.unmatched_pred.size());

  const double px_to_mm2 = (pred.spacing() / 1000.0) * (pred.spacing() / 1000.0);
  rec.manual_area_mm2 = static_cast<double>(table.tp + table.fn) * px_to_mm2;
  rec.predicted_area_mm2 = static_cast<double>(table.tp + table.fp) * px_to_mm2;
  return rec;
}

struct CohortResult {
  std::string cohort;
  std::size_t n = 0;
  MeanCI dsc_ci{};
  std::size_t no_prediction_count = 0;
  double no_prediction_fraction = 0.0;
};

/// Per-cohort aggregation: mean DSC with a Student-t CI and the separately
/// reported no-prediction fraction. No-prediction scans score DSC 0 and stay
/// in the mean.
inline std::vector<CohortResult> aggregate_cohorts(const std::vector<ScanRecord>& records,
                                                   double alpha = 0.05) {
  std::map<std::string, std::vector<const ScanRecord*>> by_cohort;
  for (const ScanRecord& r : records) by_cohort[r.cohort].push_back(&r);

  std::vector<CohortResult> out;
  for (const auto& [cohort, rows] : by_cohort) {
    CohortResult res;
    res.cohort = cohort;
    res.n = rows.size();
    std::vector<double> dscs;
    for (const ScanRecord* r : rows) {
      dscs.push_back(r->dsc_or_zero());
      if (r->no_prediction) ++res.no_prediction_count;
    }
    res.no_prediction_fraction =
        static_cast<double>(res.no_prediction_count) / static_cast<double>(res.n);
    if (dscs.size() >= 2) {
      res.dsc_ci = cohort_mean_ci(dscs, alpha);
    } else {
      res.dsc_ci = MeanCI{1, dscs[0], dscs[0], dscs[0], alpha};
    }
    out.push_back(std::move(res));
  }
  return out;
}

inline nlohmann::json cohorts_to_json(const std::vector<CohortResult>& cohorts) {
  nlohmann::json out = nlohmann::json::array();
  for (const CohortResult& c : cohorts) {
    out.push_back(nlohmann::json{{"cohort", c.cohort},
                                 {"n", c.n},
                                 {"mean_dsc", c.dsc_ci.mean},
                                 {"ci_lo", c.dsc_ci.lo},
                                 {"ci_hi", c.dsc_ci.hi},
                                 {"alpha", c.dsc_ci.alpha},
                                 {"no_prediction_count", c.no_prediction_count},
                                 {"no_prediction_fraction", c.no_prediction_fraction}});
  }
  return out;
}

/// Region-level analysis of one scan, feeding the `regions` report.
struct ScanRegionAnalysis {
  std::string scan_id;
  Correspondence correspondence;
  std::vector<ContingencyTable> pair_tables;
  std::vector<std::size_t> ref_histogram;
  std::vector<std::size_t> pred_histogram;
};

inline ScanRegionAnalysis analyze_scan_regions(const std::string& scan_id, const MaskImage& pred,
                                               const MaskImage& ref,
                                               const EvaluationOptions& opt = {}) {
  ScanRegionAnalysis out;
  out.scan_id = scan_id;
  const std::vector<Region> refs = reference_regions(ref, opt.min_ref_region_area);
  const std::vector<Region> preds = connected_components(pred);
  out.correspondence = correspond(refs, preds);
  for (const RegionPair& p : out.correspondence.pairs) {
    const Region* r = nullptr;
    const Region* q = nullptr;
    for (const Region& cand : refs)
      if (cand.id == p.ref_id) r = &cand;
    for (const Region& cand : preds)
      if (cand.id == p.pred_id) q = &cand;
    out.pair_tables.push_back(pair_contingency(*r, *q));
  }
  out.ref_histogram = region_size_histogram(refs, ref.spacing());
  out.pred_histogram = region_size_histogram(preds, pred.spacing());
  return out;
}

}  // namespace slideseg

#endif  // SLIDESEG_EVALUATE_HPP
