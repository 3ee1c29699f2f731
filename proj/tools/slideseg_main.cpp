// Command-line surface for the slide segmentation and evaluation toolkit.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slideseg/slideseg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  int workers = 1;
  std::uint64_t seed = 0;
};

struct LoadedConfig {
  slideseg::PipelineConfig pipeline;
  slideseg::BackendDescriptor backend;
};

LoadedConfig load_config(const GlobalOptions& g) {
  LoadedConfig c;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw std::runtime_error("cannot open config " + g.config_path);
    json j;
    in >> j;
    if (j.contains("pipeline")) c.pipeline = slideseg::PipelineConfig::from_json(j["pipeline"]);
    if (j.contains("backend")) c.backend = slideseg::BackendDescriptor::from_json(j["backend"]);
  }
  c.pipeline.workers = g.workers;
  if (g.seed != 0) c.backend.noise_seed = g.seed;
  return c;
}

std::string score_path(const std::string& dir, const std::string& scan_id) {
  return dir + "/" + scan_id + "_score.png";
}
std::string mask_path(const std::string& dir, const std::string& scan_id) {
  return dir + "/" + scan_id + "_mask.png";
}
std::string sidecar_path(const std::string& dir, const std::string& scan_id) {
  return dir + "/" + scan_id + ".json";
}

int cmd_segment(const GlobalOptions& g, const std::string& manifest_path,
                const std::string& out_dir) {
  const LoadedConfig cfg = load_config(g);
  const slideseg::SlideManifest manifest = slideseg::load_manifest(manifest_path);
  if (manifest.scans.empty()) throw std::runtime_error("segment: manifest has no scans");
  fs::create_directories(out_dir);

  int failures = 0;
  for (const slideseg::ManifestEntry& scan : manifest.scans) {
    try {
      const auto start = std::chrono::steady_clock::now();
      const slideseg::RgbImage slide = slideseg::read_png_rgb(scan.rgb_path, scan.spacing_um);
      std::optional<slideseg::MaskImage> reference;
      if (!scan.reference_mask_path.empty())
        reference = slideseg::read_png_mask(scan.reference_mask_path, scan.spacing_um);

      slideseg::BackendDescriptor backend = cfg.backend;
      if (backend.kind == slideseg::BackendDescriptor::Kind::score_cache &&
          !scan.score_cache_dir.empty())
        backend.cache_dir = scan.score_cache_dir;

      const slideseg::PipelineResult result = slideseg::run_pipeline(
          slide, reference ? &*reference : nullptr, backend, cfg.pipeline);

      slideseg::write_png_score(score_path(out_dir, scan.scan_id), result.score);
      slideseg::write_png_mask(mask_path(out_dir, scan.scan_id), result.mask);

      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
      json sidecar{{"scan_id", scan.scan_id},
                   {"pipeline", cfg.pipeline.to_json()},
                   {"no_prediction", result.no_prediction},
                   {"elapsed_seconds", elapsed.count()}};
      std::ofstream side(sidecar_path(out_dir, scan.scan_id));
      side << sidecar.dump(2) << "\n";
      std::cerr << "segmented " << scan.scan_id << " in " << elapsed.count() << " s\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "FAILED " << scan.scan_id << ": " << e.what() << "\n";
    }
  }
  if (failures) std::cerr << failures << "/" << manifest.scans.size() << " scans failed\n";
  return failures ? 1 : 0;
}

double prediction_spacing(const std::string& pred_dir, const std::string& scan_id,
                          double fallback) {
  const std::string side = sidecar_path(pred_dir, scan_id);
  if (fs::exists(side)) {
    std::ifstream in(side);
    json j;
    in >> j;
    if (j.contains("pipeline")) return j["pipeline"].value("working_spacing", fallback);
  }
  return fallback;
}

int cmd_evaluate(const GlobalOptions&, const std::string& manifest_path,
                 const std::string& pred_dir, const std::string& out_csv,
                 const std::string& out_json, const std::string& on_missing, double alpha,
                 double fallback_spacing) {
  const slideseg::SlideManifest manifest = slideseg::load_manifest(manifest_path);
  std::vector<slideseg::ScanRecord> records;
  std::size_t missing = 0;
  for (const slideseg::ManifestEntry& scan : manifest.scans) {
    if (scan.reference_mask_path.empty())
      throw std::runtime_error("evaluate: scan '" + scan.scan_id + "' has no reference mask");
    const std::string pred_path = mask_path(pred_dir, scan.scan_id);
    const double spacing = prediction_spacing(pred_dir, scan.scan_id, fallback_spacing);
    const slideseg::MaskImage ref_native =
        slideseg::read_png_mask(scan.reference_mask_path, scan.spacing_um);
    const slideseg::MaskImage ref = slideseg::downscale(ref_native, spacing);

    if (!fs::exists(pred_path)) {
      ++missing;
      if (on_missing == "fail")
        throw std::runtime_error("evaluate: missing prediction for '" + scan.scan_id + "'");
      if (on_missing == "skip") {
        std::cerr << "skipping " << scan.scan_id << " (missing prediction)\n";
        continue;
      }
      // zero: treat as an empty prediction
      const slideseg::MaskImage empty(ref.width(), ref.height(), 1, ref.spacing(), 0);
      records.push_back(slideseg::make_scan_record(scan.scan_id, scan.cohort, scan.scanner,
                                                   empty, ref));
      continue;
    }
    const slideseg::MaskImage pred = slideseg::read_png_mask(pred_path, spacing);
    records.push_back(
        slideseg::make_scan_record(scan.scan_id, scan.cohort, scan.scanner, pred, ref));
  }

  slideseg::save_records_csv(records, out_csv);
  const std::vector<slideseg::CohortResult> cohorts = slideseg::aggregate_cohorts(records, alpha);
  json out{{"cohorts", slideseg::cohorts_to_json(cohorts)},
           {"n_records", records.size()},
           {"n_missing", missing}};
  std::ofstream jout(out_json);
  jout << out.dump(2) << "\n";
  for (const slideseg::CohortResult& c : cohorts)
    std::cout << c.cohort << ": n=" << c.n << " mean DSC=" << c.dsc_ci.mean << " ["
              << c.dsc_ci.lo << ", " << c.dsc_ci.hi << "], no-prediction "
              << c.no_prediction_count << " (" << 100.0 * c.no_prediction_fraction << "%)\n";
  return 0;
}

int cmd_regions(const GlobalOptions&, const std::string& manifest_path,
                const std::string& pred_dir, const std::string& out_dir,
                double fallback_spacing) {
  const slideseg::SlideManifest manifest = slideseg::load_manifest(manifest_path);
  fs::create_directories(out_dir);

  std::map<std::string, std::vector<std::vector<slideseg::ContingencyTable>>> pair_tables;
  std::map<std::string, std::vector<std::size_t>> ref_hist;
  std::map<std::string, std::vector<std::size_t>> pred_hist;
  std::ofstream per_scan(out_dir + "/region_counts.csv", std::ios::binary);
  per_scan << "scan_id,cohort,tp_regions,fp_regions,fn_regions\n";

  for (const slideseg::ManifestEntry& scan : manifest.scans) {
    const double spacing = prediction_spacing(pred_dir, scan.scan_id, fallback_spacing);
    const slideseg::MaskImage ref = slideseg::downscale(
        slideseg::read_png_mask(scan.reference_mask_path, scan.spacing_um), spacing);
    const slideseg::MaskImage pred =
        slideseg::read_png_mask(mask_path(pred_dir, scan.scan_id), spacing);
    const slideseg::ScanRegionAnalysis a =
        slideseg::analyze_scan_regions(scan.scan_id, pred, ref);

    per_scan << scan.scan_id << "," << scan.cohort << "," << a.correspondence.pairs.size()
             << "," << a.correspondence.unmatched_pred.size() << ","
             << a.correspondence.unmatched_ref.size() << "\n";

    pair_tables[scan.cohort].push_back(a.pair_tables);
    auto accumulate = [](std::vector<std::size_t>& total, const std::vector<std::size_t>& h) {
      if (total.empty()) total.assign(h.size(), 0);
      for (std::size_t i = 0; i < h.size(); ++i) total[i] += h[i];
    };
    accumulate(ref_hist[scan.cohort], a.ref_histogram);
    accumulate(pred_hist[scan.cohort], a.pred_histogram);
  }

  const std::vector<double> edges = slideseg::default_area_bin_edges();
  std::ofstream hist(out_dir + "/size_histograms.csv", std::ios::binary);
  hist << "cohort,mask,bin_lo_mm2,bin_hi_mm2,count\n";
  auto dump_hist = [&](const std::string& cohort, const std::string& which,
                       const std::vector<std::size_t>& counts) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const std::string lo = i == 0 ? "-inf" : std::to_string(edges[i - 1]);
      const std::string hi = i == counts.size() - 1 ? "inf" : std::to_string(edges[i]);
      hist << cohort << "," << which << "," << lo << "," << hi << "," << counts[i] << "\n";
    }
  };
  json tp_json = json::array();
  for (const auto& [cohort, images] : pair_tables) {
    dump_hist(cohort, "reference", ref_hist[cohort]);
    dump_hist(cohort, "predicted", pred_hist[cohort]);
    const slideseg::TpOnlyDsc tp = slideseg::tp_only_dsc(images);
    tp_json.push_back(json{{"cohort", cohort},
                           {"contributing_images", tp.per_image.size()},
                           {"excluded_images", tp.excluded},
                           {"mean_tp_only_dsc", tp.mean}});
    std::cout << cohort << ": TP-only DSC " << tp.mean << " over " << tp.per_image.size()
              << " images (" << tp.excluded << " excluded)\n";
  }
  std::ofstream jout(out_dir + "/tp_only_dsc.json");
  jout << json{{"cohorts", tp_json}}.dump(2) << "\n";
  return 0;
}

int cmd_correlate(const std::string& records_path, const std::string& x_col,
                  const std::string& y_col, double alpha, const std::string& out_json) {
  const std::vector<slideseg::ScanRecord> records = slideseg::load_records_csv(records_path);
  const auto xs = slideseg::column_values(records, x_col);
  const auto ys = slideseg::column_values(records, y_col);
  std::map<std::string, double> y_by_id(ys.begin(), ys.end());
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [id, v] : xs) {
    const auto it = y_by_id.find(id);
    if (it != y_by_id.end()) {
      x.push_back(v);
      y.push_back(it->second);
    }
  }
  if (x.size() < 4) throw std::runtime_error("correlate: need >= 4 joint non-missing values");

  const slideseg::CorrelationResult res = slideseg::correlate(x, y, alpha);
  json out{{"x", x_col}, {"y", y_col}, {"n", res.n}, {"alpha", alpha}};
  if (res.rho) {
    out["rho"] = *res.rho;
    out["p"] = *res.p;
    out["significant"] = res.significant;
    if (res.ci) {
      out["ci_lo"] = res.ci->first;
      out["ci_hi"] = res.ci->second;
    }
    std::cout << "rho=" << *res.rho << " p=" << *res.p;
    if (res.ci) std::cout << " CI=[" << res.ci->first << ", " << res.ci->second << "]";
    std::cout << (res.significant ? " (significant at 0.05)" : " (not significant)") << "\n";
  } else {
    out["rho"] = nullptr;
    out["undefined"] = true;
    std::cout << "correlation undefined (zero rank variance)\n";
  }
  if (!out_json.empty()) {
    std::ofstream jout(out_json);
    jout << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path,
                const std::string& out_dir) {
  const auto a = slideseg::load_records_csv(a_path);
  const auto b = slideseg::load_records_csv(b_path);
  const slideseg::PairedComparison cmp = slideseg::compare_per_scan(a, b);
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir + "/paired_differences.csv", std::ios::binary);
  csv << "scan_id,dsc_difference\n";
  for (std::size_t i = 0; i < cmp.scan_ids.size(); ++i)
    csv << cmp.scan_ids[i] << "," << cmp.differences[i] << "\n";
  json out{{"n", cmp.scan_ids.size()},
           {"mean_difference", cmp.mean_difference},
           {"mean_abs_difference", cmp.mean_abs_difference},
           {"no_prediction_a", cmp.no_prediction_a},
           {"no_prediction_b", cmp.no_prediction_b}};
  std::ofstream jout(out_dir + "/comparison.json");
  jout << out.dump(2) << "\n";
  std::cout << "n=" << cmp.scan_ids.size() << " mean diff=" << cmp.mean_difference
            << " mean |diff|=" << cmp.mean_abs_difference << "\n";
  return 0;
}

int cmd_synth(const GlobalOptions& g, const std::string& out_dir, int count, int width,
              int height, double spacing, bool fragmentation, const std::string& cohort,
              int min_blobs, int max_blobs) {
  fs::create_directories(out_dir + "/slides");
  fs::create_directories(out_dir + "/masks");
  slideseg::SlideManifest manifest;
  manifest.cohort = cohort;
  for (int i = 0; i < count; ++i) {
    slideseg::SynthSpec spec;
    spec.seed = slideseg::cohort_slide_seed(g.seed, static_cast<std::size_t>(i));
    spec.width = width;
    spec.height = height;
    spec.spacing_um = spacing;
    spec.fragmentation = fragmentation;
    spec.min_blobs = min_blobs;
    spec.max_blobs = max_blobs;
    const slideseg::SynthSlide s = slideseg::synth_slide(spec);

    char id[32];
    std::snprintf(id, sizeof id, "scan_%03d", i);
    const std::string rgb = out_dir + "/slides/" + id + ".png";
    const std::string mask = out_dir + "/masks/" + id + ".png";
    slideseg::write_png_rgb(rgb, s.slide);
    slideseg::write_png_mask(mask, s.mask);
    manifest.scans.push_back(slideseg::ManifestEntry{
        id, cohort, "synthetic", "slides/" + std::string(id) + ".png", spacing,
        "masks/" + std::string(id) + ".png", ""});
  }
  slideseg::save_manifest(manifest, out_dir + "/manifest.json");
  std::cout << "wrote " << count << " slides to " << out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& records_path, const std::string& out_dir,
               const std::string& x_col, const std::string& y_col) {
  const std::vector<slideseg::ScanRecord> records = slideseg::load_records_csv(records_path);
  fs::create_directories(out_dir);

  std::map<std::string, std::vector<double>> by_cohort;
  for (const slideseg::ScanRecord& r : records) by_cohort[r.cohort].push_back(r.dsc_or_zero());
  std::vector<slideseg::ViolinGroup> groups;
  for (const auto& [cohort, values] : by_cohort)
    if (values.size() >= 2) groups.push_back(slideseg::ViolinGroup{cohort, values});
  if (!groups.empty()) {
    slideseg::plot_violin(groups, out_dir + "/dsc_violin.svg");
    std::cout << "wrote " << out_dir << "/dsc_violin.svg\n";
  }

  if (!x_col.empty() && !y_col.empty()) {
    const auto xs = slideseg::column_values(records, x_col);
    const auto ys = slideseg::column_values(records, y_col);
    std::map<std::string, double> y_by_id(ys.begin(), ys.end());
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [id, v] : xs) {
      const auto it = y_by_id.find(id);
      if (it != y_by_id.end()) {
        x.push_back(v);
        y.push_back(it->second);
      }
    }
    slideseg::plot_scatter_density(x, y, out_dir + "/scatter_density.svg");
    std::cout << "wrote " << out_dir << "/scatter_density.svg\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whole-slide tumour segmentation and evaluation toolkit"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON pipeline/backend config");
  app.add_option("--workers", g.workers, "worker thread count")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "master random seed");

  std::string manifest_path;
  std::string out_dir;
  std::string pred_dir;
  std::string out_csv = "records.csv";
  std::string out_json = "cohorts.json";
  std::string on_missing = "fail";
  std::string records_path;
  std::string records_b_path;
  std::string x_col;
  std::string y_col;
  double alpha = 0.05;
  double fallback_spacing = 1.0;
  int count = 10;
  int width = 2000;
  int height = 2000;
  double spacing = 1.0;
  bool fragmentation = false;
  std::string cohort = "synthetic";
  int min_blobs = 2;
  int max_blobs = 5;

  CLI::App* segment = app.add_subcommand("segment", "segment every scan in a manifest");
  segment->add_option("--manifest", manifest_path)->required();
  segment->add_option("--out", out_dir)->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "per-scan metrics and cohort summary");
  evaluate->add_option("--manifest", manifest_path)->required();
  evaluate->add_option("--predictions", pred_dir)->required();
  evaluate->add_option("--out-csv", out_csv);
  evaluate->add_option("--out-json", out_json);
  evaluate->add_option("--on-missing", on_missing)
      ->check(CLI::IsMember({"skip", "zero", "fail"}));
  evaluate->add_option("--alpha", alpha);
  evaluate->add_option("--spacing", fallback_spacing, "prediction spacing when no sidecar");

  CLI::App* regions = app.add_subcommand("regions", "region correspondence analyses");
  regions->add_option("--manifest", manifest_path)->required();
  regions->add_option("--predictions", pred_dir)->required();
  regions->add_option("--out", out_dir)->required();
  regions->add_option("--spacing", fallback_spacing);

  CLI::App* correlate = app.add_subcommand("correlate", "Spearman correlation of two columns");
  correlate->add_option("--records", records_path)->required();
  correlate->add_option("--x", x_col)->required();
  correlate->add_option("--y", y_col)->required();
  correlate->add_option("--alpha", alpha);
  correlate->add_option("--out", out_json)->default_val("");

  CLI::App* compare = app.add_subcommand("compare", "paired per-scan comparison of two runs");
  compare->add_option("--a", records_path)->required();
  compare->add_option("--b", records_b_path)->required();
  compare->add_option("--out", out_dir)->required();

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic cohort");
  synth->add_option("--out", out_dir)->required();
  synth->add_option("--count", count)->check(CLI::PositiveNumber);
  synth->add_option("--width", width);
  synth->add_option("--height", height);
  synth->add_option("--spacing", spacing);
  synth->add_flag("--fragmentation", fragmentation);
  synth->add_option("--cohort", cohort);
  synth->add_option("--min-blobs", min_blobs);
  synth->add_option("--max-blobs", max_blobs);

  CLI::App* report = app.add_subcommand("report", "violin and density-scatter plots");
  report->add_option("--records", records_path)->required();
  report->add_option("--out", out_dir)->required();
  report->add_option("--x", x_col);
  report->add_option("--y", y_col);

  CLI11_PARSE(app, argc, argv);

  try {
    if (segment->parsed()) return cmd_segment(g, manifest_path, out_dir);
    if (evaluate->parsed())
      return cmd_evaluate(g, manifest_path, pred_dir, out_csv, out_json, on_missing, alpha,
                          fallback_spacing);
    if (regions->parsed()) return cmd_regions(g, manifest_path, pred_dir, out_dir, fallback_spacing);
    if (correlate->parsed()) return cmd_correlate(records_path, x_col, y_col, alpha, out_json);
    if (compare->parsed()) return cmd_compare(records_path, records_b_path, out_dir);
    if (synth->parsed())
      return cmd_synth(g, out_dir, count, width, height, spacing, fragmentation, cohort,
                       min_blobs, max_blobs);
    if (report->parsed()) return cmd_report(records_path, out_dir, x_col, y_col);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
