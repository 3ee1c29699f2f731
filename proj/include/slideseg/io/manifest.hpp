#ifndef SLIDESEG_IO_MANIFEST_HPP
#define SLIDESEG_IO_MANIFEST_HPP

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace slideseg {

constexpr int kManifestFormatVersion = 1;

/// One scan entry in a cohort manifest. Paths are resolved relative to the
/// manifest file's directory.
struct ManifestEntry {
  std::string scan_id;
  std::string cohort;
  std::string scanner;
  std::string rgb_path;
  double spacing_um = 0.0;
  std::string reference_mask_path;  // optional
  std::string score_cache_dir;      // optional
};

struct SlideManifest {
  std::string cohort;
  std::vector<ManifestEntry> scans;
};

inline SlideManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format_version", 0) != kManifestFormatVersion)
    throw std::runtime_error("manifest: unsupported format_version in " + path);

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
    return (base / p).string();
  };

  SlideManifest m;
  m.cohort = j.value("cohort", "");
  std::set<std::string> seen_ids;
  for (const auto& s : j.at("scans")) {
    ManifestEntry e;
    e.scan_id = s.at("scan_id").get<std::string>();
    e.cohort = s.value("cohort", m.cohort);
    e.scanner = s.value("scanner", "");
    e.rgb_path = resolve(s.at("rgb_path").get<std::string>());
    e.spacing_um = s.at("spacing_um").get<double>();
    e.reference_mask_path = resolve(s.value("reference_mask_path", ""));
    e.score_cache_dir = resolve(s.value("score_cache_dir", ""));

    if (!seen_ids.insert(e.scan_id).second)
      throw std::runtime_error("manifest: duplicate scan_id '" + e.scan_id + "'");
    if (!(e.spacing_um > 0.0))
      throw std::runtime_error("manifest: non-positive spacing for scan '" + e.scan_id + "'");
    if (!std::filesystem::exists(e.rgb_path))
      throw std::runtime_error("manifest: missing slide file " + e.rgb_path);
    if (!e.reference_mask_path.empty() && !std::filesystem::exists(e.reference_mask_path))
      throw std::runtime_error("manifest: missing reference mask " + e.reference_mask_path);
    m.scans.push_back(std::move(e));
  }
  return m;
}

inline void save_manifest(const SlideManifest& m, const std::string& path) {
  nlohmann::json scans = nlohmann::json::array();
  for (const ManifestEntry& e : m.scans) {
    nlohmann::json s{{"scan_id", e.scan_id},
                     {"cohort", e.cohort},
                     {"scanner", e.scanner},
                     {"rgb_path", e.rgb_path},
                     {"spacing_um", e.spacing_um}};
    if (!e.reference_mask_path.empty()) s["reference_mask_path"] = e.reference_mask_path;
    if (!e.score_cache_dir.empty()) s["score_cache_dir"] = e.score_cache_dir;
    scans.push_back(std::move(s));
  }
  nlohmann::json j{{"format_version", kManifestFormatVersion},
                   {"cohort", m.cohort},
                   {"scans", std::move(scans)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("manifest: cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace slideseg

#endif  // SLIDESEG_IO_MANIFEST_HPP
