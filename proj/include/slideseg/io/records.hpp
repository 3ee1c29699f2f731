#ifndef SLIDESEG_IO_RECORDS_HPP
#define SLIDESEG_IO_RECORDS_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideseg/metrics.hpp"

namespace slideseg {

/// Per-scan evaluation row: the primary DSC, the full summary-stat set,
/// region counts and areas, plus free-form covariates for correlation
/// analyses.
struct ScanRecord {
  std::string scan_id;
  std::string cohort;
  std::string scanner;
  SummaryStats stats;
  bool no_prediction = false;
  std::int64_t tp_regions = 0;
  std::int64_t fp_regions = 0;
  std::int64_t fn_regions = 0;
  double manual_area_mm2 = 0.0;
  double predicted_area_mm2 = 0.0;
  std::map<std::string, double> covariates;

  double dsc_or_zero() const { return stats.dsc.value_or(0.0); }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // shortest round-trip representation
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

inline std::optional<double> parse_optional_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error("records: bad numeric field '" + s + "'");
  return v;
}

}  // namespace detail

inline const std::vector<std::string>& record_fixed_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = {"scan_id", "cohort", "scanner"};
    for (const std::string& s : SummaryStats::names()) c.push_back(s);
    c.insert(c.end(), {"no_prediction", "tp_regions", "fp_regions", "fn_regions",
                       "manual_area_mm2", "predicted_area_mm2"});
    return c;
  }();
  return cols;
}

/// Fixed-header UTF-8 CSV with LF line endings. Covariate columns, when any
/// record carries covariates, are appended after the fixed columns in
/// sorted key order. Undefined statistics serialize as empty fields.
inline void save_records_csv(const std::vector<ScanRecord>& records, const std::string& path) {
  std::set<std::string> covariate_keys;
  for (const ScanRecord& r : records)
    for (const auto& [k, v] : r.covariates) covariate_keys.insert(k);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("records: cannot write " + path);

  std::string header;
  for (const std::string& c : record_fixed_columns()) header += c + ",";
  for (const std::string& k : covariate_keys) header += k + ",";
  header.pop_back();
  out << header << "\n";

  for (const ScanRecord& r : records) {
    out << r.scan_id << "," << r.cohort << "," << r.scanner;
    for (const auto& v : r.stats.values())
      out << "," << (v ? detail::format_double(*v) : "");
    out << "," << (r.no_prediction ? 1 : 0) << "," << r.tp_regions << "," << r.fp_regions
        << "," << r.fn_regions << "," << detail::format_double(r.manual_area_mm2) << ","
        << detail::format_double(r.predicted_area_mm2);
    for (const std::string& k : covariate_keys) {
      out << ",";
      const auto it = r.covariates.find(k);
      if (it != r.covariates.end()) out << detail::format_double(it->second);
    }
    out << "\n";
  }
}

inline std::vector<ScanRecord> load_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("records: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records: empty file " + path);
  const std::vector<std::string> header = detail::split_csv_line(line);
  const std::vector<std::string>& fixed = record_fixed_columns();
  if (header.size() < fixed.size())
    throw std::runtime_error("records: bad header in " + path);
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i])
      throw std::runtime_error("records: unexpected column '" + header[i] + "' in " + path);

  std::vector<ScanRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = detail::split_csv_line(line);
    if (f.size() != header.size())
      throw std::runtime_error("records: field count mismatch in " + path);
    ScanRecord r;
    std::size_t i = 0;
    r.scan_id = f[i++];
    r.cohort = f[i++];
    r.scanner = f[i++];
    auto next = [&] { return detail::parse_optional_double(f[i++]); };
    r.stats.dsc = next();
    r.stats.jaccard = next();
    r.stats.sensitivity = next();
    r.stats.specificity = next();
    r.stats.precision = next();
    r.stats.npv = next();
    r.stats.fpr = next();
    r.stats.fnr = next();
    r.stats.accuracy = next();
    r.stats.balanced_accuracy = next();
    r.stats.mcc = next();
    r.stats.prevalence = next();
    r.stats.predicted_positive_fraction = next();
    r.no_prediction = f[i++] == "1";
    r.tp_regions = static_cast<std::int64_t>(*detail::parse_optional_double(f[i++]));
    r.fp_regions = static_cast<std::int64_t>(*detail::parse_optional_double(f[i++]));
    r.fn_regions = static_cast<std::int64_t>(*detail::parse_optional_double(f[i++]));
    r.manual_area_mm2 = *detail::parse_optional_double(f[i++]);
    r.predicted_area_mm2 = *detail::parse_optional_double(f[i++]);
    for (std::size_t c = fixed.size(); c < header.size(); ++c)
      if (auto v = detail::parse_optional_double(f[c])) r.covariates[header[c]] = *v;
    records.push_back(std::move(r));
  }
  return records;
}

/// Pull one named numeric column (fixed statistic or covariate) out of a
/// record set, skipping records where it is missing.
inline std::vector<std::pair<std::string, double>> column_values(
    const std::vector<ScanRecord>& records, const std::string& column) {
  std::vector<std::pair<std::string, double>> out;
  const std::vector<std::string>& stat_names = SummaryStats::names();
  for (const ScanRecord& r : records) {
    std::optional<double> v;
    if (column == "no_prediction") v = r.no_prediction ? 1.0 : 0.0;
    else if (column == "tp_regions") v = static_cast<double>(r.tp_regions);
    else if (column == "fp_regions") v = static_cast<double>(r.fp_regions);
    else if (column == "fn_regions") v = static_cast<double>(r.fn_regions);
    else if (column == "manual_area_mm2") v = r.manual_area_mm2;
    else if (column == "predicted_area_mm2") v = r.predicted_area_mm2;
    else {
      const auto s = std::find(stat_names.begin(), stat_names.end(), column);
      if (s != stat_names.end()) {
        v = r.stats.values()[static_cast<std::size_t>(s - stat_names.begin())];
      } else {
        const auto it = r.covariates.find(column);
        if (it != r.covariates.end()) v = it->second;
      }
    }
    if (v) out.emplace_back(r.scan_id, *v);
  }
  return out;
}

/// Paired per-scan comparison joined on scan id.
struct PairedComparison {
  std::vector<std::string> scan_ids;   // matched ids, in a's order
  std::vector<double> differences;     // a - b per matched scan
  double mean_difference = 0.0;
  double mean_abs_difference = 0.0;
  std::size_t no_prediction_a = 0;     // over matched scans
  std::size_t no_prediction_b = 0;
};

inline PairedComparison compare_per_scan(const std::vector<ScanRecord>& a,
                                         const std::vector<ScanRecord>& b) {
  std::map<std::string, const ScanRecord*> b_by_id;
  for (const ScanRecord& r : b) b_by_id[r.scan_id] = &r;

  PairedComparison out;
  double sum = 0.0;
  double abs_sum = 0.0;
  for (const ScanRecord& ra : a) {
    const auto it = b_by_id.find(ra.scan_id);
    if (it == b_by_id.end()) continue;
    const ScanRecord& rb = *it->second;
    const double d = ra.dsc_or_zero() - rb.dsc_or_zero();
    out.scan_ids.push_back(ra.scan_id);
    out.differences.push_back(d);
    sum += d;
    abs_sum += std::fabs(d);
    if (ra.no_prediction) ++out.no_prediction_a;
    if (rb.no_prediction) ++out.no_prediction_b;
  }
  if (out.differences.empty())
    throw std::invalid_argument("compare_per_scan: no common scan ids");
  out.mean_difference = sum / static_cast<double>(out.differences.size());
  out.mean_abs_difference = abs_sum / static_cast<double>(out.differences.size());
  return out;
}

}  // namespace slideseg

#endif  // SLIDESEG_IO_RECORDS_HPP
