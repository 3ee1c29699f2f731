#ifndef SLIDESEG_BACKEND_HPP
#define SLIDESEG_BACKEND_HPP

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "slideseg/io/png_io.hpp"
#include "slideseg/raster.hpp"
#include "slideseg/rng.hpp"
#include "slideseg/subprocess.hpp"

namespace slideseg {

/// Configuration for a tile-scoring backend. The trained network is not part
/// of this artifact; these backends are the integration seam that stands in
/// for it.
struct BackendDescriptor {
  enum class Kind { oracle_mock, score_cache, external_process };

  Kind kind = Kind::oracle_mock;
  double noise_sigma = 0.0;        // oracle-mock: clipped Gaussian noise level
  std::uint64_t noise_seed = 0;    // oracle-mock
  std::string cache_dir;           // score-cache
  std::string command;             // external-process

  void validate() const {
    if (kind == Kind::oracle_mock && noise_sigma < 0.0)
      throw std::invalid_argument("backend: oracle-mock noise sigma must be >= 0");
    if (kind == Kind::score_cache && cache_dir.empty())
      throw std::invalid_argument("backend: score-cache needs a directory");
    if (kind == Kind::external_process && command.empty())
      throw std::invalid_argument("backend: external-process needs a command line");
  }

  static BackendDescriptor from_json(const nlohmann::json& j) {
    BackendDescriptor d;
    const std::string kind = j.value("kind", "oracle-mock");
    if (kind == "oracle-mock") d.kind = Kind::oracle_mock;
    else if (kind == "score-cache") d.kind = Kind::score_cache;
    else if (kind == "external-process") d.kind = Kind::external_process;
    else throw std::invalid_argument("backend: unknown kind '" + kind + "'");
    d.noise_sigma = j.value("sigma", 0.0);
    d.noise_seed = j.value("seed", std::uint64_t{0});
    d.cache_dir = j.value("cache_dir", "");
    d.command = j.value("command", "");
    d.validate();
    return d;
  }
};

inline std::string tile_id_for(const Rect& r) {
  return "x" + std::to_string(r.x0) + "_y" + std::to_string(r.y0) + "_w" +
         std::to_string(r.width) + "_h" + std::to_string(r.height);
}

/// Scores fixed-size tiles for one slide. Implementations must be safe to
/// call from multiple threads.
class TileScorer {
 public:
  virtual ~TileScorer() = default;

  /// tile is the padded tile_size x tile_size RGB input; rect is the
  /// unpadded position in the working-resolution image; tile_index is the
  /// canonical grid index (used for per-tile noise streams).
  virtual ScoreImage score(std::size_t tile_index, const Rect& rect, const RgbImage& tile) = 0;
};

/// Ground-truth oracle with optional clipped Gaussian noise. The noise
/// stream is keyed by tile index, so results do not depend on how tiles are
/// distributed over workers.
class OracleMockScorer : public TileScorer {
 public:
  OracleMockScorer(const MaskImage& ground_truth, double sigma, std::uint64_t seed)
      : gt_(&ground_truth), sigma_(sigma), base_rng_(seed) {}

  ScoreImage score(std::size_t tile_index, const Rect& rect, const RgbImage& tile) override {
    ScoreImage out(tile.width(), tile.height(), 1, tile.spacing(), 0.0);
    for (int y = 0; y < rect.height; ++y)
      for (int x = 0; x < rect.width; ++x)
        out.at(x, y) = gt_->at(rect.x0 + x, rect.y0 + y) ? 1.0 : 0.0;
    if (sigma_ > 0.0) {
      Rng rng = base_rng_.fork(tile_index);
      for (auto& v : out.data()) v = std::clamp(v + rng.normal(0.0, sigma_), 0.0, 1.0);
    }
    return out;
  }

 private:
  const MaskImage* gt_;
  double sigma_;
  Rng base_rng_;
};

/// Loads precomputed per-rect score tiles from a directory of 16-bit PNGs
/// named score_<tile_id>.png. Tiles are stored unpadded (rect-sized).
class ScoreCacheScorer : public TileScorer {
 public:
  ScoreCacheScorer(std::string dir, double spacing) : dir_(std::move(dir)), spacing_(spacing) {}

  static std::string tile_path(const std::string& dir, const Rect& r) {
    return dir + "/score_" + tile_id_for(r) + ".png";
  }

  ScoreImage score(std::size_t, const Rect& rect, const RgbImage& tile) override {
    const std::string path = tile_path(dir_, rect);
    if (!std::filesystem::exists(path))
      throw std::runtime_error("score-cache: missing tile " + tile_id_for(rect) + " (" + path + ")");
    ScoreImage cached = read_png_score(path, spacing_);
    if (cached.width() != rect.width || cached.height() != rect.height)
      throw std::runtime_error("score-cache: tile " + tile_id_for(rect) + " has wrong dims");
    // re-pad to the backend tile size so the caller's unpad is uniform
    ScoreImage out(tile.width(), tile.height(), 1, spacing_, 0.0);
    for (int y = 0; y < rect.height; ++y)
      for (int x = 0; x < rect.width; ++x) out.at(x, y) = cached.at(x, y);
    return out;
  }

 private:
  std::string dir_;
  double spacing_;
};

/// Drives an external model over the line protocol: one JSON request per
/// line on the child's stdin ({"tile_id", "path_rgb"}), one JSON response
/// per line on its stdout ({"tile_id", "path_score"}). The parent owns the
/// temp files; the child must answer in order. Requests are serialized per
/// process.
class ExternalProcessScorer : public TileScorer {
 public:
  explicit ExternalProcessScorer(const std::string& command) : process_(command) {
    char tmpl[] = "/tmp/slideseg_backend_XXXXXX";
    if (!mkdtemp(tmpl)) throw std::runtime_error("external-process: mkdtemp failed");
    tmp_dir_ = tmpl;
  }

  ~ExternalProcessScorer() override {
    std::error_code ec;
    std::filesystem::remove_all(tmp_dir_, ec);
  }

  ScoreImage score(std::size_t, const Rect& rect, const RgbImage& tile) override {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::string id = tile_id_for(rect);
    const std::string rgb_path = tmp_dir_ + "/tile_" + id + ".png";
    write_png_rgb(rgb_path, tile);
    nlohmann::json request{{"tile_id", id}, {"path_rgb", rgb_path}};
    process_.write_line(request.dump());

    const std::string line = process_.read_line();
    nlohmann::json response;
    try {
      response = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("external-process: malformed response line '" + line +
                               "': " + e.what());
    }
    if (!response.contains("tile_id") || !response.contains("path_score"))
      throw std::runtime_error("external-process: response missing tile_id/path_score: " + line);
    if (response["tile_id"].get<std::string>() != id)
      throw std::runtime_error("external-process: out-of-order response, expected " + id +
                               " got " + response["tile_id"].get<std::string>());
    ScoreImage out = read_png_score(response["path_score"].get<std::string>(), tile.spacing());
    if (out.width() != tile.width() || out.height() != tile.height())
      throw std::runtime_error("external-process: score tile dims mismatch for " + id);
    std::filesystem::remove(rgb_path);
    std::filesystem::remove(response["path_score"].get<std::string>());
    return out;
  }

 private:
  LineProcess process_;
  std::string tmp_dir_;
  std::mutex mutex_;
};

/// Build a scorer for one slide. ground_truth must outlive the scorer when
/// the backend is an oracle mock.
inline std::unique_ptr<TileScorer> make_scorer(const BackendDescriptor& d,
                                               const MaskImage* ground_truth,
                                               double working_spacing) {
  d.validate();
  switch (d.kind) {
    case BackendDescriptor::Kind::oracle_mock:
      if (!ground_truth)
        throw std::invalid_argument("backend: oracle-mock requires a ground-truth mask");
      return std::make_unique<OracleMockScorer>(*ground_truth, d.noise_sigma, d.noise_seed);
    case BackendDescriptor::Kind::score_cache:
      return std::make_unique<ScoreCacheScorer>(d.cache_dir, working_spacing);
    case BackendDescriptor::Kind::external_process:
      return std::make_unique<ExternalProcessScorer>(d.command);
  }
  throw std::logic_error("backend: unreachable");
}

}  // namespace slideseg

#endif  // SLIDESEG_BACKEND_HPP
