// Reference external scoring backend for the line protocol: answers every
// request with the ground-truth mask crop named by the request's tile id.
// Usage: slideseg-echo-backend <ground_truth_mask.png>
//
// Requests arrive as one JSON object per line on stdin:
//   {"tile_id": "x<X>_y<Y>_w<W>_h<H>", "path_rgb": "<tile.png>"}
// and are answered in order on stdout:
//   {"tile_id": ..., "path_score": "<tile.score.png>"}

#include <cstdio>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "slideseg/io/png_io.hpp"
#include "slideseg/raster.hpp"

using nlohmann::json;

namespace {

slideseg::Rect parse_tile_id(const std::string& id) {
  slideseg::Rect r;
  if (std::sscanf(id.c_str(), "x%d_y%d_w%d_h%d", &r.x0, &r.y0, &r.width, &r.height) != 4)
    throw std::runtime_error("bad tile_id: " + id);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <ground_truth_mask.png>\n";
    return 2;
  }
  try {
    const slideseg::MaskImage gt = slideseg::read_png_mask(argv[1], 1.0);
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      const json request = json::parse(line);
      const std::string id = request.at("tile_id").get<std::string>();
      const std::string rgb_path = request.at("path_rgb").get<std::string>();
      const slideseg::Rect rect = parse_tile_id(id);

      // the RGB tile only supplies the padded output size
      const slideseg::RgbImage tile = slideseg::read_png_rgb(rgb_path, 1.0);
      slideseg::ScoreImage score(tile.width(), tile.height(), 1, 1.0, 0.0);
      for (int y = 0; y < rect.height; ++y)
        for (int x = 0; x < rect.width; ++x)
          score.at(x, y) = gt.at(rect.x0 + x, rect.y0 + y) ? 1.0 : 0.0;

      const std::string score_path = rgb_path + ".score.png";
      slideseg::write_png_score(score_path, score);
      std::cout << json{{"tile_id", id}, {"path_score", score_path}}.dump() << "\n"
                << std::flush;
    }
  } catch (const std::exception& e) {
    std::cerr << "echo-backend: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
