#ifndef SLIDESEG_SLIDESEG_HPP
#define SLIDESEG_SLIDESEG_HPP

#include "slideseg/backend.hpp"
#include "slideseg/connected.hpp"
#include "slideseg/evaluate.hpp"
#include "slideseg/io/manifest.hpp"
#include "slideseg/io/png_io.hpp"
#include "slideseg/io/records.hpp"
#include "slideseg/metrics.hpp"
#include "slideseg/pipeline.hpp"
#include "slideseg/postprocess.hpp"
#include "slideseg/raster.hpp"
#include "slideseg/region_analysis.hpp"
#include "slideseg/report/kde.hpp"
#include "slideseg/report/svg_plots.hpp"
#include "slideseg/rng.hpp"
#include "slideseg/special.hpp"
#include "slideseg/stats.hpp"
#include "slideseg/subprocess.hpp"
#include "slideseg/synth.hpp"
#include "slideseg/tile_grid.hpp"

#endif  // SLIDESEG_SLIDESEG_HPP
