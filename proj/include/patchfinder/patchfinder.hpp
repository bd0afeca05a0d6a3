#pragma once

#include "patchfinder/backend.hpp"
#include "patchfinder/confidence.hpp"
#include "patchfinder/errors.hpp"
#include "patchfinder/evaluation.hpp"
#include "patchfinder/filters.hpp"
#include "patchfinder/image_io.hpp"
#include "patchfinder/manifest.hpp"
#include "patchfinder/mock_backend.hpp"
#include "patchfinder/noise.hpp"
#include "patchfinder/patch_grid.hpp"
#include "patchfinder/prompts.hpp"
#include "patchfinder/raster.hpp"
#include "patchfinder/remote_backend.hpp"
#include "patchfinder/reports.hpp"
#include "patchfinder/run_config.hpp"
#include "patchfinder/selection.hpp"
#include "patchfinder/size_optimizer.hpp"
