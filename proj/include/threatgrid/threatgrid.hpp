#pragma once

#include "threatgrid/bench.hpp"
#include "threatgrid/clustering.hpp"
#include "threatgrid/config.hpp"
#include "threatgrid/frame_io.hpp"
#include "threatgrid/geometry.hpp"
#include "threatgrid/grid.hpp"
#include "threatgrid/pipeline.hpp"
#include "threatgrid/prediction.hpp"
#include "threatgrid/simulation.hpp"
#include "threatgrid/svg.hpp"
#include "threatgrid/text_io.hpp"
#include "threatgrid/threat.hpp"
