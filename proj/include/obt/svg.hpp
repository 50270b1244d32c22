#pragma once

#include <string>

#include "obt/pipeline.hpp"

namespace obt {

// Static SVG figure of a run. Layers (any comma-separated subset of
// obstacle,atoms,geodesics,g-edges,classes,map; empty selects all) are drawn
// in that order; output is deterministic for a fixed input.
std::string render_svg(const Problem& problem, const PipelineResult& result,
                       const std::string& layers);

} // namespace obt
