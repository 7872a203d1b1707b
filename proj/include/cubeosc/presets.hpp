#pragma once

// Named targets used by the CLI and the tests.

#include <string>
#include <vector>

#include "cubeosc/target.hpp"

namespace cubeosc {

struct Preset {
    std::string name;
    TargetFunction target;
    /// Region used by the localized kinds when none is given.
    Region region;
    /// Reference perimeter (total variation for integer targets); +inf when effectively unbounded.
    double perimeter = 0.0;
};

const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);
Preset load_preset(const std::string& name);

/// Preset name, or a path: *.json shape document, *.pgm binary raster, *.csv integer raster.
Preset load_target(const std::string& source);

}  // namespace cubeosc
