#pragma once

// JSON shape documents:
//   {"type":"polygon","vertices":[[x,y],...]}
//   {"type":"disk","center":[x,y],"radius":r}
//   {"type":"interval_union","intervals":[[a,b],...]}   (a or b may be "-inf"/"inf")
//   {"type":"halfplane","normal":[nx,ny],"offset":c}
//   {"type":"union","parts":[...]}                        (optional "dim" when empty)

#include <string>

#include <nlohmann/json.hpp>

#include "cubeosc/geometry.hpp"

namespace cubeosc {

Shape shape_from_json(const nlohmann::json& doc);
nlohmann::json shape_to_json(const Shape& shape);
Shape load_shape(const std::string& path);

/// "all", "unit", "unit1", "box:x0,y0,x1,y1", "interval:a,b".
Region parse_region(const std::string& text);
std::string region_to_string(const Region& region);

}  // namespace cubeosc
