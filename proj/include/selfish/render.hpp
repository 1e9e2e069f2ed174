#pragma once

#include <span>
#include <string>

#include "selfish/geometry.hpp"

namespace selfish {

struct RenderOptions {
  int pixels_per_unit = 8;
  bool kde_layer = false;  // heat-map background from agent density
  double kde_bandwidth = 2.0;
};

// One frame as a binary PPM (P6). Plain mode: white background, prey as
// green discs, predator as an orange disc. KDE mode: density heat map
// background, prey white, predator red. Discs wrap across the torus edges;
// y points up in world coordinates, so the image is vertically flipped.
void render_frame_ppm(const std::string& path, std::span<const Vec2> prey,
                      Vec2 predator, double edge_length, double agent_radius,
                      const RenderOptions& opt);

}  // namespace selfish
