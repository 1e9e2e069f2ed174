#include "selfish/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "selfish/analysis.hpp"

namespace selfish {

namespace {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kPreyGreen{52, 168, 83};
constexpr Rgb kPredatorOrange{240, 140, 20};
constexpr Rgb kPredatorRed{220, 32, 32};

// Dark-to-hot ramp for the density layer.
Rgb heat(double v) {
  v = std::clamp(v, 0.0, 1.0);
  static constexpr Rgb stops[] = {
      {8, 8, 32}, {64, 16, 96}, {180, 48, 64}, {240, 144, 32}, {252, 248, 168}};
  const double x = v * 4.0;
  const int i = std::min(3, static_cast<int>(x));
  const double f = x - i;
  auto mix = [&](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * f));
  };
  return {mix(stops[i].r, stops[i + 1].r), mix(stops[i].g, stops[i + 1].g),
          mix(stops[i].b, stops[i + 1].b)};
}

class Image {
 public:
  Image(int size, Rgb fill) : size_(size), px_(static_cast<size_t>(size) * size, fill) {}

  // Wraps both coordinates; (col, row) in any range.
  void set(long col, long row, Rgb c) {
    const long s = size_;
    col = ((col % s) + s) % s;
    row = ((row % s) + s) % s;
    px_[static_cast<size_t>(row) * size_ + col] = c;
  }

  Rgb& at(int col, int row) { return px_[static_cast<size_t>(row) * size_ + col]; }

  void disc(double cx_px, double cy_px, double radius_px, Rgb c) {
    const long r = std::max<long>(1, std::lround(radius_px));
    const long icx = std::lround(cx_px);
    const long icy = std::lround(cy_px);
    for (long dy = -r; dy <= r; ++dy)
      for (long dx = -r; dx <= r; ++dx)
        if (dx * dx + dy * dy <= r * r) set(icx + dx, icy + dy, c);
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P6\n" << size_ << ' ' << size_ << "\n255\n";
    out.write(reinterpret_cast<const char*>(px_.data()),
              static_cast<std::streamsize>(px_.size() * 3));
    if (!out) throw std::runtime_error("write failed: " + path);
  }

  int size() const { return size_; }

 private:
  int size_;
  std::vector<Rgb> px_;
};

static_assert(sizeof(Rgb) == 3, "PPM writer relies on packed RGB");

}  // namespace

void render_frame_ppm(const std::string& path, std::span<const Vec2> prey,
                      Vec2 predator, double edge_length, double agent_radius,
                      const RenderOptions& opt) {
  if (opt.pixels_per_unit < 1)
    throw std::invalid_argument("render: pixels_per_unit must be >= 1");
  const int size = std::max(8, static_cast<int>(std::lround(edge_length * opt.pixels_per_unit)));
  const double scale = size / edge_length;  // pixels per world unit
  // World y up, image row 0 at the top: row = size-1 - y*scale.
  auto col_of = [&](double x) { return x * scale; };
  auto row_of = [&](double y) { return size - 1 - y * scale; };

  Image img(size, kWhite);
  if (opt.kde_layer) {
    double max_d = 0.0;
    std::vector<double> dens(static_cast<size_t>(size) * size);
    for (int row = 0; row < size; ++row) {
      const double wy = (size - 1 - row) / scale;
      for (int col = 0; col < size; ++col) {
        const double d = kde_density(prey, {col / scale, wy}, opt.kde_bandwidth,
                                     edge_length);
        dens[static_cast<size_t>(row) * size + col] = d;
        max_d = std::max(max_d, d);
      }
    }
    for (int row = 0; row < size; ++row)
      for (int col = 0; col < size; ++col)
        img.at(col, row) =
            heat(max_d > 0.0 ? dens[static_cast<size_t>(row) * size + col] / max_d : 0.0);
  }

  const Rgb prey_color = opt.kde_layer ? kWhite : kPreyGreen;
  const Rgb pred_color = opt.kde_layer ? kPredatorRed : kPredatorOrange;
  const double r_px = agent_radius * scale;
  for (const Vec2& p : prey) img.disc(col_of(p.x), row_of(p.y), r_px, prey_color);
  img.disc(col_of(predator.x), row_of(predator.y), r_px, pred_color);
  img.save(path);
}

}  // namespace selfish
