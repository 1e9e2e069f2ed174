#include "selfish/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

namespace selfish {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'S', 'H'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string bytes(std::size_t n) {
    need(n);
    std::string v = data_.substr(pos_, n);
    pos_ += n;
    return v;
  }

  bool at_end() const { return pos_ == data_.size(); }

  [[noreturn]] void fail(const std::string& why) const {
    throw std::runtime_error("model file " + path_ + ": " + why);
  }

 private:
  void need(std::size_t n) {
    if (data_.size() - pos_ < n) fail("truncated");
  }

  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_model(const std::string& path, const ModelFile& model) {
  model.params.spec.validate();
  if (model.algo.empty()) throw std::invalid_argument("save_model: empty algo tag");

  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(model.algo.size()));
  out += model.algo;
  put_u32(out, static_cast<std::uint32_t>(model.observation_neighbors));
  put_u64(out, model.seed);
  put_u64(out, model.config_hash);

  const auto& widths = model.params.spec.widths;
  put_u32(out, static_cast<std::uint32_t>(widths.size()));
  for (int w : widths) put_u32(out, static_cast<std::uint32_t>(w));

  put_u64(out, model.params.param_count());
  for (std::size_t l = 0; l < model.params.weights.size(); ++l) {
    for (double v : model.params.weights[l]) put_f64(out, v);
    for (double v : model.params.biases[l]) put_f64(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(model.config_snapshot.size()));
  out += model.config_snapshot;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  Reader r(data, path);

  if (r.bytes(4) != std::string(kMagic, 4)) r.fail("bad magic");
  ModelFile m;
  m.version = r.u32();
  if (m.version != kVersion)
    r.fail("unsupported version " + std::to_string(m.version));
  m.algo = r.bytes(r.u32());
  m.observation_neighbors = static_cast<int>(r.u32());
  m.seed = r.u64();
  m.config_hash = r.u64();

  const std::uint32_t num_widths = r.u32();
  if (num_widths < 2 || num_widths > 1000) r.fail("implausible layer count");
  m.params.spec.widths.resize(num_widths);
  for (std::uint32_t i = 0; i < num_widths; ++i) {
    const std::uint32_t w = r.u32();
    if (w < 1 || w > 1000000) r.fail("implausible layer width");
    m.params.spec.widths[i] = static_cast<int>(w);
  }

  std::size_t expect = 0;
  for (std::uint32_t l = 0; l + 1 < num_widths; ++l)
    expect += static_cast<std::size_t>(m.params.spec.widths[l + 1]) *
                  (m.params.spec.widths[l]) +
              m.params.spec.widths[l + 1];
  const std::uint64_t count = r.u64();
  if (count != expect)
    r.fail("parameter count " + std::to_string(count) + " does not match layer sizes (expected " +
           std::to_string(expect) + ")");

  m.params.weights.resize(num_widths - 1);
  m.params.biases.resize(num_widths - 1);
  for (std::uint32_t l = 0; l + 1 < num_widths; ++l) {
    const std::size_t rows = static_cast<std::size_t>(m.params.spec.widths[l + 1]);
    const std::size_t cols = static_cast<std::size_t>(m.params.spec.widths[l]);
    m.params.weights[l].resize(rows * cols);
    for (double& v : m.params.weights[l]) v = r.f64();
    m.params.biases[l].resize(rows);
    for (double& v : m.params.biases[l]) v = r.f64();
  }
  m.config_snapshot = r.bytes(r.u32());
  if (!r.at_end()) r.fail("trailing bytes");
  return m;
}

}  // namespace selfish
