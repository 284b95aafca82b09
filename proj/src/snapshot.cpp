#include "chf/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "chf/geometry.hpp"

namespace chf {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::vector<char>& out, T v) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.insert(out.end(), bytes.begin(), bytes.end());
}

class Cursor {
 public:
  Cursor(const std::vector<char>& data, const std::string& path) : data_(data), path_(path) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw ConfigError("snapshot " + path_ + " is truncated");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(bytes);
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  const std::vector<char>& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[4] = {'C', 'H', 'F', '1'};

}  // namespace

void write_snapshot(const std::string& path, double t, const MapField& f, const ScalarField& u, const ScalarField& J) {
  if (u.nx() != f.nx() || u.ny() != f.ny() || J.nx() != f.nx() || J.ny() != f.ny()) throw ConfigError("snapshot fields differ in shape");
  std::vector<char> buf(kMagic, kMagic + 4);
  buf.reserve(4 + 12 + 8 * (1 + f.values().size() + 2 * u.size()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.nx()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.ny()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.dim()));
  put<double>(buf, t);
  for (double v : f.values()) put<double>(buf, v);
  for (double v : u.values()) put<double>(buf, v);
  for (double v : J.values()) put<double>(buf, v);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write snapshot " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ConfigError("failed writing snapshot " + path);
}

void write_snapshot(const std::string& path, const FlowState& s) {
  write_snapshot(path, s.t, s.f, s.u, s.history.J);
}

SnapshotData read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot " + path);
  const std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0) throw ConfigError(path + " is not a CHF1 snapshot");
  const std::vector<char> body(data.begin() + 4, data.end());
  Cursor c(body, path);
  const auto nx = c.get<std::uint32_t>(), ny = c.get<std::uint32_t>(), dim = c.get<std::uint32_t>();
  if (nx == 0 || ny == 0 || dim == 0 || nx > (1u << 15) || ny > (1u << 15) || dim > 64)
    throw ConfigError("snapshot " + path + " has an implausible shape");
  SnapshotData s;
  s.t = c.get<double>();
  s.f = MapField(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(dim));
  s.u = ScalarField(static_cast<int>(nx), static_cast<int>(ny));
  s.J = ScalarField(static_cast<int>(nx), static_cast<int>(ny));
  for (double& v : s.f.values()) v = c.get<double>();
  for (double& v : s.u.values()) v = c.get<double>();
  for (double& v : s.J.values()) v = c.get<double>();
  if (!c.done()) throw ConfigError("snapshot " + path + " has trailing bytes");
  return s;
}

FlowState restore_state(const SnapshotData& snap, const FlowParams& p, const GridGeometry& g) {
  require_match(snap.f, g);
  require_match(snap.u, g);
  require_match(snap.J, g);
  FlowState s;
  s.f = snap.f;
  s.u = snap.u;
  s.history.J = snap.J;
  s.t = snap.t;
  s.step = std::lround(snap.t / p.dt);
  const ScalarField df2 = energy_density(snap.f, g);
  s.history.last_integrand = ScalarField(g);
  const double weight = std::exp(2.0 * p.a * snap.t);
  for (std::size_t k = 0; k < df2.size(); ++k) s.history.last_integrand[k] = weight * df2[k];
  return s;
}

}  // namespace chf
