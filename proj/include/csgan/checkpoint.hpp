#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "csgan/adam.hpp"
#include "csgan/networks.hpp"

namespace csgan {

// FNV-1a over a config description string; guards checkpoint/run matching.
inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {

inline void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
inline uint64_t read_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

template <typename T>
void write_buffers(std::ostream& os, const std::vector<ParamView<T>>& bufs) {
  write_u64(os, bufs.size());
  for (const auto& b : bufs) {
    write_u64(os, b.size);
    os.write(reinterpret_cast<const char*>(b.data), static_cast<std::streamsize>(b.size * sizeof(T)));
  }
}

template <typename T>
void read_buffers(std::istream& is, const std::vector<ParamView<T>>& bufs) {
  const uint64_t n = read_u64(is);
  require(n == bufs.size(), "checkpoint: parameter buffer count mismatch");
  for (const auto& b : bufs) {
    const uint64_t sz = read_u64(is);
    require(sz == b.size, "checkpoint: parameter buffer size mismatch");
    is.read(reinterpret_cast<char*>(b.data), static_cast<std::streamsize>(b.size * sizeof(T)));
  }
}

inline void write_moments(std::ostream& os, std::vector<std::vector<double>>& m) {
  write_u64(os, m.size());
  for (auto& v : m) {
    write_u64(os, v.size());
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
}

inline void read_moments(std::istream& is, std::vector<std::vector<double>>& m) {
  const uint64_t n = read_u64(is);
  require(n == m.size(), "checkpoint: optimizer state count mismatch");
  for (auto& v : m) {
    const uint64_t sz = read_u64(is);
    require(sz == v.size(), "checkpoint: optimizer state size mismatch");
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
}

}  // namespace detail

constexpr uint64_t kCheckpointMagic = 0x435347414e434b50ull;  // "CSGANCKP"
constexpr uint32_t kCheckpointVersion = 1;

template <typename T>
void save_checkpoint(const std::string& path, const ModelBundle<T>& m, Adam<T>& opt_g, Adam<T>& opt_d, int epoch,
                     uint64_t fingerprint) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  detail::write_u64(os, kCheckpointMagic);
  detail::write_u64(os, kCheckpointVersion);
  detail::write_u64(os, fingerprint);
  detail::write_u64(os, static_cast<uint64_t>(epoch));
  detail::write_buffers(os, m.g_ab.params());
  detail::write_buffers(os, m.g_ba.params());
  detail::write_buffers(os, m.d_a.params());
  detail::write_buffers(os, m.d_b.params());
  detail::write_u64(os, static_cast<uint64_t>(opt_g.t()));
  detail::write_moments(os, opt_g.moments1());
  detail::write_moments(os, opt_g.moments2());
  detail::write_u64(os, static_cast<uint64_t>(opt_d.t()));
  detail::write_moments(os, opt_d.moments1());
  detail::write_moments(os, opt_d.moments2());
  if (!os) throw std::runtime_error("I/O error while writing checkpoint: " + path);
}

// Loads into an already-built bundle/optimizer pair; returns the stored epoch.
template <typename T>
int load_checkpoint(const std::string& path, ModelBundle<T>& m, Adam<T>& opt_g, Adam<T>& opt_d,
                    uint64_t expected_fingerprint) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  require(detail::read_u64(is) == kCheckpointMagic, "not a checkpoint file: " + path);
  require(detail::read_u64(is) == kCheckpointVersion, "unsupported checkpoint version in " + path);
  const uint64_t fp = detail::read_u64(is);
  if (fp != expected_fingerprint)
    throw std::runtime_error("checkpoint/config fingerprint mismatch for " + path +
                             " (checkpoint was produced under a different configuration)");
  const int epoch = static_cast<int>(detail::read_u64(is));
  detail::read_buffers(is, m.g_ab.params());
  detail::read_buffers(is, m.g_ba.params());
  detail::read_buffers(is, m.d_a.params());
  detail::read_buffers(is, m.d_b.params());
  opt_g.set_t(static_cast<int64_t>(detail::read_u64(is)));
  detail::read_moments(is, opt_g.moments1());
  detail::read_moments(is, opt_g.moments2());
  opt_d.set_t(static_cast<int64_t>(detail::read_u64(is)));
  detail::read_moments(is, opt_d.moments1());
  detail::read_moments(is, opt_d.moments2());
  if (!is) throw std::runtime_error("truncated checkpoint: " + path);
  return epoch;
}

// Parameters only (enough for inference / evaluation).
template <typename T>
int load_checkpoint_params(const std::string& path, ModelBundle<T>& m, uint64_t expected_fingerprint,
                           bool check_fingerprint = true) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  require(detail::read_u64(is) == kCheckpointMagic, "not a checkpoint file: " + path);
  require(detail::read_u64(is) == kCheckpointVersion, "unsupported checkpoint version in " + path);
  const uint64_t fp = detail::read_u64(is);
  if (check_fingerprint && fp != expected_fingerprint)
    throw std::runtime_error("checkpoint/config fingerprint mismatch for " + path);
  const int epoch = static_cast<int>(detail::read_u64(is));
  detail::read_buffers(is, m.g_ab.params());
  detail::read_buffers(is, m.g_ba.params());
  detail::read_buffers(is, m.d_a.params());
  detail::read_buffers(is, m.d_b.params());
  return epoch;
}

}  // namespace csgan
