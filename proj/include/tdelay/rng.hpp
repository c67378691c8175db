#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace tdelay {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Counter-based stream. The seed is the Philox key; the stream id and the
// block index fill the 128-bit counter, so every output word is a pure
// function of (seed, stream_id, draw index).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  // Circular complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();
  // Gamma(shape, rate) via Marsaglia-Tsang.
  double gamma(double shape, double rate = 1.0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  // Number of 32-bit words consumed so far.
  std::uint64_t words_drawn() const { return block_ * 4 - (4 - used_); }

 private:
  std::uint32_t next_u32();
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  PhiloxCounter buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tdelay
