// SPDX-License-Identifier: Apache-2.0

#include "nfbeam/rng.hpp"

#include <cmath>

namespace nfbeam {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(seeded_engine(seed, stream_id)) {}

RandomStream::RandomStream(std::uint64_t seed, std::string_view stream_name)
    : RandomStream(seed, stream_id(stream_name)) {}

double RandomStream::normal(double variance) {
  if (variance <= 0.0) return 0.0;
  return std::sqrt(variance) * standard_(engine_);
}

cdouble RandomStream::complex_normal(double variance) {
  if (variance <= 0.0) return {0.0, 0.0};
  const double s = std::sqrt(0.5 * variance);
  const double re = standard_(engine_);
  const double im = standard_(engine_);
  return {s * re, s * im};
}

std::uint64_t RandomStream::stream_id(std::string_view name) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace nfbeam
