#pragma once

#include <cstdint>
#include <random>

namespace wlss {

using Rng = std::mt19937_64;

// Independent generator keyed by (seed, stream); results never depend on
// which thread draws a given stream.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

// FNV-1a, stable across platforms.
std::uint64_t fnv1a(const void* data, std::size_t len);

}  // namespace wlss
