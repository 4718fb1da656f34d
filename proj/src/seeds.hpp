#pragma once

#include <cstdint>

namespace ensdiv {

// splitmix64 finalizer over (base + stream * golden gamma). Every pipeline
// stage draws its RNG seed through this, so one master seed fans out into
// independent, reproducible streams. Stream assignments are documented in
// the experiment manifest.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + stream * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace ensdiv
