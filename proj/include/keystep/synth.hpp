#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "keystep/grid.hpp"

namespace keystep {

enum class SynthFamily { Ramp, Burst, Blob, Seasonal };

SynthFamily parse_synth_family(const std::string& name);
const char* to_string(SynthFamily family);

struct SyntheticSpec {
    SynthFamily family = SynthFamily::Ramp;
    std::size_t t = 10;
    std::size_t width = 8;
    std::size_t height = 8;
    std::uint64_t seed = 0;
    std::vector<std::size_t> bursts;  // burst family; empty means {t / 2}
    double period = 12.0;             // seasonal family, in frames
    double noise = 0.05;              // seasonal family, gaussian sd
    std::string id;                   // empty means "<family>-<seed>"
};

/// Deterministic generator. Families:
///  - ramp: frame i is the constant i / (t - 1)
///  - burst: one smooth base field repeated, replaced at `bursts` by a distinct field
///  - blob: a gaussian blob travelling across the grid
///  - seasonal: per-pixel phase-shifted sinusoid plus seeded gaussian noise
Dataset synthesize(const SyntheticSpec& spec);

}  // namespace keystep
