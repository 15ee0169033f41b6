/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace millislice
{

/// Stochastic subsystems. Each gets its own family of streams so that
/// changing how one subsystem consumes randomness never shifts another.
enum class RngSubsystem : std::uint32_t
{
    Mobility = 1,
    Shadowing = 2,
    TbErrors = 3,
    TrafficJitter = 4,
    LineOfSight = 5,
    Test = 99,
};

/// Stream id for entity `index` (a UE, a flow, a UE/CC pair) of a subsystem.
constexpr std::uint64_t
MakeStreamId(RngSubsystem subsystem, std::uint64_t index = 0)
{
    return (static_cast<std::uint64_t>(subsystem) << 40) ^ index;
}

constexpr std::uint64_t
SplitMix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * A reproducible random stream keyed by (seed, stream id).
 *
 * The engine seed and the stream id are mixed through SplitMix64 before
 * seeding a 64-bit Mersenne Twister, whose output sequence is fixed by the
 * C++ standard. Distributions are derived by hand rather than through
 * <random> distribution objects, which are implementation-defined.
 */
class RngStream
{
  public:
    RngStream(std::uint64_t seed, std::uint64_t streamId)
        : m_seed(seed),
          m_streamId(streamId),
          m_engine(MixedSeed(seed, streamId))
    {
    }

    std::uint64_t GetSeed() const
    {
        return m_seed;
    }

    std::uint64_t GetStreamId() const
    {
        return m_streamId;
    }

    void Reset()
    {
        m_engine.seed(MixedSeed(m_seed, m_streamId));
    }

    std::uint64_t NextU64()
    {
        return m_engine();
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double NextUnit()
    {
        return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi); returns lo when lo == hi.
    double DrawUniform(double lo, double hi)
    {
        if (!(lo <= hi))
        {
            throw SimulationError("DrawUniform: lo > hi");
        }
        if (lo == hi)
        {
            return lo;
        }
        double v = lo + (hi - lo) * NextUnit();
        // rounding can land exactly on hi for wide intervals
        return v < hi ? v : std::nextafter(hi, lo);
    }

    /// Standard normal via Box-Muller (one value per call, the pair's twin
    /// is discarded to keep the stream position independent of history).
    double DrawStandardNormal()
    {
        double u1 = 1.0 - NextUnit(); // (0, 1]
        double u2 = NextUnit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool DrawBernoulli(double p)
    {
        return NextUnit() < p;
    }

  private:
    static std::uint64_t MixedSeed(std::uint64_t seed, std::uint64_t streamId)
    {
        return SplitMix64(seed ^ SplitMix64(streamId ^ 0x5851f42d4c957f2dULL));
    }

    std::uint64_t m_seed;
    std::uint64_t m_streamId;
    std::mt19937_64 m_engine;
};

} // namespace millislice
