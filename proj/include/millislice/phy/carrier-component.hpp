/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/sim-time.hpp"

#include <cstdint>
#include <string>

namespace millislice
{

using CcId = std::uint8_t;

/// One aggregated carrier: frequency, bandwidth and frame numerology.
struct CarrierComponent
{
    CcId id{0};
    double centerFreqHz{28e9};
    double bandwidthHz{250e6};
    /// B_CCi / B, the carrier's share of the system bandwidth.
    double bandwidthShare{0.5};
    std::uint32_t framesPerSecond{100};
    std::uint32_t subframesPerFrame{10};
    std::uint32_t symbolsPerSubframe{24};
    std::uint32_t ctrlSymbols{2};
    /// Beamforming gain applied on this carrier.
    double bfGainDb{25.0};

    std::uint32_t DataSymbols() const
    {
        return symbolsPerSubframe - ctrlSymbols;
    }

    std::uint64_t SubframesPerSecond() const
    {
        return std::uint64_t{framesPerSecond} * subframesPerFrame;
    }

    SimTime SubframeDuration() const
    {
        return NanoSeconds(1'000'000'000 / static_cast<std::int64_t>(SubframesPerSecond()));
    }

    double SymbolDurationSeconds() const
    {
        return 1.0 / (static_cast<double>(SubframesPerSecond()) * symbolsPerSubframe);
    }

    void Validate() const
    {
        auto field = [this](const char* name) { return "cc" + std::to_string(id) + "." + name; };
        if (!(bandwidthHz > 0.0))
        {
            throw ConfigError(field("bandwidth"), 0, "bandwidth must be > 0");
        }
        if (!(centerFreqHz > 0.0))
        {
            throw ConfigError(field("center_freq"), 0, "frequency must be > 0");
        }
        if (framesPerSecond == 0 || subframesPerFrame == 0)
        {
            throw ConfigError(field("frames"), 0, "frame structure must be non-zero");
        }
        if (1'000'000'000ULL % SubframesPerSecond() != 0)
        {
            throw ConfigError(field("frames"), 0,
                              "subframe duration must be a whole number of nanoseconds");
        }
        if (ctrlSymbols >= symbolsPerSubframe)
        {
            throw ConfigError(field("ctrl_symbols"), 0, "ctrl_symbols must be < symbols_per_subframe");
        }
    }
};

} // namespace millislice
