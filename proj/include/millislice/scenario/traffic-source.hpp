/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/rng-stream.hpp"
#include "millislice/core/sim-time.hpp"
#include "millislice/mac/bsr.hpp"

#include <cmath>
#include <cstdint>

namespace millislice
{

/**
 * Constant-bit-rate UDP-like source. Packet k leaves at
 * phase + floor(k * size * 8 / rate) in nanoseconds, computed in integers so
 * the schedule never drifts.
 */
class TrafficSource
{
  public:
    TrafficSource(FlowId flowId, double rateBps, std::uint32_t packetSize, SimTime phase = {})
        : m_flowId(flowId),
          m_rateBps(static_cast<std::uint64_t>(std::llround(rateBps))),
          m_packetSize(packetSize),
          m_phase(phase)
    {
        if (m_rateBps == 0 || packetSize == 0)
        {
            throw ConfigError("rate", 0, "source rate and packet size must be > 0");
        }
    }

    /// Draws the start phase uniformly within one inter-arrival.
    static SimTime DrawPhase(double rateBps, std::uint32_t packetSize, RngStream& rng)
    {
        double interval = packetSize * 8.0 / rateBps;
        auto ns = static_cast<std::int64_t>(std::floor(rng.DrawUniform(0.0, interval) * 1e9));
        return NanoSeconds(ns);
    }

    FlowId GetFlowId() const
    {
        return m_flowId;
    }

    std::uint32_t GetPacketSize() const
    {
        return m_packetSize;
    }

    SimTime GetInterArrival() const
    {
        return ArrivalOffset(1);
    }

    /// Emission time of the next packet; advances the source.
    SimTime Next()
    {
        return m_phase + ArrivalOffset(m_count++);
    }

    std::uint64_t GetEmitted() const
    {
        return m_count;
    }

  private:
    SimTime ArrivalOffset(std::uint64_t k) const
    {
        unsigned __int128 num = static_cast<unsigned __int128>(k) * m_packetSize * 8u * 1'000'000'000u;
        return NanoSeconds(static_cast<std::int64_t>(num / m_rateBps));
    }

    FlowId m_flowId;
    std::uint64_t m_rateBps;
    std::uint32_t m_packetSize;
    SimTime m_phase;
    std::uint64_t m_count{0};
};

} // namespace millislice
