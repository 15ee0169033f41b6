/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/sim-time.hpp"
#include "millislice/mac/bsr.hpp"
#include "millislice/mac/rlc-am-flow.hpp"
#include "millislice/phy/carrier-component.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace millislice
{

/// Application-layer counters of one flow.
struct FlowStats
{
    FlowId flowId{0};
    Qci qci{Qci::Embb};
    std::uint64_t sentPackets{0};
    std::uint64_t deliveredPackets{0};
    /// Rejected by the full transmission buffer.
    std::uint64_t droppedPackets{0};
    /// Discarded after exhausting RLC retransmissions.
    std::uint64_t lostPackets{0};
    SimTime sumDelay{};
    std::uint64_t bytesDelivered{0};
    ByteAccounting bytes;

    std::uint64_t InFlightPackets() const
    {
        return sentPackets - deliveredPackets - droppedPackets - lostPackets;
    }
};

struct CcStats
{
    CarrierComponent cc;
    /// Data symbols in allocations that carried payload.
    std::uint64_t txSym{0};
    /// Bytes routed to this carrier's MAC, per QCI of the reporting flow.
    std::map<Qci, std::uint64_t> routedBytes;
    /// Payload bytes actually carried, per QCI.
    std::map<Qci, std::uint64_t> txBytes;
};

struct RunMetadata
{
    std::string runId;
    std::uint64_t seed{0};
    std::string policy;
    std::string configHash;
    /// Sweep coordinates of this run, e.g. "embb_rate_mbps=160;policy=millislice".
    std::string point;
};

struct RunStats
{
    RunMetadata meta;
    double durationSeconds{0.0};
    std::vector<FlowStats> flows;
    std::vector<CcStats> ccs;
    std::uint64_t subframesScheduled{0};
    std::uint32_t maxSymbolsInSubframe{0};
};

inline void
RecordDelivery(FlowStats& stats, SimTime txTime, SimTime rxTime, std::uint64_t bytes)
{
    if (rxTime < txTime)
    {
        throw SimulationError("RecordDelivery: reception precedes transmission");
    }
    ++stats.deliveredPackets;
    stats.sumDelay += rxTime - txTime;
    stats.bytesDelivered += bytes;
}

/// Mean application delay in milliseconds; empty when nothing was delivered.
inline std::optional<double>
MeanDelayMs(const FlowStats& s)
{
    if (s.deliveredPackets == 0)
    {
        return std::nullopt;
    }
    return s.sumDelay.GetMilliSeconds() / static_cast<double>(s.deliveredPackets);
}

inline double
ThroughputMbps(const FlowStats& s, double durationSeconds)
{
    return static_cast<double>(s.bytesDelivered) * 8.0 / durationSeconds / 1e6;
}

inline std::optional<double>
LossRatio(const FlowStats& s)
{
    if (s.sentPackets == 0)
    {
        return std::nullopt;
    }
    return static_cast<double>(s.droppedPackets + s.lostPackets) / static_cast<double>(s.sentPackets);
}

/**
 * Per-carrier resource utilization: transmitted symbols over the symbols
 * available in `tSymSeconds`, weighted by the carrier's bandwidth share.
 */
inline double
ComputeEta(std::uint64_t txSym,
           double tSymSeconds,
           std::uint32_t framesPerSecond,
           std::uint32_t subframesPerFrame,
           std::uint32_t symbolsPerSubframe,
           double bandwidthShare)
{
    if (!(tSymSeconds > 0.0))
    {
        throw SimulationError("ComputeEta: simulation time must be > 0");
    }
    double available = tSymSeconds * framesPerSecond * subframesPerFrame * symbolsPerSubframe;
    return static_cast<double>(txSym) / available * bandwidthShare;
}

inline double
ComputeEta(const CcStats& s, double tSymSeconds)
{
    return ComputeEta(s.txSym,
                      tSymSeconds,
                      s.cc.framesPerSecond,
                      s.cc.subframesPerFrame,
                      s.cc.symbolsPerSubframe,
                      s.cc.bandwidthShare);
}

} // namespace millislice
