/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/sim-time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace millislice
{

using FlowId = std::uint32_t;

/**
 * QoS class of a flow. The two named classes are the ones the scenarios
 * use; other values are valid and simply unmapped unless configured.
 */
enum class Qci : std::uint8_t
{
    Urllc = 1,
    Embb = 2,
};

inline std::string
ToString(Qci q)
{
    switch (q)
    {
    case Qci::Urllc:
        return "urllc";
    case Qci::Embb:
        return "embb";
    }
    return "qci" + std::to_string(static_cast<int>(q));
}

inline std::optional<Qci>
ParseQci(std::string_view s)
{
    if (s == "urllc")
    {
        return Qci::Urllc;
    }
    if (s == "embb")
    {
        return Qci::Embb;
    }
    return std::nullopt;
}

/// Buffer status report: queue sizes of one flow at `issuedAt`.
struct Bsr
{
    FlowId flowId{0};
    Qci qci{Qci::Embb};
    std::uint64_t txQueueBytes{0};
    std::uint64_t retxQueueBytes{0};
    SimTime issuedAt{};

    std::uint64_t TotalBytes() const
    {
        return txQueueBytes + retxQueueBytes;
    }

    bool operator==(const Bsr&) const = default;
};

} // namespace millislice
