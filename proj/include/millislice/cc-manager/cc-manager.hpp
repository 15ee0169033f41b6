/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/sim-time.hpp"
#include "millislice/mac/bsr.hpp"
#include "millislice/phy/carrier-component.hpp"

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace millislice
{

/// QoS class -> primary carrier.
using QciCcMap = std::map<Qci, CcId>;

/// Routed reports, one per chosen carrier.
using RoutedBsrs = std::map<CcId, Bsr>;

/// Per-QCI borrowing threshold in bytes. A QCI with no entry has threshold
/// 0, so its primary carrier is never lent out.
class Thresholds
{
  public:
    void Set(Qci qci, std::uint64_t bytes)
    {
        m_bytes[qci] = bytes;
    }

    /// `packets` of `packetSize` bytes each.
    void SetPackets(Qci qci, double packets, std::uint32_t packetSize)
    {
        if (packets < 0.0)
        {
            throw ConfigError("threshold", 0, "threshold must be >= 0");
        }
        m_bytes[qci] = static_cast<std::uint64_t>(packets * packetSize + 0.5);
    }

    std::uint64_t Get(Qci qci) const
    {
        auto it = m_bytes.find(qci);
        return it == m_bytes.end() ? 0 : it->second;
    }

  private:
    std::map<Qci, std::uint64_t> m_bytes;
};

/**
 * Sliding-window view of RLC buffer occupancy at the CC manager.
 *
 * Holds the latest tx+retx report of every flow. The per-QCI aggregate sums
 * the entries no older than the window; an entry is replaced by the flow's
 * next report.
 */
class OccupancyMap
{
  public:
    explicit OccupancyMap(SimTime window = MilliSeconds(10))
        : m_window(window)
    {
    }

    SimTime GetWindow() const
    {
        return m_window;
    }

    void Update(const Bsr& bsr, SimTime now)
    {
        m_entries[Key{bsr.qci, bsr.flowId}] = Entry{bsr.TotalBytes(), now};
    }

    std::uint64_t Aggregate(Qci qci, SimTime now) const
    {
        std::uint64_t total = 0;
        auto it = m_entries.lower_bound(Key{qci, 0});
        for (; it != m_entries.end() && it->first.qci == qci; ++it)
        {
            if (now - it->second.updatedAt <= m_window)
            {
                total += it->second.bytes;
            }
        }
        return total;
    }

  private:
    struct Key
    {
        Qci qci;
        FlowId flow;

        bool operator<(const Key& o) const
        {
            if (qci != o.qci)
            {
                return qci < o.qci;
            }
            return flow < o.flow;
        }
    };

    struct Entry
    {
        std::uint64_t bytes;
        SimTime updatedAt;
    };

    SimTime m_window;
    std::map<Key, Entry> m_entries;
};

/**
 * Adaptive cross-carrier BSR routing.
 *
 * The report always goes to the flow's primary carrier. The primary carrier
 * of every other configured QCI is added when that QCI's aggregated load is
 * below its threshold. New-data bytes are split evenly over the chosen
 * carriers (integer division, remainder on the primary); retransmission
 * bytes stay on the primary. An unmapped QCI yields no routing.
 */
inline RoutedBsrs
RouteBsr(const Bsr& bsr,
         const OccupancyMap& occupancy,
         const QciCcMap& qciCcMap,
         const Thresholds& thresholds,
         SimTime now)
{
    RoutedBsrs chosen;
    auto primaryIt = qciCcMap.find(bsr.qci);
    if (primaryIt == qciCcMap.end())
    {
        return chosen;
    }
    const CcId primary = primaryIt->second;
    chosen[primary] = bsr;
    for (const auto& [otherQci, otherCc] : qciCcMap)
    {
        if (otherQci == bsr.qci)
        {
            continue;
        }
        if (occupancy.Aggregate(otherQci, now) < thresholds.Get(otherQci))
        {
            chosen[otherCc] = bsr;
        }
    }

    const std::uint64_t n = chosen.size();
    const std::uint64_t share = bsr.txQueueBytes / n;
    const std::uint64_t remainder = bsr.txQueueBytes % n;
    for (auto& [cc, routed] : chosen)
    {
        routed.txQueueBytes = share + (cc == primary ? remainder : 0);
        routed.retxQueueBytes = cc == primary ? bsr.retxQueueBytes : 0;
    }
    return chosen;
}

enum class PolicyKind
{
    NoCa,
    PrimaryOnly,
    MilliSlice,
};

inline std::string
ToString(PolicyKind p)
{
    switch (p)
    {
    case PolicyKind::NoCa:
        return "no_ca";
    case PolicyKind::PrimaryOnly:
        return "primary_only";
    case PolicyKind::MilliSlice:
        return "millislice";
    }
    return "unknown";
}

inline std::optional<PolicyKind>
ParsePolicy(std::string_view s)
{
    if (s == "no_ca")
    {
        return PolicyKind::NoCa;
    }
    if (s == "primary_only")
    {
        return PolicyKind::PrimaryOnly;
    }
    if (s == "millislice")
    {
        return PolicyKind::MilliSlice;
    }
    return std::nullopt;
}

/// One routing decision, as written to the routing trace.
struct RoutingTraceRecord
{
    SimTime at{};
    Bsr bsr;
    /// Aggregated occupancy per configured QCI at decision time.
    std::map<Qci, std::uint64_t> aggregates;
    RoutedBsrs routed;
};

/**
 * The component-carrier manager: receives every BSR, keeps the occupancy
 * map, and decides which carriers' MACs see it under the active policy.
 */
class CcManager
{
  public:
    CcManager(PolicyKind policy,
              std::size_t numCcs,
              QciCcMap qciCcMap,
              Thresholds thresholds,
              SimTime window = MilliSeconds(10))
        : m_policy(policy),
          m_map(std::move(qciCcMap)),
          m_thresholds(std::move(thresholds)),
          m_occupancy(window)
    {
        if (policy == PolicyKind::NoCa && numCcs != 1)
        {
            throw ConfigError("policy", 0, "no_ca requires exactly one carrier");
        }
        if (policy != PolicyKind::NoCa && numCcs < 2)
        {
            throw ConfigError("policy", 0, ToString(policy) + " requires at least two carriers");
        }
        for (const auto& [qci, cc] : m_map)
        {
            if (policy != PolicyKind::NoCa && cc >= numCcs)
            {
                throw ConfigError("qci_cc_map", 0,
                                  ToString(qci) + " mapped to missing carrier " + std::to_string(cc));
            }
        }
    }

    PolicyKind GetPolicy() const
    {
        return m_policy;
    }

    const QciCcMap& GetQciCcMap() const
    {
        return m_map;
    }

    const Thresholds& GetThresholds() const
    {
        return m_thresholds;
    }

    const OccupancyMap& GetOccupancy() const
    {
        return m_occupancy;
    }

    void SetTraceSink(std::function<void(const RoutingTraceRecord&)> sink)
    {
        m_trace = std::move(sink);
    }

    /// Records the report in the occupancy map, then routes it.
    RoutedBsrs OnBsr(const Bsr& bsr, SimTime now)
    {
        m_occupancy.Update(bsr, now);
        RoutedBsrs routed = ApplyPolicy(bsr, now);
        if (routed.empty() && m_warnedQcis.insert(bsr.qci).second)
        {
            std::clog << "warning: BSR of flow " << bsr.flowId << " has unmapped QCI "
                      << ToString(bsr.qci) << "; dropping its reports\n";
        }
        if (m_trace)
        {
            RoutingTraceRecord rec{now, bsr, {}, routed};
            for (const auto& [qci, cc] : m_map)
            {
                rec.aggregates[qci] = m_occupancy.Aggregate(qci, now);
            }
            m_trace(rec);
        }
        return routed;
    }

    RoutedBsrs ApplyPolicy(const Bsr& bsr, SimTime now) const
    {
        switch (m_policy)
        {
        case PolicyKind::NoCa:
            return RoutedBsrs{{CcId{0}, bsr}};
        case PolicyKind::PrimaryOnly: {
            auto it = m_map.find(bsr.qci);
            if (it == m_map.end())
            {
                return {};
            }
            return RoutedBsrs{{it->second, bsr}};
        }
        case PolicyKind::MilliSlice:
            return RouteBsr(bsr, m_occupancy, m_map, m_thresholds, now);
        }
        return {};
    }

  private:
    PolicyKind m_policy;
    QciCcMap m_map;
    Thresholds m_thresholds;
    OccupancyMap m_occupancy;
    std::function<void(const RoutingTraceRecord&)> m_trace;
    std::set<Qci> m_warnedQcis;
};

} // namespace millislice
