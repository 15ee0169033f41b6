/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/mac/bsr.hpp"
#include "millislice/phy/carrier-component.hpp"
#include "millislice/phy/link-model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace millislice
{

struct Allocation
{
    CcId ccId{0};
    FlowId flowId{0};
    std::uint32_t nSymbols{0};
    std::uint64_t tbBits{0};
    std::uint64_t subframeIndex{0};
};

/// A flow competing in one subframe: bytes reported at this carrier and the
/// spectral efficiency it would be served with.
struct SchedulingCandidate
{
    FlowId flowId{0};
    std::uint64_t pendingBytes{0};
    double se{0.0};
};

/// Smallest symbol count whose TB covers `bytes`, capped at the data budget.
inline std::uint32_t
SymbolsNeeded(const CarrierComponent& cc, std::uint64_t bytes, double se, double overhead)
{
    std::uint32_t budget = cc.DataSymbols();
    if (bytes == 0)
    {
        return 0;
    }
    std::uint64_t bits = bytes * 8;
    if (TbCapacityBits(cc, budget, se, overhead) < bits)
    {
        return budget;
    }
    double perSymbol = se * cc.bandwidthHz * cc.SymbolDurationSeconds() * (1.0 - overhead);
    auto n = static_cast<std::uint32_t>(
        std::clamp(std::ceil(static_cast<double>(bits) / perSymbol), 1.0, static_cast<double>(budget)));
    while (n < budget && TbCapacityBits(cc, n, se, overhead) < bits)
    {
        ++n;
    }
    while (n > 1 && TbCapacityBits(cc, n - 1, se, overhead) >= bits)
    {
        --n;
    }
    return n;
}

/**
 * Round-robin split of one subframe's data symbols.
 *
 * `candidates` are in round-robin order starting at the current pointer.
 * Each gets floor(D/k) symbols and the first D mod k get one more. A flow
 * whose reported bytes fit in fewer symbols is trimmed and the freed symbols
 * pass to the next flow in order, wrapping around while anyone still has
 * unserved bytes.
 */
inline std::vector<Allocation>
ScheduleRoundRobin(const CarrierComponent& cc,
                   const std::vector<SchedulingCandidate>& candidates,
                   std::uint64_t subframeIndex,
                   double overhead = 0.10)
{
    std::vector<Allocation> out;
    const std::uint32_t budget = cc.DataSymbols();
    const auto k = static_cast<std::uint32_t>(candidates.size());
    if (k == 0)
    {
        return out;
    }
    std::vector<std::uint32_t> need(k);
    for (std::uint32_t i = 0; i < k; ++i)
    {
        need[i] = SymbolsNeeded(cc, candidates[i].pendingBytes, candidates[i].se, overhead);
    }

    std::vector<std::uint32_t> given(k, 0);
    const std::uint32_t base = budget / k;
    const std::uint32_t extra = budget % k;
    std::uint32_t carry = 0;
    for (std::uint32_t i = 0; i < k; ++i)
    {
        std::uint32_t quota = base + (i < extra ? 1 : 0) + carry;
        given[i] = std::min(quota, need[i]);
        carry = quota - given[i];
    }
    while (carry > 0)
    {
        bool progress = false;
        for (std::uint32_t i = 0; i < k && carry > 0; ++i)
        {
            std::uint32_t add = std::min(carry, need[i] - given[i]);
            if (add > 0)
            {
                given[i] += add;
                carry -= add;
                progress = true;
            }
        }
        if (!progress)
        {
            break;
        }
    }

    std::uint32_t used = 0;
    for (std::uint32_t i = 0; i < k; ++i)
    {
        if (given[i] == 0)
        {
            continue;
        }
        used += given[i];
        out.push_back(Allocation{cc.id,
                                 candidates[i].flowId,
                                 given[i],
                                 TbCapacityBits(cc, given[i], candidates[i].se, overhead),
                                 subframeIndex});
    }
    if (used > budget)
    {
        throw SimulationError("ScheduleRoundRobin: symbol budget exceeded");
    }
    return out;
}

/**
 * Per-carrier MAC scheduler state: the bytes each flow has been reported to
 * have pending on this carrier and the round-robin pointer.
 *
 * Reported bytes persist until the next report routed to this carrier for
 * the same flow, and shrink as TBs are scheduled against them.
 */
class RoundRobinMacScheduler
{
  public:
    RoundRobinMacScheduler(CarrierComponent cc, double overhead)
        : m_cc(cc),
          m_overhead(overhead)
    {
    }

    const CarrierComponent& GetCarrier() const
    {
        return m_cc;
    }

    void RegisterFlow(FlowId flow)
    {
        if (flow >= m_pending.size())
        {
            m_pending.resize(flow + 1, 0);
            m_registered.resize(flow + 1, false);
        }
        if (!m_registered[flow])
        {
            m_registered[flow] = true;
            m_ring.push_back(flow);
        }
    }

    void SetPending(FlowId flow, std::uint64_t bytes)
    {
        RegisterFlow(flow);
        m_pending[flow] = bytes;
    }

    std::uint64_t GetPending(FlowId flow) const
    {
        return flow < m_pending.size() ? m_pending[flow] : 0;
    }

    /// Allocates one subframe. `seOf` gives the current spectral efficiency
    /// of a flow on this carrier; flows in outage (SE 0) are skipped.
    std::vector<Allocation> ScheduleSubframe(std::uint64_t subframeIndex,
                                             const std::function<double(FlowId)>& seOf)
    {
        std::vector<SchedulingCandidate> candidates;
        const std::size_t n = m_ring.size();
        for (std::size_t j = 0; j < n; ++j)
        {
            FlowId f = m_ring[(m_pointer + j) % n];
            if (m_pending[f] == 0)
            {
                continue;
            }
            double se = seOf(f);
            if (se <= 0.0)
            {
                continue;
            }
            candidates.push_back(SchedulingCandidate{f, m_pending[f], se});
        }
        if (n > 0)
        {
            m_pointer = (m_pointer + 1) % n;
        }
        auto allocs = ScheduleRoundRobin(m_cc, candidates, subframeIndex, m_overhead);
        for (const auto& a : allocs)
        {
            m_pending[a.flowId] -= std::min(m_pending[a.flowId], a.tbBits / 8);
        }
        return allocs;
    }

  private:
    CarrierComponent m_cc;
    double m_overhead;
    std::vector<FlowId> m_ring;
    std::vector<std::uint64_t> m_pending;
    std::vector<bool> m_registered;
    std::size_t m_pointer{0};
};

} // namespace millislice
