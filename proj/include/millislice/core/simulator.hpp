/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/sim-time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace millislice
{

enum class EventKind : std::uint8_t
{
    PacketArrival,
    BsrTimer,
    SubframeBoundary,
    TbDelivery,
    MobilityTick,
    StatsFlush,
    Generic,
};

/// Opaque handle returned by Simulator::Schedule.
struct EventHandle
{
    std::uint64_t sequence{0};
};

/**
 * Single-threaded discrete-event engine.
 *
 * Events are ordered by (fire time, insertion sequence). A Simulator instance
 * owns all of its state, so independent instances can run on separate threads.
 */
class Simulator
{
  public:
    using Callback = std::function<void()>;

    SimTime Now() const
    {
        return m_now;
    }

    EventHandle Schedule(SimTime fireAt, EventKind kind, Callback cb)
    {
        if (fireAt < m_now)
        {
            throw SimulationError("Schedule: event at " + std::to_string(fireAt.GetNanoSeconds()) +
                                  " ns is in the past (now " +
                                  std::to_string(m_now.GetNanoSeconds()) + " ns)");
        }
        std::uint64_t seq = m_nextSequence++;
        m_queue.push(Entry{fireAt, seq, kind, std::move(cb)});
        return EventHandle{seq};
    }

    EventHandle ScheduleAfter(SimTime delay, EventKind kind, Callback cb)
    {
        return Schedule(m_now + delay, kind, std::move(cb));
    }

    void Cancel(EventHandle handle)
    {
        m_cancelled.insert(handle.sequence);
    }

    /// Processes every event with fire time <= tEnd. Returns the number of
    /// callbacks executed. The clock is left at tEnd if the run reached it.
    std::uint64_t RunUntil(SimTime tEnd)
    {
        std::uint64_t processed = 0;
        while (!m_queue.empty() && m_queue.top().fireAt <= tEnd)
        {
            // priority_queue::top is const; the entry is popped right after
            Entry e = std::move(const_cast<Entry&>(m_queue.top()));
            m_queue.pop();
            if (auto it = m_cancelled.find(e.sequence); it != m_cancelled.end())
            {
                m_cancelled.erase(it);
                continue;
            }
            m_now = e.fireAt;
            if (m_observer)
            {
                m_observer(e.fireAt, e.sequence, e.kind);
            }
            e.callback();
            ++processed;
        }
        if (m_now < tEnd)
        {
            m_now = tEnd;
        }
        return processed;
    }

    /// Called before each processed event; used by tests to audit ordering.
    void SetObserver(std::function<void(SimTime, std::uint64_t, EventKind)> observer)
    {
        m_observer = std::move(observer);
    }

  private:
    struct Entry
    {
        SimTime fireAt;
        std::uint64_t sequence;
        EventKind kind;
        Callback callback;
    };

    struct Later
    {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.fireAt != b.fireAt)
            {
                return a.fireAt > b.fireAt;
            }
            return a.sequence > b.sequence;
        }
    };

    SimTime m_now{};
    std::uint64_t m_nextSequence{0};
    std::priority_queue<Entry, std::vector<Entry>, Later> m_queue;
    std::unordered_set<std::uint64_t> m_cancelled;
    std::function<void(SimTime, std::uint64_t, EventKind)> m_observer;
};

} // namespace millislice
