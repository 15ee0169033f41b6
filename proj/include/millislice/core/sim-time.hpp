/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace millislice
{

/**
 * Simulation clock value in integer nanoseconds since the start of the run.
 *
 * The clock never uses floating point so that event ordering is identical on
 * every platform. Conversions to seconds are only for reporting.
 */
class SimTime
{
  public:
    constexpr SimTime() = default;

    constexpr explicit SimTime(std::int64_t ns)
        : m_ns(ns)
    {
    }

    constexpr std::int64_t GetNanoSeconds() const
    {
        return m_ns;
    }

    constexpr double GetSeconds() const
    {
        return static_cast<double>(m_ns) * 1e-9;
    }

    constexpr double GetMilliSeconds() const
    {
        return static_cast<double>(m_ns) * 1e-6;
    }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const
    {
        return SimTime(m_ns + o.m_ns);
    }

    constexpr SimTime operator-(SimTime o) const
    {
        return SimTime(m_ns - o.m_ns);
    }

    constexpr SimTime& operator+=(SimTime o)
    {
        m_ns += o.m_ns;
        return *this;
    }

    constexpr SimTime operator*(std::int64_t k) const
    {
        return SimTime(m_ns * k);
    }

  private:
    std::int64_t m_ns{0};
};

constexpr SimTime
NanoSeconds(std::int64_t v)
{
    return SimTime(v);
}

constexpr SimTime
MicroSeconds(std::int64_t v)
{
    return SimTime(v * 1'000);
}

constexpr SimTime
MilliSeconds(std::int64_t v)
{
    return SimTime(v * 1'000'000);
}

/// Rounds to the nearest nanosecond.
inline SimTime
Seconds(double v)
{
    return SimTime(static_cast<std::int64_t>(std::llround(v * 1e9)));
}

} // namespace millislice
