/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/rng-stream.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace millislice
{

/// UE state in the cell plane; the gNB sits at the origin.
struct UePosition
{
    double x{0.0};
    double y{0.0};
    double speed{0.0};
    double heading{0.0};

    double Distance() const
    {
        return std::hypot(x, y);
    }
};

/// Uniform drop over the disc of radius `radius` (r*sqrt(u) radial draw),
/// with speed uniform in [speedMin, speedMax] and a uniform heading.
inline std::vector<UePosition>
DropUsers(std::size_t n, double radius, RngStream& rng, double speedMin = 1.0, double speedMax = 10.0)
{
    std::vector<UePosition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double rho = radius * std::sqrt(rng.NextUnit());
        double angle = rng.DrawUniform(0.0, 2.0 * std::numbers::pi);
        UePosition ue;
        ue.x = rho * std::cos(angle);
        ue.y = rho * std::sin(angle);
        ue.speed = rng.DrawUniform(speedMin, speedMax);
        ue.heading = rng.DrawUniform(0.0, 2.0 * std::numbers::pi);
        out.push_back(ue);
    }
    return out;
}

/**
 * Straight-line motion for `dt` seconds, reflected specularly off the cell
 * edge. The heading is mirrored at each reflection.
 */
inline UePosition
MobilityStep(UePosition ue, double dt, double radius)
{
    if (!(dt > 0.0))
    {
        throw SimulationError("MobilityStep: dt must be > 0");
    }
    double dx = std::cos(ue.heading);
    double dy = std::sin(ue.heading);
    double remaining = ue.speed * dt;
    for (int bounce = 0; bounce < 64 && remaining > 0.0; ++bounce)
    {
        double nx = ue.x + dx * remaining;
        double ny = ue.y + dy * remaining;
        if (nx * nx + ny * ny <= radius * radius)
        {
            ue.x = nx;
            ue.y = ny;
            remaining = 0.0;
            break;
        }
        // |p + s d| = r, with |d| = 1 and |p| <= r: take the positive root
        double b = ue.x * dx + ue.y * dy;
        double c = ue.x * ue.x + ue.y * ue.y - radius * radius;
        double s = -b + std::sqrt(std::max(b * b - c, 0.0));
        s = std::clamp(s, 0.0, remaining);
        ue.x += dx * s;
        ue.y += dy * s;
        remaining -= s;
        double nrmX = ue.x / radius;
        double nrmY = ue.y / radius;
        double dot = dx * nrmX + dy * nrmY;
        dx -= 2.0 * dot * nrmX;
        dy -= 2.0 * dot * nrmY;
    }
    // the boundary point itself can sit a rounding error outside
    double d = std::hypot(ue.x, ue.y);
    if (d > radius)
    {
        ue.x *= radius / d;
        ue.y *= radius / d;
    }
    ue.heading = std::atan2(dy, dx);
    if (ue.heading < 0.0)
    {
        ue.heading += 2.0 * std::numbers::pi;
    }
    return ue;
}

/// Random-direction model: MobilityStep plus a fresh uniform heading every
/// `headingPeriod` seconds.
class RandomDirectionMobility
{
  public:
    RandomDirectionMobility(double radius, double headingPeriod)
        : m_radius(radius),
          m_headingPeriod(headingPeriod)
    {
    }

    UePosition Step(UePosition ue, double dt, double& sinceRedraw, RngStream& rng) const
    {
        ue = MobilityStep(ue, dt, m_radius);
        sinceRedraw += dt;
        if (sinceRedraw >= m_headingPeriod - 1e-9)
        {
            sinceRedraw = 0.0;
            ue.heading = rng.DrawUniform(0.0, 2.0 * std::numbers::pi);
        }
        return ue;
    }

  private:
    double m_radius;
    double m_headingPeriod;
};

} // namespace millislice
