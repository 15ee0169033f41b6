/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/rng-stream.hpp"
#include "millislice/phy/carrier-component.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace millislice
{

/**
 * Abstract single-cell downlink link model.
 *
 * Stands in for a full stochastic mmWave channel: close-in free-space
 * pathloss with an LOS/NLOS exponent, log-normal shadowing, an
 * interference-free SINR, attenuated-Shannon link adaptation and an
 * exponential BLER curve around the link-adaptation operating point.
 */
struct LinkParams
{
    double txPowerDbm{30.0};
    double noiseFigureDb{5.0};
    double seScale{0.75};
    double seCap{7.4};
    double sinrMinDb{-5.0};
    double tbOverhead{0.10};
    double blerAtEdge{0.1};
    double blerMin{1e-6};
    double blerMax{0.5};
};

struct LinkState
{
    std::uint32_t ueId{0};
    CcId ccId{0};
    double sinrDb{0.0};
    double spectralEfficiency{0.0};
    double shadowingDb{0.0};
    /// SINR at which the current spectral efficiency was selected.
    double selectionSinrDb{0.0};
};

inline double
PathlossDb(double distanceM, double freqHz, bool los)
{
    double d = std::max(distanceM, 1.0);
    double exponent = los ? 2.0 : 3.0;
    return 32.4 + 20.0 * std::log10(freqHz / 1e9) + 10.0 * exponent * std::log10(d);
}

/// Thermal noise over `bandwidthHz` plus the receiver noise figure, in dBm.
inline double
NoisePowerDbm(double bandwidthHz, double noiseFigureDb)
{
    if (!(bandwidthHz > 0.0))
    {
        throw ConfigError("bandwidth", 0, "bandwidth must be > 0");
    }
    return -174.0 + 10.0 * std::log10(bandwidthHz) + noiseFigureDb;
}

inline double
SinrDb(double txPowerDbm, double bfGainDb, double pathlossDb, double shadowingDb, double noiseDbm)
{
    return txPowerDbm + bfGainDb - pathlossDb - shadowingDb - noiseDbm;
}

/// SINR for a UE at `distanceM` on carrier `cc`. No interference term: the
/// scenario has a single gNB.
inline double
SinrDb(const LinkParams& p, const CarrierComponent& cc, double distanceM, bool los, double shadowingDb)
{
    return SinrDb(p.txPowerDbm,
                  cc.bfGainDb,
                  PathlossDb(distanceM, cc.centerFreqHz, los),
                  shadowingDb,
                  NoisePowerDbm(cc.bandwidthHz, p.noiseFigureDb));
}

inline double
SpectralEfficiency(double sinrDb, const LinkParams& p = {})
{
    if (sinrDb < p.sinrMinDb)
    {
        return 0.0;
    }
    double shannon = p.seScale * std::log2(1.0 + std::pow(10.0, sinrDb / 10.0));
    return std::min(shannon, p.seCap);
}

/// SINR at which the attenuated-Shannon curve reaches the SE cap.
inline double
SeCapSinrDb(const LinkParams& p = {})
{
    return 10.0 * std::log10(std::exp2(p.seCap / p.seScale) - 1.0);
}

/// Operating point of link adaptation: the SINR the chosen SE corresponds to.
/// Equal to the SINR itself unless the SE is capped.
inline double
SelectionSinrDb(double sinrDb, const LinkParams& p = {})
{
    return std::min(sinrDb, SeCapSinrDb(p));
}

inline LinkState
MakeLinkState(const LinkParams& p,
              const CarrierComponent& cc,
              std::uint32_t ueId,
              double distanceM,
              bool los,
              double shadowingDb)
{
    LinkState s;
    s.ueId = ueId;
    s.ccId = cc.id;
    s.shadowingDb = shadowingDb;
    s.sinrDb = SinrDb(p, cc, distanceM, los, shadowingDb);
    s.spectralEfficiency = SpectralEfficiency(s.sinrDb, p);
    s.selectionSinrDb = SelectionSinrDb(s.sinrDb, p);
    return s;
}

/// Transport block size in bits for `nSymbols` data symbols.
inline std::uint64_t
TbCapacityBits(const CarrierComponent& cc, std::uint32_t nSymbols, double se, double overhead = 0.10)
{
    if (nSymbols > cc.DataSymbols())
    {
        throw SimulationError("TbCapacityBits: " + std::to_string(nSymbols) +
                              " symbols exceeds the data-symbol budget");
    }
    if (nSymbols == 0 || se <= 0.0)
    {
        return 0;
    }
    double bits = se * cc.bandwidthHz * cc.SymbolDurationSeconds() * nSymbols * (1.0 - overhead);
    // products of decimal constants land a hair below exact integers
    return static_cast<std::uint64_t>(std::floor(bits * (1.0 + 1e-12)));
}

inline double
Bler(double sinrDb, double selectionSinrDb, const LinkParams& p = {})
{
    double bler = p.blerAtEdge * std::pow(10.0, -(sinrDb - selectionSinrDb) / 10.0);
    return std::clamp(bler, p.blerMin, p.blerMax);
}

inline bool
TbSuccess(double sinrDb, double selectionSinrDb, RngStream& rng, const LinkParams& p = {})
{
    return !rng.DrawBernoulli(Bler(sinrDb, selectionSinrDb, p));
}

} // namespace millislice
