/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/cc-manager/cc-manager.hpp"
#include "millislice/core/error.hpp"
#include "millislice/phy/carrier-component.hpp"
#include "millislice/phy/link-model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace millislice
{

/// Every tunable of a run. Defaults reproduce the reference single-cell
/// scenario; see configs/ for the documented key list.
struct ScenarioConfig
{
    std::uint64_t seed{1};
    PolicyKind policy{PolicyKind::MilliSlice};
    double durationS{10.0};

    // topology and traffic
    std::uint32_t nEmbbUes{10};
    std::uint32_t nUrllcUes{10};
    double radiusM{200.0};
    double embbRateMbps{100.0};
    double urllcRateMbps{1.0};
    std::uint32_t embbPacketBytes{1400};
    std::uint32_t urllcPacketBytes{1250};
    double ueSpeedMin{1.0};
    double ueSpeedMax{10.0};
    double headingPeriodS{5.0};
    std::uint32_t mobilityTickMs{100};

    // carriers
    double totalBandwidthHz{500e6};
    double ccRatio{0.5};
    double cc0FreqHz{28e9};
    double cc1FreqHz{10e9};
    double cc0BfGainDb{25.0};
    double cc1BfGainDb{15.0};
    std::uint32_t framesPerSecond{100};
    std::uint32_t subframesPerFrame{10};
    std::uint32_t symbolsPerSubframe{24};
    std::uint32_t ctrlSymbols{2};

    // link
    double txPowerDbm{30.0};
    double noiseFigureDb{5.0};
    double seScale{0.75};
    double seCap{7.4};
    double sinrMinDb{-5.0};
    double tbOverhead{0.10};
    double blerAtEdge{0.1};
    double shadowingSigmaDb{4.0};
    std::uint32_t shadowingPeriodMs{100};
    std::uint32_t losPeriodMs{1000};
    double losReferenceM{18.0};

    // RLC / MAC
    std::uint64_t maxTxBufferBytes{1048576};
    std::uint32_t maxRlcRetx{5};
    std::uint32_t bsrPeriodMs{1};
    std::uint32_t airLatencySubframes{1};

    // CC manager
    std::uint32_t occupancyWindowMs{10};
    double rUrllcPackets{1.0};
    double rEmbbPackets{0.0};
    std::uint32_t embbPrimaryCc{0};
    std::uint32_t urllcPrimaryCc{1};
};

namespace detail
{

using FieldPtr = std::variant<double ScenarioConfig::*,
                              std::uint64_t ScenarioConfig::*,
                              std::uint32_t ScenarioConfig::*,
                              PolicyKind ScenarioConfig::*>;

struct FieldSpec
{
    const char* key;
    FieldPtr ptr;
};

inline const std::vector<FieldSpec>&
ConfigSchema()
{
    using C = ScenarioConfig;
    static const std::vector<FieldSpec> schema{
        {"seed", &C::seed},
        {"policy", &C::policy},
        {"duration_s", &C::durationS},
        {"n_embb_ues", &C::nEmbbUes},
        {"n_urllc_ues", &C::nUrllcUes},
        {"radius_m", &C::radiusM},
        {"embb_rate_mbps", &C::embbRateMbps},
        {"urllc_rate_mbps", &C::urllcRateMbps},
        {"embb_packet_bytes", &C::embbPacketBytes},
        {"urllc_packet_bytes", &C::urllcPacketBytes},
        {"ue_speed_min", &C::ueSpeedMin},
        {"ue_speed_max", &C::ueSpeedMax},
        {"heading_period_s", &C::headingPeriodS},
        {"mobility_tick_ms", &C::mobilityTickMs},
        {"total_bandwidth_hz", &C::totalBandwidthHz},
        {"cc_ratio", &C::ccRatio},
        {"cc0_freq_hz", &C::cc0FreqHz},
        {"cc1_freq_hz", &C::cc1FreqHz},
        {"cc0_bf_gain_db", &C::cc0BfGainDb},
        {"cc1_bf_gain_db", &C::cc1BfGainDb},
        {"frames_per_second", &C::framesPerSecond},
        {"subframes_per_frame", &C::subframesPerFrame},
        {"symbols_per_subframe", &C::symbolsPerSubframe},
        {"ctrl_symbols", &C::ctrlSymbols},
        {"tx_power_dbm", &C::txPowerDbm},
        {"noise_figure_db", &C::noiseFigureDb},
        {"se_scale", &C::seScale},
        {"se_cap", &C::seCap},
        {"sinr_min_db", &C::sinrMinDb},
        {"tb_overhead", &C::tbOverhead},
        {"bler_at_edge", &C::blerAtEdge},
        {"shadowing_sigma_db", &C::shadowingSigmaDb},
        {"shadowing_period_ms", &C::shadowingPeriodMs},
        {"los_period_ms", &C::losPeriodMs},
        {"los_reference_m", &C::losReferenceM},
        {"max_tx_buffer_bytes", &C::maxTxBufferBytes},
        {"max_rlc_retx", &C::maxRlcRetx},
        {"bsr_period_ms", &C::bsrPeriodMs},
        {"air_latency_subframes", &C::airLatencySubframes},
        {"occupancy_window_ms", &C::occupancyWindowMs},
        {"r_urllc_packets", &C::rUrllcPackets},
        {"r_embb_packets", &C::rEmbbPackets},
        {"embb_primary_cc", &C::embbPrimaryCc},
        {"urllc_primary_cc", &C::urllcPrimaryCc},
    };
    return schema;
}

inline std::string
Trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
    {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool
ParseNumber(const std::string& s, T& out)
{
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace detail

/// Raw `key = value` entries in file order, remembering source lines.
class ConfigStore
{
  public:
    struct Entry
    {
        std::string key;
        std::string value;
        int line{0};
    };

    static ConfigStore FromText(std::string_view text)
    {
        ConfigStore store;
        std::istringstream in{std::string(text)};
        std::string raw;
        int lineNo = 0;
        while (std::getline(in, raw))
        {
            ++lineNo;
            auto hash = raw.find('#');
            std::string line = detail::Trim(raw.substr(0, hash));
            if (line.empty())
            {
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                throw ConfigError("", lineNo, "expected 'key = value'");
            }
            std::string key = detail::Trim(line.substr(0, eq));
            std::string value = detail::Trim(line.substr(eq + 1));
            if (key.empty())
            {
                throw ConfigError("", lineNo, "empty key");
            }
            if (store.Find(key) != nullptr)
            {
                throw ConfigError(key, lineNo, "duplicate key");
            }
            store.m_entries.push_back({key, value, lineNo});
        }
        return store;
    }

    static ConfigStore FromFile(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw ConfigError("", 0, "cannot open config file '" + path + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return FromText(buf.str());
    }

    /// `key=value`; replaces an existing entry or appends a new one.
    void ApplyOverride(std::string_view assignment)
    {
        auto eq = assignment.find('=');
        if (eq == std::string_view::npos)
        {
            throw ConfigError(std::string(assignment), 0, "override must be key=value");
        }
        Set(detail::Trim(assignment.substr(0, eq)), detail::Trim(assignment.substr(eq + 1)));
    }

    void Set(const std::string& key, const std::string& value)
    {
        for (auto& e : m_entries)
        {
            if (e.key == key)
            {
                e.value = value;
                e.line = 0;
                return;
            }
        }
        m_entries.push_back({key, value, 0});
    }

    const Entry* Find(std::string_view key) const
    {
        for (const auto& e : m_entries)
        {
            if (e.key == key)
            {
                return &e;
            }
        }
        return nullptr;
    }

    int LineOf(std::string_view key) const
    {
        const Entry* e = Find(key);
        return e ? e->line : 0;
    }

    const std::vector<Entry>& GetEntries() const
    {
        return m_entries;
    }

  private:
    std::vector<Entry> m_entries;
};

/// Keys that steer sweeps rather than a single run.
inline bool
IsSweepKey(std::string_view key)
{
    return key.starts_with("sweep.") || key == "seeds";
}

inline void
ValidateConfig(const ScenarioConfig& c, const ConfigStore& store = {})
{
    auto fail = [&](const char* key, const std::string& msg) {
        throw ConfigError(key, store.LineOf(key), msg);
    };
    if (!(c.durationS > 0.0))
    {
        fail("duration_s", "must be > 0");
    }
    if (!(c.radiusM > 0.0))
    {
        fail("radius_m", "must be > 0");
    }
    if (c.nEmbbUes > 0 && !(c.embbRateMbps > 0.0))
    {
        fail("embb_rate_mbps", "must be > 0");
    }
    if (c.nUrllcUes > 0 && !(c.urllcRateMbps > 0.0))
    {
        fail("urllc_rate_mbps", "must be > 0");
    }
    if (c.embbPacketBytes == 0)
    {
        fail("embb_packet_bytes", "must be > 0");
    }
    if (c.urllcPacketBytes == 0)
    {
        fail("urllc_packet_bytes", "must be > 0");
    }
    if (!(c.ueSpeedMin >= 0.0 && c.ueSpeedMin <= c.ueSpeedMax))
    {
        fail("ue_speed_min", "need 0 <= ue_speed_min <= ue_speed_max");
    }
    if (!(c.totalBandwidthHz > 0.0))
    {
        fail("total_bandwidth_hz", "must be > 0");
    }
    if (!(c.ccRatio > 0.0 && c.ccRatio < 1.0) && c.policy != PolicyKind::NoCa)
    {
        fail("cc_ratio", "must lie strictly between 0 and 1 so both carriers have bandwidth");
    }
    if (!(c.cc0FreqHz > 0.0))
    {
        fail("cc0_freq_hz", "must be > 0");
    }
    if (!(c.cc1FreqHz > 0.0))
    {
        fail("cc1_freq_hz", "must be > 0");
    }
    if (c.framesPerSecond == 0 || c.subframesPerFrame == 0 ||
        1'000'000'000ULL % (std::uint64_t{c.framesPerSecond} * c.subframesPerFrame) != 0)
    {
        fail("subframes_per_frame", "subframe duration must be a whole number of nanoseconds");
    }
    if (c.framesPerSecond * c.subframesPerFrame != 1000)
    {
        fail("subframes_per_frame", "the BSR timer and occupancy window assume 1 ms subframes");
    }
    if (c.ctrlSymbols >= c.symbolsPerSubframe)
    {
        fail("ctrl_symbols", "must be < symbols_per_subframe");
    }
    if (!(c.tbOverhead >= 0.0 && c.tbOverhead < 1.0))
    {
        fail("tb_overhead", "must lie in [0, 1)");
    }
    if (!(c.seScale > 0.0 && c.seCap > 0.0))
    {
        fail("se_cap", "se_scale and se_cap must be > 0");
    }
    if (!(c.shadowingSigmaDb >= 0.0))
    {
        fail("shadowing_sigma_db", "must be >= 0");
    }
    if (c.mobilityTickMs == 0)
    {
        fail("mobility_tick_ms", "must be > 0");
    }
    if (c.shadowingPeriodMs == 0 || c.shadowingPeriodMs % c.mobilityTickMs != 0)
    {
        fail("shadowing_period_ms", "must be a positive multiple of mobility_tick_ms");
    }
    if (c.losPeriodMs == 0 || c.losPeriodMs % c.mobilityTickMs != 0)
    {
        fail("los_period_ms", "must be a positive multiple of mobility_tick_ms");
    }
    if (!(c.headingPeriodS > 0.0))
    {
        fail("heading_period_s", "must be > 0");
    }
    if (c.bsrPeriodMs == 0)
    {
        fail("bsr_period_ms", "must be > 0");
    }
    if (c.airLatencySubframes == 0)
    {
        fail("air_latency_subframes", "must be >= 1");
    }
    if (c.occupancyWindowMs == 0)
    {
        fail("occupancy_window_ms", "must be > 0");
    }
    if (!(c.rUrllcPackets >= 0.0))
    {
        fail("r_urllc_packets", "must be >= 0");
    }
    if (!(c.rEmbbPackets >= 0.0))
    {
        fail("r_embb_packets", "must be >= 0");
    }
    if (c.embbPrimaryCc > 1)
    {
        fail("embb_primary_cc", "must be 0 or 1");
    }
    if (c.urllcPrimaryCc > 1)
    {
        fail("urllc_primary_cc", "must be 0 or 1");
    }
}

/// Resolves a store into a validated configuration. Sweep keys are ignored.
inline ScenarioConfig
BuildScenarioConfig(const ConfigStore& store)
{
    ScenarioConfig cfg;
    for (const auto& e : store.GetEntries())
    {
        if (IsSweepKey(e.key))
        {
            continue;
        }
        const auto& schema = detail::ConfigSchema();
        auto spec = std::find_if(schema.begin(), schema.end(), [&](const detail::FieldSpec& f) {
            return e.key == f.key;
        });
        if (spec == schema.end())
        {
            throw ConfigError(e.key, e.line, "unknown key");
        }
        bool ok = std::visit(
            [&](auto ptr) {
                using T = std::remove_cvref_t<decltype(cfg.*ptr)>;
                if constexpr (std::is_same_v<T, PolicyKind>)
                {
                    auto p = ParsePolicy(e.value);
                    if (p)
                    {
                        cfg.*ptr = *p;
                    }
                    return p.has_value();
                }
                else
                {
                    return detail::ParseNumber(e.value, cfg.*ptr);
                }
            },
            spec->ptr);
        if (!ok)
        {
            throw ConfigError(e.key, e.line, "invalid value '" + e.value + "'");
        }
    }
    ValidateConfig(cfg, store);
    return cfg;
}

/// Every key with its resolved value, one `key=value` per line, schema order.
inline std::string
CanonicalConfigText(const ScenarioConfig& cfg)
{
    std::string out;
    for (const auto& f : detail::ConfigSchema())
    {
        std::visit(
            [&](auto ptr) {
                using T = std::remove_cvref_t<decltype(cfg.*ptr)>;
                if constexpr (std::is_same_v<T, PolicyKind>)
                {
                    out += fmt::format("{}={}\n", f.key, ToString(cfg.*ptr));
                }
                else
                {
                    out += fmt::format("{}={}\n", f.key, cfg.*ptr);
                }
            },
            f.ptr);
    }
    return out;
}

/// FNV-1a 64 of the canonical text, as 16 hex digits.
inline std::string
ConfigHash(const ScenarioConfig& cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : CanonicalConfigText(cfg))
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

inline LinkParams
MakeLinkParams(const ScenarioConfig& c)
{
    LinkParams p;
    p.txPowerDbm = c.txPowerDbm;
    p.noiseFigureDb = c.noiseFigureDb;
    p.seScale = c.seScale;
    p.seCap = c.seCap;
    p.sinrMinDb = c.sinrMinDb;
    p.tbOverhead = c.tbOverhead;
    p.blerAtEdge = c.blerAtEdge;
    return p;
}

/// Carriers for the configured policy. Without CA there is one carrier at
/// the CC0 frequency holding the whole system bandwidth; otherwise CC0 gets
/// cc_ratio of it and CC1 the rest.
inline std::vector<CarrierComponent>
BuildCarriers(const ScenarioConfig& c)
{
    auto make = [&](CcId id, double freq, double share, double gain) {
        CarrierComponent cc;
        cc.id = id;
        cc.centerFreqHz = freq;
        cc.bandwidthShare = share;
        cc.bandwidthHz = c.totalBandwidthHz * share;
        cc.framesPerSecond = c.framesPerSecond;
        cc.subframesPerFrame = c.subframesPerFrame;
        cc.symbolsPerSubframe = c.symbolsPerSubframe;
        cc.ctrlSymbols = c.ctrlSymbols;
        cc.bfGainDb = gain;
        cc.Validate();
        return cc;
    };
    if (c.policy == PolicyKind::NoCa)
    {
        return {make(0, c.cc0FreqHz, 1.0, c.cc0BfGainDb)};
    }
    return {make(0, c.cc0FreqHz, c.ccRatio, c.cc0BfGainDb),
            make(1, c.cc1FreqHz, 1.0 - c.ccRatio, c.cc1BfGainDb)};
}

} // namespace millislice
