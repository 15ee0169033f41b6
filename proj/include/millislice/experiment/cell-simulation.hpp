/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/cc-manager/cc-manager.hpp"
#include "millislice/core/rng-stream.hpp"
#include "millislice/core/simulator.hpp"
#include "millislice/experiment/scenario-config.hpp"
#include "millislice/mac/rlc-am-flow.hpp"
#include "millislice/mac/round-robin-scheduler.hpp"
#include "millislice/metrics/run-stats.hpp"
#include "millislice/phy/link-model.hpp"
#include "millislice/scenario/mobility.hpp"
#include "millislice/scenario/traffic-source.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace millislice
{

/**
 * Single-cell downlink with carrier aggregation.
 *
 * Flow i is served to UE i; URLLC flows take the lowest ids, followed by the
 * eMBB flows. Every subframe boundary first issues the periodic BSRs (in
 * flow-id order), then runs each carrier's MAC. TB outcomes reach the RLC one
 * air latency later, ahead of the next boundary's BSRs.
 */
class CellSimulation
{
  public:
    /// Replaces the SINR of (ue, cc) at time t when it returns a value.
    using LinkOverride = std::function<std::optional<double>(std::uint32_t, CcId, SimTime)>;

    explicit CellSimulation(const ScenarioConfig& cfg)
        : m_cfg(cfg),
          m_link(MakeLinkParams(cfg)),
          m_carriers(BuildCarriers(cfg)),
          m_mobility(cfg.radiusM, cfg.headingPeriodS)
    {
        ValidateConfig(cfg);
        const std::uint32_t nUes = cfg.nUrllcUes + cfg.nEmbbUes;

        QciCcMap qciMap{{Qci::Urllc, static_cast<CcId>(cfg.urllcPrimaryCc)},
                        {Qci::Embb, static_cast<CcId>(cfg.embbPrimaryCc)}};
        Thresholds thr;
        thr.SetPackets(Qci::Urllc, cfg.rUrllcPackets, cfg.urllcPacketBytes);
        thr.SetPackets(Qci::Embb, cfg.rEmbbPackets, cfg.embbPacketBytes);
        m_ccManager = std::make_unique<CcManager>(cfg.policy,
                                                  m_carriers.size(),
                                                  qciMap,
                                                  thr,
                                                  MilliSeconds(cfg.occupancyWindowMs));

        for (const auto& cc : m_carriers)
        {
            m_macs.emplace_back(cc, cfg.tbOverhead);
            CcStats s;
            s.cc = cc;
            m_ccStats.push_back(s);
        }

        RngStream dropRng(cfg.seed, MakeStreamId(RngSubsystem::Mobility, 0xFFFFF));
        m_ues = DropUsers(nUes, cfg.radiusM, dropRng, cfg.ueSpeedMin, cfg.ueSpeedMax);
        m_sinceHeadingDraw.assign(nUes, 0.0);
        m_los.assign(nUes, false);
        m_shadowing.assign(nUes, std::vector<double>(m_carriers.size(), 0.0));
        m_links.assign(nUes, std::vector<LinkState>(m_carriers.size()));
        for (std::uint32_t ue = 0; ue < nUes; ++ue)
        {
            m_mobilityRng.emplace_back(cfg.seed, MakeStreamId(RngSubsystem::Mobility, ue));
            m_losRng.emplace_back(cfg.seed, MakeStreamId(RngSubsystem::LineOfSight, ue));
            std::vector<RngStream> perCc;
            for (const auto& cc : m_carriers)
            {
                perCc.emplace_back(cfg.seed, MakeStreamId(RngSubsystem::Shadowing, ue * 16u + cc.id));
            }
            m_shadowRng.push_back(std::move(perCc));
        }

        for (std::uint32_t i = 0; i < nUes; ++i)
        {
            bool urllc = i < cfg.nUrllcUes;
            RlcAmFlow::Config fc;
            fc.flowId = i;
            fc.qci = urllc ? Qci::Urllc : Qci::Embb;
            fc.ueId = i;
            fc.primaryCc = static_cast<CcId>(urllc ? cfg.urllcPrimaryCc : cfg.embbPrimaryCc);
            fc.packetSize = urllc ? cfg.urllcPacketBytes : cfg.embbPacketBytes;
            fc.sourceRateBps = (urllc ? cfg.urllcRateMbps : cfg.embbRateMbps) * 1e6;
            fc.maxTxBuffer = cfg.maxTxBufferBytes;
            fc.maxRlcRetx = cfg.maxRlcRetx;
            fc.numCcs = m_carriers.size();
            m_flows.emplace_back(fc);
            m_tbRng.emplace_back(cfg.seed, MakeStreamId(RngSubsystem::TbErrors, i));
            FlowStats fs;
            fs.flowId = i;
            fs.qci = fc.qci;
            m_flowStats.push_back(fs);
            m_nextPacketId.push_back(0);
            for (auto& mac : m_macs)
            {
                mac.RegisterFlow(i);
            }
        }
        m_trafficEnabled.assign(nUes, true);
    }

    CellSimulation(const CellSimulation&) = delete;
    CellSimulation& operator=(const CellSimulation&) = delete;

    const ScenarioConfig& GetConfig() const
    {
        return m_cfg;
    }

    const std::vector<CarrierComponent>& GetCarriers() const
    {
        return m_carriers;
    }

    std::size_t GetNumFlows() const
    {
        return m_flows.size();
    }

    const RlcAmFlow& GetFlow(FlowId f) const
    {
        return m_flows.at(f);
    }

    const UePosition& GetUe(std::uint32_t ue) const
    {
        return m_ues.at(ue);
    }

    const LinkState& GetLink(std::uint32_t ue, CcId cc) const
    {
        return m_links.at(ue).at(cc);
    }

    Simulator& GetSimulator()
    {
        return m_sim;
    }

    const CcManager& GetCcManager() const
    {
        return *m_ccManager;
    }

    void SetRoutingTraceSink(std::function<void(const RoutingTraceRecord&)> sink)
    {
        m_ccManager->SetTraceSink(std::move(sink));
    }

    void SetLinkOverride(LinkOverride fn)
    {
        m_override = std::move(fn);
    }

    /// Removes the CBR source of a flow; packets can still be injected.
    void DisableTrafficSource(FlowId f)
    {
        m_trafficEnabled.at(f) = false;
    }

    /// Schedules an application packet for flow `f` at time `t`.
    void InjectPacket(FlowId f, SimTime t)
    {
        m_sim.Schedule(t, EventKind::PacketArrival, [this, f] { OnPacketArrival(f); });
    }

    /// Called after every subframe's scheduling, with that subframe's
    /// allocations per carrier. Used for budget audits in tests.
    void SetAllocationObserver(std::function<void(SimTime, const std::vector<Allocation>&)> fn)
    {
        m_allocObserver = std::move(fn);
    }

    RunStats Run()
    {
        Start();
        m_sim.RunUntil(Seconds(m_cfg.durationS));
        return Collect();
    }

  private:
    void Start()
    {
        for (std::uint32_t ue = 0; ue < m_ues.size(); ++ue)
        {
            DrawLos(ue);
            for (CcId cc = 0; cc < m_carriers.size(); ++cc)
            {
                DrawShadowing(ue, cc);
            }
        }
        RefreshLinks();

        for (FlowId f = 0; f < m_flows.size(); ++f)
        {
            if (!m_trafficEnabled[f])
            {
                continue;
            }
            const auto& fc = m_flows[f].GetConfig();
            RngStream jitter(m_cfg.seed, MakeStreamId(RngSubsystem::TrafficJitter, f));
            SimTime phase = TrafficSource::DrawPhase(fc.sourceRateBps, fc.packetSize, jitter);
            m_sources.emplace_back(f, fc.sourceRateBps, fc.packetSize, phase);
        }
        for (std::size_t s = 0; s < m_sources.size(); ++s)
        {
            ScheduleNextArrival(s);
        }

        m_sim.Schedule(SimTime{}, EventKind::SubframeBoundary, [this] { OnSubframe(); });
        m_sim.Schedule(MilliSeconds(m_cfg.mobilityTickMs), EventKind::MobilityTick, [this] { OnMobilityTick(); });
    }

    void ScheduleNextArrival(std::size_t source)
    {
        SimTime t = m_sources[source].Next();
        m_sim.Schedule(t, EventKind::PacketArrival, [this, source] {
            OnPacketArrival(m_sources[source].GetFlowId());
            ScheduleNextArrival(source);
        });
    }

    void OnPacketArrival(FlowId f)
    {
        RlcAmFlow& flow = m_flows[f];
        bool wasEmpty = flow.IsEmpty();
        ++m_flowStats[f].sentPackets;
        auto result = flow.Enqueue(m_nextPacketId[f]++, flow.GetConfig().packetSize, m_sim.Now());
        if (result == EnqueueResult::Dropped)
        {
            ++m_flowStats[f].droppedPackets;
            return;
        }
        if (wasEmpty)
        {
            DeliverBsr(flow.GenerateBsr(m_sim.Now()));
        }
    }

    /// Hands a report to the CC manager and updates every carrier's view of
    /// the flow's pending bytes.
    void DeliverBsr(const Bsr& bsr)
    {
        RoutedBsrs routed = m_ccManager->OnBsr(bsr, m_sim.Now());
        const RlcAmFlow& flow = m_flows[bsr.flowId];
        for (CcId cc = 0; cc < m_carriers.size(); ++cc)
        {
            auto& mac = m_macs[cc];
            // retransmissions are owed to the carrier that sent the failed TB
            std::uint64_t retx = flow.GetRetxQueueBytes(cc);
            auto it = routed.find(cc);
            if (it != routed.end())
            {
                mac.SetPending(bsr.flowId, it->second.txQueueBytes + retx);
                m_ccStats[cc].routedBytes[bsr.qci] += it->second.TotalBytes();
            }
            else if (mac.GetPending(bsr.flowId) < retx)
            {
                mac.SetPending(bsr.flowId, retx);
            }
        }
    }

    void OnSubframe()
    {
        const SimTime now = m_sim.Now();
        const std::uint64_t subframe = m_subframeIndex++;

        if (subframe % m_cfg.bsrPeriodMs == 0)
        {
            for (auto& flow : m_flows)
            {
                DeliverBsr(flow.GenerateBsr(now));
            }
        }

        const SimTime airLatency = m_carriers.front().SubframeDuration() * m_cfg.airLatencySubframes;
        for (CcId cc = 0; cc < m_carriers.size(); ++cc)
        {
            auto allocs = m_macs[cc].ScheduleSubframe(subframe, [&](FlowId f) {
                return CurrentLink(f, cc, now).spectralEfficiency;
            });
            std::uint32_t used = 0;
            for (const auto& a : allocs)
            {
                used += a.nSymbols;
                RlcAmFlow& flow = m_flows[a.flowId];
                TbPayload tb = flow.BuildTb(cc, a.tbBits / 8);
                if (tb.bytes == 0)
                {
                    // stale report: nothing left to send on this carrier
                    m_macs[cc].SetPending(a.flowId, 0);
                    continue;
                }
                m_ccStats[cc].txSym += a.nSymbols;
                m_ccStats[cc].txBytes[flow.GetQci()] += tb.bytes;
                LinkState link = CurrentLink(a.flowId, cc, now);
                bool ok = TbSuccess(link.sinrDb, link.selectionSinrDb, m_tbRng[a.flowId], m_link);
                FlowId fid = a.flowId;
                m_sim.Schedule(now + airLatency, EventKind::TbDelivery, [this, fid, cc, ok, tb = std::move(tb)] {
                    OnTbDelivery(fid, cc, tb, ok);
                });
            }
            if (used > m_carriers[cc].DataSymbols())
            {
                throw SimulationError("subframe symbol budget exceeded on CC" + std::to_string(cc));
            }
            m_maxSymbolsInSubframe = std::max(m_maxSymbolsInSubframe, used);
            if (m_allocObserver)
            {
                m_allocObserver(now, allocs);
            }
        }
        ++m_subframesScheduled;

        m_sim.Schedule(now + m_carriers.front().SubframeDuration(), EventKind::SubframeBoundary, [this] {
            OnSubframe();
        });
    }

    void OnTbDelivery(FlowId f, CcId cc, const TbPayload& tb, bool success)
    {
        TbOutcome out = m_flows[f].OnTbResult(tb, cc, success);
        FlowStats& stats = m_flowStats[f];
        for (const auto& p : out.delivered)
        {
            RecordDelivery(stats, p.arrival, m_sim.Now(), p.bytes);
        }
        stats.lostPackets += out.lostPackets;
    }

    void OnMobilityTick()
    {
        const SimTime now = m_sim.Now();
        const double dt = m_cfg.mobilityTickMs / 1000.0;
        const std::int64_t ms = now.GetNanoSeconds() / 1'000'000;
        for (std::uint32_t ue = 0; ue < m_ues.size(); ++ue)
        {
            m_ues[ue] = m_mobility.Step(m_ues[ue], dt, m_sinceHeadingDraw[ue], m_mobilityRng[ue]);
            if (ms % m_cfg.losPeriodMs == 0)
            {
                DrawLos(ue);
            }
            if (ms % m_cfg.shadowingPeriodMs == 0)
            {
                for (CcId cc = 0; cc < m_carriers.size(); ++cc)
                {
                    DrawShadowing(ue, cc);
                }
            }
        }
        RefreshLinks();
        m_sim.Schedule(now + MilliSeconds(m_cfg.mobilityTickMs), EventKind::MobilityTick, [this] {
            OnMobilityTick();
        });
    }

    void DrawLos(std::uint32_t ue)
    {
        double d = std::max(m_ues[ue].Distance(), 1.0);
        double pLos = std::min(1.0, m_cfg.losReferenceM / d);
        m_los[ue] = m_losRng[ue].DrawBernoulli(pLos);
    }

    void DrawShadowing(std::uint32_t ue, CcId cc)
    {
        m_shadowing[ue][cc] = m_cfg.shadowingSigmaDb * m_shadowRng[ue][cc].DrawStandardNormal();
    }

    void RefreshLinks()
    {
        for (std::uint32_t ue = 0; ue < m_ues.size(); ++ue)
        {
            for (CcId cc = 0; cc < m_carriers.size(); ++cc)
            {
                m_links[ue][cc] = MakeLinkState(m_link,
                                                m_carriers[cc],
                                                ue,
                                                m_ues[ue].Distance(),
                                                m_los[ue],
                                                m_shadowing[ue][cc]);
            }
        }
    }

    LinkState CurrentLink(FlowId f, CcId cc, SimTime now) const
    {
        std::uint32_t ue = m_flows[f].GetConfig().ueId;
        LinkState s = m_links[ue][cc];
        if (m_override)
        {
            if (auto sinr = m_override(ue, cc, now))
            {
                s.sinrDb = *sinr;
                s.spectralEfficiency = SpectralEfficiency(*sinr, m_link);
                s.selectionSinrDb = SelectionSinrDb(*sinr, m_link);
            }
        }
        return s;
    }

    RunStats Collect()
    {
        RunStats run;
        run.meta.seed = m_cfg.seed;
        run.meta.policy = ToString(m_cfg.policy);
        run.meta.configHash = ConfigHash(m_cfg);
        run.durationSeconds = m_cfg.durationS;
        for (FlowId f = 0; f < m_flows.size(); ++f)
        {
            FlowStats s = m_flowStats[f];
            s.bytes = m_flows[f].GetAccounting();
            run.flows.push_back(s);
        }
        run.ccs = m_ccStats;
        run.subframesScheduled = m_subframesScheduled;
        run.maxSymbolsInSubframe = m_maxSymbolsInSubframe;
        return run;
    }

    ScenarioConfig m_cfg;
    LinkParams m_link;
    std::vector<CarrierComponent> m_carriers;
    RandomDirectionMobility m_mobility;
    Simulator m_sim;
    std::unique_ptr<CcManager> m_ccManager;
    std::vector<RoundRobinMacScheduler> m_macs;

    std::vector<UePosition> m_ues;
    std::vector<double> m_sinceHeadingDraw;
    std::vector<bool> m_los;
    std::vector<std::vector<double>> m_shadowing;
    std::vector<std::vector<LinkState>> m_links;
    std::vector<RngStream> m_mobilityRng;
    std::vector<RngStream> m_losRng;
    std::vector<std::vector<RngStream>> m_shadowRng;

    std::vector<RlcAmFlow> m_flows;
    std::vector<RngStream> m_tbRng;
    std::vector<FlowStats> m_flowStats;
    std::vector<std::uint64_t> m_nextPacketId;
    std::vector<bool> m_trafficEnabled;
    std::vector<TrafficSource> m_sources;

    std::vector<CcStats> m_ccStats;
    std::uint64_t m_subframeIndex{0};
    std::uint64_t m_subframesScheduled{0};
    std::uint32_t m_maxSymbolsInSubframe{0};

    LinkOverride m_override;
    std::function<void(SimTime, const std::vector<Allocation>&)> m_allocObserver;
};

} // namespace millislice
