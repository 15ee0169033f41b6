/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#include "millislice/core/rng-stream.hpp"
#include "millislice/core/simulator.hpp"
#include "millislice/mac/rlc-am-flow.hpp"
#include "millislice/mac/round-robin-scheduler.hpp"
#include "millislice/scenario/traffic-source.hpp"

#include <gtest/gtest.h>

#include <deque>
#include <numeric>

using namespace millislice;

namespace
{

CarrierComponent
Carrier(double bandwidthHz)
{
    CarrierComponent cc;
    cc.bandwidthHz = bandwidthHz;
    return cc;
}

RlcAmFlow
MakeFlow(std::uint32_t packetSize = 1400, std::uint32_t maxRetx = 5)
{
    RlcAmFlow::Config c;
    c.flowId = 0;
    c.qci = Qci::Embb;
    c.packetSize = packetSize;
    c.maxRlcRetx = maxRetx;
    c.numCcs = 2;
    return RlcAmFlow(c);
}

std::uint32_t
SymbolsOf(const std::vector<Allocation>& allocs, FlowId f)
{
    for (const auto& a : allocs)
    {
        if (a.flowId == f)
        {
            return a.nSymbols;
        }
    }
    return 0;
}

} // namespace

TEST(RlcEnqueue, AcceptsUntilCap)
{
    RlcAmFlow flow = MakeFlow();
    EXPECT_EQ(flow.Enqueue(0, 1400, SimTime{}), EnqueueResult::Accepted);
    EXPECT_EQ(flow.GetTxQueueBytes(), 1400u);
}

TEST(RlcEnqueue, DropsPacketThatWouldExceedCap)
{
    RlcAmFlow flow = MakeFlow();
    // 1,048,000 bytes queued: 1000 packets of 1048 bytes
    for (std::uint64_t i = 0; i < 1000; ++i)
    {
        ASSERT_EQ(flow.Enqueue(i, 1048, SimTime{}), EnqueueResult::Accepted);
    }
    ASSERT_EQ(flow.GetTxQueueBytes(), 1048000u);
    EXPECT_EQ(flow.Enqueue(1000, 1400, SimTime{}), EnqueueResult::Dropped);
    EXPECT_EQ(flow.GetTxQueueBytes(), 1048000u);
    EXPECT_EQ(flow.Enqueue(1001, 576, SimTime{}), EnqueueResult::Accepted);
    EXPECT_EQ(flow.GetAccounting().droppedAtEnqueue, 1400u);
    EXPECT_TRUE(flow.GetAccounting().Closes());
}

TEST(RlcEnqueue, ZeroCapacityDropsEverything)
{
    RlcAmFlow::Config c;
    c.maxTxBuffer = 0;
    RlcAmFlow flow(c);
    for (std::uint64_t i = 0; i < 100; ++i)
    {
        EXPECT_EQ(flow.Enqueue(i, 1400, SimTime{}), EnqueueResult::Dropped);
    }
    EXPECT_EQ(flow.GetAccounting().droppedAtEnqueue, flow.GetAccounting().enqueued);
}

TEST(RlcEnqueue, ZeroBytePacketIsRejected)
{
    RlcAmFlow flow = MakeFlow();
    EXPECT_THROW(flow.Enqueue(0, 0, SimTime{}), SimulationError);
}

TEST(Bsr, SnapshotOfTxQueue)
{
    RlcAmFlow flow = MakeFlow();
    for (std::uint64_t i = 0; i < 3; ++i)
    {
        flow.Enqueue(i, 1400, SimTime{});
    }
    Bsr b = flow.GenerateBsr(MilliSeconds(2));
    EXPECT_EQ(b.txQueueBytes, 4200u);
    EXPECT_EQ(b.retxQueueBytes, 0u);
    EXPECT_EQ(b.issuedAt, MilliSeconds(2));
    EXPECT_EQ(b.qci, Qci::Embb);
}

TEST(Bsr, EmptyQueuesStillReport)
{
    RlcAmFlow flow = MakeFlow();
    Bsr b = flow.GenerateBsr(MilliSeconds(1));
    EXPECT_EQ(b.txQueueBytes, 0u);
    EXPECT_EQ(b.retxQueueBytes, 0u);
}

TEST(Bsr, ReportsRetransmissionBytes)
{
    RlcAmFlow flow = MakeFlow(4200);
    flow.Enqueue(0, 4200, SimTime{});
    TbPayload tb = flow.BuildTb(0, 10000);
    flow.OnTbResult(tb, 0, false);
    Bsr b = flow.GenerateBsr(MilliSeconds(1));
    EXPECT_EQ(b.txQueueBytes, 0u);
    EXPECT_EQ(b.retxQueueBytes, 4200u);
    EXPECT_EQ(flow.GetRetxQueueBytes(0), 4200u);
    EXPECT_EQ(flow.GetRetxQueueBytes(1), 0u);
}

TEST(RoundRobin, TwoBackloggedFlowsSplitEvenly)
{
    CarrierComponent cc = Carrier(250e6);
    std::vector<SchedulingCandidate> c{{0, 1u << 30, 2.0}, {1, 1u << 30, 2.0}};
    auto a = ScheduleRoundRobin(cc, c, 0);
    EXPECT_EQ(SymbolsOf(a, 0), 11u);
    EXPECT_EQ(SymbolsOf(a, 1), 11u);
}

TEST(RoundRobin, ExtraSymbolGoesToPointerFlow)
{
    CarrierComponent cc = Carrier(250e6);
    std::vector<SchedulingCandidate> c{{7, 1u << 30, 2.0}, {8, 1u << 30, 2.0}, {9, 1u << 30, 2.0}};
    auto a = ScheduleRoundRobin(cc, c, 0);
    EXPECT_EQ(SymbolsOf(a, 7), 8u);
    EXPECT_EQ(SymbolsOf(a, 8), 7u);
    EXPECT_EQ(SymbolsOf(a, 9), 7u);
}

TEST(RoundRobin, SmallDemandLeavesSymbolsIdle)
{
    // 500 MHz at SE 1.0: one symbol carries 18,750 bits after overhead
    CarrierComponent cc = Carrier(500e6);
    ASSERT_EQ(TbCapacityBits(cc, 1, 1.0), 18750u);
    std::vector<SchedulingCandidate> c{{0, 63, 1.0}}; // 504 bits
    auto a = ScheduleRoundRobin(cc, c, 0);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].nSymbols, 1u);
    EXPECT_EQ(cc.DataSymbols() - a[0].nSymbols, 21u);
}

TEST(RoundRobin, TrimmedSymbolsPassToNextFlow)
{
    CarrierComponent cc = Carrier(250e6);
    // flow 0 needs a single symbol; its other ten go to flow 1
    std::vector<SchedulingCandidate> c{{0, 100, 2.0}, {1, 1u << 30, 2.0}};
    auto a = ScheduleRoundRobin(cc, c, 0);
    EXPECT_EQ(SymbolsOf(a, 0), 1u);
    EXPECT_EQ(SymbolsOf(a, 1), 21u);
}

TEST(RoundRobin, LeftoverWrapsToEarlierFlows)
{
    CarrierComponent cc = Carrier(250e6);
    std::vector<SchedulingCandidate> c{{0, 1u << 30, 2.0}, {1, 100, 2.0}};
    auto a = ScheduleRoundRobin(cc, c, 0);
    EXPECT_EQ(SymbolsOf(a, 0), 21u);
    EXPECT_EQ(SymbolsOf(a, 1), 1u);
}

TEST(RoundRobin, BudgetNeverExceededRandomized)
{
    RngStream rng(5, MakeStreamId(RngSubsystem::Test, 5));
    for (double bw : {250e6, 500e6, 100e6})
    {
        CarrierComponent cc = Carrier(bw);
        for (int trial = 0; trial < 2000; ++trial)
        {
            auto k = static_cast<std::uint32_t>(rng.DrawUniform(1, 40));
            std::vector<SchedulingCandidate> c;
            for (std::uint32_t i = 0; i < k; ++i)
            {
                auto bytes = static_cast<std::uint64_t>(rng.DrawUniform(1, 200000));
                c.push_back({i, bytes, rng.DrawUniform(0.05, 7.4)});
            }
            auto a = ScheduleRoundRobin(cc, c, trial);
            std::uint32_t used = 0;
            for (const auto& x : a)
            {
                ASSERT_GE(x.nSymbols, 1u);
                used += x.nSymbols;
                const auto& cand = c[x.flowId];
                // trimming: one symbol fewer would not have covered the report
                if (x.nSymbols > 1 && x.tbBits >= cand.pendingBytes * 8)
                {
                    ASSERT_LT(TbCapacityBits(cc, x.nSymbols - 1, cand.se), cand.pendingBytes * 8);
                }
            }
            ASSERT_LE(used, cc.DataSymbols());
        }
    }
}

TEST(RoundRobin, PointerAdvancesEverySubframe)
{
    RoundRobinMacScheduler mac(Carrier(250e6), 0.1);
    for (FlowId f = 0; f < 3; ++f)
    {
        mac.SetPending(f, 1u << 30);
    }
    auto se = [](FlowId) { return 2.0; };
    EXPECT_EQ(SymbolsOf(mac.ScheduleSubframe(0, se), 0), 8u);
    EXPECT_EQ(SymbolsOf(mac.ScheduleSubframe(1, se), 1), 8u);
    EXPECT_EQ(SymbolsOf(mac.ScheduleSubframe(2, se), 2), 8u);
    EXPECT_EQ(SymbolsOf(mac.ScheduleSubframe(3, se), 0), 8u);
}

TEST(RoundRobin, OutageAndIdleFlowsAreSkipped)
{
    RoundRobinMacScheduler mac(Carrier(250e6), 0.1);
    mac.SetPending(0, 1u << 30);
    mac.SetPending(1, 1u << 30);
    mac.SetPending(2, 0);
    auto a = mac.ScheduleSubframe(0, [](FlowId f) { return f == 1 ? 0.0 : 2.0; });
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].flowId, 0u);
    EXPECT_EQ(a[0].nSymbols, 22u);
}

TEST(RoundRobin, PendingShrinksAsServed)
{
    RoundRobinMacScheduler mac(Carrier(250e6), 0.1);
    mac.SetPending(0, 100000);
    auto a = mac.ScheduleSubframe(0, [](FlowId) { return 2.0; });
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(mac.GetPending(0), 100000 - std::min<std::uint64_t>(100000, a[0].tbBits / 8));
}

TEST(Transmit, TbCoveringTwoPacketsDeliversBoth)
{
    RlcAmFlow flow = MakeFlow();
    flow.Enqueue(0, 1400, MilliSeconds(1));
    flow.Enqueue(1, 1400, MilliSeconds(2));
    TbPayload tb = flow.BuildTb(0, 2800);
    auto out = flow.OnTbResult(tb, 0, true);
    ASSERT_EQ(out.delivered.size(), 2u);
    EXPECT_EQ(out.delivered[0].arrival, MilliSeconds(1));
    EXPECT_EQ(out.delivered[1].arrival, MilliSeconds(2));
    EXPECT_TRUE(flow.IsEmpty());
}

TEST(Transmit, SegmentedPacketDeliveredWhenLastPieceArrives)
{
    RlcAmFlow flow = MakeFlow();
    flow.Enqueue(0, 1400, SimTime{});
    auto first = flow.OnTbResult(flow.BuildTb(0, 1000), 0, true);
    EXPECT_TRUE(first.delivered.empty());
    auto second = flow.OnTbResult(flow.BuildTb(0, 1000), 0, true);
    ASSERT_EQ(second.delivered.size(), 1u);
    EXPECT_EQ(second.delivered[0].bytes, 1400u);
}

TEST(Transmit, LossAfterMaxRetransmissions)
{
    RlcAmFlow flow = MakeFlow(1400, 5);
    flow.Enqueue(0, 1400, SimTime{});
    std::uint32_t lost = 0;
    for (int attempt = 0; attempt < 6; ++attempt)
    {
        TbPayload tb = flow.BuildTb(1, 5000);
        ASSERT_EQ(tb.bytes, 1400u);
        auto out = flow.OnTbResult(tb, 1, false);
        lost += out.lostPackets;
        if (attempt < 5)
        {
            EXPECT_EQ(out.lostPackets, 0u);
            EXPECT_EQ(flow.GetRetxQueueBytes(1), 1400u);
        }
    }
    EXPECT_EQ(lost, 1u);
    EXPECT_TRUE(flow.IsEmpty());
    EXPECT_EQ(flow.GetAccounting().discarded, 1400u);
    EXPECT_EQ(flow.GetOpenPackets(), 0u);
}

TEST(Transmit, RetransmissionsServedBeforeNewData)
{
    RlcAmFlow flow = MakeFlow();
    flow.Enqueue(0, 1400, SimTime{});
    flow.OnTbResult(flow.BuildTb(0, 1400), 0, false);
    flow.Enqueue(1, 1400, SimTime{});
    TbPayload tb = flow.BuildTb(0, 2000);
    ASSERT_EQ(tb.segments.size(), 2u);
    EXPECT_EQ(tb.segments[0].packetId, 0u);
    EXPECT_EQ(tb.segments[0].bytes, 1400u);
    EXPECT_EQ(tb.segments[0].attempts, 1u);
    EXPECT_EQ(tb.segments[1].packetId, 1u);
    EXPECT_EQ(tb.segments[1].bytes, 600u);
}

TEST(Transmit, RetransmissionStaysOnFailingCarrier)
{
    RlcAmFlow flow = MakeFlow();
    flow.Enqueue(0, 1400, SimTime{});
    flow.OnTbResult(flow.BuildTb(1, 1400), 1, false);
    EXPECT_EQ(flow.BuildTb(0, 5000).bytes, 0u);
    EXPECT_EQ(flow.BuildTb(1, 5000).bytes, 1400u);
}

// Random enqueue / TB build / outcome sequences against the closing identity.
TEST(RlcProperty, ByteAccountingClosesAlways)
{
    RngStream rng(21, MakeStreamId(RngSubsystem::Test, 21));
    for (int trial = 0; trial < 50; ++trial)
    {
        RlcAmFlow::Config c;
        c.maxTxBuffer = 20000;
        c.maxRlcRetx = 2;
        RlcAmFlow flow(c);
        std::deque<std::pair<TbPayload, CcId>> inFlight;
        std::uint64_t id = 0;
        std::uint64_t deliveredBytes = 0;
        for (int step = 0; step < 2000; ++step)
        {
            double u = rng.NextUnit();
            if (u < 0.4)
            {
                flow.Enqueue(id++, static_cast<std::uint32_t>(rng.DrawUniform(1, 3000)), MilliSeconds(step));
            }
            else if (u < 0.7)
            {
                auto cc = static_cast<CcId>(rng.NextUnit() < 0.5 ? 0 : 1);
                TbPayload tb = flow.BuildTb(cc, static_cast<std::uint64_t>(rng.DrawUniform(0, 6000)));
                if (tb.bytes > 0)
                {
                    inFlight.emplace_back(std::move(tb), cc);
                }
            }
            else if (!inFlight.empty())
            {
                auto [tb, cc] = std::move(inFlight.front());
                inFlight.pop_front();
                auto out = flow.OnTbResult(tb, cc, rng.NextUnit() < 0.7);
                for (const auto& p : out.delivered)
                {
                    deliveredBytes += p.bytes;
                }
            }
            const auto& acc = flow.GetAccounting();
            ASSERT_TRUE(acc.Closes());
            ASSERT_EQ(acc.queued, flow.GetTxQueueBytes() + flow.GetRetxQueueBytes());
            ASSERT_LE(flow.GetTxQueueBytes(), c.maxTxBuffer);
            Bsr b = flow.GenerateBsr(MilliSeconds(step));
            ASSERT_EQ(b.TotalBytes(), acc.queued);
        }
        // whole-packet deliveries never exceed delivered bytes
        EXPECT_LE(deliveredBytes, flow.GetAccounting().delivered);
    }
}

namespace
{

/// One flow on one carrier with a fixed SE and error-free TBs; returns the
/// delivered application throughput in bit/s.
double
SingleFlowThroughput(double offeredBps, double se, double seconds)
{
    CarrierComponent cc = Carrier(250e6);
    RlcAmFlow::Config fc;
    fc.packetSize = 1400;
    fc.sourceRateBps = offeredBps;
    fc.numCcs = 1;
    RlcAmFlow flow(fc);
    RoundRobinMacScheduler mac(cc, 0.1);
    TrafficSource src(0, offeredBps, 1400);
    Simulator sim;
    std::uint64_t delivered = 0;
    std::uint64_t nextId = 0;

    std::function<void()> arrival = [&] {
        flow.Enqueue(nextId++, 1400, sim.Now());
        sim.Schedule(src.Next(), EventKind::PacketArrival, arrival);
    };
    std::uint64_t sf = 0;
    std::function<void()> subframe = [&] {
        mac.SetPending(0, flow.GenerateBsr(sim.Now()).TotalBytes());
        for (const auto& a : mac.ScheduleSubframe(sf++, [se](FlowId) { return se; }))
        {
            TbPayload tb = flow.BuildTb(0, a.tbBits / 8);
            sim.ScheduleAfter(MilliSeconds(1), EventKind::TbDelivery, [&, tb] {
                for (const auto& p : flow.OnTbResult(tb, 0, true).delivered)
                {
                    delivered += p.bytes;
                }
            });
        }
        sim.ScheduleAfter(MilliSeconds(1), EventKind::SubframeBoundary, subframe);
    };
    sim.Schedule(src.Next(), EventKind::PacketArrival, arrival);
    sim.Schedule(SimTime{}, EventKind::SubframeBoundary, subframe);
    sim.RunUntil(Seconds(seconds));
    return delivered * 8.0 / seconds;
}

} // namespace

TEST(MacThroughput, SingleFlowMatchesOfferedOrCapacity)
{
    CarrierComponent cc = Carrier(250e6);
    const double se = 2.0;
    const double capacityBps = TbCapacityBits(cc, cc.DataSymbols(), se) * 1000.0;
    ASSERT_DOUBLE_EQ(capacityBps, 412.5e6);
    for (double offered : {100e6, 400e6, 1e9})
    {
        double expected = std::min(offered, capacityBps);
        double measured = SingleFlowThroughput(offered, se, 5.0);
        EXPECT_NEAR(measured, expected, 0.05 * expected) << "offered " << offered;
    }
}
