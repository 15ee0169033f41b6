/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/core/error.hpp"
#include "millislice/core/sim-time.hpp"
#include "millislice/mac/bsr.hpp"
#include "millislice/phy/carrier-component.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

namespace millislice
{

enum class EnqueueResult
{
    Accepted,
    Dropped,
};

/// A run of bytes belonging to one application packet, carried in a TB.
struct Segment
{
    std::uint64_t packetId{0};
    std::uint32_t bytes{0};
    std::uint32_t attempts{0};
};

struct TbPayload
{
    std::vector<Segment> segments;
    std::uint64_t bytes{0};
};

struct DeliveredPacket
{
    std::uint64_t packetId{0};
    std::uint32_t bytes{0};
    SimTime arrival{};
};

/// Packets completed or lost as a consequence of one TB outcome.
struct TbOutcome
{
    std::vector<DeliveredPacket> delivered;
    std::uint32_t lostPackets{0};
    std::uint64_t discardedBytes{0};
};

/// Byte-level bookkeeping; closes exactly at any instant.
struct ByteAccounting
{
    std::uint64_t enqueued{0};
    std::uint64_t droppedAtEnqueue{0};
    std::uint64_t delivered{0};
    std::uint64_t discarded{0};
    std::uint64_t queued{0};
    std::uint64_t inFlight{0};

    bool Closes() const
    {
        return enqueued == droppedAtEnqueue + delivered + discarded + queued + inFlight;
    }
};

/**
 * One downlink radio bearer: application source, RLC-AM transmission and
 * retransmission queues, and the primary carrier of its QoS class.
 *
 * Packets map 1:1 to RLC SDUs. TBs may carry several SDUs or pieces of one.
 * Retransmission queues are kept per carrier: a failed segment is retried on
 * the carrier that sent it.
 */
class RlcAmFlow
{
  public:
    struct Config
    {
        FlowId flowId{0};
        Qci qci{Qci::Embb};
        std::uint32_t ueId{0};
        CcId primaryCc{0};
        std::uint32_t packetSize{1400};
        double sourceRateBps{1e6};
        std::uint64_t maxTxBuffer{1 << 20};
        std::uint32_t maxRlcRetx{5};
        std::size_t numCcs{2};
    };

    explicit RlcAmFlow(const Config& cfg)
        : m_cfg(cfg),
          m_retx(cfg.numCcs),
          m_retxBytes(cfg.numCcs, 0)
    {
    }

    const Config& GetConfig() const
    {
        return m_cfg;
    }

    FlowId GetFlowId() const
    {
        return m_cfg.flowId;
    }

    Qci GetQci() const
    {
        return m_cfg.qci;
    }

    std::uint64_t GetTxQueueBytes() const
    {
        return m_txBytes;
    }

    std::uint64_t GetRetxQueueBytes() const
    {
        std::uint64_t total = 0;
        for (auto b : m_retxBytes)
        {
            total += b;
        }
        return total;
    }

    std::uint64_t GetRetxQueueBytes(CcId cc) const
    {
        return m_retxBytes.at(cc);
    }

    bool IsEmpty() const
    {
        return m_txBytes == 0 && GetRetxQueueBytes() == 0;
    }

    const ByteAccounting& GetAccounting() const
    {
        return m_bytes;
    }

    /// Packets still being worked on (queued, in flight, or partially sent).
    std::size_t GetOpenPackets() const
    {
        return m_packets.size();
    }

    /// Drop-tail admission against the transmission buffer cap.
    EnqueueResult Enqueue(std::uint64_t packetId, std::uint32_t bytes, SimTime now)
    {
        if (bytes == 0)
        {
            throw SimulationError("Enqueue: zero-byte packet");
        }
        m_bytes.enqueued += bytes;
        if (m_txBytes + bytes > m_cfg.maxTxBuffer)
        {
            m_bytes.droppedAtEnqueue += bytes;
            return EnqueueResult::Dropped;
        }
        m_tx.push_back(Segment{packetId, bytes, 0});
        m_txBytes += bytes;
        m_bytes.queued += bytes;
        m_packets.emplace(packetId, PacketRecord{bytes, bytes, now, false});
        return EnqueueResult::Accepted;
    }

    Bsr GenerateBsr(SimTime now) const
    {
        return Bsr{m_cfg.flowId, m_cfg.qci, m_txBytes, GetRetxQueueBytes(), now};
    }

    /// Pulls up to `maxBytes` for a TB on carrier `cc`: that carrier's
    /// retransmissions first, then new data.
    TbPayload BuildTb(CcId cc, std::uint64_t maxBytes)
    {
        TbPayload tb;
        auto& retx = m_retx.at(cc);
        while (maxBytes > 0 && !retx.empty())
        {
            auto taken = Take(retx.front(), maxBytes);
            if (retx.front().bytes == 0)
            {
                retx.pop_front();
            }
            m_retxBytes[cc] -= taken.bytes;
            maxBytes -= taken.bytes;
            tb.bytes += taken.bytes;
            tb.segments.push_back(taken);
        }
        while (maxBytes > 0 && !m_tx.empty())
        {
            auto taken = Take(m_tx.front(), maxBytes);
            if (m_tx.front().bytes == 0)
            {
                m_tx.pop_front();
            }
            m_txBytes -= taken.bytes;
            maxBytes -= taken.bytes;
            tb.bytes += taken.bytes;
            tb.segments.push_back(taken);
        }
        m_bytes.queued -= tb.bytes;
        m_bytes.inFlight += tb.bytes;
        return tb;
    }

    /// Applies the HARQ/ARQ outcome of a TB built on carrier `cc`.
    TbOutcome OnTbResult(const TbPayload& tb, CcId cc, bool success)
    {
        TbOutcome out;
        m_bytes.inFlight -= tb.bytes;
        for (Segment seg : tb.segments)
        {
            auto it = m_packets.find(seg.packetId);
            if (it == m_packets.end())
            {
                throw SimulationError("OnTbResult: unknown packet");
            }
            PacketRecord& rec = it->second;
            if (success)
            {
                m_bytes.delivered += seg.bytes;
                rec.outstanding -= seg.bytes;
                if (rec.outstanding == 0)
                {
                    if (!rec.lost)
                    {
                        out.delivered.push_back(DeliveredPacket{seg.packetId, rec.size, rec.arrival});
                    }
                    m_packets.erase(it);
                }
                continue;
            }
            ++seg.attempts;
            if (seg.attempts > m_cfg.maxRlcRetx)
            {
                m_bytes.discarded += seg.bytes;
                out.discardedBytes += seg.bytes;
                rec.outstanding -= seg.bytes;
                if (!rec.lost)
                {
                    rec.lost = true;
                    ++out.lostPackets;
                }
                if (rec.outstanding == 0)
                {
                    m_packets.erase(it);
                }
                continue;
            }
            m_retx.at(cc).push_back(seg);
            m_retxBytes[cc] += seg.bytes;
            m_bytes.queued += seg.bytes;
        }
        return out;
    }

  private:
    struct PacketRecord
    {
        std::uint32_t size;
        std::uint32_t outstanding;
        SimTime arrival;
        bool lost;
    };

    static Segment Take(Segment& from, std::uint64_t maxBytes)
    {
        auto n = static_cast<std::uint32_t>(std::min<std::uint64_t>(from.bytes, maxBytes));
        from.bytes -= n;
        return Segment{from.packetId, n, from.attempts};
    }

    Config m_cfg;
    std::deque<Segment> m_tx;
    std::uint64_t m_txBytes{0};
    std::vector<std::deque<Segment>> m_retx;
    std::vector<std::uint64_t> m_retxBytes;
    std::unordered_map<std::uint64_t, PacketRecord> m_packets;
    ByteAccounting m_bytes;
};

} // namespace millislice
