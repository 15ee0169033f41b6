/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/metrics/run-stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace millislice
{

/// One row of a run file: `scope,id,qci,metric,value`.
struct Record
{
    std::string scope;
    std::string id;
    std::string qci;
    std::string metric;
    double value{std::numeric_limits<double>::quiet_NaN()};

    bool operator==(const Record& o) const
    {
        bool sameValue = value == o.value || (std::isnan(value) && std::isnan(o.value));
        return scope == o.scope && id == o.id && qci == o.qci && metric == o.metric && sameValue;
    }
};

struct RunRecords
{
    RunMetadata meta;
    double durationSeconds{0.0};
    std::vector<Record> records;

    /// First matching value, NaN if absent.
    double Find(const std::string& scope, const std::string& id, const std::string& metric) const
    {
        for (const auto& r : records)
        {
            if (r.scope == scope && r.id == id && r.metric == metric)
            {
                return r.value;
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
};

namespace detail
{

inline double
OrNan(const std::optional<double>& v)
{
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

inline double
MeanOfDefined(const std::vector<double>& xs)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : xs)
    {
        if (!std::isnan(x))
        {
            sum += x;
            ++n;
        }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

inline std::string
FormatValue(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    return fmt::format("{}", v);
}

inline double
ParseValue(const std::string& s)
{
    if (s == "nan")
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
    {
        throw std::runtime_error("bad numeric value '" + s + "'");
    }
    return v;
}

inline std::vector<std::string>
SplitCsv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
    {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',')
    {
        out.emplace_back();
    }
    return out;
}

} // namespace detail

/**
 * Flattens a run into records: one block per flow, one per QCI (per-user
 * means plus the aggregate throughput), one per carrier (utilization and
 * routing counters) and a run block.
 */
inline RunRecords
Summarize(const RunStats& run)
{
    using detail::OrNan;
    RunRecords out;
    out.meta = run.meta;
    out.durationSeconds = run.durationSeconds;
    auto& recs = out.records;
    const double t = run.durationSeconds;

    for (const auto& f : run.flows)
    {
        std::string id = std::to_string(f.flowId);
        std::string q = ToString(f.qci);
        auto add = [&](const char* metric, double v) { recs.push_back({"flow", id, q, metric, v}); };
        add("sent_packets", static_cast<double>(f.sentPackets));
        add("delivered_packets", static_cast<double>(f.deliveredPackets));
        add("dropped_packets", static_cast<double>(f.droppedPackets));
        add("lost_packets", static_cast<double>(f.lostPackets));
        add("bytes_delivered", static_cast<double>(f.bytesDelivered));
        add("mean_delay_ms", OrNan(MeanDelayMs(f)));
        add("throughput_mbps", ThroughputMbps(f, t));
        add("loss_ratio", OrNan(LossRatio(f)));
    }

    for (Qci qci : {Qci::Urllc, Qci::Embb})
    {
        std::vector<double> delay;
        std::vector<double> thr;
        std::vector<double> loss;
        SimTime sumDelay{};
        std::uint64_t delivered = 0;
        for (const auto& f : run.flows)
        {
            if (f.qci != qci)
            {
                continue;
            }
            delay.push_back(OrNan(MeanDelayMs(f)));
            thr.push_back(ThroughputMbps(f, t));
            loss.push_back(OrNan(LossRatio(f)));
            sumDelay += f.sumDelay;
            delivered += f.deliveredPackets;
        }
        if (thr.empty())
        {
            continue;
        }
        std::string q = ToString(qci);
        auto add = [&](const char* metric, double v) { recs.push_back({"qci", q, q, metric, v}); };
        double aggregate = 0.0;
        for (double x : thr)
        {
            aggregate += x;
        }
        add("users", static_cast<double>(thr.size()));
        add("mean_delay_ms", detail::MeanOfDefined(delay));
        add("packet_mean_delay_ms",
            delivered == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : sumDelay.GetMilliSeconds() / static_cast<double>(delivered));
        add("throughput_mbps", detail::MeanOfDefined(thr));
        add("aggregate_throughput_mbps", aggregate);
        add("loss_ratio", detail::MeanOfDefined(loss));
    }

    double etaTotal = 0.0;
    for (const auto& c : run.ccs)
    {
        std::string id = std::to_string(c.cc.id);
        auto add = [&](std::string metric, double v) {
            recs.push_back({"cc", id, "", std::move(metric), v});
        };
        double eta = ComputeEta(c, t);
        etaTotal += eta;
        add("tx_sym", static_cast<double>(c.txSym));
        add("bandwidth_share", c.cc.bandwidthShare);
        add("eta", eta);
        for (Qci qci : {Qci::Urllc, Qci::Embb})
        {
            auto r = c.routedBytes.find(qci);
            add("routed_bytes_" + ToString(qci), r == c.routedBytes.end() ? 0.0 : static_cast<double>(r->second));
            auto x = c.txBytes.find(qci);
            add("tx_bytes_" + ToString(qci), x == c.txBytes.end() ? 0.0 : static_cast<double>(x->second));
        }
    }

    recs.push_back({"run", run.meta.runId, "", "eta_total", etaTotal});
    recs.push_back({"run", run.meta.runId, "", "subframes", static_cast<double>(run.subframesScheduled)});
    recs.push_back(
        {"run", run.meta.runId, "", "max_symbols_in_subframe", static_cast<double>(run.maxSymbolsInSubframe)});
    return out;
}

inline void
WriteRunCsv(std::ostream& os, const RunRecords& run)
{
    os << "# millislice run\n";
    os << "# run_id=" << run.meta.runId << "\n";
    os << "# seed=" << run.meta.seed << "\n";
    os << "# policy=" << run.meta.policy << "\n";
    os << "# config_hash=" << run.meta.configHash << "\n";
    os << "# point=" << run.meta.point << "\n";
    os << "# duration_s=" << detail::FormatValue(run.durationSeconds) << "\n";
    os << "scope,id,qci,metric,value\n";
    for (const auto& r : run.records)
    {
        os << r.scope << ',' << r.id << ',' << r.qci << ',' << r.metric << ','
           << detail::FormatValue(r.value) << '\n';
    }
}

inline RunRecords
ReadRunCsv(std::istream& is)
{
    RunRecords out;
    std::string line;
    bool sawHeader = false;
    while (std::getline(is, line))
    {
        if (line.empty())
        {
            continue;
        }
        if (line[0] == '#')
        {
            auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                continue;
            }
            std::string key = line.substr(2, eq - 2);
            std::string value = line.substr(eq + 1);
            if (key == "run_id")
            {
                out.meta.runId = value;
            }
            else if (key == "seed")
            {
                out.meta.seed = std::stoull(value);
            }
            else if (key == "policy")
            {
                out.meta.policy = value;
            }
            else if (key == "config_hash")
            {
                out.meta.configHash = value;
            }
            else if (key == "point")
            {
                out.meta.point = value;
            }
            else if (key == "duration_s")
            {
                out.durationSeconds = detail::ParseValue(value);
            }
            continue;
        }
        if (!sawHeader)
        {
            if (line != "scope,id,qci,metric,value")
            {
                throw std::runtime_error("unexpected run file header: " + line);
            }
            sawHeader = true;
            continue;
        }
        auto cells = detail::SplitCsv(line);
        if (cells.size() != 5)
        {
            throw std::runtime_error("malformed run record: " + line);
        }
        out.records.push_back({cells[0], cells[1], cells[2], cells[3], detail::ParseValue(cells[4])});
    }
    if (!sawHeader)
    {
        throw std::runtime_error("run file has no column header");
    }
    return out;
}

struct RunFailure
{
    std::string runId;
    std::string message;
};

/// Two-sided 95% Student-t half width; NaN for fewer than two samples.
inline double
ConfidenceHalfWidth95(const std::vector<double>& xs)
{
    const std::size_t n = xs.size();
    if (n < 2)
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double mean = 0.0;
    for (double x : xs)
    {
        mean += x;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs)
    {
        ss += (x - mean) * (x - mean);
    }
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    boost::math::students_t dist(static_cast<double>(n - 1));
    double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
    return tq * sd / std::sqrt(static_cast<double>(n));
}

/**
 * Combined summary over replications: runs sharing a sweep point are pooled
 * per (scope, id, qci, metric). NaN samples are skipped. Points appear in
 * the order of the first run that carries them; pass runs sorted by id.
 */
inline void
WriteSummaryCsv(std::ostream& os, const std::vector<RunRecords>& runs, const std::vector<RunFailure>& failures)
{
    os << "# millislice summary\n";
    os << "# runs=" << runs.size() << "\n";
    os << "# failed=" << failures.size() << "\n";
    for (const auto& f : failures)
    {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        os << "# failed_run=" << f.runId << ": " << msg << "\n";
    }
    os << "point,scope,id,qci,metric,n,mean,ci95\n";

    struct Key
    {
        std::string scope, id, qci, metric;

        bool operator==(const Key&) const = default;
    };

    std::vector<std::string> points;
    std::map<std::string, std::vector<const RunRecords*>> byPoint;
    for (const auto& r : runs)
    {
        if (!byPoint.contains(r.meta.point))
        {
            points.push_back(r.meta.point);
        }
        byPoint[r.meta.point].push_back(&r);
    }
    for (const auto& point : points)
    {
        std::vector<Key> order;
        std::vector<std::vector<double>> samples;
        for (const RunRecords* run : byPoint[point])
        {
            for (const auto& rec : run->records)
            {
                // run ids differ per replication; pool run-scope rows under one key
                Key k{rec.scope, rec.scope == "run" ? "all" : rec.id, rec.qci, rec.metric};
                auto it = std::find(order.begin(), order.end(), k);
                if (it == order.end())
                {
                    order.push_back(k);
                    samples.emplace_back();
                    it = order.end() - 1;
                }
                if (!std::isnan(rec.value))
                {
                    samples[it - order.begin()].push_back(rec.value);
                }
            }
        }
        for (std::size_t i = 0; i < order.size(); ++i)
        {
            const auto& xs = samples[i];
            double mean = detail::MeanOfDefined(xs);
            os << point << ',' << order[i].scope << ',' << order[i].id << ',' << order[i].qci << ','
               << order[i].metric << ',' << xs.size() << ',' << detail::FormatValue(mean) << ','
               << detail::FormatValue(ConfidenceHalfWidth95(xs)) << '\n';
        }
    }
}

} // namespace millislice
