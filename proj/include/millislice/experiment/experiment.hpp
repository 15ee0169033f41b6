/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/experiment/cell-simulation.hpp"
#include "millislice/experiment/scenario-config.hpp"
#include "millislice/metrics/records.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace millislice
{

/// Grid of overrides crossed with a seed list.
struct SweepSpec
{
    /// (key, values) in declaration order; the first axis varies slowest.
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    std::vector<std::uint64_t> seeds;
};

/// "1..10", "1,2,5" or a mix such as "1..3,7".
inline std::vector<std::uint64_t>
ParseSeedList(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
    {
        item = detail::Trim(item);
        if (item.empty())
        {
            continue;
        }
        auto dots = item.find("..");
        std::uint64_t lo = 0;
        std::uint64_t hi = 0;
        bool ok = dots == std::string::npos
                      ? detail::ParseNumber(item, lo)
                      : detail::ParseNumber(item.substr(0, dots), lo) &&
                            detail::ParseNumber(item.substr(dots + 2), hi);
        if (dots == std::string::npos)
        {
            hi = lo;
        }
        if (!ok || lo > hi)
        {
            throw ConfigError("seeds", 0, "bad seed list item '" + item + "'");
        }
        for (std::uint64_t s = lo; s <= hi; ++s)
        {
            out.push_back(s);
        }
    }
    return out;
}

inline std::vector<std::string>
SplitList(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
    {
        item = detail::Trim(item);
        if (!item.empty())
        {
            out.push_back(item);
        }
    }
    return out;
}

/// Reads `sweep.<key> = v1,v2,...` axes and `seeds` from a store.
inline SweepSpec
SweepFromStore(const ConfigStore& store)
{
    SweepSpec spec;
    for (const auto& e : store.GetEntries())
    {
        if (e.key.starts_with("sweep."))
        {
            auto values = SplitList(e.value);
            if (values.empty())
            {
                throw ConfigError(e.key, e.line, "sweep axis has no values");
            }
            spec.axes.emplace_back(e.key.substr(6), std::move(values));
        }
        else if (e.key == "seeds")
        {
            try
            {
                spec.seeds = ParseSeedList(e.value);
            }
            catch (const ConfigError&)
            {
                throw ConfigError("seeds", e.line, "bad seed list '" + e.value + "'");
            }
        }
    }
    return spec;
}

struct PlannedRun
{
    std::string runId;
    std::string point;
    ConfigStore store;
    ScenarioConfig config;
};

/**
 * Expands the grid into concrete runs and validates each configuration up
 * front, so a bad value fails the whole sweep before anything executes.
 */
inline std::vector<PlannedRun>
PlanSweep(const ConfigStore& base, const SweepSpec& spec)
{
    std::vector<std::uint64_t> seeds = spec.seeds;
    if (seeds.empty())
    {
        seeds.push_back(BuildScenarioConfig(base).seed);
    }
    std::size_t points = 1;
    for (const auto& [key, values] : spec.axes)
    {
        points *= values.size();
    }

    std::vector<PlannedRun> plan;
    for (std::size_t p = 0; p < points; ++p)
    {
        ConfigStore store = base;
        std::string label;
        std::size_t rest = p;
        std::vector<std::string> parts(spec.axes.size());
        for (std::size_t a = spec.axes.size(); a-- > 0;)
        {
            const auto& [key, values] = spec.axes[a];
            const std::string& v = values[rest % values.size()];
            rest /= values.size();
            store.Set(key, v);
            parts[a] = key + "=" + v;
        }
        for (const auto& part : parts)
        {
            label += (label.empty() ? "" : ";") + part;
        }
        ScenarioConfig probe = BuildScenarioConfig(store);
        if (std::none_of(spec.axes.begin(), spec.axes.end(), [](const auto& ax) { return ax.first == "policy"; }))
        {
            label += (label.empty() ? "" : ";") + std::string("policy=") + ToString(probe.policy);
        }
        for (std::uint64_t seed : seeds)
        {
            ConfigStore s = store;
            s.Set("seed", std::to_string(seed));
            PlannedRun run;
            run.runId = fmt::format("p{:03}-s{}", p, seed);
            run.point = label;
            run.store = s;
            run.config = BuildScenarioConfig(s);
            plan.push_back(std::move(run));
        }
    }
    return plan;
}

/// Writes through a temporary file and renames, so readers never see a
/// partial file.
inline void
WriteFileAtomically(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string
FormatTraceRecord(const RoutingTraceRecord& r)
{
    std::string line = fmt::format("{},{},{},{},{}",
                                   r.at.GetNanoSeconds(),
                                   r.bsr.flowId,
                                   ToString(r.bsr.qci),
                                   r.bsr.txQueueBytes,
                                   r.bsr.retxQueueBytes);
    for (Qci q : {Qci::Urllc, Qci::Embb})
    {
        auto it = r.aggregates.find(q);
        line += fmt::format(",{}", it == r.aggregates.end() ? 0 : it->second);
    }
    line += ",";
    bool first = true;
    for (const auto& [cc, b] : r.routed)
    {
        line += fmt::format("{}{}:{}:{}", first ? "" : ";", cc, b.txQueueBytes, b.retxQueueBytes);
        first = false;
    }
    return line;
}

inline constexpr const char* kTraceHeader = "t_ns,flow,qci,tx_bytes,retx_bytes,urllc_load,embb_load,routed";

struct RunOutcome
{
    std::string runId;
    bool ok{false};
    std::string error;
};

/// Runs one replication and writes run_<id>.csv (and trace_<id>.log when
/// requested) into `outDir`. Failures leave run_<id>.failed instead.
inline RunOutcome
ExecuteRun(const PlannedRun& plan, const std::filesystem::path& outDir, bool trace)
{
    RunOutcome outcome{plan.runId, false, {}};
    try
    {
        CellSimulation sim(plan.config);
        std::ostringstream traceText;
        if (trace)
        {
            traceText << kTraceHeader << '\n';
            sim.SetRoutingTraceSink([&traceText](const RoutingTraceRecord& r) {
                traceText << FormatTraceRecord(r) << '\n';
            });
        }
        RunStats stats = sim.Run();
        stats.meta.runId = plan.runId;
        stats.meta.point = plan.point;
        std::ostringstream csv;
        WriteRunCsv(csv, Summarize(stats));
        if (trace)
        {
            WriteFileAtomically(outDir / ("trace_" + plan.runId + ".log"), traceText.str());
        }
        WriteFileAtomically(outDir / ("run_" + plan.runId + ".csv"), csv.str());
        outcome.ok = true;
    }
    catch (const std::exception& e)
    {
        outcome.error = e.what();
        WriteFileAtomically(outDir / ("run_" + plan.runId + ".failed"), outcome.error + "\n");
    }
    return outcome;
}

/// Rebuilds summary.csv from the run files present in `dir`.
inline std::string
SummarizeDirectory(const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> runFiles;
    std::vector<std::filesystem::path> failedFiles;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
    {
        auto name = entry.path().filename().string();
        if (!name.starts_with("run_"))
        {
            continue;
        }
        if (name.ends_with(".csv"))
        {
            runFiles.push_back(entry.path());
        }
        else if (name.ends_with(".failed"))
        {
            failedFiles.push_back(entry.path());
        }
    }
    std::sort(runFiles.begin(), runFiles.end());
    std::sort(failedFiles.begin(), failedFiles.end());

    std::vector<RunRecords> runs;
    for (const auto& p : runFiles)
    {
        std::ifstream in(p);
        runs.push_back(ReadRunCsv(in));
    }
    std::vector<RunFailure> failures;
    for (const auto& p : failedFiles)
    {
        std::ifstream in(p);
        std::string msg;
        std::getline(in, msg);
        auto name = p.filename().string();
        failures.push_back({name.substr(4, name.size() - 4 - 7), msg});
    }
    std::ostringstream out;
    WriteSummaryCsv(out, runs, failures);
    std::string text = out.str();
    WriteFileAtomically(dir / "summary.csv", text);
    return text;
}

struct ExperimentResult
{
    std::vector<RunOutcome> outcomes;

    std::size_t Failed() const
    {
        return static_cast<std::size_t>(
            std::count_if(outcomes.begin(), outcomes.end(), [](const RunOutcome& o) { return !o.ok; }));
    }
};

/**
 * Runs every planned replication, `jobs` at a time, then merges the stored
 * run files into summary.csv. Each replication owns its engine; the only
 * shared state is the work index.
 */
inline ExperimentResult
RunExperiment(const std::vector<PlannedRun>& plan, const std::filesystem::path& outDir, unsigned jobs, bool trace)
{
    std::filesystem::create_directories(outDir);
    for (const auto& entry : std::filesystem::directory_iterator(outDir))
    {
        auto name = entry.path().filename().string();
        if (name.starts_with("run_") || name.starts_with("trace_") || name == "summary.csv")
        {
            std::filesystem::remove(entry.path());
        }
    }
    ExperimentResult result;
    result.outcomes.resize(plan.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < plan.size(); i = next++)
        {
            result.outcomes[i] = ExecuteRun(plan[i], outDir, trace);
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j)
    {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool)
    {
        t.join();
    }
    SummarizeDirectory(outDir);
    return result;
}

} // namespace millislice
