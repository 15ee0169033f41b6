/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

// Command-line front end.
//
//   millislice run       one replication  -> run_<id>.csv [+ trace_<id>.log] + summary.csv
//   millislice sweep     grid x seeds     -> run_<id>.csv per replication + summary.csv
//   millislice summarize DIR              -> rebuilds DIR/summary.csv from stored runs
//
// Exit status: 0 success, 2 configuration error, 1 runtime failure.

#include "millislice/millislice.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

using namespace millislice;

namespace
{

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

ConfigStore
LoadStore(const std::string& configPath, const std::vector<std::string>& overrides)
{
    ConfigStore store = configPath.empty() ? ConfigStore{} : ConfigStore::FromFile(configPath);
    for (const auto& o : overrides)
    {
        store.ApplyOverride(o);
    }
    return store;
}

void
PrintRunBrief(const std::filesystem::path& csv)
{
    std::ifstream in(csv);
    RunRecords r = ReadRunCsv(in);
    std::cout << r.meta.runId << " policy=" << r.meta.policy << " seed=" << r.meta.seed << "\n";
    for (const char* q : {"urllc", "embb"})
    {
        double users = r.Find("qci", q, "users");
        if (std::isnan(users))
        {
            continue;
        }
        std::cout << fmt::format("  {:<5} delay {:.3f} ms  per-user {:.2f} Mbit/s  aggregate {:.1f} Mbit/s  loss {:.4f}\n",
                                 q,
                                 r.Find("qci", q, "mean_delay_ms"),
                                 r.Find("qci", q, "throughput_mbps"),
                                 r.Find("qci", q, "aggregate_throughput_mbps"),
                                 r.Find("qci", q, "loss_ratio"));
    }
    for (const auto& rec : r.records)
    {
        if (rec.scope == "cc" && rec.metric == "eta")
        {
            std::cout << fmt::format("  eta CC{} {:.4f}\n", rec.id, rec.value);
        }
    }
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Single-cell 5G downlink with carrier aggregation and slice-aware BSR routing"};
    app.require_subcommand(1);

    std::string configPath;
    std::vector<std::string> overrides;
    std::string outDir = "results";
    bool trace = false;

    auto* run = app.add_subcommand("run", "Run one replication");
    std::string policy;
    std::string runId;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    run->add_option("-c,--config", configPath, "Scenario configuration file (key = value)");
    run->add_option("-s,--set", overrides, "Override, key=value (repeatable)");
    run->add_option("--seed", seed, "Random seed");
    run->add_option("-p,--policy", policy, "no_ca | primary_only | millislice");
    run->add_option("-d,--duration", duration, "Simulated seconds");
    run->add_option("-o,--out", outDir, "Output directory");
    run->add_option("--id", runId, "Run id used in file names (default <policy>-s<seed>)");
    run->add_flag("--trace", trace, "Write the per-BSR routing trace");

    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid over several seeds");
    std::vector<std::string> grid;
    std::string seedList;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    sweep->add_option("-c,--config", configPath, "Scenario configuration file (may hold sweep.* and seeds)");
    sweep->add_option("-s,--set", overrides, "Override, key=value (repeatable)");
    sweep->add_option("-g,--grid", grid, "Sweep axis, key=v1,v2,... (repeatable)");
    sweep->add_option("--seeds", seedList, "Seed list, e.g. 1..10 or 1,4,9");
    sweep->add_option("-o,--out", outDir, "Output directory");
    sweep->add_option("-j,--jobs", jobs, "Concurrent replications");
    sweep->add_flag("--trace", trace, "Write per-BSR routing traces");

    auto* summarize = app.add_subcommand("summarize", "Rebuild summary.csv from stored run files");
    std::string summarizeDir;
    summarize->add_option("dir", summarizeDir, "Directory holding run_<id>.csv files")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (*summarize)
        {
            std::cout << SummarizeDirectory(summarizeDir);
            return 0;
        }

        ConfigStore store = LoadStore(configPath, overrides);
        if (*run)
        {
            if (!policy.empty())
            {
                store.Set("policy", policy);
            }
            if (seed)
            {
                store.Set("seed", std::to_string(*seed));
            }
            if (duration)
            {
                store.Set("duration_s", fmt::format("{}", *duration));
            }
            PlannedRun plan;
            plan.store = store;
            plan.config = BuildScenarioConfig(store);
            plan.runId = runId.empty() ? ToString(plan.config.policy) + "-s" + std::to_string(plan.config.seed)
                                       : runId;
            plan.point = "policy=" + ToString(plan.config.policy);
            std::filesystem::create_directories(outDir);
            RunOutcome outcome = ExecuteRun(plan, outDir, trace);
            if (!outcome.ok)
            {
                std::cerr << "run " << plan.runId << " failed: " << outcome.error << "\n";
                return kExitRuntime;
            }
            PrintRunBrief(std::filesystem::path(outDir) / ("run_" + plan.runId + ".csv"));
            return 0;
        }

        SweepSpec spec = SweepFromStore(store);
        for (const auto& g : grid)
        {
            auto eq = g.find('=');
            if (eq == std::string::npos)
            {
                throw ConfigError(g, 0, "grid axis must be key=v1,v2,...");
            }
            std::string key = g.substr(0, eq);
            auto values = SplitList(g.substr(eq + 1));
            if (values.empty())
            {
                throw ConfigError(key, 0, "grid axis has no values");
            }
            auto it = std::find_if(spec.axes.begin(), spec.axes.end(), [&](const auto& a) { return a.first == key; });
            if (it != spec.axes.end())
            {
                it->second = values;
            }
            else
            {
                spec.axes.emplace_back(key, values);
            }
        }
        if (!seedList.empty())
        {
            spec.seeds = ParseSeedList(seedList);
        }
        auto plan = PlanSweep(store, spec);
        std::cerr << "sweep: " << plan.size() << " replications, " << jobs << " job(s)\n";
        ExperimentResult result = RunExperiment(plan, outDir, jobs, trace);
        for (const auto& o : result.outcomes)
        {
            if (!o.ok)
            {
                std::cerr << "run " << o.runId << " failed: " << o.error << "\n";
            }
        }
        std::cerr << "wrote " << (std::filesystem::path(outDir) / "summary.csv").string() << "\n";
        return result.Failed() == 0 ? 0 : kExitRuntime;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
