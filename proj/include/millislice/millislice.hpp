/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include "millislice/cc-manager/cc-manager.hpp"
#include "millislice/core/rng-stream.hpp"
#include "millislice/core/sim-time.hpp"
#include "millislice/core/simulator.hpp"
#include "millislice/experiment/cell-simulation.hpp"
#include "millislice/experiment/experiment.hpp"
#include "millislice/experiment/scenario-config.hpp"
#include "millislice/mac/bsr.hpp"
#include "millislice/mac/rlc-am-flow.hpp"
#include "millislice/mac/round-robin-scheduler.hpp"
#include "millislice/metrics/records.hpp"
#include "millislice/metrics/run-stats.hpp"
#include "millislice/phy/carrier-component.hpp"
#include "millislice/phy/link-model.hpp"
#include "millislice/scenario/mobility.hpp"
#include "millislice/scenario/traffic-source.hpp"
