/* -*-  Mode: C++; c-file-style: "gnu"; indent-tabs-mode:nil; -*- */

// Copyright (c) 2026
//
// SPDX-License-Identifier: GPL-2.0-only

#pragma once

#include <stdexcept>
#include <string>

namespace millislice
{

/// Violated precondition inside a run. The run is aborted; sweeps record it
/// as a failed replication.
class SimulationError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

/// Invalid scenario configuration. `field` names the offending key and
/// `line` is the 1-based line in the config file, or 0 when the value came
/// from an override or a default.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string field, int line, const std::string& message)
        : std::runtime_error(Format(field, line, message)),
          m_field(std::move(field)),
          m_line(line)
    {
    }

    const std::string& GetField() const
    {
        return m_field;
    }

    int GetLine() const
    {
        return m_line;
    }

  private:
    static std::string Format(const std::string& field, int line, const std::string& message)
    {
        std::string out;
        if (line > 0)
        {
            out += "line " + std::to_string(line) + ": ";
        }
        if (!field.empty())
        {
            out += field + ": ";
        }
        return out + message;
    }

    std::string m_field;
    int m_line;
};

} // namespace millislice
