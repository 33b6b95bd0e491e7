#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cflow/dynamics.hpp"

namespace cflow {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Header: step,time,energy,grad_norm,mean_sq_dist
std::string trace_csv(const Trace& trace);

/// Header: time,particle,x0[,x1]; one line per particle per snapshot.
std::string snapshots_csv(const std::vector<Snapshot>& snapshots);

std::vector<Snapshot> parse_snapshots_csv(const std::string& text);
std::vector<Snapshot> read_snapshots_csv(const std::filesystem::path& path);

/// Write through a temporary file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cflow
