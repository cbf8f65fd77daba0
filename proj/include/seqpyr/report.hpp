#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqpyr/experiment.hpp"
#include "seqpyr/topology.hpp"

namespace seqpyr {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Flat `key = value` config text, one key per ProtocolConfig field.
// parse_config(emit_config(c)) == c for every valid config.
std::string emit_config(const ProtocolConfig& config);
ProtocolConfig parse_config(const std::string& text);
ProtocolConfig load_config_file(const std::filesystem::path& path);

// Per-episode CSV: `episode,phase,label,layer1_rate,...,top_correct`, rates
// with six decimals. Byte-stable for identical reports.
std::string csv_text(const RunReport& report);

// Trace filter grammar: comma-separated `layer<k>:<i>` or `layer<k>:<a>-<b>`
// with per-layer row-major indices. Returns global agent ids.
std::vector<std::uint32_t> parse_trace_filter(const std::string& filter,
                                              const PyramidTopology& topo);

// Per-tick rows `episode,tick,agent,layer,index,code,hint` for the filtered
// agents, from a trace-enabled run.
std::string trace_text(const RunReport& report, const std::vector<std::uint32_t>& agents);

// Manifest JSON: version, seed, config echo, output paths, summary.
std::string manifest_text(const RunReport& report,
                          const std::vector<std::string>& output_files,
                          double wall_seconds);

// Writes content to a temporary file in the target directory, then renames
// it over the final path. An interrupted run leaves nothing at `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Command-line entry point. Returns 0 on success, 2 on flag errors, 3 on
// configuration errors, 4 on I/O errors.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqpyr
