#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleuth/graph.hpp"
#include "sleuth/simulate.hpp"

namespace sleuth {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kNetworkFormatVersion = 1;
inline constexpr int kCascadeFormatVersion = 1;

/// Thrown for malformed or inconsistent input files; carries the offending
/// location in the message.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Network text format. `#` lines are comments; the writer stamps the format
/// version in one. First data line: `N k`; then one `j i alpha` line per
/// directed edge.
Network read_network(const std::string& path);
void write_network(const Network& net, const std::string& path,
                   const std::string& manifest_id = {});

/// Cascade text format, one cascade per line:
///   src_hint;window;node:time,node:time,...
/// with src_hint = -1 when the source is unknown and pairs sorted by time.
struct CascadeRecord {
  int source_hint = -1;
  double window = kInf;
  std::vector<std::pair<int, double>> events;  // (node, time)
};

std::vector<CascadeRecord> read_cascades(const std::string& path);
void write_cascades(const std::vector<CascadeRecord>& records, int node_count,
                    const std::string& path, const std::string& manifest_id = {});

CascadeRecord to_record(const Cascade& cascade);
CascadeRecord to_record(const ObservedCascade& observed);

/// Full cascade for training: every listed node is infected, all others are
/// known uninfected. The source is the hint, or the earliest event.
Cascade record_to_cascade(const CascadeRecord& record, int node_count);

/// Partial cascade for identification: listed nodes are the observed set, all
/// others (the source included) are hidden. Requires at least one observed
/// non-source event.
ObservedCascade record_to_observed(const CascadeRecord& record, int node_count);

/// Flat key = value configuration file (strings, numbers, booleans, and
/// bracketed numeric lists; `#` comments).
class FlatConfig {
 public:
  static FlatConfig parse_file(const std::string& path);
  static FlatConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Provenance stamp attached to emitted artifacts. The id is derived from the
/// seed and the input digests, never from the clock, so reruns agree.
struct RunManifest {
  std::string id;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  int network_format_version = kNetworkFormatVersion;
  int cascade_format_version = kCascadeFormatVersion;
  std::vector<std::pair<std::string, std::string>> input_digests;  // (path, fnv64)
  double wall_seconds = 0.0;  // excluded from determinism comparisons

  void finalize_id();
  std::string to_json() const;
};

std::string fnv1a_digest_file(const std::string& path);

/// Fixed-notation decimal with 9 significant digits; shared by every writer.
std::string format_time(double value);

/// CLI entry point (subcommands: generate-network, simulate, learn, identify,
/// bench). Returns 0 on success, 1 on usage errors, 2 on data errors.
int cli_main(const std::vector<std::string>& args);

}  // namespace sleuth
