#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "ntrace/bench.hpp"
#include "ntrace/graph.hpp"
#include "ntrace/query.hpp"

namespace ntrace {

inline constexpr const char* kCsvHeader =
    "network,task,algorithm,size_class,size,queries,setup_ms,total_ms,mean_us,checksum,status";

namespace detail {

inline std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> sorted_labels(const Graph& g, std::span<const Vertex> vs) {
  std::vector<std::string> out;
  out.reserve(vs.size());
  for (Vertex v : vs) out.push_back(g.label(v));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

inline std::string to_csv(const std::vector<BenchRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += detail::csv_field(r.network) + ',' + r.task + ',' + r.algorithm + ',' + detail::csv_field(r.size_class) +
           ',' + std::to_string(r.size) + ',' + std::to_string(r.queries) + ',' + detail::fixed3(r.setup_ms) + ',' +
           detail::fixed3(r.total_ms) + ',' + detail::fixed3(r.mean_us) + ',' + detail::hex64(r.checksum) + ',' +
           r.status + '\n';
  }
  return out;
}

inline nlohmann::json to_json(const std::vector<BenchRow>& rows, const BenchConfig& cfg) {
  nlohmann::json j;
  j["network"] = cfg.network;
  j["seed"] = cfg.seed;
  j["queries"] = cfg.queries;
  j["ordering"] = cfg.ordering;
  j["size_rounding"] = "ceil, at least 1";
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    const double query_ms = r.mean_us * static_cast<double>(r.queries) / 1000.0;
    j["rows"].push_back({{"network", r.network},
                         {"task", r.task},
                         {"algorithm", r.algorithm},
                         {"size_class", r.size_class},
                         {"size", r.size},
                         {"queries", r.queries},
                         {"setup_ms", r.setup_ms},
                         {"total_ms", r.total_ms},
                         {"query_ms", query_ms},
                         {"mean_us", r.mean_us},
                         {"checksum", detail::hex64(r.checksum)},
                         {"status", r.status}});
  }
  return j;
}

inline nlohmann::json to_json(const OrderingStats& s) {
  return {{"strategy", s.strategy}, {"d", s.d}, {"s2", s.s2}, {"n", s.n}, {"m", s.m}, {"s2_histogram", s.s2_histogram}};
}

inline nlohmann::json to_json(const IndexMemoryStats& s) {
  return {{"total_keys", s.total_keys},
          {"total_key_bits", s.total_key_bits},
          {"max_keys_per_vertex", s.max_keys_per_vertex},
          {"key_bound", s.key_bound},
          {"total_count", s.total_count},
          {"bytes", s.bytes}};
}

inline nlohmann::json to_json(const StatsReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["orderings"] = nlohmann::json::array();
  for (const auto& c : r.candidates) j["orderings"].push_back(to_json(c));
  j["best"] = to_json(r.best);
  j["index"] = to_json(r.index);
  return j;
}

/// Traces as label arrays (each sorted lexicographically), listed in
/// lexicographic order of those arrays; the empty trace is always present.
inline nlohmann::json to_json(const Graph& g, const TraceMultiset& t) {
  std::vector<std::pair<std::vector<std::string>, Count>> items;
  items.emplace_back(std::vector<std::string>{}, t.empty_count());
  for (std::size_t i = 0; i < t.size(); ++i) items.emplace_back(detail::sorted_labels(g, t.trace(i)), t.count(i));
  std::sort(items.begin(), items.end());
  nlohmann::json arr = nlohmann::json::array();
  for (auto& [labels, c] : items) arr.push_back({{"trace", labels}, {"count", c}});
  return arr;
}

inline nlohmann::json to_json(const Graph& g, const TraceList& list) {
  std::vector<std::vector<std::string>> items;
  for (const auto& t : list) items.push_back(detail::sorted_labels(g, t));
  std::sort(items.begin(), items.end());
  return items;
}

inline nlohmann::json to_json(const NeighbourhoodCount& c) { return {{"closed", c.closed}, {"open", c.open}}; }

}  // namespace ntrace
