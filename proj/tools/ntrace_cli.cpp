// ntrace: ordering statistics, one-off trace queries, and query benchmarks
// on edge-list graphs.
//
//   ntrace stats <graph>
//   ntrace query <graph> --set a,b,c --task freq --ordering best
//   ntrace bench <graph> --tasks count,freq --sizes log,10 --queries 1000 --seed 1
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 correctness mismatch.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ntrace/ntrace.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kMismatch = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ntrace::Graph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  return ntrace::parse_edge_list(in);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw InputError("cannot write '" + output + "'");
  out << text;
}

int run_stats(const std::string& graph_path) {
  const ntrace::Graph g = load_graph(graph_path);
  std::cout << ntrace::to_json(ntrace::stats_report(g)).dump(2) << '\n';
  return kOk;
}

int run_query(const std::string& graph_path, const std::string& set, const std::string& task_name,
              const std::string& ordering) {
  const auto task = ntrace::parse_task(task_name);
  if (!task) throw UsageError("unknown task '" + task_name + "'");
  const ntrace::Graph g = load_graph(graph_path);

  std::unordered_map<std::string, ntrace::Vertex> ids;
  for (ntrace::Vertex v = 0; v < g.n(); ++v) ids.emplace(g.label(v), v);
  std::vector<ntrace::Vertex> x;
  for (const auto& token : split(set, ',')) {
    auto it = ids.find(token);
    if (it == ids.end()) throw InputError("query vertex '" + token + "' is not in the graph");
    x.push_back(it->second);
  }

  ntrace::PreparedOrdering prepared;
  try {
    prepared = ntrace::make_ordering(g, ordering);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto index = ntrace::TraceIndex::build(prepared.ordered, prepared.reach);
  ntrace::QueryEngine engine(index);
  const auto q = engine.prepare(x);

  nlohmann::json j;
  j["task"] = task_name;
  j["set"] = ntrace::detail::sorted_labels(g, q.members());
  j["ordering"] = ntrace::to_json(prepared.stats);
  j["ordering"].erase("s2_histogram");
  switch (*task) {
    case ntrace::Task::count: j["result"] = ntrace::to_json(engine.neighbourhood_count(q)); break;
    case ntrace::Task::list: j["result"] = ntrace::to_json(g, engine.trace_list(q)); break;
    case ntrace::Task::freq: j["result"] = ntrace::to_json(g, engine.trace_frequencies(q)); break;
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int run_bench(const std::string& graph_path, ntrace::BenchConfig cfg, const std::string& tasks,
              const std::string& sizes, const std::string& format, const std::string& output) {
  if (format != "csv" && format != "json") throw UsageError("unknown format '" + format + "'");
  cfg.tasks.clear();
  for (const auto& t : split(tasks, ',')) {
    auto task = ntrace::parse_task(t);
    if (!task) throw UsageError("unknown task '" + t + "'");
    cfg.tasks.push_back(*task);
  }
  cfg.sizes = split(sizes, ',');
  for (const auto& s : cfg.sizes) {
    try {
      (void)ntrace::resolve_size(s, 1);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (cfg.tasks.empty() || cfg.sizes.empty()) throw UsageError("need at least one task and one size class");
  if (cfg.queries == 0) throw UsageError("--queries must be at least 1");
  const std::string& o = cfg.ordering;
  if (o != "best" && o != "degeneracy" && o != "degree" && o.rfind("file:", 0) != 0)
    throw UsageError("unknown ordering '" + o + "'");

  const ntrace::Graph g = load_graph(graph_path);
  cfg.network = std::filesystem::path(graph_path).stem().string();
  const auto rows = ntrace::run_bench(g, cfg);
  for (const auto& r : rows)
    if (r.status == "skipped")
      std::cerr << "warning: " << r.task << "/" << r.algorithm << ": size class " << r.size_class << " (" << r.size
                << ") exceeds |V| = " << g.n() << ", skipped\n";
  emit(format == "csv" ? ntrace::to_csv(rows) : ntrace::to_json(rows, cfg).dump(2) + "\n", output);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neighbourhood trace queries on sparse graphs"};
  app.require_subcommand(1);

  std::string graph_path;

  auto* stats = app.add_subcommand("stats", "Degeneracy and s2 of both heuristic orderings, plus index size");
  stats->add_option("graph", graph_path, "Edge-list file")->required();

  std::string set, task = "freq", ordering = "best";
  auto* query = app.add_subcommand("query", "Answer one query and print JSON");
  query->add_option("graph", graph_path, "Edge-list file")->required();
  query->add_option("--set", set, "Comma-separated vertex labels")->required();
  query->add_option("--task", task, "count | list | freq")->capture_default_str();
  query->add_option("--ordering", ordering, "degeneracy | degree | best | file:PATH")->capture_default_str();

  ntrace::BenchConfig cfg;
  std::string tasks = "count,list,freq", sizes = "log,10,50,sqrt", format = "csv", output;
  bool no_timing = false;
  auto* bench = app.add_subcommand("bench", "Time indexed against baseline queries on random query sets");
  bench->add_option("graph", graph_path, "Edge-list file")->required();
  bench->add_option("--tasks", tasks, "Comma-separated subset of count,list,freq")->capture_default_str();
  bench->add_option("--sizes", sizes, "Comma-separated size classes: log, sqrt, or integers")->capture_default_str();
  bench->add_option("--queries", cfg.queries, "Query sets per size class")->capture_default_str();
  bench->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  bench->add_option("--ordering", cfg.ordering, "degeneracy | degree | best | file:PATH")->capture_default_str();
  bench->add_option("--format", format, "csv | json")->capture_default_str();
  bench->add_option("--output", output, "Output path (default stdout)");
  bench->add_option("--time-limit", cfg.time_limit_s, "Seconds per cell and algorithm")->capture_default_str();
  bench->add_flag("--no-timing", no_timing, "Write zeros in timing columns");
  bench->add_flag("--parallel", cfg.parallel, "Run cells concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (*stats) return run_stats(graph_path);
    if (*query) return run_query(graph_path, set, task, ordering);
    cfg.timings = !no_timing;
    return run_bench(graph_path, cfg, tasks, sizes, format, output);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ntrace::CorrectnessError& e) {
    std::cerr << "correctness mismatch: " << e.what() << '\n';
    return kMismatch;
  } catch (const ntrace::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const ntrace::QueryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
}
