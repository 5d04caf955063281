#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wcstore/error.hpp"
#include "wcstore/store/store.hpp"

namespace {

using wcstore::Errc;
using wcstore::Error;
using wcstore::store::Store;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_failure, "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string state_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("WCSTORE_STATE"); env && *env) return env;
  return ".wcstore.snapshot";
}

std::unique_ptr<Store> load(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw Error(Errc::not_found, "no store at '" + path + "'; run 'store init --config <file>' first");
  return Store::restore(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"XML resource store with centralized and peer-to-peer backends"};
  app.require_subcommand(1);
  std::string state_flag;
  app.add_option("--state", state_flag, "Store state file (default: $WCSTORE_STATE or .wcstore.snapshot)");

  std::string config_path;
  auto* init = app.add_subcommand("init", "Create an empty store from a key=value config file");
  init->add_option("--config", config_path, "Config file")->required();

  std::vector<std::string> files;
  auto* ingest = app.add_subcommand("ingest", "Store XML documents");
  ingest->add_option("files", files, "XML files")->required();

  std::string resource_id;
  auto* get = app.add_subcommand("get", "Print one resource");
  get->add_option("resource-id", resource_id, "Resource id, e.g. 1#6")->required();

  std::string pattern;
  bool show_stats = false;
  auto* query = app.add_subcommand("query", "Evaluate a tree pattern and print the resources it returns");
  query->add_option("pattern", pattern, "Tree pattern, e.g. //sec[/title=\"dht\"]!")->required();
  query->add_flag("--stats", show_stats, "Also print the network traffic of the query");

  std::string triples_path;
  auto* rdf_load = app.add_subcommand("rdf-load", "Load tab-separated triples");
  rdf_load->add_option("file", triples_path, "Triple file")->required();

  std::string rdf_query_path;
  auto* rdf_query = app.add_subcommand("rdf-query", "Run a conjunctive triple query");
  rdf_query->add_option("file", rdf_query_path, "Query file")->required();

  auto* stats = app.add_subcommand("stats", "Print store counters and overlay membership");

  std::string snapshot_path;
  auto* snapshot = app.add_subcommand("snapshot", "Write a snapshot of the store");
  snapshot->add_option("path", snapshot_path, "Snapshot file")->required();

  std::string restore_path;
  auto* restore = app.add_subcommand("restore", "Replace the store with a snapshot");
  restore->add_option("path", restore_path, "Snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto path = state_path(state_flag);
  try {
    if (init->parsed()) {
      auto config = wcstore::store::parse_config(read_file(config_path));
      Store::create(config)->snapshot(path);
      std::cout << "initialized " << wcstore::store::to_string(config.backend) << " store at " << path << "\n";
    } else if (ingest->parsed()) {
      auto store = load(path);
      for (const auto& file : files) {
        auto ids = store->store_resource(read_file(file));
        std::cout << file << ":";
        for (const auto& id : ids) std::cout << " " << id;
        std::cout << "\n";
      }
      store->snapshot(path);
    } else if (get->parsed()) {
      std::cout << load(path)->get_resource(resource_id).payload << "\n";
    } else if (query->parsed()) {
      auto result = load(path)->query(pattern);
      for (const auto& r : result.resources) std::cout << r.resource_id << "\t" << r.payload << "\n";
      if (show_stats) std::cout << result.stats.report();
    } else if (rdf_load->parsed()) {
      auto store = load(path);
      auto n = store->rdf_load(read_file(triples_path));
      store->snapshot(path);
      std::cout << "loaded " << n << " triples\n";
    } else if (rdf_query->parsed()) {
      auto result = load(path)->rdf_query(read_file(rdf_query_path));
      for (std::size_t i = 0; i < result.projection.size(); ++i)
        std::cout << (i ? "\t" : "") << "?" << result.projection[i];
      std::cout << "\n";
      for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "\t" : "") << row[i];
        std::cout << "\n";
      }
    } else if (stats->parsed()) {
      std::cout << load(path)->describe();
    } else if (snapshot->parsed()) {
      load(path)->snapshot(snapshot_path);
      std::cout << "wrote " << snapshot_path << "\n";
    } else if (restore->parsed()) {
      Store::restore(restore_path)->snapshot(path);
      std::cout << "restored " << restore_path << " into " << path << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wcstore::is_user_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
