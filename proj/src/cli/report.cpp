#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "polaron/cli/tasks.hpp"
#include "polaron/error.hpp"

namespace polaron::cli {

namespace fs = std::filesystem;

namespace {

struct Entry {
  std::string finished;
  std::string file;
  Json manifest;
};

Json load_manifest(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("corrupt manifest " + path.string() + ": unreadable");
  std::stringstream ss;
  ss << f.rdbuf();
  Json m;
  try {
    m = Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("corrupt manifest " + path.string() + ": " + e.what());
  }
  for (const char* key : {"config", "config_hash", "finished", "results"})
    if (!m.is_object() || !m.contains(key))
      throw InvalidArgument("corrupt manifest " + path.string() + ": missing '" + key + "'");
  if (!m["config_hash"].is_string() || !m["finished"].is_string())
    throw InvalidArgument("corrupt manifest " + path.string() + ": malformed fields");
  return m;
}

}  // namespace

Json emit_report(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidArgument("missing directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("manifest-", 0) == 0 && e.path().extension() == ".json")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, std::vector<Entry>> groups;
  for (const auto& p : files) {
    Json m = load_manifest(p);
    const std::string hash = m["config_hash"].get<std::string>();
    groups[hash].push_back({m["finished"].get<std::string>(), p.filename().string(), std::move(m)});
  }

  Json runs = Json::object();
  for (auto& [hash, entries] : groups) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return std::tie(a.finished, a.file) < std::tie(b.finished, b.file); });
    Json history = Json::array();
    for (const auto& e : entries) history.push_back({{"file", e.file}, {"finished", e.finished}});
    Json run;
    run["task"] = entries.back().manifest["config"].value("task", "");
    run["latest"] = entries.back().manifest;
    run["latest"]["file"] = entries.back().file;
    run["history"] = history;
    runs[hash] = run;
  }
  Json doc;
  doc["version"] = kVersion;
  doc["runs"] = runs;
  return doc;
}

}  // namespace polaron::cli
