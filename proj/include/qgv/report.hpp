#pragma once
// Check-result collection and report emission (JSON / markdown).

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qgv {

struct CheckResult {
  std::string id;      // stable identifier, e.g. "sl3.plus.sigma.minpoly"
  std::string status;  // pass | fail | error | skipped
  std::string anchor;  // section/display the check certifies
  std::optional<std::string> witness;  // on fail: first offending coordinate
  long runtime_ms = 0;
};

struct RunConfig {
  std::string series = "SL";
  int N = 2;
  std::string sign = "+";
  std::string metric_mode = "symbolic";  // symbolic | sample
  std::vector<std::string> assignments;  // "var=rational"
  std::string suite = "all";
  std::string out_path;        // empty = stdout
  std::string format = "json"; // json | md
  bool timings = false;        // real runtimes break byte-determinism; opt-in
};

struct Report {
  RunConfig config;
  std::vector<CheckResult> checks;

  void add(CheckResult r) { checks.push_back(std::move(r)); }

  void sort_by_id() {
    std::stable_sort(checks.begin(), checks.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
  }

  int counts(const std::string& st) const {
    int n = 0;
    for (const auto& c : checks)
      if (c.status == st) ++n;
    return n;
  }
  bool all_passed() const {
    for (const auto& c : checks)
      if (c.status == "fail" || c.status == "error") return false;
    return true;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["version"] = "1.0";
    nlohmann::ordered_json cfg;
    cfg["series"] = config.series;
    cfg["N"] = config.N;
    cfg["sign"] = config.sign;
    cfg["metric"] = config.metric_mode;
    cfg["assign"] = config.assignments;
    cfg["suite"] = config.suite;
    j["config"] = cfg;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json e;
      e["id"] = c.id;
      e["status"] = c.status;
      e["anchor"] = c.anchor;
      if (c.witness) e["witness"] = *c.witness;
      e["runtime_ms"] = config.timings ? c.runtime_ms : 0;
      arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    nlohmann::ordered_json sum;
    sum["total"] = (int)checks.size();
    sum["pass"] = counts("pass");
    sum["fail"] = counts("fail");
    sum["error"] = counts("error");
    sum["skipped"] = counts("skipped");
    j["summary"] = std::move(sum);
    return j;
  }

  std::string to_markdown() const {
    std::ostringstream os;
    os << "# Verification report\n\n";
    os << "Spec: " << config.series << "_q(" << config.N << "), sign " << config.sign
       << ", metric " << config.metric_mode << ", suite " << config.suite << "\n\n";
    os << "| check | status | anchor |\n|---|---|---|\n";
    for (const auto& c : checks) {
      os << "| `" << c.id << "` | " << c.status << " | " << c.anchor;
      if (c.witness) os << " — witness: `" << *c.witness << "`";
      os << " |\n";
    }
    os << "\nTotal " << checks.size() << ": " << counts("pass") << " pass, "
       << counts("fail") << " fail, " << counts("error") << " error, "
       << counts("skipped") << " skipped.\n";
    return os.str();
  }

  // returns false on I/O failure
  bool emit() const {
    std::string body =
        config.format == "md" ? to_markdown() : to_json().dump(2) + "\n";
    if (config.out_path.empty()) {
      std::fwrite(body.data(), 1, body.size(), stdout);
      return true;
    }
    std::ofstream f(config.out_path, std::ios::binary);
    if (!f) return false;
    f.write(body.data(), (std::streamsize)body.size());
    return (bool)f;
  }
};

}  // namespace qgv
