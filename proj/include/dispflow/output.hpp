// SPDX-License-Identifier: Apache-2.0
#pragma once

/// @file output.hpp
/// @brief On-disk artifacts: diagnostics CSV, snapshot CSVs, study NDJSON and
/// summaries, and a manifest.json of SHA-256 content hashes.
///
/// Nothing written here carries a timestamp or absolute path, so two runs
/// of the same config produce byte-identical directories.

#include "dispflow/experiments.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef DISPFLOW_VERSION
#define DISPFLOW_VERSION "0.0.0"
#endif

namespace dispflow {

namespace fs = std::filesystem;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string diagnostics_csv(const std::vector<EnergyReport>& rows, int k) {
  std::ostringstream out;
  out << "t";
  for (int l = 0; l <= k; ++l) out << ",l2_" << l;
  out << ",N_" << k << ",length,obstruction,renorm_drift\n";
  for (const auto& r : rows) {
    out << format_number(r.t);
    for (double v : r.level_norms) out << ',' << format_number(v);
    out << ',' << format_number(r.gauged_energy) << ',' << format_number(r.length) << ','
        << format_number(r.obstruction) << ',' << format_number(r.renorm_drift) << '\n';
  }
  return out.str();
}

inline std::string snapshot_csv(const Curve& curve) {
  std::ostringstream out;
  out << "x,u1,u2,u3\n";
  for (int j = 0; j < curve.grid.size(); ++j) {
    out << format_number(curve.grid.node(j));
    for (int c = 0; c < 3; ++c) out << ',' << format_number(curve.points(j, c));
    out << '\n';
  }
  return out.str();
}

/// Collects files relative to an output root and writes the manifest last.
class OutputWriter {
 public:
  explicit OutputWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  void write(const std::string& relative, const std::string& contents) {
    const fs::path path = root_ / relative;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << contents;
    if (!f) throw std::runtime_error("write failed for " + path.string());
    entries_.push_back({{"path", relative}, {"bytes", contents.size()}, {"sha256", sha256_hex(contents)}});
  }

  /// manifest.json: config, code version, and output hashes. Returns its text.
  std::string finish(const json& config, const json& extra = json::object()) {
    json manifest = {{"code_version", DISPFLOW_VERSION}, {"config", config}, {"outputs", entries_}};
    for (const auto& [key, value] : extra.items()) manifest[key] = value;
    const std::string text = manifest.dump(2) + "\n";
    std::ofstream f(root_ / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (root_ / "manifest.json").string());
    f << text;
    return text;
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  json entries_ = json::array();
};

inline std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshots/snap_%06zu.csv", index);
  return buf;
}

inline json trajectory_summary(const Trajectory& traj) {
  json s = {{"rhs", to_string(traj.rhs)}, {"dt", traj.dt}, {"steps", traj.steps},
            {"t_final", traj.final_state.t}, {"blew_up", traj.blew_up},
            {"snapshots", traj.snapshots.size()}};
  s["n4_doubling_time"] = traj.n4_doubling_time ? json(*traj.n4_doubling_time) : json(nullptr);
  if (traj.blew_up) s["blowup_message"] = traj.blowup_message;
  return s;
}

/// Writes diagnostics.csv, snapshots/, and manifest.json for one run.
inline std::string write_trajectory(const fs::path& dir, const Trajectory& traj) {
  OutputWriter w(dir);
  w.write("diagnostics.csv", diagnostics_csv(traj.diagnostics, traj.config.k));
  json times = json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    w.write(snapshot_name(i), snapshot_csv(traj.snapshots[i].curve));
    times.push_back({{"index", i}, {"t", traj.snapshots[i].t}});
  }
  w.write("snapshots/index.json", times.dump(2) + "\n");
  return w.finish(config_to_json(traj.config), {{"run", trajectory_summary(traj)}});
}

inline json check_to_json(const StudyCheck& c) {
  json j = {{"name", c.name}, {"value", c.value}, {"relation", c.relation},
            {"threshold", c.threshold}, {"pass", c.pass}};
  if (c.relation == "in") j["threshold_hi"] = c.threshold_hi;
  if (!std::isfinite(c.threshold)) j["threshold"] = nullptr;
  return j;
}

/// One JSON object per line: a header event, one per case, one per check, and
/// a closing event with the fitted quantities.
inline std::string study_ndjson(const StudyResult& r) {
  std::ostringstream out;
  out << json{{"event", "study"}, {"study", r.name}, {"parameters", r.parameters}}.dump() << '\n';
  for (const auto& c : r.cases) {
    json e = c;
    e["event"] = "case";
    e["study"] = r.name;
    out << e.dump() << '\n';
  }
  for (const auto& c : r.checks) {
    json e = check_to_json(c);
    e["event"] = "check";
    e["study"] = r.name;
    out << e.dump() << '\n';
  }
  out << json{{"event", "done"}, {"study", r.name}, {"fitted", r.fitted}, {"passed", r.passed()}}.dump()
      << '\n';
  return out.str();
}

inline std::string study_summary(const StudyResult& r) {
  std::ostringstream out;
  out << "study " << r.name << ": " << (r.passed() ? "PASS" : "FAIL") << '\n';
  for (const auto& c : r.checks) {
    out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << format_number(c.value) << ' '
        << c.relation << ' ';
    if (c.relation == "in") {
      out << '[' << format_number(c.threshold) << ", " << format_number(c.threshold_hi) << ']';
    } else {
      out << format_number(c.threshold);
    }
    out << '\n';
  }
  for (const auto& [key, value] : r.fitted.items()) out << "  " << key << " = " << value.dump() << '\n';
  return out.str();
}

/// Writes <name>.ndjson per study, summary.txt, and manifest.json.
inline std::string write_studies(const fs::path& dir, const std::vector<StudyResult>& studies,
                                 const json& config) {
  OutputWriter w(dir);
  std::string summary;
  for (const auto& s : studies) {
    w.write(s.name + ".ndjson", study_ndjson(s));
    summary += study_summary(s);
  }
  w.write("summary.txt", summary);
  json passed = json::object();
  for (const auto& s : studies) passed[s.name] = s.passed();
  return w.finish(config, {{"passed", passed}});
}

}  // namespace dispflow
