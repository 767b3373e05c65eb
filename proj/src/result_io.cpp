#include "eap/result_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "eap/errors.hpp"

namespace eap {

using nlohmann::json;

namespace {

json double_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

json solution_to_json(const ClusteringSolution& sol,
                      const SolutionMetrics& metrics, const RunMeta& meta) {
  json j;
  j["schema_version"] = 1;
  j["algorithm"] = meta.algorithm;
  j["dataset"] = {{"source", meta.dataset_source},
                  {"n_points", sol.point_ids.size()},
                  {"time_steps", sol.time_steps}};
  j["config"] = {{"gamma", meta.config.gamma},
                 {"omega", meta.config.omega},
                 {"lambda", meta.config.lambda},
                 {"max_iter", meta.config.max_iter},
                 {"conv_window", meta.config.conv_window},
                 {"min_cluster_size", meta.config.min_cluster_size},
                 {"preference", meta.preference},
                 {"seed", meta.config.seed}};
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["point_ids"] = sol.point_ids;

  json tracks = json::array();
  for (const Track& tr : sol.tracks) {
    json t;
    t["id"] = tr.id;
    t["kind"] = tr.is_consensus ? "consensus" : "data-exemplar";
    t["birth_t"] = tr.birth_t;
    t["death_t"] = tr.death_t;
    if (tr.is_consensus) {
      t["parent_exemplar"] = tr.parent_exemplar;
      t["features"] = tr.features;
    }
    tracks.push_back(std::move(t));
  }
  j["tracks"] = std::move(tracks);

  json assignments = json::array();
  for (int t = 0; t < sol.time_steps; ++t) {
    json slot;
    slot["t"] = t + 1;
    json ex = json::array(), trk = json::array();
    for (std::size_t i = 0; i < sol.point_ids.size(); ++i) {
      if (sol.track_of_point[t][i] < 0) {
        ex.push_back(nullptr);
        trk.push_back(nullptr);
      } else {
        ex.push_back(sol.exemplar_label[t][i]);
        trk.push_back(sol.track_of_point[t][i]);
      }
    }
    slot["exemplar"] = std::move(ex);
    slot["track"] = std::move(trk);
    assignments.push_back(std::move(slot));
  }
  j["assignments"] = std::move(assignments);

  json m;
  m["mean_rand"] = double_or_null(metrics.mean_rand);
  m["mean_mod_rand"] = double_or_null(metrics.mean_mod_rand);
  json rt = json::array(), mt = json::array();
  for (double v : metrics.rand_per_t) rt.push_back(double_or_null(v));
  for (double v : metrics.mod_rand_per_t) mt.push_back(double_or_null(v));
  m["rand_per_t"] = std::move(rt);
  m["mod_rand_per_t"] = std::move(mt);
  m["clusters_per_t"] = metrics.tracks.clusters_per_t;
  m["distinct_exemplars"] = metrics.tracks.distinct_exemplars_total;
  m["mean_clusters"] = metrics.tracks.mean_clusters;
  m["membership_change_rate"] = metrics.tracks.membership_change_rate;
  m["birth_times"] = metrics.tracks.birth_times;
  m["death_times"] = metrics.tracks.death_times;
  j["metrics"] = std::move(m);

  j["timestamp"] = meta.timestamp;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(determinism_hash(j)));
  j["determinism_hash"] = buf;
  return j;
}

std::uint64_t determinism_hash(const json& j) {
  json stripped = j;
  stripped.erase("timestamp");
  stripped.erase("determinism_hash");
  std::string dump = stripped.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> validate_solution_json(const json& j) {
  std::vector<std::string> errors;
  auto need = [&](const char* key) {
    if (!j.contains(key)) errors.push_back(std::string("missing key: ") + key);
    return j.contains(key);
  };
  for (const char* key : {"schema_version", "algorithm", "dataset", "config",
                          "iterations", "converged", "point_ids", "tracks",
                          "assignments", "metrics", "determinism_hash"})
    need(key);
  if (!errors.empty()) return errors;

  const auto& points = j["point_ids"];
  const auto& tracks = j["tracks"];
  const auto& assignments = j["assignments"];
  const int T = j["dataset"]["time_steps"].get<int>();
  if (static_cast<int>(assignments.size()) != T)
    errors.push_back("assignments length != time_steps");

  std::vector<std::set<int>> seen_at(tracks.size());
  for (int t = 0; t < static_cast<int>(assignments.size()); ++t) {
    const auto& slot = assignments[t];
    const auto& ex = slot["exemplar"];
    const auto& trk = slot["track"];
    if (ex.size() != points.size() || trk.size() != points.size()) {
      errors.push_back("assignment arrays at t=" + std::to_string(t + 1) +
                       " do not cover all points");
      continue;
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (trk[i].is_null() != ex[i].is_null()) {
        errors.push_back("exemplar/track nullness mismatch at t=" +
                         std::to_string(t + 1));
        continue;
      }
      if (trk[i].is_null()) continue;
      int k = trk[i].get<int>();
      if (k < 0 || k >= static_cast<int>(tracks.size())) {
        errors.push_back("assignment references missing track " +
                         std::to_string(k));
        continue;
      }
      seen_at[k].insert(t + 1);
      if (tracks[k]["id"].get<std::string>() != ex[i].get<std::string>())
        errors.push_back("exemplar label does not match track id at t=" +
                         std::to_string(t + 1));
    }
  }
  for (std::size_t k = 0; k < seen_at.size(); ++k) {
    if (seen_at[k].empty()) {
      errors.push_back("track " + std::to_string(k) + " is never used");
      continue;
    }
    int birth = tracks[k]["birth_t"].get<int>();
    int death = tracks[k]["death_t"].get<int>();
    int lo = *seen_at[k].begin(), hi = *seen_at[k].rbegin();
    if (lo != birth || hi != death)
      errors.push_back("track " + std::to_string(k) +
                       " birth/death do not match its appearances");
    if (static_cast<int>(seen_at[k].size()) != hi - lo + 1)
      errors.push_back("track " + std::to_string(k) +
                       " interval is not contiguous");
  }
  return errors;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_assignments_csv(const ClusteringSolution& sol,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << "t,point_id,exemplar,track\n";
  for (int t = 0; t < sol.time_steps; ++t)
    for (std::size_t i = 0; i < sol.point_ids.size(); ++i) {
      if (sol.track_of_point[t][i] < 0) continue;
      out << (t + 1) << ',' << sol.point_ids[i] << ','
          << sol.exemplar_label[t][i] << ','
          << sol.tracks[sol.track_of_point[t][i]].id << '\n';
    }
}

void write_metrics_csv(const SolutionMetrics& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << "t,clusters,rand,mod_rand,membership_change\n";
  out.precision(12);
  const int T = static_cast<int>(m.tracks.clusters_per_t.size());
  for (int t = 0; t < T; ++t) {
    out << (t + 1) << ',' << m.tracks.clusters_per_t[t] << ',';
    if (!std::isnan(m.rand_per_t[t])) out << m.rand_per_t[t];
    out << ',';
    if (!std::isnan(m.mod_rand_per_t[t])) out << m.mod_rand_per_t[t];
    out << ',';
    if (t >= 1) out << m.tracks.membership_change_rate[t - 1];
    out << '\n';
  }
}

void append_plot_rows(const SolutionMetrics& m, const std::string& algorithm,
                      std::string* out) {
  char buf[64];
  for (std::size_t t = 0; t < m.rand_per_t.size(); ++t) {
    if (std::isnan(m.rand_per_t[t])) continue;
    std::snprintf(buf, sizeof(buf), "%zu,%s,%.12g\n", t + 1,
                  algorithm.c_str(), m.rand_per_t[t]);
    *out += buf;
  }
}

}  // namespace eap
