// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs the full benchmark reproduction plus the oracle and
// instrumentation suites; expect a few minutes of runtime.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eap/ap_kernels.hpp"
#include "eap/engine.hpp"
#include "eap/metrics.hpp"
#include "eap/rng.hpp"
#include "eap/similarity.hpp"
#include "eap/static_ap.hpp"
#include "eap/synthetic.hpp"
#include "oracles.hpp"

using namespace eap;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct BenchRun {
  SolutionMetrics metrics;
  ClusteringSolution sol;
  double seconds = 0.0;
};

DatasetSeries make_dataset(GaussianKind kind, std::uint64_t seed) {
  GaussianScenario sc;
  sc.kind = kind;
  sc.seed = seed;
  return normalize_synthetic(gen_gaussian(sc));
}

BenchRun run_algo(const std::string& algo, const DatasetSeries& ds,
                  std::uint64_t seed) {
  SimilarityTensor sim = build_similarity(ds);
  set_preferences(sim, ds, PreferenceMode::PerTimeMin);
  EapConfig cfg;
  cfg.seed = seed;
  if (algo == "eap-nocn") {
    cfg.enable_consensus = false;
    cfg.omega = 0.0;
  }
  BenchRun out;
  auto t0 = std::chrono::steady_clock::now();
  if (algo == "ap")
    out.sol = run_static_ap(ds, sim, cfg);
  else
    out.sol = run_eap(ds, sim, cfg);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  out.metrics = evaluate_solution(out.sol, ds);
  return out;
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

struct Criterion123State {
  // [kind][seed]
  std::map<GaussianKind, std::vector<BenchRun>> eap;
  std::vector<BenchRun> ap_separated;
  std::vector<BenchRun> ap_cluster_change, ap_third_cluster;
};

void criteria_1_2_3(Criterion123State& st) {
  const std::vector<GaussianKind> kinds{
      GaussianKind::Separated, GaussianKind::Colliding,
      GaussianKind::ClusterChange, GaussianKind::ThirdCluster};

  double max_seconds = 0.0;
  for (GaussianKind kind : kinds)
    for (std::uint64_t seed : kSeeds) {
      DatasetSeries ds = make_dataset(kind, seed);
      BenchRun r = run_algo("eap", ds, seed);
      max_seconds = std::max(max_seconds, r.seconds);
      st.eap[kind].push_back(std::move(r));
      if (kind == GaussianKind::Separated)
        st.ap_separated.push_back(run_algo("ap", ds, seed));
      if (kind == GaussianKind::ClusterChange)
        st.ap_cluster_change.push_back(run_algo("ap", ds, seed));
      if (kind == GaussianKind::ThirdCluster)
        st.ap_third_cluster.push_back(run_algo("ap", ds, seed));
    }

  auto mean_rand = [&](GaussianKind k) {
    double acc = 0;
    for (const BenchRun& r : st.eap[k]) acc += r.metrics.mean_rand;
    return acc / st.eap[k].size();
  };

  // Criterion 1: mean Rand across 5 seeds, plus the runtime cap.
  double r_sep = mean_rand(GaussianKind::Separated);
  double r_col = mean_rand(GaussianKind::Colliding);
  double r_chg = mean_rand(GaussianKind::ClusterChange);
  double r_3rd = mean_rand(GaussianKind::ThirdCluster);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "EAP mean Rand sep=%.4f col=%.4f chg=%.4f 3rd=%.4f; slowest "
                "run %.1fs",
                r_sep, r_col, r_chg, r_3rd, max_seconds);
  report(1,
         r_sep >= 0.99 && r_col >= 0.99 && r_chg >= 0.97 && r_3rd >= 0.97 &&
             max_seconds <= 120.0,
         buf);

  // Criterion 2: distinct exemplar counts.
  auto count_eq = [&](GaussianKind k, int want) {
    int hits = 0;
    for (const BenchRun& r : st.eap[k])
      if (r.metrics.tracks.distinct_exemplars_total == want) ++hits;
    return hits;
  };
  int sep2 = count_eq(GaussianKind::Separated, 2);
  int col2 = count_eq(GaussianKind::Colliding, 2);
  int chg2 = count_eq(GaussianKind::ClusterChange, 2);
  int thr3 = count_eq(GaussianKind::ThirdCluster, 3);
  int ap_sep_min = 1 << 30;
  for (const BenchRun& r : st.ap_separated)
    ap_sep_min = std::min(ap_sep_min,
                          r.metrics.tracks.distinct_exemplars_total);
  std::snprintf(buf, sizeof(buf),
                "EAP distinct==2: sep %d/5 col %d/5 chg %d/5; ==3: 3rd %d/5; "
                "AP separated distinct >= %d",
                sep2, col2, chg2, thr3, ap_sep_min);
  report(2,
         sep2 >= 4 && col2 >= 4 && chg2 >= 4 && thr3 >= 3 && ap_sep_min > 20,
         buf);

  // Criterion 3: per-time Rand shape on the colliding variants. The AP
  // baseline dips after the t=10/11 perturbation relative to its level
  // before the collision nadir at t=9; EAP is back above 0.99 within three
  // steps of the perturbation and stays there.
  auto shape_ok = [&](GaussianKind kind, const std::vector<BenchRun>& ap) {
    int good = 0;
    for (std::size_t s = 0; s < kSeeds.size(); ++s) {
      const auto& eap_rand = st.eap[kind][s].metrics.rand_per_t;
      const auto& ap_rand = ap[s].metrics.rand_per_t;
      double ap_before = 1e9, ap_after = 1e9;
      for (int t = 1; t <= 7; ++t) ap_before = std::min(ap_before, ap_rand[t]);
      for (std::size_t t = 9; t < ap_rand.size(); ++t)
        ap_after = std::min(ap_after, ap_rand[t]);
      bool dip = ap_after < ap_before - 0.01;
      bool recover = true;
      for (std::size_t t = 13; t < eap_rand.size(); ++t)
        recover = recover && eap_rand[t] >= 0.99;
      if (dip && recover) ++good;
    }
    return good;
  };
  int chg_ok = shape_ok(GaussianKind::ClusterChange, st.ap_cluster_change);
  int thr_ok = shape_ok(GaussianKind::ThirdCluster, st.ap_third_cluster);
  std::snprintf(buf, sizeof(buf),
                "AP dips after t=9 and EAP holds >=0.99 from t=14: "
                "cluster-change %d/5, third-cluster %d/5",
                chg_ok, thr_ok);
  report(3, chg_ok >= 3 && thr_ok >= 3, buf);
}

void criterion_4() {
  // gamma=omega=0 with consensus disabled reduces exactly to per-time AP.
  // One EAP iteration applies rho/alpha twice per step, so the AP budget is
  // doubled; early stopping is disabled on both sides.
  SplitMix64 rng(4004);
  bool all_equal = true;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    int n = 5 + static_cast<int>(rng.next() % 26);
    int T = 1 + static_cast<int>(rng.next() % 5);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
    DatasetSeries ds(ids, T, 2);
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i)
        ds.set_point(t, i,
                     {4.0 * (rng.uniform01() - 0.5),
                      4.0 * (rng.uniform01() - 0.5)});
    SimilarityTensor sim = build_similarity(ds);
    set_preferences(sim, ds, PreferenceMode::PerTimeMin);
    EapConfig cfg;
    cfg.gamma = 0.0;
    cfg.omega = 0.0;
    cfg.lambda = 0.5;
    cfg.max_iter = 60;
    cfg.conv_window = 1000;
    cfg.enable_consensus = false;
    ClusteringSolution sol = run_eap(ds, sim, cfg);
    for (int t = 0; t < T; ++t) {
      ApResult r = run_ap(sim.at(t), {0.5, 120, 1000});
      for (int i = 0; i < n; ++i) {
        ++checked;
        if (sol.exemplar_label[t][i] != ds.point_ids()[r.exemplar[i]])
          all_equal = false;
      }
    }
  }
  report(4, all_equal,
         "reduction oracle: " + std::to_string(checked) +
             " assignments compared, exact equality " +
             (all_equal ? "held" : "violated"));
}

void criterion_5() {
  SplitMix64 rng(5005);
  long mismatches = 0, clamp_mismatches = 0, branch2 = 0;
  for (long k = 0; k < 100000; ++k) {
    double gamma = 4.0 * rng.uniform01();
    double omega = gamma * rng.uniform01();
    double u0 = 30.0 * (rng.uniform01() - 0.5);
    double v = (k % 3 == 0) ? (rng.uniform01() - 0.5) * 2.2 * gamma
                            : 60.0 * (rng.uniform01() - 0.5);
    bool in_c = rng.next() & 1;
    double got = temporal_message(v, gamma, omega, in_c);
    if (std::abs(got - oracle::two_state_temporal(gamma, omega, u0, u0 + v,
                                                  in_c)) > 1e-12)
      ++mismatches;
    if (std::abs(got - oracle::clamped_temporal(gamma, omega, v, in_c)) >
        1e-12)
      ++clamp_mismatches;
    if (temporal_branch(v, gamma, omega, in_c) == 2) ++branch2;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max-sum oracle over 1e5 tuples: %ld mismatches, %ld clamp "
                "mismatches, branch(!d1&d2) fired %ld times",
                mismatches, clamp_mismatches, branch2);
  report(5, mismatches == 0 && clamp_mismatches == 0 && branch2 == 0, buf);
}

void criterion_6() {
  DatasetSeries ds = make_dataset(GaussianKind::Colliding, 1);
  SimilarityTensor sim = build_similarity(ds);
  set_preferences(sim, ds, PreferenceMode::PerTimeMin);
  EapConfig cfg;
  EapEngine eng(ds, sim, cfg);
  eng.enable_bound_audit(true);
  while (eng.iterations_run() < cfg.max_iter && !eng.step()) {
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "delta/phi bound audit on colliding: %ld violations over %d "
                "iterations",
                eng.bound_violations(), eng.iterations_run());
  report(6, eng.bound_violations() == 0, buf);
}

void criterion_7() {
  SplitMix64 rng(7007);
  long rand_bad = 0, mod_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng.next() % 49);
    std::vector<int> truth(n), pred(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = static_cast<int>(rng.next() % 6);
      pred[i] = static_cast<int>(rng.next() % 6);
    }
    if (std::abs(rand_index(truth, pred) - oracle::pair_rand(truth, pred)) >
        1e-12)
      ++rand_bad;
    double expect = oracle::pair_mod_rand(truth, pred);
    if (!std::isnan(expect)) {
      if (std::abs(modified_rand(truth, pred) - expect) > 1e-12) ++mod_bad;
    }
  }
  bool worked = std::abs(rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) - 1.0 / 3.0) <
                    1e-12 &&
                std::abs(modified_rand({0, 0, 1, 1}, {0, 0, 0, 1}) - 0.5) <
                    1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "1000 random labelings: %ld rand, %ld modRand mismatches; "
                "worked examples (1/3, 0.5) %s",
                rand_bad, mod_bad, worked ? "exact" : "WRONG");
  report(7, rand_bad == 0 && mod_bad == 0 && worked, buf);
}

void criterion_8() {
  SplitMix64 rng(8008);
  int matched = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2;
    const int n = 6 + static_cast<int>(rng.next() % 3);
    const double scale = 0.5 + 1.5 * rng.uniform01();
    std::vector<double> px(n), py(n);
    for (int i = 0; i < n; ++i) {
      int c = i % k;
      // first point of each cluster sits at the center and the rest at
      // least 0.25 away: the medoid is unambiguous, which the
      // exact-equality oracle requires
      double radius = i < k ? 0.0 : 0.25 + 0.25 * rng.uniform01();
      // spread the satellites around the circle so no off-center point can
      // outdo the center as a medoid
      double angle = 6.283185307179586 *
                         (static_cast<double>(i / k) / 4.0) +
                     0.5 * rng.uniform01();
      double jx = radius * std::cos(angle);
      double jy = radius * std::sin(angle);
      px[i] = scale * (8.0 * c + jx);
      py[i] = scale * (5.0 * (c % 2) + jy);
    }
    Matrix s(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) {
          double d2 = (px[i] - px[j]) * (px[i] - px[j]) +
                      (py[i] - py[j]) * (py[i] - py[j]);
          s(i, j) = -d2;
        }
    for (int i = 0; i < n; ++i) s(i, i) = -20.0 * scale * scale;
    ApResult res = run_ap(s, {0.9, 2000, 50});
    double net = oracle::net_similarity(s, res.exemplar);
    double best = oracle::brute_force_ap_optimum(s);
    if (std::abs(net - best) <= 1e-9 * std::max(1.0, std::abs(best)))
      ++matched;
  }
  report(8, matched == 20,
         "run_ap equals the exhaustive optimum on " + std::to_string(matched) +
             "/20 separated micro-instances");
}

void criterion_9() {
  // (a) full-activity dataset: bit-identical solutions with seeding on/off
  DatasetSeries ds = normalize_synthetic(gen_colliding(2, 60));
  SimilarityTensor sim = build_similarity(ds);
  set_preferences(sim, ds, PreferenceMode::PerTimeMin);
  EapConfig on;
  EapConfig off;
  off.enable_activity_seeding = false;
  ClusteringSolution sa = run_eap(ds, sim, on);
  ClusteringSolution sb = run_eap(ds, sim, off);
  bool identical = sa.exemplar_label == sb.exemplar_label &&
                   sa.track_of_point == sb.track_of_point &&
                   sa.iterations == sb.iterations;

  // (b) insertions/deletions never touch messages outside the active span
  SplitMix64 rng(9009);
  const int n = 40, T = 6;
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  DatasetSeries act(ids, T, 2);
  for (int i = 0; i < n; ++i) {
    int start = (i % 5 == 0) ? 2 : 0;
    int stop = (i % 5 == 1) ? 4 : T;
    double cx = (i % 2) ? 3.0 : -3.0;
    for (int t = start; t < stop; ++t)
      act.set_point(t, i, {cx + rng.gaussian() * 0.3, rng.gaussian() * 0.3});
  }
  SimilarityTensor sim2 = build_similarity(act);
  set_preferences(sim2, act, PreferenceMode::PerTimeMin);
  EapConfig cfg;
  EapEngine eng(act, sim2, cfg);
  eng.arm_activity_audit();
  while (eng.iterations_run() < cfg.max_iter && !eng.step()) {
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "activity: on/off solutions %s; inactive-access counter = %ld",
                identical ? "identical" : "DIFFER",
                eng.activity_audit_violations());
  report(9, identical && eng.activity_audit_violations() == 0, buf);
}

void criterion_10() {
  // Cluster count of the final solution (mean clusters per time step, the
  // quantity the parameter study plots) must not increase with gamma at a
  // fixed omega/gamma ratio of 0.5.
  DatasetSeries ds = make_dataset(GaussianKind::ThirdCluster, 1);
  SimilarityTensor sim = build_similarity(ds);
  set_preferences(sim, ds, PreferenceMode::PerTimeMin);
  std::vector<double> gammas{0.5, 1.0, 2.0, 4.0};
  std::vector<double> counts;
  for (double g : gammas) {
    EapConfig cfg;
    cfg.gamma = g;
    cfg.omega = 0.5 * g;
    cfg.seed = 1;
    ClusteringSolution sol = run_eap(ds, sim, cfg);
    counts.push_back(evaluate_solution(sol, ds).tracks.mean_clusters);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < counts.size(); ++i)
    monotone = monotone && counts[i] <= counts[i - 1] + 1e-9;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "mean clusters over gamma {0.5,1,2,4} at omega/gamma=0.5: "
                "{%.3f,%.3f,%.3f,%.3f} (non-increasing: %s)",
                counts[0], counts[1], counts[2], counts[3],
                monotone ? "yes" : "no");
  report(10, monotone, buf);
}

}  // namespace

int main() {
  Criterion123State st;
  criteria_1_2_3(st);
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d criterion failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
