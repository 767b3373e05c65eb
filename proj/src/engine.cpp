#include "eap/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "eap/ap_kernels.hpp"
#include "eap/errors.hpp"
#include "eap/static_ap.hpp"

namespace eap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void EapConfig::validate() const {
  if (!(gamma >= 0.0)) fail(ErrorKind::Config, "gamma must be >= 0");
  if (!(omega >= 0.0 && omega <= gamma))
    fail(ErrorKind::Config, "omega must satisfy 0 <= omega <= gamma");
  if (!(lambda >= 0.0 && lambda < 1.0))
    fail(ErrorKind::Config, "lambda must be in [0, 1)");
  if (max_iter < 1) fail(ErrorKind::Config, "max_iter must be >= 1");
  if (conv_window < 1) fail(ErrorKind::Config, "conv_window must be >= 1");
  if (min_cluster_size < 1)
    fail(ErrorKind::Config, "min_cluster_size must be >= 1");
}

EapEngine::EapEngine(const DatasetSeries& ds, const SimilarityTensor& sim,
                     const EapConfig& cfg)
    : ds_(ds), cfg_(cfg) {
  cfg_.validate();
  ds_.validate();
  n_data_ = ds_.n_points();
  T_ = ds_.time_steps();
  if (sim.time_steps() != T_ || sim.n_points() != n_data_)
    fail(ErrorKind::Config, "similarity tensor does not match the dataset");
  if (!sim.preferences_set())
    fail(ErrorKind::Config, "preferences not set on the similarity tensor");

  slabs_.resize(T_);
  pref_.assign(T_, std::numeric_limits<double>::quiet_NaN());
  for (int t = 0; t < T_; ++t) {
    TimeSlab& sl = slabs_[t];
    sl.alpha = Matrix(n_data_, 0.0);
    sl.rho = Matrix(n_data_, 0.0);
    sl.delta = Matrix(n_data_, 0.0);
    sl.phi = Matrix(n_data_, 0.0);
    sl.sim = sim.at(t);
    sl.live.assign(n_data_, 0);
    for (int i = 0; i < n_data_; ++i) {
      if (!ds_.active(t, i)) continue;
      sl.live[i] = 1;
      if (std::isnan(pref_[t])) pref_[t] = sl.sim(i, i);
    }
  }
  activity_ = ActivitySets::derive(ds_);
  assign_.assign(T_, std::vector<int>(n_data_, -1));
  chosen_.assign(T_, {});
  scratch_ = Matrix(n_data_, -kInf);
  // Tracking over a single snapshot is meaningless; T=1 runs as plain
  // per-time message passing, matching static AP at the boundary invariant.
  consensus_allowed_ = cfg_.enable_consensus && T_ > 1;
}

const double* EapEngine::node_features(int t, int id) const {
  if (id < n_data_) return ds_.features(t, id);
  return registry_.node(id - n_data_).features[t].data();
}

std::vector<int> EapEngine::live_data_at(int t) const {
  std::vector<int> out;
  for (int i = 0; i < n_data_; ++i)
    if (slabs_[t].live[i]) out.push_back(i);
  return out;
}

void EapEngine::refresh_similarity_rows(int t, int id) {
  TimeSlab& sl = slabs_[t];
  const double* x = node_features(t, id);
  const int F = ds_.feature_dim();
  for (int j = 0; j < n_nodes(); ++j) {
    if (!sl.live[j] || j == id) continue;
    const double* y = node_features(t, j);
    double acc = 0.0;
    for (int f = 0; f < F; ++f) {
      double d = x[f] - y[f];
      acc += d * d;
    }
    sl.sim(id, j) = -acc;
    sl.sim(j, id) = -acc;
  }
  // Consensus preference equals the data preference at this time step.
  sl.sim(id, id) = pref_[t];
}

void EapEngine::grow_node_space() {
  const int m = n_nodes();
  for (int t = 0; t < T_; ++t) {
    TimeSlab& sl = slabs_[t];
    sl.alpha.grow(m, 0.0);
    sl.rho.grow(m, 0.0);
    sl.delta.grow(m, 0.0);
    sl.phi.grow(m, 0.0);
    sl.sim.grow(m, -kInf);
    sl.live.resize(m, 0);
    assign_[t].resize(m, -1);
  }
  scratch_ = Matrix(m, -kInf);
  if (activity_audit_) rearm_audit();
}

void EapEngine::rearm_audit() {
  for (int t = 0; t < T_; ++t) {
    TimeSlab& sl = slabs_[t];
    sl.alpha.arm_audit(&sl.live, &audit_violations_);
    sl.rho.arm_audit(&sl.live, &audit_violations_);
    sl.delta.arm_audit(&sl.live, &audit_violations_);
    sl.phi.arm_audit(&sl.live, &audit_violations_);
  }
}

void EapEngine::arm_activity_audit() {
  activity_audit_ = true;
  rearm_audit();
}

void EapEngine::update_delta_at(int t) {
  assert(t >= 1);
  TimeSlab& cur = slabs_[t];
  const TimeSlab& prev = slabs_[t - 1];
  const int n = n_nodes();
  const double omega = effective_omega();
  for (int j = 0; j < n; ++j) {
    if (!cur.live[j] || !prev.live[j]) continue;
    const bool toward_consensus = is_consensus(j);  // live at t, so j in C^t
    for (int i = 0; i < n; ++i) {
      if (!cur.live[i] || !prev.live[i]) continue;
      if (!edge_present(t, i, j) || !edge_present(t - 1, i, j)) continue;
      double v = prev.rho(i, j) + prev.alpha(i, j) - prev.phi(i, j);
      double next = temporal_message(v, cfg_.gamma, omega, toward_consensus);
      cur.delta(i, j) =
          cfg_.lambda * cur.delta(i, j) + (1.0 - cfg_.lambda) * next;
      ++counters_.delta;
    }
  }
}

void EapEngine::update_phi_at(int t) {
  assert(t + 1 < T_);
  TimeSlab& cur = slabs_[t];
  const TimeSlab& next_sl = slabs_[t + 1];
  const int n = n_nodes();
  const double omega = effective_omega();
  for (int j = 0; j < n; ++j) {
    if (!cur.live[j] || !next_sl.live[j]) continue;
    // Eq. 16 takes the consensus indicator at the later time step.
    const bool toward_consensus = is_consensus(j);
    for (int i = 0; i < n; ++i) {
      if (!cur.live[i] || !next_sl.live[i]) continue;
      if (!edge_present(t, i, j) || !edge_present(t + 1, i, j)) continue;
      double v = next_sl.rho(i, j) + next_sl.alpha(i, j) - next_sl.delta(i, j);
      double next = temporal_message(v, cfg_.gamma, omega, toward_consensus);
      cur.phi(i, j) =
          cfg_.lambda * cur.phi(i, j) + (1.0 - cfg_.lambda) * next;
      ++counters_.phi;
    }
  }
}

void EapEngine::update_rho_at(int t) {
  TimeSlab& sl = slabs_[t];
  const int n = n_nodes();
  for (int i = 0; i < n; ++i) {
    if (!sl.live[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (!sl.live[j]) continue;
      double s = sl.sim(i, j);
      scratch_(i, j) =
          s == -kInf ? -kInf : s + sl.delta(i, j) + sl.phi(i, j);
    }
  }
  counters_.rho +=
      responsibility_sweep(sl.rho, scratch_, sl.alpha, sl.live, cfg_.lambda);
}

void EapEngine::update_alpha_at(int t) {
  TimeSlab& sl = slabs_[t];
  counters_.alpha +=
      availability_sweep(sl.alpha, sl.rho, sl.sim, sl.live, cfg_.lambda);
}

Identification EapEngine::identify_at(int t) const {
  const TimeSlab& sl = slabs_[t];
  const int n = n_nodes();
  Identification id;
  id.assignment.assign(n, -1);

  std::vector<int> live;
  for (int i = 0; i < n; ++i)
    if (sl.live[i]) live.push_back(i);
  if (live.empty()) return id;
  if (live.size() == 1) {
    id.exemplar_set = {live[0]};
    id.assignment[live[0]] = live[0];
    return id;
  }

  for (int j : live)
    if (message_sum(t, j, j) > 0.0) id.exemplar_set.push_back(j);
  if (id.exemplar_set.empty()) return id;

  for (int i : live) {
    if (is_consensus(i)) {
      // Consensus nodes take the plain argmax; a preference for a data point
      // is handled by the self-swap step.
      double best = -kInf;
      int arg = -1;
      for (int j : id.exemplar_set) {
        if (!edge_present(t, i, j)) continue;
        double v = message_sum(t, i, j);
        if (v > best) {
          best = v;
          arg = j;
        }
      }
      id.assignment[i] = arg;
      continue;
    }
    // Data points prefer consensus exemplars with a positive message sum.
    double best = -kInf;
    int arg = -1;
    for (int j : id.exemplar_set) {
      if (!is_consensus(j) || !edge_present(t, i, j)) continue;
      double v = message_sum(t, i, j);
      if (v > 0.0 && v > best) {
        best = v;
        arg = j;
      }
    }
    if (arg < 0) {
      for (int j : id.exemplar_set) {
        if (!edge_present(t, i, j)) continue;
        double v = message_sum(t, i, j);
        if (v > best) {
          best = v;
          arg = j;
        }
      }
    }
    id.assignment[i] = arg;
  }
  return id;
}

bool EapEngine::creation_trigger() const {
  if (!registry_.empty()) return false;
  for (int t = 0; t < T_; ++t)
    if (static_cast<int>(chosen_[t].size()) < 2) return false;
  return true;
}

void EapEngine::refresh_assignments() {
  for (int t = 0; t < T_; ++t) {
    Identification id = identify_at(t);
    std::vector<int>& e = id.assignment;
    std::vector<int> chosen;
    for (int i = 0; i < n_data_; ++i)
      if (slabs_[t].live[i] && e[i] >= 0) chosen.push_back(e[i]);
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    for (int x : chosen) e[x] = x;  // exemplars point to themselves
    assign_[t] = e;
    chosen_[t] = chosen;
  }
}

void EapEngine::consensus_self_swap_at(int t, std::vector<int>& e,
                                       std::vector<int>& chosen) {
  std::vector<std::uint8_t> claimed(n_nodes(), 0);
  for (int k = n_data_; k < n_nodes(); ++k) {
    if (!slabs_[t].live[k]) continue;
    int target = e[k];
    if (target < 0 || target >= n_data_ || claimed[target]) continue;
    // The consensus node picked a data point: it takes over that point's
    // messages and inherits its members.
    claimed[target] = 1;
    seed_node_messages_from(t, k, target);
    for (int j = 0; j < n_nodes(); ++j)
      if (slabs_[t].live[j] && e[j] == target) e[j] = k;
    e[target] = k;
    e[k] = k;
    for (int& c : chosen)
      if (c == target) c = k;
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  }
}

void EapEngine::refresh_evolution_at(int t, const std::vector<int>& e,
                                     const std::vector<int>& chosen) {
  const int F = ds_.feature_dim();
  for (int k : chosen) {
    if (!is_consensus(k)) continue;
    ConsensusNode& node = registry_.node(k - n_data_);
    std::vector<double> mean(F, 0.0);
    int count = 0;
    for (int j = 0; j < n_data_; ++j) {
      if (!slabs_[t].live[j] || e[j] != k) continue;
      const double* x = ds_.features(t, j);
      for (int f = 0; f < F; ++f) mean[f] += x[f];
      ++count;
    }
    assert(count > 0 && "a chosen consensus exemplar always has members");
    if (count == 0) continue;
    for (int f = 0; f < F; ++f) mean[f] /= count;
    node.features[t] = mean;
    refresh_similarity_rows(t, k);
  }
}

void EapEngine::death_event(int k, int t, int iteration) {
  ConsensusNode& node = registry_.node(k - n_data_);
  for (int u = t; u < T_; ++u) {
    if (node.alive[u]) {
      node.alive[u] = 0;
      slabs_[u].live[k] = 0;
    }
  }
  node.last_death_time = t;
  node.last_death_iter = iteration;
  // The temporal factor into t no longer exists; its backward message is 0.
  if (t - 1 >= 0 && node.alive[t - 1]) {
    TimeSlab& prev = slabs_[t - 1];
    for (int j = 0; j < n_nodes(); ++j) {
      if (!prev.live[j] || j == k) continue;
      prev.phi(k, j) = 0.0;
      prev.phi(j, k) = 0.0;
    }
    prev.phi(k, k) = 0.0;
  }
}

void EapEngine::process_deaths_at(int t, const std::vector<int>& chosen,
                                  int iteration) {
  for (int k = n_data_; k < n_nodes(); ++k) {
    if (!slabs_[t].live[k]) continue;
    if (!std::binary_search(chosen.begin(), chosen.end(), k))
      death_event(k, t, iteration);
  }
}

void EapEngine::seed_node_messages_from(int t, int dst, int src) {
  TimeSlab& sl = slabs_[t];
  sl.seeded_from[src] = dst;
  copy_message_rows(sl.alpha, dst, src, sl.live);
  copy_message_rows(sl.rho, dst, src, sl.live);
  copy_message_rows(sl.delta, dst, src, sl.live);
  copy_message_rows(sl.phi, dst, src, sl.live);
  // Availability fixups: dst must treat src as its second-best exemplar, and
  // dst's availability to src starts at the off-diagonal maximum of 0.
  double best = -kInf;
  int y = -1;
  for (int j = 0; j < n_data_; ++j) {
    if (!sl.live[j] || j == src) continue;
    if (!edge_present(t, src, j)) continue;
    double v = message_sum(t, src, j);
    if (v > best) {
      best = v;
      y = j;
    }
  }
  if (y >= 0)
    sl.alpha(dst, src) = sl.alpha(src, y);
  else
    sl.alpha(dst, src) = std::min(0.0, sl.alpha(src, src));
  sl.alpha(src, dst) = 0.0;
}

void EapEngine::create_consensus_at(int t, std::vector<int>& e,
                                    std::vector<int>& chosen, int iteration) {
  // Nodes are spawned for the data points previously identified as
  // exemplars: the snapshot the creation trigger fired on, not this pass's
  // re-identification. A cluster that only now starts forming (defectors
  // still carrying their old messages) is present in that snapshot and gets
  // its node at the right birth time.
  const std::vector<int> stale_e = assign_[t];
  std::vector<int> data_exemplars;
  for (int x : chosen_[t])
    if (!is_consensus(x)) data_exemplars.push_back(x);

  for (int i : data_exemplars) {
    // A node seeded from i's messages at this slab already continues i's
    // cluster (the chain arriving from t-1 inherits the local exemplar).
    auto inherited = slabs_[t].seeded_from.find(i);
    if (inherited != slabs_[t].seeded_from.end() &&
        slabs_[t].live[inherited->second])
      continue;
    std::vector<int> members;
    for (int j = 0; j < n_data_; ++j)
      if (slabs_[t].live[j] && stale_e[j] == i) members.push_back(j);
    if (static_cast<int>(members.size()) < cfg_.min_cluster_size) continue;

    // Duplicate guard: the cluster is already represented if a node spawned
    // from this exemplar is still alive here.
    bool represented = false;
    for (int c = 0; c < registry_.size(); ++c) {
      const ConsensusNode& node = registry_.node(c);
      if (node.parent == i && t < static_cast<int>(node.alive.size()) &&
          node.alive[t]) {
        represented = true;
        break;
      }
    }
    if (represented) continue;

    ConsensusNode node;
    node.node_id = n_nodes();
    node.parent = i;
    node.birth_time = t;
    node.birth_iteration = iteration;
    node.alive.assign(T_, 0);
    node.seeded.assign(T_, 0);
    node.features.assign(T_, {});
    node.alive[t] = node.seeded[t] = 1;
    const int F = ds_.feature_dim();
    std::vector<double> mean(F, 0.0);
    for (int j : members) {
      const double* x = ds_.features(t, j);
      for (int f = 0; f < F; ++f) mean[f] += x[f];
    }
    for (int f = 0; f < F; ++f) mean[f] /= static_cast<double>(members.size());
    node.features[t] = mean;

    const int id = node.node_id;
    registry_.add(std::move(node));
    grow_node_space();
    e.resize(n_nodes(), -1);
    slabs_[t].live[id] = 1;
    refresh_similarity_rows(t, id);
    seed_node_messages_from(t, id, i);

    // Exemplar role transfers from i to the new node wherever i still holds
    // it in the current assignment; otherwise the node competes on its
    // inherited messages from the next identification on.
    bool serving = false;
    for (int j = 0; j < n_data_; ++j)
      if (slabs_[t].live[j] && e[j] == i) {
        e[j] = id;
        serving = true;
      }
    e[id] = id;
    if (serving) {
      e[i] = id;
      for (int& c : chosen)
        if (c == i) c = id;
      std::sort(chosen.begin(), chosen.end());
    }
  }
}

bool EapEngine::replicate_to_next(int k, int t, const std::vector<int>& e,
                                  int iteration, int* seed_used) {
  if (t + 1 >= T_) return false;
  ConsensusNode& node = registry_.node(k - n_data_);

  std::vector<int> members;
  for (int j = 0; j < n_data_; ++j)
    if (slabs_[t].live[j] && e[j] == k) members.push_back(j);

  const int F = ds_.feature_dim();
  std::vector<double> mean(F, 0.0);
  int next_count = 0;
  for (int j : members) {
    if (!ds_.active(t + 1, j)) continue;
    const double* x = ds_.features(t + 1, j);
    for (int f = 0; f < F; ++f) mean[f] += x[f];
    ++next_count;
  }
  // Most common exemplar at t+1 among k's members, restricted to seeds that
  // are still live there.
  std::map<int, int> votes;
  for (int j : members) {
    if (!ds_.active(t + 1, j)) continue;
    int prev_e = assign_[t + 1][j];
    if (prev_e < 0 || !slabs_[t + 1].live[prev_e]) continue;
    ++votes[prev_e];
  }
  int seed_exemplar = -1, best_votes = 0;
  for (auto [cand, v] : votes)
    if (v > best_votes) {
      best_votes = v;
      seed_exemplar = cand;
    }
  if (next_count == 0 || seed_exemplar < 0) {
    node.last_death_time = t + 1;
    node.last_death_iter = iteration;
    return false;
  }

  for (int f = 0; f < F; ++f) mean[f] /= next_count;
  node.features[t + 1] = mean;
  node.alive[t + 1] = node.seeded[t + 1] = 1;
  slabs_[t + 1].live[k] = 1;
  refresh_similarity_rows(t + 1, k);
  seed_node_messages_from(t + 1, k, seed_exemplar);
  if (seed_used) *seed_used = seed_exemplar;
  return true;
}

void EapEngine::try_revive_at(int t, const std::vector<int>& e,
                              const std::vector<int>& chosen, int iteration) {
  if (t + 1 >= T_) return;
  for (int k : chosen) {
    if (!is_consensus(k)) continue;
    ConsensusNode& node = registry_.node(k - n_data_);
    if (node.alive[t + 1]) continue;
    if (node.last_death_time != t + 1 || node.last_death_iter != iteration - 1)
      continue;
    if (replicate_to_next(k, t, e, iteration)) {
      // Revived; allow the cascade to continue at the next step of this pass.
      node.last_death_time = t + 2;
      node.last_death_iter = iteration - 1;
    }
  }
}

void EapEngine::lifecycle_at(int t, int iteration) {
  Identification id = identify_at(t);
  std::vector<int>& e = id.assignment;

  if (id.exemplar_set.empty()) {
    // Nothing qualifies as an exemplar right now. Per Alg. 3, unchosen
    // consensus nodes die; revival can undo this if it was transient.
    std::vector<int> none;
    process_deaths_at(t, none, iteration);
    assign_[t] = e;
    chosen_[t].clear();
    return;
  }

  consensus_self_swap_at(t, e, id.exemplar_set);

  std::vector<int> chosen;
  for (int i = 0; i < n_data_; ++i)
    if (slabs_[t].live[i] && e[i] >= 0) chosen.push_back(e[i]);
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  for (int x : chosen) e[x] = x;

  refresh_evolution_at(t, e, chosen);
  process_deaths_at(t, chosen, iteration);
  // Creation happens in the single forward pass after the trigger: nodes are
  // spawned for the data exemplars the basic exchange identified, everywhere
  // they exist over the horizon. Later passes only evolve, kill, or revive
  // them; the initially large crop is pruned by deaths.
  if (!creation_pass_done_) create_consensus_at(t, e, chosen, iteration);

  // Replication of live consensus nodes into t+1 (Alg. 1's second stage),
  // plus duplicate pruning: a node making its first step beyond its birth
  // slab whose fresh mean falls inside another live node's member radius
  // duplicates a cluster that is already represented, so it is culled before
  // it owns any history. Genuinely new clusters (members that defected from
  // somewhere else) land well outside every existing radius and survive.
  std::vector<int> probation;
  if (t + 1 < T_) {
    for (int k = n_data_; k < n_nodes(); ++k) {
      if (!slabs_[t].live[k]) continue;
      ConsensusNode& node = registry_.node(k - n_data_);
      if (node.seeded[t + 1]) continue;
      bool virgin = true;
      for (int u = 0; u < T_; ++u)
        if (u != node.birth_time && node.seeded[u]) virgin = false;
      if (!replicate_to_next(k, t, e, iteration)) continue;
      if (virgin) probation.push_back(k);
    }
  } else {
    // Last slab: newly created nodes cannot extend, so they face the radius
    // test right where they were born.
    for (int k = n_data_; k < n_nodes(); ++k) {
      if (!slabs_[t].live[k]) continue;
      const ConsensusNode& node = registry_.node(k - n_data_);
      if (node.birth_time == t && node.birth_iteration == iteration)
        probation.push_back(k);
    }
  }
  const int probe_t = t + 1 < T_ ? t + 1 : t;
  for (int k : probation) {
    if (!slabs_[t].live[k]) continue;  // culled in favor of an earlier one
    const TimeSlab& sl = slabs_[probe_t];
    int absorber = -1;
    double closest = -kInf;
    for (int r = n_data_; r < n_nodes(); ++r) {
      if (r == k || !sl.live[r]) continue;
      // radius = the similarity of the rival's 90th-percentile member: wide
      // enough to cover a split-off half of the same cluster, but without
      // the extreme tail through which an elongated cluster could swallow a
      // neighboring one. Members whose snapshot exemplar is not the one the
      // rival inherited here are a defecting group in transit, not part of
      // the rival's cluster body, and are left out of the radius.
      int src = -1;
      for (const auto& [from, to] : sl.seeded_from)
        if (to == r) src = from;
      std::vector<double> sims;
      for (int j = 0; j < n_data_; ++j) {
        if (!sl.live[j] || !slabs_[t].live[j]) continue;
        if (e[j] != r) continue;
        if (src >= 0 && assign_[probe_t][j] != src) continue;
        sims.push_back(sl.sim(j, r));
      }
      if (sims.empty()) continue;
      std::size_t q = sims.size() / 10;
      std::nth_element(sims.begin(), sims.begin() + q, sims.end());
      double radius = sims[q];
      if (sl.sim(k, r) >= radius && sl.sim(k, r) > closest) {
        closest = sl.sim(k, r);
        absorber = r;
      }
    }
    if (absorber < 0) continue;
    ConsensusNode& culled = registry_.node(k - n_data_);
    for (int u = 0; u < T_; ++u) {
      if (culled.alive[u]) slabs_[u].live[k] = 0;
      culled.alive[u] = 0;
    }
    culled.last_death_time = -1;  // never really lived; not revivable
    culled.last_death_iter = -1;
    for (int j = 0; j < n_nodes(); ++j)
      if (e[j] == k) e[j] = absorber;
    for (auto pos = chosen.begin(); pos != chosen.end();) {
      if (*pos == k)
        pos = chosen.erase(pos);
      else
        ++pos;
    }
    if (!std::binary_search(chosen.begin(), chosen.end(), absorber)) {
      chosen.push_back(absorber);
      std::sort(chosen.begin(), chosen.end());
    }
  }

  assign_[t] = e;
  chosen_[t] = chosen;
  try_revive_at(t, e, chosen, iteration);
}

void EapEngine::forward_pass(int iteration) {
  for (int t = 0; t < T_; ++t) {
    if (t >= 1) {
      update_delta_at(t);
      if (cfg_.enable_activity_seeding && !activity_.insertions[t].empty()) {
        for (int b : activity_.insertions[t]) {
          std::optional<int> nn;
          if (iteration == 1) {
            nn = nn_by_similarity(slabs_[t].sim, b, activity_.both_prev[t]);
          } else {
            nn = nn_by_messages(slabs_[t].alpha, slabs_[t].rho,
                                slabs_[t].delta, slabs_[t].phi, b,
                                activity_.both_prev[t],
                                activity_.both_prev[t]);
          }
          // No prior-active neighbor: keep zero-initialized deltas.
          if (nn) copy_message_rows(slabs_[t].delta, b, *nn, slabs_[t].live);
        }
      }
    }
    update_rho_at(t);
    update_alpha_at(t);
    if (lifecycle_on_) lifecycle_at(t, iteration);
  }
  if (lifecycle_on_) creation_pass_done_ = true;
  if (bound_audit_) check_bounds_after_sweep(true);
}

void EapEngine::backward_pass(int iteration) {
  (void)iteration;
  for (int t = T_ - 1; t >= 0; --t) {
    if (t + 1 < T_) {
      update_phi_at(t);
      if (cfg_.enable_activity_seeding && !activity_.deletions[t].empty()) {
        for (int d : activity_.deletions[t]) {
          std::optional<int> nn = nn_by_messages(
              slabs_[t].alpha, slabs_[t].rho, slabs_[t].delta, slabs_[t].phi,
              d, activity_.both_next[t], activity_.both_next[t]);
          if (nn) copy_message_rows(slabs_[t].phi, d, *nn, slabs_[t].live);
        }
      }
    }
    update_rho_at(t);
    update_alpha_at(t);
  }
  if (bound_audit_) check_bounds_after_sweep(false);
}

void EapEngine::check_bounds_after_sweep(bool) {
  const double lo = -cfg_.gamma + cfg_.omega;
  const double eps = 1e-12;
  for (int t = 0; t < T_; ++t) {
    const TimeSlab& sl = slabs_[t];
    for (int j = 0; j < n_nodes(); ++j) {
      if (!sl.live[j]) continue;
      // delta[t] bounds use membership at t; phi[t] uses membership at t+1.
      double hi_delta =
          cfg_.gamma - (is_consensus(j) ? 0.0 : cfg_.omega);
      bool consensus_next = t + 1 < T_ && is_consensus(j) &&
                            slabs_[t + 1].live[j];
      double hi_phi = cfg_.gamma - (consensus_next ? 0.0 : cfg_.omega);
      for (int i = 0; i < n_nodes(); ++i) {
        if (!sl.live[i]) continue;
        double dv = sl.delta(i, j);
        double pv = sl.phi(i, j);
        if (dv < lo - eps || dv > hi_delta + eps) ++bound_violations_;
        if (pv < lo - eps || pv > hi_phi + eps) ++bound_violations_;
      }
    }
  }
}

bool EapEngine::step() {
  ++iteration_;
  forward_pass(iteration_);
  backward_pass(iteration_);
  if (!lifecycle_on_) {
    refresh_assignments();
    // Fire the creation pass once the two-exemplars-everywhere condition has
    // held for a few consecutive iterations: exemplar sets cross the
    // threshold raggedly, and clusters whose exemplars are still emerging
    // (new groups at late time steps) need the extra sweeps to show up in
    // the snapshot the nodes are created from.
    if (consensus_allowed_ && creation_trigger()) {
      if (++trigger_stable_ >= 6) lifecycle_on_ = true;
    } else {
      trigger_stable_ = 0;
    }
  }
  const std::vector<int>& cur = assign_[T_ - 1];
  bool any = false;
  for (int i = 0; i < n_data_; ++i)
    if (cur[i] >= 0) any = true;
  if (any && cur == prev_last_) {
    if (++stable_ >= cfg_.conv_window) converged_ = true;
  } else {
    stable_ = 0;
  }
  prev_last_ = cur;
  return converged_;
}

ClusteringSolution EapEngine::run() {
  while (iteration_ < cfg_.max_iter && !step()) {
  }

  // Assemble the solution from the final assignment snapshots.
  ClusteringSolution sol;
  sol.point_ids = ds_.point_ids();
  sol.time_steps = T_;
  sol.iterations = iteration_;
  sol.converged = converged_;
  sol.exemplar_label.assign(T_, std::vector<std::string>(n_data_, ""));
  sol.track_of_point.assign(T_, std::vector<int>(n_data_, -1));

  auto label_of = [&](int node) {
    return is_consensus(node) ? "c" + std::to_string(node - n_data_)
                              : ds_.point_ids()[node];
  };

  for (int t = 0; t < T_; ++t) {
    for (int i = 0; i < n_data_; ++i) {
      if (!ds_.active(t, i)) continue;
      int ex = assign_[t][i];
      if (ex < 0)
        fail(ErrorKind::NoExemplar,
             "no exemplar for point " + ds_.point_ids()[i] + " at t=" +
                 std::to_string(t + 1) + " after " +
                 std::to_string(iteration_) + " iteration(s)");
      sol.exemplar_label[t][i] = label_of(ex);
    }
  }

  // Tracks: maximal contiguous service spans per exemplar node.
  std::map<int, int> open;          // node id -> track index
  std::vector<int> track_node;      // track index -> node id
  for (int t = 0; t < T_; ++t) {
    std::set<int> present;
    for (int i = 0; i < n_data_; ++i)
      if (ds_.active(t, i)) present.insert(assign_[t][i]);
    for (auto it = open.begin(); it != open.end();) {
      if (!present.count(it->first))
        it = open.erase(it);
      else
        ++it;
    }
    for (int node : present) {
      if (!open.count(node)) {
        Track tr;
        tr.id = label_of(node);
        tr.is_consensus = is_consensus(node);
        tr.birth_t = t + 1;
        tr.death_t = t + 1;
        if (tr.is_consensus)
          tr.parent_exemplar =
              ds_.point_ids()[registry_.node(node - n_data_).parent];
        open[node] = static_cast<int>(sol.tracks.size());
        track_node.push_back(node);
        sol.tracks.push_back(tr);
      }
      sol.tracks[open[node]].death_t = t + 1;
    }
    for (int i = 0; i < n_data_; ++i)
      if (ds_.active(t, i)) sol.track_of_point[t][i] = open[assign_[t][i]];
  }
  for (std::size_t idx = 0; idx < sol.tracks.size(); ++idx) {
    Track& tr = sol.tracks[idx];
    if (!tr.is_consensus) continue;
    const ConsensusNode& node = registry_.node(track_node[idx] - n_data_);
    for (int t = tr.birth_t - 1; t <= tr.death_t - 1; ++t)
      tr.features.push_back(node.features[t]);
  }
  return sol;
}

ClusteringSolution run_eap(const DatasetSeries& ds, const SimilarityTensor& sim,
                           const EapConfig& cfg) {
  EapEngine engine(ds, sim, cfg);
  return engine.run();
}

ClusteringSolution run_static_ap(const DatasetSeries& ds,
                                 const SimilarityTensor& sim,
                                 const EapConfig& cfg) {
  cfg.validate();
  ds.validate();
  if (!sim.preferences_set())
    fail(ErrorKind::Config, "preferences not set on the similarity tensor");
  const int T = ds.time_steps();
  const int n = ds.n_points();

  ClusteringSolution sol;
  sol.point_ids = ds.point_ids();
  sol.time_steps = T;
  sol.converged = true;
  sol.exemplar_label.assign(T, std::vector<std::string>(n, ""));
  sol.track_of_point.assign(T, std::vector<int>(n, -1));

  ApConfig ap{cfg.lambda, cfg.max_iter, cfg.conv_window};
  for (int t = 0; t < T; ++t) {
    std::vector<std::uint8_t> live(n, 0);
    bool anybody = false;
    for (int i = 0; i < n; ++i) {
      live[i] = ds.active(t, i) ? 1 : 0;
      anybody = anybody || live[i];
    }
    if (!anybody) continue;
    ApResult r = run_ap(sim.at(t), ap, &live);
    sol.iterations = std::max(sol.iterations, r.iterations);
    sol.converged = sol.converged && r.converged;
    for (int i = 0; i < n; ++i)
      if (r.exemplar[i] >= 0)
        sol.exemplar_label[t][i] = ds.point_ids()[r.exemplar[i]];
  }

  std::map<std::string, int> open;
  for (int t = 0; t < T; ++t) {
    std::set<std::string> present;
    for (int i = 0; i < n; ++i)
      if (!sol.exemplar_label[t][i].empty())
        present.insert(sol.exemplar_label[t][i]);
    for (auto it = open.begin(); it != open.end();) {
      if (!present.count(it->first))
        it = open.erase(it);
      else
        ++it;
    }
    for (const std::string& label : present) {
      if (!open.count(label)) {
        Track tr;
        tr.id = label;
        tr.is_consensus = false;
        tr.birth_t = t + 1;
        tr.death_t = t + 1;
        open[label] = static_cast<int>(sol.tracks.size());
        sol.tracks.push_back(tr);
      }
      sol.tracks[open[label]].death_t = t + 1;
    }
    for (int i = 0; i < n; ++i)
      if (!sol.exemplar_label[t][i].empty())
        sol.track_of_point[t][i] = open[sol.exemplar_label[t][i]];
  }
  return sol;
}

}  // namespace eap
