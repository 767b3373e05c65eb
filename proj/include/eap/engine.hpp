#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "eap/activity.hpp"
#include "eap/dataset.hpp"
#include "eap/matrix.hpp"
#include "eap/similarity.hpp"
#include "eap/solution.hpp"

namespace eap {

struct EapConfig {
  double gamma = 2.0;   // temporal smoothness penalty, >= 0
  double omega = 1.0;   // consensus reward, 0 <= omega <= gamma
  double lambda = 0.9;  // damping, in [0, 1)
  int max_iter = 500;
  int conv_window = 20;       // iterations with a stable last-step assignment
  int min_cluster_size = 1;   // consensus creation threshold
  bool enable_consensus = true;
  bool enable_activity_seeding = true;
  std::uint64_t seed = 0;  // echoed into results; the engine is deterministic

  void validate() const;
};

/// One consensus node: a synthetic exemplar whose feature vector is its
/// members' mean and whose alive interval defines a cluster track.
struct ConsensusNode {
  int node_id = -1;  // global index, >= n_data
  int parent = -1;   // data point whose exemplar role it took over
  int birth_time = -1;
  int birth_iteration = 0;
  std::vector<std::uint8_t> alive;   // per t
  std::vector<std::uint8_t> seeded;  // per t: messages/features established
  std::vector<std::vector<double>> features;  // per t (empty if never seeded)
  // Most recent death event, for the adjacent-iteration revival rule.
  int last_death_time = -1;
  int last_death_iter = -1;
};

class ConsensusRegistry {
 public:
  int size() const { return static_cast<int>(nodes_.size()); }
  bool empty() const { return nodes_.empty(); }
  const ConsensusNode& node(int k) const { return nodes_[k]; }
  ConsensusNode& node(int k) { return nodes_[k]; }
  int add(ConsensusNode n) {
    nodes_.push_back(std::move(n));
    return size() - 1;
  }

 private:
  std::vector<ConsensusNode> nodes_;
};

/// Output of exemplar identification at one time step (Eq. 13 threshold, then
/// consensus-preferring assignment).
struct Identification {
  std::vector<int> exemplar_set;  // self-sum > 0, sorted ascending
  std::vector<int> assignment;    // per node id; -1 for non-live nodes
};

/// The EAP forward-backward message engine with the consensus-node lifecycle
/// and insertion/deletion handling.
///
/// Index conventions (0-based time):
///   delta[t] couples t-1 -> t; delta[0] stays 0.  Consensus membership for
///   its reward/bounds is taken at t.
///   phi[t] couples t <- t+1; phi[T-1] stays 0.  Membership is taken at t+1.
/// Both are updated only for pairs live (and edge-connected) at both coupled
/// steps; entries without a counterpart keep their seeded or zero value.
class EapEngine {
 public:
  EapEngine(const DatasetSeries& ds, const SimilarityTensor& sim,
            const EapConfig& cfg);

  ClusteringSolution run();

  /// One full iteration: forward pass, backward pass, snapshot refresh and
  /// trigger/convergence bookkeeping. Returns true once converged.
  bool step();

  // --- sweep steps (public for white-box tests) ---
  void update_delta_at(int t);
  void update_phi_at(int t);
  void update_rho_at(int t);
  void update_alpha_at(int t);
  void forward_pass(int iteration);
  void backward_pass(int iteration);
  /// Refresh the pure-identification snapshot at every t (no lifecycle).
  void refresh_assignments();

  Identification identify_at(int t) const;
  /// True when every time step's current exemplar set has >= 2 members and no
  /// consensus nodes exist yet.
  bool creation_trigger() const;

  // --- lifecycle pieces, applied at time t (public for white-box tests) ---
  void lifecycle_at(int t, int iteration);
  void consensus_self_swap_at(int t, std::vector<int>& e,
                              std::vector<int>& chosen);
  void refresh_evolution_at(int t, const std::vector<int>& e,
                            const std::vector<int>& chosen);
  void process_deaths_at(int t, const std::vector<int>& chosen, int iteration);
  void create_consensus_at(int t, std::vector<int>& e,
                           std::vector<int>& chosen, int iteration);
  /// Seed node k's messages/features at t+1 from the most common exemplar of
  /// its time-t members (Alg. 1's replication recipe). Returns false when no
  /// member is active at t+1 or no live seed exemplar exists. seed_used, when
  /// non-null, receives the exemplar the messages were copied from.
  bool replicate_to_next(int k, int t, const std::vector<int>& e,
                         int iteration, int* seed_used = nullptr);
  void try_revive_at(int t, const std::vector<int>& e,
                     const std::vector<int>& chosen, int iteration);

  // --- state access ---
  int n_data() const { return n_data_; }
  int n_nodes() const { return n_data_ + registry_.size(); }
  int time_steps() const { return T_; }
  bool is_consensus(int id) const { return id >= n_data_; }
  bool node_live(int t, int id) const { return slabs_[t].live[id] != 0; }
  const std::vector<std::uint8_t>& live_mask(int t) const {
    return slabs_[t].live;
  }
  const Matrix& alpha(int t) const { return slabs_[t].alpha; }
  const Matrix& rho(int t) const { return slabs_[t].rho; }
  const Matrix& delta(int t) const { return slabs_[t].delta; }
  const Matrix& phi(int t) const { return slabs_[t].phi; }
  const Matrix& sim(int t) const { return slabs_[t].sim; }
  const ConsensusRegistry& registry() const { return registry_; }
  const std::vector<int>& assignment(int t) const { return assign_[t]; }
  const std::vector<int>& chosen_exemplars(int t) const { return chosen_[t]; }
  bool lifecycle_active() const { return lifecycle_on_; }
  int iterations_run() const { return iteration_; }

  // --- instrumentation ---
  struct Counters {
    long delta = 0, phi = 0, rho = 0, alpha = 0;
    void reset() { delta = phi = rho = alpha = 0; }
    long total() const { return delta + phi + rho + alpha; }
  };
  Counters& counters() { return counters_; }

  /// Arm the matrix access audit: any read/write of a message entry whose row
  /// or column is not live at that t counts as a violation.
  void arm_activity_audit();
  long activity_audit_violations() const { return audit_violations_; }

  /// Check delta/phi bounds after every sweep; violations are counted.
  void enable_bound_audit(bool on) { bound_audit_ = on; }
  long bound_violations() const { return bound_violations_; }

 private:
  struct TimeSlab {
    Matrix alpha, rho, delta, phi, sim;
    std::vector<std::uint8_t> live;
    // which node last inherited each exemplar's messages here; a cluster
    // whose exemplar was just absorbed is already represented
    std::map<int, int> seeded_from;
  };

  double message_sum(int t, int i, int j) const {
    const TimeSlab& sl = slabs_[t];
    return sl.alpha(i, j) + sl.rho(i, j) + sl.delta(i, j) + sl.phi(i, j);
  }
  double effective_omega() const { return cfg_.omega; }
  bool edge_present(int t, int i, int j) const {
    return i == j || slabs_[t].sim(i, j) !=
                         -std::numeric_limits<double>::infinity();
  }
  const double* node_features(int t, int id) const;
  void refresh_similarity_rows(int t, int id);
  void grow_node_space();
  void seed_node_messages_from(int t, int dst, int src);
  void death_event(int k, int t, int iteration);
  void rearm_audit();
  void check_bounds_after_sweep(bool forward);
  std::vector<int> live_data_at(int t) const;

  DatasetSeries ds_;
  EapConfig cfg_;
  int n_data_ = 0;
  int T_ = 0;
  std::vector<TimeSlab> slabs_;
  std::vector<double> pref_;  // per-t preference from the input diagonal
  ActivitySets activity_;
  ConsensusRegistry registry_;

  std::vector<std::vector<int>> assign_;  // per t, per node id (-1 unassigned)
  std::vector<std::vector<int>> chosen_;  // per t, sorted exemplar ids
  bool lifecycle_on_ = false;
  bool creation_pass_done_ = false;
  bool consensus_allowed_ = false;
  int trigger_stable_ = 0;
  int iteration_ = 0;
  bool converged_ = false;
  int stable_ = 0;
  std::vector<int> prev_last_;

  Matrix scratch_;  // s + delta + phi, rebuilt before each rho sweep
  Counters counters_;
  bool activity_audit_ = false;
  long audit_violations_ = 0;
  bool bound_audit_ = false;
  long bound_violations_ = 0;
};

/// Convenience wrapper: validate, construct, run.
ClusteringSolution run_eap(const DatasetSeries& ds, const SimilarityTensor& sim,
                           const EapConfig& cfg);

/// Per-time independent static AP over the same inputs, packaged as a
/// ClusteringSolution (tracks are data exemplars; no cross-time identity).
ClusteringSolution run_static_ap(const DatasetSeries& ds,
                                 const SimilarityTensor& sim,
                                 const EapConfig& cfg);

}  // namespace eap
