#include "eap/static_ap.hpp"

#include <cmath>
#include <limits>

#include "eap/ap_kernels.hpp"
#include "eap/errors.hpp"

namespace eap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void update_responsibilities(ApMessages& msgs, const Matrix& s,
                             const std::vector<std::uint8_t>& live) {
  responsibility_sweep(msgs.rho, s, msgs.alpha, live, msgs.lambda);
}

void update_availabilities(ApMessages& msgs, const Matrix& s,
                           const std::vector<std::uint8_t>& live) {
  availability_sweep(msgs.alpha, msgs.rho, s, live, msgs.lambda);
}

ApResult run_ap(const Matrix& s, const ApConfig& cfg,
                const std::vector<std::uint8_t>* live_in) {
  const int n = s.dim();
  std::vector<std::uint8_t> live =
      live_in ? *live_in : std::vector<std::uint8_t>(n, 1);

  ApResult res;
  res.exemplar.assign(n, -1);

  std::vector<int> live_idx;
  for (int i = 0; i < n; ++i)
    if (live[i]) live_idx.push_back(i);
  if (live_idx.empty())
    fail(ErrorKind::NoExemplar, "run_ap: no live points");
  for (int i : live_idx)
    if (!std::isfinite(s(i, i)))
      fail(ErrorKind::Config,
           "run_ap: preference not set for point " + std::to_string(i));

  if (live_idx.size() == 1) {
    // Degenerate max over an empty candidate set; the point is its own
    // exemplar by definition.
    res.exemplar[live_idx[0]] = live_idx[0];
    res.exemplar_set = {live_idx[0]};
    res.converged = true;
    return res;
  }

  ApMessages msgs(n, cfg.lambda);
  std::vector<int> prev_set;
  int stable = 0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    update_responsibilities(msgs, s, live);
    update_availabilities(msgs, s, live);
    res.iterations = it;

    std::vector<int> cur_set;
    for (int j : live_idx)
      if (msgs.rho(j, j) + msgs.alpha(j, j) > 0.0) cur_set.push_back(j);
    if (!cur_set.empty() && cur_set == prev_set) {
      if (++stable >= cfg.conv_window) {
        res.converged = true;
        prev_set = cur_set;
        break;
      }
    } else {
      stable = 0;
    }
    prev_set = cur_set;
  }

  if (prev_set.empty())
    fail(ErrorKind::NoExemplar,
         "run_ap: empty exemplar set (preferences may be too low)");
  res.exemplar_set = prev_set;

  for (int i : live_idx) {
    double best = -kInf;
    int arg = -1;
    for (int j : res.exemplar_set) {
      if (s(i, j) == -kInf && i != j) continue;  // absent edge in sparse mode
      double v = msgs.rho(i, j) + msgs.alpha(i, j);
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    if (arg < 0)
      fail(ErrorKind::NoExemplar,
           "run_ap: point " + std::to_string(i) + " has no reachable exemplar");
    res.exemplar[i] = arg;
  }
  for (int j : res.exemplar_set) res.exemplar[j] = j;
  return res;
}

}  // namespace eap
