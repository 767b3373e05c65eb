#include "eap/ap_kernels.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace eap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

long responsibility_sweep(Matrix& rho, const Matrix& base, const Matrix& alpha,
                          const std::vector<std::uint8_t>& live,
                          double lambda) {
  const int n = rho.dim();
  long written = 0;
  for (int i = 0; i < n; ++i) {
    if (!live[i]) continue;
    // Largest and second-largest candidate value over the row, so that
    // max_{k != j} is max1 except at the argmax column.
    double max1 = -kInf, max2 = -kInf;
    int arg1 = -1;
    int candidates = 0;
    for (int k = 0; k < n; ++k) {
      if (!live[k]) continue;
      double b = base(i, k);
      if (b == -kInf) continue;
      double v = alpha(i, k) + b;
      ++candidates;
      if (v > max1) {
        max2 = max1;
        max1 = v;
        arg1 = k;
      } else if (v > max2) {
        max2 = v;
      }
    }
    if (candidates < 2) continue;
    for (int j = 0; j < n; ++j) {
      if (!live[j]) continue;
      double b = base(i, j);
      if (b == -kInf) continue;
      double competitor = (j == arg1) ? max2 : max1;
      rho(i, j) = lambda * rho(i, j) + (1.0 - lambda) * (b - competitor);
      ++written;
    }
  }
  return written;
}

long availability_sweep(Matrix& alpha, const Matrix& rho, const Matrix& base,
                        const std::vector<std::uint8_t>& live, double lambda) {
  const int n = alpha.dim();
  long written = 0;
  for (int j = 0; j < n; ++j) {
    if (!live[j]) continue;
    double pos_sum = 0.0;  // sum over k != j of max(rho_kj, 0)
    for (int k = 0; k < n; ++k) {
      if (k == j || !live[k]) continue;
      if (base(k, j) == -kInf) continue;
      double r = rho(k, j);
      if (r > 0.0) pos_sum += r;
    }
    for (int i = 0; i < n; ++i) {
      if (!live[i]) continue;
      if (base(i, j) == -kInf) continue;
      double next;
      if (i == j) {
        next = pos_sum;
      } else {
        double r = rho(i, j);
        double others = pos_sum - (r > 0.0 ? r : 0.0);
        next = std::min(0.0, rho(j, j) + others);
      }
      alpha(i, j) = lambda * alpha(i, j) + (1.0 - lambda) * next;
      ++written;
    }
  }
  return written;
}

double temporal_message(double v, double gamma, double omega,
                        bool toward_consensus) {
  const double low = -gamma + (toward_consensus ? 0.0 : omega);
  const bool d1 = gamma - omega >= v;
  const bool d2 = low >= v;
  if (d1 && d2) return -gamma + omega;
  if (d1 && !d2) return (toward_consensus ? omega : 0.0) + v;
  if (!d1 && d2) {
    // Unreachable for gamma >= omega >= 0; kept for completeness.
    assert(!(gamma >= omega && omega >= 0.0));
    return -v;
  }
  return gamma - (toward_consensus ? 0.0 : omega);
}

int temporal_branch(double v, double gamma, double omega,
                    bool toward_consensus) {
  const double low = -gamma + (toward_consensus ? 0.0 : omega);
  const bool d1 = gamma - omega >= v;
  const bool d2 = low >= v;
  if (d1 && d2) return 0;
  if (d1) return 1;
  if (d2) return 2;
  return 3;
}

}  // namespace eap
