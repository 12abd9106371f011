#ifndef STOCHKIN_TESTS_PATH_ENUM_HPP
#define STOCHKIN_TESTS_PATH_ENUM_HPP

// Test-only bridge oracle by explicit path enumeration: transition
// probabilities are built from the jump-count decomposition
//   f_0(a->b, t) = [a==b] exp(-q_a t)
//   f_k(a->b, t) = sum_c integral_0^t q_ac exp(-q_a u) f_{k-1}(c->b, t-u) du
// with the time integrals evaluated by trapezoid quadrature on a uniform
// grid. Valid when the probability of more than max_jumps jumps in the
// window is negligible; independent of both the uniformization solver and
// the simulator.

#include <cmath>
#include <cstddef>
#include <vector>

#include "stochkin/cme.hpp"
#include "stochkin/network.hpp"

namespace test_support {

class PathEnumOracle {
 public:
  PathEnumOracle(const stochkin::ReactionNetwork& network,
                 const stochkin::RateParams& theta,
                 const stochkin::StateSpace& space, double horizon,
                 std::size_t max_jumps = 6, std::size_t grid_points = 1024)
      : n_(space.size()), grid_(grid_points + 1), h_(horizon / grid_points) {
    // Dense rates.
    rate_.assign(n_, std::vector<double>(n_, 0.0));
    exit_.assign(n_, 0.0);
    for (std::size_t s = 0; s < n_; ++s) {
      const auto& x = space.states[s];
      for (std::size_t j = 0; j < network.reaction_count(); ++j) {
        const double a =
            theta.theta[j] * stochkin::hazard(network.reactions[j], x);
        if (a <= 0.0) continue;
        stochkin::SpeciesState y = x;
        for (const auto& [i, d] : network.reactions[j].change_terms) y[i] += d;
        const auto target = space.find(y);
        if (!target) continue;
        rate_[s][*target] += a;
        exit_[s] += a;
      }
    }

    // f[k][a][b][g], accumulated into total_ = sum over k.
    using Grid = std::vector<double>;
    std::vector<std::vector<Grid>> prev(n_, std::vector<Grid>(n_, Grid(grid_, 0.0)));
    total_ = prev;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t g = 0; g < grid_; ++g) {
        prev[a][a][g] = std::exp(-exit_[a] * h_ * double(g));
        total_[a][a][g] = prev[a][a][g];
      }

    std::vector<std::vector<Grid>> next = prev;
    for (std::size_t k = 1; k <= max_jumps; ++k) {
      for (std::size_t a = 0; a < n_; ++a) {
        for (std::size_t b = 0; b < n_; ++b) {
          Grid& out = next[a][b];
          for (std::size_t g = 0; g < grid_; ++g) {
            double integral = 0.0;
            for (std::size_t c = 0; c < n_; ++c) {
              if (rate_[a][c] == 0.0) continue;
              // trapezoid over u in [0, g h]
              double acc = 0.0;
              for (std::size_t i = 0; i <= g; ++i) {
                const double value = std::exp(-exit_[a] * h_ * double(i)) *
                                     prev[c][b][g - i];
                acc += (i == 0 || i == g) ? 0.5 * value : value;
              }
              integral += rate_[a][c] * acc * h_;
            }
            out[g] = integral;
          }
        }
      }
      for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b)
          for (std::size_t g = 0; g < grid_; ++g)
            total_[a][b][g] += next[a][b][g];
      prev.swap(next);
    }
  }

  /// P(X_t = b, at most max_jumps jumps | X_0 = a) with t a multiple of the
  /// grid step (rounded to the nearest grid point).
  double transition(std::size_t a, std::size_t b, double t) const {
    const auto g = static_cast<std::size_t>(std::lround(t / h_));
    return total_[a][b][g];
  }

  /// Bridge law at interior time s given endpoints, normalized over states.
  std::vector<double> bridge(std::size_t from, std::size_t to, double dt,
                             double s) const {
    std::vector<double> out(n_, 0.0);
    double norm = 0.0;
    for (std::size_t z = 0; z < n_; ++z) {
      out[z] = transition(from, z, s) * transition(z, to, dt - s);
      norm += out[z];
    }
    for (double& v : out) v /= norm;
    return out;
  }

 private:
  std::size_t n_;
  std::size_t grid_;
  double h_;
  std::vector<std::vector<double>> rate_;
  std::vector<double> exit_;
  std::vector<std::vector<std::vector<double>>> total_;
};

}  // namespace test_support

#endif
