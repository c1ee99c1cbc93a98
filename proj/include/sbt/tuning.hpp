#pragma once

// Optimal (alpha, beta) design: minimize a discretization loss over the box
// 0.5 <= alpha <= 1, beta_min <= beta <= beta_max.

#include <string>
#include <vector>

#include "sbt/analysis.hpp"
#include "sbt/controllers.hpp"

namespace sbt {

enum class LossKind { mag_rmse_db, mag_rmse_linear, pole_distance };

std::string loss_kind_name(LossKind k);
LossKind parse_loss_kind(const std::string& name);

struct LossConfig {
  FrequencyGrid grid = default_grid();
  LossKind kind = LossKind::mag_rmse_db;
  std::vector<double> weights;  // optional, one per grid point

  void validate() const;
};

struct SearchConfig {
  double alpha_min = 0.5;
  double alpha_max = 1.0;
  double beta_min = 0.9;
  double beta_max = 1.1;
  int coarse_grid = 41;   // points per axis
  int refine_iters = 40;  // golden-section iterations per axis line search

  void validate() const;
};

struct LossValue {
  double value;
  bool unstable;  // a discrete pole lies outside the unit circle
};

LossValue q_loss(double alpha, double beta, const QrParams& p, double sample_time, const LossConfig& cfg);

struct TraceEntry {
  enum class Phase { coarse, seed, refine };
  Phase phase;
  double alpha;
  double beta;
  double loss;
  double best_loss;  // running minimum, non-increasing
};

struct OptimizeResult {
  double alpha;
  double beta;
  double loss_value;
  double straightforward_loss;      // NaN when (0.5, K_pw) lies outside the box
  bool straightforward_kept;        // the search did not beat (0.5, K_pw)
  std::vector<TraceEntry> trace;
};

/// Coarse grid scan, then alternating per-axis golden-section refinement
/// around the incumbent. The straightforward pair is evaluated whenever it is
/// feasible, so the result never loses to it. Fully deterministic.
OptimizeResult optimize_alpha_beta(const QrParams& p, double sample_time, const LossConfig& loss,
                                   const SearchConfig& search);

}  // namespace sbt
