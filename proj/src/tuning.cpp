#include "sbt/tuning.hpp"

#include <cmath>
#include <limits>

namespace sbt {

std::string loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::mag_rmse_db:
      return "mag-rmse-db";
    case LossKind::mag_rmse_linear:
      return "mag-rmse-linear";
    case LossKind::pole_distance:
      return "pole-distance";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "mag-rmse-db" || name == "mag_rmse_db") return LossKind::mag_rmse_db;
  if (name == "mag-rmse-linear" || name == "mag_rmse_linear") return LossKind::mag_rmse_linear;
  if (name == "pole-distance" || name == "pole_distance") return LossKind::pole_distance;
  throw ParamError("unknown loss kind '" + name + "'");
}

void LossConfig::validate() const {
  if (weights.empty()) return;
  if (weights.size() != grid.size()) throw ParamError("loss weights must match the grid length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParamError("loss weights must be finite and non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ParamError("loss weights must have a positive sum");
}

void SearchConfig::validate() const {
  if (!(alpha_min >= 0.5 && alpha_max <= 1.0 && alpha_min <= alpha_max))
    throw ParamError("alpha range must satisfy 0.5 <= alpha_min <= alpha_max <= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max) || !std::isfinite(beta_max))
    throw ParamError("beta range must satisfy 0 < beta_min <= beta_max");
  if (coarse_grid < 3) throw ParamError("coarse grid needs at least 3 points per axis");
  if (refine_iters < 0) throw ParamError("refine_iters must be >= 0");
}

namespace {

double weighted_rms(const std::vector<double>& errs, const std::vector<double>& weights) {
  if (weights.empty()) return rmse(errs);
  double acc = 0.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    acc += weights[i] * errs[i] * errs[i];
    wsum += weights[i];
  }
  return std::sqrt(acc / wsum);
}

}  // namespace

LossValue q_loss(double alpha, double beta, const QrParams& p, double sample_time, const LossConfig& cfg) {
  cfg.validate();
  const SbtParams params(alpha, beta);
  const BiquadCoeffs c = qr_discretize(p, method::Sbt{params}, sample_time);
  bool unstable = false;
  for (const auto& r : quadratic_roots(Polynomiald{c.b0, c.b1, c.b2}))
    if (std::abs(r) > 1.0 + 1e-12) unstable = true;

  if (cfg.kind == LossKind::pole_distance) {
    const ComplexPoint s0 = source_poles(p, sample_time).original;
    const ComplexPoint s_eq = equivalent_s_of_z(sbt_z_of_s(s0, params, sample_time), sample_time);
    return {std::abs(s_eq - s0) / p.omega_n, unstable};
  }

  const RationalTransferd analog = qr_continuous(p);
  const RationalTransferd discrete = c.to_transfer(sample_time);
  cfg.grid.check_below_nyquist(sample_time);
  std::vector<double> errs;
  errs.reserve(cfg.grid.size());
  for (double f : cfg.grid.hz()) {
    const double ma = std::abs(response_at(analog, f));
    const double md = std::abs(response_at(discrete, f));
    errs.push_back(cfg.kind == LossKind::mag_rmse_db ? 20.0 * std::log10(ma / md) : ma - md);
  }
  return {weighted_rms(errs, cfg.weights), unstable};
}

namespace {

class Search {
 public:
  Search(const QrParams& p, double t, const LossConfig& cfg) : p_(p), t_(t), cfg_(cfg) {}

  double eval(TraceEntry::Phase phase, double a, double b) {
    const double loss = q_loss(a, b, p_, t_, cfg_).value;
    if (loss < best_loss_) {
      best_loss_ = loss;
      best_a_ = a;
      best_b_ = b;
    }
    trace_.push_back({phase, a, b, loss, best_loss_});
    return loss;
  }

  // Golden-section line search over [lo, hi] along one axis.
  void line_search(bool along_alpha, double lo, double hi, int iters) {
    if (!(hi > lo) || iters <= 0) return;
    const double a0 = best_a_;
    const double b0 = best_b_;
    auto f = [&](double x) {
      return along_alpha ? eval(TraceEntry::Phase::refine, x, b0) : eval(TraceEntry::Phase::refine, a0, x);
    };
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 2; i < iters; ++i) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = f(x2);
      }
    }
  }

  double best_a_ = std::numeric_limits<double>::quiet_NaN();
  double best_b_ = std::numeric_limits<double>::quiet_NaN();
  double best_loss_ = std::numeric_limits<double>::infinity();
  std::vector<TraceEntry> trace_;

 private:
  const QrParams& p_;
  double t_;
  const LossConfig& cfg_;
};

double lerp(double lo, double hi, int i, int n) { return n == 1 ? lo : (i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1)); }

}  // namespace

OptimizeResult optimize_alpha_beta(const QrParams& p, double sample_time, const LossConfig& loss,
                                   const SearchConfig& search) {
  p.validate();
  loss.validate();
  search.validate();

  Search s(p, sample_time, loss);
  const int na = search.alpha_min == search.alpha_max ? 1 : search.coarse_grid;
  const int nb = search.beta_min == search.beta_max ? 1 : search.coarse_grid;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      s.eval(TraceEntry::Phase::coarse, lerp(search.alpha_min, search.alpha_max, i, na),
             lerp(search.beta_min, search.beta_max, j, nb));

  const SbtParams sf = sbt_params_straightforward(p, sample_time);
  double sf_loss = std::numeric_limits<double>::quiet_NaN();
  const bool sf_feasible = sf.alpha() >= search.alpha_min && sf.alpha() <= search.alpha_max &&
                           sf.beta() >= search.beta_min && sf.beta() <= search.beta_max;
  if (sf_feasible) sf_loss = s.eval(TraceEntry::Phase::seed, sf.alpha(), sf.beta());

  const double da = na > 1 ? (search.alpha_max - search.alpha_min) / (na - 1) : 0.0;
  const double db = nb > 1 ? (search.beta_max - search.beta_min) / (nb - 1) : 0.0;
  constexpr int kMaxSweeps = 8;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double before = s.best_loss_;
    if (da > 0.0)
      s.line_search(true, std::max(search.alpha_min, s.best_a_ - da), std::min(search.alpha_max, s.best_a_ + da),
                    search.refine_iters);
    if (db > 0.0)
      s.line_search(false, std::max(search.beta_min, s.best_b_ - db), std::min(search.beta_max, s.best_b_ + db),
                    search.refine_iters);
    if (!(s.best_loss_ < before)) break;
  }

  OptimizeResult out;
  out.alpha = s.best_a_;
  out.beta = s.best_b_;
  out.loss_value = s.best_loss_;
  out.straightforward_loss = sf_loss;
  out.straightforward_kept = sf_feasible && out.alpha == sf.alpha() && out.beta == sf.beta();
  out.trace = std::move(s.trace_);
  return out;
}

}  // namespace sbt
