#include "uavtour/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace uavtour {

int LpModel::add_var(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& row : rows) row.push_back(0.0);
  return num_vars++;
}

void LpModel::add_row(Relation rel, double rhs_value,
                      const std::vector<std::pair<int, double>>& terms) {
  std::vector<double> row(static_cast<std::size_t>(num_vars), 0.0);
  for (auto [j, a] : terms) {
    if (j < 0 || j >= num_vars) throw std::invalid_argument("lp: row term out of range");
    row[j] += a;
  }
  rows.push_back(std::move(row));
  relations.push_back(rel);
  rhs.push_back(rhs_value);
}

void LpModel::validate() const {
  const std::size_t n = static_cast<std::size_t>(num_vars);
  if (objective.size() != n || lower.size() != n || upper.size() != n)
    throw std::invalid_argument("lp: variable arrays disagree with num_vars");
  if (rows.size() != relations.size() || rows.size() != rhs.size())
    throw std::invalid_argument("lp: row arrays disagree");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j]))
      throw std::invalid_argument("lp: objective coefficient not finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw std::invalid_argument("lp: crossed or NaN bounds");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("lp: row width mismatch");
    for (double a : rows[i])
      if (!std::isfinite(a)) throw std::invalid_argument("lp: row coefficient not finite");
    if (!std::isfinite(rhs[i])) throw std::invalid_argument("lp: rhs not finite");
  }
}

namespace {

constexpr double kDualTol = 1e-9;  // reduced-cost optimality threshold
constexpr double kPivTol = 1e-9;   // smallest acceptable pivot magnitude

/// Bounded-variable two-phase revised simplex over the slack form
/// [A I] (x,s) = b with slack bounds encoding the row relations.
/// `stable` is the slow fallback mode: Bland's rule from the start and
/// frequent refactorisation, for models where the default pivoting drifted
/// into a near-singular basis.
class Simplex {
public:
  explicit Simplex(const LpModel& model, bool stable = false)
      : model_(model), refactor_every_(stable ? 8 : 64), bland_(stable), stable_(stable) {
    n_ = model.num_vars;
    m_ = static_cast<int>(model.rows.size());
    // Structural columns.
    acols_.assign(n_, std::vector<double>(m_, 0.0));
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) acols_[j][i] = model.rows[i][j];
    lo_ = model.lower;
    hi_ = model.upper;
    // Slack per row: LE -> [0,inf), GE -> (-inf,0], EQ -> [0,0].
    for (int i = 0; i < m_; ++i) {
      switch (model.relations[i]) {
        case Relation::LE: lo_.push_back(0.0); hi_.push_back(kInf); break;
        case Relation::GE: lo_.push_back(-kInf); hi_.push_back(0.0); break;
        case Relation::EQ: lo_.push_back(0.0); hi_.push_back(0.0); break;
      }
    }
    b_ = model.rhs;
    bscale_ = 1.0;
    for (double v : b_) bscale_ = std::max(bscale_, std::abs(v));
  }

  LpOutcome run() {
    reset_for_run();
    build_initial_basis();
    if (!art_row_.empty()) {
      phase1_ = true;
      set_phase1_costs();
      if (!optimize()) {
        throw SolverError("lp: phase-1 subproblem reported unbounded");
      }
      double infeas = 0.0;
      for (std::size_t a = 0; a < art_row_.size(); ++a) infeas += value_of(first_art_ + static_cast<int>(a));
      if (infeas > 1e-7 * bscale_) {
        LpOutcome out;
        out.status = LpStatus::Infeasible;
        out.iterations = iters_;
        return out;
      }
      // Freeze artificials at zero for phase 2.
      for (std::size_t a = 0; a < art_row_.size(); ++a) {
        lo_[first_art_ + a] = 0.0;
        hi_[first_art_ + a] = 0.0;
      }
      phase1_ = false;
    }
    set_phase2_costs();
    if (!optimize()) return make_ray_outcome();
    return make_optimal_outcome();
  }

  /// Re-reads the model's variable bounds (rows and costs cannot change).
  void sync_bounds() {
    for (int j = 0; j < n_; ++j) {
      lo_[j] = model_.lower[j];
      hi_[j] = model_.upper[j];
    }
  }

  /// Snapshot the current basis over structural + slack columns only. Basic
  /// artificials (degenerate leftovers of phase 1, frozen at zero) are first
  /// driven out by zero-step pivots; a row where that fails is linearly
  /// redundant and the snapshot is reported unusable.
  bool snapshot(LpBasis& out) {
    std::vector<double> w;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < first_art_) continue;
      const double* br = &binv_[static_cast<std::size_t>(i) * m_];
      int pick = -1;
      double pmag = 1e-7;
      for (int j = 0; j < first_art_; ++j) {
        if (state_[j] == St::Basic) continue;
        double a;
        if (j < n_) {
          a = 0.0;
          const auto& col = acols_[j];
          for (int t = 0; t < m_; ++t) a += br[t] * col[t];
        } else {
          a = br[j - n_];
        }
        const double mag = std::abs(a);
        if (mag > pmag) {
          pmag = mag;
          pick = j;
        }
      }
      if (pick < 0) {
        out.rows.clear();
        out.cols.clear();
        return false;
      }
      // Zero-step pivot: the artificial sits at zero, so swapping it against
      // `pick` moves nothing — the entering column keeps its bound value.
      ftran(pick, w);
      const double piv = w[i];
      if (std::abs(piv) < 1e-11) {
        out.rows.clear();
        out.cols.clear();
        return false;
      }
      const int leaving = basis_[i];
      state_[leaving] = St::Lower;
      basis_[i] = pick;
      xb_[i] = nb_value(pick);
      state_[pick] = St::Basic;
      double* prow = &binv_[static_cast<std::size_t>(i) * m_];
      for (int t = 0; t < m_; ++t) prow[t] /= piv;
      for (int r2 = 0; r2 < m_; ++r2) {
        if (r2 == i || w[r2] == 0.0) continue;
        double* irow = &binv_[static_cast<std::size_t>(r2) * m_];
        const double f = w[r2];
        for (int t = 0; t < m_; ++t) irow[t] -= f * prow[t];
      }
      ++since_refactor_;
    }
    out.rows = basis_;
    out.cols.assign(n_ + m_, 0);
    for (int j = 0; j < n_ + m_; ++j) out.cols[j] = static_cast<std::uint8_t>(state_[j]);
    return true;
  }

  /// Adopt a snapshot (throws SolverError when its basis is singular).
  void install(const LpBasis& b) {
    if (static_cast<int>(b.rows.size()) != m_ || static_cast<int>(b.cols.size()) != n_ + m_)
      throw SolverError("lp: basis snapshot shape mismatch");
    reset_for_run();
    state_.assign(n_ + m_, St::Lower);
    for (int j = 0; j < n_ + m_; ++j) {
      const auto s = static_cast<St>(b.cols[j]);
      if (s != St::Basic && s != St::Lower && s != St::Upper && s != St::Free)
        throw SolverError("lp: basis snapshot has a bad column tag");
      state_[j] = s;
    }
    for (int i = 0; i < m_; ++i) {
      const int j = b.rows[i];
      if (j < 0 || j >= n_ + m_ || state_[j] != St::Basic)
        throw SolverError("lp: basis snapshot rows disagree with column tags");
    }
    basis_ = b.rows;
    xb_.assign(m_, 0.0);
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    refactor();
  }

  /// Refresh basic values after bound changes under the current basis.
  void refresh_values() {
    for (int j = 0; j < ncols(); ++j) {
      if (state_[j] == St::Basic || lo_[j] == hi_[j]) continue;
      if (!std::isfinite(nb_value(j)))
        throw SolverError("lp: nonbasic column anchored at an infinite bound");
    }
    compute_xb();
  }

  enum class WarmVerdict { Optimal, Infeasible, Cutoff };

  /// Dual simplex from the current (dual-feasible) basis after bound
  /// changes: picks the worst bound-violating basic variable to leave and
  /// the entering column by the dual ratio test, so the objective — a valid
  /// lower bound throughout — climbs monotonically. Stops early once it
  /// passes `cutoff` (verdict Cutoff, bound in `bound_out`), proves the node
  /// infeasible when no entering column exists, or reaches primal
  /// feasibility and finishes with ordinary primal iterations. The caller
  /// then reads the outcome via make_optimal_outcome()/make_ray_outcome().
  WarmVerdict warm_run(double cutoff, double& bound_out) {
    iters_ = 0;
    stall_ = 0;
    bland_ = stable_;
    phase1_ = false;
    ray_col_ = -1;
    set_phase2_costs();

    std::vector<double> d(ncols(), 0.0);
    const auto reprice = [&] {
      const std::vector<double> y = price_duals();
      for (int j = 0; j < ncols(); ++j)
        d[j] = state_[j] == St::Basic ? 0.0 : cost_[j] - col_dot(y, j);
    };
    // Nonbasic reduced costs must point away from their bound; tiny drift is
    // tolerated, real violations disqualify bound claims.
    const auto dual_feasible = [&](double tol) {
      for (int j = 0; j < ncols(); ++j) {
        if (state_[j] == St::Basic || lo_[j] == hi_[j]) continue;
        if (state_[j] == St::Lower && d[j] < -tol) return false;
        if (state_[j] == St::Upper && d[j] > tol) return false;
        if (state_[j] == St::Free && std::abs(d[j]) > tol) return false;
      }
      return true;
    };
    const auto objective_now = [&] {
      double z = 0.0;
      for (int j = 0; j < ncols(); ++j) {
        if (state_[j] == St::Basic || cost_[j] == 0.0) continue;
        z += cost_[j] * nb_value(j);
      }
      for (int i = 0; i < m_; ++i) {
        const double c = cost_[basis_[i]];
        if (c != 0.0) z += c * xb_[i];
      }
      return z;
    };

    reprice();
    const int cap = 500 + 50 * (m_ + ncols());
    std::vector<double> alpha(ncols(), 0.0);
    std::vector<double> w;
    int pivots = 0;

    for (;;) {
      if (since_refactor_ >= refactor_every_) {
        refactor();
        reprice();
      }

      if (std::isfinite(cutoff)) {
        // The basic solution's primal value at a dual-feasible basis equals
        // the dual objective, a valid lower bound on the optimum (weak
        // duality), so once it clearly passes the cutoff the node is proved
        // useless. Borderline passes keep pivoting instead of claiming.
        const double z = objective_now();
        if (z > cutoff + 1e-6 * (1.0 + std::abs(cutoff))) {
          reprice();  // a bound claim deserves fresh reduced costs
          if (dual_feasible(1e-7)) {
            bound_out = z;
            return WarmVerdict::Cutoff;
          }
        }
      }

      // Leaving choice: worst bound violation, first row on ties.
      int r = -1, dir = 0;
      double worst = 1e-9 * (1.0 + bscale_);
      for (int i = 0; i < m_; ++i) {
        const int bj = basis_[i];
        const double lo = lo_[bj], hi = hi_[bj];
        if (xb_[i] < lo - worst) {
          worst = lo - xb_[i];
          r = i;
          dir = 1;
        } else if (xb_[i] > hi + worst) {
          worst = xb_[i] - hi;
          r = i;
          dir = -1;
        }
      }
      if (r < 0) break;  // primal feasible: polish with primal iterations

      if (++pivots > cap) throw SolverError("lp: dual iteration limit exceeded");

      const double* br = &binv_[static_cast<std::size_t>(r) * m_];
      int q = -1, qsig = 0;
      double best_ratio = kInf, qalpha = 0.0, ambiguous = 0.0;
      for (int j = 0; j < ncols(); ++j) {
        alpha[j] = 0.0;
        if (state_[j] == St::Basic || lo_[j] == hi_[j]) continue;
        double a;
        if (j < n_) {
          a = 0.0;
          const auto& col = acols_[j];
          for (int t = 0; t < m_; ++t) a += br[t] * col[t];
        } else if (j < first_art_) {
          a = br[j - n_];
        } else {
          a = art_sign_[j - first_art_] * br[art_row_[j - first_art_]];
        }
        alpha[j] = a;
        int sig;
        if (state_[j] == St::Lower) sig = 1;
        else if (state_[j] == St::Upper) sig = -1;
        else sig = (a * dir < 0.0) ? 1 : -1;  // free: whichever helps
        if (sig * a * dir >= 0.0) continue;   // moving j must push xb_r at the violation
        if (std::abs(a) < 1e-10) {
          // Helpful direction but a pivot too small to trust; remember it so
          // an "infeasible" verdict with such a column nearby is not claimed.
          ambiguous = std::max(ambiguous, std::abs(a));
          continue;
        }
        const double ratio = std::abs(d[j]) / std::abs(a);
        bool take = ratio < best_ratio - 1e-12;
        if (!take && q >= 0 && ratio < best_ratio + 1e-12) {
          const double cand = std::abs(a), cur = std::abs(qalpha);
          if (cand > cur + 1e-12 || (cand > cur - 1e-12 && j < q)) take = true;
        }
        if (take) {
          best_ratio = ratio;
          q = j;
          qsig = sig;
          qalpha = a;
        }
      }
      if (q < 0) {
        // No movable column can push the violated basic back towards its
        // bound: the row is an infeasibility certificate — unless tiny
        // helpful pivots were skipped, in which case the claim is unsafe.
        if (ambiguous > 1e-11) throw SolverError("lp: dual infeasibility test inconclusive");
        reprice();
        if (!dual_feasible(1e-7))
          throw SolverError("lp: dual restart lost feasibility");
        bound_out = objective_now();
        return WarmVerdict::Infeasible;
      }

      const int leaving = basis_[r];
      const double target = dir > 0 ? lo_[leaving] : hi_[leaving];
      double t = (xb_[r] - target) / (qsig * qalpha);
      if (t < 0.0) t = 0.0;

      // Note the entering column may land beyond its far bound; it enters the
      // basis anyway and a later dual iteration repairs it. Only the leaving
      // variable is driven exactly to its violated bound here.
      ftran(q, w);
      // Dual update along row r, then the usual primal pivot bookkeeping.
      const double theta = d[q] / qalpha;
      for (int j = 0; j < ncols(); ++j) {
        if (alpha[j] == 0.0 || j == q) continue;
        if (state_[j] == St::Basic) continue;
        d[j] -= theta * alpha[j];
      }
      d[leaving] = -theta;
      d[q] = 0.0;

      const double enter_val = nb_value(q) + qsig * t;
      state_[leaving] = dir > 0 ? St::Lower : St::Upper;
      for (int i = 0; i < m_; ++i)
        if (i != r) xb_[i] -= t * qsig * w[i];
      xb_[r] = enter_val;
      basis_[r] = q;
      state_[q] = St::Basic;

      const double piv = w[r];
      if (std::abs(piv) < 1e-11) throw SolverError("lp: dual pivot too small");
      double* prow = &binv_[static_cast<std::size_t>(r) * m_];
      for (int tcol = 0; tcol < m_; ++tcol) prow[tcol] /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == r || w[i] == 0.0) continue;
        double* irow = &binv_[static_cast<std::size_t>(i) * m_];
        const double f = w[i];
        for (int tcol = 0; tcol < m_; ++tcol) irow[tcol] -= f * prow[tcol];
      }
      ++since_refactor_;
      ++iters_;
    }

    // Primal cleanup: usually zero iterations, but it deterministically
    // repairs any reduced-cost drift the incremental updates accumulated.
    if (!optimize()) return WarmVerdict::Optimal;  // caller reads the ray
    bound_out = objective_now();
    return WarmVerdict::Optimal;
  }

  bool last_was_ray() const { return ray_col_ >= 0; }

  LpOutcome warm_outcome() {
    if (ray_col_ >= 0) return make_ray_outcome();
    return make_optimal_outcome();
  }

private:
  enum class St : std::uint8_t { Basic, Lower, Upper, Free };

  const LpModel& model_;
  int n_{0};                                // structural vars
  int m_{0};                                // rows
  int first_art_{0};                        // column index of first artificial
  std::vector<std::vector<double>> acols_;  // structural columns
  std::vector<double> lo_, hi_;             // per simplex column
  std::vector<double> b_;
  double bscale_{1.0};
  std::vector<double> cost_;
  std::vector<int> art_row_;
  std::vector<double> art_sign_;
  std::vector<St> state_;
  std::vector<int> basis_;    // row -> column
  std::vector<double> binv_;  // m x m row-major
  std::vector<double> xb_;
  int iters_{0};
  int since_refactor_{0};
  int refactor_every_{64};
  int stall_{0};
  bool bland_{false};
  bool stable_{false};
  bool phase1_{false};
  // Scratch for the unbounded case.
  int ray_col_{-1};
  int ray_sigma_{0};
  std::vector<double> ray_w_;

  int ncols() const { return first_art_ + static_cast<int>(art_row_.size()); }

  /// Drop any artificials left by a previous run and restore the per-run
  /// counters so the instance can be solved again (possibly with new bounds).
  void reset_for_run() {
    lo_.resize(n_ + m_);
    hi_.resize(n_ + m_);
    state_.resize(n_ + m_);
    art_row_.clear();
    art_sign_.clear();
    first_art_ = n_ + m_;
    iters_ = 0;
    stall_ = 0;
    bland_ = stable_;
    phase1_ = false;
    ray_col_ = -1;
    since_refactor_ = 0;
    sync_bounds();
  }

  double nb_value(int j) const {
    switch (state_[j]) {
      case St::Lower: return lo_[j];
      case St::Upper: return hi_[j];
      default: return 0.0;
    }
  }

  double value_of(int j) const {
    if (state_[j] != St::Basic) return nb_value(j);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == j) return xb_[i];
    throw SolverError("lp: basic column missing from basis");
  }

  // v' A_j for a full-length row vector v.
  double col_dot(const std::vector<double>& v, int j) const {
    if (j < n_) {
      const auto& col = acols_[j];
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += v[i] * col[i];
      return s;
    }
    if (j < first_art_) return v[j - n_];
    return art_sign_[j - first_art_] * v[art_row_[j - first_art_]];
  }

  // w = Binv A_j.
  void ftran(int j, std::vector<double>& w) const {
    w.assign(m_, 0.0);
    if (j < n_) {
      const auto& col = acols_[j];
      for (int i = 0; i < m_; ++i) {
        double s = 0.0;
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int t = 0; t < m_; ++t) s += row[t] * col[t];
        w[i] = s;
      }
      return;
    }
    int r;
    double sign;
    if (j < first_art_) {
      r = j - n_;
      sign = 1.0;
    } else {
      r = art_row_[j - first_art_];
      sign = art_sign_[j - first_art_];
    }
    for (int i = 0; i < m_; ++i) w[i] = sign * binv_[static_cast<std::size_t>(i) * m_ + r];
  }

  void build_initial_basis() {
    state_.assign(n_ + m_, St::Lower);
    for (int j = 0; j < n_ + m_; ++j) {
      if (std::isfinite(lo_[j])) state_[j] = St::Lower;
      else if (std::isfinite(hi_[j])) state_[j] = St::Upper;
      else state_[j] = St::Free;
    }
    first_art_ = n_ + m_;

    // Row residuals at the nonbasic anchors (slacks all anchor at 0).
    std::vector<double> r = b_;
    for (int j = 0; j < n_; ++j) {
      const double v = nb_value(j);
      if (v == 0.0) continue;
      for (int i = 0; i < m_; ++i) r[i] -= acols_[j][i] * v;
    }

    basis_.assign(m_, -1);
    xb_.assign(m_, 0.0);
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const int sj = n_ + i;
      const bool fits = r[i] >= lo_[sj] - 1e-10 && r[i] <= hi_[sj] + 1e-10;
      if (fits) {
        basis_[i] = sj;
        state_[sj] = St::Basic;
        xb_[i] = r[i];
        binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
      } else {
        const double sign = r[i] > 0.0 ? 1.0 : -1.0;
        art_row_.push_back(i);
        art_sign_.push_back(sign);
        lo_.push_back(0.0);
        hi_.push_back(kInf);
        state_.push_back(St::Basic);
        basis_[i] = first_art_ + static_cast<int>(art_row_.size()) - 1;
        xb_[i] = std::abs(r[i]);
        binv_[static_cast<std::size_t>(i) * m_ + i] = sign;
      }
    }
  }

  void set_phase1_costs() {
    cost_.assign(ncols(), 0.0);
    for (int j = first_art_; j < ncols(); ++j) cost_[j] = 1.0;
  }

  void set_phase2_costs() {
    cost_.assign(ncols(), 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = model_.objective[j];
  }

  std::vector<double> price_duals() const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int t = 0; t < m_; ++t) y[t] += cb * row[t];
    }
    return y;
  }

  // Entering column under the current costs, or -1 at optimality.
  int price(const std::vector<double>& y, int& sigma) const {
    int best = -1, bsig = 0;
    double best_viol = kDualTol;
    for (int j = 0; j < ncols(); ++j) {
      if (state_[j] == St::Basic || lo_[j] == hi_[j]) continue;
      const double d = cost_[j] - col_dot(y, j);
      int s = 0;
      if (state_[j] == St::Lower) {
        if (d < -kDualTol) s = 1;
      } else if (state_[j] == St::Upper) {
        if (d > kDualTol) s = -1;
      } else {  // free, parked at 0
        if (d < -kDualTol) s = 1;
        else if (d > kDualTol) s = -1;
      }
      if (!s) continue;
      if (bland_) {
        sigma = s;
        return j;
      }
      const double viol = std::abs(d);
      if (viol > best_viol) {
        best_viol = viol;
        best = j;
        bsig = s;
      }
    }
    sigma = bsig;
    return best;
  }

  void refactor() {
    // Invert the basis matrix by Gauss-Jordan with partial pivoting.
    std::vector<double> bmat(static_cast<std::size_t>(m_) * m_, 0.0);
    std::vector<double> col;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      if (j < n_) {
        for (int t = 0; t < m_; ++t) bmat[static_cast<std::size_t>(t) * m_ + i] = acols_[j][t];
      } else if (j < first_art_) {
        bmat[static_cast<std::size_t>(j - n_) * m_ + i] = 1.0;
      } else {
        bmat[static_cast<std::size_t>(art_row_[j - first_art_]) * m_ + i] =
            art_sign_[j - first_art_];
      }
    }
    std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int piv = c;
      double best = std::abs(bmat[static_cast<std::size_t>(c) * m_ + c]);
      for (int i = c + 1; i < m_; ++i) {
        const double v = std::abs(bmat[static_cast<std::size_t>(i) * m_ + c]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-11) throw SolverError("lp: singular basis during refactorisation");
      if (piv != c) {
        for (int t = 0; t < m_; ++t) {
          std::swap(bmat[static_cast<std::size_t>(piv) * m_ + t],
                    bmat[static_cast<std::size_t>(c) * m_ + t]);
          std::swap(inv[static_cast<std::size_t>(piv) * m_ + t],
                    inv[static_cast<std::size_t>(c) * m_ + t]);
        }
      }
      const double scale = 1.0 / bmat[static_cast<std::size_t>(c) * m_ + c];
      for (int t = 0; t < m_; ++t) {
        bmat[static_cast<std::size_t>(c) * m_ + t] *= scale;
        inv[static_cast<std::size_t>(c) * m_ + t] *= scale;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == c) continue;
        const double f = bmat[static_cast<std::size_t>(i) * m_ + c];
        if (f == 0.0) continue;
        for (int t = 0; t < m_; ++t) {
          bmat[static_cast<std::size_t>(i) * m_ + t] -= f * bmat[static_cast<std::size_t>(c) * m_ + t];
          inv[static_cast<std::size_t>(i) * m_ + t] -= f * inv[static_cast<std::size_t>(c) * m_ + t];
        }
      }
    }
    binv_ = std::move(inv);
    compute_xb();
    since_refactor_ = 0;
  }

  void compute_xb() {
    std::vector<double> r = b_;
    for (int j = 0; j < ncols(); ++j) {
      if (state_[j] == St::Basic) continue;
      const double v = nb_value(j);
      if (v == 0.0) continue;
      if (j < n_) {
        for (int i = 0; i < m_; ++i) r[i] -= acols_[j][i] * v;
      } else if (j < first_art_) {
        r[j - n_] -= v;
      } else {
        r[art_row_[j - first_art_]] -= art_sign_[j - first_art_] * v;
      }
    }
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int t = 0; t < m_; ++t) s += row[t] * r[t];
      xb_[i] = s;
    }
  }

  /// Runs simplex iterations under cost_. Returns true on optimality and
  /// false when an unbounded improving direction was found (stored for
  /// make_ray_outcome).
  bool optimize() {
    const int cap = 2000 + 200 * (m_ + ncols());
    std::vector<double> w;
    while (true) {
      if (iters_ > cap) throw SolverError("lp: iteration limit exceeded");
      if (since_refactor_ >= refactor_every_) refactor();

      const std::vector<double> y = price_duals();
      int sigma = 0;
      const int j = price(y, sigma);
      if (j < 0) return true;

      ftran(j, w);

      // Ratio test: how far can the entering variable move before a basic
      // variable (or itself) hits a bound?
      double t = kInf;
      int r = -1;  // -1: unlimited, -2: entering flips to its other bound
      const double range = hi_[j] - lo_[j];
      if (std::isfinite(range)) {
        t = range;
        r = -2;
      }
      for (int i = 0; i < m_; ++i) {
        const double delta = sigma * w[i];
        double ti;
        if (delta > kPivTol) {
          const double lo = lo_[basis_[i]];
          if (!std::isfinite(lo)) continue;
          ti = (xb_[i] - lo) / delta;
        } else if (delta < -kPivTol) {
          const double up = hi_[basis_[i]];
          if (!std::isfinite(up)) continue;
          ti = (xb_[i] - up) / delta;
        } else {
          continue;
        }
        if (ti < 0.0) ti = 0.0;
        // On near-ties prefer the larger pivot magnitude (keeps the basis
        // well conditioned), then the smaller basis index (determinism).
        bool take = ti < t - 1e-12;
        if (!take && r >= 0 && ti < t + 1e-12) {
          const double cand = std::abs(w[i]);
          const double cur = std::abs(w[r]);
          if (cand > cur + 1e-12 || (cand > cur - 1e-12 && basis_[i] < basis_[r]))
            take = true;
        }
        if (take) {
          t = ti;
          r = i;
        }
      }

      if (r == -1) {
        if (phase1_) throw SolverError("lp: phase-1 objective cannot be unbounded");
        ray_col_ = j;
        ray_sigma_ = sigma;
        ray_w_ = w;
        return false;
      }

      ++iters_;
      if (stable_) {
        // bland_ stays on for the whole solve
      } else if (t > 1e-10) {
        stall_ = 0;
        bland_ = false;
      } else if (++stall_ > 2 * (m_ + ncols())) {
        bland_ = true;
      }

      if (r == -2) {
        for (int i = 0; i < m_; ++i) xb_[i] -= t * sigma * w[i];
        state_[j] = state_[j] == St::Lower ? St::Upper : St::Lower;
        continue;
      }

      const int leaving = basis_[r];
      const double enter_val = nb_value(j) + sigma * t;
      state_[leaving] = sigma * w[r] > 0.0 ? St::Lower : St::Upper;
      for (int i = 0; i < m_; ++i)
        if (i != r) xb_[i] -= t * sigma * w[i];
      xb_[r] = enter_val;
      basis_[r] = j;
      state_[j] = St::Basic;

      // Product-form update of Binv.
      const double piv = w[r];
      double* prow = &binv_[static_cast<std::size_t>(r) * m_];
      for (int tcol = 0; tcol < m_; ++tcol) prow[tcol] /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == r || w[i] == 0.0) continue;
        double* irow = &binv_[static_cast<std::size_t>(i) * m_];
        const double f = w[i];
        for (int tcol = 0; tcol < m_; ++tcol) irow[tcol] -= f * prow[tcol];
      }
      ++since_refactor_;
    }
  }

  LpOutcome make_optimal_outcome() {
    LpOutcome out;
    out.status = LpStatus::Optimal;
    out.iterations = iters_;
    out.x.assign(n_, 0.0);
    std::vector<double> full(ncols(), 0.0);
    for (int j = 0; j < ncols(); ++j)
      if (state_[j] != St::Basic) full[j] = nb_value(j);
    for (int i = 0; i < m_; ++i) full[basis_[i]] = xb_[i];
    for (int j = 0; j < n_; ++j) out.x[j] = full[j];

    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += model_.objective[j] * out.x[j];
    out.objective = obj;

    out.row_duals = price_duals();
    out.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      out.reduced_costs[j] = model_.objective[j] - col_dot(out.row_duals, j);

    verify_point(out.x);
    return out;
  }

  LpOutcome make_ray_outcome() {
    LpOutcome out;
    out.status = LpStatus::Unbounded;
    out.iterations = iters_;
    out.ray.assign(n_, 0.0);
    if (ray_col_ < n_) out.ray[ray_col_] = static_cast<double>(ray_sigma_);
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      if (j < n_) out.ray[j] = -ray_sigma_ * ray_w_[i];
    }
    verify_ray(out.ray);
    return out;
  }

  void verify_point(const std::vector<double>& x) const {
    for (int j = 0; j < n_; ++j) {
      const double tol = 1e-7 * (1.0 + std::abs(x[j]));
      if (x[j] < model_.lower[j] - tol || x[j] > model_.upper[j] + tol)
        throw SolverError("lp: solution violates a variable bound");
    }
    for (int i = 0; i < m_; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < n_; ++j) lhs += model_.rows[i][j] * x[j];
      const double tol = 1e-6 * (1.0 + bscale_);
      const double diff = lhs - model_.rhs[i];
      const bool ok = (model_.relations[i] == Relation::LE && diff <= tol) ||
                      (model_.relations[i] == Relation::GE && diff >= -tol) ||
                      (model_.relations[i] == Relation::EQ && std::abs(diff) <= tol);
      if (!ok) {
        std::ostringstream os;
        os << "lp: solution violates row " << i << " by " << diff;
        throw SolverError(os.str());
      }
    }
  }

  void verify_ray(const std::vector<double>& ray) const {
    double scale = 0.0, cdir = 0.0;
    for (int j = 0; j < n_; ++j) {
      scale = std::max(scale, std::abs(ray[j]));
      cdir += model_.objective[j] * ray[j];
    }
    if (!(scale > 0.0)) throw SolverError("lp: empty unbounded direction");
    if (cdir >= 0.0) throw SolverError("lp: unbounded direction does not improve");
    for (int i = 0; i < m_; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < n_; ++j) lhs += model_.rows[i][j] * ray[j];
      const double tol = 1e-7 * (1.0 + scale);
      const bool ok = (model_.relations[i] == Relation::LE && lhs <= tol) ||
                      (model_.relations[i] == Relation::GE && lhs >= -tol) ||
                      (model_.relations[i] == Relation::EQ && std::abs(lhs) <= tol);
      if (!ok) throw SolverError("lp: unbounded direction leaves the feasible cone");
    }
  }
};

}  // namespace

LpOutcome solve_lp(const LpModel& model) {
  model.validate();
  try {
    Simplex s(model);
    return s.run();
  } catch (const SolverError&) {
    // Deterministic fallback: re-solve from scratch in the conservative mode
    // (Bland's rule, frequent refactorisation). Rethrows if that fails too.
    Simplex s(model, /*stable=*/true);
    return s.run();
  }
}

struct LpEngine::Impl {
  const LpModel& model;
  Simplex sx;                  // persistent instance; factorisation survives calls
  bool live{false};            // sx holds a basis worth continuing from
  std::uint64_t installed{0};  // snapshot id sx currently embodies (0: none)
  std::uint64_t next_id{1};

  explicit Impl(const LpModel& m) : model(m), sx(m) {}

  // Snapshot failures (unusable or degenerate purge) just mean "not reusable".
  bool try_snapshot(Simplex& s, LpBasis* out) {
    if (!out) return false;
    try {
      if (!s.snapshot(*out)) return false;
    } catch (const SolverError&) {
      out->rows.clear();
      out->cols.clear();
      return false;
    }
    out->id = next_id++;
    return true;
  }
};

LpEngine::LpEngine(const LpModel& model) : impl_(std::make_unique<Impl>(model)) {
  model.validate();
}

LpEngine::~LpEngine() = default;

LpOutcome LpEngine::solve(LpBasis* basis_out) {
  Impl& im = *impl_;
  if (basis_out) {
    basis_out->rows.clear();
    basis_out->cols.clear();
    basis_out->id = 0;
  }
  try {
    const LpOutcome out = im.sx.run();
    im.live = out.status == LpStatus::Optimal;
    im.installed = 0;
    if (im.live && im.try_snapshot(im.sx, basis_out)) im.installed = basis_out->id;
    return out;
  } catch (const SolverError&) {
    im.live = false;
    im.installed = 0;
    Simplex st(im.model, /*stable=*/true);
    const LpOutcome out = st.run();
    if (out.status == LpStatus::Optimal) im.try_snapshot(st, basis_out);
    return out;
  }
}

LpWarmOutcome LpEngine::warm(const LpBasis* from, double cutoff, LpBasis* basis_out) {
  Impl& im = *impl_;
  if (basis_out) {
    basis_out->rows.clear();
    basis_out->cols.clear();
    basis_out->id = 0;
  }
  if (from != nullptr && !from->usable())
    throw SolverError("lp: warm restart from an unusable basis");
  if (from == nullptr && !im.live)
    throw SolverError("lp: no live basis to continue from");

  try {
    if (from != nullptr && (!im.live || from->id == 0 || from->id != im.installed)) {
      im.sx.install(*from);
      im.installed = from->id;
      im.live = true;
    } else {
      im.sx.sync_bounds();
    }
    im.sx.refresh_values();

    double bound = 0.0;
    const auto verdict = im.sx.warm_run(cutoff, bound);
    im.installed = 0;  // the run moved the basis; no snapshot describes it yet

    LpWarmOutcome res;
    switch (verdict) {
      case Simplex::WarmVerdict::Cutoff:
        res.cutoff_hit = true;
        res.bound = bound;
        res.out.status = LpStatus::Infeasible;  // placeholder; unused on this path
        return res;
      case Simplex::WarmVerdict::Infeasible:
        res.bound = bound;
        res.out.status = LpStatus::Infeasible;
        return res;
      case Simplex::WarmVerdict::Optimal:
        res.out = im.sx.warm_outcome();  // verification may throw
        res.bound = res.out.objective;
        if (res.out.status == LpStatus::Optimal && im.try_snapshot(im.sx, basis_out))
          im.installed = basis_out->id;
        return res;
    }
    throw SolverError("lp: unreachable warm verdict");
  } catch (const SolverError&) {
    im.live = false;
    im.installed = 0;
    throw;
  }
}

}  // namespace uavtour
