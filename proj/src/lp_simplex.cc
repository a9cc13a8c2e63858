// Bounded revised simplex on the computational form [A -I](x, r) = 0 where
// r are row activities bounded by the row sense. The basis is factorized with
// Eigen's SparseLU and updated in product form between refactorizations.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include "json.hpp"
#include <spdlog/spdlog.h>

#include "vneap/lp.h"

namespace vneap {

const char* SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kIterationLimit: return "IterationLimit";
    case SolveStatus::kTimeLimit: return "TimeLimit";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTolerance = 1e-9;
constexpr int kDegenerateStreakForBland = 50;

using SparseColumn = std::vector<std::pair<int, double>>;

double PowerOfTwo(double x) { return std::exp2(std::round(std::log2(x))); }

struct Eta {
  int row;
  double pivot;
  SparseColumn others;
};

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolveOptions& opts)
      : lp_(lp), opts_(opts) {}

  Solution Run();

 private:
  void Scale();
  void Initialize();
  void Refactor();
  void ComputeBasicValues();
  void Ftran(std::vector<double>& v) const;
  void Btran(std::vector<double>& v) const;
  // Returns false when the phase ended (optimal, unbounded or a limit).
  bool Iterate(bool phase_one);
  double Cost(int j, bool phase_one) const {
    if (phase_one) return j >= first_art_ ? 1.0 : 0.0;
    return j < n_ ? cost_[j] : 0.0;
  }
  bool LimitReached();

  const LinearProgram& lp_;
  SolveOptions opts_;
  int m_ = 0;
  int n_ = 0;
  int first_art_ = 0;
  std::vector<SparseColumn> cols_;
  std::vector<double> lo_, up_, cost_, x_;
  std::vector<double> row_scale_, col_scale_;
  double obj_scale_ = 1;
  std::vector<int> head_;      // basic variable per row position
  std::vector<int> position_;  // row position of a basic variable, else -1
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  SolveStatus status_ = SolveStatus::kOptimal;
  SolveStats stats_;
  int degenerate_streak_ = 0;
  bool bland_ = false;
  std::chrono::steady_clock::time_point start_;
};

void Simplex::Scale() {
  n_ = static_cast<int>(lp_.variables.size());
  m_ = static_cast<int>(lp_.constraints.size());
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  for (int i = 0; i < m_; ++i) {
    double lo = kInf, hi = 0;
    for (auto [j, a] : lp_.constraints[i].terms) {
      if (a == 0) continue;
      lo = std::min(lo, std::fabs(a));
      hi = std::max(hi, std::fabs(a));
    }
    if (hi > 0) row_scale_[i] = PowerOfTwo(1.0 / std::sqrt(lo * hi));
  }
  std::vector<double> clo(n_, kInf), chi(n_, 0);
  for (int i = 0; i < m_; ++i) {
    for (auto [j, a] : lp_.constraints[i].terms) {
      if (a == 0) continue;
      double v = std::fabs(a) * row_scale_[i];
      clo[j] = std::min(clo[j], v);
      chi[j] = std::max(chi[j], v);
    }
  }
  for (int j = 0; j < n_; ++j) {
    if (chi[j] > 0) col_scale_[j] = PowerOfTwo(1.0 / std::sqrt(clo[j] * chi[j]));
  }
  double cmax = 0;
  for (int j = 0; j < n_; ++j) {
    cmax = std::max(cmax, std::fabs(lp_.objective[j] * col_scale_[j]));
  }
  obj_scale_ = cmax > 0 ? PowerOfTwo(1.0 / cmax) : 1.0;
}

void Simplex::Initialize() {
  cols_.assign(n_ + m_, {});
  lo_.assign(n_ + m_, 0);
  up_.assign(n_ + m_, 0);
  cost_.assign(n_, 0);
  for (int i = 0; i < m_; ++i) {
    const Constraint& row = lp_.constraints[i];
    for (auto [j, a] : row.terms) {
      if (j < 0 || j >= n_) {
        throw std::invalid_argument("constraint " + row.name +
                                    " references unknown variable");
      }
      if (a != 0) cols_[j].push_back({i, a * row_scale_[i] * col_scale_[j]});
    }
    cols_[n_ + i].push_back({i, -1.0});
    double rhs = row.rhs * row_scale_[i];
    lo_[n_ + i] = row.sense == Sense::kLessEqual ? -kInf : rhs;
    up_[n_ + i] = row.sense == Sense::kGreaterEqual ? kInf : rhs;
  }
  // Merge duplicate (row, variable) entries.
  for (int j = 0; j < n_; ++j) {
    auto& col = cols_[j];
    std::sort(col.begin(), col.end());
    SparseColumn merged;
    for (auto [i, a] : col) {
      if (!merged.empty() && merged.back().first == i) {
        merged.back().second += a;
      } else {
        merged.push_back({i, a});
      }
    }
    col = std::move(merged);
  }
  for (int j = 0; j < n_; ++j) {
    const Variable& v = lp_.variables[j];
    lo_[j] = v.lower / col_scale_[j];
    up_[j] = v.upper / col_scale_[j];
    if (lo_[j] > up_[j]) {
      status_ = SolveStatus::kInfeasible;
    }
    cost_[j] = lp_.objective[j] * col_scale_[j] * obj_scale_;
  }

  x_.assign(n_ + m_, 0);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
    } else if (std::isfinite(up_[j])) {
      x_[j] = up_[j];
    }
  }
  std::vector<double> activity(m_, 0);
  for (int j = 0; j < n_; ++j) {
    for (auto [i, a] : cols_[j]) activity[i] += a * x_[j];
  }

  first_art_ = n_ + m_;
  head_.assign(m_, -1);
  for (int i = 0; i < m_; ++i) {
    const int r = n_ + i;
    const double act = activity[i];
    if (act >= lo_[r] - opts_.feasibility_tolerance &&
        act <= up_[r] + opts_.feasibility_tolerance) {
      head_[i] = r;
      x_[r] = act;
      continue;
    }
    // Logical rests at the violated bound; an artificial absorbs the gap.
    const double bound = act < lo_[r] ? lo_[r] : up_[r];
    x_[r] = bound;
    const double sigma = bound - act > 0 ? 1.0 : -1.0;
    cols_.push_back({{i, sigma}});
    lo_.push_back(0);
    up_.push_back(kInf);
    x_.push_back(std::fabs(bound - act));
    head_[i] = static_cast<int>(cols_.size() - 1);
  }
  position_.assign(cols_.size(), -1);
  for (int i = 0; i < m_; ++i) position_[head_[i]] = i;
}

void Simplex::Refactor() {
  etas_.clear();
  ++stats_.refactorizations;
  if (m_ == 0) return;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int p = 0; p < m_; ++p) {
    for (auto [i, a] : cols_[head_[p]]) triplets.emplace_back(i, p, a);
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  if (lu_.info() != Eigen::Success) {
    throw std::runtime_error("simplex basis became singular");
  }
}

void Simplex::Ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(v.data(), m_);
  Eigen::VectorXd sol = lu_.solve(rhs);
  std::copy(sol.data(), sol.data() + m_, v.begin());
  for (const Eta& e : etas_) {
    const double vp = v[e.row] / e.pivot;
    if (vp != 0) {
      for (auto [i, a] : e.others) v[i] -= a * vp;
    }
    v[e.row] = vp;
  }
}

void Simplex::Btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->row];
    for (auto [i, a] : it->others) s -= a * v[i];
    v[it->row] = s / it->pivot;
  }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(v.data(), m_);
  Eigen::VectorXd sol = lu_.transpose().solve(rhs);
  std::copy(sol.data(), sol.data() + m_, v.begin());
}

void Simplex::ComputeBasicValues() {
  // B x_B = -N x_N
  std::vector<double> rhs(m_, 0);
  for (size_t j = 0; j < cols_.size(); ++j) {
    if (position_[j] >= 0 || x_[j] == 0) continue;
    for (auto [i, a] : cols_[j]) rhs[i] -= a * x_[j];
  }
  Ftran(rhs);
  for (int p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
}

bool Simplex::LimitReached() {
  if (stats_.iterations >= opts_.iteration_limit) {
    status_ = SolveStatus::kIterationLimit;
    return true;
  }
  if (opts_.time_limit_seconds > 0 && stats_.iterations % 64 == 0) {
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
    if (elapsed > opts_.time_limit_seconds) {
      status_ = SolveStatus::kTimeLimit;
      return true;
    }
  }
  return false;
}

bool Simplex::Iterate(bool phase_one) {
  const double dtol = opts_.optimality_tolerance;
  const double ftol = opts_.feasibility_tolerance;
  const int total = static_cast<int>(cols_.size());

  std::vector<double> pi(m_);
  for (int p = 0; p < m_; ++p) pi[p] = Cost(head_[p], phase_one);
  Btran(pi);

  // Pricing.
  int q = -1;
  double best = 0;
  double dq = 0;
  for (int j = 0; j < total; ++j) {
    if (position_[j] >= 0 || lo_[j] == up_[j]) continue;
    if (!phase_one && j >= first_art_) continue;
    double d = Cost(j, phase_one);
    for (auto [i, a] : cols_[j]) d -= pi[i] * a;
    const bool can_increase = x_[j] < up_[j] - ftol;
    const bool can_decrease = x_[j] > lo_[j] + ftol;
    double score = 0;
    if (d < -dtol && can_increase) score = -d;
    if (d > dtol && can_decrease) score = d;
    if (score == 0) continue;
    if (bland_) {
      q = j;
      dq = d;
      break;
    }
    if (score > best) {
      best = score;
      q = j;
      dq = d;
    }
  }
  if (q < 0) return false;

  std::vector<double> alpha(m_, 0);
  for (auto [i, a] : cols_[q]) alpha[i] = a;
  Ftran(alpha);
  const double dir = dq < 0 ? 1.0 : -1.0;

  // Harris two-pass ratio test.
  double tmax = up_[q] - lo_[q];
  for (int p = 0; p < m_; ++p) {
    if (std::fabs(alpha[p]) <= kPivotTolerance) continue;
    const int b = head_[p];
    const double rate = -dir * alpha[p];
    double limit = kInf;
    if (rate < 0 && std::isfinite(lo_[b])) {
      limit = (x_[b] - lo_[b] + ftol) / -rate;
    } else if (rate > 0 && std::isfinite(up_[b])) {
      limit = (up_[b] - x_[b] + ftol) / rate;
    }
    tmax = std::min(tmax, limit);
  }
  if (!std::isfinite(tmax)) {
    status_ = SolveStatus::kUnbounded;
    return false;
  }
  int leave = -1;
  double leave_ratio = kInf;
  double leave_mag = 0;
  for (int p = 0; p < m_; ++p) {
    if (std::fabs(alpha[p]) <= kPivotTolerance) continue;
    const int b = head_[p];
    const double rate = -dir * alpha[p];
    double ratio = kInf;
    if (rate < 0 && std::isfinite(lo_[b])) {
      ratio = (x_[b] - lo_[b]) / -rate;
    } else if (rate > 0 && std::isfinite(up_[b])) {
      ratio = (up_[b] - x_[b]) / rate;
    }
    if (ratio > tmax) continue;
    bool take;
    if (bland_) {
      take = leave < 0 || ratio < leave_ratio - 1e-12 ||
             (ratio <= leave_ratio + 1e-12 && b < head_[leave]);
    } else {
      take = std::fabs(alpha[p]) > leave_mag;
    }
    if (take) {
      leave = p;
      leave_ratio = ratio;
      leave_mag = std::fabs(alpha[p]);
    }
  }

  const double flip = up_[q] - lo_[q];
  double t;
  if (leave < 0 || flip <= std::max(leave_ratio, 0.0)) {
    // Bound flip: q moves to its opposite bound, basis unchanged.
    t = flip;
    x_[q] = dir > 0 ? up_[q] : lo_[q];
    for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * t * alpha[p];
  } else {
    t = std::max(leave_ratio, 0.0);
    const int b = head_[leave];
    x_[q] += dir * t;
    for (int p = 0; p < m_; ++p) x_[head_[p]] -= dir * t * alpha[p];
    const double rate = -dir * alpha[leave];
    x_[b] = rate < 0 ? lo_[b] : up_[b];
    Eta eta{leave, alpha[leave], {}};
    for (int p = 0; p < m_; ++p) {
      if (p != leave && alpha[p] != 0) eta.others.push_back({p, alpha[p]});
    }
    etas_.push_back(std::move(eta));
    position_[b] = -1;
    position_[q] = leave;
    head_[leave] = q;
  }

  ++stats_.iterations;
  if (phase_one) ++stats_.phase1_iterations;
  if (bland_) ++stats_.bland_pivots;
  if (t <= 1e-12) {
    if (++degenerate_streak_ >= kDegenerateStreakForBland) bland_ = true;
  } else {
    degenerate_streak_ = 0;
    bland_ = false;
  }
  if (static_cast<int>(etas_.size()) >= opts_.refactor_interval) {
    Refactor();
    ComputeBasicValues();
  }
  return !LimitReached();
}

Solution Simplex::Run() {
  start_ = std::chrono::steady_clock::now();
  Solution out;
  if (lp_.objective.size() != lp_.variables.size()) {
    throw std::invalid_argument("objective length differs from variable count");
  }
  Scale();
  Initialize();
  if (status_ == SolveStatus::kInfeasible) {
    out.status = status_;
    return out;
  }
  Refactor();

  bool phase_one = first_art_ < static_cast<int>(cols_.size());
  for (int rounds = 0;; ++rounds) {
    while (Iterate(phase_one)) {
    }
    if (status_ != SolveStatus::kOptimal) break;
    // Confirm from a fresh factorization before accepting the phase result.
    Refactor();
    ComputeBasicValues();
    if (rounds < 3 && Iterate(phase_one)) continue;
    if (status_ != SolveStatus::kOptimal) break;
    if (phase_one) {
      double infeasibility = 0;
      for (size_t j = first_art_; j < cols_.size(); ++j) infeasibility += x_[j];
      if (infeasibility > opts_.feasibility_tolerance * std::max(1, m_)) {
        status_ = SolveStatus::kInfeasible;
        break;
      }
      for (size_t j = first_art_; j < cols_.size(); ++j) up_[j] = 0;
      phase_one = false;
      degenerate_streak_ = 0;
      bland_ = false;
      rounds = -1;
      continue;
    }
    break;
  }

  out.status = status_;
  out.values.assign(n_, 0);
  for (int j = 0; j < n_; ++j) {
    double v = x_[j] * col_scale_[j];
    const Variable& var = lp_.variables[j];
    // Clip the Harris tolerance back onto the bounds.
    out.values[j] = std::clamp(v, var.lower, var.upper);
  }
  out.objective = lp_.evaluate(out.values);
  if (status_ == SolveStatus::kOptimal) {
    std::vector<double> pi(m_);
    for (int p = 0; p < m_; ++p) pi[p] = Cost(head_[p], false);
    Btran(pi);
    out.row_duals.resize(m_);
    for (int i = 0; i < m_; ++i) out.row_duals[i] = pi[i] * row_scale_[i] / obj_scale_;
  }
  stats_.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
          .count();
  out.stats = stats_;
  return out;
}

}  // namespace

Solution solve_lp(const LinearProgram& lp, const SolveOptions& opts) {
  if (!(opts.feasibility_tolerance > 0) || !(opts.optimality_tolerance > 0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  Simplex simplex(lp, opts);
  Solution sol = simplex.Run();
  spdlog::debug("lp: {} vars, {} rows, {} iterations, status {}",
                lp.variables.size(), lp.constraints.size(),
                sol.stats.iterations, SolveStatusName(sol.status));
  return sol;
}

std::string solution_stats_json(const Solution& solution) {
  nlohmann::json j;
  j["status"] = SolveStatusName(solution.status);
  j["objective"] = solution.objective;
  j["iterations"] = solution.stats.iterations;
  j["phase1_iterations"] = solution.stats.phase1_iterations;
  j["refactorizations"] = solution.stats.refactorizations;
  j["bland_pivots"] = solution.stats.bland_pivots;
  j["branch_and_bound_nodes"] = solution.stats.nodes;
  j["seconds"] = solution.stats.seconds;
  return j.dump(2);
}

}  // namespace vneap
