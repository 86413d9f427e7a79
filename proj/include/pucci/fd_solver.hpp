/**
 * @file fd_solver.hpp
 * @brief Monotone wide-stencil discretisation of P^-_gamma / P^+_gamma and its Dirichlet solvers.
 *
 * At an interior node the second-order part is the min (P^-) or max (P^+) over
 * the ensemble A = sum_j D_j v_j v_j^T, where {v_j} is a lattice frame and
 * D_j in {lambda, Lambda}. Each directional second derivative uses the
 * Shortley-Weller three-point formula with the cut fractions of the grid.
 * The drift uses one-sided differences chosen so the scheme stays monotone.
 */
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/grid.hpp"
#include "pucci/pucci_ops.hpp"

namespace pucci {

template <int Dim>
struct DirichletProblem {
  PucciSign op = PucciSign::minus;
  EllipticityParams params;
  GridPtr<Dim> grid;
  ScalarField<Dim> rhs;       // read at interior nodes
  ScalarField<Dim> boundary;  // read at boundary nodes
  std::optional<ScalarField<Dim>> gamma_field;  // overrides params.gamma pointwise

  const DomainDescriptor<Dim>& domain() const { return grid->domain(); }

  void validate() const {
    if (!grid) throw std::invalid_argument("problem needs a grid");
    if (rhs.grid_ptr() != grid || boundary.grid_ptr() != grid)
      throw std::invalid_argument("rhs and boundary data must live on the problem grid");
    params.validate(Dim);
    if (gamma_field) {
      if (gamma_field->grid_ptr() != grid) throw std::invalid_argument("gamma field must live on the problem grid");
      for (double g : gamma_field->values())
        if (g < 0.0) throw std::invalid_argument("gamma field must be nonnegative");
    }
  }
};

/// Boundary data that is constant on each boundary component.
template <int Dim>
ScalarField<Dim> boundary_by_part(const GridPtr<Dim>& grid, double outer, double inner = 0.0, double flat = 0.0) {
  std::vector<double> v(grid->size(), 0.0);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto& n = grid->node(i);
    if (n.tag == NodeTag::interior) continue;
    v[i] = n.part == BoundaryPart::outer_sphere ? outer : n.part == BoundaryPart::inner_sphere ? inner : flat;
  }
  return ScalarField<Dim>(grid, std::move(v));
}

template <int Dim, class Rhs, class Bdry>
DirichletProblem<Dim> make_problem(const GridPtr<Dim>& grid, PucciSign op, const EllipticityParams& params, Rhs&& f,
                                   Bdry&& g) {
  DirichletProblem<Dim> p{op, params, grid, sample<Dim>(grid, f), sample<Dim>(grid, g), std::nullopt};
  p.validate();
  return p;
}

/// Frozen linear choice at one node: ensemble member and per-axis drift side and weight.
template <int Dim>
struct NodePolicy {
  int member = 0;
  std::array<signed char, Dim> side{};  // +1 / -1 neighbour used by the drift, 0 if inactive
  std::array<double, Dim> weight{};     // gamma * theta_j

  bool same_discrete(const NodePolicy& o) const { return member == o.member && side == o.side; }
};

template <int Dim>
class DiscreteOperator {
 public:
  struct Member {
    int frame;
    std::array<double, Dim> diag;
    SymMatrix A;
  };

  DiscreteOperator(GridPtr<Dim> grid, PucciSign sign, const EllipticityParams& params,
                   const std::optional<ScalarField<Dim>>& gamma_field = std::nullopt)
      : grid_(std::move(grid)), sign_(sign), params_(params) {
    params_.validate(Dim);
    build_ensemble();
    const auto& g = *grid_;
    const std::size_t n = g.interior_count();
    const double cap = 1.0 / g.h();
    gamma_.assign(n, params_.gamma);
    if (gamma_field) {
      if (gamma_field->grid_ptr() != grid_) throw std::invalid_argument("gamma field must live on the operator grid");
      for (std::size_t k = 0; k < n; ++k) {
        double v = (*gamma_field)[g.interior()[k]];
        if (v > cap) {
          v = cap;
          ++clamped_;
        }
        gamma_[k] = v;
      }
    }
    has_drift_ = std::any_of(gamma_.begin(), gamma_.end(), [](double v) { return v > 0.0; });
    // Shortley-Weller weights per node and direction
    const std::size_t nd = g.direction_count();
    coef_.resize(n * nd);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t d = 0; d < nd; ++d) {
        const double len2 = lattice_length2(g.stencil().directions[d]);
        const double H2 = g.h() * g.h() * len2;
        const double tp = g.neighbor(k, d, +1).t, tm = g.neighbor(k, d, -1).t;
        coef_[k * nd + d] = {2.0 / (H2 * tp * (tp + tm)), 2.0 / (H2 * tm * (tp + tm))};
      }
    // row scale: second-order diagonal relative to an uncut node
    double regular = 0.0;
    for (const auto& m : members_) {
      double s = 0.0;
      const auto& frame = g.stencil().frames[m.frame];
      for (int j = 0; j < Dim; ++j)
        s += m.diag[j] * 2.0 / (g.h() * g.h() * lattice_length2(g.stencil().directions[frame[j]]));
      regular = std::max(regular, s);
    }
    row_scale_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (const auto& m : members_) {
        double v = 0.0;
        const auto& frame = g.stencil().frames[m.frame];
        for (int j = 0; j < Dim; ++j) {
          const auto& c = coef_[k * nd + frame[j]];
          v += m.diag[j] * 0.5 * (c[0] + c[1]);
        }
        s = std::max(s, v);
      }
      row_scale_[k] = std::max(1.0, s / regular);
    }
  }

  /**
   * Ratio of the node's second-order diagonal to that of an uncut node (>= 1).
   * Residuals are divided by it so that round-off amplified by tiny cut
   * fractions is reported in regular-cell units.
   */
  double row_scale(std::size_t k) const { return row_scale_[k]; }

  const Grid<Dim>& grid() const { return *grid_; }
  const GridPtr<Dim>& grid_ptr() const { return grid_; }
  PucciSign sign() const { return sign_; }
  const std::vector<Member>& members() const { return members_; }
  std::size_t clamped_count() const { return clamped_; }
  bool has_drift() const { return has_drift_; }

  std::vector<SymMatrix> ensemble_matrices() const {
    std::vector<SymMatrix> out;
    for (const auto& m : members_) out.push_back(m.A);
    return out;
  }

  /// Directional second difference at interior node k along stencil direction d (unit-speed).
  double second_difference(const std::vector<double>& u, std::size_t k, std::size_t d) const {
    const auto& g = *grid_;
    const double u0 = u[g.interior()[k]];
    const auto& c = coef_[k * g.direction_count() + d];
    return c[0] * (u[g.neighbor(k, d, +1).node] - u0) + c[1] * (u[g.neighbor(k, d, -1).node] - u0);
  }

  /**
   * Operator value at interior node k. When `policy` is given it receives the
   * extremal choice; `previous` (if any) is kept unless another member beats
   * it by more than a relative 1e-14, which prevents policy cycling on ties.
   */
  double apply_at(const std::vector<double>& u, std::size_t k, NodePolicy<Dim>* policy = nullptr,
                  const NodePolicy<Dim>* previous = nullptr) const {
    const auto& g = *grid_;
    const std::size_t nd = g.direction_count();
    double sd[64];
    double scale = 0.0;
    for (std::size_t d = 0; d < nd; ++d) {
      sd[d] = second_difference(u, k, d);
      scale = std::max(scale, std::abs(sd[d]));
    }
    auto member_value = [&](const Member& m) {
      double v = 0.0;
      const auto& frame = g.stencil().frames[m.frame];
      for (int j = 0; j < Dim; ++j) v += m.diag[j] * sd[frame[j]];
      return v;
    };
    const bool minimize = sign_ == PucciSign::minus;
    int best = 0;
    double best_v = member_value(members_[0]);
    for (int m = 1; m < static_cast<int>(members_.size()); ++m) {
      const double v = member_value(members_[m]);
      if (minimize ? v < best_v : v > best_v) {
        best_v = v;
        best = m;
      }
    }
    if (previous) {
      const double pv = member_value(members_[previous->member]);
      if (std::abs(pv - best_v) <= 1e-14 * params_.Lambda * (scale + 1e-300)) {
        best = previous->member;
        best_v = pv;
      }
    }
    double value = best_v;
    NodePolicy<Dim> pol;
    pol.member = best;
    const double gam = gamma_[k];
    if (gam > 0.0) {
      const double u0 = u[g.interior()[k]];
      std::array<double, Dim> c{};
      double norm2 = 0.0;
      for (int j = 0; j < Dim; ++j) {
        const auto& np = g.neighbor(k, j, +1);
        const auto& nm = g.neighbor(k, j, -1);
        const double h = g.h();
        // one-sided slopes oriented so that larger neighbour values lower c_j (P^-) or raise it (P^+)
        double dp, dm;
        if (minimize) {
          dp = (u0 - u[np.node]) / (np.t * h);
          dm = (u0 - u[nm.node]) / (nm.t * h);
        } else {
          dp = (u[np.node] - u0) / (np.t * h);
          dm = (u[nm.node] - u0) / (nm.t * h);
        }
        if (dp >= dm && dp > 0.0) {
          c[j] = dp;
          pol.side[j] = +1;
        } else if (dm > 0.0) {
          c[j] = dm;
          pol.side[j] = -1;
        }
        norm2 += c[j] * c[j];
      }
      const double nrm = std::sqrt(norm2);
      if (nrm > 0.0)
        for (int j = 0; j < Dim; ++j) pol.weight[j] = pol.side[j] ? gam * c[j] / nrm : 0.0;
      value += minimize ? -gam * nrm : gam * nrm;
    }
    if (policy) *policy = pol;
    return value;
  }

  /// Operator values at all interior nodes, indexed by interior ordinal.
  std::vector<double> apply(const ScalarField<Dim>& u) const {
    if (&u.grid() != grid_.get() && u.grid_ptr() != grid_) check_same_grid(u.grid());
    std::vector<double> out(grid_->interior_count());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = apply_at(u.values(), k);
    return out;
  }

  /// Linear coefficients of the frozen policy: value = sum_c w_c (u_c - u_0).
  template <class Emit>
  void linear_row(std::size_t k, const NodePolicy<Dim>& pol, Emit&& emit) const {
    const auto& g = *grid_;
    const std::size_t nd = g.direction_count();
    const auto& m = members_[pol.member];
    const auto& frame = g.stencil().frames[m.frame];
    for (int j = 0; j < Dim; ++j) {
      const std::size_t d = frame[j];
      const auto& c = coef_[k * nd + d];
      emit(g.neighbor(k, d, +1).node, m.diag[j] * c[0]);
      emit(g.neighbor(k, d, -1).node, m.diag[j] * c[1]);
    }
    for (int j = 0; j < Dim; ++j) {
      if (!pol.side[j] || pol.weight[j] == 0.0) continue;
      const auto& nb = g.neighbor(k, j, pol.side[j]);
      emit(nb.node, pol.weight[j] / (nb.t * g.h()));
    }
  }

  /// Upper bound on the diagonal coefficient over all policies (used by the explicit iteration).
  double diagonal_bound(std::size_t k) const {
    const auto& g = *grid_;
    const std::size_t nd = g.direction_count();
    double best = 0.0;
    for (const auto& m : members_) {
      double s = 0.0;
      const auto& frame = g.stencil().frames[m.frame];
      for (int j = 0; j < Dim; ++j) {
        const auto& c = coef_[k * nd + frame[j]];
        s += m.diag[j] * (c[0] + c[1]);
      }
      best = std::max(best, s);
    }
    if (gamma_[k] > 0.0) {
      double s2 = 0.0;
      for (int j = 0; j < Dim; ++j) {
        const double tmin = std::min(g.neighbor(k, j, +1).t, g.neighbor(k, j, -1).t);
        s2 += 1.0 / (tmin * tmin * g.h() * g.h());
      }
      best += gamma_[k] * std::sqrt(s2);
    }
    return best;
  }

 private:
  static double lattice_length2(const LatticeVector<Dim>& d) {
    double s = 0.0;
    for (int c : d) s += double(c) * c;
    return s;
  }

  void check_same_grid(const Grid<Dim>& other) const {
    if (other.size() != grid_->size() || other.h() != grid_->h())
      throw std::invalid_argument("field does not live on the operator grid");
  }

  void build_ensemble() {
    const auto& st = grid_->stencil();
    if (st.directions.size() > 64) throw std::invalid_argument("at most 64 stencil directions are supported");
    for (int f = 0; f < static_cast<int>(st.frames.size()); ++f) {
      for (int mask = 0; mask < (1 << Dim); ++mask) {
        Member m{f, {}, SymMatrix(Dim)};
        for (int j = 0; j < Dim; ++j) {
          m.diag[j] = (mask >> j) & 1 ? params_.Lambda : params_.lambda;
          std::vector<double> v(Dim);
          for (int c = 0; c < Dim; ++c) v[c] = st.directions[st.frames[f][j]][c];
          m.A = m.A + scaled_projector(v, m.diag[j]);
        }
        bool dup = false;
        for (const auto& e : members_) {
          bool same = true;
          for (int a = 0; a < Dim && same; ++a)
            for (int b = a; b < Dim; ++b)
              if (std::abs(e.A(a, b) - m.A(a, b)) > 1e-14 * params_.Lambda) {
                same = false;
                break;
              }
          if (same) {
            dup = true;
            break;
          }
        }
        if (!dup) members_.push_back(std::move(m));
      }
    }
  }

  GridPtr<Dim> grid_;
  PucciSign sign_;
  EllipticityParams params_;
  std::vector<Member> members_;
  std::vector<double> gamma_;
  std::vector<std::array<double, 2>> coef_;
  std::vector<double> row_scale_;
  std::size_t clamped_ = 0;
  bool has_drift_ = false;
};

template <int Dim>
DiscreteOperator<Dim> discretize(const DirichletProblem<Dim>& p) {
  p.validate();
  return DiscreteOperator<Dim>(p.grid, p.op, p.params, p.gamma_field);
}

enum class SolveMethod { policy, euler };

inline std::string to_string(SolveMethod m) { return m == SolveMethod::policy ? "policy-iteration" : "explicit-euler"; }

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = -1;  // -1: 50 policy iterations or 10^6 Euler sweeps
  SolveMethod method = SolveMethod::policy;
  std::size_t history_stride = 1;
};

struct SchemeInfo {
  int stencil_width = 1;
  std::size_t rotation_count = 0;
  std::size_t ensemble_size = 0;
  std::size_t gamma_clamped = 0;
  std::string method;
};

template <int Dim>
struct SolveResult {
  ScalarField<Dim> u;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
  SchemeInfo scheme;
};

/// sup over interior nodes of |discrete operator - f|, cut-cell rows scaled by row_scale
template <int Dim>
double residual(const ScalarField<Dim>& u, const DirichletProblem<Dim>& p) {
  const auto op = discretize(p);
  double r = 0.0;
  const auto& g = *p.grid;
  for (std::size_t k = 0; k < g.interior_count(); ++k)
    r = std::max(r, std::abs(op.apply_at(u.values(), k) - p.rhs[g.interior()[k]]) / op.row_scale(k));
  return r;
}

namespace detail {

template <int Dim>
std::vector<double> initial_values(const DirichletProblem<Dim>& p) {
  std::vector<double> u(p.grid->size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (p.grid->node(i).tag != NodeTag::interior) u[i] = p.boundary[i];
  return u;
}

template <int Dim>
double sweep_residual(const DiscreteOperator<Dim>& op, const DirichletProblem<Dim>& p, const std::vector<double>& u,
                      std::vector<NodePolicy<Dim>>* pols, const std::vector<NodePolicy<Dim>>* prev, bool* unchanged) {
  const auto& g = *p.grid;
  double r = 0.0;
  bool same = true;
  for (std::size_t k = 0; k < g.interior_count(); ++k) {
    NodePolicy<Dim> pol;
    const double v = op.apply_at(u, k, &pol, prev ? &(*prev)[k] : nullptr);
    r = std::max(r, std::abs(v - p.rhs[g.interior()[k]]) / op.row_scale(k));
    if (prev && !pol.same_discrete((*prev)[k])) same = false;
    if (pols) (*pols)[k] = pol;
  }
  if (unchanged) *unchanged = same && prev != nullptr;
  return r;
}

template <int Dim>
SolveResult<Dim> solve_policy(const DirichletProblem<Dim>& p, const DiscreteOperator<Dim>& op, const SolveOptions& o) {
  const auto& g = *p.grid;
  const std::size_t n = g.interior_count();
  const int max_iter = o.max_iter < 0 ? 50 : o.max_iter;
  std::vector<double> u = initial_values(p);
  std::vector<NodePolicy<Dim>> pol(n), prev;
  SolveResult<Dim> res{ScalarField<Dim>(p.grid, u), 0, 0.0, false, {}, {}};

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));

  double r = sweep_residual<Dim>(op, p, u, &pol, nullptr, nullptr);
  res.residual_history.push_back(r);
  int it = 0;
  for (; it < max_iter; ++it) {
    if (r <= o.tol) {
      res.converged = true;
      break;
    }
    trip.clear();
    trip.reserve(n * (2 * g.direction_count() + 1));
    for (std::size_t k = 0; k < n; ++k) {
      double diag = 0.0;
      double rhs = p.rhs[g.interior()[k]];
      // fixed sparsity: every interior stencil neighbour appears, possibly with weight 0
      for (std::size_t d = 0; d < g.direction_count(); ++d)
        for (int s : {1, -1}) {
          const int ord = g.interior_ordinal(g.neighbor(k, d, s).node);
          if (ord >= 0) trip.emplace_back(static_cast<int>(k), ord, 0.0);
        }
      op.linear_row(k, pol[k], [&](std::uint32_t node, double w) {
        diag -= w;
        const int ord = g.interior_ordinal(node);
        if (ord >= 0)
          trip.emplace_back(static_cast<int>(k), ord, w);
        else
          rhs -= w * p.boundary[node];
      });
      trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
      b[static_cast<Eigen::Index>(k)] = rhs;
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(A);
      analyzed = true;
    }
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse factorisation failed");
    const Eigen::VectorXd x = lu.solve(b);
    double change = 0.0, size = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double& uk = u[g.interior()[k]];
      change = std::max(change, std::abs(x[static_cast<Eigen::Index>(k)] - uk));
      size = std::max(size, std::abs(x[static_cast<Eigen::Index>(k)]));
      uk = x[static_cast<Eigen::Index>(k)];
    }
    prev = pol;
    bool unchanged = false;
    r = sweep_residual(op, p, u, &pol, &prev, &unchanged);
    if ((it + 1) % o.history_stride == 0) res.residual_history.push_back(r);
    // A repeated discrete policy makes the last linear solve the exact discrete solution
    // (without drift); with drift the continuous weights still move, so require a stalled update too.
    if (unchanged && (!op.has_drift() || change <= 1e-13 * (1.0 + size))) {
      res.converged = true;
      ++it;
      break;
    }
  }
  if (!res.converged && r <= o.tol) res.converged = true;
  res.iterations = it;
  res.residual = r;
  res.u = ScalarField<Dim>(p.grid, std::move(u));
  return res;
}

template <int Dim>
SolveResult<Dim> solve_euler(const DirichletProblem<Dim>& p, const DiscreteOperator<Dim>& op, const SolveOptions& o) {
  const auto& g = *p.grid;
  const std::size_t n = g.interior_count();
  const long max_iter = o.max_iter < 0 ? 1000000L : o.max_iter;
  std::vector<double> u = initial_values(p), next = u;
  std::vector<double> tau(n);
  for (std::size_t k = 0; k < n; ++k) tau[k] = 1.0 / op.diagonal_bound(k);
  SolveResult<Dim> res{ScalarField<Dim>(p.grid, u), 0, 0.0, false, {}, {}};
  double r = 0.0;
  long it = 0;
  for (; it < max_iter; ++it) {
    r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double F = op.apply_at(u, k) - p.rhs[g.interior()[k]];
      r = std::max(r, std::abs(F) / op.row_scale(k));
      next[g.interior()[k]] = u[g.interior()[k]] + tau[k] * F;
    }
    if (it % static_cast<long>(std::max<std::size_t>(o.history_stride, 1000)) == 0) res.residual_history.push_back(r);
    if (r <= o.tol) {
      res.converged = true;
      break;
    }
    std::swap(u, next);
  }
  res.residual_history.push_back(r);
  res.iterations = static_cast<int>(it);
  res.residual = r;
  res.u = ScalarField<Dim>(p.grid, std::move(u));
  return res;
}

}  // namespace detail

/**
 * Solve the Dirichlet problem. Policy iteration freezes the extremal member and
 * drift choice per node and solves the linear problem until the choice repeats;
 * the explicit path iterates u <- u + tau_i (F_i(u)) with a per-node tau_i.
 * Non-convergence returns the last iterate with converged = false.
 */
template <int Dim>
SolveResult<Dim> solve(const DirichletProblem<Dim>& p, const SolveOptions& o = {}) {
  if (!(o.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto op = discretize(p);
  auto res = o.method == SolveMethod::policy ? detail::solve_policy(p, op, o) : detail::solve_euler(p, op, o);
  res.scheme.stencil_width = p.grid->stencil().width();
  res.scheme.rotation_count = p.grid->stencil().frames.size();
  res.scheme.ensemble_size = op.members().size();
  res.scheme.gamma_clamped = op.clamped_count();
  res.scheme.method = to_string(o.method);
  return res;
}

template <int Dim>
SolveResult<Dim> solve(const DirichletProblem<Dim>& p, double tol, int max_iter,
                       SolveMethod method = SolveMethod::policy) {
  SolveOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.method = method;
  return solve(p, o);
}

/// JSON convergence log {iterations, residual_history, scheme, ...}.
template <int Dim>
std::string convergence_json(const SolveResult<Dim>& r, std::size_t max_points = 64) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"converged\":" << (r.converged ? "true" : "false") << ",\"iterations\":" << r.iterations
     << ",\"residual\":" << r.residual << ",\"residual_history\":[";
  const std::size_t n = r.residual_history.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
  bool first = true;
  for (std::size_t i = 0; i < n; i += stride) {
    os << (first ? "" : ",") << r.residual_history[i];
    first = false;
  }
  os << "],\"scheme\":{\"ensemble_size\":" << r.scheme.ensemble_size << ",\"gamma_clamped\":" << r.scheme.gamma_clamped
     << ",\"method\":\"" << r.scheme.method << "\",\"rotation_count\":" << r.scheme.rotation_count
     << ",\"stencil_width\":" << r.scheme.stencil_width << "}}";
  return os.str();
}

}  // namespace pucci
