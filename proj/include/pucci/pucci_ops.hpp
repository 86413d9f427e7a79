/**
 * @file pucci_ops.hpp
 * @brief Pucci extremal operators on symmetric matrices.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/grid.hpp"

namespace pucci {

/// Which extremal operator: P^- (infimum, drift -gamma|p|) or P^+ (supremum, drift +gamma|p|).
enum class PucciSign { minus, plus };

inline std::string to_string(PucciSign s) { return s == PucciSign::minus ? "pucci-minus" : "pucci-plus"; }

inline PucciSign pucci_sign_from_string(const std::string& s) {
  if (s == "pucci-minus" || s == "minus") return PucciSign::minus;
  if (s == "pucci-plus" || s == "plus") return PucciSign::plus;
  throw std::invalid_argument("unknown operator '" + s + "'");
}

/// Symmetric n x n matrix, upper triangle stored row by row.
class SymMatrix {
 public:
  explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n * (n + 1) / 2), 0.0) {
    if (n < 1) throw std::invalid_argument("matrix dimension must be positive");
  }

  static SymMatrix identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
  }

  static SymMatrix diagonal(const std::vector<double>& d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, d[i]);
    return m;
  }

  /// Build from a full row-major matrix; the strict lower triangle must mirror the upper one.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n) throw std::invalid_argument("matrix must be square");
      for (int j = i; j < n; ++j) {
        if (rows[i][j] != rows[j][i]) throw std::invalid_argument("matrix is not symmetric");
        m.set(i, j, rows[i][j]);
      }
    }
    return m;
  }

  int n() const { return n_; }

  double operator()(int i, int j) const { return a_[index(i, j)]; }

  void set(int i, int j, double v) {
    if (!std::isfinite(v)) throw std::domain_error("matrix entries must be finite");
    a_[index(i, j)] = v;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  SymMatrix operator+(const SymMatrix& o) const {
    check_same(o);
    SymMatrix r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
  }

  SymMatrix operator-() const {
    SymMatrix r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = -a_[k];
    return r;
  }

  SymMatrix operator*(double c) const {
    SymMatrix r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = c * a_[k];
    return r;
  }

  /// trace(A M) = sum_ij A_ij M_ij
  double frobenius_dot(const SymMatrix& o) const {
    check_same(o);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      s += (*this)(i, i) * o(i, i);
      for (int j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * o(i, j);
    }
    return s;
  }

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_) throw std::out_of_range("matrix index out of range");
    return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
  }

  void check_same(const SymMatrix& o) const {
    if (o.n_ != n_) throw std::invalid_argument("matrix dimensions differ");
  }

  int n_;
  std::vector<double> a_;
};

/// Outer product v v^T / |v|^2 scaled by c.
inline SymMatrix scaled_projector(const std::vector<double>& v, double c) {
  double nn = 0.0;
  for (double x : v) nn += x * x;
  if (!(nn > 0.0)) throw std::invalid_argument("projector direction must be nonzero");
  const int n = static_cast<int>(v.size());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, c * v[i] * v[j] / nn);
  return m;
}

namespace detail {

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops below tol.
inline std::vector<double> jacobi_eigenvalues(const SymMatrix& m, double tol = 1e-13) {
  const int n = m.n();
  std::vector<double> a(static_cast<std::size_t>(n * n));
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a[i * n + j] = m(i, j);
      scale = std::max(scale, std::abs(m(i, j)));
    }
  auto off = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
  };
  const double threshold = tol * std::max(1.0, scale);
  for (int sweep = 0; sweep < 100 && off() > threshold; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p], aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> e(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) e[i] = a[i * n + i];
  return e;
}

}  // namespace detail

/// Ascending eigenvalues. Closed-form quadratic for n = 2, cyclic Jacobi otherwise.
inline std::vector<double> eigenvalues(const SymMatrix& m) {
  std::vector<double> e;
  if (m.n() == 1) {
    e = {m(0, 0)};
  } else if (m.n() == 2) {
    const double a = m(0, 0), b = m(0, 1), d = m(1, 1);
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), b);
    e = {mean - rad, mean + rad};
  } else {
    e = detail::jacobi_eigenvalues(m);
  }
  std::sort(e.begin(), e.end());
  return e;
}

struct PucciValue {
  double minus;
  double plus;
  std::vector<double> eigenvalues;
};

inline void validate_ellipticity(double lambda, double Lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (!(Lambda >= lambda) || !std::isfinite(Lambda)) throw std::invalid_argument("Lambda must satisfy Lambda >= lambda");
}

inline double pucci_from_eigenvalues(const std::vector<double>& e, double lambda, double Lambda, PucciSign sign) {
  validate_ellipticity(lambda, Lambda);
  double pos = 0.0, neg = 0.0;
  for (double v : e) (v > 0.0 ? pos : neg) += v;
  return sign == PucciSign::minus ? lambda * pos + Lambda * neg : Lambda * pos + lambda * neg;
}

inline double pucci_minus(const SymMatrix& m, const EllipticityParams& p) {
  return pucci_from_eigenvalues(eigenvalues(m), p.lambda, p.Lambda, PucciSign::minus);
}

inline double pucci_plus(const SymMatrix& m, const EllipticityParams& p) {
  return pucci_from_eigenvalues(eigenvalues(m), p.lambda, p.Lambda, PucciSign::plus);
}

inline double pucci(const SymMatrix& m, const EllipticityParams& p, PucciSign sign) {
  return pucci_from_eigenvalues(eigenvalues(m), p.lambda, p.Lambda, sign);
}

inline PucciValue pucci_values(const SymMatrix& m, const EllipticityParams& p) {
  auto e = eigenvalues(m);
  return {pucci_from_eigenvalues(e, p.lambda, p.Lambda, PucciSign::minus),
          pucci_from_eigenvalues(e, p.lambda, p.Lambda, PucciSign::plus), e};
}

/// Throws unless lambda*I <= A <= Lambda*I up to a relative tolerance.
inline void check_ensemble_member(const SymMatrix& a, double lambda, double Lambda, double tol = 1e-12) {
  const auto e = eigenvalues(a);
  const double slack = tol * std::max(1.0, Lambda);
  if (e.front() < lambda - slack || e.back() > Lambda + slack)
    throw std::invalid_argument("ensemble member violates lambda*I <= A <= Lambda*I");
}

/// min (P^-) or max (P^+) of trace(A M) over the ensemble.
inline double pucci_attained(const SymMatrix& m, const EllipticityParams& p, const std::vector<SymMatrix>& ensemble,
                             PucciSign sign = PucciSign::minus) {
  validate_ellipticity(p.lambda, p.Lambda);
  if (ensemble.empty()) throw std::invalid_argument("ensemble must not be empty");
  double best = sign == PucciSign::minus ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
  for (const auto& a : ensemble) {
    if (a.n() != m.n()) throw std::invalid_argument("ensemble member has the wrong dimension");
    check_ensemble_member(a, p.lambda, p.Lambda);
    const double v = a.frobenius_dot(m);
    best = sign == PucciSign::minus ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

/// All 2^n diagonal matrices with entries in {lambda, Lambda}.
inline std::vector<SymMatrix> diagonal_ensemble(int n, double lambda, double Lambda) {
  validate_ellipticity(lambda, Lambda);
  std::vector<SymMatrix> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) d[k] = (mask >> k) & 1 ? Lambda : lambda;
    out.push_back(SymMatrix::diagonal(d));
  }
  return out;
}

/// 2D ensemble R(theta)^T D R(theta) for theta = pi*j/angles and D diagonal in {lambda, Lambda}^2.
inline std::vector<SymMatrix> rotated_ensemble_2d(int angles, double lambda, double Lambda) {
  validate_ellipticity(lambda, Lambda);
  if (angles < 1) throw std::invalid_argument("need at least one rotation angle");
  std::vector<SymMatrix> out;
  for (int j = 0; j < angles; ++j) {
    const double th = M_PI * j / angles;
    const std::vector<double> u = {std::cos(th), std::sin(th)}, v = {-std::sin(th), std::cos(th)};
    for (double d1 : {lambda, Lambda})
      for (double d2 : {lambda, Lambda}) out.push_back(scaled_projector(u, d1) + scaled_projector(v, d2));
  }
  return out;
}

/// -gamma|p| for P^-, +gamma|p| for P^+.
inline double drift_term(const std::vector<double>& grad, double gamma, PucciSign sign) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("drift bound must be nonnegative");
  double s = 0.0;
  for (double g : grad) s += g * g;
  const double v = gamma * std::sqrt(s);
  return sign == PucciSign::minus ? -v : v;
}

}  // namespace pucci
