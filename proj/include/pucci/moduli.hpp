/**
 * @file moduli.hpp
 * @brief Moduli of continuity: built-in families, Dini integrals, the DMC(Q,beta)
 * checks and the composite modulus theta(t) = t^beta* + int_0^t omega(s)/s ds.
 */
#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/quadrature.hpp"

namespace pucci {

enum class ModulusFamily { zero, holder, pure_dini, mixed, custom };

inline std::string to_string(ModulusFamily f) {
  switch (f) {
    case ModulusFamily::zero: return "zero";
    case ModulusFamily::holder: return "holder";
    case ModulusFamily::pure_dini: return "pure-dini";
    case ModulusFamily::mixed: return "mixed";
    case ModulusFamily::custom: return "custom";
  }
  return "?";
}

/// Raised when int_0^t omega(s)/s ds diverges.
struct NonDiniError : std::domain_error {
  using std::domain_error::domain_error;
};

/**
 * A modulus omega on [0, delta] with the DMC(Q, beta) bookkeeping fields.
 * `scale` K implements the renormalisation omega_bar(t) = omega(K t).
 */
struct Modulus {
  ModulusFamily family = ModulusFamily::zero;
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 0.5;
  double delta = 1.0;       // delta_omega
  double delta_star = 1.0;  // delta*_omega
  double Q = 1.0;
  double scale = 1.0;
  std::vector<double> knots_t;  // custom: increasing abscissae
  std::vector<double> knots_w;  // custom: nondecreasing values

  static Modulus zero(double beta = 0.5) {
    Modulus m;
    m.family = ModulusFamily::zero;
    m.beta = check_beta(beta);
    return m;
  }

  /// t^alpha, delta = delta* = 1, Q = 1, any beta in [alpha, 1].
  static Modulus holder(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("holder exponent must lie in (0,1]");
    if (!(beta >= alpha && beta <= 1.0)) throw std::invalid_argument("holder modulus needs beta in [alpha,1]");
    Modulus m;
    m.family = ModulusFamily::holder;
    m.alpha = alpha;
    m.beta = beta;
    return m;
  }

  /// (ln 1/t)^gamma, delta = e^gamma, delta* = 2^{gamma/beta}. Dini only for gamma < -1.
  static Modulus pure_dini(double gamma, double beta) {
    if (!(gamma < 0.0)) throw std::invalid_argument("pure-dini modulus needs gamma < 0");
    Modulus m;
    m.family = ModulusFamily::pure_dini;
    m.gamma = gamma;
    m.beta = check_beta(beta);
    m.delta = std::exp(gamma);
    m.delta_star = std::pow(2.0, gamma / beta);
    return m;
  }

  /// t^alpha (ln 1/t)^gamma with the delta, delta* of the sign of gamma.
  static Modulus mixed(double alpha, double gamma, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("mixed modulus needs alpha in (0,1)");
    if (gamma == 0.0) return holder(alpha, beta);
    Modulus m;
    m.family = ModulusFamily::mixed;
    m.alpha = alpha;
    m.gamma = gamma;
    m.beta = beta;
    if (gamma > 0.0) {
      if (!(beta >= alpha && beta <= 1.0)) throw std::invalid_argument("mixed modulus with gamma > 0 needs beta in [alpha,1]");
      m.delta = std::exp(-gamma / alpha);
      m.delta_star = 1.0;
    } else {
      if (!(beta > alpha && beta < 1.0)) throw std::invalid_argument("mixed modulus with gamma < 0 needs beta in (alpha,1)");
      m.delta = std::exp(gamma / (1.0 - alpha));
      m.delta_star = std::pow(2.0, gamma / (beta - alpha));
    }
    return m;
  }

  /**
   * Tabulated modulus, piecewise linear in log t between knots and extended
   * linearly to 0 below the first knot. delta defaults to the last knot.
   */
  static Modulus custom(std::vector<double> t, std::vector<double> w, double beta, double delta_star = 1.0,
                        double Q = 1.0, std::optional<double> delta = std::nullopt) {
    if (t.size() != w.size() || t.size() < 2) throw std::invalid_argument("custom modulus needs at least two knots");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] > 0.0) || !(w[i] > 0.0) || !std::isfinite(w[i]))
        throw std::invalid_argument("custom modulus knots and values must be positive");
      if (i > 0 && !(t[i] > t[i - 1])) throw std::invalid_argument("custom modulus knots must increase");
      if (i > 0 && w[i] < w[i - 1]) throw std::invalid_argument("custom modulus values must be nondecreasing");
    }
    Modulus m;
    m.family = ModulusFamily::custom;
    m.beta = check_beta(beta);
    m.delta = delta.value_or(t.back());
    if (!(m.delta > 0.0 && m.delta <= 1.0 && m.delta <= t.back() * (1 + 1e-15)))
      throw std::invalid_argument("custom modulus delta must lie in (0,1] within the table");
    m.delta_star = delta_star;
    m.Q = Q;
    m.knots_t = std::move(t);
    m.knots_w = std::move(w);
    return m;
  }

  /// omega_bar(t) = omega(K t) on [0, delta/K].
  Modulus renormalized(double K) const {
    if (!(K >= 1.0)) throw std::invalid_argument("renormalisation factor must be >= 1");
    Modulus m = *this;
    m.scale = scale * K;
    m.delta = delta / K;
    return m;
  }

  bool is_dini() const { return !(family == ModulusFamily::pure_dini && gamma >= -1.0); }

  /// omega(t) for t in [0, delta].
  double operator()(double t) const {
    if (!(t >= 0.0) || t > delta * (1.0 + 1e-12)) throw std::domain_error("modulus evaluated outside [0, delta]");
    return raw(std::min(t, delta) * scale);
  }

  bool operator==(const Modulus&) const = default;

  /// omega of the unscaled family at s, no range check.
  double raw(double s) const {
    if (s <= 0.0) return 0.0;
    switch (family) {
      case ModulusFamily::zero: return 0.0;
      case ModulusFamily::holder: return std::pow(s, alpha);
      case ModulusFamily::pure_dini: return std::pow(std::log(1.0 / s), gamma);
      case ModulusFamily::mixed: return std::pow(s, alpha) * std::pow(std::log(1.0 / s), gamma);
      case ModulusFamily::custom: {
        if (s <= knots_t.front()) return knots_w.front() * s / knots_t.front();
        if (s >= knots_t.back()) return knots_w.back();
        const auto it = std::upper_bound(knots_t.begin(), knots_t.end(), s);
        const std::size_t j = static_cast<std::size_t>(it - knots_t.begin());
        const double u0 = std::log(knots_t[j - 1]), u1 = std::log(knots_t[j]);
        const double th = (std::log(s) - u0) / (u1 - u0);
        return knots_w[j - 1] + th * (knots_w[j] - knots_w[j - 1]);
      }
    }
    return 0.0;
  }

  /// omega(e^{-x}) of the unscaled family, evaluated without underflow in the logarithmic factor.
  double raw_log(double x) const {
    switch (family) {
      case ModulusFamily::holder: return std::exp(-alpha * x);
      case ModulusFamily::pure_dini: return std::pow(x, gamma);
      case ModulusFamily::mixed: return std::exp(-alpha * x) * std::pow(x, gamma);
      default: return raw(std::exp(-x));
    }
  }

 private:
  static double check_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0,1]");
    return beta;
  }
};

inline double eval(const Modulus& w, double t) { return w(t); }

/// Closed form of int_0^t omega(s)/s ds for the unscaled families; NaN when none is implemented.
inline double dini_integral_closed(const Modulus& w, double t) {
  const double s = t * w.scale;  // int_0^t w(Ks)/s ds = int_0^{Kt} w(s)/s ds
  if (s <= 0.0) return 0.0;
  const double L = std::log(1.0 / s);
  switch (w.family) {
    case ModulusFamily::zero: return 0.0;
    case ModulusFamily::holder: return std::pow(s, w.alpha) / w.alpha;
    case ModulusFamily::pure_dini: return -std::pow(L, w.gamma + 1.0) / (w.gamma + 1.0);
    case ModulusFamily::mixed: {
      // int_L^inf x^gamma e^{-alpha x} dx = alpha^{-(gamma+1)} Gamma(gamma+1, alpha L)
      const double z = w.alpha * L;
      if (w.gamma == -1.0) return boost::math::expint(1, z);
      if (w.gamma > -1.0) return std::pow(w.alpha, -(w.gamma + 1.0)) * boost::math::tgamma(w.gamma + 1.0, z);
      return std::numeric_limits<double>::quiet_NaN();
    }
    case ModulusFamily::custom: {
      // exact: omega is linear in u = ln s between knots and omega(s)/s = w0/t0 below the first knot
      const auto& kt = w.knots_t;
      const auto& kw = w.knots_w;
      double acc = kw.front() * std::min(s, kt.front()) / kt.front();
      for (std::size_t j = 1; j < kt.size() && kt[j - 1] < s; ++j) {
        const double hi = std::min(s, kt[j]);
        const double u0 = std::log(kt[j - 1]), u1 = std::log(hi);
        const double w1 = w.raw(hi);
        acc += 0.5 * (kw[j - 1] + w1) * (u1 - u0);
      }
      if (s > kt.back()) acc += kw.back() * std::log(s / kt.back());
      return acc;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/**
 * Quadrature route: with x = ln(1/s) and x = L1/u the tail becomes
 * int_0^1 omega(e^{-L1/u}) L1/u^2 du, which tanh-sinh resolves for the
 * logarithmic families; the piece above 1/e is smooth.
 */
inline double dini_integral_numeric(const Modulus& w, double t, double rel_tol = 1e-12) {
  const double s = t * w.scale;
  if (s <= 0.0) return 0.0;
  const double s1 = std::min(s, std::exp(-1.0));
  const double L1 = std::log(1.0 / s1);
  auto tail = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double x = L1 / u;
    const double v = w.raw_log(x);
    return v == 0.0 ? 0.0 : v * L1 / (u * u);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double acc = ts.integrate(tail, 0.0, 1.0, rel_tol);
  if (s > s1) acc += integrate([&](double r) { return w.raw(r) / r; }, s1, s, rel_tol);
  if (!std::isfinite(acc)) throw NonDiniError("Dini integral did not converge");
  return acc;
}

/// int_0^t omega(s)/s ds; closed form where available, quadrature otherwise.
inline double dini_integral(const Modulus& w, double t) {
  if (!(t >= 0.0) || t > w.delta * (1.0 + 1e-12)) throw std::domain_error("Dini integral outside (0, delta]");
  if (!w.is_dini()) throw NonDiniError("modulus is not Dini continuous");
  if (t == 0.0) return 0.0;
  const double c = dini_integral_closed(w, t);
  return std::isfinite(c) ? c : dini_integral_numeric(w, t);
}

/// theta(t) = t^beta* + int_0^t omega(s)/s ds
inline double theta(const Modulus& w, double beta_star, double t) {
  if (!(beta_star > 0.0 && beta_star < 1.0)) throw std::invalid_argument("beta* must lie in (0,1)");
  if (!w.is_dini()) throw NonDiniError("theta needs a Dini modulus");
  if (t == 0.0) return 0.0;
  return std::pow(t, beta_star) + dini_integral(w, t);
}

/// Geometric samples of (0, top]: `count` points over `decades` decades, ascending.
inline std::vector<double> geometric_samples(double top, std::size_t count, double decades = 12.0) {
  if (count < 2) throw std::invalid_argument("need at least two samples");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = top * std::pow(10.0, -decades * double(count - 1 - i) / double(count - 1));
  t.back() = top;
  return t;
}

struct QuotientVerdict {
  bool pass = true;
  double h = 0.0;  // witness pair with q(r) > Q q(h), h <= r
  double r = 0.0;
  double worst_ratio = 0.0;  // max over pairs of q(r) / (Q q(h))
};

/// Q-decreasing quotient property on a geometric grid; O(samples) via a running minimum.
inline QuotientVerdict check_q_quotient(const Modulus& w, double Q, std::size_t samples = 1000, double decades = 12.0) {
  if (!(Q >= 1.0)) throw std::invalid_argument("Q must be >= 1");
  QuotientVerdict v;
  const auto ts = geometric_samples(w.delta, samples, decades);
  double qmin = std::numeric_limits<double>::infinity();
  double hmin = ts.front();
  for (double r : ts) {
    const double q = w(r) / r;
    if (q < qmin) {
      qmin = q;
      hmin = r;
    }
    if (qmin > 0.0) {
      const double ratio = q / (Q * qmin);
      if (ratio > v.worst_ratio) v.worst_ratio = ratio;
      if (ratio > 1.0 + 1e-12 && v.pass) {
        v.pass = false;
        v.h = hmin;
        v.r = r;
      }
    } else if (q > 0.0 && v.pass) {
      v.pass = false;
      v.h = hmin;
      v.r = r;
      v.worst_ratio = std::numeric_limits<double>::infinity();
    }
  }
  return v;
}

struct CompatibilityVerdict {
  bool pass = true;
  bool within_declared_range = true;  // mu < delta* and delta <= delta_omega
  int witness_k = -1;
  double witness_mu = 0.0;
  double witness_delta = 0.0;
  double worst_ratio = 0.0;  // max of mu^beta omega(mu^k delta) / omega(mu^{k+1} delta)
};

/// mu^beta * omega(mu^k delta) <= omega(mu^{k+1} delta) for k0 <= k <= k_max.
inline CompatibilityVerdict check_beta_compatibility(const Modulus& w, double beta, double mu, double delta, int k_max,
                                                     int k0 = 0) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0,1)");
  if (!(delta > 0.0 && delta <= w.delta * (1 + 1e-12))) throw std::invalid_argument("delta must lie in (0, delta_omega]");
  if (k0 < 0 || k_max < k0) throw std::invalid_argument("need 0 <= k0 <= k_max");
  CompatibilityVerdict v;
  v.within_declared_range = mu < w.delta_star;
  const double mb = std::pow(mu, beta);
  double t = delta * std::pow(mu, k0);
  for (int k = k0; k <= k_max && t > 1e-300; ++k) {
    const double lhs = mb * w(t);
    const double rhs = w(t * mu);
    if (rhs > 0.0) v.worst_ratio = std::max(v.worst_ratio, lhs / rhs);
    if (lhs > rhs * (1.0 + 1e-12) && v.pass) {
      v.pass = false;
      v.witness_k = k;
      v.witness_mu = mu;
      v.witness_delta = delta;
    }
    t *= mu;
  }
  return v;
}

/// Sweep mu over (0, delta*) and delta over (0, delta_omega]; roughly `samples` (mu, delta) pairs.
inline CompatibilityVerdict check_beta_compatibility_sampled(const Modulus& w, double beta, std::size_t samples = 1000,
                                                             int k_max = 60, int k0 = 0) {
  const std::size_t nmu = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(double(samples)) * 1.25));
  const std::size_t nd = std::max<std::size_t>(2, samples / nmu);
  const double mu_top = std::min(w.delta_star, 1.0) * (1.0 - 1e-9);
  const auto mus = geometric_samples(mu_top, nmu, 4.0);
  const auto deltas = geometric_samples(w.delta, nd, 8.0);
  CompatibilityVerdict all;
  for (double mu : mus)
    for (double d : deltas) {
      const auto v = check_beta_compatibility(w, beta, mu, d, k_max, k0);
      all.worst_ratio = std::max(all.worst_ratio, v.worst_ratio);
      if (!v.pass && all.pass) {
        all.pass = false;
        all.witness_k = v.witness_k;
        all.witness_mu = v.witness_mu;
        all.witness_delta = v.witness_delta;
      }
    }
  return all;
}

enum class Verdict { pass, fail, not_applicable, vacuous, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
    case Verdict::vacuous: return "vacuous";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct LemmaItem {
  Verdict verdict = Verdict::not_applicable;
  std::string detail;
  double worst_ratio = 0.0;  // largest lhs/rhs seen; <= 1 on pass
};

struct Lemma61Report {
  LemmaItem i_bound;          // omega <= Q omega_1
  LemmaItem i_dilation;       // omega_1(Theta t) <= 2 Q^2 Theta omega_1(t)
  LemmaItem i_scale_passing;  // omega_1(mu^k) <= (2 Q^2 / mu) omega_1(mu^{k+1})
  LemmaItem ii_series;        // sum_{j>=k} omega(mu^j) <= omega(mu^k) + omega_1(mu^k) <= 2 Q omega_1(mu^k)
  LemmaItem iii_power_quotient;
  double iii_alpha = 0.0;  // exponent found for (iii), 0 if none
};

namespace detail {

inline void record(LemmaItem& item, double lhs, double rhs, const std::string& where) {
  if (rhs > 0.0) item.worst_ratio = std::max(item.worst_ratio, lhs / rhs);
  if (lhs > rhs * (1.0 + 1e-10) + 1e-300 && item.verdict != Verdict::fail) {
    item.verdict = Verdict::fail;
    item.detail = "violated at " + where;
  }
}

}  // namespace detail

/**
 * The three items of the modulus lemma on a geometric sample of t. Items whose
 * hypotheses fail are marked not-applicable rather than failed.
 */
inline Lemma61Report lemma61(const Modulus& w, double Theta, double mu, int k, std::size_t samples = 1000) {
  if (!(Theta >= 1.0)) throw std::invalid_argument("Theta must be >= 1");
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  Lemma61Report rep;
  const bool quotient_ok = check_q_quotient(w, w.Q, samples).pass;
  const bool dini = w.is_dini();
  auto w1 = [&](double t) { return dini_integral(w, t); };
  const double Q = w.Q;

  if (quotient_ok && dini) {
    rep.i_bound.verdict = Verdict::pass;
    for (double t : geometric_samples(w.delta, samples))
      detail::record(rep.i_bound, w(t), Q * w1(t), "t=" + std::to_string(t));
    rep.i_dilation.verdict = Verdict::pass;
    for (double t : geometric_samples(w.delta / Theta, samples))
      detail::record(rep.i_dilation, w1(Theta * t), 2 * Q * Q * Theta * w1(t), "t=" + std::to_string(t));
    if (mu > 0.0 && mu < 1.0) {
      rep.i_scale_passing.verdict = Verdict::pass;
      double t = std::pow(mu, k);
      int kk = k;
      while (t > w.delta * (1 + 1e-12)) {
        t *= mu;
        ++kk;
      }
      for (; kk <= k + 40 && t > 1e-250; ++kk, t *= mu)
        detail::record(rep.i_scale_passing, w1(t), 2 * Q * Q / mu * w1(mu * t), "k=" + std::to_string(kk));
    } else {
      rep.i_scale_passing.detail = "mu outside (0,1)";
    }
  } else {
    rep.i_bound.detail = rep.i_dilation.detail = rep.i_scale_passing.detail =
        dini ? "Q-decreasing quotient property fails" : "modulus is not Dini";
  }

  // (ii)
  const double mu_max = std::min(w.delta, std::exp(-1.0));
  if (!dini) {
    rep.ii_series.detail = "modulus is not Dini";
  } else if (!(mu > 0.0 && mu <= mu_max * (1 + 1e-12))) {
    rep.ii_series.detail = "mu outside (0, min{delta, 1/e}]";
  } else if (std::pow(mu, k) > w.delta * (1 + 1e-12)) {
    rep.ii_series.detail = "mu^k exceeds delta";
  } else {
    rep.ii_series.verdict = Verdict::pass;
    const double tk = std::pow(mu, k);
    double sum = 0.0, t = tk;
    for (int j = 0; j < 100000; ++j, t *= mu) {
      const double term = w(t);
      sum += term;
      if (term < 1e-12 * std::max(sum, 1e-300) || t < 1e-300) break;
    }
    const double mid = w(tk) + w1(tk);
    detail::record(rep.ii_series, sum, mid, "first inequality, k=" + std::to_string(k));
    if (quotient_ok) detail::record(rep.ii_series, mid, 2 * Q * w1(tk), "second inequality, k=" + std::to_string(k));
  }

  // (iii): scan alpha for omega/t^alpha nonincreasing on (0, delta]
  if (w.family == ModulusFamily::zero) {
    rep.iii_power_quotient.detail = "omega vanishes identically";
  } else {
    // deep sample range so slowly varying log factors are seen
    auto ts = geometric_samples(w.delta, samples, 250.0);
    for (double t : geometric_samples(w.delta, samples, 12.0)) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    double found = 0.0;
    for (int a = 1; a < 100 && found == 0.0; ++a) {
      const double alpha = a / 100.0;
      bool decreasing = true;
      double prev = std::numeric_limits<double>::infinity();
      for (double t : ts) {
        const double v = w(t) / std::pow(t, alpha);
        if (v > prev * (1.0 + 1e-12)) {
          decreasing = false;
          break;
        }
        prev = v;
      }
      if (decreasing) found = alpha;
    }
    if (found == 0.0) {
      rep.iii_power_quotient.detail = "no alpha in (0,1) with omega/t^alpha decreasing";
    } else {
      rep.iii_alpha = found;
      Modulus probe = w;
      probe.delta_star = 1.0;
      const bool a_ok = check_q_quotient(probe, 1.0, samples).pass;
      const auto c = check_beta_compatibility_sampled(probe, found, samples);
      rep.iii_power_quotient.verdict = a_ok && c.pass ? Verdict::pass : Verdict::fail;
      rep.iii_power_quotient.worst_ratio = c.worst_ratio;
      rep.iii_power_quotient.detail = "alpha=" + std::to_string(found);
    }
  }
  return rep;
}

struct ScalePassingVerdict {
  bool pass = true;
  int witness_k = -1;
  double worst_ratio = 0.0;
};

/// theta(mu^k) <= (2 Q^2 / mu) theta(mu^{k+1}) for every k <= k_max with mu^k <= delta.
inline ScalePassingVerdict check_theta_scale_passing(const Modulus& w, double beta_star, double mu, int k_max) {
  ScalePassingVerdict v;
  const double c = 2.0 * w.Q * w.Q / mu;
  for (int k = 0; k <= k_max; ++k) {
    const double t = std::pow(mu, k);
    if (t > w.delta * (1 + 1e-12)) continue;
    const double lhs = theta(w, beta_star, t), rhs = c * theta(w, beta_star, mu * t);
    v.worst_ratio = std::max(v.worst_ratio, lhs / rhs);
    if (lhs > rhs * (1 + 1e-12) && v.pass) {
      v.pass = false;
      v.witness_k = k;
    }
  }
  return v;
}

struct ModuliSuiteReport {
  QuotientVerdict quotient;
  CompatibilityVerdict compatibility;
  double dini_rel_error = 0.0;  // closed form against quadrature, NaN when no closed form
  Lemma61Report lemma;
  ScalePassingVerdict theta_passing;
  bool pass() const {
    auto ok = [](Verdict v) { return v == Verdict::pass || v == Verdict::not_applicable; };
    return quotient.pass && compatibility.pass && !(dini_rel_error > 1e-9) && ok(lemma.i_bound.verdict) &&
           ok(lemma.i_dilation.verdict) && ok(lemma.i_scale_passing.verdict) && ok(lemma.ii_series.verdict) &&
           ok(lemma.iii_power_quotient.verdict) && theta_passing.pass;
  }
};

/**
 * Every modulus check on one family. The series item of the lemma uses
 * mu_series = min(delta, 1/e) with k = 1; the scale-passing items use mu.
 */
inline ModuliSuiteReport moduli_suite(const Modulus& w, double beta, double mu, double Theta = 2.0,
                                      double beta_star = 0.5, std::size_t samples = 1000) {
  ModuliSuiteReport rep;
  rep.quotient = check_q_quotient(w, w.Q, samples);
  rep.compatibility = check_beta_compatibility_sampled(w, beta, samples);
  if (w.is_dini()) {
    const auto ts = geometric_samples(w.delta, samples);
    bool closed = true;
    for (std::size_t i = 0; i < ts.size() && closed; i += std::max<std::size_t>(1, ts.size() / 100)) {
      const double c = dini_integral_closed(w, ts[i]);
      if (std::isnan(c)) {
        closed = false;
        break;
      }
      const double n = dini_integral_numeric(w, ts[i]);
      if (c != 0.0) rep.dini_rel_error = std::max(rep.dini_rel_error, std::abs(n - c) / std::abs(c));
    }
    if (!closed) rep.dini_rel_error = std::numeric_limits<double>::quiet_NaN();
  }
  const double mu_series = std::min(w.delta, std::exp(-1.0));
  rep.lemma = lemma61(w, Theta, mu_series, 1, samples);
  const auto scale = lemma61(w, Theta, mu, 0, samples);
  rep.lemma.i_scale_passing = scale.i_scale_passing;
  rep.theta_passing = check_theta_scale_passing(w, beta_star, mu, 60);
  return rep;
}

}  // namespace pucci
