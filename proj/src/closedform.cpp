#include "deltaspec/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deltaspec/geometry.hpp"

namespace deltaspec {

namespace {

using ld = long double;
constexpr ld sqrt3 = 1.7320508075688772935274463415058723669L;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(what) + " must be strictly positive");
}

void require_angle(double phi) {
  if (!(phi > 0.0 && phi <= std::numbers::pi)) throw Error("angle must lie in (0, pi]");
}

ld m1(ld w, ld t) {
  const ld a = 4.0L - w * (1.0L - t);
  return a * a / 3.0L;
}

ld m2(ld w, ld t) {
  const ld b = 4.0L + 3.0L * w / t;
  return b * b / 4.0L;
}

ld omega_star_ld(ld t) { return (8.0L - 4.0L * sqrt3) * t / (3.0L * sqrt3 + 2.0L * (1.0L - t) * t); }

// min over omega of max{M1, M2}; analytic crossing for t in (0,1).
ld inner_analytic(ld t) { return m2(omega_star_ld(t), t); }

// Same inner minimum without the crossing formula: golden section on the
// convex function omega -> max{M1, M2} over [0, 1].
ld inner_direct(ld t) {
  const ld g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  auto f = [&](ld w) { return std::max(m1(w, t), m2(w, t)); };
  ld a = 0.0L, b = 1.0L;
  ld c = b - g * (b - a), d = a + g * (b - a);
  ld fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-18L; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min({f(a), f(b), f(0.5L * (a + b))});
}

}  // namespace

HalfplaneBottoms halfplane_bottoms(double alpha, double beta) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  return {-alpha * alpha / 4.0, -4.0 / (beta * beta)};
}

bool ordering_impossible(double alpha, double beta) {
  const auto b = halfplane_bottoms(alpha, beta);
  return b.delta_prime > b.delta;
}

double wedge_trace_bound(double gamma, double phi) {
  require_positive(gamma, "gamma");
  require_angle(phi);
  const double s = std::sin(phi / 2.0);
  return -gamma * gamma / (s * s);
}

double wedge_trace_bound_bisector(double gamma, double phi) {
  require_positive(gamma, "gamma");
  require_angle(phi);
  return -gamma * gamma;
}

double star_delta_bottom(double alpha) {
  require_positive(alpha, "alpha");
  return -alpha * alpha / 3.0;
}

MValues m_functions(double omega, double t) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw Error("omega must lie in [0, 1]");
  require_positive(t, "t");
  return {static_cast<double>(m1(omega, t)), static_cast<double>(m2(omega, t))};
}

double omega_star(double t) {
  if (!(t > 0.0 && t < 1.0)) throw Error("t must lie in (0, 1)");
  return static_cast<double>(omega_star_ld(t));
}

MinimaxReport minimax_star(double precision, int grid_points) {
  if (!(precision >= 1e-14)) throw Error("precision must be at least 1e-14");
  if (grid_points < 10) throw Error("grid needs at least 10 points");
  MinimaxReport r;
  // Golden-section search for the minimiser of the inner minimum over (0,1).
  const ld invphi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  ld a = 1e-6L, b = 1.0L - 1e-6L;
  ld c = b - invphi * (b - a), d = a + invphi * (b - a);
  ld fc = inner_analytic(c), fd = inner_analytic(d);
  while (b - a > static_cast<ld>(precision)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = inner_analytic(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = inner_analytic(d);
    }
    if (c >= d) break;
  }
  const ld t = 0.5L * (a + b);
  r.t_star = static_cast<double>(t);
  r.omega_star_at_t = static_cast<double>(omega_star_ld(t));
  const ld value = std::min<ld>(inner_analytic(t), 16.0L / 3.0L);
  // For t >= 1 both M1 and M2 are non-decreasing in omega, so the inner minimum sits at omega = 0.
  r.branch_t_ge_1 = static_cast<double>(std::max(m1(0.0L, 1.0L), m2(0.0L, 1.0L)));
  r.value = static_cast<double>(value);
  r.value_at_half = static_cast<double>(inner_analytic(0.5L));
  r.c_star_derived = static_cast<double>(std::sqrt(3.0L * value));
  const ld printed = (12.0L * sqrt3 - 2.0L) / 9.0L;
  r.paper_printed_value = static_cast<double>(printed * printed);
  r.paper_printed_c_star = static_cast<double>(4.0L - 2.0L * sqrt3 / 9.0L);
  r.crossing_residual = static_cast<double>(std::abs(m1(omega_star_ld(t), t) - m2(omega_star_ld(t), t)));

  ld best = 16.0L / 3.0L, best_t = 1.0L;
  for (int i = 1; i < grid_points; ++i) {
    const ld tt = static_cast<ld>(i) / grid_points;
    const ld v = inner_direct(tt);
    if (v < best) {
      best = v;
      best_t = tt;
    }
  }
  for (ld tt : {1.0L, 1.5L, 2.0L, 10.0L, 1000.0L})
    if (inner_direct(tt) < 16.0L / 3.0L - 1e-15L) throw Error("minimax: branch t >= 1 falls below 16/3");
  r.grid_value = static_cast<double>(best);
  r.grid_t = static_cast<double>(best_t);
  r.oracle_gap = static_cast<double>(std::abs(best - value));
  if (r.oracle_gap > 1e-8) throw Error("minimax: analytic path and grid oracle disagree");
  r.discrepancy = std::abs(r.value - r.paper_printed_value) > 1e-9 * r.value;
  return r;
}

IntervalResult interval_delta_prime(double beta, double l) {
  require_positive(beta, "beta");
  require_positive(l, "l");
  const ld B = beta, L = l;
  auto f = [&](ld k) { return B * k * std::tanh(k * L) - 2.0L; };
  ld lo = 2.0L / B, hi = 2.0L / B;
  ld k = lo;
  if (f(lo) >= 0.0L) {
    // tanh(2l/beta) rounds to 1: one fixed-point step of k = (2/beta) coth(kl) is exact to precision.
    k = 2.0L / (B * std::tanh(lo * L));
  } else {
    for (int i = 0; f(hi) <= 0.0L; ++i) {
      hi *= 2.0L;
      if (i > 200) throw Error("interval root bracketing failed");
    }
    for (int i = 0; i < 400; ++i) {
      const ld mid = 0.5L * (lo + hi);
      if (mid == lo || mid == hi) break;
      (f(mid) < 0.0L ? lo : hi) = mid;
    }
    k = 0.5L * (lo + hi);
  }
  IntervalResult r;
  r.k_rate = static_cast<double>(k);
  r.epsilon = static_cast<double>(-k * k);
  r.residual = static_cast<double>(std::abs(B * k - 2.0L / std::tanh(k * L)));
  // k - 2/beta = (2/beta)(coth(kl) - 1) = (2/beta) 2/(e^{2kl} - 1), free of cancellation.
  const ld excess = (2.0L / B) * 2.0L / std::expm1(2.0L * k * L);
  r.gap_below_threshold = static_cast<double>(excess * (k + 2.0L / B));
  return r;
}

double interval_fem_oracle(double beta, double l, int elements) {
  require_positive(beta, "beta");
  require_positive(l, "l");
  if (elements < 1) throw Error("element count must be positive");
  const int n = 2 * (elements + 1);
  const ld h = static_cast<ld>(l) / elements;
  // Tridiagonal pencil: nodes 0..N on [-l,0], N+1..2N+1 on [0,l].
  std::vector<ld> ad(n, 0.0L), ao(n, 0.0L), md(n, 0.0L), mo(n, 0.0L);  // ao[i]: (i, i+1)
  for (int side = 0; side < 2; ++side) {
    const int base = side * (elements + 1);
    for (int e = 0; e < elements; ++e) {
      const int i = base + e;
      ad[i] += 1.0L / h;
      ad[i + 1] += 1.0L / h;
      ao[i] += -1.0L / h;
      md[i] += h / 3.0L;
      md[i + 1] += h / 3.0L;
      mo[i] += h / 6.0L;
    }
  }
  const int left0 = elements, right0 = elements + 1;
  ad[left0] -= 1.0L / beta;
  ad[right0] -= 1.0L / beta;
  ao[left0] += 1.0L / beta;
  // Number of eigenvalues below sigma = negative pivots of A - sigma M.
  auto count_below = [&](ld sigma) {
    int neg = 0;
    ld d = ad[0] - sigma * md[0];
    if (d < 0.0L) ++neg;
    for (int i = 1; i < n; ++i) {
      const ld off = ao[i - 1] - sigma * mo[i - 1];
      if (d == 0.0L) d = 1e-300L;
      d = ad[i] - sigma * md[i] - off * off / d;
      if (d < 0.0L) ++neg;
    }
    return neg;
  };
  ld lo = -1.0L, hi = 0.0L;
  while (count_below(lo) > 0) lo *= 2.0L;
  if (count_below(hi) == 0) throw Error("interval FEM has no negative eigenvalue");
  for (int i = 0; i < 200 && hi - lo > 1e-17L * std::abs(lo); ++i) {
    const ld mid = 0.5L * (lo + hi);
    (count_below(mid) > 0 ? hi : lo) = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

AbcResult abc_inequality_check(const Vectors3& theta, const Vectors3& eta, double omega, double t) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw Error("omega must lie in [0, 1]");
  require_positive(t, "t");
  const std::size_t m = theta[0].size();
  if (m == 0) throw Error("vectors must have positive dimension");
  for (int k = 0; k < 3; ++k)
    if (theta[k].size() != m || eta[k].size() != m) throw Error("dimension mismatch");
  long double s = 0.0L, nt = 0.0L, ne = 0.0L;
  for (int k = 0; k < 3; ++k) {
    const int j = (k + 1) % 3;
    for (std::size_t i = 0; i < m; ++i) {
      const long double v = static_cast<long double>(theta[k][i]) - theta[j][i] + eta[k][i] + eta[j][i];
      s += v * v;
      nt += static_cast<long double>(theta[k][i]) * theta[k][i];
      ne += static_cast<long double>(eta[k][i]) * eta[k][i];
    }
  }
  const long double bound = (4.0L - omega * (1.0L - t)) * nt + (4.0L + 3.0L * omega / t) * ne;
  AbcResult r;
  r.s = static_cast<double>(s);
  r.bound = static_cast<double>(bound);
  r.holds = s <= bound + 1e-12L * std::max(s, bound);
  return r;
}

}  // namespace deltaspec
