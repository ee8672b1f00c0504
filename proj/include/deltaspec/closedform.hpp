#ifndef DELTASPEC_CLOSEDFORM_HPP
#define DELTASPEC_CLOSEDFORM_HPP

#include <array>
#include <utility>
#include <vector>

namespace deltaspec {

struct HalfplaneBottoms {
  double delta;        // -alpha^2 / 4
  double delta_prime;  // -4 / beta^2
};

HalfplaneBottoms halfplane_bottoms(double alpha, double beta);
/// beta > 4/alpha, equivalently -4/beta^2 > -alpha^2/4: no unitary ordering exists.
bool ordering_impossible(double alpha, double beta);

/// -gamma^2 / sin^2(phi/2).
double wedge_trace_bound(double gamma, double phi);
/// -gamma^2, for functions vanishing on the bisector.
double wedge_trace_bound_bisector(double gamma, double phi);

/// -alpha^2 / 3.
double star_delta_bottom(double alpha);

struct MValues {
  double m1;
  double m2;
};

/// M1 = (4 - omega(1-t))^2 / 3, M2 = (4 + 3 omega / t)^2 / 4.
MValues m_functions(double omega, double t);
/// Crossing point (8 - 4 sqrt3) t / (3 sqrt3 + 2 (1-t) t) of M1 and M2, t in (0,1).
double omega_star(double t);

struct MinimaxReport {
  double t_star = 0.0;
  double omega_star_at_t = 0.0;
  double value = 0.0;
  double c_star_derived = 0.0;
  double paper_printed_value = 0.0;
  double paper_printed_c_star = 0.0;
  double branch_t_ge_1 = 0.0;
  double value_at_half = 0.0;
  double grid_value = 0.0;
  double grid_t = 0.0;
  /// |analytic - grid|.
  double oracle_gap = 0.0;
  /// |M1 - M2| at (omega*, t*).
  double crossing_residual = 0.0;
  bool discrepancy = false;
};

/// min over t > 0 of min over omega in [0,1] of max{M1, M2}.
/// Golden-section search on the analytic crossing, cross-checked against a dense
/// grid in t with an independent bisection in omega per grid point.
/// Throws if the two paths disagree by more than 1e-8.
MinimaxReport minimax_star(double precision = 1e-14, int grid_points = 1000000);

struct IntervalResult {
  double epsilon = 0.0;
  double k_rate = 0.0;
  /// |beta k - 2 coth(k l)|.
  double residual = 0.0;
  /// -4/beta^2 - epsilon, evaluated without cancellation; strictly positive.
  double gap_below_threshold = 0.0;
};

/// Principal eigenvalue of -d^2/dx^2 on (-l, l) with Neumann ends and a
/// delta'-interaction of strength beta at 0; ground state sign(x) cosh(k(l-|x|)).
IntervalResult interval_delta_prime(double beta, double l);
/// Same eigenvalue from broken P1 elements (`elements` per half, node 0 doubled),
/// by Sturm-count bisection on the tridiagonal pencil.
double interval_fem_oracle(double beta, double l, int elements);

struct AbcResult {
  double s = 0.0;
  double bound = 0.0;
  bool holds = false;
};

using Vectors3 = std::array<std::vector<double>, 3>;
/// S = sum_k |theta_k - theta_{k+1} + eta_k + eta_{k+1}|^2 against
/// (4 - omega(1-t)) sum |theta_k|^2 + (4 + 3 omega/t) sum |eta_k|^2.
AbcResult abc_inequality_check(const Vectors3& theta, const Vectors3& eta, double omega, double t);

}  // namespace deltaspec

#endif  // DELTASPEC_CLOSEDFORM_HPP
