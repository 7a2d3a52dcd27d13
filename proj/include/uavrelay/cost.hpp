#pragma once

#include <functional>
#include <string>
#include <vector>

#include "uavrelay/channel.hpp"
#include "uavrelay/geometry.hpp"
#include "uavrelay/terrain.hpp"

namespace uavrelay {

enum class CostKind { af_outage, df_rate };

/// Cost law plus effective link powers. Powers are linear and already
/// normalized by the noise floor, i.e. p * gain is a plain SNR.
struct CostParams {
  CostKind kind = CostKind::df_rate;
  double p_u = 1.0;  ///< user/relay transmit power over noise
  double p_b = 1.0;  ///< BS transmit power over noise
};

/**
 * Placement cost for given mean link gains.
 *  - af_outage: 1/(p_u g_u) + 1/(p_b g_b), the high-SNR outage scale of an
 *    amplify-and-forward relay (decreasing in either gain).
 *  - df_rate: max{-log2(1 + p_b g_b), -log2(1 + p_u g_u)}, the negated
 *    bottleneck rate of a decode-and-forward relay.
 */
double eval_cost(const CostParams& c, double g_u, double g_b);

/// Decode-and-forward relay throughput in bps/Hz: half the bottleneck link
/// rate (the relay transmits and receives in separate slots).
double df_throughput(const CostParams& c, double g_u, double g_b);

/// Cost at relay position x with the user-link segment taken from the oracle.
double true_cost(const CostParams& c, const SegmentModel& m, const Heights& h, const Point2& bs,
                 const Point2& user, const SegmentOracle& oracle, const Point2& x);

struct CostGrad {
  double d_rho = 0.0;
  double d_theta = 0.0;
};

/**
 * F_k: the placement cost over the user->BS polar frame under the pretense
 * that the user link everywhere obeys segment k's power law. The search
 * follows level sets of this smooth surrogate while the true link degree
 * exceeds k.
 */
class FictitiousCost {
 public:
  FictitiousCost(const CostParams& c, const SegmentModel& m, SegmentId k, double L,
                 const Heights& h);

  double eval(const PolarCoord& p) const;

  /// Analytic partials wrt rho and theta. For df_rate the partial of the
  /// active branch is returned; at exact ties the one-sided (from-below)
  /// convention gives the componentwise minimum of the branch partials.
  CostGrad grad(const PolarCoord& p) const;

  SegmentId k() const { return k_; }
  double L() const { return L_; }
  const Heights& heights() const { return h_; }
  const CostParams& params() const { return c_; }

  double gain_user_at(double rho) const;
  double gain_bs_at(double rho, double theta) const;

 private:
  CostParams c_;
  double alpha0_, beta0_;
  double alpha_k_, beta_k_;
  SegmentId k_;
  double L_;
  Heights h_;
};

/// One user cluster served through a single shared relay.
struct UserCluster {
  Point2 center;
  std::vector<Point2> users;
};

/**
 * Cost of serving a cluster through its virtual stand-in user: the user link
 * is modeled from the relay to the cluster center, with the obstruction
 * degree chosen by majority vote over the member oracles (ties toward the
 * smaller degree).
 */
double virtual_user_cost(const CostParams& c, const SegmentModel& m, const Heights& h,
                         const Point2& bs, const UserCluster& cluster,
                         const std::vector<const SegmentOracle*>& members, const Point2& x);

/// Mean decode-and-forward throughput over the cluster members, each with its
/// own true link degree.
double sum_rate(const CostParams& c, const SegmentModel& m, const Heights& h, const Point2& bs,
                const std::vector<Point2>& users,
                const std::vector<const SegmentOracle*>& oracles, const Point2& x);

struct ConditionReport {
  bool passed = false;
  double worst_margin = 0.0;  ///< most negative slack seen (>= 0 when passed)
  double at_x = 0.0;
  double at_y = 0.0;
  std::string detail;
};

using Cost2d = std::function<double(double, double)>;

/// Checks that f is decreasing in each gain, has (numerically) zero cross
/// second derivative, and satisfies x f_xx + 2 f_x >= 0 in each variable over
/// a log-spaced gain grid.
ConditionReport check_condition1_fn(const Cost2d& f, double lo = 1e-6, double hi = 1e6,
                                    int n = 13);

/// Checks that f decomposes as max{f1(x), f2(y)} with both slices decreasing,
/// reconstructing the slices from the far edges of the grid.
ConditionReport check_condition2_fn(const Cost2d& f, double lo = 1e-6, double hi = 1e6,
                                    int n = 13);

ConditionReport check_condition1(const CostParams& c);
ConditionReport check_condition2(const CostParams& c);

}  // namespace uavrelay
