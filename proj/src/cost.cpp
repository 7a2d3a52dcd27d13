#include "uavrelay/cost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace uavrelay {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

double eval_cost(const CostParams& c, double g_u, double g_b) {
  if (!(g_u > 0.0) || !(g_b > 0.0))
    throw std::domain_error("eval_cost: link gains must be positive");
  if (c.kind == CostKind::af_outage) return 1.0 / (c.p_u * g_u) + 1.0 / (c.p_b * g_b);
  return std::max(-std::log2(1.0 + c.p_b * g_b), -std::log2(1.0 + c.p_u * g_u));
}

double df_throughput(const CostParams& c, double g_u, double g_b) {
  return 0.5 * std::min(std::log2(1.0 + c.p_b * g_b), std::log2(1.0 + c.p_u * g_u));
}

double true_cost(const CostParams& c, const SegmentModel& m, const Heights& h, const Point2& bs,
                 const Point2& user, const SegmentOracle& oracle, const Point2& x) {
  const double g_u = gain_user(x, user, oracle.segment(x), m, h);
  const double g_b = gain_bs(x, bs, m, h);
  return eval_cost(c, g_u, g_b);
}

FictitiousCost::FictitiousCost(const CostParams& c, const SegmentModel& m, SegmentId k, double L,
                               const Heights& h)
    : c_(c),
      alpha0_(m.alpha0),
      beta0_(m.beta0()),
      alpha_k_(m.alpha(k)),
      beta_k_(m.beta(k)),
      k_(k),
      L_(L),
      h_(h) {
  if (k < 1 || k > m.num_segments())
    throw std::invalid_argument("fictitious cost: segment id out of range");
  if (!(L > 0.0)) throw std::invalid_argument("fictitious cost: user-BS separation must be > 0");
}

double FictitiousCost::gain_user_at(double rho) const {
  return beta_k_ * std::pow(dist_to_user_polar(rho, h_), -alpha_k_);
}

double FictitiousCost::gain_bs_at(double rho, double theta) const {
  return beta0_ * std::pow(dist_to_bs_polar(rho, theta, L_, h_), -alpha0_);
}

double FictitiousCost::eval(const PolarCoord& p) const {
  return eval_cost(c_, gain_user_at(p.rho), gain_bs_at(p.rho, p.theta));
}

CostGrad FictitiousCost::grad(const PolarCoord& p) const {
  const double du = dist_to_user_polar(p.rho, h_);
  const double db = dist_to_bs_polar(p.rho, p.theta, L_, h_);
  const double g_u = beta_k_ * std::pow(du, -alpha_k_);
  const double g_b = beta0_ * std::pow(db, -alpha0_);

  const double dgu_drho = -alpha_k_ * g_u * p.rho / (du * du);
  const double proj = p.rho - L_ * std::cos(p.theta);
  const double dgb_drho = -alpha0_ * g_b * proj / (db * db);
  const double dgb_dtheta = -alpha0_ * g_b * p.rho * L_ * std::sin(p.theta) / (db * db);

  if (c_.kind == CostKind::af_outage) {
    const double df_dgu = -1.0 / (c_.p_u * g_u * g_u);
    const double df_dgb = -1.0 / (c_.p_b * g_b * g_b);
    return {df_dgu * dgu_drho + df_dgb * dgb_drho, df_dgb * dgb_dtheta};
  }

  const double phi_u = -std::log2(1.0 + c_.p_u * g_u);
  const double phi_b = -std::log2(1.0 + c_.p_b * g_b);
  const double dphiu_dgu = -c_.p_u / ((1.0 + c_.p_u * g_u) * kLn2);
  const double dphib_dgb = -c_.p_b / ((1.0 + c_.p_b * g_b) * kLn2);
  const CostGrad user_branch{dphiu_dgu * dgu_drho, 0.0};
  const CostGrad bs_branch{dphib_dgb * dgb_drho, dphib_dgb * dgb_dtheta};
  if (phi_b > phi_u) return bs_branch;
  if (phi_u > phi_b) return user_branch;
  return {std::min(user_branch.d_rho, bs_branch.d_rho),
          std::min(user_branch.d_theta, bs_branch.d_theta)};
}

double virtual_user_cost(const CostParams& c, const SegmentModel& m, const Heights& h,
                         const Point2& bs, const UserCluster& cluster,
                         const std::vector<const SegmentOracle*>& members, const Point2& x) {
  const MajorityVoteOracle vote(members);
  const double g_u = gain_user(x, cluster.center, vote.segment(x), m, h);
  return eval_cost(c, g_u, gain_bs(x, bs, m, h));
}

double sum_rate(const CostParams& c, const SegmentModel& m, const Heights& h, const Point2& bs,
                const std::vector<Point2>& users,
                const std::vector<const SegmentOracle*>& oracles, const Point2& x) {
  if (users.empty() || users.size() != oracles.size())
    throw std::invalid_argument("sum_rate: users and oracles must pair up");
  const double g_b = gain_bs(x, bs, m, h);
  double total = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const double g_u = gain_user(x, users[i], oracles[i]->segment(x), m, h);
    total += df_throughput(c, g_u, g_b);
  }
  return total / static_cast<double>(users.size());
}

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  return g;
}

void note_failure(ConditionReport& r, double margin, double x, double y, const char* what) {
  if (!r.passed) return;
  r.passed = false;
  r.worst_margin = margin;
  r.at_x = x;
  r.at_y = y;
  r.detail = what;
}

}  // namespace

ConditionReport check_condition1_fn(const Cost2d& f, double lo, double hi, int n) {
  ConditionReport rep;
  rep.passed = true;
  rep.detail = "ok";
  const std::vector<double> grid = log_grid(lo, hi, n);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (double x : grid) {
    for (double y : grid) {
      const double hx = 1e-4 * x, hy = 1e-4 * y;
      const double f00 = f(x, y);
      const double fpx = f(x + hx, y), fmx = f(x - hx, y);
      const double fpy = f(x, y + hy), fmy = f(x, y - hy);

      // Monotone decreasing in each gain.
      const double mono_tol = 1e-9 * (std::fabs(f00) + 1e-12);
      if (fpx - f00 > mono_tol) note_failure(rep, f00 - fpx, x, y, "not decreasing in g_u");
      if (fpy - f00 > mono_tol) note_failure(rep, f00 - fpy, x, y, "not decreasing in g_b");

      // Cross second derivative must vanish: four-point mixed difference at
      // the round-off floor of the four evaluations.
      const double fpp = f(x + hx, y + hy);
      const double mixed = fpp - fpx - fpy + f00;
      const double floor4 =
          64.0 * eps * (std::fabs(fpp) + std::fabs(fpx) + std::fabs(fpy) + std::fabs(f00));
      if (std::fabs(mixed) > floor4)
        note_failure(rep, floor4 - std::fabs(mixed), x, y, "coupled cross derivative");

      // x f_xx + 2 f_x >= 0 (and the same in y).  Costs that are exactly
      // 1/(P v) sit on the boundary of this test (the combination is zero),
      // so the tolerance must cover the round-off floor of the second
      // difference, eps * |f| * v / h^2; genuine violations scale with |f|
      // itself and stay far above that floor.
      const double fx = (fpx - fmx) / (2.0 * hx);
      const double fxx = (fpx - 2.0 * f00 + fmx) / (hx * hx);
      const double ix = x * fxx + 2.0 * fx;
      const double fbar_x = std::fabs(fpx) + std::fabs(f00) + std::fabs(fmx);
      const double tol_x = 1e-5 * (std::fabs(x * fxx) + 2.0 * std::fabs(fx)) +
                           16.0 * eps * fbar_x * (x / (hx * hx) + 1.0 / hx);
      if (ix < -tol_x) note_failure(rep, ix, x, y, "x f_xx + 2 f_x negative");

      const double fy = (fpy - fmy) / (2.0 * hy);
      const double fyy = (fpy - 2.0 * f00 + fmy) / (hy * hy);
      const double iy = y * fyy + 2.0 * fy;
      const double fbar_y = std::fabs(fpy) + std::fabs(f00) + std::fabs(fmy);
      const double tol_y = 1e-5 * (std::fabs(y * fyy) + 2.0 * std::fabs(fy)) +
                           16.0 * eps * fbar_y * (y / (hy * hy) + 1.0 / hy);
      if (iy < -tol_y) note_failure(rep, iy, x, y, "y f_yy + 2 f_y negative");
    }
  }
  return rep;
}

ConditionReport check_condition2_fn(const Cost2d& f, double lo, double hi, int n) {
  ConditionReport rep;
  rep.passed = true;
  rep.detail = "ok";
  const std::vector<double> grid = log_grid(lo, hi, n);
  const double far = 10.0 * hi;

  // Candidate decomposition slices read off the far edges.
  std::vector<double> f1(grid.size()), f2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f1[i] = f(grid[i], far);
    f2[i] = f(far, grid[i]);
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double tol1 = 1e-9 * (std::fabs(f1[i]) + 1e-12);
    if (f1[i + 1] - f1[i] > tol1)
      note_failure(rep, f1[i] - f1[i + 1], grid[i + 1], far, "x-slice not decreasing");
    const double tol2 = 1e-9 * (std::fabs(f2[i]) + 1e-12);
    if (f2[i + 1] - f2[i] > tol2)
      note_failure(rep, f2[i] - f2[i + 1], far, grid[i + 1], "y-slice not decreasing");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = f(grid[i], grid[j]);
      const double w = std::max(f1[i], f2[j]);
      const double tol = 1e-9 * (1.0 + std::fabs(v));
      if (std::fabs(v - w) > tol)
        note_failure(rep, tol - std::fabs(v - w), grid[i], grid[j],
                     "not max{f1(g_u), f2(g_b)} separable");
    }
  }
  return rep;
}

ConditionReport check_condition1(const CostParams& c) {
  return check_condition1_fn([&c](double x, double y) { return eval_cost(c, x, y); });
}

ConditionReport check_condition2(const CostParams& c) {
  return check_condition2_fn([&c](double x, double y) { return eval_cost(c, x, y); });
}

}  // namespace uavrelay
