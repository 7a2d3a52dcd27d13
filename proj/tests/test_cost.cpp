/// Cost laws: hand-checked outage and bottleneck-rate values, the smooth
/// per-segment surrogate with its analytic gradient, cluster scoring, and the
/// structural shape checks with positive and negative controls.

#include <cmath>

#include "doctest.h"
#include "uavrelay/cost.hpp"
#include "uavrelay/rng.hpp"
#include "uavrelay/verify.hpp"

using namespace uavrelay;

namespace {

CostParams af_params(double p_u = 100.0, double p_b = 400.0) {
  return {CostKind::af_outage, p_u, p_b};
}

CostParams df_params(double p_u = 100.0, double p_b = 400.0) {
  return {CostKind::df_rate, p_u, p_b};
}

class ConstOracle final : public SegmentOracle {
 public:
  ConstOracle(SegmentId s, int k) : s_(s), k_(k) {}
  SegmentId segment(const Point2&) const override { return s_; }
  int num_segments() const override { return k_; }

 private:
  SegmentId s_;
  int k_;
};

}  // namespace

TEST_SUITE("cost") {
  TEST_CASE("hand-checked cost values") {
    // Outage scale: sum of the reciprocal link SNRs.
    CHECK(eval_cost(af_params(), 0.5, 0.25) == doctest::Approx(1.0 / 50.0 + 1.0 / 100.0));
    // Bottleneck rate: the worse link decides, negated to make it a cost.
    CHECK(eval_cost(df_params(), 0.5, 0.25) == doctest::Approx(-std::log2(1.0 + 50.0)));
    CHECK(eval_cost(df_params(), 2.0, 0.0001) == doctest::Approx(-std::log2(1.0 + 0.04)));
    // Relayed throughput halves the bottleneck rate for the two hops.
    CHECK(df_throughput(df_params(), 0.5, 0.25) == doctest::Approx(0.5 * std::log2(51.0)));
    CHECK(df_throughput(df_params(), 2.0, 0.0001) == doctest::Approx(0.5 * std::log2(1.04)));
    CHECK_THROWS_AS(eval_cost(af_params(), 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(eval_cost(df_params(), 1.0, -2.0), std::domain_error);
  }

  TEST_CASE("costs fall when either gain improves") {
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
      const double gu = std::pow(10.0, rng.uniform(-12.0, -3.0));
      const double gb = std::pow(10.0, rng.uniform(-12.0, -3.0));
      for (const CostParams& c : {af_params(), df_params()}) {
        CHECK(eval_cost(c, gu * 1.5, gb) <= eval_cost(c, gu, gb));
        CHECK(eval_cost(c, gu, gb * 1.5) <= eval_cost(c, gu, gb));
      }
    }
  }

  TEST_CASE("true cost evaluates the oracle's segment at the query point") {
    const SegmentModel m = reference_model(3);
    const Heights h{50.0, 45.0, 0.0};
    const Point2 user{0.0, 0.0}, bs{400.0, 0.0}, x{120.0, 50.0};
    for (SegmentId s = 1; s <= 3; ++s) {
      const ConstOracle oracle(s, 3);
      const double expect =
          eval_cost(af_params(), gain_user(x, user, s, m, h), gain_bs(x, bs, m, h));
      CHECK(true_cost(af_params(), m, h, bs, user, oracle, x) == doctest::Approx(expect));
    }
    // Deeper obstruction can only make the cost worse.
    const ConstOracle o1(1, 3), o3(3, 3);
    CHECK(true_cost(df_params(), m, h, bs, user, o1, x) <
          true_cost(df_params(), m, h, bs, user, o3, x));
  }

  TEST_CASE("per-segment surrogate matches the plain cost on its own segment") {
    const SegmentModel m = reference_model(3);
    const Heights h{50.0, 45.0, 0.0};
    const double L = 500.0;
    Rng rng(404);
    for (SegmentId k = 1; k <= 3; ++k) {
      const FictitiousCost F(af_params(), m, k, L, h);
      const FictitiousCost G(df_params(), m, k, L, h);
      for (int i = 0; i < 200; ++i) {
        const PolarCoord p{rng.uniform(0.0, 1.2 * L), rng.uniform(-M_PI, M_PI)};
        const double gu = segment_gain(m, k, dist_to_user_polar(p.rho, h));
        const double gb = m.beta0() * std::pow(dist_to_bs_polar(p.rho, p.theta, L, h), -m.alpha0);
        CHECK(F.eval(p) == doctest::Approx(eval_cost(af_params(), gu, gb)).epsilon(1e-12));
        CHECK(G.eval(p) == doctest::Approx(eval_cost(df_params(), gu, gb)).epsilon(1e-12));
        CHECK(F.gain_user_at(p.rho) == doctest::Approx(gu).epsilon(1e-12));
        CHECK(F.gain_bs_at(p.rho, p.theta) == doctest::Approx(gb).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(FictitiousCost(af_params(), m, 0, L, h), std::invalid_argument);
    CHECK_THROWS_AS(FictitiousCost(af_params(), m, 4, L, h), std::invalid_argument);
    CHECK_THROWS_AS(FictitiousCost(af_params(), m, 1, 0.0, h), std::invalid_argument);
  }

  TEST_CASE("analytic gradient matches central differences away from the rate kink") {
    const SegmentModel m = reference_model(2);
    const Heights h{50.0, 45.0, 0.0};
    const double L = 600.0;
    // Link-budget powers (33 dBm over a -80 dBm floor). With toy powers the
    // rate cost degenerates to log2(1+x) at x ~ 1e-7, whose evaluation noise
    // (the rounding of 1+x at magnitude 1) swamps any finite difference.
    const double p_eff = std::pow(10.0, 11.3);
    Rng rng(2025);
    for (const CostKind kind : {CostKind::af_outage, CostKind::df_rate}) {
      const CostParams c{kind, p_eff, p_eff};
      const FictitiousCost F(c, m, 1, L, h);
      int checked = 0;
      for (int i = 0; checked < 100 && i < 1000; ++i) {
        const PolarCoord p{rng.uniform(5.0, 0.95 * L), rng.uniform(-1.4, 1.4)};
        if (c.kind == CostKind::df_rate) {
          // Skip the bottleneck switchover, where the surface has a crease.
          const double bu = -std::log2(1.0 + c.p_u * F.gain_user_at(p.rho));
          const double bb = -std::log2(1.0 + c.p_b * F.gain_bs_at(p.rho, p.theta));
          if (std::fabs(bu - bb) < 1e-3 * (std::fabs(bu) + std::fabs(bb))) continue;
        }
        const CostGrad g = F.grad(p);
        const double f0 = F.eval(p);
        const double hr = 1e-5 * (p.rho + 10.0), ht = 1e-5;
        const double fd_rho = (F.eval({p.rho + hr, p.theta}) - F.eval({p.rho - hr, p.theta})) /
                              (2.0 * hr);
        const double fd_theta = (F.eval({p.rho, p.theta + ht}) - F.eval({p.rho, p.theta - ht})) /
                                (2.0 * ht);
        const double tol =
            1e-5 * (std::fabs(g.d_rho) + std::fabs(g.d_theta)) + 1e-9 * std::fabs(f0);
        CHECK(std::fabs(g.d_rho - fd_rho) < tol);
        CHECK(std::fabs(g.d_theta - fd_theta) < tol);
        ++checked;
      }
      CHECK(checked == 100);
    }
  }

  TEST_CASE("rate surrogate gradient follows the bottleneck branch") {
    const SegmentModel m = reference_model(2);
    const Heights h{50.0, 45.0, 0.0};
    const double L = 600.0;
    const CostParams c = df_params();
    const FictitiousCost F(c, m, 1, L, h);

    // Near the user the BS hop is the bottleneck: its gradient has a genuine
    // theta component off the axis.
    const PolarCoord near_user{30.0, 0.5};
    REQUIRE(-std::log2(1.0 + c.p_b * F.gain_bs_at(30.0, 0.5)) >
            -std::log2(1.0 + c.p_u * F.gain_user_at(30.0)));
    const CostGrad gb = F.grad(near_user);
    CHECK(gb.d_theta != 0.0);
    CHECK(gb.d_rho < 0.0);  // stepping toward the BS helps the weak hop

    // Near the BS the user hop is the bottleneck: the surrogate depends on
    // rho alone, so the theta slope vanishes identically.
    const PolarCoord near_bs{0.95 * L, 0.3};
    REQUIRE(-std::log2(1.0 + c.p_u * F.gain_user_at(near_bs.rho)) >
            -std::log2(1.0 + c.p_b * F.gain_bs_at(near_bs.rho, near_bs.theta)));
    const CostGrad gu = F.grad(near_bs);
    CHECK(gu.d_theta == 0.0);
    CHECK(gu.d_rho > 0.0);  // moving further from the user hurts the weak hop
  }

  TEST_CASE("cluster scoring averages member rates and serves the virtual user") {
    const SegmentModel m = reference_model(2);
    const Heights h{50.0, 45.0, 0.0};
    const Point2 bs{500.0, 0.0};
    const CostParams c = df_params();
    const ConstOracle los(1, 2), nlos(2, 2);
    UserCluster cluster;
    cluster.center = {100.0, 0.0};
    cluster.users = {{90.0, 10.0}, {110.0, -10.0}};
    const std::vector<const SegmentOracle*> members{&los, &nlos};
    const Point2 x{180.0, 20.0};

    const double gb = gain_bs(x, bs, m, h);
    const double expect_rate = 0.5 * (df_throughput(c, gain_user(x, cluster.users[0], 1, m, h), gb) +
                                      df_throughput(c, gain_user(x, cluster.users[1], 2, m, h), gb));
    CHECK(sum_rate(c, m, h, bs, cluster.users, members, x) == doctest::Approx(expect_rate));

    // Virtual user: majority vote (tie -> smaller id = 1) at the center.
    const double expect_cost = eval_cost(c, gain_user(x, cluster.center, 1, m, h), gb);
    CHECK(virtual_user_cost(c, m, h, bs, cluster, members, x) == doctest::Approx(expect_cost));

    CHECK_THROWS_AS(sum_rate(c, m, h, bs, cluster.users, {&los}, x), std::invalid_argument);
    CHECK_THROWS_AS(sum_rate(c, m, h, bs, {}, {}, x), std::invalid_argument);
  }

  TEST_CASE("outage cost has the curvature shape, rate cost the bottleneck shape") {
    const ConditionReport af1 = check_condition1(af_params());
    CHECK(af1.passed);
    const ConditionReport df2 = check_condition2(df_params());
    CHECK(df2.passed);
    // Each shape check rejects the other law.
    CHECK_FALSE(check_condition1(df_params()).passed);
    CHECK_FALSE(check_condition2(af_params()).passed);
  }

  TEST_CASE("shape checks reject a coupled cost in both directions") {
    const Cost2d coupled = [](double x, double y) { return 1.0 / (x + y); };
    CHECK_FALSE(check_condition1_fn(coupled).passed);
    CHECK_FALSE(check_condition2_fn(coupled).passed);
    // A product law is decreasing but coupled: the cross-derivative screen of
    // the curvature check and the slice reconstruction both reject it.
    const Cost2d mixed = [](double x, double y) { return 1.0 / (x * y); };
    CHECK_FALSE(check_condition1_fn(mixed).passed);
    CHECK_FALSE(check_condition2_fn(mixed).passed);
  }

  TEST_CASE("shape checks accept matching synthetic laws") {
    // Any positive combination of reciprocal powers with exponent >= 1 in
    // each variable separately satisfies the curvature condition.
    const Cost2d recip = [](double x, double y) { return 2.0 / x + 0.5 / (y * y); };
    CHECK(check_condition1_fn(recip).passed);
    const Cost2d bottleneck = [](double x, double y) {
      return std::max(-std::log1p(3.0 * x), -std::log1p(0.2 * y));
    };
    CHECK(check_condition2_fn(bottleneck).passed);
  }
}
