#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sosci/bivariate.hpp"

using namespace sosci;

namespace {

const double kZ975 = static_cast<double>(oracle::normal_quantile(0.975L));

// (2 Phi(c) - 1)^2 = 0.95 solved by bisection on the series CDF.
double sidak2_oracle() {
    return static_cast<double>(oracle::bisect_quantile(
        [](long double c) { long double v = 2 * oracle::normal_cdf(c) - 1; return v * v; }, 0.95L, 0.0L, 10.0L));
}

} // namespace

TEST(LargerOfTwo, Examples) {
    const auto ci = larger_of_two_interval(std::vector<double>{2.9, 2.5}, 0.05);
    EXPECT_EQ(ci.index, 0u);
    EXPECT_NEAR(ci.lo, 2.9 - kZ975, 1e-9);
    EXPECT_NEAR(ci.hi, 2.9 + kZ975, 1e-9);
    EXPECT_NEAR(ci.lo, 0.940, 5e-4);
    EXPECT_NEAR(ci.hi, 4.860, 5e-4);
    const auto tie = larger_of_two_interval(std::vector<double>{0, 0}, 0.05);
    EXPECT_EQ(tie.index, 0u);
    EXPECT_NEAR(tie.lo, -kZ975, 1e-9);
    const auto second = larger_of_two_interval(std::vector<double>{-1, 3}, 0.05);
    EXPECT_EQ(second.index, 1u);
    EXPECT_NEAR(second.length(), 2 * kZ975, 1e-9);
    const auto t5 = larger_of_two_interval(std::vector<double>{0, 1}, 0.05, ShiftFamily::student_t(5));
    EXPECT_NEAR(t5.length(), 2 * static_cast<double>(oracle::student_t_quantile(0.975L, 5)), 1e-7);
}

TEST(BRegion, SidakIdentityAtOrigin) {
    EXPECT_NEAR(sidak2_constant(0.05), sidak2_oracle(), 1e-9);
    EXPECT_NEAR(sidak2_constant(0.05), 2.2365, 1e-4);
    EXPECT_NEAR(b_region_probability(0, 0, sidak2_oracle()), 0.95, 1e-4);
    // exact: at mu = 0 the region is the square
    for (double c : {0.5, 1.0, 2.0, 3.0}) {
        const double sq = 2 * static_cast<double>(oracle::normal_cdf(c)) - 1;
        EXPECT_NEAR(b_region_probability(0, 0, c), sq * sq, 1e-9);
    }
}

TEST(BRegion, FarFromOriginApproachesMarginal) {
    EXPECT_NEAR(b_region_probability(8, 0, 1.959964), 0.95, 1e-3);
    const auto mc = oracle::abs_max_region_mc(8, 0, 1.959964, 200000, 99);
    EXPECT_NEAR(b_region_probability(8, 0, 1.959964), mc.p, 3 * mc.se);
}

TEST(BRegion, VanishesAsCShrinks) {
    EXPECT_EQ(b_region_probability(1, 2, 0.0), 0.0);
    EXPECT_LT(b_region_probability(1, 2, 1e-4), 1e-3);
    EXPECT_LT(b_region_probability(0, 0, 1e-3), 1e-5);
}

TEST(BRegion, AgreesWithMonteCarloOnRandomPairs) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> mu(-4, 4), cc(0.5, 3.0);
    for (int i = 0; i < 20; ++i) {
        const double m1 = mu(gen), m2 = mu(gen), c = cc(gen);
        const auto mc = oracle::abs_max_region_mc(m1, m2, c, 1000000, 1000 + i);
        EXPECT_NEAR(b_region_probability(m1, m2, c), mc.p, 3 * mc.se + 1e-9) << m1 << " " << m2 << " " << c;
    }
}

TEST(BRegion, SymmetricUnderNegationAndSwap) {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{1.3, 0.4}, {2.5, -1.0}, {0.2, 3.1}}) {
        const double p = b_region_probability(a, b, 1.9);
        EXPECT_NEAR(b_region_probability(-a, -b, 1.9), p, 1e-10);
        EXPECT_NEAR(b_region_probability(b, a, 1.9), p, 1e-10);
    }
}

TEST(CPlus, Values) {
    EXPECT_NEAR(c_plus(0, 0.05), sidak2_oracle(), 1e-6);
    EXPECT_NEAR(c_plus(3, 0.05), 1.960, 0.01);
    const double c1 = c_plus(1, 0.05);
    EXPECT_GT(c1, kZ975);
    EXPECT_LT(c1, sidak2_oracle());
    EXPECT_NEAR(b_region_probability(2.0, 0, c_plus(2.0, 0.05)), 0.95, 1e-8);
    EXPECT_DOUBLE_EQ(c_plus(-1.7, 0.05), c_plus(1.7, 0.05));
}

TEST(CPlusCurve, Invariants) {
    const CPlusCurve& curve = CPlusCurve::shared(0.05);
    const auto knots = curve.knots();
    ASSERT_EQ(knots.size(), 801u);
    EXPECT_NEAR(knots[0], sidak2_oracle(), 1e-4);
    for (std::size_t i = 1; i < knots.size(); ++i) EXPECT_LE(knots[i], knots[i - 1]);
    for (double c : knots) EXPECT_GE(c, kZ975 - 1e-4);
    EXPECT_TRUE(curve.maps_monotone());
    // interpolation error against direct evaluation between knots
    for (double a : {0.005, 1.234, 2.2301, 2.777, 5.5})
        EXPECT_NEAR(curve(a), curve.exact(a), 2e-5) << a;
    EXPECT_DOUBLE_EQ(curve(-1.1), curve(1.1));
    EXPECT_DOUBLE_EQ(curve(20.0), knots.back());
}

TEST(AbsMax, WidestIntervalNearSidakConstant) {
    const double sidak_width = 2 * sidak2_constant(0.05);
    double best_w = 0, best_y = 0;
    for (double y1 = 1.8; y1 <= 2.7; y1 += 0.01) {
        const auto ci = abs_max_interval(std::vector<double>{y1, 0}, CPlusCurve::shared(0.05), false);
        if (ci.length() > best_w) best_w = ci.length(), best_y = y1;
    }
    EXPECT_NEAR(best_y, 2.23, 0.03);
    EXPECT_NEAR(best_w / sidak_width, 0.936, 0.005);
}

TEST(AbsMax, LargeEstimateApproachesUnadjusted) {
    const auto ci = abs_max_interval(std::vector<double>{10, 0}, 0.05);
    EXPECT_NEAR(ci.length(), 2 * kZ975, 1e-4);
    EXPECT_NEAR(ci.length() / (2 * sidak2_constant(0.05)), 0.88, 0.005);
}

TEST(AbsMax, MirrorAndSidakBox) {
    const double s = sidak2_constant(0.05);
    for (double w : {0.0, 0.4, 1.5, 2.23, 3.7, 6.0}) {
        const auto pos = abs_max_interval(std::vector<double>{w, 0.1}, 0.05);
        const auto neg = abs_max_interval(std::vector<double>{-w, 0.1}, 0.05);
        if (w > 0.1) {
            EXPECT_NEAR(neg.lo, -pos.hi, 1e-9);
            EXPECT_NEAR(neg.hi, -pos.lo, 1e-9);
        }
        for (const auto& ci : {pos, neg}) {
            const double y = ci.estimate;
            EXPECT_GE(ci.lo, y - s - 1e-9);
            EXPECT_LE(ci.hi, y + s + 1e-9);
            EXPECT_LT(ci.lo, y);
            EXPECT_GT(ci.hi, y);
        }
    }
    // selection goes to the second coordinate when it is larger in magnitude
    const auto ci = abs_max_interval(std::vector<double>{0.5, -2}, 0.05);
    EXPECT_EQ(ci.index, 1u);
    const auto mirror = abs_max_interval(std::vector<double>{2, 0.5}, 0.05);
    EXPECT_NEAR(ci.lo, -mirror.hi, 1e-9);
    EXPECT_NEAR(ci.hi, -mirror.lo, 1e-9);
}

TEST(AbsMax, PolishedAndInterpolatedEndpointsAgree) {
    const CPlusCurve& curve = CPlusCurve::shared(0.05);
    for (double w : {0.3, 1.1, 2.23, 2.9, 4.4}) {
        const auto a = abs_max_interval(std::vector<double>{w, 0}, curve, true);
        const auto b = abs_max_interval(std::vector<double>{w, 0}, curve, false);
        EXPECT_NEAR(a.lo, b.lo, 1e-4);
        EXPECT_NEAR(a.hi, b.hi, 1e-4);
    }
}

TEST(AbsMax, CoverageOnThetaGrid) {
    const CPlusCurve& curve = CPlusCurve::shared(0.05);
    const std::size_t reps = 40000;
    for (auto [t1, t2] : std::vector<std::pair<double, double>>{{0, 0}, {2.23, 0}, {3, 3}, {1, -0.5}, {0, 5}}) {
        std::mt19937_64 gen(77);
        std::normal_distribution<double> z;
        std::size_t miss = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const std::vector<double> y{t1 + z(gen), t2 + z(gen)};
            const auto ci = abs_max_interval(y, curve, false);
            miss += !ci.covers(ci.index == 0 ? t1 : t2);
        }
        const double p = double(miss) / reps;
        EXPECT_LE(p, 0.05 + 3 * std::sqrt(0.05 * 0.95 / reps)) << t1 << "," << t2;
    }
}

TEST(LargerOfTwo, CoverageUnderExchangeableErrors) {
    const std::size_t reps = 50000;
    const double se = std::sqrt(0.05 * 0.95 / reps);
    for (double rho : {-0.5, 0.0, 0.5, 0.9}) {
        for (auto [t1, t2] : std::vector<std::pair<double, double>>{{0, 0}, {0, 2}, {1, 1}, {0, 6}}) {
            std::mt19937_64 gen(31);
            std::normal_distribution<double> z;
            std::size_t miss = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                const double e1 = z(gen), e2 = rho * e1 + std::sqrt(1 - rho * rho) * z(gen);
                const auto ci = larger_of_two_interval(std::vector<double>{t1 + e1, t2 + e2}, 0.05);
                miss += !ci.covers(ci.index == 0 ? t1 : t2);
            }
            EXPECT_LE(double(miss) / reps, 0.05 + 3 * se) << rho << " " << t1 << "," << t2;
        }
    }
    // Common shock: Z_i + W with Laplace Z and uniform W; marginal quantile by simulation.
    std::mt19937_64 gen(8);
    std::exponential_distribution<double> ex(1.0);
    std::uniform_real_distribution<double> w(-1, 1);
    std::bernoulli_distribution coin(0.5);
    auto draw_err = [&](double shock) { return (coin(gen) ? 1 : -1) * ex(gen) + shock; };
    std::vector<double> calib(400000);
    for (auto& v : calib) v = std::abs(draw_err(w(gen)));
    std::nth_element(calib.begin(), calib.begin() + 380000, calib.end());
    const double c = calib[380000];
    for (double gap : {0.0, 1.0, 4.0}) {
        std::size_t miss = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double s = w(gen);
            const double y1 = draw_err(s), y2 = gap + draw_err(s);
            const std::size_t i = y2 > y1 ? 1 : 0;
            const double th = i == 0 ? 0.0 : gap, y = i == 0 ? y1 : y2;
            miss += std::abs(y - th) > c;
        }
        EXPECT_LE(double(miss) / reps, 0.05 + 3 * se + 0.002) << gap; // +calibration noise
    }
}
