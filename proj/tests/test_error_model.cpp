#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ktfloor/error_model.hpp"
#include "oracles.hpp"

using namespace ktfloor;

namespace {
const PhysicalEnvironment room = PhysicalEnvironment::at(300.0);

RcStage femto_stage(double resistance = 1e6)
{
    return RcStage::make(1e-15, resistance, 0.0, room);
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g;
    for (int i = 0; i < n; ++i)
        g.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
    return g;
}
}  // namespace

TEST(FloorShort, Examples)
{
    EXPECT_NEAR(floor_short({0.5 - 1e-12, 0, 0}, room).floor_kt, std::log(2.0), 1e-11);
    EXPECT_NEAR(floor_short({0.5 - 1e-12, 0, 0}, room).floor_kt, 0.693, 5e-4);
    const FloorResult f = floor_short({1e-30, 0, 0}, room);
    EXPECT_NEAR(f.floor_kt, 69.07755278982137, 1e-12);
    EXPECT_NEAR(f.floor_kt, 69.08, 0.005);
    EXPECT_EQ(f.regime, Regime::Short);
    EXPECT_DOUBLE_EQ(f.floor_joule, f.floor_kt * thermal_energy(room));
    EXPECT_DOUBLE_EQ(floor_short({std::exp(-1.0), 0, 0}, room).floor_kt, 1.0);
}

TEST(FloorShort, DomainIsOpenInterval)
{
    for (double eps : {0.0, 0.5, 0.7, 1.0, -1e-3})
        EXPECT_THROW(floor_short({eps, 0, 0}, room), DomainError) << eps;
    EXPECT_THROW(floor_short({1e-3, 0, 0}, PhysicalEnvironment::at(0.0)), DomainError);
}

TEST(FloorShort, KtValueIsJouleOverThermalEnergy)
{
    for (double eps : log_grid(1e-30, 0.4, 40)) {
        const FloorResult f = floor_short({eps, 0, 0}, room);
        EXPECT_EQ(f.floor_kt, f.floor_joule / thermal_energy(room));
    }
}

TEST(FloorLong, Examples)
{
    const ErrorSpec at_tau{1e-12, 1e-10, 1e-10};
    EXPECT_DOUBLE_EQ(floor_long(at_tau, room).floor_kt, floor_short(at_tau, room).floor_kt);
    EXPECT_EQ(floor_long(at_tau, room).regime, Regime::Long);

    const FloorResult year = floor_long({1e-25, 3.156e7, 1e-10}, room);
    EXPECT_NEAR(year.floor_kt, 97.85787930873355, 1e-10);
    EXPECT_NEAR(year.floor_kt, 97.9, 0.05);

    const double a = floor_long({1e-9, 1.0, 1e-9}, room).floor_joule;
    const double b = floor_long({1e-9, 2.0, 1e-9}, room).floor_joule;
    EXPECT_NEAR(b - a, thermal_energy(room) * std::log(2.0), 1e-12 * a);
}

TEST(FloorLong, RejectsWindowsShorterThanTau)
{
    EXPECT_THROW(floor_long({1e-9, 0.5e-10, 1e-10}, room), DomainError);
    EXPECT_THROW(floor_long({1e-9, 1.0, 0.0}, room), DomainError);
    EXPECT_THROW(floor_long({0.6, 1.0, 1e-3}, room), DomainError);
}

TEST(FloorLong, EqualsShortFloorOfPerLookErrorProperty)
{
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> le(-30.0, -2.0), lratio(0.0, 20.0);
    for (int i = 0; i < 2000; ++i) {
        const double eps_tot = std::pow(10.0, le(gen));
        const double tau = 1e-10;
        const double t_o = tau * std::pow(10.0, lratio(gen));
        const double eps_s = eps_tot * tau / t_o;
        const double lhs = floor_long({eps_tot, t_o, tau}, room).floor_kt;
        const double rhs = floor_short({eps_s, 0, 0}, room).floor_kt;
        EXPECT_LE(rel(lhs, rhs), 1e-12);
    }
}

TEST(GaussianTail, Examples)
{
    const double sigma = 2e-3;
    EXPECT_EQ(instantaneous_error_prob(0.0, sigma), 0.5);
    EXPECT_NEAR(instantaneous_error_prob(3.0 * sigma, sigma), 1.3499e-3, 0.00005e-3);
    EXPECT_LE(rel(instantaneous_error_prob(3.0 * sigma, sigma), 1.3498980316300945e-3), 1e-12);
    EXPECT_LE(rel(instantaneous_error_prob(5.0 * sigma, sigma), 2.8665157187919391e-7), 1e-12);
    EXPECT_THROW(instantaneous_error_prob(1.0, 0.0), DomainError);
    EXPECT_THROW(instantaneous_error_prob(1.0, -1.0), DomainError);
}

TEST(GaussianTail, MatchesIndependentSeriesAndContinuedFraction)
{
    for (double x = 0.0; x <= 12.0; x += 0.05) {
        const auto ref = static_cast<double>(oracle::upper_tail(x));
        EXPECT_LE(rel(upper_tail(x), ref), 1e-12) << "x = " << x;
    }
    EXPECT_LE(rel(upper_tail(12.0), 1.776482112077679e-33), 1e-12);
}

TEST(GaussianTail, LogTailPastUnderflow)
{
    for (double x : {0.0, 1.0, 5.0, 12.0, 29.9, 30.0, 30.1, 37.0, 40.0, 60.0, 100.0}) {
        const double ref = static_cast<double>(std::log(oracle::upper_tail(static_cast<long double>(x))));
        EXPECT_LE(rel(log_upper_tail(x), ref), 1e-13) << "x = " << x;
    }
    EXPECT_TRUE(std::isfinite(log_upper_tail(1e3)));
}

TEST(GaussianTail, InverseMatchesBoostAndRoundTrips)
{
    for (double p : log_grid(1e-300, 0.49, 400)) {
        const double x = upper_tail_inverse(p);
        EXPECT_LE(rel(x, oracle::upper_tail_inverse(p)), 1e-12) << "p = " << p;
        if (p > 1e-290) {
            EXPECT_LE(rel(upper_tail(x), p), 1e-12) << "p = " << p;
        }
    }
    EXPECT_NEAR(upper_tail_inverse(1e-30), 11.464024688443616, 1e-11);
    EXPECT_NEAR(upper_tail_inverse(1.3499e-3), 2.9999995558583211, 1e-12);
    EXPECT_EQ(upper_tail_inverse(0.5), 0.0);
    EXPECT_NEAR(upper_tail_inverse(0.9), -upper_tail_inverse(0.1), 1e-15);
    EXPECT_THROW(upper_tail_inverse(0.0), DomainError);
    EXPECT_THROW(upper_tail_inverse(1.0), DomainError);
}

TEST(MultiSample, Examples)
{
    EXPECT_DOUBLE_EQ(multi_sample_error(0.123, 1), 0.123);
    EXPECT_LE(rel(multi_sample_error(1e-9, 1000000), 9.995001671245086e-4), 1e-9);
    EXPECT_NEAR(multi_sample_error(1e-9, 1000000), 9.995e-4, 0.0005e-4);
    EXPECT_LE(rel(multi_sample_error(1.3499e-3, 100), 0.12635502555302229), 1e-12);
    EXPECT_EQ(multi_sample_error(1.0, 5), 1.0);
    EXPECT_EQ(multi_sample_error(0.0, 5), 0.0);
    EXPECT_THROW(multi_sample_error(1.1, 5), DomainError);
    EXPECT_THROW(multi_sample_error(0.1, 0), DomainError);
}

TEST(MultiSample, MonotoneInBothArgumentsProperty)
{
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> lp(-12.0, 0.0);
    std::uniform_int_distribution<std::uint64_t> ln(1, 100000);
    for (int i = 0; i < 5000; ++i) {
        double p1 = std::pow(10.0, lp(gen)), p2 = std::pow(10.0, lp(gen));
        std::uint64_t n1 = ln(gen), n2 = ln(gen);
        if (p1 > p2)
            std::swap(p1, p2);
        if (n1 > n2)
            std::swap(n1, n2);
        EXPECT_LE(multi_sample_error(p1, n1), multi_sample_error(p2, n1));
        EXPECT_LE(multi_sample_error(p1, n1), multi_sample_error(p1, n2));
    }
}

TEST(RequiredSwing, Examples)
{
    const RcStage s = femto_stage();
    const RequiredSwing a = required_swing(1.3499e-3, s);
    EXPECT_NEAR(a.u1, 12.21e-3, 0.005e-3);
    EXPECT_NEAR(a.e1_kt, 18.0, 1e-4);
    EXPECT_NEAR(a.e1_kt, 2.0 * 2.9999995558583211 * 2.9999995558583211, 1e-9);
    EXPECT_DOUBLE_EQ(a.e1, 0.5 * s.capacitance * a.u1 * a.u1);

    EXPECT_LT(required_swing(0.5 - 1e-15, s).u1, 1e-16);

    const RequiredSwing deep = required_swing(1e-30, s);
    EXPECT_NEAR(deep.e1_kt / floor_short({1e-30, 0, 0}, room).floor_kt, 3.8051105, 1e-6);
    EXPECT_NEAR(deep.e1_kt / floor_short({1e-30, 0, 0}, room).floor_kt, 3.8, 0.01);

    EXPECT_THROW(required_swing(0.5, s), DomainError);
    EXPECT_THROW(required_swing(0.0, s), DomainError);
}

TEST(RequiredSwing, NeverBeatsGenericFloorAndRatioRisesTowardFour)
{
    const RcStage s = femto_stage();
    double previous = 0.0;
    // grid runs from large to small epsilon
    std::vector<double> grid = log_grid(1e-30, 1e-2, 281);
    std::reverse(grid.begin(), grid.end());
    for (double eps : grid) {
        const double e1_kt = required_swing(eps, s).e1_kt;
        const double floor_kt = floor_short({eps, 0, 0}, room).floor_kt;
        EXPECT_GE(e1_kt, floor_kt) << eps;
        const double ratio = e1_kt / floor_kt;
        EXPECT_GT(ratio, previous) << eps;
        EXPECT_LT(ratio, 4.0) << eps;
        previous = ratio;
    }
}

TEST(ObservationCount, SurvivesRcRounding)
{
    const RcStage s = femto_stage();
    EXPECT_EQ(observation_count(100.0 * s.correlation_time(), s.correlation_time()), 100u);
    EXPECT_EQ(observation_count(1e-7, 1e6 * 1e-15), 100u);
    EXPECT_EQ(observation_count(2.5e-9, 1e-9), 2u);
    EXPECT_THROW(observation_count(0.5e-9, 1e-9), DomainError);
}

TEST(FirstPassage, ZeroThresholdIsAFairCoinPerLook)
{
    const RcStage s = femto_stage();
    const FirstPassageEstimate e = first_passage_mc(s, 0.0, 4.0 * s.correlation_time(), 100000, 11);
    EXPECT_EQ(e.n_observations, 4u);
    // independent-look value 1 - 0.5^4; adjacent looks are correlated, use exact oracle
    const double exact = oracle::correlated_exceedance(0.0, std::exp(-1.0), 4);
    EXPECT_NEAR(e.epsilon_hat, exact, 4.0 * e.std_err);
}

TEST(FirstPassage, ThreeSigmaHundredLooks)
{
    const RcStage s = femto_stage();
    const double sigma = from_stage(s).stationary_sigma;
    const FirstPassageEstimate e = first_passage_mc(s, 3.0 * sigma, 100.0 * s.correlation_time(), 100000, 2016);
    EXPECT_EQ(e.n_observations, 100u);
    const double independent = multi_sample_error(upper_tail(3.0), 100);
    EXPECT_NEAR(e.epsilon_hat, independent, 3.0 * e.std_err + 0.05 * independent);
    EXPECT_NEAR(e.epsilon_hat, 0.126, 0.005);
    EXPECT_FALSE(e.low_confidence);
}

TEST(FirstPassage, MatchesExactCorrelatedSurvivalOnGrid)
{
    const RcStage s = femto_stage();
    const double sigma = from_stage(s).stationary_sigma;
    for (double k : {2.0, 2.5, 3.0}) {
        for (int n : {10, 100}) {
            const FirstPassageEstimate e =
                first_passage_mc(s, k * sigma, n * s.correlation_time(), 100000, 500 + static_cast<int>(10 * k) + n);
            const double exact = oracle::correlated_exceedance(k, std::exp(-1.0), n);
            EXPECT_NEAR(e.epsilon_hat, exact, 4.0 * e.std_err + 1e-6) << k << " sigma, " << n << " looks";
        }
    }
}

TEST(FirstPassage, DeterministicAndIndependentOfWorkerCount)
{
    const RcStage s = femto_stage();
    const double sigma = from_stage(s).stationary_sigma;
    const double t_o = 50.0 * s.correlation_time();
    const FirstPassageEstimate a = first_passage_mc(s, 2.5 * sigma, t_o, 20001, 9, 1);
    const FirstPassageEstimate b = first_passage_mc(s, 2.5 * sigma, t_o, 20001, 9, 1);
    const FirstPassageEstimate c = first_passage_mc(s, 2.5 * sigma, t_o, 20001, 9, 3);
    const FirstPassageEstimate d = first_passage_mc(s, 2.5 * sigma, t_o, 20001, 9, 8);
    EXPECT_EQ(a.errors, b.errors);
    EXPECT_EQ(a.errors, c.errors);
    EXPECT_EQ(a.errors, d.errors);
    EXPECT_EQ(a.epsilon_hat, d.epsilon_hat);
}

TEST(FirstPassage, LowConfidenceFlaggedNotThrown)
{
    const RcStage s = femto_stage();
    const double sigma = from_stage(s).stationary_sigma;
    const FirstPassageEstimate e = first_passage_mc(s, 6.0 * sigma, 10.0 * s.correlation_time(), 1000, 1);
    EXPECT_TRUE(e.low_confidence);
    EXPECT_LT(e.expected_errors, 10.0);
}

TEST(FirstPassage, Preconditions)
{
    const RcStage s = femto_stage();
    EXPECT_THROW(first_passage_mc(s, 0.0, 10.0 * s.correlation_time(), 0, 1), DomainError);
    EXPECT_THROW(first_passage_mc(s, 0.0, 0.5 * s.correlation_time(), 10, 1), DomainError);
}
