#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ktfloor/quantities.hpp"

using namespace ktfloor;

TEST(Quantities, ThermalEnergyExamples)
{
    EXPECT_EQ(thermal_energy(PhysicalEnvironment::at(0.0)), 0.0);
    EXPECT_NEAR(thermal_energy(PhysicalEnvironment::at(300.0)), 4.141947e-21, 1e-36);
    EXPECT_DOUBLE_EQ(thermal_energy(PhysicalEnvironment::at(1.0 / 1.380649e-23)), 1.0);
}

TEST(Quantities, BoltzmannIsTheDefiningValue)
{
    EXPECT_EQ(PhysicalEnvironment{}.boltzmann_constant, 1.380649e-23);
    EXPECT_EQ(PhysicalEnvironment{}.temperature, 300.0);
}

TEST(Quantities, NegativeTemperatureRejected)
{
    EXPECT_THROW(PhysicalEnvironment::at(-1.0), DomainError);
    EXPECT_THROW(PhysicalEnvironment::at(std::nan("")), DomainError);
    EXPECT_THROW(thermal_energy(PhysicalEnvironment{-5.0, constants::boltzmann}), DomainError);
}

TEST(Quantities, KtUnitsUndefinedAtZeroTemperature)
{
    EXPECT_THROW(joules_to_kt(1.0, PhysicalEnvironment::at(0.0)), DomainError);
}

TEST(Quantities, ConversionRoundTripProperty)
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> log_t(-2.0, 4.0), log_x(-30.0, 30.0);
    for (int i = 0; i < 10000; ++i) {
        const auto env = PhysicalEnvironment::at(std::pow(10.0, log_t(gen)));
        const double x = std::pow(10.0, log_x(gen));
        const double back = joules_to_kt(kt_to_joules(x, env), env);
        EXPECT_LE(std::abs(back - x), std::abs(x) * std::numeric_limits<double>::epsilon()) << x;
    }
}

TEST(Quantities, EnergyCarriesBothUnits)
{
    const auto env = PhysicalEnvironment::at(300.0);
    const Energy e = Energy::from_joules(2.0 * thermal_energy(env), env);
    EXPECT_DOUBLE_EQ(e.kt, 2.0);
}
