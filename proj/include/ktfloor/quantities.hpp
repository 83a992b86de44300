#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ktfloor {

/// Raised for any argument outside an operation's mathematical domain.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

namespace constants {
// exact SI defining value
inline constexpr double boltzmann = 1.380649e-23;  // J/K
inline constexpr double default_temperature = 300.0;  // K
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double seconds_per_year = 3.156e7;
}  // namespace constants

/// Temperature plus Boltzmann constant. All energies in the library are
/// converted to kT units through this type.
struct PhysicalEnvironment {
    double temperature = constants::default_temperature;  // K
    double boltzmann_constant = constants::boltzmann;     // J/K

    static PhysicalEnvironment at(double kelvin)
    {
        if (!(kelvin >= 0.0) || !std::isfinite(kelvin))
            throw DomainError("temperature must be a finite value >= 0 K, got " +
                              std::to_string(kelvin));
        return PhysicalEnvironment{kelvin, constants::boltzmann};
    }
};

inline double thermal_energy(const PhysicalEnvironment& env)
{
    if (!(env.temperature >= 0.0))
        throw DomainError("temperature must be >= 0 K");
    return env.boltzmann_constant * env.temperature;
}

inline double joules_to_kt(double joules, const PhysicalEnvironment& env)
{
    const double kt = thermal_energy(env);
    if (kt <= 0.0)
        throw DomainError("kT units are undefined at zero temperature");
    return joules / kt;
}

inline double kt_to_joules(double kt_units, const PhysicalEnvironment& env)
{
    return kt_units * thermal_energy(env);
}

/// An energy carried in both unit systems.
struct Energy {
    double joule = 0.0;
    double kt = 0.0;

    static Energy from_joules(double j, const PhysicalEnvironment& env)
    {
        return Energy{j, joules_to_kt(j, env)};
    }
};

}  // namespace ktfloor
