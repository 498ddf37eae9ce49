#pragma once

#include <cmath>
#include <optional>

#include <json.hpp>

#include "chemsens/params.hpp"

namespace chemsens::testing {

// Reference setup with the swept knobs exposed. Rates in MHz, r_B = r_A unless given.
inline params::ModelParams setup(double eps_mhz, double r_mhz, std::optional<double> r_b_mhz = std::nullopt,
                                 double dipole_b = 0.0)
{
    nlohmann::json c = params::default_config();
    c["molecule"]["detuning_a_mhz"] = eps_mhz;
    c["molecule"]["rate_a_mhz"] = r_mhz;
    c["molecule"]["rate_b_mhz"] = r_b_mhz.value_or(r_mhz);
    c["molecule"]["dipole_b_debye"] = dipole_b;
    return params::from_json(c);
}

inline double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace chemsens::testing
