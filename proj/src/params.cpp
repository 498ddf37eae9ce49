#include "chemsens/params.hpp"

#include <cmath>
#include <numbers>

#include "chemsens/errors.hpp"

namespace chemsens::params {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* field, const std::string& why)
{
    if (!ok) {
        throw Error(ErrorKind::InvalidParam, std::string(field) + " " + why);
    }
}

void require_positive(double v, const char* field)
{
    require(std::isfinite(v) && v > 0.0, field, "must be finite and > 0");
}

void require_nonnegative(double v, const char* field)
{
    require(std::isfinite(v) && v >= 0.0, field, "must be finite and >= 0");
}

// Reads `key` from `section` if present, deleting it so leftovers can be
// reported as unknown.
double take_number(json& section, const char* section_name, const char* key, double fallback)
{
    auto it = section.find(key);
    if (it == section.end()) {
        return fallback;
    }
    if (!it->is_number()) {
        throw Error(ErrorKind::InvalidParam,
                    std::string(section_name) + "." + key + " must be a number");
    }
    double v = it->get<double>();
    section.erase(it);
    return v;
}

void reject_leftovers(const json& section, const std::string& prefix)
{
    if (!section.empty()) {
        throw Error(ErrorKind::InvalidParam, "unknown key " + prefix + section.begin().key());
    }
}

json take_section(json& doc, const char* name)
{
    auto it = doc.find(name);
    if (it == doc.end()) {
        return json::object();
    }
    if (!it->is_object()) {
        throw Error(ErrorKind::InvalidParam, std::string(name) + " must be an object");
    }
    json out = *it;
    doc.erase(it);
    return out;
}

} // namespace

double mhz_to_angular(double mhz) { return kTwoPi * 1e6 * mhz; }
double angular_to_mhz(double omega) { return omega / (kTwoPi * 1e6); }

DerivedQuantities derive(const PhysicalConstants& k, const LaserParams& laser,
                         const MoleculeParams& molecule)
{
    require_positive(k.hbar, "hbar");
    require_positive(k.eps0, "eps0");
    require_positive(k.c, "c");
    require_positive(laser.power, "power");
    require_positive(laser.wavelength, "wavelength");
    require_positive(laser.beam_diameter, "beam_diameter");
    require_positive(laser.measurement_time, "measurement_time");
    require_nonnegative(molecule.A.dipole, "dipole_A");
    require_nonnegative(molecule.B.dipole, "dipole_B");
    require(std::isfinite(molecule.A.detuning), "detuning_A", "must be finite");
    require(std::isfinite(molecule.B.detuning), "detuning_B", "must be finite");
    require_positive(molecule.decay_gamma, "decay_gamma");
    require_nonnegative(molecule.rate_A, "rate_A");
    require_nonnegative(molecule.rate_B, "rate_B");
    require(molecule.rate_A + molecule.rate_B > 0.0, "rate_A", "rate_A + rate_B must be > 0");

    DerivedQuantities d;
    d.omega_p = kTwoPi * k.c / laser.wavelength;
    d.beam_area = std::numbers::pi * laser.beam_diameter * laser.beam_diameter / 4.0;
    d.field_E = std::sqrt(2.0 * laser.power / (d.beam_area * k.eps0 * k.c));
    d.rabi_A = molecule.A.dipole * d.field_E / k.hbar;
    d.rabi_B = molecule.B.dipole * d.field_E / k.hbar;
    d.n_p0 = laser.power * laser.measurement_time * laser.wavelength / (kTwoPi * k.hbar * k.c);
    d.photon_flux_J0 = d.n_p0 / (d.beam_area * laser.measurement_time);
    d.beta_sq_A = d.rabi_A * d.rabi_A / d.photon_flux_J0;
    d.beta_sq_B = d.rabi_B * d.rabi_B / d.photon_flux_J0;
    return d;
}

void finalize(ModelParams& p)
{
    require_positive(p.sample.density, "density");
    if (p.sample.fixed_thickness) {
        require_positive(*p.sample.fixed_thickness, "thickness");
    }
    const auto& n = p.numerics;
    require_positive(n.trust_radius, "trust_radius");
    require_positive(n.fit_tolerance, "fit_tolerance");
    require_nonnegative(n.regime_delta, "regime_delta");
    require_positive(n.regime_theta, "regime_theta");
    require(n.weak_probe_fraction > 0.0 && n.weak_probe_fraction <= 1.0, "weak_probe_fraction",
            "must lie in (0, 1]");
    require(n.flux_grid.size() >= 4, "flux_grid", "needs at least 4 points");
    for (double f : n.flux_grid) {
        require_positive(f, "flux_grid");
    }
    p.derived = derive(p.constants, p.laser, p.molecule);
}

json default_config()
{
    return json{
        {"laser",
         {{"power_mw", 1.0},
          {"wavelength_nm", 500.0},
          {"beam_diameter_cm", 0.5},
          {"measurement_time_s", 1.0},
          {"lo_photon_policy", "match_probe"}}},
        {"molecule",
         {{"dipole_a_debye", 1.0},
          {"dipole_b_debye", 0.0},
          {"detuning_a_mhz", 40.0},
          {"detuning_b_mhz", 0.0},
          {"gamma_mhz", 10.0},
          {"rate_a_mhz", 1e-4},
          {"rate_b_mhz", 1e-4}}},
        {"sample", {{"density_per_m3", 1e20}, {"thickness", "optimal"}}},
        {"numerics",
         {{"trust_radius", 0.1},
          {"fit_tolerance", 1e-3},
          {"regime_delta", 0.1},
          {"regime_theta", 2.0},
          {"flux_grid_j0", {0.01, 0.02, 0.04, 0.07, 0.1}},
          {"weak_probe_fraction", 1e-3}}},
    };
}

ModelParams from_json(const json& input)
{
    if (!input.is_object()) {
        throw Error(ErrorKind::ParseError, "config must be a JSON object");
    }
    json doc = input;
    ModelParams p;
    const PhysicalConstants k;

    json laser = take_section(doc, "laser");
    p.laser.power = take_number(laser, "laser", "power_mw", 1.0) * 1e-3;
    p.laser.wavelength = take_number(laser, "laser", "wavelength_nm", 500.0) * 1e-9;
    p.laser.beam_diameter = take_number(laser, "laser", "beam_diameter_cm", 0.5) * 1e-2;
    p.laser.measurement_time = take_number(laser, "laser", "measurement_time_s", 1.0);
    if (auto it = laser.find("lo_photon_policy"); it != laser.end()) {
        if (*it != "match_probe") {
            throw Error(ErrorKind::InvalidParam, "laser.lo_photon_policy must be \"match_probe\"");
        }
        laser.erase(it);
    }
    reject_leftovers(laser, "laser.");

    json mol = take_section(doc, "molecule");
    p.molecule.A.dipole = take_number(mol, "molecule", "dipole_a_debye", 1.0) * k.debye;
    p.molecule.B.dipole = take_number(mol, "molecule", "dipole_b_debye", 0.0) * k.debye;
    p.molecule.A.detuning = mhz_to_angular(take_number(mol, "molecule", "detuning_a_mhz", 40.0));
    p.molecule.B.detuning = mhz_to_angular(take_number(mol, "molecule", "detuning_b_mhz", 0.0));
    p.molecule.decay_gamma = mhz_to_angular(take_number(mol, "molecule", "gamma_mhz", 10.0));
    p.molecule.rate_A = mhz_to_angular(take_number(mol, "molecule", "rate_a_mhz", 1e-4));
    p.molecule.rate_B = mhz_to_angular(take_number(mol, "molecule", "rate_b_mhz", 1e-4));
    reject_leftovers(mol, "molecule.");

    json sample = take_section(doc, "sample");
    p.sample.density = take_number(sample, "sample", "density_per_m3", 1e20);
    if (auto it = sample.find("thickness"); it != sample.end()) {
        if (it->is_string() && *it == "optimal") {
            p.sample.fixed_thickness.reset();
        } else if (it->is_number()) {
            throw Error(ErrorKind::InvalidParam,
                        "sample.thickness takes \"optimal\"; use sample.thickness_m for a fixed value");
        } else {
            throw Error(ErrorKind::InvalidParam, "sample.thickness must be \"optimal\"");
        }
        sample.erase(it);
    }
    if (sample.contains("thickness_m")) {
        p.sample.fixed_thickness = take_number(sample, "sample", "thickness_m", 0.0);
    }
    reject_leftovers(sample, "sample.");

    json num = take_section(doc, "numerics");
    p.numerics.trust_radius = take_number(num, "numerics", "trust_radius", 0.1);
    p.numerics.fit_tolerance = take_number(num, "numerics", "fit_tolerance", 1e-3);
    p.numerics.regime_delta = take_number(num, "numerics", "regime_delta", 0.1);
    p.numerics.regime_theta = take_number(num, "numerics", "regime_theta", 2.0);
    p.numerics.weak_probe_fraction = take_number(num, "numerics", "weak_probe_fraction", 1e-3);
    if (auto it = num.find("flux_grid_j0"); it != num.end()) {
        if (!it->is_array()) {
            throw Error(ErrorKind::InvalidParam, "numerics.flux_grid_j0 must be an array");
        }
        p.numerics.flux_grid.clear();
        for (const auto& v : *it) {
            if (!v.is_number()) {
                throw Error(ErrorKind::InvalidParam, "numerics.flux_grid_j0 entries must be numbers");
            }
            p.numerics.flux_grid.push_back(v.get<double>());
        }
        num.erase(it);
    }
    reject_leftovers(num, "numerics.");
    reject_leftovers(doc, "");

    finalize(p);
    return p;
}

ModelParams validate(const std::string& config_text)
{
    json doc;
    try {
        doc = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    return from_json(doc);
}

ModelParams defaults() { return from_json(default_config()); }

double rabi_at_flux(const ModelParams& p, bool state_b, double J)
{
    const double omega0 = state_b ? p.derived.rabi_B : p.derived.rabi_A;
    return omega0 * std::sqrt(J / p.derived.photon_flux_J0);
}

} // namespace chemsens::params
