#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace chemsens::params {

// CODATA SI values; not user-editable.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;
    double eps0 = 8.8541878128e-12;
    double c = 299792458.0;
    double debye = 3.33564e-30;
};

enum class LoPhotonPolicy { MatchProbe };

struct LaserParams {
    double power = 1e-3;            // W
    double wavelength = 500e-9;     // m
    double beam_diameter = 0.5e-2;  // m
    double measurement_time = 1.0;  // s
    LoPhotonPolicy lo_photon_policy = LoPhotonPolicy::MatchProbe;
};

struct ChemicalState {
    double dipole = 0.0;    // C m
    double detuning = 0.0;  // rad/s, rotating frame
};

// All rates are angular (rad/s). rate_A is the rate into A, rate_B into B.
struct MoleculeParams {
    ChemicalState A;
    ChemicalState B;
    double decay_gamma = 0.0;
    double rate_A = 0.0;
    double rate_B = 0.0;
};

struct SampleParams {
    double density = 1e20;                  // m^-3
    std::optional<double> fixed_thickness;  // m; empty means z_opt
};

struct NumericsParams {
    double trust_radius = 0.1;
    double fit_tolerance = 1e-3;
    double regime_delta = 0.1;
    double regime_theta = 2.0;
    // Probe intensities of the D_J fit, as fractions of J0.
    std::vector<double> flux_grid = {0.01, 0.02, 0.04, 0.07, 0.1};
    // Probe fraction used to extrapolate the weak-probe cross sections.
    double weak_probe_fraction = 1e-3;
};

struct DerivedQuantities {
    double omega_p = 0.0;         // rad/s
    double beam_area = 0.0;       // m^2
    double field_E = 0.0;         // V/m
    double rabi_A = 0.0;          // rad/s
    double rabi_B = 0.0;          // rad/s
    double beta_sq_A = 0.0;       // Omega_A^2 / J0
    double beta_sq_B = 0.0;
    double photon_flux_J0 = 0.0;  // photons m^-2 s^-1
    double n_p0 = 0.0;
};

struct ModelParams {
    PhysicalConstants constants;
    LaserParams laser;
    MoleculeParams molecule;
    SampleParams sample;
    NumericsParams numerics;
    DerivedQuantities derived;
};

double mhz_to_angular(double mhz);
double angular_to_mhz(double omega);

// Throws Error(InvalidParam) naming the offending field.
DerivedQuantities derive(const PhysicalConstants& constants, const LaserParams& laser,
                         const MoleculeParams& molecule);

// Range checks for everything, then fills `derived`.
void finalize(ModelParams& params);

// Parses a JSON config document (unit suffixed keys); unknown keys rejected.
ModelParams validate(const std::string& config_text);
ModelParams from_json(const nlohmann::json& doc);

// The default document: laser and molecule as in the reference setup,
// epsilon = 40 MHz and r_A = r_B = 1e-4 MHz.
nlohmann::json default_config();
ModelParams defaults();

// Rabi frequency of state A (or B) when the probe intensity is J instead of J0.
double rabi_at_flux(const ModelParams& params, bool state_b, double J);

} // namespace chemsens::params
