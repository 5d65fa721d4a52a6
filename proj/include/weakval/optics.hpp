#pragma once

// The birefringent-crystal model of the interference experiment: tilting the
// crystal separates the ordinary and extraordinary beams, and the separation
// plays the role of the integrated coupling, delta_x = 2 g eps.

namespace weakval {

/// Crystal and beam geometry. Lengths share one unit (the functions below
/// only ever form ratios); refractive indices are required configuration
/// inputs. The wavelength is carried as metadata only.
struct CrystalSpec {
    double thickness;   // d
    double n_o;         // ordinary index, > 1
    double n_e;         // extraordinary index, > 1
    double wavelength;  // metadata
    double beam_waist;  // w = 2 * Delta

    CrystalSpec(double thickness_, double n_o_, double n_e_, double wavelength_, double beam_waist_);

    double delta() const { return beam_waist / 2.0; }
};

/// Signed beam separation at tilt angle theta (radians):
///     delta_x = d [ sin(theta - theta_o)/cos(theta_o) - sin(theta - theta_e)/cos(theta_e) ],
/// with theta_i = arcsin(sin(theta)/n_i) from Snell's law. Antisymmetric in
/// theta; zero at normal incidence and for n_o = n_e.
double beam_separation(const CrystalSpec& spec, double theta);

/// The separation expressed as a coupling: g eps = delta_x / 2, plus the
/// dimensionless strength g eps / (2 Delta) = delta_x / (2 w).
struct CouplingStrength {
    double g_epsilon;
    double ratio;  // g eps / (2 Delta)
};

CouplingStrength coupling_from_separation(double delta_x, double beam_waist);

}  // namespace weakval
