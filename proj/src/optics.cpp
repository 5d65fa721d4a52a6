#include "weakval/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace weakval {

CrystalSpec::CrystalSpec(double thickness_, double n_o_, double n_e_, double wavelength_,
                         double beam_waist_)
    : thickness(thickness_), n_o(n_o_), n_e(n_e_), wavelength(wavelength_), beam_waist(beam_waist_) {
    if (thickness <= 0.0) throw std::invalid_argument("CrystalSpec: thickness must be positive");
    if (n_o <= 1.0 || n_e <= 1.0) throw std::invalid_argument("CrystalSpec: refractive indices must exceed 1");
    if (beam_waist <= 0.0) throw std::invalid_argument("CrystalSpec: beam waist must be positive");
}

double beam_separation(const CrystalSpec& spec, double theta) {
    const double theta_o = std::asin(std::sin(theta) / spec.n_o);
    const double theta_e = std::asin(std::sin(theta) / spec.n_e);
    return spec.thickness * (std::sin(theta - theta_o) / std::cos(theta_o) -
                             std::sin(theta - theta_e) / std::cos(theta_e));
}

CouplingStrength coupling_from_separation(double delta_x, double beam_waist) {
    if (beam_waist <= 0.0) {
        throw std::invalid_argument("coupling_from_separation: beam waist must be positive");
    }
    return CouplingStrength{delta_x / 2.0, delta_x / (2.0 * beam_waist)};
}

}  // namespace weakval
