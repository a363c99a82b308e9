// Element matrices of the coupled-interferometer wavemeter: the no-loss beam
// splitter, the two-path phase plate, the composed Mach-Zehnder unitary and
// the closed-form M-fold rotation it is meant to multiply up to.
//
// Port-label convention. Detector A is the output port whose intensity is
// i0*cos^2(M*phi/2) for input on the upper path. With the i-convention beam
// splitter below, mzi_unitary at phi = zeta = 0 equals i*sigma_x, i.e. the
// full intensity exits on the LOWER row; detector A of an MZI (and of any
// swap-coupled chain of them) is therefore matrix row 1, while the closed
// form cbw_closed_form carries its cos^2 port on row 0. Comparisons between
// the two families align this port relabeling explicitly (see netlist.hpp).

#pragma once

#include <numbers>

#include "cbw/mat2.hpp"

namespace cbw {

// Longitudinal phase phi and transverse phase zeta, both radians. The fringe
// argument everywhere is phi' = phi - zeta.
struct MziParams {
    double phi = 0.0;
    double zeta = 0.0;

    double phi_prime() const { return phi - zeta; }
    bool finite() const { return std::isfinite(phi) && std::isfinite(zeta); }
};

// (1/sqrt(2)) [[1, i], [i, 1]]
inline Mat2 beam_splitter() {
    const double s = 1.0 / std::numbers::sqrt2;
    return Mat2{{Complex{s, 0.0}, Complex{0.0, s}, Complex{0.0, s}, Complex{s, 0.0}}};
}

// diag(e^{i phi}, e^{i zeta})
inline Mat2 phase_plate(const MziParams& p) {
    if (!p.finite()) throw std::invalid_argument("phase_plate: non-finite phase");
    return Mat2{{std::polar(1.0, p.phi), Complex{}, Complex{}, std::polar(1.0, p.zeta)}};
}

// Balanced MZI: beam splitter, phase plate, beam splitter.
// Equals i*e^{i(phi+zeta)/2} * [[sin(phi'/2), cos(phi'/2)], [cos(phi'/2), -sin(phi'/2)]].
inline Mat2 mzi_unitary(const MziParams& p) {
    const Mat2 bs = beam_splitter();
    return bs * phase_plate(p) * bs;
}

// Ideal M-fold unitary e^{i M phi' sigma_y / 2}, i.e. the closed form with the
// global phase e^{i M phi'/2} dropped. Intensities are phase-free, so the
// prefactor is never load-bearing; equal_up_to_global_phase absorbs it.
inline Mat2 cbw_closed_form(double phi_prime, int m_order) {
    if (m_order < 1) throw std::invalid_argument("cbw_closed_form: M must be >= 1");
    if (!std::isfinite(phi_prime)) throw std::invalid_argument("cbw_closed_form: non-finite phase");
    const double half = 0.5 * m_order * phi_prime;
    const double c = std::cos(half), s = std::sin(half);
    return Mat2{{Complex{c}, Complex{s}, Complex{-s}, Complex{c}}};
}

}  // namespace cbw
