#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cbw/mat2.hpp"
#include "cbw/noise.hpp"
#include "cbw/optics.hpp"

using namespace cbw;

namespace {

constexpr double kPi = std::numbers::pi;

double uniform_angle(std::uint64_t seed, std::uint64_t k) {
    return (uniform_half_open(counter_hash(seed, k)) - 0.5) * 4.0 * kPi;
}

Mat2 from_rows(Complex a, Complex b, Complex c, Complex d) { return Mat2{{a, b, c, d}}; }

}  // namespace

TEST_CASE("beam splitter matches the printed matrix") {
    const Mat2 bs = beam_splitter();
    const double s = 1.0 / std::numbers::sqrt2;
    for (const Complex& z : bs.e) CHECK(std::abs(z) == doctest::Approx(s).epsilon(1e-14));
    CHECK(max_abs_diff(bs, from_rows({s, 0}, {0, s}, {0, s}, {s, 0})) < 1e-15);
    CHECK(is_unitary(bs, 1e-12));
}

TEST_CASE("two beam splitters give i*sigma_x") {
    const Mat2 bs2 = beam_splitter() * beam_splitter();
    CHECK(max_abs_diff(bs2, Complex{0.0, 1.0} * pauli_x()) < 1e-12);
}

TEST_CASE("phase plate basics") {
    CHECK(max_abs_diff(phase_plate({0.0, 0.0}), Mat2::identity()) < 1e-15);
    CHECK(max_abs_diff(phase_plate({kPi, 0.0}), from_rows({-1, 0}, {}, {}, {1, 0})) < 1e-12);
    // Equal phases factor out as a pure global phase.
    const PhaseMatch pm = equal_up_to_global_phase(phase_plate({kPi / 2, kPi / 2}), Mat2::identity(), 1e-12);
    CHECK(pm.equal);
    CHECK(pm.phase == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK_THROWS_AS(phase_plate({std::nan(""), 0.0}), std::invalid_argument);
}

TEST_CASE("mzi unitary hand-derived cases") {
    CHECK(max_abs_diff(mzi_unitary({0.0, 0.0}), Complex{0.0, 1.0} * pauli_x()) < 1e-12);

    const Mat2 bar = mzi_unitary({kPi, 0.0});
    CHECK(std::abs(bar.at(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(bar.at(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(bar.at(0, 1)) < 1e-12);
    CHECK(std::abs(bar.at(1, 0)) < 1e-12);

    const Mat2 half = mzi_unitary({kPi / 2, 0.0});
    CHECK(std::norm(half.at(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mzi entry moduli are sin/cos of phi'/2") {
    for (std::uint64_t k = 0; k < 64; ++k) {
        const MziParams p{uniform_angle(11, 2 * k), uniform_angle(11, 2 * k + 1)};
        const Mat2 u = mzi_unitary(p);
        const double s = std::abs(std::sin(0.5 * p.phi_prime()));
        const double c = std::abs(std::cos(0.5 * p.phi_prime()));
        CHECK(std::abs(u.at(0, 0)) == doctest::Approx(s).epsilon(1e-10));
        CHECK(std::abs(u.at(1, 1)) == doctest::Approx(s).epsilon(1e-10));
        CHECK(std::abs(u.at(0, 1)) == doctest::Approx(c).epsilon(1e-10));
        CHECK(std::abs(u.at(1, 0)) == doctest::Approx(c).epsilon(1e-10));
    }
}

TEST_CASE("cbw closed form") {
    CHECK(max_abs_diff(cbw_closed_form(0.0, 1), Mat2::identity()) < 1e-15);
    CHECK(max_abs_diff(cbw_closed_form(0.0, 7), Mat2::identity()) < 1e-15);
    CHECK(max_abs_diff(cbw_closed_form(kPi, 2), Complex{-1.0} * Mat2::identity()) < 1e-12);
    // |<u|U|u>|^2 = cos^2(M phi'/2): zero at M phi' = pi.
    CHECK(std::norm(cbw_closed_form(kPi / 3, 3).at(0, 0)) < 1e-24);
    CHECK_THROWS_AS(cbw_closed_form(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(cbw_closed_form(1.0, -3), std::invalid_argument);
}

TEST_CASE("cbw closed form row-0 intensities satisfy Iu + Il = 1") {
    for (std::uint64_t k = 0; k < 200; ++k) {
        const double phi = uniform_angle(23, k);
        const int m_order = 1 + static_cast<int>(counter_hash(23, 1000 + k) % 8);
        const Mat2 u = cbw_closed_form(phi, m_order);
        const double iu = std::norm(u.at(0, 0));
        const double il = std::norm(u.at(0, 1));
        CHECK(iu == doctest::Approx(std::pow(std::cos(0.5 * m_order * phi), 2)).epsilon(1e-12));
        CHECK(il == doctest::Approx(std::pow(std::sin(0.5 * m_order * phi), 2)).epsilon(1e-12));
        CHECK(iu + il == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rotation composition: angles add") {
    for (std::uint64_t k = 0; k < 50; ++k) {
        const double phi = uniform_angle(31, k);
        const int m1 = 1 + static_cast<int>(counter_hash(31, 500 + k) % 6);
        const int m2 = 1 + static_cast<int>(counter_hash(31, 900 + k) % 6);
        const Mat2 prod = cbw_closed_form(phi, m1) * cbw_closed_form(phi, m2);
        CHECK(max_abs_diff(prod, cbw_closed_form(phi, m1 + m2)) < 1e-12);
    }
}

TEST_CASE("equal_up_to_global_phase") {
    const Mat2 u = mzi_unitary({0.9, 0.2});

    SUBCASE("pure phase factor is recovered") {
        // a = U against b = e^{i 1.3} U: a = e^{-i 1.3} b.
        const PhaseMatch pm = equal_up_to_global_phase(u, std::polar(1.0, 1.3) * u, 1e-9);
        CHECK(pm.equal);
        CHECK(pm.phase == doctest::Approx(-1.3).epsilon(1e-12));
        CHECK(pm.residual < 1e-14);
    }
    SUBCASE("i sigma_x vs sigma_x") {
        const PhaseMatch pm = equal_up_to_global_phase(Complex{0.0, 1.0} * pauli_x(), pauli_x(), 1e-9);
        CHECK(pm.equal);
        CHECK(pm.phase == doctest::Approx(kPi / 2).epsilon(1e-12));
    }
    SUBCASE("sigma_x vs sigma_z differ under any phase") {
        const PhaseMatch pm = equal_up_to_global_phase(pauli_x(), pauli_z(), 1e-9);
        CHECK_FALSE(pm.equal);
        CHECK(pm.residual > 0.9);
    }
    SUBCASE("degenerate reference is an error") {
        CHECK_THROWS_AS(equal_up_to_global_phase(u, Mat2{}, 1e-9), std::invalid_argument);
        CHECK_THROWS_AS(equal_up_to_global_phase(u, u, 0.0), std::invalid_argument);
    }
}

TEST_CASE("constructors produce unitaries: 1000 random draws") {
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const MziParams p{uniform_angle(47, 2 * k), uniform_angle(47, 2 * k + 1)};
        const Mat2 u = mzi_unitary(p);
        CHECK(max_abs_diff(u.adjoint() * u, Mat2::identity()) < 1e-12);
        CHECK(std::abs(std::abs(u.det()) - 1.0) < 1e-12);
        const int m_order = 1 + static_cast<int>(counter_hash(47, 5000 + k) % 12);
        CHECK(is_unitary(cbw_closed_form(p.phi_prime(), m_order), 1e-12));
        CHECK(is_unitary(phase_plate(p), 1e-12));
    }
}

TEST_CASE("norm conservation for random states") {
    for (std::uint64_t k = 0; k < 200; ++k) {
        const PathState psi{{Complex{uniform_angle(53, 4 * k), uniform_angle(53, 4 * k + 1)},
                             Complex{uniform_angle(53, 4 * k + 2), uniform_angle(53, 4 * k + 3)}}};
        const MziParams p{uniform_angle(59, 2 * k), uniform_angle(59, 2 * k + 1)};
        const Mat2 u = mzi_unitary(p);
        CHECK(std::abs(apply(u, psi).norm() - psi.norm()) < 1e-12 * (1.0 + psi.norm()));
    }
}

TEST_CASE("naive double MZI degenerates to -e^{i phi} * I") {
    // The motivating negative control: with the i-convention beam splitter a
    // cascade of two identical MZIs carries no fringe at all.
    for (std::uint64_t k = 0; k < 50; ++k) {
        const double phi = uniform_angle(61, k);
        const Mat2 u = mzi_unitary({phi, 0.0});
        const Mat2 expected = (Complex{-1.0} * std::polar(1.0, phi)) * Mat2::identity();
        CHECK(max_abs_diff(u * u, expected) < 1e-12);
    }
}
