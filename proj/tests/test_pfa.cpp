#include <doctest.h>

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/dilog.hpp"
#include "casimir/error.hpp"
#include "casimir/pfa.hpp"
#include "test_util.hpp"

using namespace casimir;
using testutil::rel;

namespace {
const double kPi = constants::pi;
const double kOmegaP = 1.37e16;  // gold-like plasma frequency, rad/s
const double kGamma = 5.32e13;   // gold-like relaxation rate, rad/s

MaterialPair same(const DielectricModel& m) { return {m, m}; }
MaterialPair perfect() { return same(make_perfect_reflector()); }

// temperature giving lambda_T = ratio * L
ThermalSpec thermal_for(double ratio, double gap) {
  return {constants::hbar * constants::c / (constants::k_B * ratio * gap)};
}
}  // namespace

TEST_SUITE("pfa") {
  TEST_CASE("dilogarithm") {
    CHECK(dilog(0.0) == 0.0);
    CHECK(std::abs(dilog(1.0) - kPi * kPi / 6.0) < 1e-14);
    CHECK(std::abs(dilog(-1.0) + kPi * kPi / 12.0) < 1e-14);
    // Li_2(1/2) = pi^2/12 - ln^2(2)/2
    CHECK(std::abs(dilog(0.5) - (kPi * kPi / 12.0 - 0.5 * std::log(2.0) * std::log(2.0))) < 1e-14);
    // mpmath polylog(2, x)
    CHECK(std::abs(dilog(0.9) - 1.2997147230049588) < 1e-14);
    CHECK(std::abs(dilog(-0.7) - (-0.60515840233770525)) < 1e-14);
    CHECK(std::abs(dilog(0.999999) - 1.6449192513305103) < 1e-14);
    // Li_2(x) + Li_2(-x) = Li_2(x^2) / 2
    for (double x : {0.1, 0.3, 0.6, 0.8, 0.95}) CHECK(std::abs(dilog(x) + dilog(-x) - 0.5 * dilog(x * x)) < 1e-14);
    CHECK_THROWS_AS(dilog(1.0 + 1e-12), Error);
    CHECK_THROWS_AS(dilog(-1.5), Error);
  }

  TEST_CASE("saddle-point traces") {
    const double gap = 1e-6;
    const double r_eff = 50e-6;
    for (int r : {1, 2, 3, 7}) {
      const double expected = r_eff / (4.0 * gap * r * r);
      CHECK(rel(tr_m_r_pfa(Polarization::TE, r, 0.0, gap, r_eff, perfect()), expected) < 1e-12);
      CHECK(rel(tr_m_r_pfa(Polarization::TM, r, 0.0, gap, r_eff, perfect()), expected) < 1e-12);
      CHECK(rel(tr_m_r_pfa(r, 0.0, gap, r_eff, perfect()), 2.0 * expected) < 1e-12);
    }
    const auto vac = make_dielectric(1.0);
    for (double xi : {0.0, 1e14, 1e16}) {
      CHECK(tr_m_r_pfa(1, xi, gap, r_eff, {vac, make_perfect_reflector()}) == 0.0);
      CHECK(tr_m_r_pfa(2, xi, gap, r_eff, same(vac)) == 0.0);
    }
    // r = 1 is the leading Li_2 series term: constant TM coefficient at xi = 0
    const double eps = 5.0;
    const double rho = (eps - 1.0) / (eps + 1.0);
    const auto diel = same(make_dielectric(eps));
    CHECK(rel(tr_m_r_pfa(Polarization::TM, 1, 0.0, gap, r_eff, diel), r_eff * rho * rho / (4.0 * gap)) < 1e-12);
    CHECK(tr_m_r_pfa(Polarization::TE, 1, 0.0, gap, r_eff, diel) == 0.0);
    // perfect reflector at xi > 0: (R/2r) e^{-2 r t} / (2 r L) per polarization
    const double t = 0.7;
    const double xi = t * constants::c / gap;
    for (int r : {1, 3})
      CHECK(rel(tr_m_r_pfa(Polarization::TM, r, xi, gap, r_eff, perfect()),
                r_eff / (4.0 * gap * r * r) * std::exp(-2.0 * r * t)) < 1e-12);
  }

  TEST_CASE("ideal zero-temperature energy and force") {
    for (double gap : {0.1e-6, 1e-6, 10e-6}) {
      const double radius = 100.0 * gap;
      const auto g = Geometry::plane_sphere(radius, gap);
      const double hc = constants::hbar * constants::c;
      const auto f = force(g, perfect(), {0.0});
      CHECK(rel(f.value, -std::pow(kPi, 3) * hc * radius / (360.0 * std::pow(gap, 3))) < 1e-6);
      const auto e = free_energy_zero_T(g, perfect());
      CHECK(rel(e.value, -std::pow(kPi, 3) * hc * radius / (720.0 * gap * gap)) < 1e-6);
    }
    const auto g = Geometry::plane_sphere(50e-6, 1e-6);
    CHECK(free_energy_zero_T(g, same(make_dielectric(1.0))).value == 0.0);
    const double ideal = free_energy_zero_T(g, perfect()).value;
    for (double eps : {1.5, 4.0, 80.0}) {
      const double v = free_energy_zero_T(g, same(make_dielectric(eps))).value;
      CHECK(v < 0.0);
      CHECK(std::abs(v) < std::abs(ideal));
    }
  }

  TEST_CASE("high-temperature limits") {
    const double gap = 1e-6;
    const auto th = thermal_for(0.01, gap);
    const double kt = constants::k_B * th.temperature;
    const Geometry spheres{30e-6, 70e-6, gap};
    const double r_eff = spheres.r_eff();
    const double ideal = -kt * r_eff * constants::zeta3 / (4.0 * gap);
    const auto fp = free_energy(spheres, perfect(), th);
    CHECK(rel(fp.value, ideal) < 1e-6);
    const auto fd = free_energy(spheres, same(make_drude(kOmegaP, kGamma)), th);
    CHECK(rel(fd.value, 0.5 * ideal) < 1e-6);
    const auto force_p = force(spheres, perfect(), th);
    CHECK(rel(force_p.value, -kt * r_eff * constants::zeta3 / (4.0 * gap * gap)) < 1e-6);
  }

  TEST_CASE("free energy is negative for identical materials") {
    const auto g = Geometry::plane_sphere(100e-6, 0.5e-6);
    for (const auto& m : {make_perfect_reflector(), make_plasma(kOmegaP), make_drude(kOmegaP, kGamma),
                          make_dielectric(3.0)})
      CHECK(free_energy(g, same(m), {300.0}).value < 0.0);
  }

  TEST_CASE("plane-sphere limit of the sphere-sphere geometry") {
    const double radius = 40e-6;
    const double gap = 0.8e-6;
    const auto mats = same(make_plasma(kOmegaP));
    const ThermalSpec th{300.0};
    const auto ps = Geometry::plane_sphere(radius, gap);
    const Geometry ss{radius, 1e6 * radius, gap};
    CHECK(rel(free_energy(ss, mats, th).value, free_energy(ps, mats, th).value) < 1e-5);
    CHECK(rel(force(ss, mats, th).value, force(ps, mats, th).value) < 1e-5);
    CHECK(rel(force(ps, mats, th).value, 2.0 * kPi * radius * plate_free_energy(gap, mats, th).value) < 1e-12);
  }

  TEST_CASE("Mercator sum of traces equals the dilogarithm form") {
    const ThermalSpec th{300.0};
    for (const auto& m : {make_perfect_reflector(), make_plasma(kOmegaP), make_drude(kOmegaP, kGamma)}) {
      for (double gap : {0.3e-6, 2e-6}) {
        const auto g = Geometry::plane_sphere(100e-6, gap);
        const auto direct = free_energy(g, same(m), th);
        const auto mercator = free_energy_mercator(g, same(m), th);
        CHECK(rel(mercator.value, direct.value) < 1e-8);
      }
    }
  }

  TEST_CASE("force equals minus the derivative of the free energy") {
    for (const auto& m : {make_perfect_reflector(), make_plasma(kOmegaP), make_drude(kOmegaP, kGamma)}) {
      for (double temp : {0.0, 300.0}) {
        const Geometry g{20e-6, 60e-6, 0.7e-6};
        const auto f = force(g, same(m), {temp});
        const auto fd = force_from_energy(g, same(m), {temp});
        CHECK(rel(f.value, fd.value) < 1e-6);
      }
    }
  }

  TEST_CASE("monotonic in the gap") {
    const ThermalSpec th{300.0};
    const auto mats = same(make_drude(kOmegaP, kGamma));
    double prev_e = INFINITY;
    double prev_f = INFINITY;
    for (double gap = 0.1e-6; gap < 20e-6; gap *= 1.6) {
      const auto g = Geometry::plane_sphere(200e-6, gap);
      const double e = std::abs(free_energy(g, mats, th).value);
      const double f = std::abs(force(g, mats, th).value);
      CHECK(e < prev_e);
      CHECK(f < prev_f);
      prev_e = e;
      prev_f = f;
    }
  }

  TEST_CASE("material ordering") {
    for (double temp : {0.0, 300.0}) {
      for (double gap : {0.2e-6, 1e-6, 5e-6}) {
        const auto g = Geometry::plane_sphere(100e-6, gap);
        const double drude = std::abs(force(g, same(make_drude(kOmegaP, kGamma)), {temp}).value);
        const double plasma = std::abs(force(g, same(make_plasma(kOmegaP)), {temp}).value);
        const double ideal = std::abs(force(g, perfect(), {temp}).value);
        CHECK(drude <= plasma);
        CHECK(plasma <= ideal);
      }
    }
  }

  TEST_CASE("thermal correction") {
    const double gap = 1e-6;
    const auto g = Geometry::plane_sphere(100e-6, gap);
    const auto plasma = same(make_plasma(kOmegaP));
    const auto th = thermal_for(50.0, gap);
    const auto poisson = thermal_correction(g, plasma, th);
    const auto direct = thermal_correction_direct(g, plasma, th);
    CHECK(rel(poisson.value, direct.value) < 1e-4);

    // suppressed as T -> 0
    double prev = INFINITY;
    for (double ratio : {20.0, 50.0, 200.0}) {
      const double v = std::abs(thermal_correction(g, plasma, thermal_for(ratio, gap)).value);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1e-3 * std::abs(force(g, plasma, {0.0}).value));

    // Drude: the estimate is reported; the result must be consistent with it
    const auto drude = same(make_drude(kOmegaP, kGamma));
    const auto dp = thermal_correction(g, drude, th);
    const auto dd = thermal_correction_direct(g, drude, th);
    MESSAGE("Drude lambda_T/L = 50: Poisson " << dp.value << " +- " << dp.est_error << ", direct " << dd.value);
    CHECK(std::isfinite(dp.value));
    CHECK(std::abs(dp.value - dd.value) <= dp.est_error + dd.est_error);
  }

  TEST_CASE("thermal wave-number support follows 1 / lambda_T") {
    const double gap = 1e-6;
    const auto g = Geometry::plane_sphere(100e-6, gap);
    const auto plasma = same(make_plasma(kOmegaP));
    double kl[3];
    double kt[3];
    const double ratios[3] = {50.0, 100.0, 200.0};
    for (int i = 0; i < 3; ++i) {
      const double kappa = thermal_kappa_support(g, plasma, thermal_for(ratios[i], gap));
      kl[i] = kappa * gap;
      kt[i] = kappa * ratios[i] * gap;
    }
    CHECK(kl[1] < kl[0]);
    CHECK(kl[2] < kl[1]);
    CHECK(kl[2] / kl[0] < 0.6);
    CHECK(kt[2] / kt[0] < 2.0);
    CHECK(kt[2] / kt[0] > 0.5);
  }

  TEST_CASE("effective area estimates") {
    CHECK(rel(ThermalSpec{300.0}.thermal_wavelength(), 7.63294839736e-6) < 1e-11);
    CHECK(std::abs(ThermalSpec{300.0}.thermal_wavelength() - 7.64e-6) < 0.01e-6);
    CHECK(std::isinf(ThermalSpec{0.0}.thermal_wavelength()));
    CHECK(ThermalSpec{300.0}.matsubara(0) == 0.0);
    CHECK(ThermalSpec{300.0}.matsubara(2) > ThermalSpec{300.0}.matsubara(1));

    const auto a = effective_area(Geometry::plane_sphere(100e-6, 1e-6), {300.0});
    CHECK(rel(a.cap_diameter, 10e-6) < 1e-12);
    CHECK(rel(a.area, 1e-10) < 1e-12);
    CHECK(rel(a.theta_cap, 0.1) < 1e-12);
    CHECK(rel(a.delta_k, 1e5) < 1e-12);
    CHECK(a.area_thermal > a.area);

    const auto lens = effective_area(Geometry::plane_sphere(0.156, 1e-6), {300.0});
    CHECK(lens.cap_diameter_thermal > 0.5e-3);
    CHECK(lens.cap_diameter_thermal < 2e-3);
  }
}
