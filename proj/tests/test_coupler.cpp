#include <doctest.h>

#include <cmath>

#include "hqc/coupler.hpp"
#include "hqc/errors.hpp"

using namespace hqc;

namespace {

// Closed-form couplings evaluated from scratch.
struct Ref {
  double Cc, EC1, EC2, Ecap, Eind, Ekerr, EL1, EL2, r1, r2, Jcap, Jind, Jnl, Delta;
};

Ref closed(const CircuitParams& p) {
  Ref r{};
  r.Cc = p.C_a / p.N_J + p.C_b;
  const double det = p.C_J1 * p.C_J2 + (p.C_J1 + p.C_J2) * r.Cc;
  r.EC1 = (p.C_J2 + r.Cc) / det;
  r.EC2 = (p.C_J1 + r.Cc) / det;
  r.Ecap = r.Cc / det;
  r.Eind = p.E_J * (p.alpha + p.E_L / p.E_J - 1.0 / p.N_J);
  r.Ekerr = p.E_J * (p.alpha - 1.0 / std::pow(p.N_J, 3));
  r.EL1 = p.E_J1 + r.Eind;
  r.EL2 = p.E_J2 + r.Eind;
  r.r1 = 2 * r.EC1 / r.EL1;
  r.r2 = 2 * r.EC2 / r.EL2;
  const double q = std::pow(r.r1 * r.r2, 0.25);
  r.Jcap = 2 * r.Ecap / q;
  r.Jind = -r.Eind * q;
  r.Jnl = 0.5 * r.Ekerr * (std::pow(r.r1, 0.75) * std::pow(r.r2, 0.25) + std::pow(r.r1, 0.25) * std::pow(r.r2, 0.75));
  r.Delta = r.Ekerr * std::sqrt(r.r1 * r.r2);
  return r;
}

CircuitParams at(double alpha) {
  CircuitParams p = reference_design_params();
  p.alpha = alpha;
  return p;
}

}  // namespace

TEST_SUITE("coupler") {
  TEST_CASE("closed form matches an independent evaluation") {
    for (double a : {0.02, 0.043, 0.07, 0.2}) {
      const auto p = at(a);
      const auto r = derive_couplings(p);
      const auto o = closed(p);
      CHECK(r.C_c == doctest::Approx(o.Cc).epsilon(1e-14));
      CHECK(r.E_C1 == doctest::Approx(o.EC1).epsilon(1e-14));
      CHECK(r.E_cap_coup == doctest::Approx(o.Ecap).epsilon(1e-14));
      CHECK(r.J_cap == doctest::Approx(o.Jcap).epsilon(1e-12));
      CHECK(r.J_ind == doctest::Approx(o.Jind).epsilon(1e-12));
      CHECK(r.J_nonlin == doctest::Approx(o.Jnl).epsilon(1e-12));
      CHECK(r.Delta == doctest::Approx(o.Delta).epsilon(1e-12));
      CHECK(r.omega1 == doctest::Approx(std::sqrt(8 * o.EC1 * o.EL1)).epsilon(1e-12));
      CHECK(r.delta1 == doctest::Approx(-(p.E_J1 + o.Ekerr) * o.EC1 / o.EL1).epsilon(1e-12));
      CHECK(r.Omega1 == doctest::Approx(r.omega1 + r.delta1 - r.Delta / 2).epsilon(1e-12));
    }
  }

  TEST_CASE("inductive coupling vanishes at alpha = 1/N_J - E_L/E_J") {
    auto p = reference_design_params();
    p.E_L = 100.0;
    p.alpha = 1.0 / p.N_J - p.E_L / p.E_J;
    CHECK(std::abs(derive_couplings(p).E_ind_coup) < 1e-12);
    CHECK(derive_couplings(p).J_ind == doctest::Approx(0.0));
  }

  TEST_CASE("property: hop sum identity and opposite linear signs") {
    for (const auto& row : sweep_alpha(reference_design_params(), 0.02, 0.3, 57)) {
      REQUIRE(row.physical);
      const auto& r = row.result;
      CHECK(std::abs(r.J_hop - (r.J_cap + r.J_ind + r.J_nonlin)) <= 1e-14 * std::max(1.0, std::abs(r.J_hop)));
      if (r.E_ind_coup > 0) {
        CHECK(r.J_cap > 0);
        CHECK(r.J_ind < 0);
      }
    }
  }

  TEST_CASE("reference sweep: sign change, fixed charge coupling, rising cross-Kerr") {
    const auto rows = sweep_alpha(reference_design_params(), 0.02, 0.07, 101);
    REQUIRE(rows.size() == 101);
    CHECK(rows.front().result.J_hop * rows.back().result.J_hop < 0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      CHECK(rows[k].result.E_cap_coup == rows.front().result.E_cap_coup);
      if (k) CHECK(rows[k].result.Delta > rows[k - 1].result.Delta);
    }
  }

  TEST_CASE("capacitive hopping drifts by under 2% across the reference sweep") {
    // J_cap moves only through the dressed inductive energies.
    const auto rows = sweep_alpha(reference_design_params(), 0.02, 0.07, 101);
    double lo = 1e9, hi = -1e9;
    for (const auto& row : rows) {
      lo = std::min(lo, row.result.J_cap);
      hi = std::max(hi, row.result.J_cap);
      const auto o = closed(at(row.alpha));
      CHECK(row.result.J_cap * std::pow(o.r1 * o.r2, 0.25) / 2 == doctest::Approx(o.Ecap).epsilon(1e-13));
    }
    CHECK((hi - lo) / lo < 0.02);
  }

  TEST_CASE("cancellation point of the reference design") {
    const auto c = find_cancellation(reference_design_params());
    CHECK(c.alpha == doctest::Approx(0.043).epsilon(0.002 / 0.043));
    CHECK(std::abs(c.result.J_hop) < 1e-10);
    CHECK(c.result.C_c == doctest::Approx(1.0 / 48.0));
    CHECK(c.alpha * reference_design_params().E_J == doctest::Approx(51.7).epsilon(0.05));
  }

  TEST_CASE("linear-only cancellation matches a fixed-point solve") {
    const auto p = reference_design_params();
    const auto o = closed(p);
    // E_ind = 2 E_cap / sqrt(r1 r2), with r depending on E_ind.
    double e_ind = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double r1 = 2 * o.EC1 / (p.E_J1 + e_ind), r2 = 2 * o.EC2 / (p.E_J2 + e_ind);
      e_ind = 2 * o.Ecap / std::sqrt(r1 * r2);
    }
    const double alpha = e_ind / p.E_J + 1.0 / p.N_J - p.E_L / p.E_J;
    CancellationOptions opt;
    opt.include_nonlinear = false;
    const auto c = find_cancellation(p, opt);
    CHECK(c.alpha == doctest::Approx(alpha).epsilon(1e-9));
    CHECK(c.alpha > 1.0 / p.N_J - p.E_L / p.E_J);
  }

  TEST_CASE("no sign change: root search reports not found") {
    CHECK_FALSE(bisect_root([](double x) { return 1.0 + x; }, 0.0, 1.0, 1e-12).has_value());
    CancellationOptions opt;
    opt.alpha_lo = 0.05;
    opt.alpha_hi = 0.07;
    CHECK_THROWS_AS(find_cancellation(reference_design_params(), opt), NotFound);
  }

  TEST_CASE("negative dressed inductive energy is unphysical") {
    auto p = reference_design_params();
    p.E_L = 0.0;
    p.alpha = 0.001;
    CHECK_THROWS_AS(derive_couplings(p), UnphysicalDesign);
  }

  TEST_CASE("parameter validation and JSON forms") {
    auto p = reference_design_params();
    p.C_a = 0.01;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    const auto q = nlohmann::json::parse(R"({"E_Ca": 12, "E_J": 1200})").get<CircuitParams>();
    CHECK(q.C_a == doctest::Approx(1.0 / 12.0));
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"E_Ca": 12, "C_a": 0.1})").get<CircuitParams>(), std::invalid_argument);
    CHECK(reference_design_params().external_phase() == doctest::Approx(4 * M_PI));
  }

  TEST_CASE("global potential minimum sits at the origin for the reference design") {
    const auto r = potential_minimum_check(at(0.043));
    CHECK(r.origin_is_local);
    CHECK(r.hessian_min_eig > 0);
    CHECK(r.origin_is_global);
  }

  TEST_CASE("without the shunt inductor the origin is only metastable") {
    auto p = at(0.3);
    p.E_L = 0.0;
    const auto r = potential_minimum_check(p);
    CHECK(r.origin_is_local);
    CHECK_FALSE(r.origin_is_global);
    CHECK(r.metastable);
    CHECK_FALSE(r.warnings.empty());
  }

  TEST_CASE("uncoupled modes have no numeric cross-Kerr") {
    TwoModeModel m;
    m.E_C1 = 1.0;
    m.E_C2 = 1.1;
    m.E_J1 = 80.0;
    m.E_J2 = 60.0;
    const auto r = numeric_validate(m, 10);
    CHECK(std::abs(r.Delta_num) < 1e-9);
    CHECK(std::abs(r.J_num) < 1e-9);
  }

  TEST_CASE("numeric cross-Kerr at the cancellation point") {
    auto p = reference_design_params();
    p.alpha = find_cancellation(p).alpha;
    const auto closed_form = derive_couplings(p);
    const auto r = numeric_validate(p, 10);
    CHECK(std::abs(r.Delta_num - closed_form.Delta) / closed_form.Delta < 0.25);
    CHECK(r.relative_shift < 0.01);
    CHECK(r.Delta_num > 0);
    CHECK_THROWS_AS(numeric_validate(p, 6), std::invalid_argument);
  }

  TEST_CASE("property: numeric hopping agrees in sign with the closed form away from cancellation") {
    const double star = find_cancellation(reference_design_params()).alpha;
    for (double a = 0.035; a <= 0.0701; a += 0.005) {
      if (std::abs(a - star) < 0.005) continue;
      const auto p = at(a);
      const auto r = numeric_validate(p, 10);
      const auto c = derive_couplings(p);
      CHECK(std::signbit(r.J_num) == std::signbit(c.J_hop));
      CHECK(std::signbit(r.Delta_num) == std::signbit(c.Delta));
    }
  }

  TEST_CASE("cross-Kerr drops as the transmons become more harmonic") {
    auto p = at(0.043);
    const double before = derive_couplings(p).Delta;
    p.E_J1 *= 2;
    p.E_J2 *= 2;
    CHECK(derive_couplings(p).Delta < before);
  }

  TEST_CASE("outer-node crosstalk for the reference design") {
    auto p = reference_design_params();
    p.alpha = find_cancellation(p).alpha;
    const auto x = crosstalk_estimate(p);
    CHECK(x.J_xtalk == doctest::Approx(0.004).epsilon(0.5));
    CHECK(x.J_xtalk > 0);
  }

  TEST_CASE("crosstalk charge coupling is quadratic in a small coupling capacitance") {
    auto p = reference_design_params();
    p.E_J = 1e6;
    p.alpha = 0.3;
    p.C_a = 4e-4;
    const double small = crosstalk_estimate(p).E_13;
    p.C_a = 8e-4;
    const double twice = crosstalk_estimate(p).E_13;
    CHECK(twice / small == doctest::Approx(4.0).epsilon(0.01));
    CHECK(small < 1e-7);
  }

  TEST_CASE("resonator-mediated hopping") {
    const auto neg = resonator_mediated_j(0.05, 5.0, -0.3, 6.0);
    CHECK(neg.J_eff < 0);
    CHECK(neg.warnings.empty());
    CHECK(resonator_mediated_j(0.05, 5.0, 0.0, 6.0).J_eff == 0.0);
    CHECK(resonator_mediated_j(0.0, 5.0, -0.3, 6.0).J_eff == 0.0);
    CHECK_FALSE(resonator_mediated_j(0.5, 5.0, -0.3, 6.0).warnings.empty());
    CHECK_THROWS_AS(resonator_mediated_j(0.05, 5.0, -0.3, 5.0), std::invalid_argument);
  }

  TEST_CASE("MHz conversion") {
    CHECK(to_mhz(0.8) == doctest::Approx(160.0));
    CHECK(to_mhz(1.0, 150.0) == doctest::Approx(150.0));
  }
}
