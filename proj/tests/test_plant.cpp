#include <doctest.h>

#include <cmath>

#include "cst/errors.hpp"
#include "cst/plant.hpp"
#include "cst/random.hpp"

using namespace cst;

namespace {

// Field power written out from first principles: count x area gives m^2,
// times reflectance, availability and efficiency, times kW/m^2, to MW.
double field_mw(double n, double area, double rho, double c, double eta, double dni_kw) {
    const double kilowatts = n * area * rho * c * eta * dni_kw;
    return kilowatts / 1000.0;
}

WeatherTrajectory constant_traj(double dni, std::size_t steps, double dt) {
    WeatherTrajectory t;
    t.start_timestamp = midnight(Date{std::chrono::year{2020}, std::chrono::January, std::chrono::day{1}});
    t.dt_hours = dt;
    t.samples.assign(steps, WeatherSample{dni, 25.0, 0.0});
    return t;
}

}  // namespace

TEST_CASE("field power for the reference heliostat field") {
    const PlantDesign d;
    const double got = heliostat_field_power(d, {0.95, 25.0, 0.0}, 0.6);
    CHECK(got == doctest::Approx(field_mw(11547, 117.52, 0.95, 1.0, 0.6, 0.95)).epsilon(1e-12));
    CHECK(got == doctest::Approx(734.82).epsilon(1e-5));
    // design check: a 700 MW receiver is sized close to this field output
    CHECK(got >= 700.0);
    CHECK(got <= 770.0);
}

TEST_CASE("field power vanishes without sun or without field") {
    PlantDesign d;
    CHECK(heliostat_field_power(d, {0.0, 25.0, 0.0}, 0.6) == 0.0);
    d.availability_c = 0.0;
    CHECK(heliostat_field_power(d, {0.9, 25.0, 0.0}, 0.6) == 0.0);
}

TEST_CASE("field power is non-decreasing in irradiance and each factor") {
    Rng rng(11);
    const PlantDesign base;
    for (int i = 0; i < 200; ++i) {
        const double dni = rng.uniform01();
        const double eta = rng.uniform01();
        const double lo = heliostat_field_power(base, {dni, 25.0, 0.0}, eta);
        CHECK(heliostat_field_power(base, {dni + 0.01, 25.0, 0.0}, eta) >= lo);
        CHECK(heliostat_field_power(base, {dni, 25.0, 0.0}, std::min(1.0, eta + 0.01)) >= lo);
        PlantDesign more = base;
        more.reflectance_rho = std::min(1.0, base.reflectance_rho + 0.01);
        CHECK(heliostat_field_power(more, {dni, 25.0, 0.0}, eta) >= lo);
    }
}

TEST_CASE("receiver potential power subtracts losses and clamps") {
    PlantDesign d;
    d.q_pipe = 10.0;
    const LossModel loss{{20.0}, {15.0}, {0.0}};
    CHECK(receiver_potential_power(700.0, {0.9, 25.0, 4.0}, d, loss) == doctest::Approx(700.0 - 20.0 - 15.0 - 10.0));
    CHECK(receiver_potential_power(700.0, {0.9, 25.0, 4.0}, d, loss) == doctest::Approx(655.0));

    const LossModel heavy{{30.0}, {20.0}, {0.0}};
    PlantDesign no_pipe;
    no_pipe.q_pipe = 0.0;
    CHECK(receiver_potential_power(30.0, {0.9, 25.0, 0.0}, no_pipe, heavy) == 0.0);
    CHECK(receiver_potential_power(412.5, {0.9, 25.0, 7.0}, no_pipe, LossModel::zero()) == 412.5);
}

TEST_CASE("loss polynomials") {
    const LossModel m{{1.0, 2.0}, {3.0}, {0.5, 0.1}};
    // 1 + 2t at t = 10
    CHECK(m.radiative(10.0) == doctest::Approx(21.0));
    // 3 + wind * (0.5 + 0.1 t) at t = 10, wind 4
    CHECK(m.convective(10.0, 4.0) == doctest::Approx(3.0 + 4.0 * 1.5));
    const LossModel negative{{-5.0}, {-1.0}, {0.0}};
    CHECK(negative.radiative(20.0) == 0.0);
    CHECK(negative.convective(20.0, 3.0) == 0.0);
}

TEST_CASE("dumped power") {
    const PlantDesign d;
    CHECK(dumped_power(500.0, false, false, 400.0, d) == doctest::Approx(100.0));
    CHECK(dumped_power(0.0, false, false, 0.0, d) == 0.0);
    CHECK(dumped_power(100.0, true, false, 0.0, d) == 0.0);
    CHECK(dumped_power(300.0, false, true, 200.0, d) == doctest::Approx(300.0 - 43.75 - 200.0));
}

TEST_CASE("net output") {
    CHECK(net_output(100.0, 0.05, 3.0) == doctest::Approx(92.0));
    CHECK(net_output(0.0, 0.03, 0.0) == 0.0);
    CHECK(net_output(0.0, 0.03, 5.0) == -5.0);
}

TEST_CASE("scenario potential energy") {
    const PlantDesign d;
    const auto eff = OpticalEfficiencyTable::constant(0.6);
    CHECK(scenario_potential_energy(constant_traj(0.0, 48, 0.5), d, LossModel{}, eff) == 0.0);

    PlantDesign no_pipe;
    no_pipe.q_pipe = 0.0;
    const double e = scenario_potential_energy(constant_traj(1.0, 2, 0.5), no_pipe, LossModel::zero(), eff);
    CHECK(e == doctest::Approx(2 * 0.5 * field_mw(11547, 117.52, 0.95, 1.0, 0.6, 1.0)).epsilon(1e-12));
    CHECK(e == doctest::Approx(773.49).epsilon(1e-5));

    // losses larger than what the field collects
    const LossModel huge{{5000.0}, {0.0}, {0.0}};
    CHECK(scenario_potential_energy(constant_traj(0.3, 4, 0.5), d, huge, eff) == 0.0);
}

TEST_CASE("zero-loss energy equals the step-weighted field power sum") {
    Rng rng(5);
    PlantDesign d;
    d.q_pipe = 0.0;
    const auto eff = OpticalEfficiencyTable::constant(0.55);
    for (int trial = 0; trial < 20; ++trial) {
        auto traj = constant_traj(0.0, 48, 0.5);
        double sum = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            traj.samples[k].dni = rng.uniform01();
            sum += 0.5 * heliostat_field_power(d, traj.samples[k], 0.55);
        }
        const auto terms = scenario_energy_terms(traj, d, LossModel::zero(), eff);
        CHECK(terms.e_in == sum);
        CHECK(terms.e_in <= terms.e_helio);
    }
}

TEST_CASE("energy never exceeds the field energy and is never negative") {
    Rng rng(9);
    const PlantDesign d;
    const auto eff = OpticalEfficiencyTable::constant(0.6);
    for (int trial = 0; trial < 50; ++trial) {
        auto traj = constant_traj(0.0, 24, 0.5);
        for (auto& s : traj.samples) {
            s.dni = rng.uniform01();
            s.t_amb = 40.0 * rng.uniform01();
            s.wind = 10.0 * rng.uniform01();
        }
        const auto terms = scenario_energy_terms(traj, d, LossModel{}, eff);
        CHECK(terms.e_in >= 0.0);
        CHECK(terms.e_in <= terms.e_helio + 1e-9);
    }
}

TEST_CASE("optical efficiency table lookups") {
    std::array<std::vector<double>, 12> months;
    for (auto& m : months) m.assign(48, 0.5);
    months[0][20] = 0.7;  // January 10:00-10:30
    months[0][21] = std::nan("");
    const auto table = OpticalEfficiencyTable::table(0.5, months);
    const auto day = midnight(Date{std::chrono::year{2020}, std::chrono::January, std::chrono::day{3}});
    CHECK(table.at(add_hours(day, 10.0)) == 0.7);
    CHECK(table.at(add_hours(day, 10.25)) == 0.7);
    CHECK(table.at(add_hours(day, 3.0)) == 0.5);
    CHECK_THROWS_AS(table.at(add_hours(day, 10.5)), ConfigError);
    CHECK_NOTHROW(table.check_step(0.5));
    CHECK_NOTHROW(table.check_step(1.0));
    CHECK_THROWS_AS(table.check_step(0.25), ConfigError);
}

TEST_CASE("plant design invariants") {
    PlantDesign d;
    CHECK_NOTHROW(d.validate());
    CHECK_NOTHROW(d.validate_for_step(0.5));
    d.q_rl = 800.0;
    CHECK_THROWS_AS(d.validate(), ValidationError);
    PlantDesign e;
    e.e_r = 100.0;  // not a whole number of half-hour startup steps
    CHECK_THROWS_AS(e.validate_for_step(0.5), ValidationError);
    PlantDesign f;
    f.eta_c = {};
    CHECK_THROWS_AS(f.validate(), ValidationError);
    PlantDesign g;
    g.eta_c = {0.01, 0.02};
    CHECK(g.condenser_fraction(1) == 0.02);
}

TEST_CASE("trajectory slicing") {
    auto t = constant_traj(0.4, 96, 0.5);
    for (std::size_t k = 0; k < t.size(); ++k) t.samples[k].dni = static_cast<double>(k);
    const auto s = t.slice(18, 24);
    CHECK(s.size() == 24);
    CHECK(s.samples.front().dni == 18.0);
    CHECK(hour_of_day(s.start_timestamp) == 9.0);
    CHECK_THROWS_AS(t.slice(90, 10), ValidationError);
}
