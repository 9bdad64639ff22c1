#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "cst/timeutil.hpp"

namespace cst {

// Physical parameters of the receiver/storage/power-block plant.
// Units: powers in MW (thermal or electric as noted), energies in MWh, hours.
struct PlantDesign {
    // heliostat field
    double n_helio = 11547.0;
    double a_helio = 117.52;  // m^2, 11.3 m x 10.4 m
    double reflectance_rho = 0.95;
    double availability_c = 1.0;

    // receiver
    double q_pipe = 2.0;
    double q_ru = 175.0;
    double e_r = 175.0;
    double q_rl = 175.0;
    double q_rlim = 700.0;
    double q_rsd = 43.75;

    // power block
    double q_c = 164.3;
    double e_c = 164.3;
    double q_l = 65.7;
    double q_u = 329.0;
    double w_l = 65.7 * 115.0 / 329.0;
    double w_u = 115.0;
    double eta_p = 115.0 / 329.0;

    // storage
    double e_u = 3290.0;
    double soc_min = 0.1;

    // parasitics
    double l_r = 0.01;
    double l_c = 0.01;
    double w_h = 0.5;
    double e_hs = 0.2;
    // Condenser parasitic fraction: one value applies to every step,
    // otherwise one value per horizon step.
    std::vector<double> eta_c = {0.03};

    double storage_floor() const { return soc_min * e_u; }
    double condenser_fraction(std::size_t k) const;
    // Intercept of the linear part-load map w = eta_p*q + intercept*[on].
    double pb_intercept() const { return w_u - eta_p * q_u; }

    // Throws ValidationError on the first broken invariant.
    void validate() const;
    // Checks that depend on the step length (startup durations in whole
    // steps, storage large enough for one step of extremes).
    void validate_for_step(double dt_hours) const;
};

struct WeatherSample {
    double dni = 0.0;    // kW/m^2
    double t_amb = 25.0; // deg C
    double wind = 0.0;   // m/s
};

struct WeatherTrajectory {
    Timestamp start_timestamp{};
    double dt_hours = 0.5;
    std::vector<WeatherSample> samples;

    std::size_t size() const { return samples.size(); }
    Timestamp time_at(std::size_t k) const;
    // Steps [offset, offset+count) as a new trajectory.
    WeatherTrajectory slice(std::size_t offset, std::size_t count) const;
    void validate() const;
};

// Receiver heat losses. Radiative loss is a polynomial in ambient
// temperature; convective loss is a polynomial in ambient temperature plus
// wind times a second polynomial (at most linear) in ambient temperature.
struct LossModel {
    std::vector<double> rad_coeffs = {18.0};
    std::vector<double> conv_coeffs = {6.0};
    std::vector<double> conv_wind_coeffs = {0.5};

    static LossModel zero() { return LossModel{{0.0}, {0.0}, {0.0}}; }

    double radiative(double t_amb) const;
    double convective(double t_amb, double wind) const;
    void validate() const;
};

// Average optical efficiency by month and time-of-day slot. Either a
// constant or a full 12 x slots table; NaN entries mark missing data.
class OpticalEfficiencyTable {
public:
    static OpticalEfficiencyTable constant(double eta);
    static OpticalEfficiencyTable table(double slot_hours,
                                        std::array<std::vector<double>, 12> by_month);

    // Throws ConfigError when the slot for t has no entry.
    double at(Timestamp t) const;
    bool is_constant() const { return !slot_hours_.has_value(); }
    double slot_hours() const { return slot_hours_.value_or(0.0); }
    double constant_value() const { return constant_; }
    const std::array<std::vector<double>, 12>& months() const { return by_month_; }

    // Step length must be a whole number of table slots.
    void check_step(double dt_hours) const;

private:
    double constant_ = 0.6;
    std::optional<double> slot_hours_;
    std::array<std::vector<double>, 12> by_month_{};
};

// Everything needed to turn weather into receiver potential power.
struct Plant {
    PlantDesign design;
    LossModel loss;
    OpticalEfficiencyTable eff = OpticalEfficiencyTable::constant(0.6);
};

double heliostat_field_power(const PlantDesign& design, const WeatherSample& sample, double eta_opt);

double receiver_potential_power(double q_helio, const WeatherSample& sample,
                                const PlantDesign& design, const LossModel& loss);

double dumped_power(double q_p, bool in_startup, bool in_shutdown, double q_ract,
                    const PlantDesign& design);

double net_output(double w_gross, double eta_c, double w_purchased);

// Per-step potential receiver power for a whole trajectory.
std::vector<double> potential_power_series(const WeatherTrajectory& traj, const PlantDesign& design,
                                           const LossModel& loss,
                                           const OpticalEfficiencyTable& eff);

struct ScenarioEnergy {
    double e_helio = 0.0;
    double e_rad = 0.0;
    double e_conv = 0.0;
    double e_in = 0.0;
};

ScenarioEnergy scenario_energy_terms(const WeatherTrajectory& traj, const PlantDesign& design,
                                     const LossModel& loss, const OpticalEfficiencyTable& eff);

double scenario_potential_energy(const WeatherTrajectory& traj, const PlantDesign& design,
                                 const LossModel& loss, const OpticalEfficiencyTable& eff);

}  // namespace cst
