#include "cst/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cst/errors.hpp"

namespace cst {
namespace {

double horner(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("plant design: " + what);
}

bool whole_steps(double energy, double dt, double power) {
    const double n = energy / (dt * power);
    return n >= 1.0 - 1e-9 && std::abs(n - std::round(n)) < 1e-9;
}

}  // namespace

double PlantDesign::condenser_fraction(std::size_t k) const {
    if (eta_c.size() == 1) return eta_c.front();
    if (k >= eta_c.size()) throw ValidationError("condenser fraction missing for step " + std::to_string(k));
    return eta_c[k];
}

void PlantDesign::validate() const {
    require(n_helio >= 0 && a_helio >= 0 && reflectance_rho >= 0 && reflectance_rho <= 1,
            "heliostat field parameters out of range");
    require(availability_c >= 0 && availability_c <= 1, "availability_c must lie in [0,1]");
    require(q_rl > 0 && q_rl <= q_rlim, "need 0 < q_rl <= q_rlim");
    require(q_l > 0 && q_l <= q_u, "need 0 < q_l <= q_u");
    require(w_l > 0 && w_l <= w_u, "need 0 < w_l <= w_u");
    require(soc_min >= 0 && soc_min < 1, "need 0 <= soc_min < 1");
    require(e_u > 0, "storage capacity e_u must be positive");
    for (double v : {q_pipe, q_ru, e_r, q_rsd, q_c, e_c, eta_p, l_r, l_c, w_h, e_hs})
        require(v >= 0, "energies, powers and parasitics must be non-negative");
    require(q_ru > 0 && q_c > 0, "startup draws must be positive");
    require(eta_p * q_u <= w_u + 1e-9, "eta_p * q_u must not exceed w_u");
    require(q_ru <= q_rl, "receiver startup draw q_ru must not exceed q_rl");
    require(!eta_c.empty(), "eta_c needs at least one value");
    for (double v : eta_c) require(v >= 0 && v <= 1, "eta_c values must lie in [0,1]");
}

void PlantDesign::validate_for_step(double dt) const {
    validate();
    require(dt > 0, "step length must be positive");
    require(whole_steps(e_r, dt, q_ru), "e_r / (dt * q_ru) must be a whole number of steps");
    require(whole_steps(e_c, dt, q_c), "e_c / (dt * q_c) must be a whole number of steps");
    require(e_u * (1.0 - soc_min) > dt * (q_rlim + q_u + q_c),
            "usable storage must exceed one step of maximum charge plus discharge");
}

Timestamp WeatherTrajectory::time_at(std::size_t k) const {
    return add_hours(start_timestamp, dt_hours * static_cast<double>(k));
}

WeatherTrajectory WeatherTrajectory::slice(std::size_t offset, std::size_t count) const {
    if (offset + count > samples.size())
        throw ValidationError("trajectory slice [" + std::to_string(offset) + ", " +
                              std::to_string(offset + count) + ") exceeds " +
                              std::to_string(samples.size()) + " samples");
    WeatherTrajectory out;
    out.start_timestamp = time_at(offset);
    out.dt_hours = dt_hours;
    out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(offset),
                       samples.begin() + static_cast<std::ptrdiff_t>(offset + count));
    return out;
}

void WeatherTrajectory::validate() const {
    if (!(dt_hours > 0)) throw ValidationError("trajectory step must be positive");
    if (samples.empty()) throw ValidationError("trajectory is empty");
    for (const auto& s : samples)
        if (!(s.dni >= 0) || !(s.wind >= 0))
            throw ValidationError("trajectory sample with negative DNI or wind");
}

double LossModel::radiative(double t_amb) const { return std::max(0.0, horner(rad_coeffs, t_amb)); }

double LossModel::convective(double t_amb, double wind) const {
    return std::max(0.0, horner(conv_coeffs, t_amb) + wind * horner(conv_wind_coeffs, t_amb));
}

void LossModel::validate() const {
    if (rad_coeffs.size() > 5 || conv_coeffs.size() > 5)
        throw ConfigError("loss polynomials are limited to degree 4");
    if (conv_wind_coeffs.size() > 2)
        throw ConfigError("wind term is bilinear: at most 2 coefficients");
}

OpticalEfficiencyTable OpticalEfficiencyTable::constant(double eta) {
    if (!(eta >= 0 && eta <= 1)) throw ConfigError("optical efficiency must lie in [0,1]");
    OpticalEfficiencyTable t;
    t.constant_ = eta;
    return t;
}

OpticalEfficiencyTable OpticalEfficiencyTable::table(double slot_hours,
                                                     std::array<std::vector<double>, 12> by_month) {
    if (!(slot_hours > 0) || std::abs(24.0 / slot_hours - std::round(24.0 / slot_hours)) > 1e-9)
        throw ConfigError("efficiency slot length must divide 24 h");
    const auto slots = static_cast<std::size_t>(std::llround(24.0 / slot_hours));
    for (auto& row : by_month) {
        if (!row.empty() && row.size() != slots)
            throw ConfigError("efficiency table rows need " + std::to_string(slots) + " entries");
        for (double v : row)
            if (!std::isnan(v) && !(v >= 0 && v <= 1))
                throw ConfigError("optical efficiency entries must lie in [0,1]");
    }
    OpticalEfficiencyTable t;
    t.slot_hours_ = slot_hours;
    t.by_month_ = std::move(by_month);
    return t;
}

double OpticalEfficiencyTable::at(Timestamp t) const {
    if (!slot_hours_) return constant_;
    const unsigned m = month_of(t);
    const auto& row = by_month_[m - 1];
    const auto slot = static_cast<std::size_t>(std::floor(hour_of_day(t) / *slot_hours_ + 1e-9));
    if (row.empty() || slot >= row.size() || std::isnan(row[slot]))
        throw ConfigError("optical efficiency table has no entry for " + format_timestamp(t));
    return row[slot];
}

void OpticalEfficiencyTable::check_step(double dt) const {
    if (!slot_hours_) return;
    const double n = dt / *slot_hours_;
    if (n < 1.0 - 1e-9 || std::abs(n - std::round(n)) > 1e-9)
        throw ConfigError("trajectory step is not a whole number of efficiency-table slots");
}

double heliostat_field_power(const PlantDesign& d, const WeatherSample& s, double eta_opt) {
    // kW/m^2 * m^2 = kW; divide by 1000 for MW
    return d.n_helio * d.a_helio * d.reflectance_rho * d.availability_c * eta_opt * s.dni / 1000.0;
}

double receiver_potential_power(double q_helio, const WeatherSample& s, const PlantDesign& d,
                                const LossModel& loss) {
    return std::max(0.0, q_helio - loss.radiative(s.t_amb) - loss.convective(s.t_amb, s.wind) - d.q_pipe);
}

double dumped_power(double q_p, bool in_startup, bool in_shutdown, double q_ract,
                    const PlantDesign& d) {
    return std::max(0.0, q_p - (in_startup ? d.q_ru : 0.0) - (in_shutdown ? d.q_rsd : 0.0) - q_ract);
}

double net_output(double w_gross, double eta_c, double w_purchased) {
    return w_gross * (1.0 - eta_c) - w_purchased;
}

std::vector<double> potential_power_series(const WeatherTrajectory& traj, const PlantDesign& d,
                                           const LossModel& loss,
                                           const OpticalEfficiencyTable& eff) {
    eff.check_step(traj.dt_hours);
    std::vector<double> out(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& s = traj.samples[k];
        const double q_helio = heliostat_field_power(d, s, eff.at(traj.time_at(k)));
        out[k] = receiver_potential_power(q_helio, s, d, loss);
    }
    return out;
}

ScenarioEnergy scenario_energy_terms(const WeatherTrajectory& traj, const PlantDesign& d,
                                     const LossModel& loss, const OpticalEfficiencyTable& eff) {
    eff.check_step(traj.dt_hours);
    ScenarioEnergy e;
    const double dt = traj.dt_hours;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& s = traj.samples[k];
        const double q_helio = heliostat_field_power(d, s, eff.at(traj.time_at(k)));
        e.e_helio += dt * q_helio;
        if (q_helio > 0.0) {
            e.e_rad += dt * loss.radiative(s.t_amb);
            e.e_conv += dt * loss.convective(s.t_amb, s.wind);
        }
    }
    e.e_in = std::max(0.0, e.e_helio - e.e_rad - e.e_conv);
    return e;
}

double scenario_potential_energy(const WeatherTrajectory& traj, const PlantDesign& d,
                                 const LossModel& loss, const OpticalEfficiencyTable& eff) {
    return scenario_energy_terms(traj, d, loss, eff).e_in;
}

}  // namespace cst
