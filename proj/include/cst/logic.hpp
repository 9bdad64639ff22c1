#pragma once

// Conditional plant rules in two forms: direct case functions (what the
// simulator executes) and their big-M linearisations (what the MILP
// contains). Keeping both here lets tests compare them on equal inputs.

#include <string>
#include <vector>

#include "cst/milp.hpp"
#include "cst/plant.hpp"

namespace cst::logic {

// Comparison tolerance used when evaluating the case functions on
// floating-point state.
inline constexpr double kTol = 1e-6;

inline bool below(double x, double threshold) { return x < threshold - kTol; }
inline bool reached(double x, double threshold) { return x >= threshold - kTol; }

// Snaps a potential power that falls strictly inside the epsilon gap under
// one of the receiver thresholds (q_rl plus any mix of startup/shutdown
// draws) down to threshold - eps, so neither the MILP nor the simulator
// meets an undecidable comparison.
double condition_potential_power(double q_p, const PlantDesign& design, double eps);

// Receiver enters (or stays in) startup.
bool receiver_startup(bool y_r, bool z1, bool z2_prev, bool d_r_prev);
// Receiver generates.
bool receiver_generation(bool y_r, bool z2, bool d_r_prev, bool z3);
// Receiver output given the power left for generation and the setpoint.
double receiver_charge(double q_avail_gen, double q_r_hat, double q_rl);
// Power block enters (or stays in) startup.
bool pb_startup(bool y_c, bool d_c_prev, bool z6_prev, bool z7);

// One row whose slack is controlled by big-M terms: `guarded` is the
// expression the M terms must dominate.
struct BigMRecord {
    int row;
    std::vector<int> switch_vars;
    LinExpr guarded;
    double m;
};

using BigMLog = std::vector<BigMRecord>;

// M for a switch row: the family bound via big_m_for, never below what the
// strictness slack needs.
double switch_m(double magnitude, double eps);

// z = 1 iff x < T, written with d = x - T:  z=1 => d <= -eps,  z=0 => d >= 0.
void add_switch_below(MilpModel& m, const std::string& name, VarHandle z, const LinExpr& d, double eps,
                      BigMLog* log);
// z = 1 iff e >= E, written with d = e - E:  z=1 => d >= 0,  z=0 => d <= -eps.
void add_switch_reached(MilpModel& m, const std::string& name, VarHandle z, const LinExpr& d, double eps,
                        BigMLog* log);

void add_receiver_startup_rows(MilpModel& m, const std::string& tag, const LinExpr& y_r, const LinExpr& z1,
                               const LinExpr& z2_prev, const LinExpr& d_r_prev, VarHandle d_rsu);

void add_receiver_generation_rows(MilpModel& m, const std::string& tag, const LinExpr& y_r, const LinExpr& z2,
                                  const LinExpr& d_r_prev, const LinExpr& z3, VarHandle d_r);

// Switches z4/z5 and the two-sided tracking rows for the receiver output.
void add_receiver_charge_rows(MilpModel& m, const std::string& tag, VarHandle q_ract, const LinExpr& q_avail_gen,
                              const LinExpr& q_r_hat, VarHandle z4, VarHandle z5, double q_rl, double eps,
                              BigMLog* log);

void add_pb_startup_rows(MilpModel& m, const std::string& tag, const LinExpr& y_c, const LinExpr& d_c_prev,
                         const LinExpr& z6_prev, const LinExpr& z7, VarHandle d_csu);

}  // namespace cst::logic
