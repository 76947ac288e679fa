#pragma once

#include "finlat/partition.hpp"
#include "finlat/rational.hpp"

#include <string>
#include <vector>

namespace finlat {

/// Closed elastic string stored as its array of +-45 degree slopes.
/// +1 renders as '/' and -1 as '\'. Closure: the slopes sum to zero.
struct GradientString {
    std::vector<int> slopes;
    PartitionPhase phase = PartitionPhase::even; // phase of the next update

    int size() const { return static_cast<int>(slopes.size()); }
};

GradientString make_string(const std::string& art, PartitionPhase phase = PartitionPhase::even);
std::string string_art(const GradientString& s);
void check_closure(const GradientString& s);

/// At the canonical (even) phase the rightgoing wave occupies even indices;
/// after each step the rightgoers sit at the left element of the next pairing.
struct StringObservables {
    long long n = 0;       // segment count N
    long long r = 0;       // '\' among rightgoing segments
    long long l = 0;       // '\' among leftgoing segments
    Rat energy{0};         // E = N/2 in units of the per-segment quantum
    long long momentum = 0; // P = R - L
    long long mass_sq = 0;  // M^2 = 4RL = E^2 - P^2
    Rat velocity{0};        // v = (R - L)/(N/2)
    Rat p{0};               // R/(R+L)
    bool light_speed = false; // |v| == 1 (gamma singular; limits reported)

    QuadraticReal mass() const { return QuadraticReal(Rat(0), Rat(2), r * l); }
    QuadraticReal inverse_gamma() const; // 1/gamma = M/E
    double gamma() const;
};

struct StringTrajectory {
    std::vector<GradientString> states;       // length steps + 1
    std::vector<long long> changed_blocks;    // per step
    std::vector<long long> node0_height;      // absolute height of node 0, per state
};

/// One partitioned update: the two slopes of every active pair swap
/// (peaks and valleys turn into each other, straight runs are fixed points).
std::pair<GradientString, StepReport> string_step(const GradientString& s);

StringTrajectory run_string(const GradientString& s, long long steps, long long h0 = 0);

/// Heights of the N+1 nodes from a base height; the last equals the first.
std::vector<long long> heights(const GradientString& s, long long h0);

/// Rightgoing and leftgoing subsequences (canonical phase only).
std::pair<std::vector<int>, std::vector<int>> decompose(const GradientString& s);

StringObservables observables(const GradientString& s);

/// Mean vertical displacement per step of the string height (averaged over
/// the fixed midpoint samples), over exactly one cycle (N/2 steps). Exact
/// rational; equals (R-L)/(N/2) for every closed string.
Rat measure_velocity(const StringTrajectory& traj);

/// (changed blocks over one cycle) / ((N/2)^2). Exact rational; equals
/// p^2 + (1-p)^2.
Rat change_fraction(const StringTrajectory& traj);

struct KineticSplit {
    Rat total_fraction{0};     // p^2 + (1-p)^2, of E
    QuadraticReal t_particle;  // E(1 - 1/gamma) = E - M
    QuadraticReal t_internal;  // E(1/gamma - (1 - v^2)/2)
    Rat t_nonrel{0};           // E v^2 / 2
    Rat energy{0};
    bool light_speed_limit = false; // values reported as v -> 1 limits
};

KineticSplit kinetic_split(const StringObservables& o);

/// Replicates every pair of the canonical pairing k times (length k*N).
GradientString rescale(const GradientString& s, int k);

/// The alternate-pairing replication that completes the commutation law:
/// step^k(rescale(s, k)) == rescale_alternate(string_step(s).first, k).
/// Input must be at the odd phase (i.e. the result of one canonical step).
GradientString rescale_alternate(const GradientString& s, int k);

// --- text formats ------------------------------------------------------------
std::string export_string_state(const GradientString& s);
GradientString import_string_state(const std::string& text);
std::string export_string_trajectory(const StringTrajectory& traj);
/// CSV columns: step,R,L,v_num,v_den,changed_blocks
std::string export_observables_csv(const StringTrajectory& traj);

} // namespace finlat
