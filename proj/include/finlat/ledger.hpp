#pragma once

#include "finlat/partition.hpp"
#include "finlat/rational.hpp"
#include "finlat/string_model.hpp"

#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace finlat {

/// Units for state-change energy accounting. Each block that actually changes
/// counts as one state change worth h/2tau, regardless of how many cells
/// inside it changed.
struct LedgerConfig {
    Rat h{1};
    Rat tau{1};

    LedgerConfig() = default;
    LedgerConfig(Rat h_, Rat tau_) : h(h_), tau(tau_) {
        if (h <= 0 || tau <= 0) throw std::invalid_argument("h and tau must be positive");
    }

    Rat quantum() const { return h / (2 * tau); } // energy per change per step
};

struct EnergySeries {
    std::vector<long long> changes;   // per step
    std::vector<Rat> ideal_kinetic;   // (h/2tau) * changes
    std::vector<Rat> running_max;     // ideal total energy so far
};

/// Minimum average energy over a window of `reports.size()` steps:
/// (h / (2 * window_duration)) * total changes.
inline Rat state_change_energy(std::span<const StepReport> reports, const LedgerConfig& cfg) {
    if (reports.empty()) throw std::invalid_argument("empty window");
    long long total = 0;
    for (const auto& r : reports) total += r.changed_blocks;
    const Rat window = cfg.tau * static_cast<long long>(reports.size());
    return cfg.h / (2 * window) * total;
}

inline Rat state_change_energy(std::span<const long long> changes, const LedgerConfig& cfg) {
    if (changes.empty()) throw std::invalid_argument("empty window");
    long long total = 0;
    for (long long c : changes) total += c;
    const Rat window = cfg.tau * static_cast<long long>(changes.size());
    return cfg.h / (2 * window) * total;
}

inline EnergySeries ideal_kinetic_series(std::span<const long long> changes,
                                         const LedgerConfig& cfg) {
    EnergySeries s;
    s.changes.assign(changes.begin(), changes.end());
    Rat peak{0};
    for (long long c : changes) {
        const Rat e = cfg.quantum() * c;
        if (e > peak) peak = e;
        s.ideal_kinetic.push_back(e);
        s.running_max.push_back(peak);
    }
    return s;
}

inline EnergySeries ideal_kinetic_series(const Trajectory& traj, const LedgerConfig& cfg) {
    std::vector<long long> changes;
    changes.reserve(traj.reports.size());
    for (const auto& r : traj.reports) changes.push_back(r.changed_blocks);
    return ideal_kinetic_series(changes, cfg);
}

struct StringEnergySplit {
    Rat changed_fraction{0};      // cycle average, equals p^2 + (1-p)^2
    QuadraticReal particle_fraction; // 1 - 1/gamma
    QuadraticReal internal_fraction; // changed - particle
};

/// Splits the cycle-average ideal kinetic energy of a string trajectory into
/// the part carried by net vertical motion and the internal remainder.
inline StringEnergySplit string_particle_energy_split(const EnergySeries& series,
                                                      const StringObservables& obs) {
    const long long cycle = obs.n / 2;
    if (static_cast<long long>(series.changes.size()) < cycle)
        throw std::invalid_argument("series covers less than one cycle");
    long long total = 0;
    for (long long t = 0; t < cycle; ++t) total += series.changes[static_cast<size_t>(t)];
    StringEnergySplit split;
    split.changed_fraction = Rat(total, cycle * cycle);
    if (obs.light_speed) {
        split.particle_fraction = QuadraticReal(Rat(1));
    } else {
        split.particle_fraction = QuadraticReal(Rat(1)) - obs.inverse_gamma();
    }
    split.internal_fraction = QuadraticReal(split.changed_fraction) - split.particle_fraction;
    return split;
}

/// CSV columns: step,changes,E_ideal_num,E_ideal_den,running_max
inline std::string export_energy_series_csv(const EnergySeries& s) {
    std::ostringstream out;
    out << "step,changes,E_ideal_num,E_ideal_den,running_max\n";
    for (size_t t = 0; t < s.changes.size(); ++t) {
        out << t << "," << s.changes[t] << "," << s.ideal_kinetic[t].numerator() << ","
            << s.ideal_kinetic[t].denominator() << "," << s.running_max[t].numerator();
        if (s.running_max[t].denominator() != 1) out << "/" << s.running_max[t].denominator();
        out << "\n";
    }
    return out.str();
}

} // namespace finlat
