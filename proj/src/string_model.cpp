#include "finlat/string_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace finlat {

namespace {

AlphabetPtr slope_alphabet() {
    static const AlphabetPtr alpha = std::make_shared<Alphabet>(std::vector<std::string>{"/", "\\"});
    return alpha;
}

const BlockRule& swap_rule() {
    static const BlockRule rule = BlockRule::swap(slope_alphabet(), 1);
    return rule;
}

CellLattice to_lattice(const GradientString& s) {
    CellLattice lat = CellLattice::line(slope_alphabet(), s.size());
    for (int i = 0; i < s.size(); ++i) lat.set(i, s.slopes[static_cast<size_t>(i)] > 0 ? 0 : 1);
    return lat;
}

GradientString from_lattice(const CellLattice& lat, PartitionPhase phase) {
    GradientString s;
    s.phase = phase;
    s.slopes.resize(static_cast<size_t>(lat.extent(0)));
    for (int i = 0; i < lat.extent(0); ++i) s.slopes[static_cast<size_t>(i)] = lat.at(i) == 0 ? 1 : -1;
    return s;
}

} // namespace

GradientString make_string(const std::string& art, PartitionPhase phase) {
    GradientString s;
    s.phase = phase;
    for (char c : art) {
        if (c == '/')
            s.slopes.push_back(1);
        else if (c == '\\')
            s.slopes.push_back(-1);
        else if (c == ' ' || c == '\t')
            continue;
        else
            throw std::invalid_argument(std::string("slope characters are '/' and '\\', got '") + c + "'");
    }
    check_closure(s);
    return s;
}

std::string string_art(const GradientString& s) {
    std::string art;
    art.reserve(s.slopes.size());
    for (int v : s.slopes) art.push_back(v > 0 ? '/' : '\\');
    return art;
}

void check_closure(const GradientString& s) {
    if (s.size() == 0 || s.size() % 2 != 0)
        throw std::invalid_argument("string needs a positive even segment count");
    long long sum = 0;
    for (int v : s.slopes) {
        if (v != 1 && v != -1) throw std::invalid_argument("slopes must be +1 or -1");
        sum += v;
    }
    if (sum != 0) throw std::invalid_argument("closure violated: slopes must sum to zero");
}

QuadraticReal StringObservables::inverse_gamma() const {
    // 1/gamma = M/E = 2*sqrt(RL)/(R+L)
    return QuadraticReal(Rat(0), Rat(2) / energy, r * l);
}

double StringObservables::gamma() const {
    const double inv = inverse_gamma().value();
    if (inv == 0.0) throw std::domain_error("gamma undefined at |v| = 1");
    return 1.0 / inv;
}

std::pair<GradientString, StepReport> string_step(const GradientString& s) {
    check_closure(s);
    auto [lat, report] = step(to_lattice(s), swap_rule(), s.phase);
    return {from_lattice(lat, opposite(s.phase)), std::move(report)};
}

StringTrajectory run_string(const GradientString& s, long long steps, long long h0) {
    check_closure(s);
    StringTrajectory traj;
    traj.states.push_back(s);
    traj.node0_height.push_back(h0);
    for (long long t = 0; t < steps; ++t) {
        const GradientString& cur = traj.states.back();
        long long h = traj.node0_height.back();
        // Node 0 is interior to the wrapping block (N-1, 0) of the odd pairing;
        // a peak there drops it by 2, a valley lifts it by 2.
        if (cur.phase == PartitionPhase::odd) {
            const int left = cur.slopes[static_cast<size_t>(cur.size() - 1)];
            const int right = cur.slopes[0];
            if (left == 1 && right == -1) h -= 2;
            if (left == -1 && right == 1) h += 2;
        }
        auto [next, report] = string_step(cur);
        traj.states.push_back(std::move(next));
        traj.changed_blocks.push_back(report.changed_blocks);
        traj.node0_height.push_back(h);
    }
    return traj;
}

std::vector<long long> heights(const GradientString& s, long long h0) {
    check_closure(s);
    std::vector<long long> h(static_cast<size_t>(s.size()) + 1);
    h[0] = h0;
    for (int i = 0; i < s.size(); ++i)
        h[static_cast<size_t>(i) + 1] = h[static_cast<size_t>(i)] + s.slopes[static_cast<size_t>(i)];
    return h;
}

std::pair<std::vector<int>, std::vector<int>> decompose(const GradientString& s) {
    if (s.phase != PartitionPhase::even)
        throw std::invalid_argument("decompose is defined at the canonical phase");
    std::vector<int> right, left;
    for (int i = 0; i < s.size(); ++i)
        (i % 2 == 0 ? right : left).push_back(s.slopes[static_cast<size_t>(i)]);
    return {right, left};
}

StringObservables observables(const GradientString& s) {
    check_closure(s);
    StringObservables o;
    o.n = s.size();
    const int off = phase_offset(s.phase); // rightgoers are the left pair elements
    for (int i = 0; i < s.size(); ++i) {
        if (s.slopes[static_cast<size_t>(i)] == -1) {
            if (i % 2 == off)
                o.r++;
            else
                o.l++;
        }
    }
    const long long half = o.n / 2;
    o.energy = Rat(half);
    o.momentum = o.r - o.l;
    o.mass_sq = 4 * o.r * o.l;
    o.velocity = Rat(o.momentum, half);
    o.p = Rat(o.r, half);
    o.light_speed = (o.r == 0 || o.l == 0);
    return o;
}

Rat measure_velocity(const StringTrajectory& traj) {
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    const int n = traj.states.front().size();
    const long long cycle = n / 2;
    if (static_cast<long long>(traj.changed_blocks.size()) < cycle)
        throw std::invalid_argument("trajectory shorter than one cycle");
    // Mean string height, sampled at the segment midpoints. Each block flip
    // moves exactly two midpoint samples by one unit, and the net flip count
    // of every step is R - L, so the mean drifts by exactly v per step.
    // (Individual fixed samples alias flips and drift unevenly.)
    const auto mean_height_times_2n = [&](long long t) {
        const auto h = heights(traj.states[static_cast<size_t>(t)],
                               traj.node0_height[static_cast<size_t>(t)]);
        long long sum = 0;
        for (int k = 0; k < n; ++k)
            sum += h[static_cast<size_t>(k)] + h[static_cast<size_t>(k) + 1];
        return sum;
    };
    return Rat(mean_height_times_2n(cycle) - mean_height_times_2n(0), 2ll * n * cycle);
}

Rat change_fraction(const StringTrajectory& traj) {
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    const long long n = traj.states.front().size();
    const long long cycle = n / 2;
    if (static_cast<long long>(traj.changed_blocks.size()) < cycle)
        throw std::invalid_argument("trajectory shorter than one cycle");
    long long total = 0;
    for (long long t = 0; t < cycle; ++t) total += traj.changed_blocks[static_cast<size_t>(t)];
    return Rat(total, cycle * cycle);
}

KineticSplit kinetic_split(const StringObservables& o) {
    KineticSplit k;
    k.energy = o.energy;
    const Rat v = o.velocity;
    const Rat half(1, 2);
    k.t_nonrel = o.energy * v * v / 2;
    k.total_fraction = o.p * o.p + (1 - o.p) * (1 - o.p);
    if (o.light_speed) {
        k.light_speed_limit = true;
        k.t_particle = QuadraticReal(o.energy); // limit: T -> E
        k.t_internal = QuadraticReal(Rat(0));   // limit: internal motion stops
        return k;
    }
    const QuadraticReal inv_gamma = o.inverse_gamma();
    // T_particle = E(1 - 1/gamma) = E - M
    k.t_particle = QuadraticReal(o.energy) - (o.energy * inv_gamma);
    // T_internal = E(1/gamma - (1 - v^2)/2)
    const Rat one_minus_v2_half = (1 - v * v) * half;
    k.t_internal = (o.energy * inv_gamma) - QuadraticReal(o.energy * one_minus_v2_half);
    return k;
}

GradientString rescale(const GradientString& s, int k) {
    check_closure(s);
    if (k < 1) throw std::invalid_argument("replication factor must be >= 1");
    if (s.phase != PartitionPhase::even)
        throw std::invalid_argument("rescale is defined at the canonical phase");
    GradientString out;
    out.phase = PartitionPhase::even;
    out.slopes.reserve(static_cast<size_t>(s.size()) * static_cast<size_t>(k));
    for (int i = 0; i < s.size(); i += 2)
        for (int c = 0; c < k; ++c) {
            out.slopes.push_back(s.slopes[static_cast<size_t>(i)]);
            out.slopes.push_back(s.slopes[static_cast<size_t>(i) + 1]);
        }
    return out;
}

GradientString rescale_alternate(const GradientString& s, int k) {
    check_closure(s);
    if (k < 1) throw std::invalid_argument("replication factor must be >= 1");
    if (s.phase != PartitionPhase::odd)
        throw std::invalid_argument("rescale_alternate expects the odd phase");
    const int n = s.size();
    const int kn = k * n;
    GradientString out;
    out.phase = (k % 2 == 0) ? PartitionPhase::even : PartitionPhase::odd;
    out.slopes.assign(static_cast<size_t>(kn), 0);
    // Copy c of odd pair i = (s[2i+1], s[2i+2]) lands at index 2ki + 2c + k.
    for (int i = 0; i < n / 2; ++i)
        for (int c = 0; c < k; ++c) {
            const int base = 2 * k * i + 2 * c + k;
            out.slopes[static_cast<size_t>(base % kn)] = s.slopes[static_cast<size_t>(2 * i + 1)];
            out.slopes[static_cast<size_t>((base + 1) % kn)] =
                s.slopes[static_cast<size_t>((2 * i + 2) % n)];
        }
    return out;
}

std::string export_string_state(const GradientString& s) {
    std::ostringstream out;
    out << s.size() << " " << (s.phase == PartitionPhase::even ? "even" : "odd") << "\n"
        << string_art(s) << "\n";
    return out.str();
}

GradientString import_string_state(const std::string& text) {
    std::istringstream in(text);
    int n = 0;
    std::string phase_word, art;
    if (!(in >> n >> phase_word >> art)) throw std::runtime_error("malformed string state");
    PartitionPhase phase;
    if (phase_word == "even")
        phase = PartitionPhase::even;
    else if (phase_word == "odd")
        phase = PartitionPhase::odd;
    else
        throw std::runtime_error("phase must be 'even' or 'odd'");
    GradientString s = make_string(art, phase);
    if (s.size() != n) throw std::runtime_error("declared N does not match the slope count");
    return s;
}

std::string export_string_trajectory(const StringTrajectory& traj) {
    std::ostringstream out;
    for (const auto& s : traj.states) out << string_art(s) << "\n";
    return out.str();
}

std::string export_observables_csv(const StringTrajectory& traj) {
    std::ostringstream out;
    out << "step,R,L,v_num,v_den,changed_blocks\n";
    for (size_t t = 0; t < traj.states.size(); ++t) {
        const auto o = observables(traj.states[t]);
        out << t << "," << o.r << "," << o.l << "," << o.velocity.numerator() << ","
            << o.velocity.denominator() << ",";
        if (t < traj.changed_blocks.size())
            out << traj.changed_blocks[t];
        else
            out << 0;
        out << "\n";
    }
    return out.str();
}

} // namespace finlat
