#include "finlat/string_model.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace finlat;

namespace {

std::vector<GradientString> all_closed_strings(int n) {
    std::vector<GradientString> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        GradientString s;
        int sum = 0;
        for (int i = 0; i < n; ++i) {
            const int v = (mask >> i) & 1 ? 1 : -1;
            s.slopes.push_back(v);
            sum += v;
        }
        if (sum == 0) out.push_back(std::move(s));
    }
    return out;
}

GradientString random_closed(int n, std::mt19937_64& rng) {
    GradientString s;
    s.slopes.assign(static_cast<size_t>(n), -1);
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < n / 2; ++i) s.slopes[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1;
    return s;
}

} // namespace

TEST_CASE("peaks and valleys turn into each other; straight runs are fixed") {
    const auto [peaks, rep1] = string_step(make_string("/\\/\\"));
    CHECK(string_art(peaks) == "\\/\\/");
    CHECK(rep1.changed_blocks == 2);

    // Pairing (0,1),(2,3) sees straight pairs only.
    const auto [flat, rep2] = string_step(make_string("//\\\\"));
    CHECK(string_art(flat) == "//\\\\");
    CHECK(rep2.changed_blocks == 0);
}

TEST_CASE("two steps transport even-index slopes two right, odd-index two left") {
    std::mt19937_64 rng(5);
    const GradientString s = random_closed(12, rng);
    auto traj = run_string(s, 2);
    const GradientString& after = traj.states[2];
    for (int i = 0; i < s.size(); ++i) {
        if (i % 2 == 0)
            CHECK(after.slopes[static_cast<size_t>((i + 2) % s.size())] == s.slopes[static_cast<size_t>(i)]);
        else
            CHECK(after.slopes[static_cast<size_t>(((i - 2) % s.size() + s.size()) % s.size())] ==
                  s.slopes[static_cast<size_t>(i)]);
    }
}

TEST_CASE("heights: cumulative sums, closure, and block locality") {
    const auto h = heights(make_string("/\\\\/"), 5);
    CHECK(h == std::vector<long long>{5, 6, 5, 4, 5});

    // Heights change only inside changed blocks.
    std::mt19937_64 rng(9);
    const GradientString s = random_closed(10, rng);
    const auto [next, report] = string_step(s);
    const auto h0 = heights(s, 0);
    const auto h1 = heights(next, 0);
    for (int b = 0; b < 5; ++b) {
        if (!report.change_mask[static_cast<size_t>(b)]) {
            // Unchanged block: interior node untouched.
            CHECK(h0[static_cast<size_t>(2 * b + 1)] == h1[static_cast<size_t>(2 * b + 1)]);
        }
    }
}

TEST_CASE("sawtooth renders as amplitude-1 teeth") {
    const auto h = heights(make_string("/\\/\\"), 0);
    CHECK(h == std::vector<long long>{0, 1, 0, 1, 0});
}

TEST_CASE("decompose: transport and superposition over a full cycle") {
    std::mt19937_64 rng(21);
    const GradientString s = random_closed(16, rng);
    const auto [right, left] = decompose(s);
    CHECK(right.size() == 8);
    CHECK(left.size() == 8);

    // After one step the rightgoing subsequence is the original rotated by one.
    const auto traj = run_string(s, 16);
    for (size_t t = 0; t < traj.states.size(); ++t) {
        const GradientString& cur = traj.states[t];
        const int off = phase_offset(cur.phase);
        const int n = cur.size();
        for (int i = 0; i < n; ++i) {
            const bool is_right = (i % 2) == off;
            const int shift = static_cast<int>(t);
            int value;
            if (is_right) {
                const int k = ((i - shift) % n + n) % n;
                value = right[static_cast<size_t>(k / 2)];
            } else {
                const int k = ((i + shift) % n + n) % n;
                value = left[static_cast<size_t>(k / 2)];
            }
            CHECK(value == cur.slopes[static_cast<size_t>(i)]);
        }
    }
}

TEST_CASE("decompose requires the canonical phase") {
    GradientString s = make_string("/\\", PartitionPhase::odd);
    CHECK_THROWS_AS(decompose(s), std::invalid_argument);
}

TEST_CASE("observables: paper cases and the exact mass identity") {
    // All-peaks string: every rightgoer is one slope kind, |v| = 1.
    const auto fast = observables(make_string("\\/\\/\\/"));
    CHECK(fast.r == 3);
    CHECK(fast.l == 0);
    CHECK(fast.velocity == Rat(1));
    CHECK(fast.light_speed);

    const auto balanced = observables(make_string("//\\\\"));
    CHECK(balanced.velocity == Rat(0));
    CHECK(balanced.mass_sq == 4); // M = E at R = L
    CHECK(balanced.energy == Rat(2));

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto o = observables(random_closed(12, rng));
        CHECK(o.mass_sq + o.momentum * o.momentum == (o.n / 2) * (o.n / 2));
        CHECK(o.r + o.l == o.n / 2);
    }
}

TEST_CASE("measured velocity matches (R-L)/(N/2) exhaustively for N <= 10") {
    for (int n = 2; n <= 10; n += 2) {
        for (const auto& s : all_closed_strings(n)) {
            const auto traj = run_string(s, n / 2);
            CHECK(measure_velocity(traj) == observables(s).velocity);
        }
    }
}

TEST_CASE("measured velocity: R = L gives 0, all-peaks gives 1") {
    CHECK(measure_velocity(run_string(make_string("//\\\\"), 2)) == Rat(0));
    CHECK(measure_velocity(run_string(make_string("\\/\\/"), 2)) == Rat(1));
}

TEST_CASE("change fraction equals p^2 + (1-p)^2 exhaustively for N <= 10") {
    for (int n = 2; n <= 10; n += 2) {
        for (const auto& s : all_closed_strings(n)) {
            const auto o = observables(s);
            const auto traj = run_string(s, n / 2);
            CHECK(change_fraction(traj) == o.p * o.p + (1 - o.p) * (1 - o.p));
        }
    }
}

TEST_CASE("change fraction: 1/2 at p = 1/2 and 1 at p = 1") {
    // p = 1/2 (R = L): the minimum of p^2 + (1-p)^2.
    CHECK(change_fraction(run_string(make_string("\\//\\"), 2)) == Rat(1, 2));
    // All-peaks: every block changes every step.
    CHECK(change_fraction(run_string(make_string("\\/\\/"), 2)) == Rat(1));
}

TEST_CASE("velocity measurement needs a full cycle") {
    CHECK_THROWS_AS(measure_velocity(run_string(make_string("/\\/\\/\\"), 1)),
                    std::invalid_argument);
}

TEST_CASE("kinetic split: exact values and identities") {
    // v = 0: no translational part, internal fraction is half the blocks.
    const auto rest = kinetic_split(observables(make_string("//\\\\")));
    CHECK(rest.t_nonrel == Rat(0));
    CHECK(rest.t_internal == QuadraticReal(Rat(1))); // E/2 with E = 2
    CHECK(rest.t_particle == QuadraticReal(Rat(0))); // M = E

    // E = 6 (N = 12), R = 4, L = 2: v = 1/3, T_nonrel = E v^2 / 2 = 1/3.
    GradientString s;
    // Rightgoers: 4 of 6 are '\'; leftgoers: 2 of 6 are '\'.
    s.slopes = {-1, -1, -1, -1, -1, 1, -1, 1, 1, 1, 1, 1};
    const auto o = observables(s);
    REQUIRE(o.r == 4);
    REQUIRE(o.l == 2);
    CHECK(o.velocity == Rat(1, 3));
    const auto split = kinetic_split(o);
    CHECK(split.t_nonrel == Rat(1, 3));
    // Expanded form: E(((1+v)/2)^2 + ((1-v)/2)^2 - 1/2) identical to E v^2/2.
    const Rat v = o.velocity;
    const Rat expanded = o.energy * ((1 + v) * (1 + v) / 4 + (1 - v) * (1 - v) / 4 - Rat(1, 2));
    CHECK(split.t_nonrel == expanded);
    // T_particle = E - M and T_internal = M - M^2/(2E), exact in Q(sqrt(RL)).
    CHECK(split.t_particle == QuadraticReal(o.energy) - QuadraticReal(Rat(0), Rat(2), o.r * o.l));
    CHECK(split.t_internal.sign() >= 0);

    // v -> 1 limits: T_particle -> E, T_internal -> 0.
    const auto fast = kinetic_split(observables(make_string("\\/\\/")));
    CHECK(fast.light_speed_limit);
    CHECK(fast.t_particle == QuadraticReal(Rat(2)));
    CHECK(fast.t_internal == QuadraticReal(Rat(0)));
}

TEST_CASE("T_internal >= 0 for every (R, L) with R + L = N/2, N <= 40") {
    for (int half = 1; half <= 20; ++half) {
        for (int r = 0; r <= half; ++r) {
            StringObservables o;
            o.n = 2 * half;
            o.r = r;
            o.l = half - r;
            o.energy = Rat(half);
            o.momentum = o.r - o.l;
            o.mass_sq = 4 * o.r * o.l;
            o.velocity = Rat(o.momentum, half);
            o.p = Rat(o.r, half);
            o.light_speed = (o.r == 0 || o.l == 0);
            const auto split = kinetic_split(o);
            CHECK(split.t_internal.sign() >= 0);
            CHECK(split.t_particle.sign() >= 0);
        }
    }
}

TEST_CASE("cycle periodicity: N steps restore slopes, heights shift by v*N") {
    std::mt19937_64 rng(31);
    for (int n : {4, 6, 8, 10, 12}) {
        const GradientString s = random_closed(n, rng);
        const auto o = observables(s);
        const auto traj = run_string(s, n);
        CHECK(string_art(traj.states.back()) == string_art(s));
        CHECK(traj.states.back().phase == s.phase);
        CHECK(Rat(traj.node0_height.back() - traj.node0_height.front()) == o.velocity * n);
    }
}

TEST_CASE("R and L never change under steps") {
    std::mt19937_64 rng(17);
    GradientString s = random_closed(14, rng);
    const auto o0 = observables(s);
    for (int t = 0; t < 21; ++t) {
        s = string_step(s).first;
        const auto o = observables(s);
        CHECK(o.r == o0.r);
        CHECK(o.l == o0.l);
    }
}

TEST_CASE("rescale: identity at k = 1, peak train from a single peak") {
    const GradientString pair = make_string("/\\");
    CHECK(string_art(rescale(pair, 1)) == "/\\");
    CHECK(string_art(rescale(pair, 5)) == "/\\/\\/\\/\\/\\");
}

TEST_CASE("rescale commutation: k steps of rescaled equal the alternate rescale of one step") {
    for (int k : {2, 3}) {
        for (int n = 2; n <= 8; n += 2) {
            for (const auto& s : all_closed_strings(n)) {
                GradientString lhs = rescale(s, k);
                for (int t = 0; t < k; ++t) lhs = string_step(lhs).first;
                const GradientString rhs = rescale_alternate(string_step(s).first, k);
                REQUIRE(string_art(lhs) == string_art(rhs));
                REQUIRE(lhs.phase == rhs.phase);
            }
        }
    }
}

TEST_CASE("string state text round-trips; closure is enforced on import") {
    const GradientString s = make_string("//\\/\\\\", PartitionPhase::odd);
    const auto text = export_string_state(s);
    const GradientString back = import_string_state(text);
    CHECK(string_art(back) == string_art(s));
    CHECK(back.phase == s.phase);
    CHECK_THROWS(import_string_state("2 even\n//\n"));
    CHECK_THROWS(make_string("/x"));
}

TEST_CASE("observables CSV carries exact rationals") {
    const auto traj = run_string(make_string("/\\//\\\\"), 3);
    const auto csv = export_observables_csv(traj);
    CHECK(csv.find("step,R,L,v_num,v_den,changed_blocks") == 0);
    CHECK(csv.find("0,1,2,-1,3,") != std::string::npos); // R=1, L=2, v = -1/3
}
