#include "finlat/ledger.hpp"

#include <doctest.h>

#include <random>

using namespace finlat;

TEST_CASE("a free shift particle costs h/2tau every step") {
    const auto bits = std::make_shared<Alphabet>(std::vector<std::string>{"0", "1"});
    CellLattice lat = CellLattice::line(bits, 8);
    lat.set(0, 1);
    const auto traj = run(lat, BlockRule::swap(bits, 1), PartitionPhase::even, 10);
    const LedgerConfig cfg;
    const auto series = ideal_kinetic_series(traj, cfg);
    for (const auto& e : series.ideal_kinetic) CHECK(e == Rat(1, 2)); // h/2tau with h = tau = 1
    CHECK(state_change_energy(std::span<const StepReport>(traj.reports), cfg) == Rat(1, 2));
}

TEST_CASE("identity dynamics cost nothing") {
    const auto bits = std::make_shared<Alphabet>(std::vector<std::string>{"0", "1"});
    CellLattice lat = CellLattice::line(bits, 8);
    lat.set(2, 1);
    const auto traj = run(lat, BlockRule::identity(bits, 1), PartitionPhase::even, 6);
    const auto series = ideal_kinetic_series(traj, LedgerConfig());
    for (const auto& e : series.ideal_kinetic) CHECK(e == Rat(0));
}

TEST_CASE("energy is additive over independent particles (k in {2, 5})") {
    const auto bits = std::make_shared<Alphabet>(std::vector<std::string>{"0", "1"});
    const auto swap = BlockRule::swap(bits, 1);
    const LedgerConfig cfg;
    for (int k : {2, 5}) {
        CellLattice lat = CellLattice::line(bits, 8 * k);
        for (int i = 0; i < k; ++i) lat.set(8 * i, 1); // far apart: fully independent
        const auto traj = run(lat, swap, PartitionPhase::even, 8);
        const auto series = ideal_kinetic_series(traj, cfg);
        for (const auto& e : series.ideal_kinetic) CHECK(e == Rat(k, 2));
    }
}

TEST_CASE("empty windows are rejected") {
    CHECK_THROWS_AS(state_change_energy(std::span<const long long>(), LedgerConfig()),
                    std::invalid_argument);
}

TEST_CASE("window energy equals the mean of the per-step energies, exactly") {
    const std::vector<long long> changes{4, 0, 1, 7, 7, 2};
    const LedgerConfig cfg(Rat(5, 3), Rat(7, 2));
    const auto series = ideal_kinetic_series(changes, cfg);
    Rat mean(0);
    for (const auto& e : series.ideal_kinetic) mean += e;
    mean /= static_cast<long long>(changes.size());
    CHECK(state_change_energy(std::span<const long long>(changes), cfg) == mean);
}

TEST_CASE("h and tau scale energies exactly") {
    const std::vector<long long> changes{3, 1, 4};
    const auto base = ideal_kinetic_series(changes, LedgerConfig(Rat(1), Rat(1)));
    const auto h2 = ideal_kinetic_series(changes, LedgerConfig(Rat(2), Rat(1)));
    const auto tau2 = ideal_kinetic_series(changes, LedgerConfig(Rat(1), Rat(2)));
    for (size_t t = 0; t < changes.size(); ++t) {
        CHECK(h2.ideal_kinetic[t] == 2 * base.ideal_kinetic[t]);
        CHECK(tau2.ideal_kinetic[t] * 2 == base.ideal_kinetic[t]);
    }
}

TEST_CASE("string energy split: exact fractions") {
    // v = 0: internal fraction is 1/2.
    {
        const GradientString s = make_string("//\\\\");
        const auto traj = run_string(s, s.size() / 2);
        const auto series = ideal_kinetic_series(traj.changed_blocks, LedgerConfig());
        const auto split = string_particle_energy_split(series, observables(s));
        CHECK(split.particle_fraction == QuadraticReal(Rat(0)));
        CHECK(split.internal_fraction == QuadraticReal(Rat(1, 2)));
    }
    // v -> 1: the particle fraction reaches 1.
    {
        const GradientString s = make_string("\\/\\/");
        const auto traj = run_string(s, s.size() / 2);
        const auto series = ideal_kinetic_series(traj.changed_blocks, LedgerConfig());
        const auto split = string_particle_energy_split(series, observables(s));
        CHECK(split.particle_fraction == QuadraticReal(Rat(1)));
        CHECK(split.internal_fraction == QuadraticReal(Rat(0)));
        CHECK(split.changed_fraction == Rat(1));
    }
    // N = 12, R = 4, L = 2: changed fraction (2/3)^2 + (1/3)^2 = 5/9.
    {
        GradientString s;
        s.slopes = {-1, -1, -1, -1, -1, 1, -1, 1, 1, 1, 1, 1};
        const auto o = observables(s);
        REQUIRE(o.p == Rat(2, 3));
        const auto traj = run_string(s, s.size() / 2);
        const auto series = ideal_kinetic_series(traj.changed_blocks, LedgerConfig());
        const auto split = string_particle_energy_split(series, o);
        CHECK(split.changed_fraction == Rat(5, 9));
        // Matches the kinetic split exactly: fractions are T/E.
        const auto kin = kinetic_split(o);
        const Rat inv_e = Rat(1) / o.energy;
        CHECK(split.particle_fraction == inv_e * kin.t_particle);
        CHECK(split.internal_fraction == inv_e * kin.t_internal);
    }
}

TEST_CASE("string cycle totals are invariant across consecutive cycles") {
    std::mt19937_64 rng(41);
    for (int n : {6, 10, 14}) {
        GradientString s;
        s.slopes.assign(static_cast<size_t>(n), -1);
        for (int i = 0; i < n / 2; ++i) s.slopes[static_cast<size_t>(2 * i)] = 1;
        std::shuffle(s.slopes.begin(), s.slopes.end(), rng);
        while (observables(s).r == 0) std::shuffle(s.slopes.begin(), s.slopes.end(), rng);
        const auto traj = run_string(s, 2 * (n / 2));
        long long c1 = 0, c2 = 0;
        for (int t = 0; t < n / 2; ++t) {
            c1 += traj.changed_blocks[static_cast<size_t>(t)];
            c2 += traj.changed_blocks[static_cast<size_t>(t + n / 2)];
        }
        CHECK(c1 == c2);
    }
}

TEST_CASE("energy series CSV has exact rational columns") {
    const auto series = ideal_kinetic_series(std::vector<long long>{3, 1}, LedgerConfig());
    const auto csv = export_energy_series_csv(series);
    CHECK(csv.find("step,changes,E_ideal_num,E_ideal_den,running_max") == 0);
    CHECK(csv.find("0,3,3,2,3/2") != std::string::npos);
}
