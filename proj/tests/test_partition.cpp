#include "finlat/partition.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace finlat;

namespace {

AlphabetPtr bits() {
    static AlphabetPtr a = std::make_shared<Alphabet>(std::vector<std::string>{"0", "1"});
    return a;
}

CellLattice line_of(const std::string& pattern) {
    CellLattice lat = CellLattice::line(bits(), static_cast<int>(pattern.size()));
    for (size_t i = 0; i < pattern.size(); ++i)
        lat.set(static_cast<int>(i), pattern[i] == '1' ? 1 : 0);
    return lat;
}

std::string pattern_of(const CellLattice& lat) {
    std::string s;
    for (int i = 0; i < lat.extent(0); ++i) s.push_back(lat.at(i) ? '1' : '0');
    return s;
}

} // namespace

TEST_CASE("swap step moves a lone particle right") {
    const auto swap = BlockRule::swap(bits(), 1);
    const auto [next, report] = step(line_of("1000"), swap, PartitionPhase::even);
    CHECK(pattern_of(next) == "0100");
    CHECK(report.changed_blocks == 1);
    CHECK(report.change_mask == std::vector<uint8_t>{1, 0});
}

TEST_CASE("identity rule changes nothing") {
    const auto id = BlockRule::identity(bits(), 1);
    const auto initial = line_of("1010");
    const auto [next, report] = step(initial, id, PartitionPhase::odd);
    CHECK(next == initial);
    CHECK(report.changed_blocks == 0);
}

TEST_CASE("four alternating swap steps circulate a lone 1 back home") {
    // Direct enumeration of the 4-step orbit.
    const auto swap = BlockRule::swap(bits(), 1);
    const auto traj = run(line_of("1000"), swap, PartitionPhase::even, 4);
    REQUIRE(traj.states.size() == 5);
    CHECK(pattern_of(traj.states[1]) == "0100");
    CHECK(pattern_of(traj.states[2]) == "0010");
    CHECK(pattern_of(traj.states[3]) == "0001");
    CHECK(pattern_of(traj.states[4]) == "1000");
}

TEST_CASE("two steps advance both 1s two cells rightward") {
    const auto swap = BlockRule::swap(bits(), 1);
    const auto traj = run(line_of("1010"), swap, PartitionPhase::even, 2);
    // Hand-trace of pair swaps: positions {0,2} advance to {2,4 mod 4} = {2,0}.
    CHECK(pattern_of(traj.states[2]) == "1010");
    CHECK(pattern_of(traj.states[1]) == "0101");
}

TEST_CASE("run with zero steps returns only the initial lattice") {
    const auto traj = run(line_of("10"), BlockRule::swap(bits(), 1), PartitionPhase::even, 0);
    CHECK(traj.states.size() == 1);
    CHECK(traj.reports.empty());
}

TEST_CASE("run enforces the trajectory state cap") {
    CHECK_THROWS_AS(run(line_of("10"), BlockRule::swap(bits(), 1), PartitionPhase::even, 50, 10),
                    std::runtime_error);
}

TEST_CASE("bijectivity verdicts") {
    const auto swap = BlockRule::swap(bits(), 1);
    CHECK(check_bijective(swap).bijective);

    // Constant rule: everything maps to the all-zero block.
    const auto constant = BlockRule::from_function(bits(), 1, [](uint32_t) { return 0u; });
    const auto verdict = check_bijective(constant);
    CHECK_FALSE(verdict.bijective);
    REQUIRE_FALSE(verdict.collisions.empty());
    CHECK(verdict.collisions.front().size() == 4); // all four preimages share image 0
}

TEST_CASE("invert: swap and identity are involutions; inverse rewinds runs") {
    const auto swap = BlockRule::swap(bits(), 1);
    const auto swap_inv = invert(swap);
    const auto id = BlockRule::identity(bits(), 1);
    const auto id_inv = invert(id);
    for (uint32_t c = 0; c < swap.config_count(); ++c) {
        CHECK(swap_inv.apply(c) == swap.apply(c));
        CHECK(id_inv.apply(c) == c);
        CHECK(swap_inv.apply(swap.apply(c)) == c);
    }
    CHECK_THROWS_AS(invert(BlockRule::from_function(bits(), 1, [](uint32_t) { return 0u; })),
                    std::invalid_argument);
}

TEST_CASE("reversibility: forward steps then inverse steps with reversed phases") {
    std::mt19937_64 rng(7);
    const auto swap2 = BlockRule::swap(bits(), 2);
    const auto inverse = invert(swap2);
    CellLattice lat = CellLattice::grid(bits(), 8, 6);
    std::uniform_int_distribution<int> dist(0, 1);
    for (auto& c : lat.cells_mutable()) c = static_cast<uint8_t>(dist(rng));

    CellLattice state = lat;
    std::vector<PartitionPhase> phases;
    PartitionPhase phase = PartitionPhase::even;
    for (int t = 0; t < 31; ++t) {
        state = step(state, swap2, phase).first;
        phases.push_back(phase);
        phase = opposite(phase);
    }
    for (auto it = phases.rbegin(); it != phases.rend(); ++it)
        state = step(state, inverse, *it).first;
    CHECK(state == lat);
}

TEST_CASE("change-count additivity and census conservation") {
    std::mt19937_64 rng(3);
    const auto swap = BlockRule::swap(bits(), 1);
    CHECK(preserves_symbol_multiset(swap));
    std::uniform_int_distribution<int> dist(0, 1);
    for (int trial = 0; trial < 10; ++trial) {
        CellLattice lat = CellLattice::line(bits(), 14);
        for (auto& c : lat.cells_mutable()) c = static_cast<uint8_t>(dist(rng));
        const auto census = lat.census();
        const auto [next, report] = step(lat, swap, PartitionPhase::even);
        long long mask_count = 0;
        for (uint8_t m : report.change_mask) mask_count += m;
        CHECK(mask_count == report.changed_blocks);
        CHECK(next.census() == census);
    }
}

TEST_CASE("lattice validation: extents even, symbols in alphabet") {
    CHECK_THROWS_AS(CellLattice::line(bits(), 5), std::invalid_argument);
    CHECK_THROWS_AS(CellLattice::grid(bits(), 4, 3), std::invalid_argument);
    CellLattice lat = CellLattice::line(bits(), 4);
    CHECK_THROWS_AS(lat.set(0, 7), std::out_of_range);
}

TEST_CASE("shape and alphabet mismatches are errors") {
    const auto swap2 = BlockRule::swap(bits(), 2);
    CHECK_THROWS_AS(step(line_of("1010"), swap2, PartitionPhase::even), std::invalid_argument);
    const auto other = std::make_shared<Alphabet>(std::vector<std::string>{"a", "b"});
    const auto swap_other = BlockRule::swap(other, 1);
    CHECK_THROWS_AS(step(line_of("1010"), swap_other, PartitionPhase::even), std::invalid_argument);
}

TEST_CASE("periodic indexing wraps on every axis") {
    CellLattice lat = CellLattice::grid(bits(), 4, 4);
    lat.set(0, 0, 1);
    CHECK(lat.at(4, 4) == 1);
    CHECK(lat.at(-4, -4) == 1);
    CHECK(lat.at(8, -8) == 1);
}

TEST_CASE("rule text: parse, apply, round-trip") {
    const std::string text =
        "# swap rule\n"
        "default: identity\n"
        "0,1 -> 1,0\n"
        "1,0 -> 0,1\n";
    const auto rule = parse_rule_text(text, bits(), 1);
    const auto swap = BlockRule::swap(bits(), 1);
    for (uint32_t c = 0; c < rule.config_count(); ++c) CHECK(rule.apply(c) == swap.apply(c));

    const auto dumped = rule_to_text(rule);
    const auto reparsed = parse_rule_text(dumped, bits(), 1);
    for (uint32_t c = 0; c < rule.config_count(); ++c) CHECK(reparsed.apply(c) == rule.apply(c));
}

TEST_CASE("rule text error paths") {
    // Incomplete without a default header.
    CHECK_THROWS_AS(parse_rule_text("0,1 -> 1,0\n", bits(), 1), std::runtime_error);
    // Symbol outside the alphabet.
    CHECK_THROWS_AS(parse_rule_text("default: identity\n0,2 -> 0,0\n", bits(), 1),
                    std::runtime_error);
    // Duplicate entry.
    CHECK_THROWS_AS(
        parse_rule_text("default: identity\n0,1 -> 1,0\n0,1 -> 0,1\n", bits(), 1),
        std::runtime_error);
    // Wrong cell count.
    CHECK_THROWS_AS(parse_rule_text("default: identity\n0 -> 1\n", bits(), 1), std::runtime_error);
}

TEST_CASE("block independence: update order never matters") {
    std::mt19937_64 rng(11);
    const auto swap = BlockRule::swap(bits(), 1);
    std::uniform_int_distribution<int> dist(0, 1);
    for (int trial = 0; trial < 25; ++trial) {
        CellLattice lat = CellLattice::line(bits(), 12);
        for (auto& c : lat.cells_mutable()) c = static_cast<uint8_t>(dist(rng));
        const auto expected = step(lat, swap, PartitionPhase::odd).first;

        std::vector<int> order{0, 1, 2, 3, 4, 5};
        std::shuffle(order.begin(), order.end(), rng);
        CellLattice acc = lat;
        for (int b : order) {
            const int x0 = 1 + 2 * b;
            uint8_t in[2] = {lat.at(x0), lat.at(x0 + 1)};
            uint8_t out[2];
            swap.unpack(swap.apply(swap.pack({in, 2})), {out, 2});
            acc.set(x0, out[0]);
            acc.set(x0 + 1, out[1]);
        }
        CHECK(acc == expected);
    }
}
