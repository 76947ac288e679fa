#include "finlat/verify.hpp"

#include "finlat/embedding.hpp"
#include "finlat/ledger.hpp"
#include "finlat/partition.hpp"
#include "finlat/rss.hpp"
#include "finlat/string_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

namespace finlat {

namespace {

void check(SuiteReport& report, const std::string& name, const std::function<bool(std::string&)>& body) {
    PropertyResult r;
    r.name = name;
    try {
        r.pass = body(r.detail);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    report.results.push_back(std::move(r));
}

CellLattice random_lattice(AlphabetPtr alpha, int rank, int nx, int ny, std::mt19937_64& rng) {
    CellLattice lat = rank == 1 ? CellLattice::line(alpha, nx) : CellLattice::grid(alpha, nx, ny);
    std::uniform_int_distribution<int> dist(0, alpha->size() - 1);
    for (auto& c : lat.cells_mutable()) c = static_cast<uint8_t>(dist(rng));
    return lat;
}

bool rewinds_exactly(const CellLattice& initial, const BlockRule& rule, long long steps,
                     PartitionPhase start) {
    const BlockRule inverse = invert(rule);
    CellLattice state = initial;
    std::vector<PartitionPhase> phases;
    PartitionPhase phase = start;
    for (long long t = 0; t < steps; ++t) {
        state = step(state, rule, phase).first;
        phases.push_back(phase);
        phase = opposite(phase);
    }
    for (auto it = phases.rbegin(); it != phases.rend(); ++it)
        state = step(state, inverse, *it).first;
    return state == initial;
}

std::vector<GradientString> all_closed_strings(int n) {
    std::vector<GradientString> out;
    for (int bits = 0; bits < (1 << n); ++bits) {
        GradientString s;
        s.phase = PartitionPhase::even;
        int sum = 0;
        for (int i = 0; i < n; ++i) {
            const int v = (bits >> i) & 1 ? 1 : -1;
            s.slopes.push_back(v);
            sum += v;
        }
        if (sum == 0) out.push_back(std::move(s));
    }
    return out;
}

GradientString random_closed_string(int n, std::mt19937_64& rng) {
    GradientString s;
    s.phase = PartitionPhase::even;
    s.slopes.assign(static_cast<size_t>(n), -1);
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < n / 2; ++i) s.slopes[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1;
    return s;
}

} // namespace

SuiteReport verify_engine(unsigned long long seed) {
    SuiteReport report{"engine", {}};
    std::mt19937_64 rng(seed);
    const auto bits = std::make_shared<Alphabet>(std::vector<std::string>{"0", "1"});

    check(report, "block independence: scattered update order matches step()", [&](std::string&) {
        const BlockRule swap = BlockRule::swap(bits, 2);
        for (int trial = 0; trial < 20; ++trial) {
            CellLattice lat = random_lattice(bits, 2, 8, 6, rng);
            const auto [expected, report_] = step(lat, swap, PartitionPhase::odd);
            (void)report_;
            // Apply blocks one at a time in a shuffled order.
            std::vector<std::pair<int, int>> blocks;
            for (int by = 0; by < 3; ++by)
                for (int bx = 0; bx < 4; ++bx) blocks.emplace_back(bx, by);
            std::shuffle(blocks.begin(), blocks.end(), rng);
            CellLattice acc = lat;
            for (const auto& [bx, by] : blocks) {
                uint8_t cells[4];
                const int x0 = 1 + 2 * bx, y0 = 1 + 2 * by;
                cells[0] = lat.at(x0, y0);
                cells[1] = lat.at(x0 + 1, y0);
                cells[2] = lat.at(x0, y0 + 1);
                cells[3] = lat.at(x0 + 1, y0 + 1);
                uint8_t out[4];
                swap.unpack(swap.apply(swap.pack({cells, 4})), {out, 4});
                acc.set(x0, y0, out[0]);
                acc.set(x0 + 1, y0, out[1]);
                acc.set(x0, y0 + 1, out[2]);
                acc.set(x0 + 1, y0 + 1, out[3]);
            }
            if (!(acc == expected)) return false;
        }
        return true;
    });

    check(report, "reversibility: swap rule, 20 random lattices, 50 steps", [&](std::string&) {
        const BlockRule swap1 = BlockRule::swap(bits, 1);
        for (int trial = 0; trial < 20; ++trial)
            if (!rewinds_exactly(random_lattice(bits, 1, 16, 1, rng), swap1, 50,
                                 trial % 2 ? PartitionPhase::even : PartitionPhase::odd))
                return false;
        return true;
    });

    check(report, "change-count additivity over block decomposition", [&](std::string&) {
        const BlockRule swap1 = BlockRule::swap(bits, 1);
        for (int trial = 0; trial < 20; ++trial) {
            CellLattice lat = random_lattice(bits, 1, 12, 1, rng);
            const auto [next, rep] = step(lat, swap1, PartitionPhase::even);
            (void)next;
            long long by_mask = 0;
            for (uint8_t m : rep.change_mask) by_mask += m;
            if (by_mask != rep.changed_blocks) return false;
        }
        return true;
    });

    check(report, "conservation hook: multiset-preserving rules keep the census", [&](std::string&) {
        const BlockRule swap1 = BlockRule::swap(bits, 1);
        if (!preserves_symbol_multiset(swap1)) return false;
        for (int trial = 0; trial < 20; ++trial) {
            CellLattice lat = random_lattice(bits, 1, 20, 1, rng);
            const auto census_before = lat.census();
            const auto traj = run(lat, swap1, PartitionPhase::even, 17);
            if (traj.states.back().census() != census_before) return false;
        }
        return true;
    });

    check(report, "invert(swap) == swap and invert(identity) == identity", [&](std::string&) {
        const BlockRule swap1 = BlockRule::swap(bits, 1);
        const BlockRule id = BlockRule::identity(bits, 1);
        const BlockRule swap_inv = invert(swap1);
        const BlockRule id_inv = invert(id);
        for (uint32_t c = 0; c < swap1.config_count(); ++c) {
            if (swap_inv.apply(c) != swap1.apply(c)) return false;
            if (id_inv.apply(c) != c) return false;
        }
        return true;
    });

    return report;
}

SuiteReport verify_string(unsigned long long seed) {
    SuiteReport report{"string", {}};
    std::mt19937_64 rng(seed);

    check(report, "R and L are invariant under every step (exhaustive N <= 8)", [&](std::string&) {
        for (int n = 2; n <= 8; n += 2)
            for (const auto& s : all_closed_strings(n)) {
                const auto before = observables(s);
                const auto after = observables(string_step(s).first);
                if (before.r != after.r || before.l != after.l) return false;
            }
        return true;
    });

    check(report, "cycle periodicity: N steps restore slopes, heights shift v*N", [&](std::string&) {
        for (int n : {4, 6, 8, 12}) {
            const GradientString s = random_closed_string(n, rng);
            const auto obs = observables(s);
            const auto traj = run_string(s, n);
            if (string_art(traj.states.back()) != string_art(s)) return false;
            const long long shift = traj.node0_height.back() - traj.node0_height.front();
            if (Rat(shift) != obs.velocity * n) return false;
        }
        return true;
    });

    check(report, "exact wave equation: transported decomposition reproduces heights", [&](std::string&) {
        const GradientString s = random_closed_string(16, rng);
        auto [right, left] = decompose(s);
        const auto traj = run_string(s, 16);
        for (size_t t = 0; t < traj.states.size(); ++t) {
            // Rightgoers shift right one index per step, leftgoers shift left.
            const GradientString& cur = traj.states[t];
            const int off = phase_offset(cur.phase);
            for (int i = 0; i < cur.size(); ++i) {
                const bool rightgoer = (i % 2 == off);
                int value;
                if (rightgoer) {
                    const int k = ((i - static_cast<int>(t)) % cur.size() + cur.size()) % cur.size();
                    value = right[static_cast<size_t>(k / 2)];
                } else {
                    const int k = ((i + static_cast<int>(t)) % cur.size() + cur.size()) % cur.size();
                    value = left[static_cast<size_t>(k / 2)];
                }
                if (value != cur.slopes[static_cast<size_t>(i)]) return false;
            }
        }
        return true;
    });

    check(report, "measured velocity and change fraction match the closed forms (N <= 10)",
          [&](std::string& detail) {
              for (int n = 2; n <= 10; n += 2)
                  for (const auto& s : all_closed_strings(n)) {
                      const auto obs = observables(s);
                      const auto traj = run_string(s, n / 2);
                      if (measure_velocity(traj) != obs.velocity) {
                          detail = "velocity mismatch at " + string_art(s);
                          return false;
                      }
                      const Rat p = obs.p;
                      if (change_fraction(traj) != p * p + (1 - p) * (1 - p)) {
                          detail = "change fraction mismatch at " + string_art(s);
                          return false;
                      }
                  }
              return true;
          });

    check(report, "observable identities: R+L = N/2, M^2 + P^2 = E^2, |v| <= 1", [&](std::string&) {
        for (int n = 2; n <= 10; n += 2)
            for (const auto& s : all_closed_strings(n)) {
                const auto o = observables(s);
                if (o.r + o.l != o.n / 2) return false;
                if (o.mass_sq + o.momentum * o.momentum != (o.n / 2) * (o.n / 2)) return false;
                if (o.velocity > 1 || o.velocity < -1) return false;
                if (o.p < 0 || o.p > 1) return false;
            }
        return true;
    });

    check(report, "rescale commutation: k steps of rescaled == alternate rescale of 1 step",
          [&](std::string&) {
              for (int k : {2, 3})
                  for (int n = 2; n <= 8; n += 2)
                      for (const auto& s : all_closed_strings(n)) {
                          GradientString lhs = rescale(s, k);
                          for (int t = 0; t < k; ++t) lhs = string_step(lhs).first;
                          const GradientString rhs = rescale_alternate(string_step(s).first, k);
                          if (string_art(lhs) != string_art(rhs) || lhs.phase != rhs.phase)
                              return false;
                      }
              return true;
          });

    return report;
}

SuiteReport verify_rss(unsigned long long seed) {
    SuiteReport report{"rss", {}};
    std::mt19937_64 rng(seed);
    const BlockRule rule2 = make_rss_rule(2);
    const BlockRule rule1 = make_rss_rule(1);

    check(report, "2D table bijective and particle-count preserving", [&](std::string&) {
        return check_bijective(rule2).bijective && preserves_particle_count(rule2, 2);
    });

    check(report, "1D table bijective and particle-count preserving", [&](std::string&) {
        return check_bijective(rule1).bijective && preserves_particle_count(rule1, 1);
    });

    check(report, "2D table commutes with quarter rotations", [&](std::string&) {
        const int a = rss_alphabet(2)->size();
        const auto rotate_packed = [&](uint32_t c) {
            RssCell cells[4];
            for (int i = 0; i < 4; ++i) {
                cells[i] = rss_cell(static_cast<int>(c % static_cast<uint32_t>(a)), 2);
                c /= static_cast<uint32_t>(a);
            }
            // Position permutation mirrors the direction rotation table.
            RssCell rot[4];
            const int pos_map[4] = {1, 3, 0, 2}; // BL->BR, BR->TR, TL->BL, TR->TL
            for (int i = 0; i < 4; ++i) {
                RssCell moved = cells[i];
                if (moved.occupied()) moved.dir = rotate_ccw(moved.dir);
                rot[pos_map[i]] = moved;
            }
            uint32_t packed = 0;
            for (int i = 3; i >= 0; --i)
                packed = packed * static_cast<uint32_t>(a) +
                         static_cast<uint32_t>(rss_symbol(rot[i], 2));
            return packed;
        };
        for (uint32_t c = 0; c < rule2.config_count(); ++c)
            if (rule2.apply(rotate_packed(c)) != rotate_packed(rule2.apply(c))) return false;
        return true;
    });

    check(report, "reversibility on random lattices (2D, 60 steps)", [&](std::string&) {
        for (int trial = 0; trial < 5; ++trial)
            if (!rewinds_exactly(random_lattice(rss_alphabet(2), 2, 12, 10, rng), rule2, 60,
                                 PartitionPhase::even))
                return false;
        return true;
    });

    check(report, "collisions displace one ball width (n in {1, 2}, both orientations)",
          [&](std::string& detail) {
              for (int n : {1, 2})
                  for (bool vertical : {false, true}) {
                      const auto sc = make_collision_scenario(n, ScenarioKind::head_on, vertical);
                      const auto trace = rss_run_traced(sc, rule2);
                      const auto verdict = verify_ssm_shift(trace);
                      if (!verdict.pass) {
                          detail = "n=" + std::to_string(n) + (vertical ? " vertical: " : " horizontal: ") +
                                   verdict.detail;
                          return false;
                      }
                  }
              return true;
          });

    check(report, "momentum and energy equal before and after (n = 2)", [&](std::string&) {
        const auto sc = make_collision_scenario(2, ScenarioKind::head_on);
        const auto trace = rss_run_traced(sc, rule2);
        const auto before = momentum_energy(trace.states.front(), 2, 1.0);
        const auto after = momentum_energy(trace.states.back(), 2, 1.0);
        return before.count == after.count && before.sum_dx == after.sum_dx &&
               before.sum_dy == after.sum_dy;
    });

    check(report, "white chirality populations stay equal through a collision", [&](std::string&) {
        const auto sc = make_collision_scenario(4, ScenarioKind::column);
        const auto trace = rss_run_traced(sc, rule2);
        for (const auto& state : trace.states) {
            const auto [plus, minus] = chirality_census(state, 2);
            if (plus != minus) return false;
        }
        return true;
    });

    check(report, "scale invariance: m-fold blow-up tracks m-times-slower evolution", [&](std::string&) {
        const auto sc = make_collision_scenario(2, ScenarioKind::column);
        for (int m : {2, 3}) {
            CellLattice big = blow_up(sc.initial, m);
            CellLattice fine = sc.initial;
            PartitionPhase fine_phase = PartitionPhase::even;
            PartitionPhase big_phase = PartitionPhase::even;
            for (int t = 1; t <= 4; ++t) {
                fine = step(fine, rule2, fine_phase).first;
                fine_phase = opposite(fine_phase);
                for (int u = 0; u < m; ++u) {
                    big = step(big, rule2, big_phase).first;
                    big_phase = opposite(big_phase);
                }
                if (t % 2 == 0 && !(big == blow_up(fine, m))) return false;
            }
        }
        return true;
    });

    return report;
}

SuiteReport verify_embedding(unsigned long long seed) {
    SuiteReport report{"embedding", {}};
    std::mt19937_64 rng(seed);

    check(report, "Phi basis orthonormal (discrete Gram, N in {4, 8, 16, 64})", [&](std::string&) {
        for (int n : {4, 8, 16, 64}) {
            const BoxConfig cfg(n, static_cast<double>(n), 1.0, 1.0);
            for (int m1 = 0; m1 < n; ++m1)
                for (int m2 = 0; m2 < n; ++m2) {
                    Complex g = 0;
                    for (int u = 0; u < n; ++u)
                        g += std::conj(phi_basis(m1, cfg.site(u), cfg)) * phi_basis(m2, cfg.site(u), cfg);
                    const double expect = m1 == m2 ? 1.0 : 0.0;
                    if (std::abs(g - expect) > 1e-12) return false;
                }
        }
        return true;
    });

    check(report, "unitarity: evolve preserves the norm up to 1000 tau", [&](std::string&) {
        const BoxConfig cfg(16, 16.0, 1.0, 1.0);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        DiscreteWavepacket p;
        p.config = cfg;
        for (int u = 0; u < cfg.n; ++u) p.amplitudes.emplace_back(dist(rng), dist(rng));
        const double norm = std::sqrt(norm_sq(p.amplitudes));
        for (auto& amp : p.amplitudes) amp /= norm;
        const SpectralState spec = to_spectrum(p);
        for (double t : {0.25, 1.0, 17.5, 333.0, 1000.0}) {
            const auto evolved = evolve(spec, t * cfg.tau());
            if (std::abs(norm_sq(evolved.coefficients) - 1.0) > 1e-12) return false;
        }
        return true;
    });

    check(report, "integer-time classicality: site probabilities stay one-hot", [&](std::string&) {
        const BoxConfig cfg(8, 8.0, 1.0, 1.0);
        const SpectralState spec = to_spectrum(phi_packet(3, cfg));
        for (int k = 0; k <= 16; ++k) {
            const auto packet = from_spectrum(evolve(spec, k * cfg.tau()));
            for (int u = 0; u < cfg.n; ++u) {
                const double expect = (u == (3 + k) % cfg.n) ? 1.0 : 0.0;
                if (std::abs(std::norm(packet.amplitudes[static_cast<size_t>(u)]) - expect) > 1e-12)
                    return false;
            }
        }
        return true;
    });

    check(report, "closed form matches the geometric sum on a 10^4-point grid", [&](std::string&) {
        const BoxConfig cfg(8, 8.0, 1.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            const double x = cfg.length * i / 10000.0;
            if (std::abs(phi_basis(3, x, cfg) - phi_basis_sum(3, x, cfg)) > 1e-12) return false;
        }
        return true;
    });

    check(report, "moving basis stays orthonormal for fractional shifts", [&](std::string&) {
        const BoxConfig cfg(8, 8.0, 1.0, 1.0);
        for (double t : {0.3, 0.5, 0.77}) {
            std::vector<DiscreteWavepacket> basis;
            for (int m = 0; m < cfg.n; ++m)
                basis.push_back(from_spectrum(evolve(to_spectrum(phi_packet(m, cfg)), t * cfg.tau())));
            for (int m1 = 0; m1 < cfg.n; ++m1)
                for (int m2 = 0; m2 < cfg.n; ++m2) {
                    Complex g = 0;
                    for (int u = 0; u < cfg.n; ++u)
                        g += std::conj(basis[static_cast<size_t>(m1)].amplitudes[static_cast<size_t>(u)]) *
                             basis[static_cast<size_t>(m2)].amplitudes[static_cast<size_t>(u)];
                    if (std::abs(g - (m1 == m2 ? 1.0 : 0.0)) > 1e-12) return false;
                }
        }
        return true;
    });

    check(report, "fermion tensor negates under any transposition", [&](std::string&) {
        const BoxConfig cfg(6, 6.0, 1.0, 1.0);
        const auto result = antisymmetrize({0, 2, 5}, cfg);
        if (result.verdict != SymmetrizeVerdict::ok) return false;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const auto swapped = transpose_particles(result.state, i, j);
                for (size_t idx = 0; idx < swapped.tensor.size(); ++idx)
                    if (swapped.tensor[idx] != -result.state.tensor[idx]) return false;
            }
        return true;
    });

    return report;
}

SuiteReport verify_ledger(unsigned long long seed) {
    SuiteReport report{"ledger", {}};
    std::mt19937_64 rng(seed);

    check(report, "doubling h doubles energies; doubling tau halves them", [&](std::string&) {
        const std::vector<long long> changes{3, 0, 5, 2};
        const auto base = ideal_kinetic_series(changes, LedgerConfig(Rat(1), Rat(1)));
        const auto twice_h = ideal_kinetic_series(changes, LedgerConfig(Rat(2), Rat(1)));
        const auto twice_tau = ideal_kinetic_series(changes, LedgerConfig(Rat(1), Rat(2)));
        for (size_t t = 0; t < changes.size(); ++t) {
            if (twice_h.ideal_kinetic[t] != 2 * base.ideal_kinetic[t]) return false;
            if (2 * twice_tau.ideal_kinetic[t] != base.ideal_kinetic[t]) return false;
        }
        return true;
    });

    check(report, "window energy equals the average of per-step energies", [&](std::string&) {
        std::uniform_int_distribution<long long> dist(0, 9);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<long long> changes;
            for (int t = 0; t < 8; ++t) changes.push_back(dist(rng));
            const LedgerConfig cfg(Rat(3, 2), Rat(2, 5));
            const auto series = ideal_kinetic_series(changes, cfg);
            Rat mean(0);
            for (const auto& e : series.ideal_kinetic) mean += e;
            mean /= static_cast<long long>(changes.size());
            if (state_change_energy(std::span<const long long>(changes), cfg) != mean) return false;
        }
        return true;
    });

    check(report, "string cycle totals repeat across consecutive cycles", [&](std::string&) {
        for (int n : {6, 8, 12}) {
            const GradientString s = random_closed_string(n, rng);
            const auto traj = run_string(s, n);
            long long first = 0, second = 0;
            for (int t = 0; t < n / 2; ++t) first += traj.changed_blocks[static_cast<size_t>(t)];
            for (int t = n / 2; t < n; ++t) second += traj.changed_blocks[static_cast<size_t>(t)];
            if (first != second) return false;
        }
        return true;
    });

    check(report, "running maximum is monotone and matches the peak", [&](std::string&) {
        const std::vector<long long> changes{1, 4, 2, 7, 3};
        const auto series = ideal_kinetic_series(changes, LedgerConfig());
        Rat peak(0);
        for (size_t t = 0; t < changes.size(); ++t) {
            if (series.ideal_kinetic[t] > peak) peak = series.ideal_kinetic[t];
            if (series.running_max[t] != peak) return false;
        }
        return true;
    });

    return report;
}

std::vector<SuiteReport> verify_all(unsigned long long seed) {
    return {verify_engine(seed), verify_string(seed), verify_rss(seed), verify_embedding(seed),
            verify_ledger(seed)};
}

} // namespace finlat
