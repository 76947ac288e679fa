#include "finlat/embedding.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace finlat;

namespace {

constexpr double kTol = 1e-12;

BoxConfig unit_box(int n) { return BoxConfig(n, static_cast<double>(n), 1.0, 1.0); }

DiscreteWavepacket random_packet(const BoxConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DiscreteWavepacket p;
    p.config = cfg;
    for (int u = 0; u < cfg.n; ++u) p.amplitudes.emplace_back(dist(rng), dist(rng));
    const double norm = std::sqrt(norm_sq(p.amplitudes));
    for (auto& a : p.amplitudes) a /= norm;
    return p;
}

// Composite Simpson quadrature, independent of the library's Gauss-Legendre.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += 2.0 * (1 + i % 2) * f(a + i * h);
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("eigenstate samples: constants, phases, and normalization") {
    const BoxConfig cfg = unit_box(4);
    CHECK(std::abs(eigenstate_sample(0, 2, cfg) - Complex(0.5, 0.0)) < kTol);
    CHECK(std::abs(eigenstate_sample(1, 0, cfg) - Complex(0.5, 0.0)) < kTol);
    const BoxConfig cfg8 = unit_box(8);
    for (int n = 0; n < 8; ++n) {
        double total = 0;
        for (int u = 0; u < 8; ++u) total += std::norm(eigenstate_sample(n, u, cfg8));
        CHECK(std::abs(total - 1.0) < kTol);
    }
    CHECK_THROWS_AS(eigenstate_sample(8, 0, cfg8), std::out_of_range);
    CHECK_THROWS_AS(eigenstate_sample(0, -1, cfg8), std::out_of_range);
}

TEST_CASE("eigenenergies: ladder from zero with mean (N-1)hc/2L") {
    const BoxConfig cfg(8, 8.0, 1.0, 1.0);
    CHECK(eigenenergy(0, cfg) == 0.0);
    CHECK(std::abs(eigenenergy(1, cfg) - 1.0 / 8.0) < kTol);
    double mean = 0;
    for (int n = 0; n < 8; ++n) mean += eigenenergy(n, cfg) / 8.0;
    CHECK(std::abs(mean - 7.0 / 16.0) < kTol); // (N-1)hc/2L at L = N
}

TEST_CASE("phi basis: kronecker property at integer sites") {
    const BoxConfig cfg = unit_box(8);
    CHECK(std::abs(phi_basis(0, cfg.site(0), cfg) - 1.0) < kTol);
    CHECK(std::abs(phi_basis(0, cfg.site(3), cfg)) < kTol);
    for (int m = 0; m < 8; ++m)
        for (int u = 0; u < 8; ++u) {
            const Complex v = phi_basis(m, cfg.site(u), cfg);
            CHECK(std::abs(v - (m == u ? 1.0 : 0.0)) < kTol);
        }
}

TEST_CASE("phi closed form agrees with the geometric sum everywhere") {
    for (int n : {2, 5, 8, 16}) {
        const BoxConfig cfg(n, static_cast<double>(n), 1.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            const double x = cfg.length * i / 10000.0;
            CHECK(std::abs(phi_basis(1 % n, x, cfg) - phi_basis_sum(1 % n, x, cfg)) < kTol);
        }
    }
}

TEST_CASE("large-N phi approaches the modulated sinc") {
    const BoxConfig cfg(1024, 1024.0, 1.0, 1.0);
    const Complex phi = phi_basis(0, 0.5, cfg);
    const Complex limit = sinc_phi(0.5);
    CHECK(std::abs(phi - limit) < 1e-3);
}

TEST_CASE("sinc_phi: removable singularity, integer zeros, unit quadrature") {
    CHECK(sinc_phi(0.0) == Complex(1.0, 0.0));
    CHECK(std::abs(sinc_phi(1.0)) < kTol);
    CHECK(std::abs(sinc_phi(-7.0)) < kTol);
    // Quadrature oracle: integral of sinc^2(pi u) over [-50, 50] is within
    // 1e-2 of one (the tails carry about 2/(pi^2 * 50)).
    const double integral = simpson([](double u) { return std::norm(sinc_phi(u)); }, -50.0, 50.0,
                                    20000);
    CHECK(std::abs(integral - 1.0) < 1e-2);
}

TEST_CASE("to_spectrum: phi packet weights all modes equally") {
    const BoxConfig cfg = unit_box(8);
    const auto spec = to_spectrum(phi_packet(0, cfg));
    for (const auto& c : spec.coefficients)
        CHECK(std::abs(c - Complex(1.0 / std::sqrt(8.0), 0.0)) < kTol);
}

TEST_CASE("from_spectrum: basis coefficient vectors give eigenstate samples") {
    const BoxConfig cfg = unit_box(8);
    SpectralState s;
    s.config = cfg;
    s.coefficients.assign(8, Complex{});
    s.coefficients[3] = 1.0;
    const auto packet = from_spectrum(s);
    for (int u = 0; u < 8; ++u)
        CHECK(std::abs(packet.amplitudes[static_cast<size_t>(u)] - eigenstate_sample(3, u, cfg)) < kTol);
}

TEST_CASE("random packets round-trip through the spectrum") {
    std::mt19937_64 rng(12);
    const BoxConfig cfg = unit_box(16);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_packet(cfg, rng);
        const auto back = from_spectrum(to_spectrum(p));
        for (int u = 0; u < cfg.n; ++u)
            CHECK(std::abs(back.amplitudes[static_cast<size_t>(u)] - p.amplitudes[static_cast<size_t>(u)]) < kTol);
        CHECK(std::abs(norm_sq(to_spectrum(p).coefficients) - 1.0) < kTol);
    }
}

TEST_CASE("evolve: identity at t = 0 and composition in t") {
    std::mt19937_64 rng(13);
    const BoxConfig cfg = unit_box(8);
    const auto spec = to_spectrum(random_packet(cfg, rng));
    const auto same = evolve(spec, 0.0);
    for (int n = 0; n < 8; ++n)
        CHECK(std::abs(same.coefficients[static_cast<size_t>(n)] - spec.coefficients[static_cast<size_t>(n)]) < kTol);
    const auto one = evolve(evolve(spec, 0.7), 0.55);
    const auto two = evolve(spec, 1.25);
    for (int n = 0; n < 8; ++n)
        CHECK(std::abs(one.coefficients[static_cast<size_t>(n)] - two.coefficients[static_cast<size_t>(n)]) < kTol);
}

TEST_CASE("one hop time shifts phi_m to phi_{m+1}") {
    const BoxConfig cfg = unit_box(8);
    for (int m = 0; m < 8; ++m) {
        const auto evolved = from_spectrum(evolve(to_spectrum(phi_packet(m, cfg)), cfg.tau()));
        for (int u = 0; u < 8; ++u) {
            const Complex expect = (u == (m + 1) % 8) ? 1.0 : 0.0;
            CHECK(std::abs(evolved.amplitudes[static_cast<size_t>(u)] - expect) < kTol);
        }
    }
    // Leftgoers hop the other way.
    const auto left = from_spectrum(evolve(to_spectrum(phi_packet(0, cfg, -1)), cfg.tau()));
    CHECK(std::abs(left.amplitudes[7] - 1.0) < kTol);
}

TEST_CASE("half-hop states still sample to a normalized discrete distribution") {
    const BoxConfig cfg = unit_box(8);
    const auto half = from_spectrum(evolve(to_spectrum(phi_packet(2, cfg)), cfg.tau() / 2));
    CHECK(std::abs(norm_sq(half.amplitudes) - 1.0) < kTol);
}

TEST_CASE("reconstruction: sample-point identity and full-curve agreement") {
    const BoxConfig cfg = unit_box(8);
    const auto phi0 = phi_packet(0, cfg);
    CHECK(std::abs(reconstruct(phi0.amplitudes, cfg.site(3), cfg)) < kTol);
    for (int i = 0; i < 257; ++i) {
        const double x = cfg.length * i / 257.0;
        CHECK(std::abs(reconstruct(phi0.amplitudes, x, cfg) - phi_basis(0, x, cfg)) < kTol);
    }
}

TEST_CASE("reconstruction commutes with the shift solution psi(x,t) = f(x - ct)") {
    const BoxConfig cfg = unit_box(8);
    const double t = 0.6 * cfg.tau();
    const auto evolved = from_spectrum(evolve(to_spectrum(phi_packet(0, cfg)), t));
    for (int i = 0; i < 100; ++i) {
        const double x = cfg.length * i / 100.0;
        double shifted = std::fmod(x - cfg.speed * t, cfg.length);
        if (shifted < 0) shifted += cfg.length;
        CHECK(std::abs(reconstruct(evolved.amplitudes, x, cfg) - phi_basis(0, shifted, cfg)) < kTol);
    }
}

TEST_CASE("norms: discrete shifts and the continuous integral") {
    const BoxConfig cfg = unit_box(8);
    const auto phi0 = phi_packet(0, cfg);
    const auto at_zero = norms(phi0, 0.0);
    CHECK(at_zero.shifted_discrete == 1.0);
    const auto shifted = norms(phi0, 0.37);
    CHECK(std::abs(shifted.shifted_discrete - 1.0) < kTol);
    CHECK(std::abs(shifted.continuous - 1.0) < 1e-9);
    const auto half = norms(phi0, 0.5);
    CHECK(std::abs(half.shifted_discrete - 1.0) < kTol);
    CHECK_THROWS_AS(norms(phi0, 1.0), std::invalid_argument);
}

TEST_CASE("rate bound saturates with the N/(N-1) cycle factor") {
    {
        const BoxConfig cfg(2, 2.0, 1.0, 1.0);
        const auto report = rate_bound_report(to_spectrum(phi_packet(0, cfg)));
        CHECK(std::abs(report.average_energy - 0.25) < kTol); // hc/2L at N=2, L=2
        CHECK(std::abs(report.saturation_ratio - 1.0) < kTol);
    }
    {
        const BoxConfig cfg(8, 8.0, 1.0, 1.0);
        const auto report = rate_bound_report(to_spectrum(phi_packet(5, cfg)));
        CHECK(std::abs(report.average_energy - 7.0 / 16.0) < kTol); // (N-1)hc/2L
        CHECK(std::abs(report.nu_perp - 1.0) < kTol);               // one site per unit time
        CHECK(std::abs(report.saturation_ratio - 1.0) < kTol);
    }
    // Non-phi input is rejected.
    const BoxConfig cfg = unit_box(4);
    SpectralState lopsided;
    lopsided.config = cfg;
    lopsided.coefficients = {Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0),
                             Complex(0.0, 0.0)};
    CHECK_THROWS_AS(rate_bound_report(lopsided), std::invalid_argument);
}

TEST_CASE("antisymmetrize: the displayed two-particle state") {
    const BoxConfig cfg = unit_box(4);
    const auto result = antisymmetrize({0, 1}, cfg);
    REQUIRE(result.verdict == SymmetrizeVerdict::ok);
    const auto& t = result.state.tensor;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // tensor[u1 + N u2]: (|0>|1> - |1>|0>)/sqrt(2)
    CHECK(std::abs(t[0 + 4 * 1] - Complex(inv_sqrt2, 0)) < kTol);
    CHECK(std::abs(t[1 + 4 * 0] - Complex(-inv_sqrt2, 0)) < kTol);
    for (size_t i = 0; i < t.size(); ++i)
        if (i != 4 && i != 1) CHECK(std::abs(t[i]) < kTol);
}

TEST_CASE("Pauli exclusion: duplicate fermion positions give the zero verdict") {
    const BoxConfig cfg = unit_box(4);
    const auto result = antisymmetrize({2, 2}, cfg);
    CHECK(result.verdict == SymmetrizeVerdict::zero_state);
    // Bosons happily stack.
    const auto boson = symmetrize({2, 2}, cfg);
    CHECK(boson.verdict == SymmetrizeVerdict::ok);
    CHECK(std::abs(boson.state.tensor[2 + 4 * 2] - Complex(1.0, 0.0)) < kTol);
}

TEST_CASE("fermion antisymmetry and boson symmetry under transpositions") {
    const BoxConfig cfg = unit_box(5);
    const auto fermion = antisymmetrize({0, 2, 4}, cfg);
    REQUIRE(fermion.verdict == SymmetrizeVerdict::ok);
    const auto swapped = transpose_particles(fermion.state, 0, 2);
    for (size_t i = 0; i < swapped.tensor.size(); ++i)
        CHECK(swapped.tensor[i] == -fermion.state.tensor[i]);

    const auto boson = symmetrize({0, 2, 4}, cfg);
    const auto bswapped = transpose_particles(boson.state, 1, 2);
    for (size_t i = 0; i < bswapped.tensor.size(); ++i)
        CHECK(bswapped.tensor[i] == boson.state.tensor[i]);
}

TEST_CASE("shift evolution commutes with antisymmetrization") {
    const BoxConfig cfg = unit_box(6);
    const auto anti = antisymmetrize({1, 4}, cfg);
    REQUIRE(anti.verdict == SymmetrizeVerdict::ok);
    // Evolving each factor by tau shifts both positions by one site.
    const auto evolved = evolve_multi(anti.state, cfg.tau());
    const auto target = antisymmetrize({2, 5}, cfg);
    for (size_t i = 0; i < evolved.tensor.size(); ++i)
        CHECK(std::abs(evolved.tensor[i] - target.state.tensor[i]) < kTol);
    // Fractional times as well: antisymmetrize-then-evolve vs evolve factors.
    const double t = 0.3 * cfg.tau();
    const auto evolved_frac = evolve_multi(anti.state, t);
    CHECK(std::abs(norm_sq(evolved_frac.tensor) - 1.0) < kTol);
}

TEST_CASE("the multiparticle tensor cap is enforced") {
    const BoxConfig cfg = unit_box(64);
    CHECK_THROWS_AS(antisymmetrize({0, 1, 2, 3}, cfg), std::invalid_argument); // 64^4 > 2^20
}

TEST_CASE("packet text files round-trip exactly") {
    std::mt19937_64 rng(77);
    const BoxConfig cfg(6, 6.0, 0.5, 2.0);
    auto p = random_packet(cfg, rng);
    p.sigma = -1;
    const auto text = export_packet(p);
    const auto back = import_packet(text);
    CHECK(back.config.n == p.config.n);
    CHECK(back.config.length == p.config.length);
    CHECK(back.config.speed == p.config.speed);
    CHECK(back.config.planck == p.config.planck);
    CHECK(back.sigma == p.sigma);
    for (int u = 0; u < cfg.n; ++u)
        CHECK(back.amplitudes[static_cast<size_t>(u)] == p.amplitudes[static_cast<size_t>(u)]);
    CHECK_THROWS(import_packet("4 1.0 1.0\n"));
}

TEST_CASE("box parameters must be positive; tau is L/(N c)") {
    CHECK_THROWS_AS(BoxConfig(0, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BoxConfig(4, -1.0, 1.0, 1.0), std::invalid_argument);
    const BoxConfig cfg(8, 4.0, 2.0, 1.0);
    CHECK(cfg.tau() == 4.0 / 16.0);
    CHECK(cfg.tau() * cfg.n * cfg.speed == cfg.length);
}
