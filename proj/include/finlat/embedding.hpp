#pragma once

#include <complex>
#include <string>
#include <vector>

namespace finlat {

using Complex = std::complex<double>;

/// Parameters of the periodic box hosting the N-site shift register.
struct BoxConfig {
    int n = 0;      // site count
    double length = 1.0;
    double speed = 1.0;  // propagation speed c
    double planck = 1.0; // Planck-constant analog h

    BoxConfig() = default;
    BoxConfig(int n_, double l, double c, double h);

    double tau() const { return length / (speed * n); } // one-site hop time
    double site(int u) const { return u * length / n; } // x_u
};

/// Direction carried as state: +1 rightgoing, -1 leftgoing.
using Sigma = int;

struct DiscreteWavepacket {
    BoxConfig config;
    Sigma sigma = +1;
    std::vector<Complex> amplitudes; // amplitude at site u = Psi(x_u)
};

struct SpectralState {
    BoxConfig config;
    Sigma sigma = +1;
    std::vector<Complex> coefficients; // over eigenstates psi_n, n = 0..N-1
};

// --- single-particle operations ----------------------------------------------

/// psi_n(x_u) = e^{2 pi i n u / N} / sqrt(N)
Complex eigenstate_sample(int n, int u, const BoxConfig& cfg);

/// E_n = n h c / L (energy zero at the ground level)
double eigenenergy(int n, const BoxConfig& cfg);

/// Discrete-position basis function Phi_m evaluated at continuous position x,
/// by the closed form sin(pi w) / (N sin(pi w / N)) * e^{i pi w (1 - 1/N)}
/// with w = x N / L - m; removable singularities take their limit value.
Complex phi_basis(int m, double x, const BoxConfig& cfg);

/// Same value by the direct N-term geometric sum (cross-check path).
Complex phi_basis_sum(int m, double x, const BoxConfig& cfg);

/// phi(pi u) = e^{i pi u} sinc(pi u); value 1 at u = 0.
Complex sinc_phi(double u);

/// Unitary change of basis between site amplitudes and eigenstate coefficients.
SpectralState to_spectrum(const DiscreteWavepacket& packet);
DiscreteWavepacket from_spectrum(const SpectralState& state);

/// Multiplies coefficient n by e^{-2 pi i sigma n c t / L}.
SpectralState evolve(const SpectralState& state, double t);

/// Whittaker-style reconstruction from the N integer-site samples:
/// Psi(x) = sum_k samples[k] Phi_k(x).
Complex reconstruct(const std::vector<Complex>& samples, double x, const BoxConfig& cfg);

struct NormReport {
    double continuous = 0.0;       // quadrature of |Psi|^2 over [0, L]
    double shifted_discrete = 0.0; // sum_u |Psi(x_{u+delta})|^2
};

/// Both normalizations of a bandlimited state; delta in [0, 1).
NormReport norms(const DiscreteWavepacket& packet, double delta);

DiscreteWavepacket phi_packet(int m, const BoxConfig& cfg, Sigma sigma = +1);

struct RateBoundReport {
    double average_energy = 0.0;  // sum |c_n|^2 E_n
    double nu_perp = 0.0;         // N c / L
    double saturation_ratio = 0.0; // nu_perp h / (2 E N/(N-1)); 1 for Phi states
};

/// Requires a (possibly evolved) Phi basis state; errors otherwise.
RateBoundReport rate_bound_report(const SpectralState& state);

// --- identical particles -------------------------------------------------------

enum class Statistics { fermion, boson, distinguishable };

struct MultiParticleState {
    BoxConfig config;
    int particles = 0;
    Statistics statistics = Statistics::distinguishable;
    std::vector<Complex> tensor; // dense, N^k entries, index u_1 fastest
};

enum class SymmetrizeVerdict { ok, zero_state };

struct SymmetrizeResult {
    SymmetrizeVerdict verdict = SymmetrizeVerdict::ok;
    MultiParticleState state;
};

/// Normalized (anti)symmetrized product of Phi basis states at the given
/// sites. Fermions with duplicate positions yield the zero-state verdict.
SymmetrizeResult antisymmetrize(const std::vector<int>& positions, const BoxConfig& cfg);
SymmetrizeResult symmetrize(const std::vector<int>& positions, const BoxConfig& cfg);

/// Shift evolution applied to every tensor axis (sigma = +1).
MultiParticleState evolve_multi(const MultiParticleState& state, double t);

/// Exchanges two particle indices of the tensor.
MultiParticleState transpose_particles(const MultiParticleState& state, int i, int j);

double norm_sq(const std::vector<Complex>& v);

// --- text state files -----------------------------------------------------------
// Header `N L c h sigma`, then one `re im` line per amplitude, hexadecimal
// floats for exact round-trips.
std::string export_packet(const DiscreteWavepacket& packet);
DiscreteWavepacket import_packet(const std::string& text);

} // namespace finlat
