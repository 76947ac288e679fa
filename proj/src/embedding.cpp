#include "finlat/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace finlat {

namespace {

constexpr double kPi = std::numbers::pi;

void check_site(int v, int n, const char* what) {
    if (v < 0 || v >= n) throw std::out_of_range(std::string(what) + " index out of range");
}

long long tensor_size(int n, int k) {
    long long size = 1;
    for (int i = 0; i < k; ++i) {
        size *= n;
        if (size > (1ll << 20)) throw std::invalid_argument("multi-particle tensor exceeds 2^20 entries");
    }
    return size;
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};

} // namespace

BoxConfig::BoxConfig(int n_, double l, double c, double h)
    : n(n_), length(l), speed(c), planck(h) {
    if (n <= 0 || l <= 0 || c <= 0 || h <= 0)
        throw std::invalid_argument("box parameters must be strictly positive");
}

Complex eigenstate_sample(int n, int u, const BoxConfig& cfg) {
    check_site(n, cfg.n, "mode");
    check_site(u, cfg.n, "site");
    const double arg = 2.0 * kPi * n * u / cfg.n;
    return std::polar(1.0 / std::sqrt(static_cast<double>(cfg.n)), arg);
}

double eigenenergy(int n, const BoxConfig& cfg) {
    check_site(n, cfg.n, "mode");
    return n * cfg.planck * cfg.speed / cfg.length;
}

Complex phi_basis(int m, double x, const BoxConfig& cfg) {
    check_site(m, cfg.n, "center");
    const int n = cfg.n;
    const double w = x * n / cfg.length - m;
    const Complex phase = std::polar(1.0, kPi * w * (1.0 - 1.0 / n));
    // Reduce w modulo N around the nearest singularity to keep the ratio stable.
    const double k = std::round(w / n);
    const double wt = w - k * n;
    const double denom = std::sin(kPi * wt / n);
    double ratio;
    if (std::abs(denom) < 1e-8) {
        ratio = 1.0; // removable singularity; next correction is O(wt^2)
    } else {
        ratio = std::sin(kPi * wt) / (n * denom);
    }
    // sin(pi w) = (-1)^{kN} sin(pi wt), sin(pi w / N) = (-1)^k sin(pi wt / N).
    const long long ki = static_cast<long long>(k);
    const long long sign_pow = ki * n - ki;
    const double sign = (sign_pow % 2 == 0) ? 1.0 : -1.0;
    return sign * ratio * phase;
}

Complex phi_basis_sum(int m, double x, const BoxConfig& cfg) {
    check_site(m, cfg.n, "center");
    const int n = cfg.n;
    const double u = x * n / cfg.length;
    Complex sum = 0;
    for (int k = 0; k < n; ++k) sum += std::polar(1.0, 2.0 * kPi * k * (u - m) / n);
    return sum / static_cast<double>(n);
}

Complex sinc_phi(double u) {
    const double s = (u == 0.0) ? 1.0 : std::sin(kPi * u) / (kPi * u);
    return std::polar(1.0, kPi * u) * s;
}

SpectralState to_spectrum(const DiscreteWavepacket& packet) {
    const int n = packet.config.n;
    if (static_cast<int>(packet.amplitudes.size()) != n)
        throw std::invalid_argument("amplitude count must equal N");
    SpectralState out;
    out.config = packet.config;
    out.sigma = packet.sigma;
    out.coefficients.assign(static_cast<size_t>(n), Complex{});
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        Complex acc = 0;
        for (int u = 0; u < n; ++u)
            acc += packet.amplitudes[static_cast<size_t>(u)] * std::polar(1.0, -2.0 * kPi * m * u / n);
        out.coefficients[static_cast<size_t>(m)] = acc * scale;
    }
    return out;
}

DiscreteWavepacket from_spectrum(const SpectralState& state) {
    const int n = state.config.n;
    if (static_cast<int>(state.coefficients.size()) != n)
        throw std::invalid_argument("coefficient count must equal N");
    DiscreteWavepacket out;
    out.config = state.config;
    out.sigma = state.sigma;
    out.amplitudes.assign(static_cast<size_t>(n), Complex{});
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int u = 0; u < n; ++u) {
        Complex acc = 0;
        for (int m = 0; m < n; ++m)
            acc += state.coefficients[static_cast<size_t>(m)] * std::polar(1.0, 2.0 * kPi * m * u / n);
        out.amplitudes[static_cast<size_t>(u)] = acc * scale;
    }
    return out;
}

SpectralState evolve(const SpectralState& state, double t) {
    SpectralState out = state;
    const double base = -2.0 * kPi * state.sigma * state.config.speed * t / state.config.length;
    for (int n = 0; n < state.config.n; ++n)
        out.coefficients[static_cast<size_t>(n)] *= std::polar(1.0, base * n);
    return out;
}

Complex reconstruct(const std::vector<Complex>& samples, double x, const BoxConfig& cfg) {
    if (static_cast<int>(samples.size()) != cfg.n)
        throw std::invalid_argument("sample count must equal N");
    Complex acc = 0;
    for (int k = 0; k < cfg.n; ++k) acc += samples[static_cast<size_t>(k)] * phi_basis(k, x, cfg);
    return acc;
}

NormReport norms(const DiscreteWavepacket& packet, double delta) {
    if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("delta must lie in [0, 1)");
    const BoxConfig& cfg = packet.config;
    NormReport report;

    for (int u = 0; u < cfg.n; ++u) {
        const Complex v = reconstruct(packet.amplitudes, (u + delta) * cfg.length / cfg.n, cfg);
        report.shifted_discrete += std::norm(v);
    }

    // Composite Gauss-Legendre, 64 panels per site interval.
    const int panels = 64;
    const double dx = cfg.length / cfg.n / panels;
    double integral = 0.0;
    for (int u = 0; u < cfg.n; ++u) {
        const double base = cfg.site(u);
        for (int p = 0; p < panels; ++p) {
            const double a = base + p * dx;
            const double mid = a + dx / 2, half = dx / 2;
            for (int g = 0; g < 8; ++g) {
                const double x = mid + half * kGlNodes[g];
                integral += kGlWeights[g] * half * std::norm(reconstruct(packet.amplitudes, x, cfg));
            }
        }
    }
    report.continuous = integral;
    return report;
}

DiscreteWavepacket phi_packet(int m, const BoxConfig& cfg, Sigma sigma) {
    check_site(m, cfg.n, "center");
    DiscreteWavepacket p;
    p.config = cfg;
    p.sigma = sigma;
    p.amplitudes.assign(static_cast<size_t>(cfg.n), Complex{});
    p.amplitudes[static_cast<size_t>(m)] = 1.0;
    return p;
}

RateBoundReport rate_bound_report(const SpectralState& state) {
    const int n = state.config.n;
    // A (possibly evolved or shifted) Phi state has coefficients of equal
    // magnitude 1/sqrt(N) in geometric phase progression.
    const double mag = 1.0 / std::sqrt(static_cast<double>(n));
    for (const Complex& c : state.coefficients)
        if (std::abs(std::abs(c) - mag) > 1e-9)
            throw std::invalid_argument("rate bound is reported for Phi basis states only");
    if (n > 1) {
        const Complex ratio = state.coefficients[1] / state.coefficients[0];
        for (int i = 1; i + 1 < n; ++i) {
            const Complex r = state.coefficients[static_cast<size_t>(i) + 1] /
                              state.coefficients[static_cast<size_t>(i)];
            if (std::abs(r - ratio) > 1e-9)
                throw std::invalid_argument("rate bound is reported for Phi basis states only");
        }
    }

    RateBoundReport report;
    for (int k = 0; k < n; ++k)
        report.average_energy += std::norm(state.coefficients[static_cast<size_t>(k)]) *
                                 eigenenergy(k, state.config);
    report.nu_perp = state.config.n * state.config.speed / state.config.length;
    const double cycle_factor = static_cast<double>(n) / (n - 1 == 0 ? 1 : n - 1);
    report.saturation_ratio =
        report.nu_perp * state.config.planck / (2.0 * report.average_energy * cycle_factor);
    return report;
}

namespace {

SymmetrizeResult symmetrized_product(const std::vector<int>& positions, const BoxConfig& cfg,
                                     bool anti) {
    const int k = static_cast<int>(positions.size());
    if (k < 1) throw std::invalid_argument("need at least one particle");
    for (int p : positions) check_site(p, cfg.n, "position");

    SymmetrizeResult result;
    result.state.config = cfg;
    result.state.particles = k;
    result.state.statistics = anti ? Statistics::fermion : Statistics::boson;
    const long long size = tensor_size(cfg.n, k);
    result.state.tensor.assign(static_cast<size_t>(size), Complex{});

    if (anti) {
        std::vector<int> sorted = positions;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            result.verdict = SymmetrizeVerdict::zero_state; // Pauli exclusion
            return result;
        }
    }

    // Sum over permutations of which particle sits at which listed position.
    std::vector<int> perm(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) perm[static_cast<size_t>(i)] = i;
    do {
        int inversions = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (perm[static_cast<size_t>(i)] > perm[static_cast<size_t>(j)]) inversions++;
        const double sign = (anti && inversions % 2 == 1) ? -1.0 : 1.0;
        long long index = 0;
        for (int axis = k - 1; axis >= 0; --axis)
            index = index * cfg.n + positions[static_cast<size_t>(perm[static_cast<size_t>(axis)])];
        result.state.tensor[static_cast<size_t>(index)] += sign;
    } while (std::next_permutation(perm.begin(), perm.end()));

    double total = 0.0;
    for (const Complex& v : result.state.tensor) total += std::norm(v);
    if (total == 0.0) {
        result.verdict = SymmetrizeVerdict::zero_state;
        return result;
    }
    const double scale = 1.0 / std::sqrt(total);
    for (Complex& v : result.state.tensor) v *= scale;
    return result;
}

} // namespace

SymmetrizeResult antisymmetrize(const std::vector<int>& positions, const BoxConfig& cfg) {
    return symmetrized_product(positions, cfg, true);
}

SymmetrizeResult symmetrize(const std::vector<int>& positions, const BoxConfig& cfg) {
    return symmetrized_product(positions, cfg, false);
}

MultiParticleState evolve_multi(const MultiParticleState& state, double t) {
    const int n = state.config.n;
    const int k = state.particles;
    MultiParticleState out = state;

    // Single-particle shift evolution along one tensor axis at a time,
    // via the spectral representation.
    std::vector<Complex> line(static_cast<size_t>(n));
    long long stride = 1;
    const long long size = static_cast<long long>(out.tensor.size());
    for (int axis = 0; axis < k; ++axis) {
        for (long long base = 0; base < size; ++base) {
            // Visit each 1D line along `axis` exactly once.
            if ((base / stride) % n != 0) continue;
            for (int u = 0; u < n; ++u) line[static_cast<size_t>(u)] = out.tensor[static_cast<size_t>(base + stride * u)];
            DiscreteWavepacket packet;
            packet.config = state.config;
            packet.sigma = +1;
            packet.amplitudes = line;
            const auto evolved = from_spectrum(evolve(to_spectrum(packet), t));
            for (int u = 0; u < n; ++u)
                out.tensor[static_cast<size_t>(base + stride * u)] = evolved.amplitudes[static_cast<size_t>(u)];
        }
        stride *= n;
    }
    return out;
}

MultiParticleState transpose_particles(const MultiParticleState& state, int i, int j) {
    const int n = state.config.n;
    const int k = state.particles;
    if (i < 0 || j < 0 || i >= k || j >= k) throw std::out_of_range("particle index");
    MultiParticleState out = state;
    std::vector<int> idx(static_cast<size_t>(k));
    const long long size = static_cast<long long>(state.tensor.size());
    for (long long flat = 0; flat < size; ++flat) {
        long long rest = flat;
        for (int a = 0; a < k; ++a) {
            idx[static_cast<size_t>(a)] = static_cast<int>(rest % n);
            rest /= n;
        }
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        long long swapped = 0;
        for (int a = k - 1; a >= 0; --a) swapped = swapped * n + idx[static_cast<size_t>(a)];
        out.tensor[static_cast<size_t>(swapped)] = state.tensor[static_cast<size_t>(flat)];
    }
    return out;
}

double norm_sq(const std::vector<Complex>& v) {
    double total = 0.0;
    for (const Complex& x : v) total += std::norm(x);
    return total;
}

std::string export_packet(const DiscreteWavepacket& packet) {
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d %a %a %a %d\n", packet.config.n, packet.config.length,
                  packet.config.speed, packet.config.planck, packet.sigma);
    out << buf;
    for (const Complex& a : packet.amplitudes) {
        std::snprintf(buf, sizeof buf, "%a %a\n", a.real(), a.imag());
        out << buf;
    }
    return out.str();
}

DiscreteWavepacket import_packet(const std::string& text) {
    std::istringstream in(text);
    std::string n_tok, l_tok, c_tok, h_tok, sigma_tok;
    if (!(in >> n_tok >> l_tok >> c_tok >> h_tok >> sigma_tok))
        throw std::runtime_error("malformed packet header; expected 'N L c h sigma'");
    DiscreteWavepacket packet;
    packet.config = BoxConfig(std::stoi(n_tok), std::strtod(l_tok.c_str(), nullptr),
                              std::strtod(c_tok.c_str(), nullptr), std::strtod(h_tok.c_str(), nullptr));
    packet.sigma = std::stoi(sigma_tok);
    if (packet.sigma != 1 && packet.sigma != -1) throw std::runtime_error("sigma must be +1 or -1");
    std::string re_tok, im_tok;
    while (in >> re_tok >> im_tok)
        packet.amplitudes.emplace_back(std::strtod(re_tok.c_str(), nullptr),
                                       std::strtod(im_tok.c_str(), nullptr));
    if (static_cast<int>(packet.amplitudes.size()) != packet.config.n)
        throw std::runtime_error("amplitude count does not match N");
    return packet;
}

} // namespace finlat
