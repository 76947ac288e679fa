#pragma once

#include "finlat/partition.hpp"
#include "finlat/rational.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace finlat {

// Typed directed particles. In 2D directions are the four diagonals; a
// particle advances one cell along its direction every step, crossing the
// center of its current block. In 1D the directions are up and down.
enum class RssKind : int { empty = 0, black = 1, white_plus = 2, white_minus = 3 };

struct Dir2 {
    int dx = 0;
    int dy = 0;
};

// Direction indices, 2D: 0=NE, 1=NW, 2=SE, 3=SW. 1D: 0=up, 1=down.
inline constexpr std::array<Dir2, 4> kDiag = {Dir2{1, 1}, Dir2{-1, 1}, Dir2{1, -1}, Dir2{-1, -1}};
inline constexpr int kNE = 0, kNW = 1, kSE = 2, kSW = 3;
inline constexpr int kUp = 0, kDown = 1;

int rotate_ccw(int dir);          // 2D direction rotation by +90 degrees
int rotate_cw(int dir);
int reverse_dir1(int dir);        // 1D

struct RssCell {
    RssKind kind = RssKind::empty;
    int dir = 0;

    bool occupied() const { return kind != RssKind::empty; }
    bool white() const { return kind == RssKind::white_plus || kind == RssKind::white_minus; }
    friend bool operator==(const RssCell&, const RssCell&) = default;
};

/// Symbol table shared by the 2D (13 symbols) and 1D (7 symbols) variants:
/// empty, black per direction, white_plus per direction, white_minus per direction.
AlphabetPtr rss_alphabet(int rank);
int rss_symbol(const RssCell& cell, int rank);
RssCell rss_cell(int symbol, int rank);

/// The complete block table: pairwise black-black collisions produce labelled
/// whites, a lone white turns toward its chirality side, opposite whites
/// meeting convergently turn back into blacks, the unused white-white case
/// closes the table bijectively, and everything else propagates freely.
/// Verified bijective and particle-count preserving before return.
BlockRule make_rss_rule(int rank);

/// True when every table entry maps k occupied cells to k occupied cells.
bool preserves_particle_count(const BlockRule& rule, int rank);

struct ParticleAt {
    int x = 0;
    int y = 0;
    RssCell cell;
};

std::vector<ParticleAt> particles(const CellLattice& lattice, int rank);

/// Places an n-column by m-row group of black particles sharing `heading`.
/// Particles occupy the heading's converging corner of successive even-phase
/// blocks, so the group spans 2*cols x 2*rows cells. (x0, y0) is the cell of
/// the top-left particle and must sit on the right corner of its block.
void place_ball(CellLattice& lattice, int cols, int rows, int heading, int x0, int y0);
void make_square_ball(CellLattice& lattice, int n, int heading, int x0, int y0);

struct RssScenario {
    explicit RssScenario(CellLattice init) : initial(std::move(init)) {}

    CellLattice initial;
    int n = 0;                 // ball size parameter
    int cols = 0, rows = 0;    // per-ball particle grid
    int heading_a = 0, heading_b = 0;
    std::vector<std::pair<int, int>> ball_a_cells, ball_b_cells;
    bool vertical_axis = false; // false: horizontal symmetry axis
    double axis_coord = 0.0;    // the axis line, in cell coordinates
    long long steps = 0;        // enough to complete the collision
    double epsilon = 1.0;
};

enum class ScenarioKind {
    head_on, // two n x n square balls
    column,  // two 1 x n columns (the mass-curve geometry)
    miss,    // columns offset so the paths never meet (control)
};

/// Two-ball collision along a horizontal or vertical symmetry axis.
RssScenario make_collision_scenario(int n, ScenarioKind kind, bool vertical_axis = false,
                                    double epsilon = 1.0);

struct RssTrace {
    explicit RssTrace(RssScenario sc) : scenario(std::move(sc)) {}

    RssScenario scenario;
    std::vector<CellLattice> states;
    std::vector<StepReport> reports;
    std::vector<long long> crossings_all;   // per step: right-angle center crossings
    std::vector<long long> crossings_white; // per step: opposite-chirality white pairs
    // Ball centers per state under the two labelings.
    std::vector<std::array<double, 2>> center_a_attractive, center_b_attractive;
    std::vector<std::array<double, 2>> center_a_repulsive, center_b_repulsive;
    std::vector<double> separation; // between repulsive-labeling centers
};

RssTrace rss_run_traced(const RssScenario& scenario, const BlockRule& rule,
                        std::optional<long long> steps = std::nullopt);

struct ShiftVerdict {
    bool pass = false;
    bool collision_complete = false;
    long long expected_shift_cells = 0; // one ball width, in lattice cells
    std::string detail;
};

/// Compares final ball positions against the free-flight control: each
/// outgoing ball must match the control displaced exactly one ball-width
/// along the collision axis, shapes intact.
ShiftVerdict verify_ssm_shift(const RssTrace& trace);

enum class MassInterpretation { max_mass, white_mass };

struct MassSeries {
    std::vector<double> mass;          // sqrt(2) * epsilon * crossings
    std::vector<long long> crossings;
    std::vector<double> ball_fraction; // per-ball M/E
};

MassSeries crossing_mass(const RssTrace& trace, MassInterpretation interpretation);

/// (center separation, per-ball mass fraction) pairs over the trace.
std::vector<std::pair<double, double>> mass_vs_separation(const RssTrace& trace,
                                                          MassInterpretation interpretation);

/// Integrates the vertical center position from a per-ball mass-fraction
/// series: 1/gamma = M/E, |v| = sqrt(1 - (M/E)^2), vertical speed
/// sqrt(v^2 - vh^2) with the sign held through approach and flipped at peak
/// mass. Throws when v^2 < vh^2.
std::vector<double> mass_to_trajectory(const std::vector<double>& ball_fraction, double v_horiz);

struct MomentumEnergy {
    long long count = 0;
    long long sum_dx = 0, sum_dy = 0; // exact direction sums
    double energy = 0.0;              // epsilon * count
    double px = 0.0, py = 0.0;        // epsilon * sum / sqrt(2) (2D)
};

MomentumEnergy momentum_energy(const CellLattice& lattice, int rank, double epsilon);

/// +/- white populations (equal at every step of a pair collision).
std::pair<long long, long long> chirality_census(const CellLattice& lattice, int rank);

struct RelativisticReport {
    double crossing_ke_over_eps = 0.0; // 2(1 - 1/sqrt(2)) under the massless reading
    double free_ke_over_eps = 1.0;
    Rat matched_free_mass{0};      // m_f with epsilon = 1
    Rat matched_collision_mass{0}; // m_c = 2 m_f
    Rat matched_gamma{0};          // 1
    bool mass_condition_holds = false;
};

/// The massless reading mismatches state-change energy at a crossing; forcing
/// agreement for free particles and collisions alike pins m_c = 2 m_f, gamma = 1.
RelativisticReport relativistic_consistency_report(double epsilon);

/// m-fold spatial blow-up: every even-phase block is replaced by an m x m
/// tessellation of identical copies.
CellLattice blow_up(const CellLattice& lattice, int m);

// --- text formats ------------------------------------------------------------
std::string export_snapshot(const CellLattice& lattice, int rank);
CellLattice import_snapshot(const std::string& text);
std::string export_trace_text(const RssTrace& trace);
/// CSV columns: step,crossings_all,crossings_white,M_max,M_white,Mfrac_max,Mfrac_white,separation
std::string export_mass_csv(const RssTrace& trace);

} // namespace finlat
