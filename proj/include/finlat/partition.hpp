#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace finlat {

/// Closed symbol set shared by a lattice and the rules that act on it.
class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> symbols);

    int size() const { return static_cast<int>(symbols_.size()); }
    const std::string& symbol(int i) const { return symbols_.at(static_cast<size_t>(i)); }
    // -1 when the token is not declared.
    int index_of(std::string_view token) const;

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::vector<std::string> symbols_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

enum class PartitionPhase : int { even = 0, odd = 1 };

inline PartitionPhase opposite(PartitionPhase p) {
    return p == PartitionPhase::even ? PartitionPhase::odd : PartitionPhase::even;
}
inline int phase_offset(PartitionPhase p) { return p == PartitionPhase::even ? 0 : 1; }

/// Periodic 1D/2D array of cells over a finite alphabet. Extents must be even
/// so both partition phases tile exactly. Value-semantic.
class CellLattice {
public:
    static CellLattice line(AlphabetPtr alphabet, int nx);
    static CellLattice grid(AlphabetPtr alphabet, int nx, int ny);

    int rank() const { return rank_; }
    int extent(int axis) const { return extent_[static_cast<size_t>(axis)]; }
    long long cell_count() const { return static_cast<long long>(cells_.size()); }
    const AlphabetPtr& alphabet() const { return alphabet_; }

    // Index arithmetic wraps modulo the extent on every axis.
    uint8_t at(int x, int y = 0) const { return cells_[index(x, y)]; }
    void set(int x, int y, int symbol);
    void set(int x, int symbol) { set(x, 0, symbol); }

    std::span<const uint8_t> cells() const { return cells_; }
    std::span<uint8_t> cells_mutable() { return cells_; }

    /// Per-symbol occurrence counts over the whole lattice.
    std::vector<long long> census() const;

    bool operator==(const CellLattice& other) const;
    bool operator!=(const CellLattice& other) const { return !(*this == other); }

    size_t index(int x, int y) const {
        const int ex = extent_[0], ey = extent_[1];
        x %= ex;
        if (x < 0) x += ex;
        y %= ey;
        if (y < 0) y += ey;
        return static_cast<size_t>(y) * static_cast<size_t>(ex) + static_cast<size_t>(x);
    }

private:
    CellLattice(AlphabetPtr alphabet, int rank, int nx, int ny);

    int rank_;
    std::array<int, 2> extent_; // extent_[1] == 1 for rank 1
    std::vector<uint8_t> cells_;
    AlphabetPtr alphabet_;
};

/// Total mapping on block configurations (2 cells in 1D, 2x2 in 2D).
/// Configurations pack little-endian base-|alphabet| in cell order
/// (0,0),(1,0),(0,1),(1,1) relative to the block origin.
class BlockRule {
public:
    /// Builds from a per-configuration mapping function.
    static BlockRule from_function(AlphabetPtr alphabet, int rank,
                                   const std::function<uint32_t(uint32_t)>& map);
    static BlockRule identity(AlphabetPtr alphabet, int rank);
    /// The pair swap (1D) / diagonal transposition (2D).
    static BlockRule swap(AlphabetPtr alphabet, int rank);

    int rank() const { return rank_; }
    int block_cells() const { return rank_ == 1 ? 2 : 4; }
    const AlphabetPtr& alphabet() const { return alphabet_; }
    uint32_t config_count() const { return static_cast<uint32_t>(table_.size()); }
    uint32_t apply(uint32_t packed) const { return table_[packed]; }
    bool invertible_flag() const { return invertible_; }

    uint32_t pack(std::span<const uint8_t> cells) const;
    void unpack(uint32_t packed, std::span<uint8_t> cells) const;

private:
    BlockRule(AlphabetPtr alphabet, int rank, std::vector<uint32_t> table, bool invertible);
    friend BlockRule invert(const BlockRule&);

    int rank_;
    AlphabetPtr alphabet_;
    std::vector<uint32_t> table_;
    bool invertible_;
};

struct StepReport {
    long long step_index = 0;
    PartitionPhase phase = PartitionPhase::even;
    long long changed_blocks = 0;
    std::vector<uint8_t> change_mask; // one entry per block, row-major block order
};

struct Trajectory {
    std::vector<CellLattice> states; // length steps + 1
    std::vector<StepReport> reports; // length steps
    PartitionPhase start_phase = PartitionPhase::even;
};

/// Applies one partitioned update: every block of the given phase is replaced
/// by its rule image. Blocks are disjoint, so the result is independent of
/// evaluation order.
std::pair<CellLattice, StepReport> step(const CellLattice& lattice, const BlockRule& rule,
                                        PartitionPhase phase, long long step_index = 0);

/// Runs `steps` updates with strictly alternating phases, storing every state.
/// Throws when steps + 1 would exceed `max_states`.
Trajectory run(const CellLattice& initial, const BlockRule& rule, PartitionPhase start_phase,
               long long steps, long long max_states = 1 << 16);

struct BijectionReport {
    bool bijective = false;
    // Every group of distinct preimages that share one image.
    std::vector<std::vector<uint32_t>> collisions;
};

/// Injectivity scan over the whole table (a verdict, never an error).
BijectionReport check_bijective(const BlockRule& rule);

/// Exact inverse table; requires a bijective rule.
BlockRule invert(const BlockRule& rule);

/// True when every table entry preserves the multiset of symbols in the block
/// (hence the lattice-wide census is invariant under step).
bool preserves_symbol_multiset(const BlockRule& rule);

// --- plain-text rule tables -------------------------------------------------
//
//   # comment
//   default: identity        (optional; otherwise the table must be complete)
//   sym,sym -> sym,sym       (block cells in row-major order)
//
BlockRule parse_rule_text(const std::string& text, AlphabetPtr alphabet, int rank);
BlockRule load_rule_file(const std::string& path, AlphabetPtr alphabet, int rank);
std::string rule_to_text(const BlockRule& rule, bool identity_default = true);

} // namespace finlat
