#include "finlat/partition.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace finlat {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw std::invalid_argument("alphabet must not be empty");
    for (size_t i = 0; i < symbols_.size(); ++i)
        for (size_t j = i + 1; j < symbols_.size(); ++j)
            if (symbols_[i] == symbols_[j])
                throw std::invalid_argument("duplicate alphabet symbol: " + symbols_[i]);
}

int Alphabet::index_of(std::string_view token) const {
    for (size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i] == token) return static_cast<int>(i);
    return -1;
}

CellLattice::CellLattice(AlphabetPtr alphabet, int rank, int nx, int ny)
    : rank_(rank), extent_{nx, ny}, alphabet_(std::move(alphabet)) {
    if (!alphabet_) throw std::invalid_argument("lattice needs an alphabet");
    if (nx <= 0 || nx % 2 != 0) throw std::invalid_argument("extent must be positive and even");
    if (rank == 2 && (ny <= 0 || ny % 2 != 0))
        throw std::invalid_argument("extent must be positive and even");
    cells_.assign(static_cast<size_t>(nx) * static_cast<size_t>(ny), 0);
}

CellLattice CellLattice::line(AlphabetPtr alphabet, int nx) {
    return CellLattice(std::move(alphabet), 1, nx, 1);
}

CellLattice CellLattice::grid(AlphabetPtr alphabet, int nx, int ny) {
    return CellLattice(std::move(alphabet), 2, nx, ny);
}

void CellLattice::set(int x, int y, int symbol) {
    if (symbol < 0 || symbol >= alphabet_->size())
        throw std::out_of_range("symbol outside the declared alphabet");
    cells_[index(x, y)] = static_cast<uint8_t>(symbol);
}

std::vector<long long> CellLattice::census() const {
    std::vector<long long> counts(static_cast<size_t>(alphabet_->size()), 0);
    for (uint8_t c : cells_) counts[c]++;
    return counts;
}

bool CellLattice::operator==(const CellLattice& other) const {
    return rank_ == other.rank_ && extent_ == other.extent_ && cells_ == other.cells_ &&
           *alphabet_ == *other.alphabet_;
}

namespace {

uint32_t pow_u32(uint32_t base, int exp) {
    uint64_t v = 1;
    for (int i = 0; i < exp; ++i) {
        v *= base;
        if (v > (1u << 30)) throw std::invalid_argument("rule table too large");
    }
    return static_cast<uint32_t>(v);
}

} // namespace

BlockRule::BlockRule(AlphabetPtr alphabet, int rank, std::vector<uint32_t> table, bool invertible)
    : rank_(rank), alphabet_(std::move(alphabet)), table_(std::move(table)), invertible_(invertible) {}

BlockRule BlockRule::from_function(AlphabetPtr alphabet, int rank,
                                   const std::function<uint32_t(uint32_t)>& map) {
    if (rank != 1 && rank != 2) throw std::invalid_argument("rank must be 1 or 2");
    const int cells = rank == 1 ? 2 : 4;
    const uint32_t configs = pow_u32(static_cast<uint32_t>(alphabet->size()), cells);
    std::vector<uint32_t> table(configs);
    for (uint32_t c = 0; c < configs; ++c) {
        const uint32_t out = map(c);
        if (out >= configs) throw std::invalid_argument("rule image outside configuration space");
        table[c] = out;
    }
    BlockRule rule(std::move(alphabet), rank, std::move(table), false);
    rule.invertible_ = check_bijective(rule).bijective;
    return rule;
}

BlockRule BlockRule::identity(AlphabetPtr alphabet, int rank) {
    return from_function(std::move(alphabet), rank, [](uint32_t c) { return c; });
}

BlockRule BlockRule::swap(AlphabetPtr alphabet, int rank) {
    const uint32_t a = static_cast<uint32_t>(alphabet->size());
    if (rank == 1) {
        return from_function(std::move(alphabet), 1, [a](uint32_t c) {
            const uint32_t s0 = c % a, s1 = c / a;
            return s1 + s0 * a;
        });
    }
    // Diagonal transposition: (0,0)<->(1,1), (1,0)<->(0,1).
    return from_function(std::move(alphabet), 2, [a](uint32_t c) {
        uint32_t s[4];
        for (int i = 0; i < 4; ++i) {
            s[i] = c % a;
            c /= a;
        }
        std::swap(s[0], s[3]);
        std::swap(s[1], s[2]);
        return s[0] + a * (s[1] + a * (s[2] + a * s[3]));
    });
}

uint32_t BlockRule::pack(std::span<const uint8_t> cells) const {
    const uint32_t a = static_cast<uint32_t>(alphabet_->size());
    uint32_t packed = 0;
    for (size_t i = cells.size(); i-- > 0;) packed = packed * a + cells[i];
    return packed;
}

void BlockRule::unpack(uint32_t packed, std::span<uint8_t> cells) const {
    const uint32_t a = static_cast<uint32_t>(alphabet_->size());
    for (size_t i = 0; i < cells.size(); ++i) {
        cells[i] = static_cast<uint8_t>(packed % a);
        packed /= a;
    }
}

std::pair<CellLattice, StepReport> step(const CellLattice& lattice, const BlockRule& rule,
                                        PartitionPhase phase, long long step_index) {
    if (lattice.rank() != rule.rank())
        throw std::invalid_argument("rule block shape does not match lattice rank");
    if (*lattice.alphabet() != *rule.alphabet())
        throw std::invalid_argument("rule alphabet does not match lattice alphabet");

    CellLattice next = lattice;
    StepReport report;
    report.step_index = step_index;
    report.phase = phase;

    const int off = phase_offset(phase);
    if (lattice.rank() == 1) {
        const int nx = lattice.extent(0);
        report.change_mask.assign(static_cast<size_t>(nx / 2), 0);
        uint8_t in[2], out[2];
        for (int b = 0; b < nx / 2; ++b) {
            const int x0 = off + 2 * b;
            in[0] = lattice.at(x0);
            in[1] = lattice.at(x0 + 1);
            const uint32_t packed = rule.pack({in, 2});
            const uint32_t image = rule.apply(packed);
            if (image != packed) {
                report.change_mask[static_cast<size_t>(b)] = 1;
                report.changed_blocks++;
                rule.unpack(image, {out, 2});
                next.set(x0, out[0]);
                next.set(x0 + 1, out[1]);
            }
        }
    } else {
        const int nx = lattice.extent(0), ny = lattice.extent(1);
        report.change_mask.assign(static_cast<size_t>(nx / 2) * static_cast<size_t>(ny / 2), 0);
        uint8_t in[4], out[4];
        size_t bi = 0;
        for (int by = 0; by < ny / 2; ++by) {
            for (int bx = 0; bx < nx / 2; ++bx, ++bi) {
                const int x0 = off + 2 * bx, y0 = off + 2 * by;
                in[0] = lattice.at(x0, y0);
                in[1] = lattice.at(x0 + 1, y0);
                in[2] = lattice.at(x0, y0 + 1);
                in[3] = lattice.at(x0 + 1, y0 + 1);
                const uint32_t packed = rule.pack({in, 4});
                const uint32_t image = rule.apply(packed);
                if (image != packed) {
                    report.change_mask[bi] = 1;
                    report.changed_blocks++;
                    rule.unpack(image, {out, 4});
                    next.set(x0, y0, out[0]);
                    next.set(x0 + 1, y0, out[1]);
                    next.set(x0, y0 + 1, out[2]);
                    next.set(x0 + 1, y0 + 1, out[3]);
                }
            }
        }
    }
    return {std::move(next), std::move(report)};
}

Trajectory run(const CellLattice& initial, const BlockRule& rule, PartitionPhase start_phase,
               long long steps, long long max_states) {
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (steps + 1 > max_states) throw std::runtime_error("trajectory exceeds the state cap");
    Trajectory traj;
    traj.start_phase = start_phase;
    traj.states.reserve(static_cast<size_t>(steps) + 1);
    traj.states.push_back(initial);
    PartitionPhase phase = start_phase;
    for (long long t = 0; t < steps; ++t) {
        auto [next, report] = step(traj.states.back(), rule, phase, t);
        traj.states.push_back(std::move(next));
        traj.reports.push_back(std::move(report));
        phase = opposite(phase);
    }
    return traj;
}

BijectionReport check_bijective(const BlockRule& rule) {
    const uint32_t n = rule.config_count();
    std::vector<std::vector<uint32_t>> preimages(n);
    for (uint32_t c = 0; c < n; ++c) preimages[rule.apply(c)].push_back(c);
    BijectionReport report;
    report.bijective = true;
    for (uint32_t image = 0; image < n; ++image) {
        if (preimages[image].size() > 1) {
            report.bijective = false;
            report.collisions.push_back(preimages[image]);
        }
    }
    return report;
}

BlockRule invert(const BlockRule& rule) {
    const auto verdict = check_bijective(rule);
    if (!verdict.bijective) throw std::invalid_argument("cannot invert a non-bijective rule");
    const uint32_t n = rule.config_count();
    std::vector<uint32_t> inverse(n);
    for (uint32_t c = 0; c < n; ++c) inverse[rule.apply(c)] = c;
    return BlockRule(rule.alphabet(), rule.rank(), std::move(inverse), true);
}

bool preserves_symbol_multiset(const BlockRule& rule) {
    const int cells = rule.block_cells();
    std::vector<uint8_t> in(static_cast<size_t>(cells)), out(static_cast<size_t>(cells));
    for (uint32_t c = 0; c < rule.config_count(); ++c) {
        rule.unpack(c, in);
        rule.unpack(rule.apply(c), out);
        std::vector<uint8_t> a(in.begin(), in.end()), b(out.begin(), out.end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) return false;
    }
    return true;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
    return out;
}

} // namespace

BlockRule parse_rule_text(const std::string& text, AlphabetPtr alphabet, int rank) {
    const int cells = rank == 1 ? 2 : 4;
    bool identity_default = false;
    std::map<uint32_t, uint32_t> entries;

    // Packing here must mirror BlockRule::pack; build a scratch rule for it.
    BlockRule scratch = BlockRule::identity(alphabet, rank);

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "default: identity" || line == "default:identity") {
            identity_default = true;
            continue;
        }
        const auto arrow = line.find("->");
        if (arrow == std::string::npos)
            throw std::runtime_error("rule line " + std::to_string(line_no) + ": missing '->'");
        const auto lhs = split_tokens(line.substr(0, arrow));
        const auto rhs = split_tokens(line.substr(arrow + 2));
        if (static_cast<int>(lhs.size()) != cells || static_cast<int>(rhs.size()) != cells)
            throw std::runtime_error("rule line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(cells) + " cells per side");
        std::vector<uint8_t> in(static_cast<size_t>(cells)), out(static_cast<size_t>(cells));
        for (int i = 0; i < cells; ++i) {
            const int a = alphabet->index_of(lhs[static_cast<size_t>(i)]);
            const int b = alphabet->index_of(rhs[static_cast<size_t>(i)]);
            if (a < 0 || b < 0)
                throw std::runtime_error("rule line " + std::to_string(line_no) +
                                         ": symbol outside the declared alphabet");
            in[static_cast<size_t>(i)] = static_cast<uint8_t>(a);
            out[static_cast<size_t>(i)] = static_cast<uint8_t>(b);
        }
        const uint32_t key = scratch.pack(in);
        if (entries.count(key))
            throw std::runtime_error("rule line " + std::to_string(line_no) +
                                     ": duplicate entry for configuration");
        entries[key] = scratch.pack(out);
    }

    const uint32_t configs = scratch.config_count();
    if (!identity_default && entries.size() != configs)
        throw std::runtime_error("rule table incomplete (" + std::to_string(entries.size()) + " of " +
                                 std::to_string(configs) +
                                 " configurations) and no 'default: identity' header");

    return BlockRule::from_function(std::move(alphabet), rank, [&entries](uint32_t c) {
        const auto it = entries.find(c);
        return it == entries.end() ? c : it->second;
    });
}

BlockRule load_rule_file(const std::string& path, AlphabetPtr alphabet, int rank) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rule file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_rule_text(buffer.str(), std::move(alphabet), rank);
}

std::string rule_to_text(const BlockRule& rule, bool identity_default) {
    std::ostringstream out;
    if (identity_default) out << "default: identity\n";
    const int cells = rule.block_cells();
    std::vector<uint8_t> in(static_cast<size_t>(cells)), img(static_cast<size_t>(cells));
    const auto& alpha = *rule.alphabet();
    for (uint32_t c = 0; c < rule.config_count(); ++c) {
        const uint32_t image = rule.apply(c);
        if (identity_default && image == c) continue;
        rule.unpack(c, in);
        rule.unpack(image, img);
        for (int i = 0; i < cells; ++i) out << (i ? "," : "") << alpha.symbol(in[static_cast<size_t>(i)]);
        out << " -> ";
        for (int i = 0; i < cells; ++i) out << (i ? "," : "") << alpha.symbol(img[static_cast<size_t>(i)]);
        out << "\n";
    }
    return out.str();
}

} // namespace finlat
