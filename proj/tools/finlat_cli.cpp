// Command-line driver: scenario runs, invariant verification, and export of
// trajectories, observables, and plot data. One scenario per invocation;
// every randomized initial state requires an explicit seed.

#include "finlat/embedding.hpp"
#include "finlat/ledger.hpp"
#include "finlat/partition.hpp"
#include "finlat/rss.hpp"
#include "finlat/string_model.hpp"
#include "finlat/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace finlat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing run artifact: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Rat parse_rat(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(text));
    return Rat(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

// Plain-text key=value config; command-line flags override file entries.
std::vector<std::string> config_file_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::vector<std::string> args;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        args.push_back("--" + key);
        if (!value.empty()) args.push_back(value);
    }
    return args;
}

struct RunOptions {
    std::string model;
    std::string out_dir = "run_out";
    long long steps = -1;
    // shift / rss1d
    int n = 8;
    std::string bits;
    // string
    std::string slopes;
    // rss
    int ball = 2;
    std::string scenario = "head-on";
    bool vertical = false;
    double epsilon = 1.0;
    // embedding
    double length = -1.0, speed = 1.0, planck = 1.0;
    std::string state = "phi:0";
    double time = 1.0;
    int sigma = 1;
    // ledger units
    std::string h_str = "1", tau_str = "1";
    std::optional<unsigned long long> seed;
};

std::string meta_text(const std::map<std::string, std::string>& kv) {
    std::ostringstream out;
    for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
    return out.str();
}

std::string reports_csv(const std::vector<long long>& changes) {
    std::ostringstream out;
    out << "step,changed_blocks\n";
    for (size_t t = 0; t < changes.size(); ++t) out << t << "," << changes[t] << "\n";
    return out.str();
}

int cmd_run_shift(const RunOptions& opt) {
    const auto bits_alpha = std::make_shared<Alphabet>(std::vector<std::string>{"0", "1"});
    CellLattice lat = CellLattice::line(bits_alpha, opt.n);
    std::string bits = opt.bits;
    if (bits.empty()) {
        if (!opt.seed) throw CLI::ValidationError("--seed", "random initial state needs a seed");
        std::mt19937_64 rng(*opt.seed);
        std::uniform_int_distribution<int> dist(0, 1);
        for (int i = 0; i < opt.n; ++i) bits.push_back(dist(rng) ? '1' : '0');
    }
    if (static_cast<int>(bits.size()) != opt.n)
        throw CLI::ValidationError("--bits", "length must equal --n");
    for (int i = 0; i < opt.n; ++i) lat.set(i, bits[static_cast<size_t>(i)] == '1' ? 1 : 0);

    const long long steps = opt.steps < 0 ? opt.n : opt.steps;
    const auto traj = run(lat, BlockRule::swap(bits_alpha, 1), PartitionPhase::even, steps);

    std::ostringstream states;
    for (const auto& s : traj.states) {
        for (int i = 0; i < opt.n; ++i) states << (s.at(i) ? '1' : '0');
        states << "\n";
    }
    std::vector<long long> changes;
    for (const auto& r : traj.reports) changes.push_back(r.changed_blocks);

    fs::create_directories(opt.out_dir);
    write_file(fs::path(opt.out_dir) / "trajectory.txt", states.str());
    write_file(fs::path(opt.out_dir) / "reports.csv", reports_csv(changes));
    const auto series = ideal_kinetic_series(changes, LedgerConfig(parse_rat(opt.h_str), parse_rat(opt.tau_str)));
    write_file(fs::path(opt.out_dir) / "energy.csv", export_energy_series_csv(series));
    write_file(fs::path(opt.out_dir) / "meta.txt",
               meta_text({{"model", "shift"},
                          {"n", std::to_string(opt.n)},
                          {"bits", bits},
                          {"steps", std::to_string(steps)},
                          {"h", opt.h_str},
                          {"tau", opt.tau_str}}));
    std::cout << "shift run complete: " << steps << " steps, outputs in " << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_run_string(const RunOptions& opt) {
    GradientString s;
    if (!opt.slopes.empty()) {
        s = make_string(opt.slopes);
    } else {
        if (!opt.seed) throw CLI::ValidationError("--seed", "random initial state needs a seed");
        std::mt19937_64 rng(*opt.seed);
        s.phase = PartitionPhase::even;
        s.slopes.assign(static_cast<size_t>(opt.n), -1);
        std::vector<int> idx(static_cast<size_t>(opt.n));
        for (int i = 0; i < opt.n; ++i) idx[static_cast<size_t>(i)] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i = 0; i < opt.n / 2; ++i) s.slopes[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1;
    }
    const long long steps = opt.steps < 0 ? s.size() : opt.steps;
    const auto traj = run_string(s, steps);

    fs::create_directories(opt.out_dir);
    write_file(fs::path(opt.out_dir) / "trajectory.txt", export_string_trajectory(traj));
    write_file(fs::path(opt.out_dir) / "observables.csv", export_observables_csv(traj));
    write_file(fs::path(opt.out_dir) / "reports.csv", reports_csv(traj.changed_blocks));
    const auto series = ideal_kinetic_series(traj.changed_blocks,
                                             LedgerConfig(parse_rat(opt.h_str), parse_rat(opt.tau_str)));
    write_file(fs::path(opt.out_dir) / "energy.csv", export_energy_series_csv(series));
    write_file(fs::path(opt.out_dir) / "meta.txt",
               meta_text({{"model", "string"},
                          {"n", std::to_string(s.size())},
                          {"slopes", string_art(s)},
                          {"steps", std::to_string(steps)},
                          {"h", opt.h_str},
                          {"tau", opt.tau_str}}));
    const auto obs = observables(s);
    std::cout << "string run complete: N=" << s.size() << " R=" << obs.r << " L=" << obs.l
              << " v=" << obs.velocity.numerator() << "/" << obs.velocity.denominator()
              << ", outputs in " << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_run_rss2d(const RunOptions& opt) {
    ScenarioKind kind;
    if (opt.scenario == "head-on")
        kind = ScenarioKind::head_on;
    else if (opt.scenario == "column")
        kind = ScenarioKind::column;
    else if (opt.scenario == "miss")
        kind = ScenarioKind::miss;
    else
        throw CLI::ValidationError("--scenario", "expected head-on, column, or miss");

    const auto scenario = make_collision_scenario(opt.ball, kind, opt.vertical, opt.epsilon);
    const BlockRule rule = make_rss_rule(2);
    const auto trace =
        rss_run_traced(scenario, rule, opt.steps < 0 ? std::nullopt : std::optional(opt.steps));

    fs::create_directories(opt.out_dir);
    write_file(fs::path(opt.out_dir) / "trace.txt", export_trace_text(trace));
    write_file(fs::path(opt.out_dir) / "mass.csv", export_mass_csv(trace));
    std::vector<long long> changes;
    for (const auto& r : trace.reports) changes.push_back(r.changed_blocks);
    write_file(fs::path(opt.out_dir) / "reports.csv", reports_csv(changes));
    const auto series = ideal_kinetic_series(changes, LedgerConfig(parse_rat(opt.h_str), parse_rat(opt.tau_str)));
    write_file(fs::path(opt.out_dir) / "energy.csv", export_energy_series_csv(series));
    write_file(fs::path(opt.out_dir) / "meta.txt",
               meta_text({{"model", "rss2d"},
                          {"ball", std::to_string(opt.ball)},
                          {"scenario", opt.scenario},
                          {"vertical", opt.vertical ? "1" : "0"},
                          {"epsilon", std::to_string(opt.epsilon)},
                          {"steps", std::to_string(static_cast<long long>(trace.reports.size()))},
                          {"h", opt.h_str},
                          {"tau", opt.tau_str}}));

    const auto verdict = verify_ssm_shift(trace);
    std::cout << "rss2d run complete: ball=" << opt.ball << " scenario=" << opt.scenario
              << " collision_complete=" << (verdict.collision_complete ? "yes" : "no")
              << " shift_check=" << (verdict.pass ? "pass" : "fail") << ", outputs in "
              << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_run_rss1d(const RunOptions& opt) {
    if (!opt.seed) throw CLI::ValidationError("--seed", "rss1d runs on a seeded random lattice");
    const BlockRule rule = make_rss_rule(1);
    CellLattice lat = CellLattice::line(rss_alphabet(1), opt.n);
    std::mt19937_64 rng(*opt.seed);
    std::uniform_int_distribution<int> dist(0, rss_alphabet(1)->size() - 1);
    for (auto& c : lat.cells_mutable()) c = static_cast<uint8_t>(dist(rng));

    const long long steps = opt.steps < 0 ? 2 * opt.n : opt.steps;
    const auto traj = run(lat, rule, PartitionPhase::even, steps);

    std::ostringstream states;
    for (const auto& s : traj.states) states << export_snapshot(s, 1);
    std::vector<long long> changes;
    for (const auto& r : traj.reports) changes.push_back(r.changed_blocks);

    fs::create_directories(opt.out_dir);
    write_file(fs::path(opt.out_dir) / "trajectory.txt", states.str());
    write_file(fs::path(opt.out_dir) / "reports.csv", reports_csv(changes));
    write_file(fs::path(opt.out_dir) / "meta.txt",
               meta_text({{"model", "rss1d"},
                          {"n", std::to_string(opt.n)},
                          {"seed", std::to_string(*opt.seed)},
                          {"steps", std::to_string(steps)}}));
    std::cout << "rss1d run complete: " << steps << " steps, outputs in " << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_run_embedding(const RunOptions& opt) {
    const double length = opt.length > 0 ? opt.length : static_cast<double>(opt.n);
    const BoxConfig cfg(opt.n, length, opt.speed, opt.planck);

    DiscreteWavepacket packet;
    if (opt.state.rfind("phi:", 0) == 0) {
        packet = phi_packet(std::stoi(opt.state.substr(4)), cfg, opt.sigma);
    } else if (opt.state.rfind("file:", 0) == 0) {
        packet = import_packet(read_file(opt.state.substr(5)));
    } else {
        throw CLI::ValidationError("--state", "expected phi:M or file:PATH");
    }

    const auto evolved = from_spectrum(evolve(to_spectrum(packet), opt.time));

    fs::create_directories(opt.out_dir);
    write_file(fs::path(opt.out_dir) / "state_initial.txt", export_packet(packet));
    write_file(fs::path(opt.out_dir) / "state_final.txt", export_packet(evolved));
    write_file(fs::path(opt.out_dir) / "meta.txt",
               meta_text({{"model", "embedding"},
                          {"n", std::to_string(opt.n)},
                          {"length", std::to_string(length)},
                          {"speed", std::to_string(opt.speed)},
                          {"planck", std::to_string(opt.planck)},
                          {"sigma", std::to_string(opt.sigma)},
                          {"state", opt.state},
                          {"time", std::to_string(opt.time)}}));

    const auto norm_report = norms(evolved, 0.0);
    std::cout << "embedding run complete: N=" << opt.n << " t=" << opt.time
              << " continuous_norm=" << norm_report.continuous
              << " discrete_norm=" << norm_report.shifted_discrete << ", outputs in "
              << opt.out_dir << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite, unsigned long long seed) {
    std::vector<SuiteReport> reports;
    if (suite == "engine")
        reports.push_back(verify_engine(seed));
    else if (suite == "string")
        reports.push_back(verify_string(seed));
    else if (suite == "rss")
        reports.push_back(verify_rss(seed));
    else if (suite == "embedding")
        reports.push_back(verify_embedding(seed));
    else if (suite == "ledger")
        reports.push_back(verify_ledger(seed));
    else if (suite == "all")
        reports = verify_all(seed);
    else
        throw CLI::ValidationError("suite", "unknown suite " + suite);

    bool all_pass = true;
    for (const auto& report : reports) {
        std::cout << "suite " << report.suite << ":\n";
        for (const auto& r : report.results) {
            std::cout << "  [" << (r.pass ? "ok" : "FAIL") << "] " << r.name;
            if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
            std::cout << "\n";
            all_pass = all_pass && r.pass;
        }
    }
    std::cout << (all_pass ? "all properties hold" : "verification FAILED") << "\n";
    return all_pass ? kExitOk : kExitVerifyFail;
}

std::map<std::string, std::string> read_meta(const fs::path& dir) {
    std::map<std::string, std::string> kv;
    std::istringstream in(read_file(dir / "meta.txt"));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

// Columns of a simple CSV with a header row.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_export(const std::string& what, const std::string& run_dir, std::string out_file,
               int points) {
    const fs::path dir(run_dir);
    const auto meta = read_meta(dir);
    char buf[256];

    if (what == "mass-curve") {
        const auto rows = read_csv(dir / "mass.csv");
        std::ostringstream out;
        out << "t,M_over_E_max,M_over_E_white\n";
        for (size_t i = 1; i < rows.size(); ++i)
            out << rows[i][0] << "," << rows[i][5] << "," << rows[i][6] << "\n";
        if (out_file.empty()) out_file = (dir / "mass_curve.csv").string();
        write_file(out_file, out.str());
    } else if (what == "y-trajectory") {
        const auto rows = read_csv(dir / "mass.csv");
        std::vector<double> frac_max, frac_white;
        for (size_t i = 1; i < rows.size(); ++i) {
            frac_max.push_back(std::stod(rows[i][5]));
            frac_white.push_back(std::stod(rows[i][6]));
        }
        const double v_horiz = 1.0 / std::sqrt(2.0);
        const auto y_max = mass_to_trajectory(frac_max, v_horiz);
        const auto y_white = mass_to_trajectory(frac_white, v_horiz);
        std::ostringstream out;
        out << "t,y_max_mass,y_white_mass\n";
        for (size_t t = 0; t < y_max.size(); ++t) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t, y_max[t], y_white[t]);
            out << buf;
        }
        if (out_file.empty()) out_file = (dir / "y_trajectory.csv").string();
        write_file(out_file, out.str());
    } else if (what == "energy-series") {
        const auto rows = read_csv(dir / "reports.csv");
        std::vector<long long> changes;
        for (size_t i = 1; i < rows.size(); ++i) changes.push_back(std::stoll(rows[i][1]));
        const LedgerConfig cfg(parse_rat(meta.count("h") ? meta.at("h") : "1"),
                               parse_rat(meta.count("tau") ? meta.at("tau") : "1"));
        if (out_file.empty()) out_file = (dir / "energy_series.csv").string();
        write_file(out_file, export_energy_series_csv(ideal_kinetic_series(changes, cfg)));
    } else if (what == "wavepacket") {
        const auto packet = import_packet(read_file(dir / "state_final.txt"));
        std::ostringstream out;
        out << "x,re,im,prob\n";
        for (int i = 0; i < points; ++i) {
            const double x = packet.config.length * i / points;
            const Complex v = reconstruct(packet.amplitudes, x, packet.config);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x, v.real(), v.imag(),
                          std::norm(v));
            out << buf;
        }
        if (out_file.empty()) out_file = (dir / "wavepacket.csv").string();
        write_file(out_file, out.str());
    } else {
        throw CLI::ValidationError("--what",
                                   "expected mass-curve, y-trajectory, energy-series, or wavepacket");
    }
    std::cout << "exported " << what << " to " << out_file << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finlat: partitioned lattice dynamics, the bandlimited shift embedding, "
                 "the elastic string model, the RSS lattice gas, and state-change energy accounting"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string config_path;

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write its artifacts");
    run_cmd->add_option("--config", config_path, "key=value config file (flags override)");
    run_cmd->add_option("--model", opt.model, "shift|string|rss1d|rss2d|embedding")->required();
    run_cmd->add_option("--out", opt.out_dir, "output directory");
    run_cmd->add_option("--steps", opt.steps, "step count (model default when omitted)");
    run_cmd->add_option("--n", opt.n, "site/segment count");
    run_cmd->add_option("--bits", opt.bits, "shift register contents, e.g. 1000");
    run_cmd->add_option("--slopes", opt.slopes, "string slopes, e.g. /\\/\\");
    run_cmd->add_option("--ball", opt.ball, "RSS ball size n");
    run_cmd->add_option("--scenario", opt.scenario, "RSS scenario: head-on|column|miss");
    run_cmd->add_flag("--vertical", opt.vertical, "collide along a vertical axis");
    run_cmd->add_option("--epsilon", opt.epsilon, "RSS per-particle energy");
    run_cmd->add_option("--length", opt.length, "box length L (default N)");
    run_cmd->add_option("--speed", opt.speed, "propagation speed c");
    run_cmd->add_option("--planck", opt.planck, "Planck-constant analog h");
    run_cmd->add_option("--state", opt.state, "embedding state: phi:M or file:PATH");
    run_cmd->add_option("--time", opt.time, "embedding evolution time");
    run_cmd->add_option("--sigma", opt.sigma, "direction flag, +1 or -1");
    run_cmd->add_option("--ledger-h", opt.h_str, "ledger h (rational, e.g. 3/2)");
    run_cmd->add_option("--ledger-tau", opt.tau_str, "ledger tau (rational)");
    unsigned long long seed_value = 0;
    auto* seed_opt = run_cmd->add_option("--seed", seed_value, "seed for randomized initial states");

    std::string suite;
    unsigned long long verify_seed = 1;
    auto* verify_cmd = app.add_subcommand("verify", "run a module invariant suite");
    verify_cmd->add_option("suite", suite, "engine|string|rss|embedding|ledger|all")->required();
    verify_cmd->add_option("--seed", verify_seed, "seed for randomized checks");

    std::string what, run_dir, out_file;
    int points = 512;
    auto* export_cmd = app.add_subcommand("export", "derive plot data from run artifacts");
    export_cmd->add_option("--what", what, "mass-curve|y-trajectory|energy-series|wavepacket")
        ->required();
    export_cmd->add_option("--run", run_dir, "run directory")->required();
    export_cmd->add_option("--out", out_file, "output file (default inside the run directory)");
    export_cmd->add_option("--points", points, "sample count for wavepacket export");

    try {
        // Pre-scan for --config so file values become defaults.
        std::vector<std::string> args(argv + 1, argv + argc);
        for (size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config" && args[0] == "run") {
                const auto file_args = config_file_args(args[i + 1]);
                args.insert(args.begin() + 1, file_args.begin(), file_args.end());
                break;
            }
        }
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            if (*seed_opt) opt.seed = seed_value;
            if (opt.model == "shift") return cmd_run_shift(opt);
            if (opt.model == "string") return cmd_run_string(opt);
            if (opt.model == "rss2d") return cmd_run_rss2d(opt);
            if (opt.model == "rss1d") return cmd_run_rss1d(opt);
            if (opt.model == "embedding") return cmd_run_embedding(opt);
            std::cerr << "error: unknown model '" << opt.model << "'\n";
            return kExitUsage;
        }
        if (verify_cmd->parsed()) return cmd_verify(suite, verify_seed);
        if (export_cmd->parsed()) return cmd_export(what, run_dir, out_file, points);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
