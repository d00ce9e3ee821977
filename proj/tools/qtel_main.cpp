// qtel: batch experiment runner for the teleportation library.
//
// Subcommands
//   verify       run every module's invariant suite, emit check CSV
//   deteriorate  noise-deterioration sweep over an eta grid
//   recover      DE recovery from random populations (per-iteration traces)
//   stabilize    DE evolution with periodic control shocks
//   eval         evaluate / round-trip a protocol file
//
// Exit codes: 0 success, 1 check or criterion failure, 2 bad configuration.
// For a fixed configuration (including seed) the CSV output is byte-identical
// regardless of --threads; the thread count is therefore not part of the
// trailing config comment.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qteleport/bloch.hpp"
#include "qteleport/montecarlo.hpp"
#include "qteleport/stabilizer.hpp"
#include "qteleport/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitBadConfig = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string fmt(long x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::uint64_t x) { return std::to_string(x); }

// key=value pairs for the trailing "# config:" comment line
class ConfigLine {
public:
    explicit ConfigLine(const std::string& command) { add("command", command); }
    template <typename T>
    void add(const std::string& key, const T& value) {
        line_ += " " + key + "=" + fmt(value);
    }
    void add(const std::string& key, const std::string& value) {
        line_ += " " + key + "=" + value;
    }
    std::string str() const { return "# config:" + line_; }

private:
    std::string line_;
};

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);  // binary: no newline surprises
            if (!file_) throw ConfigError("cannot open output file: " + path);
        }
    }
    std::ostream& out() { return path_.empty() ? std::cout : file_; }
    void finish(const ConfigLine& config) {
        out() << config.str() << "\n";
        if (!path_.empty()) {
            file_.close();
            if (!file_) throw ConfigError("failed writing output file: " + path_);
        }
    }

private:
    std::string path_;
    std::ofstream file_;
};

double resolve_gamma(const std::optional<double>& gamma,
                     const std::string& gamma_name, double fallback) {
    if (gamma && !gamma_name.empty())
        throw ConfigError("--gamma and --gamma-name are mutually exclusive");
    if (gamma) return *gamma;
    if (gamma_name == "c") return 1.0 / 3.0;
    if (gamma_name == "bv") return 1.0 / std::sqrt(2.0);
    if (gamma_name == "one") return 1.0;
    if (!gamma_name.empty())
        throw ConfigError("unknown --gamma-name (use c, bv or one): " + gamma_name);
    return fallback;
}

std::vector<double> parse_eta_grid(const std::string& text) {
    // "a:b:n" -> n equally spaced points from a to b inclusive
    double a = 0.0, b = 0.0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !in.eof())
        throw ConfigError("--eta-grid must have the form a:b:n, got: " + text);
    if (n < 1) throw ConfigError("--eta-grid needs n >= 1");
    if (n == 1 && a != b) throw ConfigError("--eta-grid with n=1 needs a == b");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] =
            n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    for (double e : grid)
        if (!(e >= 0.0 && e <= 1.0))
            throw ConfigError("eta values must lie in [0, 1], got " + fmt(e));
    return grid;
}

std::string grid_str(const std::vector<double>& grid) {
    std::string s;
    for (std::size_t i = 0; i < grid.size(); ++i)
        s += (i ? "," : "") + fmt(grid[i]);
    return s;
}

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---- subcommand payloads ---------------------------------------------------

int run_verify(std::uint64_t seed, int threads, bool inject_bad,
               const std::string& out_path) {
    qtel::VerifyOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    opt.inject_bad_tolerance = inject_bad;
    const std::vector<qtel::CheckRow> rows = qtel::run_all_checks(opt);

    CsvWriter csv(out_path);
    csv.out() << "check_name,status,value,bound\n";
    long failures = 0;
    for (const qtel::CheckRow& r : rows) {
        if (!r.pass) ++failures;
        csv.out() << r.name << ',' << (r.pass ? "pass" : "fail") << ','
                  << fmt(r.value) << ',' << fmt(r.bound) << "\n";
    }
    ConfigLine config("verify");
    config.add("seed", seed);
    config.add("inject_bad_tolerance", std::string(inject_bad ? "true" : "false"));
    config.add("checks", static_cast<long>(rows.size()));
    config.add("failures", failures);
    csv.finish(config);
    std::cerr << "verify: " << rows.size() - static_cast<std::size_t>(failures)
              << "/" << rows.size() << " checks passed\n";
    return failures == 0 ? kExitOk : kExitCheckFailure;
}

int run_deteriorate(int d, double gamma, const std::vector<double>& grid,
                    long trials, long mc_samples, std::uint64_t seed,
                    int threads, const std::string& out_path) {
    const qtel::Channel ch = qtel::make_channel(d, gamma);
    qtel::MCConfig mc;
    mc.samples = mc_samples;
    mc.seed = seed;
    const auto rows = qtel::deterioration_experiment(ch, grid, trials, mc, threads);

    CsvWriter csv(out_path);
    csv.out() << "eta,mean_F,std_F,mean_D,std_D,trials,seed\n";
    for (const qtel::DeteriorationRow& r : rows)
        csv.out() << fmt(r.eta) << ',' << fmt(r.mean_F) << ',' << fmt(r.std_F)
                  << ',' << fmt(r.mean_D) << ',' << fmt(r.std_D) << ','
                  << fmt(r.trials) << ',' << fmt(r.seed) << "\n";
    ConfigLine config("deteriorate");
    config.add("d", d);
    config.add("gamma", gamma);
    config.add("eta_grid", grid_str(grid));
    config.add("trials", trials);
    config.add("mc_samples", mc_samples);
    config.add("seed", seed);
    csv.finish(config);
    return kExitOk;
}

void write_trace_rows(CsvWriter& csv, const std::vector<qtel::RecoverTrace>& traces) {
    csv.out() << "run_id,iteration,best_F,best_D,shock_flag,gamma,seed\n";
    int run_id = 0;
    for (const qtel::RecoverTrace& tr : traces) {
        for (const qtel::GenRecord& rec : tr.records)
            csv.out() << run_id << ',' << rec.iteration << ',' << fmt(rec.best_F)
                      << ',' << fmt(rec.best_D) << ',' << (rec.shock ? 1 : 0)
                      << ',' << fmt(tr.gamma) << ',' << fmt(tr.seed) << "\n";
        ++run_id;
    }
}

int run_recover(int d, const std::vector<double>& gammas, int npop, double weight,
                double crossover, int iters, int repeats, std::uint64_t seed,
                int threads, const std::string& out_path) {
    std::vector<qtel::Channel> channels;
    for (double g : gammas) channels.push_back(qtel::make_channel(d, g));
    const qtel::DEConfig cfg = qtel::make_de_config(npop, weight, crossover, iters, seed);
    const auto traces = qtel::recover_experiment(channels, cfg, repeats, threads);

    CsvWriter csv(out_path);
    write_trace_rows(csv, traces);
    ConfigLine config("recover");
    config.add("d", d);
    config.add("gamma", grid_str(gammas));
    config.add("npop", npop);
    config.add("weight", weight);
    config.add("crossover", crossover);
    config.add("iters", iters);
    config.add("trials", repeats);
    config.add("seed", seed);
    csv.finish(config);
    return kExitOk;
}

int run_stabilize(int d, double gamma, double eta, int npop, double weight,
                  double crossover, int iters, int shock_period, int repeats,
                  std::uint64_t seed, int threads, const std::string& out_path) {
    if (shock_period != 10 && shock_period != 50)
        throw ConfigError("--shock-period must be 10 or 50");
    if (iters < shock_period || iters % shock_period != 0)
        throw ConfigError("--iters must be a positive multiple of --shock-period");
    const int cycles = iters / shock_period;
    const qtel::Channel ch = qtel::make_channel(d, gamma);
    const qtel::DEConfig cfg = qtel::make_de_config(npop, weight, crossover, iters, seed);
    const qtel::NoiseModel noise = qtel::make_noise(eta);
    const auto traces = qtel::realtime_stabilization(ch, cfg, shock_period, noise,
                                                     cycles, repeats, threads);

    CsvWriter csv(out_path);
    write_trace_rows(csv, traces);
    ConfigLine config("stabilize");
    config.add("d", d);
    config.add("gamma", gamma);
    config.add("eta", eta);
    config.add("npop", npop);
    config.add("weight", weight);
    config.add("crossover", crossover);
    config.add("iters", iters);
    config.add("shock_period", shock_period);
    config.add("trials", repeats);
    config.add("seed", seed);
    csv.finish(config);
    return kExitOk;
}

int run_eval(const std::string& in_path, bool use_optimal, int d, double gamma,
             long mc_samples, std::uint64_t seed, int threads,
             const std::string& save_path, const std::string& out_path) {
    if (in_path.empty() == !use_optimal)
        throw ConfigError("eval needs exactly one of --in or --optimal");
    const qtel::Protocol proto = [&] {
        if (use_optimal) return qtel::optimal_protocol(d);
        try {
            return qtel::load_protocol(in_path);
        } catch (const std::runtime_error& e) {
            // an unreadable or malformed protocol file is a configuration
            // problem, not a check failure
            throw ConfigError(e.what());
        }
    }();
    const qtel::Channel ch = qtel::make_channel(proto.d, gamma);

    qtel::FDReport rep;
    rep.F = qtel::analytic_F(proto, ch);
    if (proto.d == 2) {
        rep.D = qtel::qubit_D_analytic(proto, ch).D;
    } else if (mc_samples > 0) {
        qtel::MCConfig mc;
        mc.samples = mc_samples;
        mc.seed = seed;
        rep = qtel::mc_estimate_FD(proto, ch, mc, threads);
    } else {
        rep.D = std::numeric_limits<double>::quiet_NaN();  // no analytic D for d > 2
    }

    if (!save_path.empty()) qtel::save_protocol(proto, save_path);

    CsvWriter csv(out_path);
    csv.out() << "d,gamma,F,D,method,samples,stderr_F,stderr_D\n";
    csv.out() << proto.d << ',' << fmt(gamma) << ',' << fmt(rep.F) << ','
              << fmt(rep.D) << ','
              << (rep.method == qtel::FDReport::Method::analytic ? "analytic"
                                                                 : "monte_carlo")
              << ',' << fmt(rep.samples) << ',' << fmt(rep.stderr_F) << ','
              << fmt(rep.stderr_D) << "\n";
    ConfigLine config("eval");
    config.add("d", proto.d);
    config.add("gamma", gamma);
    config.add("mc_samples", mc_samples);
    config.add("seed", seed);
    if (!in_path.empty()) config.add("in", in_path);
    csv.finish(config);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy qudit teleportation: experiments and invariant suites"};
    app.require_subcommand(1);

    int threads = default_threads();
    app.add_option("--threads", threads, "worker threads (does not affect results)")
        ->check(CLI::PositiveNumber);
    // let --threads appear after the subcommand name as well
    app.fallthrough();

    // verify
    auto* verify = app.add_subcommand("verify", "run all invariant suites");
    std::uint64_t v_seed = 12345;
    bool v_inject = false;
    std::string v_out;
    verify->add_option("--seed", v_seed, "rng seed for the randomized checks");
    verify->add_flag("--inject-bad-tolerance", v_inject,
                     "testing hook: add one impossible check");
    verify->add_option("--out", v_out, "CSV path (default stdout)");

    // deteriorate
    auto* det = app.add_subcommand("deteriorate", "noise-deterioration sweep (eta grid)");
    int det_d = 2;
    std::optional<double> det_gamma;
    std::string det_gamma_name;
    std::string det_grid_text;
    std::optional<double> det_eta;
    long det_trials = 1000;
    bool det_paper_scale = false;
    long det_mc_samples = 100000;
    std::uint64_t det_seed = 0;
    std::string det_out;
    det->add_option("--d", det_d, "qudit dimension")->check(CLI::Range(2, 64));
    det->add_option("--gamma", det_gamma, "channel visibility in [0,1]");
    det->add_option("--gamma-name", det_gamma_name, "named gamma: c (1/3), bv (1/sqrt 2), one");
    det->add_option("--eta-grid", det_grid_text, "grid a:b:n (n points from a to b)");
    det->add_option("--eta", det_eta, "single eta value (alternative to --eta-grid)");
    det->add_option("--trials", det_trials, "perturbations per eta")->check(CLI::PositiveNumber);
    det->add_flag("--paper-scale", det_paper_scale, "use the full-scale 10^4 trials");
    det->add_option("--mc-samples", det_mc_samples, "MC samples per D estimate (d > 2)")
        ->check(CLI::PositiveNumber);
    det->add_option("--seed", det_seed, "rng seed")->required();
    det->add_option("--out", det_out, "CSV path (default stdout)");

    // recover
    auto* rec = app.add_subcommand("recover", "DE recovery from random populations");
    int rec_d = 2;
    std::optional<double> rec_gamma;
    std::string rec_gamma_name;
    int rec_npop = 100, rec_iters = 1000, rec_repeats = 50;
    double rec_weight = 0.5, rec_crossover = 0.1;
    std::uint64_t rec_seed = 0;
    std::string rec_out;
    rec->add_option("--d", rec_d, "qudit dimension")->check(CLI::Range(2, 64));
    rec->add_option("--gamma", rec_gamma, "channel visibility (default: the three named values)");
    rec->add_option("--gamma-name", rec_gamma_name, "named gamma: c, bv, one");
    rec->add_option("--npop", rec_npop, "population size");
    rec->add_option("--weight", rec_weight, "differential weight W");
    rec->add_option("--crossover", rec_crossover, "crossover rate C_r");
    rec->add_option("--iters", rec_iters, "generations")->check(CLI::NonNegativeNumber);
    rec->add_option("--trials", rec_repeats, "independent repeats per gamma")
        ->check(CLI::PositiveNumber);
    rec->add_option("--seed", rec_seed, "rng seed")->required();
    rec->add_option("--out", rec_out, "CSV path (default stdout)");

    // stabilize
    auto* stab = app.add_subcommand("stabilize", "DE evolution with periodic shocks");
    int stab_d = 2;
    std::optional<double> stab_gamma;
    std::string stab_gamma_name;
    double stab_eta = 1.0;
    int stab_npop = 100, stab_iters = 1000, stab_period = 50, stab_repeats = 20;
    double stab_weight = 0.5, stab_crossover = 0.1;
    std::uint64_t stab_seed = 0;
    std::string stab_out;
    stab->add_option("--d", stab_d, "qudit dimension")->check(CLI::Range(2, 64));
    stab->add_option("--gamma", stab_gamma, "channel visibility in [0,1]");
    stab->add_option("--gamma-name", stab_gamma_name, "named gamma: c, bv, one");
    stab->add_option("--eta", stab_eta, "shock magnitude in [0,1]");
    stab->add_option("--npop", stab_npop, "population size");
    stab->add_option("--weight", stab_weight, "differential weight W");
    stab->add_option("--crossover", stab_crossover, "crossover rate C_r");
    stab->add_option("--iters", stab_iters, "total generations (multiple of the period)");
    stab->add_option("--shock-period", stab_period, "generations between shocks (10 or 50)");
    stab->add_option("--trials", stab_repeats, "independent repeats")
        ->check(CLI::PositiveNumber);
    stab->add_option("--seed", stab_seed, "rng seed")->required();
    stab->add_option("--out", stab_out, "CSV path (default stdout)");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate / round-trip a protocol file");
    std::string ev_in;
    bool ev_optimal = false;
    int ev_d = 2;
    std::optional<double> ev_gamma;
    std::string ev_gamma_name;
    long ev_mc_samples = 0;
    std::uint64_t ev_seed = 0;
    std::string ev_save, ev_out;
    ev->add_option("--in", ev_in, "protocol file to evaluate");
    ev->add_flag("--optimal", ev_optimal, "evaluate the optimal protocol instead of a file");
    ev->add_option("--d", ev_d, "dimension for --optimal")->check(CLI::Range(2, 64));
    ev->add_option("--gamma", ev_gamma, "channel visibility in [0,1]");
    ev->add_option("--gamma-name", ev_gamma_name, "named gamma: c, bv, one");
    ev->add_option("--mc-samples", ev_mc_samples, "MC samples for D when d > 2 (0: skip)");
    ev->add_option("--seed", ev_seed, "rng seed for MC");
    ev->add_option("--save", ev_save, "write the protocol back to this path");
    ev->add_option("--out", ev_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadConfig;
    }

    try {
        if (*verify) return run_verify(v_seed, threads, v_inject, v_out);
        if (*det) {
            if (det_paper_scale && det->count("--trials") == 0) det_trials = 10000;
            std::vector<double> grid;
            if (!det_grid_text.empty() && det_eta)
                throw ConfigError("--eta-grid and --eta are mutually exclusive");
            if (!det_grid_text.empty())
                grid = parse_eta_grid(det_grid_text);
            else if (det_eta)
                grid = {*det_eta};
            else
                throw ConfigError("deteriorate needs --eta-grid (or --eta)");
            return run_deteriorate(det_d, resolve_gamma(det_gamma, det_gamma_name, 1.0),
                                   grid, det_trials, det_mc_samples, det_seed, threads,
                                   det_out);
        }
        if (*rec) {
            std::vector<double> gammas;
            if (rec_gamma || !rec_gamma_name.empty())
                gammas = {resolve_gamma(rec_gamma, rec_gamma_name, 1.0)};
            else
                gammas = {1.0 / 3.0, 1.0 / std::sqrt(2.0), 1.0};
            return run_recover(rec_d, gammas, rec_npop, rec_weight, rec_crossover,
                               rec_iters, rec_repeats, rec_seed, threads, rec_out);
        }
        if (*stab)
            return run_stabilize(stab_d, resolve_gamma(stab_gamma, stab_gamma_name, 1.0),
                                 stab_eta, stab_npop, stab_weight, stab_crossover,
                                 stab_iters, stab_period, stab_repeats, stab_seed,
                                 threads, stab_out);
        if (*ev)
            return run_eval(ev_in, ev_optimal, ev_d,
                            resolve_gamma(ev_gamma, ev_gamma_name, 1.0), ev_mc_samples,
                            ev_seed, threads, ev_save, ev_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitBadConfig;
}
