// gittins-exp: scenario simulation, index-table queries and oracle validation.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "gittins_exp/gittins_exp.hpp"

namespace fs = std::filesystem;
using namespace gittins_exp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path prepare_output(const fs::path& dir, const std::string& name, bool overwrite) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
    const fs::path file = dir / name;
    if (fs::exists(file) && !overwrite) {
        throw InvalidInput("'" + file.string() + "' exists; pass --overwrite to replace it");
    }
    return file;
}

// Shortest text that round-trips, so stored table values print as written.
std::string exact(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string describe_knot(const IndexEntry& e) {
    return "n=" + std::to_string(e.n) + " (" + exact(e.value) + ")";
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed, int workers, bool overwrite) {
    RunConfig rc;
    try {
        rc = load_config(config_path);
    } catch (const ConfigError& e) {
        throw InvalidInput(config_path.string() + ": " + e.what());
    }
    if (seed) rc.grid.seed = *seed;
    const fs::path table_path = rc.table_path.value_or(GITTINS_EXP_DEFAULT_TABLE);
    const IndexTable table = IndexTable::load(table_path);
    for (const PolicySpec& p : rc.grid.designs) {
        if (p.is_gittins() && !table.has_discount(p.discount)) {
            throw InvalidInput("discount: " + format_g6(p.discount) + " is not tabulated in " +
                               table_path.string());
        }
    }
    const fs::path out_file =
        prepare_output(out_dir, config_path.stem().string() + "_results.csv", overwrite);

    std::vector<CellResult> cells;
    try {
        cells = run_scenario_grid(rc.grid, table, workers);
    } catch (const CellError& e) {
        throw InvalidInput(e.what());
    }

    std::ostringstream csv;
    write_results_csv(csv, cells);
    std::ofstream os(out_file, std::ios::binary);
    os << csv.str();
    if (!os) throw std::runtime_error("failed writing '" + out_file.string() + "'");

    std::printf("%4s  %-20s %-6s %8s %8s %9s %6s\n", "id", "means", "design", "power", "rho_sup",
                "eto_pct", "min_n");
    for (const CellResult& c : cells) {
        std::string means;
        for (double m : c.config.true_means) means += (means.empty() ? "" : ",") + format_g6(m);
        if (!c.oc) {
            std::printf("%4d  %-20s %-6s  error: %s\n", c.scenario_id, means.c_str(),
                        c.config.policy.label().c_str(), c.error.c_str());
            continue;
        }
        std::printf("%4d  %-20s %-6s %8.4f %8.4f %9.3f %6d\n", c.scenario_id, means.c_str(),
                    c.config.policy.label().c_str(), c.oc->power, c.oc->rho_superior,
                    c.oc->eto_pct_increase, c.oc->min_arm_count);
    }
    std::printf("wrote %zu rows to %s\n", cells.size(), out_file.string().c_str());
    return kExitOk;
}

int cmd_table(const fs::path& table_path, int n, double discount, double mu) {
    const IndexTable table = IndexTable::load(table_path);
    if (!(mu >= 0.0)) throw InvalidInput("--mu must be non-negative");
    const IndexLookup hit = table.lookup(n, discount);
    std::cout << "v(" << n << ", " << exact(discount) << ", 1) = " << exact(hit.value);
    if (hit.exact) {
        std::cout << "  [exact]\n";
    } else if (hit.upper) {
        std::cout << "  [interpolated between " << describe_knot(hit.lower) << " and "
                  << describe_knot(*hit.upper) << "]\n";
    } else {
        std::cout << "  [interpolated between " << describe_knot(hit.lower)
                  << " and the n -> infinity limit 1]\n";
    }
    std::cout << "mu * v = " << exact(mu) << " * " << exact(hit.value) << " = "
              << exact(mu * hit.value) << '\n';
    return kExitOk;
}

int cmd_oracle(const fs::path& table_path, double discount, int n_max, double rel_tol,
               const fs::path& out_dir, bool overwrite) {
    if (n_max < 2) throw InvalidInput("--n-max must be at least 2");
    if (!(rel_tol >= 0.0)) throw InvalidInput("--rel-tol must be non-negative");
    const IndexTable table = IndexTable::load(table_path);
    (void)table.curve(discount);  // throws listing the tabulated discounts
    const ValidationReport rep =
        validate_table(table, OracleConfig::for_discount(discount), rel_tol, n_max);
    const fs::path out_file =
        prepare_output(out_dir, "oracle_validation_d" + format_g6(discount) + ".csv", overwrite);
    std::ofstream os(out_file);
    rep.write_csv(os);
    if (!os) throw std::runtime_error("failed writing '" + out_file.string() + "'");
    rep.write_text(std::cout);
    if (!rep.passed) {
        std::cout << "offending entry: discount " << format_g6(discount) << ", n = " << rep.worst.n
                  << '\n';
    }
    std::cout << "wrote " << out_file.string() << '\n';
    return rep.passed ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gittins-index allocation for experiments with exponential rewards"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run a scenario grid and write the results CSV");
    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool overwrite = false;
    sim->add_option("--config", config_path, "Scenario configuration file")->required();
    sim->add_option("--out", out_dir, "Output directory (created if absent)");
    sim->add_option("--seed", seed, "Root seed, overrides the config");
    sim->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sim->add_flag("--overwrite", overwrite, "Replace an existing results file");

    auto* tab = app.add_subcommand("table", "Look up v(n, d, 1) and mu * v(n, d, 1)");
    std::string table_path = GITTINS_EXP_DEFAULT_TABLE;
    int n = 0;
    double discount = 0.0, mu = 1.0;
    tab->add_option("--table", table_path, "Index table CSV");
    tab->add_option("--n", n, "Pseudo-observation count")->required();
    tab->add_option("--discount", discount, "Discount factor")->required();
    tab->add_option("--mu", mu, "Posterior mean");

    auto* orc = app.add_subcommand("oracle", "Validate the index table against the DP oracle");
    int n_max = 30;
    double rel_tol = 0.02;
    orc->add_option("--table", table_path, "Index table CSV");
    orc->add_option("--discount", discount, "Tabulated discount factor")->required();
    orc->add_option("--n-max", n_max, "Largest n to compare");
    orc->add_option("--rel-tol", rel_tol, "Relative tolerance");
    orc->add_option("--out", out_dir, "Output directory for the deviation CSV");
    orc->add_flag("--overwrite", overwrite, "Replace an existing validation file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*sim) return cmd_simulate(config_path, out_dir, seed, workers, overwrite);
        if (*tab) return cmd_table(table_path, n, discount, mu);
        if (*orc) return cmd_oracle(table_path, discount, n_max, rel_tol, out_dir, overwrite);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const TableError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
