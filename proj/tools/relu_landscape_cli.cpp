// Command-line front end: evaluate errors, reproduce the reference
// experiments, enumerate arrangement cells, train networks, run the
// kappa-improvement construction, and dump the pointwise minimizer.
//
// Exit codes: 0 success, 1 tolerance failure in an experiment report,
// 2 input/schema error. RELU_LANDSCAPE_THREADS caps the worker count.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "relu_landscape/experiments.hpp"
#include "relu_landscape/geometry.hpp"
#include "relu_landscape/measures.hpp"
#include "relu_landscape/responses.hpp"
#include "relu_landscape/serialization.hpp"
#include "relu_landscape/training.hpp"

namespace rl = relu_landscape;
namespace fs = std::filesystem;

namespace {

rl::QuadratureGrid make_grid(const rl::Box& box, std::size_t per_axis, const std::string& scheme) {
    if (scheme == "quasi") {
        std::size_t count = 1;
        for (std::size_t i = 0; i < box.dim(); ++i) count *= per_axis;
        return rl::quasi_random_grid(box, count);
    }
    if (scheme == "tensor") return rl::tensor_midpoint_grid(box, per_axis);
    if (!scheme.empty()) throw std::runtime_error("unknown grid scheme: " + scheme);
    return per_axis == 0 ? rl::default_grid(box) : rl::tensor_midpoint_grid(box, per_axis);
}

std::string grid_label(const rl::QuadratureGrid& grid) {
    std::ostringstream out;
    out << (grid.scheme == rl::QuadratureScheme::tensor_midpoint ? "tensor-midpoint"
                                                                 : "quasi-random")
        << ", " << grid.size() << " nodes";
    return out.str();
}

std::string find_config(const std::string& explicit_path, const std::string& filename) {
    if (!explicit_path.empty()) return explicit_path;
    std::vector<fs::path> candidates;
    if (const char* env = std::getenv("RELU_LANDSCAPE_CONFIG_DIR"))
        candidates.emplace_back(fs::path(env) / filename);
    candidates.emplace_back(fs::path("configs") / filename);
    std::error_code ec;
    const fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) candidates.emplace_back(self.parent_path().parent_path() / "configs" / filename);
    for (const fs::path& p : candidates)
        if (fs::exists(p)) return p.string();
    throw std::runtime_error("config file " + filename +
                             " not found (use --config or RELU_LANDSCAPE_CONFIG_DIR)");
}

std::vector<rl::HalfSpace> response_halfspaces(const rl::LoadedResponse& loaded) {
    std::vector<rl::HalfSpace> sides;
    if (const auto* w = std::get_if<rl::NetworkConfig>(&loaded)) {
        for (const rl::EffectiveNeuron& n : rl::effective_tuple(*w).neurons)
            if (n.kink != 0.0) sides.push_back(rl::HalfSpace{n.normal, n.offset});
    } else {
        for (const rl::ResponseTerm& t : std::get<rl::GeneralizedResponse>(loaded).terms)
            sides.push_back(t.halfspace);
    }
    return sides;
}

void print_report(const rl::ExperimentReport& report) {
    std::cout << "experiment: " << report.experiment << "\n";
    for (const auto& [name, value] : report.scalars)
        std::cout << "  " << name << " = " << rl::format_double(value) << "\n";
    for (const std::string& artifact : report.artifacts)
        std::cout << "  wrote " << artifact << "\n";
    for (const rl::CheckResult& c : report.checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
                  << " (value = " << rl::format_double(c.value) << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loss-landscape toolkit for shallow residual ReLU networks"};
    app.require_subcommand(1);

    // eval
    std::string eval_instance, eval_response;
    std::size_t eval_grid = 0;
    std::string eval_scheme;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate err of a response on an instance");
    eval_cmd->add_option("instance", eval_instance, "instance JSON file")->required();
    eval_cmd->add_option("response", eval_response, "network or response JSON file")->required();
    eval_cmd->add_option("--grid", eval_grid, "tensor points per axis (0 = default)");
    eval_cmd->add_option("--grid-scheme", eval_scheme, "tensor | quasi");

    // reproduce
    std::string rep_experiment, rep_config, rep_out = "out";
    std::uint64_t rep_seed = 0;
    auto* rep_cmd = app.add_subcommand("reproduce", "Run a shipped experiment");
    rep_cmd->add_option("experiment", rep_experiment, "ex45 | ex48 | improve-demo")->required();
    rep_cmd->add_option("--config", rep_config, "config JSON (default: shipped configs/)");
    rep_cmd->add_option("--seed", rep_seed, "random seed");
    rep_cmd->add_option("--out", rep_out, "output directory");

    // cells
    std::string cells_response, cells_lo, cells_hi;
    auto* cells_cmd = app.add_subcommand("cells", "Enumerate arrangement cells of a response");
    cells_cmd->add_option("response", cells_response, "network or response JSON file")->required();
    cells_cmd->add_option("--lo", cells_lo, "box lower corner, comma separated")->required();
    cells_cmd->add_option("--hi", cells_hi, "box upper corner, comma separated")->required();

    // train
    std::string train_instance, train_out = "train";
    std::size_t train_d = 0;
    int train_restarts = 1, train_steps = 1000;
    double train_step_size = 0.05, train_step_decay = 0.0, train_diverge = 50.0;
    std::uint64_t train_seed = 0;
    std::size_t train_grid = 0;
    auto* train_cmd = app.add_subcommand("train", "Subgradient descent / multistart search");
    train_cmd->add_option("instance", train_instance, "instance JSON file")->required();
    train_cmd->add_option("--d", train_d, "hidden width")->required();
    train_cmd->add_option("--restarts", train_restarts, "random restarts (>= 1)");
    train_cmd->add_option("--steps", train_steps, "descent iterations per restart");
    train_cmd->add_option("--step-size", train_step_size, "step size base");
    train_cmd->add_option("--step-decay", train_step_decay, "step size decay");
    train_cmd->add_option("--seed", train_seed, "random seed");
    train_cmd->add_option("--grid", train_grid, "tensor points per axis (0 = default)");
    train_cmd->add_option("--diverge-threshold", train_diverge, "sup-norm divergence threshold");
    train_cmd->add_option("--out", train_out, "output prefix (.csv and .json)");

    // improve
    std::string imp_instance, imp_response, imp_kappas = "25,50,100,200", imp_out;
    int imp_term = -1, imp_levels = 30;
    std::size_t imp_grid = 128;
    auto* imp_cmd = app.add_subcommand("improve", "Kappa-improvement of a discontinuous term");
    imp_cmd->add_option("instance", imp_instance, "instance JSON file")->required();
    imp_cmd->add_option("response", imp_response, "response JSON file")->required();
    imp_cmd->add_option("--term", imp_term, "term index (default: last)");
    imp_cmd->add_option("--kappas", imp_kappas, "comma-separated kappa ladder");
    imp_cmd->add_option("--grid", imp_grid, "base tensor points per axis");
    imp_cmd->add_option("--graded-levels", imp_levels, "refinement levels toward the gate");
    imp_cmd->add_option("--out", imp_out, "CSV output path");

    // minimizer
    std::string min_instance, min_out;
    std::size_t min_per_axis = 64;
    auto* min_cmd = app.add_subcommand("minimizer", "Dump the pointwise minimizer m on a grid");
    min_cmd->add_option("instance", min_instance, "instance JSON file")->required();
    min_cmd->add_option("--per-axis", min_per_axis, "grid points per axis");
    min_cmd->add_option("--out", min_out, "CSV output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval_cmd->parsed()) {
            const rl::ProblemInstance inst = rl::instance_from_json(rl::read_file(eval_instance));
            const rl::LoadedResponse loaded =
                rl::response_from_json(rl::read_file(eval_response));
            if (rl::loaded_d_in(loaded) != inst.box.dim())
                throw std::runtime_error("response d_in does not match instance d_in");
            const rl::QuadratureGrid grid = make_grid(inst.box, eval_grid, eval_scheme);
            const double err = rl::eval_error(
                [&](const rl::Vec& x) { return rl::eval_loaded(loaded, x); }, inst, grid);
            std::cout << "err = " << rl::format_double(err) << " (" << grid_label(grid) << ")\n";
            return 0;
        }

        if (rep_cmd->parsed()) {
            rl::ExperimentReport report;
            if (rep_experiment == "ex48") {
                report = rl::run_ex48(rl::read_file(find_config(rep_config, "ex48.json")),
                                      rep_seed, rep_out);
            } else if (rep_experiment == "ex45") {
                report = rl::run_ex45(rl::read_file(find_config(rep_config, "ex45.json")),
                                      rep_seed, rep_out);
            } else if (rep_experiment == "improve-demo") {
                report = rl::run_improve_demo(
                    rl::read_file(find_config(rep_config, "improve_demo.json")), rep_seed,
                    rep_out);
            } else {
                throw std::runtime_error("unknown experiment: " + rep_experiment);
            }
            print_report(report);
            return report.passed() ? 0 : 1;
        }

        if (cells_cmd->parsed()) {
            const rl::LoadedResponse loaded =
                rl::response_from_json(rl::read_file(cells_response));
            rl::Box box;
            {
                std::istringstream lo_in(cells_lo), hi_in(cells_hi);
                std::string tok;
                while (std::getline(lo_in, tok, ',')) box.lo.push_back(std::stod(tok));
                while (std::getline(hi_in, tok, ',')) box.hi.push_back(std::stod(tok));
            }
            if (box.dim() != rl::loaded_d_in(loaded))
                throw std::runtime_error("box dimension does not match the response");
            const std::vector<rl::HalfSpace> sides = response_halfspaces(loaded);
            const std::vector<rl::CellIndex> cells = rl::enumerate_cells(sides, box);
            std::cout << cells.size() << " cells from " << sides.size() << " half-spaces\n";
            std::cout << "included;witness\n";
            for (const rl::CellIndex& cell : cells) {
                std::cout << "{";
                for (std::size_t i = 0; i < cell.included.size(); ++i)
                    std::cout << (i ? "," : "") << cell.included[i] + 1;
                std::cout << "};(";
                for (std::size_t i = 0; i < cell.witness.size(); ++i)
                    std::cout << (i ? "," : "") << rl::format_double(cell.witness[i]);
                std::cout << ")\n";
            }
            return 0;
        }

        if (train_cmd->parsed()) {
            const rl::ProblemInstance inst = rl::instance_from_json(rl::read_file(train_instance));
            const rl::QuadratureGrid grid = make_grid(inst.box, train_grid, "");
            rl::TrainConfig config;
            config.schedule = {train_step_size, train_step_decay};
            config.budget = train_steps;
            config.seed = train_seed;
            config.diverge_norm_threshold = train_diverge;
            const rl::SearchResult best = rl::multistart_min(inst, inst.box.dim(), train_d,
                                                             train_restarts, config, grid);
            // Re-run the winning restart to emit its full descent trace.
            const rl::NetworkConfig w0 =
                rl::random_init(inst.box.dim(), train_d, config.seed, best.restart);
            const rl::TrainRecord rec = rl::subgradient_descent(inst, w0, config, grid);
            rl::write_file(train_out + ".csv", rl::train_record_csv(rec));
            rl::write_file(train_out + ".json", rl::train_metadata_json(config, grid, rec));
            rl::write_file(train_out + "_best.json", rl::to_json(best.config));
            std::cout << "best err = " << rl::format_double(best.err) << " (restart "
                      << best.restart << ", " << grid_label(grid) << ")\n"
                      << "wrote " << train_out << ".csv, " << train_out << ".json, " << train_out
                      << "_best.json\n";
            return 0;
        }

        if (imp_cmd->parsed()) {
            const rl::ProblemInstance inst = rl::instance_from_json(rl::read_file(imp_instance));
            rl::GeneralizedResponse response =
                rl::genresponse_from_json(rl::read_file(imp_response));
            if (response.d_in() != inst.box.dim())
                throw std::runtime_error("response d_in does not match instance d_in");
            const std::size_t term =
                imp_term < 0 ? response.terms.size() - 1 : static_cast<std::size_t>(imp_term);
            const rl::NormalizedResponse normalized = rl::normalize_term(response, term);

            std::vector<rl::Vec> edges(inst.box.dim());
            edges[0] = rl::graded_axis_edges(inst.box.lo[0], inst.box.hi[0], imp_grid, 0.0,
                                             imp_levels);
            for (std::size_t i = 1; i < edges.size(); ++i)
                edges[i] = rl::graded_axis_edges(inst.box.lo[i], inst.box.hi[i], imp_grid, 0.0, 0);
            const rl::QuadratureGrid grid = rl::tensor_midpoint_grid(inst.box, edges);

            const double err_base = rl::eval_error(normalized.response, inst, grid);
            std::ostringstream csv;
            csv << "kappa,err_kappa,diff,scaled_diff\n";
            std::cout << "err(R) = " << rl::format_double(err_base) << " ("
                      << (normalized.kind == rl::NormalizationCase::independent ? "independent"
                                                                                : "parallel")
                      << " case)\n";
            std::istringstream kappas_in(imp_kappas);
            std::string tok;
            while (std::getline(kappas_in, tok, ',')) {
                const double kappa = std::stod(tok);
                const rl::GeneralizedResponse improved =
                    normalized.kind == rl::NormalizationCase::independent
                        ? rl::improve_kappa_independent(normalized.response, kappa)
                        : rl::improve_kappa_parallel(normalized.response, kappa);
                const double err_kappa = rl::eval_error(improved, inst, grid);
                const double diff = err_kappa - err_base;
                csv << rl::format_double(kappa) << ',' << rl::format_double(err_kappa) << ','
                    << rl::format_double(diff) << ',' << rl::format_double(kappa * diff) << '\n';
                std::cout << "kappa = " << kappa << ": err = " << rl::format_double(err_kappa)
                          << ", kappa*(err(R^k)-err(R)) = " << rl::format_double(kappa * diff)
                          << "\n";
            }
            if (!imp_out.empty()) {
                rl::write_file(imp_out, csv.str());
                std::cout << "wrote " << imp_out << "\n";
            }
            return 0;
        }

        if (min_cmd->parsed()) {
            const rl::ProblemInstance inst = rl::instance_from_json(rl::read_file(min_instance));
            const rl::QuadratureGrid grid = rl::tensor_midpoint_grid(inst.box, min_per_axis);
            std::ostringstream csv;
            for (std::size_t i = 0; i < inst.box.dim(); ++i) csv << "x" << i + 1 << ",";
            csv << "m\n";
            for (const rl::Vec& x : grid.nodes) {
                for (double c : x) csv << rl::format_double(c) << ',';
                csv << rl::format_double(rl::pointwise_minimizer(inst, x)) << '\n';
            }
            if (min_out.empty()) {
                std::cout << csv.str();
            } else {
                rl::write_file(min_out, csv.str());
                std::cout << "wrote " << min_out << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
