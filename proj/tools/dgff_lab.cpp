// dgff_lab: command-line driver for the DGFF simulation laboratory.
//
// Subcommands: sample, green, free-energy, overlap, high-points,
// boundary-mass, bk-check, pd, predict, grem-mc.
// Exit codes: 0 success, 1 usage/configuration error, 2 numerical-check
// failure.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dgff/experiment.hpp"
#include "dgff/field.hpp"
#include "dgff/gibbs.hpp"

namespace {

int resolve_workers(int requested) {
    if (const char* env = std::getenv("DGFF_LAB_THREADS")) {
        try {
            int parsed = std::stoi(env);
            if (parsed >= 1) return parsed;
        } catch (...) {
        }
        std::cerr << "warning: ignoring malformed DGFF_LAB_THREADS\n";
    }
    return requested;
}

void add_common(CLI::App* cmd, dgff::ExperimentConfig& cfg,
                std::string& config_path) {
    cmd->add_option("--config", config_path, "key=value config file");
    cmd->add_option("--seed", cfg.master_seed, "master seed");
    cmd->add_option("--workers", cfg.workers, "worker threads");
    cmd->add_option("--out", cfg.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation laboratory for the 2D lattice free field"};
    app.require_subcommand(1);

    dgff::ExperimentConfig cfg;
    std::string config_path;

    // --- utility: draw one field and snapshot it -------------------------
    auto* cmd_sample = app.add_subcommand("sample", "draw one field sample");
    int sample_n = 64;
    uint64_t sample_seed = 1;
    std::string snapshot_out, snapshot_in;
    cmd_sample->add_option("--n", sample_n, "box side");
    cmd_sample->add_option("--seed", sample_seed, "sample seed");
    cmd_sample->add_option("--snapshot-out", snapshot_out, "snapshot file");
    cmd_sample->add_option("--snapshot-in", snapshot_in,
                           "print a summary of an existing snapshot");

    auto* cmd_green = app.add_subcommand("green", "Green-function column");
    int green_n = 16, green_x = 1, green_y = 1;
    cmd_green->add_option("--n", green_n, "box side");
    cmd_green->add_option("--x", green_x, "source x");
    cmd_green->add_option("--y", green_y, "source y");

    // --- experiments ------------------------------------------------------
    auto* cmd_free = app.add_subcommand("free-energy", "free-energy sweep");
    add_common(cmd_free, cfg, config_path);
    cmd_free->add_option("--n", cfg.n_list, "box sides");
    cmd_free->add_option("--beta", cfg.beta_list, "inverse temperatures");
    cmd_free->add_option("--samples", cfg.disorder_samples, "disorder samples");
    cmd_free->add_option("--alpha", cfg.alpha, "split scale");
    cmd_free->add_option("--sigma1", cfg.sigma1, "coarse std factor");
    cmd_free->add_option("--sigma2", cfg.sigma2, "fine std factor");
    cmd_free->add_option("--rho", cfg.rho, "bulk margin exponent");

    auto* cmd_overlap = app.add_subcommand("overlap", "two-overlap histogram");
    add_common(cmd_overlap, cfg, config_path);
    cmd_overlap->add_option("--n", cfg.n_list, "box sides");
    cmd_overlap->add_option("--beta", cfg.beta_list, "inverse temperature");
    cmd_overlap->add_option("--samples", cfg.disorder_samples,
                            "disorder samples");
    cmd_overlap->add_option("--pairs", cfg.pairs_per_sample,
                            "replica pairs per sample");
    cmd_overlap->add_option("--rho", cfg.rho, "bulk margin exponent");

    auto* cmd_high = app.add_subcommand("high-points", "high-point exponents");
    add_common(cmd_high, cfg, config_path);
    cmd_high->add_option("--n", cfg.n_list, "box sides");
    cmd_high->add_option("--gamma", cfg.gamma, "height fraction");
    cmd_high->add_option("--delta", cfg.delta, "inner-box margin");
    cmd_high->add_option("--samples", cfg.disorder_samples, "disorder samples");

    auto* cmd_mass = app.add_subcommand("boundary-mass",
                                        "Gibbs mass outside the bulk");
    add_common(cmd_mass, cfg, config_path);
    cmd_mass->add_option("--n", cfg.n_list, "box sides");
    cmd_mass->add_option("--beta", cfg.beta_list, "inverse temperature");
    cmd_mass->add_option("--rho", cfg.rho, "bulk margin exponent");
    cmd_mass->add_option("--samples", cfg.disorder_samples, "disorder samples");

    auto* cmd_bk = app.add_subcommand("bk-check", "overlap identities");
    add_common(cmd_bk, cfg, config_path);
    cmd_bk->add_option("--n", cfg.n_list, "box sides");
    cmd_bk->add_option("--beta", cfg.beta_list, "inverse temperature");
    cmd_bk->add_option("--alpha", cfg.alpha, "split scale");
    cmd_bk->add_option("--rho", cfg.rho, "bulk margin exponent");
    cmd_bk->add_option("--samples", cfg.disorder_samples, "disorder samples");
    cmd_bk->add_option("--pairs", cfg.pairs_per_sample, "pairs per sample");
    cmd_bk->add_option("--du", cfg.du, "finite-difference step");

    auto* cmd_pd = app.add_subcommand("pd", "Poisson-Dirichlet moments");
    add_common(cmd_pd, cfg, config_path);
    cmd_pd->add_option("--alpha", cfg.pd_alpha, "PD parameter");
    cmd_pd->add_option("--atoms", cfg.pd_atoms, "atoms per sample");
    cmd_pd->add_option("--samples", cfg.pd_samples, "Monte Carlo samples");

    auto* cmd_predict = app.add_subcommand("predict", "closed-form values");
    add_common(cmd_predict, cfg, config_path);
    cmd_predict->add_option("--formula", cfg.formula, "closed form name");
    cmd_predict->add_option("--beta", cfg.beta_list, "inverse temperature");
    cmd_predict->add_option("--alpha", cfg.alpha, "split scale");
    cmd_predict->add_option("--sigma1", cfg.sigma1, "coarse std factor");
    cmd_predict->add_option("--sigma2", cfg.sigma2, "fine std factor");
    cmd_predict->add_option("--gamma", cfg.gamma, "gamma or r argument");

    auto* cmd_grem = app.add_subcommand("grem-mc", "two-level reference field");
    add_common(cmd_grem, cfg, config_path);
    cmd_grem->add_option("--n", cfg.n_list, "equivalent box sides");
    cmd_grem->add_option("--beta", cfg.beta_list, "inverse temperature");
    cmd_grem->add_option("--alpha", cfg.alpha, "split scale");
    cmd_grem->add_option("--sigma1", cfg.sigma1, "coarse std factor");
    cmd_grem->add_option("--sigma2", cfg.sigma2, "fine std factor");
    cmd_grem->add_option("--samples", cfg.disorder_samples, "repetitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (cmd_sample->parsed()) {
            if (!snapshot_in.empty()) {
                dgff::FieldSample sample = dgff::read_field_snapshot(snapshot_in);
                nlohmann::json j;
                j["n"] = sample.geom.side();
                j["seed"] = sample.seed;
                j["sampler_version"] = sample.sampler_version;
                j["value_at_center"] = sample.at(sample.geom.center());
                std::cout << j.dump(2) << "\n";
                return 0;
            }
            dgff::BoxGeometry geom(sample_n);
            dgff::FieldOps ops(geom);
            dgff::FieldSample sample = ops.sample(sample_seed);
            if (!snapshot_out.empty())
                dgff::write_field_snapshot(sample, snapshot_out);
            double max = sample.values.front();
            for (double v : sample.values) max = std::max(max, v);
            nlohmann::json j;
            j["n"] = sample_n;
            j["seed"] = sample_seed;
            j["max"] = max;
            j["value_at_center"] = sample.at(geom.center());
            if (!snapshot_out.empty()) j["snapshot"] = snapshot_out;
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (cmd_green->parsed()) {
            dgff::BoxGeometry geom(green_n);
            dgff::FieldOps ops(geom);
            dgff::GreenColumn col = ops.green_column({green_x, green_y});
            nlohmann::json j;
            j["n"] = green_n;
            j["source"] = {green_x, green_y};
            j["variance"] = col.at(geom, {green_x, green_y});
            double row_sum = 0.0;
            for (double v : col.values) row_sum += v;
            j["expected_exit_time"] = row_sum;
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        for (CLI::App* cmd : {cmd_free, cmd_overlap, cmd_high, cmd_mass,
                              cmd_bk, cmd_pd, cmd_predict, cmd_grem}) {
            if (!cmd->parsed()) continue;
            if (!config_path.empty()) {
                dgff::ExperimentConfig loaded =
                    dgff::ExperimentConfig::load(config_path);
                loaded.workers = resolve_workers(loaded.workers);
                dgff::RunManifest manifest = dgff::run_experiment(loaded);
                return manifest.numeric_failures == 0 ? 0 : 2;
            }
            cfg.experiment = cmd->get_name();
            cfg.workers = resolve_workers(cfg.workers);
            dgff::RunManifest manifest = dgff::run_experiment(cfg);
            if (cfg.experiment == "predict" || cfg.experiment == "pd") {
                // echo the JSON result for interactive use
                for (const auto& [path, checksum] : manifest.outputs) {
                    (void)checksum;
                    std::ifstream in(path);
                    std::cout << in.rdbuf();
                }
            }
            return manifest.numeric_failures == 0 ? 0 : 2;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
