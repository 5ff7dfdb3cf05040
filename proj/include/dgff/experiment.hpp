#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dgff/pool.hpp"

namespace dgff {

inline constexpr const char* kCodeVersion = "dgff-lab 0.1.0";

/// Fully validated description of one experiment run. Serializes to and from
/// a plain-text key=value file losslessly.
struct ExperimentConfig {
    std::string experiment = "predict";
    std::vector<int> n_list = {64};
    std::vector<double> beta_list = {1.0};
    double alpha = 0.5;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.25;
    double delta = 0.0;
    double gamma = 0.5;
    double pd_alpha = 0.5;
    int disorder_samples = 16;
    int pairs_per_sample = 2000;
    int pd_atoms = 10000;
    long pd_samples = 100000;
    double du = 1e-4;
    std::string formula = "gff_free_energy";
    uint64_t master_seed = 1;
    int workers = 1;
    std::string out_dir = ".";

    void validate() const;
    std::string serialize() const;
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

/// Reproducibility record of one run: config snapshot, derived seeds, wall
/// clock, and output checksums.
struct RunManifest {
    ExperimentConfig config;
    std::string code_version = kCodeVersion;
    double wall_seconds = 0.0;
    std::vector<uint64_t> task_seeds;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, fnv64
    int numeric_failures = 0;

    std::string to_json() const;
    void save(const std::string& path) const;
};

/// FNV-1a 64-bit checksum in hex, used for output fingerprints.
std::string fnv1a_hex(const std::string& bytes);

/// Write bytes via a temp file and rename, so partial outputs never remain.
void atomic_write_file(const std::string& path, const std::string& contents);

/// Dispatch to the named experiment. Returns the manifest; throws
/// std::invalid_argument on bad configuration. numeric_failures counts
/// identity checks that exceeded their thresholds (bk-check).
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace dgff
