#include "dgff/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dgff/closedform.hpp"
#include "dgff/field.hpp"
#include "dgff/gibbs.hpp"
#include "dgff/multiscale.hpp"
#include "dgff/overlap.hpp"
#include "dgff/pd.hpp"
#include "dgff/rng.hpp"

namespace dgff {

namespace {

const std::set<std::string>& known_experiments() {
    static const std::set<std::string> names = {
        "free-energy", "overlap",  "high-points", "boundary-mass",
        "bk-check",    "pd",       "predict",     "grem-mc"};
    return names;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T>
std::string join_list(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, double>)
            out += fmt_double(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("config: key '" + key + "' " + why);
    };
    if (!known_experiments().count(experiment))
        fail("experiment", "names no known experiment: " + experiment);
    if (n_list.empty()) fail("n_list", "must be nonempty");
    for (int n : n_list)
        if (n < 4) fail("n_list", "requires N >= 4");
    if (beta_list.empty()) fail("beta_list", "must be nonempty");
    for (double b : beta_list)
        if (b < 0.0) fail("beta_list", "requires beta >= 0");
    if (alpha <= 0.0 || alpha >= 1.0) fail("alpha", "must lie in (0, 1)");
    if (sigma1 < 0.0) fail("sigma1", "must be >= 0");
    if (sigma2 < 0.0) fail("sigma2", "must be >= 0");
    if (rho <= 0.0 || rho >= 1.0) fail("rho", "must lie in (0, 1)");
    if (delta < 0.0 || delta >= 0.5) fail("delta", "must lie in [0, 1/2)");
    if (gamma < 0.0) fail("gamma", "must be >= 0");
    if (pd_alpha <= 0.0 || pd_alpha >= 1.0) fail("pd_alpha", "must lie in (0, 1)");
    if (disorder_samples < 1) fail("disorder_samples", "must be >= 1");
    if (pairs_per_sample < 1) fail("pairs_per_sample", "must be >= 1");
    if (pd_atoms < 1) fail("pd_atoms", "must be >= 1");
    if (pd_samples < 1) fail("pd_samples", "must be >= 1");
    if (du <= 0.0) fail("du", "must be > 0");
    if (workers < 1) fail("workers", "must be >= 1");
    const bool scale_split =
        experiment == "bk-check" || sigma1 != 1.0 || sigma2 != 1.0;
    if (scale_split && rho >= alpha) fail("rho", "must be < alpha");
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    out << "experiment=" << experiment << "\n";
    out << "n_list=" << join_list(n_list) << "\n";
    out << "beta_list=" << join_list(beta_list) << "\n";
    out << "alpha=" << fmt_double(alpha) << "\n";
    out << "sigma1=" << fmt_double(sigma1) << "\n";
    out << "sigma2=" << fmt_double(sigma2) << "\n";
    out << "rho=" << fmt_double(rho) << "\n";
    out << "delta=" << fmt_double(delta) << "\n";
    out << "gamma=" << fmt_double(gamma) << "\n";
    out << "pd_alpha=" << fmt_double(pd_alpha) << "\n";
    out << "disorder_samples=" << disorder_samples << "\n";
    out << "pairs_per_sample=" << pairs_per_sample << "\n";
    out << "pd_atoms=" << pd_atoms << "\n";
    out << "pd_samples=" << pd_samples << "\n";
    out << "du=" << fmt_double(du) << "\n";
    out << "formula=" << formula << "\n";
    out << "master_seed=" << master_seed << "\n";
    out << "workers=" << workers << "\n";
    out << "out_dir=" << out_dir << "\n";
    return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " +
                                        std::to_string(line_no) +
                                        " is not key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "experiment") cfg.experiment = value;
            else if (key == "n_list") {
                cfg.n_list.clear();
                for (const auto& item : split(value, ','))
                    cfg.n_list.push_back(std::stoi(item));
            } else if (key == "beta_list") {
                cfg.beta_list.clear();
                for (const auto& item : split(value, ','))
                    cfg.beta_list.push_back(std::stod(item));
            } else if (key == "alpha") cfg.alpha = std::stod(value);
            else if (key == "sigma1") cfg.sigma1 = std::stod(value);
            else if (key == "sigma2") cfg.sigma2 = std::stod(value);
            else if (key == "rho") cfg.rho = std::stod(value);
            else if (key == "delta") cfg.delta = std::stod(value);
            else if (key == "gamma") cfg.gamma = std::stod(value);
            else if (key == "pd_alpha") cfg.pd_alpha = std::stod(value);
            else if (key == "disorder_samples")
                cfg.disorder_samples = std::stoi(value);
            else if (key == "pairs_per_sample")
                cfg.pairs_per_sample = std::stoi(value);
            else if (key == "pd_atoms") cfg.pd_atoms = std::stoi(value);
            else if (key == "pd_samples") cfg.pd_samples = std::stol(value);
            else if (key == "du") cfg.du = std::stod(value);
            else if (key == "formula") cfg.formula = value;
            else if (key == "master_seed") cfg.master_seed = std::stoull(value);
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "out_dir") cfg.out_dir = value;
            else
                throw std::invalid_argument("config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key +
                                        "' has an unparsable value");
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse(text);
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buf;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out.write(contents.data(),
                  static_cast<std::streamsize>(contents.size()));
        if (!out) {
            std::filesystem::remove(tmp);
            throw std::runtime_error("short write to " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["code_version"] = code_version;
    j["wall_seconds"] = wall_seconds;
    j["numeric_failures"] = numeric_failures;
    nlohmann::json cfg;
    for (const auto& line : [&] {
             std::vector<std::pair<std::string, std::string>> kv;
             std::istringstream in(config.serialize());
             std::string l;
             while (std::getline(in, l)) {
                 auto eq = l.find('=');
                 kv.emplace_back(l.substr(0, eq), l.substr(eq + 1));
             }
             return kv;
         }())
        cfg[line.first] = line.second;
    j["config"] = cfg;
    j["task_seeds"] = task_seeds;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [path, checksum] : outputs)
        outs.push_back({{"path", path}, {"fnv1a64", checksum}});
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

void RunManifest::save(const std::string& path) const {
    atomic_write_file(path, to_json());
}

namespace {

struct CsvBuilder {
    std::string text;
    explicit CsvBuilder(const std::string& header) { text = header + "\n"; }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text += ",";
            text += cells[i];
        }
        text += "\n";
    }
};

void emit(RunManifest& manifest, const std::string& name,
          const std::string& contents) {
    std::filesystem::create_directories(manifest.config.out_dir);
    const std::string path =
        (std::filesystem::path(manifest.config.out_dir) / name).string();
    atomic_write_file(path, contents);
    manifest.outputs.emplace_back(path, fnv1a_hex(contents));
}

void run_free_energy(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    ThreadPool pool(cfg.workers);
    CsvBuilder csv("N,beta,alpha,sigma1,sigma2,rho,sample_id,log_Z,f_N");
    const bool plain = cfg.sigma1 == 1.0 && cfg.sigma2 == 1.0;

    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const int n = cfg.n_list[ni];
        BoxGeometry geom(n);
        FieldOps ops(geom);
        const int d_total = cfg.disorder_samples;
        // per-sample rows for all betas, merged in sample order
        std::vector<std::vector<std::pair<double, double>>> results(d_total);

        pool.run_indexed(d_total, [&](std::size_t d) {
            const uint64_t task = ni * static_cast<std::size_t>(d_total) + d;
            const uint64_t seed =
                derive_seed(cfg.master_seed, task, TaskKind::field_sample);
            FieldSample sample = ops.sample(seed);
            std::vector<double> values;
            if (plain) {
                values = sample.values;  // Z_N over the full box
            } else {
                GeneralizedField psi = psi_field(sample, cfg.alpha, cfg.sigma1,
                                                 cfg.sigma2, cfg.rho);
                values = psi.psi;
            }
            auto& rows = results[d];
            for (double beta : cfg.beta_list) {
                const double log_z = log_partition(values, beta);
                rows.emplace_back(beta, log_z);
            }
        });

        for (int d = 0; d < d_total; ++d) {
            const uint64_t task = ni * static_cast<std::size_t>(d_total) + d;
            manifest.task_seeds.push_back(
                derive_seed(cfg.master_seed, task, TaskKind::field_sample));
            for (const auto& [beta, log_z] : results[d])
                csv.row({std::to_string(n), fmt_double(beta),
                         fmt_double(cfg.alpha), fmt_double(cfg.sigma1),
                         fmt_double(cfg.sigma2), fmt_double(cfg.rho),
                         std::to_string(d), fmt_double(log_z),
                         fmt_double(log_z / (2.0 * std::log(n)))});
        }
    }
    emit(manifest, "free_energy.csv", csv.text);
}

void run_overlap(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    ThreadPool pool(cfg.workers);
    CsvBuilder csv(
        "N,beta,rho,r,x_estimate,stderr,disorder_samples,pairs_per_sample,"
        "seed");
    uint64_t run_id = 0;
    for (int n : cfg.n_list) {
        for (double beta : cfg.beta_list) {
            OverlapHistogramConfig oc;
            oc.n = n;
            oc.beta = beta;
            oc.rho = cfg.rho;
            oc.disorder_samples = cfg.disorder_samples;
            oc.pairs_per_sample = cfg.pairs_per_sample;
            oc.seed = derive_seed(cfg.master_seed, run_id++,
                                  TaskKind::replica_pairs);
            oc.workers = cfg.workers;
            OverlapHistogram hist = two_overlap_distribution(oc, &pool);
            manifest.task_seeds.push_back(oc.seed);
            for (std::size_t i = 0; i < hist.grid.size(); ++i)
                csv.row({std::to_string(n), fmt_double(beta),
                         fmt_double(oc.rho), fmt_double(hist.grid[i]),
                         fmt_double(hist.x[i]), fmt_double(hist.stderr_[i]),
                         std::to_string(oc.disorder_samples),
                         std::to_string(oc.pairs_per_sample),
                         std::to_string(cfg.master_seed)});
        }
    }
    emit(manifest, "overlap.csv", csv.text);
}

void run_high_points(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    ThreadPool pool(cfg.workers);
    CsvBuilder csv("N,gamma,delta,sample_id,count,exponent");
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const int n = cfg.n_list[ni];
        BoxGeometry geom(n);
        FieldOps ops(geom);
        VertexSet region = inner_box(geom, cfg.delta);
        const int d_total = cfg.disorder_samples;
        std::vector<HighPoints> results(d_total);
        pool.run_indexed(d_total, [&](std::size_t d) {
            const uint64_t task = ni * static_cast<std::size_t>(d_total) + d;
            FieldSample sample = ops.sample(
                derive_seed(cfg.master_seed, task, TaskKind::field_sample));
            results[d] = high_points_count(restrict_to_region(sample, region),
                                           region, cfg.gamma, n);
        });
        for (int d = 0; d < d_total; ++d)
            csv.row({std::to_string(n), fmt_double(cfg.gamma),
                     fmt_double(cfg.delta), std::to_string(d),
                     std::to_string(results[d].count),
                     results[d].exponent ? fmt_double(*results[d].exponent)
                                         : "NA"});
    }
    emit(manifest, "high_points.csv", csv.text);
}

void run_boundary_mass(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    ThreadPool pool(cfg.workers);
    CsvBuilder csv("N,beta,rho,sample_id,mass");
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const int n = cfg.n_list[ni];
        BoxGeometry geom(n);
        FieldOps ops(geom);
        VertexSet full = inner_box(geom, 0.0);
        const int d_total = cfg.disorder_samples;
        // one field per (N, sample); every beta reuses it
        std::vector<std::vector<double>> masses(
            d_total, std::vector<double>(cfg.beta_list.size(), 0.0));
        pool.run_indexed(d_total, [&](std::size_t d) {
            const uint64_t task = ni * static_cast<std::size_t>(d_total) + d;
            FieldSample sample = ops.sample(
                derive_seed(cfg.master_seed, task, TaskKind::field_sample));
            for (std::size_t bi = 0; bi < cfg.beta_list.size(); ++bi) {
                GibbsContext ctx(full, sample.values, cfg.beta_list[bi]);
                masses[d][bi] = boundary_mass(ctx, cfg.rho);
            }
        });
        for (int d = 0; d < d_total; ++d)
            for (std::size_t bi = 0; bi < cfg.beta_list.size(); ++bi)
                csv.row({std::to_string(n), fmt_double(cfg.beta_list[bi]),
                         fmt_double(cfg.rho), std::to_string(d),
                         fmt_double(masses[d][bi])});
    }
    emit(manifest, "boundary_mass.csv", csv.text);
}

void run_bk_check(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    ThreadPool pool(cfg.workers);
    CsvBuilder csv(
        "N,sample_id,alpha,beta,int_lhs,int_rhs,int_diff,der_lhs,der_rhs,"
        "der_diff,convexity_gap");
    const double kIntegralTol = 1e-12;
    const double kDerivativeTol = 1e-6;
    int failures = 0;

    struct Row {
        BkIntegralResult integral;
        BkDerivativeResult derivative;
    };
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const int n = cfg.n_list[ni];
        BoxGeometry geom(n);
        FieldOps ops(geom);
        GreenCache cache(ops);
        const int d_total = cfg.disorder_samples;
        const std::size_t betas = cfg.beta_list.size();
        std::vector<std::vector<Row>> rows(d_total, std::vector<Row>(betas));
        pool.run_indexed(d_total, [&](std::size_t d) {
            const uint64_t task = ni * static_cast<std::size_t>(d_total) + d;
            FieldSample sample = ops.sample(
                derive_seed(cfg.master_seed, task, TaskKind::field_sample));
            for (std::size_t bi = 0; bi < betas; ++bi) {
                const double beta = cfg.beta_list[bi];
                std::vector<double> overlaps = sample_pair_overlaps(
                    sample, beta, cfg.rho, cfg.pairs_per_sample,
                    derive_seed(cfg.master_seed, task * betas + bi,
                                TaskKind::replica_pairs),
                    cache, nullptr);
                rows[d][bi].integral =
                    bk_integral_identity(overlaps, cfg.alpha);
                rows[d][bi].derivative = bk_derivative_identity(
                    sample, beta, cfg.rho, cfg.alpha, cfg.du);
            }
        });
        for (int d = 0; d < d_total; ++d) {
            for (std::size_t bi = 0; bi < betas; ++bi) {
                const Row& r = rows[d][bi];
                if (std::abs(r.integral.difference) > kIntegralTol) ++failures;
                if (std::abs(r.derivative.difference) > kDerivativeTol)
                    ++failures;
                csv.row({std::to_string(n), std::to_string(d),
                         fmt_double(cfg.alpha), fmt_double(cfg.beta_list[bi]),
                         fmt_double(r.integral.lhs), fmt_double(r.integral.rhs),
                         fmt_double(r.integral.difference),
                         fmt_double(r.derivative.lhs),
                         fmt_double(r.derivative.rhs),
                         fmt_double(r.derivative.difference),
                         fmt_double(r.derivative.convexity_gap)});
            }
        }
    }
    manifest.numeric_failures = failures;
    emit(manifest, "bk_check.csv", csv.text);
}

void run_pd(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    PdMoment moment = pd_replica_moment(
        cfg.pd_alpha, 2,
        [](const std::vector<int>& pattern) {
            return pattern[1] == 0 ? 1.0 : 0.0;
        },
        cfg.pd_samples, cfg.pd_atoms, cfg.master_seed);
    nlohmann::json j;
    j["alpha"] = cfg.pd_alpha;
    j["moment2"] = moment.value;
    j["stderr"] = moment.stderr_;
    j["samples"] = moment.samples;
    j["atoms"] = cfg.pd_atoms;
    emit(manifest, "pd.json", j.dump(2) + "\n");
}

void run_predict(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    const double beta = cfg.beta_list.front();
    SigmaPair sp{cfg.sigma1, cfg.sigma2, cfg.alpha};
    nlohmann::json inputs;
    inputs["beta"] = beta;
    ClosedForm result;
    if (cfg.formula == "gff_free_energy") {
        result = gff_free_energy(beta);
    } else if (cfg.formula == "rem_free_energy") {
        inputs["sigma_sq"] = cfg.sigma1 * cfg.sigma1;
        result = rem_free_energy(beta, cfg.sigma1 * cfg.sigma1);
    } else if (cfg.formula == "generalized_free_energy") {
        inputs["alpha"] = cfg.alpha;
        inputs["sigma1"] = cfg.sigma1;
        inputs["sigma2"] = cfg.sigma2;
        result = generalized_free_energy(beta, sp);
    } else if (cfg.formula == "overlap_limit") {
        inputs["r"] = cfg.gamma;
        result = overlap_limit(beta, cfg.gamma);
    } else if (cfg.formula == "gamma_max") {
        inputs["alpha"] = cfg.alpha;
        inputs["sigma1"] = cfg.sigma1;
        inputs["sigma2"] = cfg.sigma2;
        result = gamma_max(sp);
    } else if (cfg.formula == "highpoint_exponent") {
        inputs["gamma"] = cfg.gamma;
        inputs["alpha"] = cfg.alpha;
        inputs["sigma1"] = cfg.sigma1;
        inputs["sigma2"] = cfg.sigma2;
        result = highpoint_exponent(cfg.gamma, sp);
    } else if (cfg.formula == "free_energy_u_derivative") {
        inputs["alpha"] = cfg.alpha;
        result = free_energy_u_derivative(beta, cfg.alpha, +1);
    } else if (cfg.formula == "exponent_curve_max") {
        inputs["alpha"] = cfg.alpha;
        inputs["sigma1"] = cfg.sigma1;
        inputs["sigma2"] = cfg.sigma2;
        CurveMax cm = exponent_curve_max(beta, sp);
        result = {cm.value, "argmax gamma=" + fmt_double(cm.gamma_star)};
    } else {
        throw std::invalid_argument("config: key 'formula' names no closed form: " +
                                    cfg.formula);
    }
    nlohmann::json j;
    j["formula"] = cfg.formula;
    j["inputs"] = inputs;
    j["value"] = result.value;
    j["branch"] = result.branch;
    emit(manifest, "predict.json", j.dump(2) + "\n");
}

void run_grem_mc(RunManifest& manifest) {
    const ExperimentConfig& cfg = manifest.config;
    CsvBuilder csv("n_side,k1,k2,beta,reps,f_estimate,f_closed");
    SigmaPair sp{cfg.sigma1, cfg.sigma2, cfg.alpha};
    uint64_t run_id = 0;
    for (int n : cfg.n_list) {
        Grem2Spec spec = grem2_design(n, sp);
        for (double beta : cfg.beta_list) {
            const double closed = generalized_free_energy(beta, sp).value;
            const double estimate = grem2_free_energy_mc(
                spec, beta, cfg.disorder_samples,
                derive_seed(cfg.master_seed, run_id++, TaskKind::grem_sample));
            csv.row({std::to_string(n), std::to_string(spec.k1),
                     std::to_string(spec.k2), fmt_double(beta),
                     std::to_string(cfg.disorder_samples), fmt_double(estimate),
                     fmt_double(closed)});
        }
    }
    emit(manifest, "grem_mc.csv", csv.text);
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
    config.validate();
    RunManifest manifest;
    manifest.config = config;
    const auto start = std::chrono::steady_clock::now();

    if (config.experiment == "free-energy") run_free_energy(manifest);
    else if (config.experiment == "overlap") run_overlap(manifest);
    else if (config.experiment == "high-points") run_high_points(manifest);
    else if (config.experiment == "boundary-mass") run_boundary_mass(manifest);
    else if (config.experiment == "bk-check") run_bk_check(manifest);
    else if (config.experiment == "pd") run_pd(manifest);
    else if (config.experiment == "predict") run_predict(manifest);
    else if (config.experiment == "grem-mc") run_grem_mc(manifest);

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    manifest.save((std::filesystem::path(config.out_dir) /
                   (config.experiment + "_manifest.json"))
                      .string());
    return manifest;
}

}  // namespace dgff
