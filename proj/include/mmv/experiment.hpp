#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mmv/gamp.hpp"
#include "mmv/metrics.hpp"

namespace mmv {

enum class ExperimentKind { WseAwgn, Roc, MaeLogistic, Aud };

/// Where the scalar-channel variance fed to the theory comes from.
enum class DeltaVSource { TrialAverage, StateEvolution };

std::string to_string(ExperimentKind kind);
std::string to_string(DeltaVSource source);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::WseAwgn;
    Eigen::Index N = 2000;
    std::vector<Eigen::Index> J_list;
    std::vector<double> R_list;
    std::vector<double> noise_list;  // delta_z for AWGN, a for logistic
    double rho = 0.1;
    MetricSpec metric;
    int trials = 10;
    std::uint64_t base_seed = 0;
    GampConfig gamp;
    std::string output_path;  // empty: stdout
    DeltaVSource delta_v_source = DeltaVSource::TrialAverage;
    bool normalize_rows = true;
    long mmae_samples = 200000;
    int roc_points = 200;
    double omp_atom_factor = 1.5;  // max_atoms = ceil(factor * rho * N)
    double omp_threshold = 0.5;

    void validate() const;
    /// Sorted `key=value` rendering of every effective setting.
    std::string canonical() const;
    /// FNV-1a of canonical(), as 16 hex digits.
    std::string config_hash() const;
};

/// Builds a spec from `key = value` text. Keys absent from the text take the
/// per-experiment defaults; unknown keys are SpecErrors naming the key.
ExperimentSpec parse_experiment_spec(std::string_view text, const std::string& source = "<spec>");
ExperimentSpec read_experiment_spec(const std::filesystem::path& path);

/// Scales to the full-size configuration (N = 10000, 50 trials).
void apply_full_scale(ExperimentSpec& spec);

struct SweepPoint {
    double R = 0.0;
    Eigen::Index J = 1;
    double noise = 0.0;
    Eigen::Index M = 0;
};

/// Sweep order: noise outermost, then R, then J.
std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec);

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t sweep_index, std::size_t trial_index);

struct TrialRecord {
    std::size_t sweep_index = 0;
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    SweepPoint point;
    double empirical_error = 0.0;           // NaN when GAMP diverged
    std::optional<double> omp_error;        // aud only
    std::optional<double> theoretic_error;
    double delta_v_final = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string failure;                    // divergence message, if any
    double wall_time = 0.0;                 // seconds; kept out of the CSV
};

struct AggregateRecord {
    std::size_t sweep_index = 0;
    SweepPoint point;
    int n_trials = 0;  // trials that produced an estimate
    double mean_error = 0.0;
    double std_error = 0.0;
    std::optional<double> omp_mean;
    std::optional<double> omp_std_error;
    std::optional<double> theoretic_error;
    std::optional<double> p_false_alarm;
    std::optional<double> p_miss;
    std::string theoretic_method;
    double delta_v = 0.0;  // the value the theory was evaluated at
    double mean_iterations = 0.0;
    bool all_converged = false;
};

struct RocRow {
    std::size_t sweep_index = 0;
    SweepPoint point;
    double delta_v = 0.0;
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
    double empirical_fpr = 0.0;
    double empirical_tpr = 0.0;
    double auc = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<TrialRecord> trials;         // ordered by (sweep_index, trial_index)
    std::vector<AggregateRecord> aggregates; // one per sweep point
    std::vector<RocRow> roc;                 // roc experiments only
};

/// Runs every (sweep point, trial) on a pool of `threads` workers. Trial
/// failures are recorded in-row and never abort the sweep.
ExperimentResult run_experiment(const ExperimentSpec& spec, int threads = 1);

/// Runs one trial of `point` and returns its GAMP output (for traces).
GampOutput run_single_gamp(const ExperimentSpec& spec, std::size_t sweep_index, std::size_t trial_index);

/// Trial and aggregate rows, or ROC rows for roc experiments. Column order
/// is fixed; floats carry 17 significant digits.
void write_experiment_csv(const ExperimentResult& result, std::ostream& os);

std::string experiment_csv_header(ExperimentKind kind);

} // namespace mmv
