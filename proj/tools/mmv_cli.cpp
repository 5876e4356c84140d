// Command-line front end: experiment sweeps, limit curves, GAMP traces.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmv/channels.hpp"
#include "mmv/csv.hpp"
#include "mmv/errors.hpp"
#include "mmv/experiment.hpp"
#include "mmv/limits.hpp"

namespace {

constexpr int kExitSpec = 2;
constexpr int kExitNumeric = 3;

struct RunOptions {
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
    bool full = false;
    std::string delta_v_source;
};

mmv::ExperimentSpec load_spec(const RunOptions& opt) {
    auto spec = mmv::read_experiment_spec(opt.spec_path);
    if (opt.seed) {
        spec.base_seed = *opt.seed;
    }
    if (opt.full) {
        mmv::apply_full_scale(spec);
    }
    if (opt.delta_v_source == "se") {
        spec.delta_v_source = mmv::DeltaVSource::StateEvolution;
    } else if (opt.delta_v_source == "trial_average") {
        spec.delta_v_source = mmv::DeltaVSource::TrialAverage;
    } else if (!opt.delta_v_source.empty()) {
        throw mmv::SpecError("--delta-v-source: expected trial_average or se");
    }
    if (!opt.out.empty()) {
        spec.output_path = opt.out;
    }
    spec.validate();
    return spec;
}

// Writes to spec.output_path, or stdout when it is empty.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw mmv::ParameterError("cannot write '" + path + "'");
    }
    fn(os);
}

void run_command(const RunOptions& opt, bool aud_only) {
    const auto spec = load_spec(opt);
    if (aud_only && spec.kind != mmv::ExperimentKind::Aud) {
        throw mmv::SpecError("key 'experiment': the aud subcommand needs experiment = aud");
    }
    const auto result = mmv::run_experiment(spec, opt.threads);
    with_output(spec.output_path, [&](std::ostream& os) { mmv::write_experiment_csv(result, os); });
    for (const auto& t : result.trials) {
        if (!t.failure.empty()) {
            std::cerr << "warning: sweep " << t.sweep_index << " trial " << t.trial_index << ": " << t.failure
                      << '\n';
        }
    }
}

struct TraceOptions {
    RunOptions run;
    std::size_t sweep_index = 0;
    std::size_t trial_index = 0;
};

void trace_command(const TraceOptions& opt) {
    const auto spec = load_spec(opt.run);
    std::vector<mmv::TracePoint> trace;
    int status = 0;
    try {
        trace = mmv::run_single_gamp(spec, opt.sweep_index, opt.trial_index).trace;
    } catch (const mmv::DivergenceError& e) {
        trace = e.trace();
        std::cerr << "error: " << e.what() << '\n';
        status = kExitNumeric;
    }
    with_output(spec.output_path, [&](std::ostream& os) {
        os << "iteration,delta,delta_v\n";
        for (const auto& p : trace) {
            os << p.iteration << ',' << mmv::csv::num(p.change) << ',' << mmv::csv::num(p.delta_v) << '\n';
        }
    });
    if (status != 0) {
        std::exit(status);
    }
}

struct LimitOptions {
    bool mmwse = false;
    bool mmae = false;
    bool mmse = false;
    bool roc = false;
    std::vector<double> delta_v;
    std::vector<double> R;
    double delta_z = 0.01;
    double rho = 0.1;
    std::optional<double> beta;
    std::vector<long> J{1};
    long samples = 200000;
    std::uint64_t seed = 0;
    int roc_points = 200;
    std::string out;
};

void limits_command(const LimitOptions& opt) {
    const int selected = int(opt.mmwse) + int(opt.mmae) + int(opt.mmse) + int(opt.roc);
    if (selected != 1) {
        throw mmv::ParameterError("choose exactly one of --mmwse, --mmae, --mmse, --roc");
    }
    if (opt.delta_v.empty() == opt.R.empty()) {
        throw mmv::ParameterError("give either --delta-v or --R (with --delta-z)");
    }
    if (opt.mmwse && !opt.beta) {
        throw mmv::ParameterError("--mmwse needs --beta");
    }
    const bool by_rate = !opt.R.empty();
    const auto& xs = by_rate ? opt.R : opt.delta_v;

    with_output(opt.out, [&](std::ostream& os) {
        if (opt.roc) {
            os << (by_rate ? "R" : "delta_v") << ",J,rho,delta_v_used,threshold,fpr,tpr,auc\n";
        } else {
            os << (by_rate ? "R" : "delta_v") << ",J,rho,beta,value,p_fa,p_miss,method\n";
        }
        for (long J : opt.J) {
            for (double x : xs) {
                const double dv = by_rate ? mmv::state_evolution_delta(x, opt.rho, J, opt.delta_z) : x;
                if (opt.roc) {
                    const auto grid = mmv::default_roc_grid(dv, J, opt.roc_points);
                    const auto curve = mmv::roc_curve(dv, J, grid);
                    const double auc = mmv::roc_area(curve);
                    for (const auto& p : curve) {
                        os << mmv::csv::join({mmv::csv::num(x), std::to_string(J), mmv::csv::num(opt.rho),
                                              mmv::csv::num(dv), mmv::csv::num(p.threshold), mmv::csv::num(p.fpr),
                                              mmv::csv::num(p.tpr), mmv::csv::num(auc)})
                           << '\n';
                    }
                    continue;
                }
                const mmv::LimitQuery q{dv, opt.rho, J, opt.beta};
                mmv::LimitResult r;
                if (opt.mmwse) {
                    r = mmv::mmwse(q);
                } else if (opt.mmae) {
                    r = J == 1 ? mmv::mmae_quadrature(q) : mmv::mmae(q, opt.samples, opt.seed);
                } else {
                    r.value = mmv::mmse_of_delta(dv, opt.rho, J);
                    r.method = mmv::LimitMethod::Quadrature;
                }
                auto opt_num = [](const std::optional<double>& v) { return v ? mmv::csv::num(*v) : std::string(); };
                os << mmv::csv::join({mmv::csv::num(x), std::to_string(J), mmv::csv::num(opt.rho), opt_num(opt.beta),
                                      mmv::csv::num(r.value), opt_num(r.p_false_alarm), opt_num(r.p_miss),
                                      mmv::to_string(r.method)})
                   << '\n';
            }
        }
    });
}

void add_run_flags(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("spec", opt.spec_path, "Experiment spec file")->required();
    cmd->add_option("--seed", opt.seed, "Override base_seed");
    cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", opt.out, "Output CSV (default: spec output, else stdout)");
    cmd->add_flag("--full", opt.full, "Full scale: N = 10000, 50 trials");
    cmd->add_option("--delta-v-source", opt.delta_v_source, "trial_average or se");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metric-optimal MMV estimation: experiments and performance limits"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Run an experiment spec and write CSV");
    add_run_flags(run, run_opt);

    RunOptions aud_opt;
    auto* aud = app.add_subcommand("aud", "Run an active user detection spec (GAMP vs OMP)");
    add_run_flags(aud, aud_opt);

    TraceOptions trace_opt;
    auto* trace = app.add_subcommand("gamp-trace", "Per-iteration GAMP trace of one trial");
    add_run_flags(trace, trace_opt.run);
    trace->add_option("--sweep-index", trace_opt.sweep_index, "Sweep point");
    trace->add_option("--trial-index", trace_opt.trial_index, "Trial");

    LimitOptions lim;
    auto* limits = app.add_subcommand("limits", "Theoretic limit values as CSV");
    limits->add_flag("--mmwse", lim.mmwse, "Minimum weighted support error");
    limits->add_flag("--mmae", lim.mmae, "Minimum mean absolute error");
    limits->add_flag("--mmse", lim.mmse, "Minimum mean squared error");
    limits->add_flag("--roc", lim.roc, "ROC curve of the squared-norm detector");
    limits->add_option("--delta-v", lim.delta_v, "Scalar-channel variances")->delimiter(',');
    limits->add_option("--R", lim.R, "Measurement rates (delta_v from state evolution)")->delimiter(',');
    limits->add_option("--delta-z", lim.delta_z, "AWGN variance for --R");
    limits->add_option("--rho", lim.rho, "Sparsity");
    limits->add_option("--beta", lim.beta, "MWSE false-alarm weight");
    limits->add_option("--J", lim.J, "Channel counts")->delimiter(',');
    limits->add_option("--samples", lim.samples, "Monte Carlo samples for --mmae with J > 1");
    limits->add_option("--seed", lim.seed, "Monte Carlo seed");
    limits->add_option("--roc-points", lim.roc_points, "Thresholds per ROC curve");
    limits->add_option("--out", lim.out, "Output CSV (default stdout)");

    int u_max = 8;
    std::string mixture_out;
    auto* mixture = app.add_subcommand("mixture", "Fit and save the probit mixture for the logistic channel");
    mixture->add_option("--u-max", u_max, "Mixture components");
    mixture->add_option("--out", mixture_out, "Output JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitSpec;
    }

    try {
        if (*run) {
            run_command(run_opt, false);
        } else if (*aud) {
            run_command(aud_opt, true);
        } else if (*trace) {
            trace_command(trace_opt);
        } else if (*limits) {
            limits_command(lim);
        } else if (*mixture) {
            const auto mix = mmv::build_sigmoid_mixture(u_max);
            mmv::save_mixture(mix, mixture_out);
            std::cerr << "sup error " << mix.fit_error << '\n';
        }
    } catch (const mmv::SpecError& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return kExitSpec;
    } catch (const mmv::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kExitSpec;
    } catch (const mmv::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
