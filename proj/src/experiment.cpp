#include "mmv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "mmv/csv.hpp"
#include "mmv/limits.hpp"
#include "mmv/omp.hpp"
#include "mmv/parallel.hpp"
#include "mmv/rng.hpp"
#include "mmv/spec_file.hpp"

namespace mmv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "experiment", "N",          "J",          "R",          "noise",           "rho",
        "metric",     "trials",     "base_seed",  "t_max",      "epsilon",         "damping",
        "delta_aggregation",        "output",     "delta_v_source",                "normalize_rows",
        "mmae_samples",             "roc_points", "omp_atom_factor",               "omp_threshold",
        "gamp_workers",             "init_variance"};
    return keys;
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "wse_awgn") return ExperimentKind::WseAwgn;
    if (s == "roc") return ExperimentKind::Roc;
    if (s == "mae_logistic") return ExperimentKind::MaeLogistic;
    if (s == "aud") return ExperimentKind::Aud;
    throw SpecError("key 'experiment': unknown experiment '" + s + "' (wse_awgn, roc, mae_logistic, aud)");
}

void apply_defaults(ExperimentSpec& spec) {
    switch (spec.kind) {
    case ExperimentKind::WseAwgn:
        spec.J_list = {1, 3, 5};
        spec.R_list = {0.3, 0.4, 0.5, 0.6, 0.7};
        spec.noise_list = {0.01};
        spec.metric = MetricSpec::parse("mwse:beta=0.2");
        break;
    case ExperimentKind::Roc:
        spec.J_list = {1, 3, 5};
        spec.R_list = {0.3};
        spec.noise_list = {0.01, 0.001};
        spec.metric = MetricSpec::parse("mwse:beta=0.2");
        break;
    case ExperimentKind::MaeLogistic:
        spec.J_list = {1, 3, 5};
        spec.R_list = {0.3, 0.4, 0.5, 0.6, 0.7};
        spec.noise_list = {10.0, 30.0};
        spec.metric = MetricSpec::parse("mae");
        break;
    case ExperimentKind::Aud:
        spec.J_list = {1};
        spec.R_list = {0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6};
        spec.noise_list = {0.1, std::pow(10.0, -1.5), 0.01};
        spec.metric = MetricSpec::parse("hamming");
        break;
    }
}

bool is_awgn(ExperimentKind k) { return k != ExperimentKind::MaeLogistic; }

InstanceParams instance_params(const ExperimentSpec& spec, const SweepPoint& p) {
    InstanceParams ip;
    ip.N = spec.N;
    ip.M = p.M;
    ip.J = p.J;
    ip.rho = spec.rho;
    ip.normalize_rows = spec.normalize_rows;
    if (spec.kind == ExperimentKind::Aud) {
        ip.prior_kind = PriorKind::BernoulliBinary;
        ip.matrix_kind = MatrixKind::SignedBernoulli;
    }
    if (is_awgn(spec.kind)) {
        ip.channel = AwgnChannel{p.noise};
    } else {
        ip.channel = LogisticChannel{p.noise, default_mixture()};
    }
    return ip;
}

SignalPrior signal_prior(const ExperimentSpec& spec) {
    return {spec.kind == ExperimentKind::Aud ? PriorKind::BernoulliBinary : PriorKind::BernoulliGaussian, spec.rho};
}

// OMP on the stacked equivalent SMV system; the binary signal is shared by
// every channel, so one recovery serves all J columns.
double omp_hamming(const ExperimentSpec& spec, const ProblemInstance& inst, double delta_z) {
    const auto& ms = inst.measurements;
    const Eigen::Index J = ms.channels();
    const Eigen::Index M = ms.rows();
    Eigen::MatrixXd A(M * J, ms.cols());
    Eigen::VectorXd y(M * J);
    for (Eigen::Index j = 0; j < J; ++j) {
        A.middleRows(j * M, M) = ms.matrices[static_cast<std::size_t>(j)];
        y.segment(j * M, M) = ms.observations[static_cast<std::size_t>(j)];
    }
    OmpConfig cfg;
    cfg.max_atoms = std::min<Eigen::Index>(
        A.rows(), static_cast<Eigen::Index>(std::ceil(spec.omp_atom_factor * spec.rho * static_cast<double>(spec.N))));
    cfg.residual_tol = std::sqrt(static_cast<double>(A.rows()) * delta_z);
    cfg.threshold = spec.omp_threshold;
    const OmpResult res = omp(A, y, cfg);
    const Eigen::VectorXd bits = binarize(res.x_hat, cfg.threshold);
    const Eigen::MatrixXd est = bits.replicate(1, J);
    return compute_empirical_error(inst.signal.entries, est, MetricSpec::parse("hamming"));
}

struct TrialOutcome {
    TrialRecord record;
    Eigen::VectorXd sq_norms;  // roc only: |q_n|^2
    Eigen::Array<bool, Eigen::Dynamic, 1> support;
};

TrialOutcome run_trial(const ExperimentSpec& spec, const SweepPoint& point, std::size_t sweep_index,
                       std::size_t trial_index) {
    TrialOutcome outcome;
    auto& rec = outcome.record;
    rec.sweep_index = sweep_index;
    rec.trial_index = trial_index;
    rec.seed = trial_seed(spec.base_seed, sweep_index, trial_index);
    rec.point = point;
    const auto start = std::chrono::steady_clock::now();

    const ProblemInstance inst = make_instance(instance_params(spec, point), rec.seed);
    const SignalPrior prior = signal_prior(spec);
    try {
        const GampOutput out = run_gamp(inst.measurements, prior, spec.gamp);
        const Eigen::MatrixXd est = apply_metric(out, spec.metric, prior);
        rec.empirical_error = compute_empirical_error(inst.signal.entries, est, spec.metric);
        rec.delta_v_final = out.delta_v;
        rec.iterations = out.iterations;
        rec.converged = out.converged;
        if (spec.kind == ExperimentKind::Roc) {
            outcome.sq_norms = out.q.rowwise().squaredNorm();
            outcome.support = inst.signal.support;
        }
    } catch (const DivergenceError& e) {
        rec.empirical_error = kNaN;
        rec.delta_v_final = kNaN;
        rec.iterations = static_cast<int>(e.trace().size());
        rec.converged = false;
        rec.failure = e.what();
    }
    if (spec.kind == ExperimentKind::Aud) {
        rec.omp_error = omp_hamming(spec, inst, point.noise);
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
    if (v.empty()) {
        return {kNaN, kNaN};
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    const double n = static_cast<double>(v.size());
    const double mean = sum / n;
    if (v.size() < 2) {
        return {mean, kNaN};
    }
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::string opt_num(const std::optional<double>& v) { return v ? csv::num(*v) : std::string(); }

} // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::WseAwgn: return "wse_awgn";
    case ExperimentKind::Roc: return "roc";
    case ExperimentKind::MaeLogistic: return "mae_logistic";
    case ExperimentKind::Aud: return "aud";
    }
    return "unknown";
}

std::string to_string(DeltaVSource source) {
    return source == DeltaVSource::TrialAverage ? "trial_average" : "state_evolution";
}

void ExperimentSpec::validate() const {
    if (N < 1) throw SpecError("key 'N': must be positive");
    if (trials < 1) throw SpecError("key 'trials': must be at least 1");
    if (J_list.empty() || R_list.empty() || noise_list.empty()) throw SpecError("sweep lists must be nonempty");
    for (auto J : J_list) {
        if (J < 1) throw SpecError("key 'J': entries must be positive");
    }
    for (double R : R_list) {
        if (!(R > 0.0) || std::llround(R * static_cast<double>(N)) < 1) {
            throw SpecError("key 'R': entries must give at least one measurement");
        }
    }
    for (double z : noise_list) {
        if (!(z > 0.0)) throw SpecError("key 'noise': entries must be positive");
    }
    if (!(rho > 0.0 && rho < 1.0)) throw SpecError("key 'rho': must lie in (0, 1)");
    if (kind == ExperimentKind::MaeLogistic && delta_v_source == DeltaVSource::StateEvolution) {
        throw SpecError("key 'delta_v_source': state evolution is only available for AWGN channels");
    }
    if (kind == ExperimentKind::Aud && (metric.kind == MetricKind::MAE)) {
        throw SpecError("key 'metric': mae needs the Bernoulli-Gaussian prior");
    }
    if (kind != ExperimentKind::Aud && metric.kind == MetricKind::Hamming) {
        throw SpecError("key 'metric': hamming needs the Bernoulli {0,1} prior of the aud experiment");
    }
    if (mmae_samples < 100) throw SpecError("key 'mmae_samples': must be at least 100");
    if (roc_points < 3) throw SpecError("key 'roc_points': must be at least 3");
    if (!(omp_atom_factor > 0.0)) throw SpecError("key 'omp_atom_factor': must be positive");
    try {
        gamp.validate();
    } catch (const ParameterError& e) {
        throw SpecError(std::string("GAMP settings: ") + e.what());
    }
}

std::string ExperimentSpec::canonical() const {
    std::map<std::string, std::string> kv;
    auto list_i = [](const std::vector<Eigen::Index>& v) {
        std::vector<std::string> s;
        for (auto x : v) s.push_back(std::to_string(x));
        return csv::join(s);
    };
    auto list_d = [](const std::vector<double>& v) {
        std::vector<std::string> s;
        for (auto x : v) s.push_back(csv::num(x));
        return csv::join(s);
    };
    kv["experiment"] = to_string(kind);
    kv["N"] = std::to_string(N);
    kv["J"] = list_i(J_list);
    kv["R"] = list_d(R_list);
    kv["noise"] = list_d(noise_list);
    kv["rho"] = csv::num(rho);
    kv["metric"] = metric.to_string();
    kv["trials"] = std::to_string(trials);
    kv["base_seed"] = std::to_string(base_seed);
    kv["t_max"] = std::to_string(gamp.t_max);
    kv["epsilon"] = csv::num(gamp.epsilon);
    kv["damping"] = csv::num(gamp.damping);
    kv["delta_aggregation"] = gamp.delta_aggregation == DeltaAggregation::Mean ? "mean" : "sum";
    kv["delta_v_source"] = to_string(delta_v_source);
    kv["init_variance"] = gamp.init_variance == InitVariance::Prior ? "prior" : "noise_scaled";
    kv["normalize_rows"] = normalize_rows ? "true" : "false";
    kv["mmae_samples"] = std::to_string(mmae_samples);
    kv["roc_points"] = std::to_string(roc_points);
    kv["omp_atom_factor"] = csv::num(omp_atom_factor);
    kv["omp_threshold"] = csv::num(omp_threshold);
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k + "=" + v + "\n";
    }
    return out;
}

std::string ExperimentSpec::config_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentSpec parse_experiment_spec(std::string_view text, const std::string& source) {
    const auto kv = parse_key_values(text, source);
    for (const auto& [k, v] : kv) {
        if (!known_keys().contains(k)) {
            throw SpecError(source + ": unknown key '" + k + "'");
        }
    }
    const auto kind_it = kv.find("experiment");
    if (kind_it == kv.end()) {
        throw SpecError(source + ": missing key 'experiment'");
    }
    ExperimentSpec spec;
    spec.kind = parse_kind(kind_it->second);
    apply_defaults(spec);

    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto v = get("N")) spec.N = parse_integer(*v, "N");
    if (auto v = get("J")) {
        spec.J_list.clear();
        for (double x : parse_real_list(*v, "J")) {
            if (x != std::floor(x)) throw SpecError("key 'J': entries must be integers");
            spec.J_list.push_back(static_cast<Eigen::Index>(x));
        }
    }
    if (auto v = get("R")) spec.R_list = parse_real_list(*v, "R");
    if (auto v = get("noise")) spec.noise_list = parse_real_list(*v, "noise");
    if (auto v = get("rho")) spec.rho = parse_real(*v, "rho");
    if (auto v = get("metric")) {
        try {
            spec.metric = MetricSpec::parse(*v);
        } catch (const SpecError& e) {
            throw SpecError("key 'metric': " + std::string(e.what()));
        }
    }
    if (auto v = get("trials")) spec.trials = static_cast<int>(parse_integer(*v, "trials"));
    if (auto v = get("base_seed")) spec.base_seed = static_cast<std::uint64_t>(parse_integer(*v, "base_seed"));
    if (auto v = get("t_max")) spec.gamp.t_max = static_cast<int>(parse_integer(*v, "t_max"));
    if (auto v = get("epsilon")) spec.gamp.epsilon = parse_real(*v, "epsilon");
    if (auto v = get("damping")) spec.gamp.damping = parse_real(*v, "damping");
    if (auto v = get("gamp_workers")) spec.gamp.workers = static_cast<int>(parse_integer(*v, "gamp_workers"));
    if (auto v = get("delta_aggregation")) {
        if (*v == "mean") spec.gamp.delta_aggregation = DeltaAggregation::Mean;
        else if (*v == "sum") spec.gamp.delta_aggregation = DeltaAggregation::Sum;
        else throw SpecError("key 'delta_aggregation': expected mean or sum");
    }
    if (auto v = get("init_variance")) {
        if (*v == "prior") spec.gamp.init_variance = InitVariance::Prior;
        else if (*v == "noise_scaled") spec.gamp.init_variance = InitVariance::NoiseScaled;
        else throw SpecError("key 'init_variance': expected prior or noise_scaled");
    }
    if (auto v = get("output")) spec.output_path = *v;
    if (auto v = get("delta_v_source")) {
        if (*v == "trial_average" || *v == "gamp") spec.delta_v_source = DeltaVSource::TrialAverage;
        else if (*v == "se" || *v == "state_evolution") spec.delta_v_source = DeltaVSource::StateEvolution;
        else throw SpecError("key 'delta_v_source': expected trial_average or se");
    }
    if (auto v = get("normalize_rows")) spec.normalize_rows = parse_bool(*v, "normalize_rows");
    if (auto v = get("mmae_samples")) spec.mmae_samples = static_cast<long>(parse_integer(*v, "mmae_samples"));
    if (auto v = get("roc_points")) spec.roc_points = static_cast<int>(parse_integer(*v, "roc_points"));
    if (auto v = get("omp_atom_factor")) spec.omp_atom_factor = parse_real(*v, "omp_atom_factor");
    if (auto v = get("omp_threshold")) spec.omp_threshold = parse_real(*v, "omp_threshold");
    spec.validate();
    return spec;
}

ExperimentSpec read_experiment_spec(const std::filesystem::path& path) {
    const auto kv_text = [&] {
        std::ifstream is(path);
        if (!is) {
            throw SpecError("cannot open spec file '" + path.string() + "'");
        }
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }();
    return parse_experiment_spec(kv_text, path.string());
}

void apply_full_scale(ExperimentSpec& spec) {
    spec.N = 10000;
    spec.trials = 50;
}

std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec) {
    std::vector<SweepPoint> out;
    for (double noise : spec.noise_list) {
        for (double R : spec.R_list) {
            for (Eigen::Index J : spec.J_list) {
                out.push_back({R, J, noise, static_cast<Eigen::Index>(std::llround(R * static_cast<double>(spec.N)))});
            }
        }
    }
    return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t sweep_index, std::size_t trial_index) {
    return derive_seed(base_seed, {static_cast<std::uint64_t>(sweep_index), static_cast<std::uint64_t>(trial_index)});
}

GampOutput run_single_gamp(const ExperimentSpec& spec, std::size_t sweep_index, std::size_t trial_index) {
    const auto points = sweep_points(spec);
    if (sweep_index >= points.size()) {
        throw ParameterError("sweep index out of range");
    }
    const auto inst =
        make_instance(instance_params(spec, points[sweep_index]), trial_seed(spec.base_seed, sweep_index, trial_index));
    return run_gamp(inst.measurements, signal_prior(spec), spec.gamp);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads) {
    spec.validate();
    if (threads < 1) {
        throw ParameterError("threads must be at least 1");
    }
    const auto points = sweep_points(spec);
    const std::size_t per_point = static_cast<std::size_t>(spec.trials);
    const std::size_t total = points.size() * per_point;

    std::vector<TrialOutcome> outcomes(total);
    // Each task writes only its own slot; order is fixed by (sweep, trial).
    parallel_for<std::size_t>(0, total, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            outcomes[i] = run_trial(spec, points[i / per_point], i / per_point, i % per_point);
        }
    });

    ExperimentResult result;
    result.spec = spec;
    for (const auto& o : outcomes) {
        result.trials.push_back(o.record);
    }

    for (std::size_t s = 0; s < points.size(); ++s) {
        const auto& p = points[s];
        AggregateRecord agg;
        agg.sweep_index = s;
        agg.point = p;
        std::vector<double> errors, omp_errors, dvs;
        double iters = 0.0;
        agg.all_converged = true;
        for (std::size_t t = 0; t < per_point; ++t) {
            const auto& rec = outcomes[s * per_point + t].record;
            agg.all_converged = agg.all_converged && rec.converged;
            iters += rec.iterations;
            if (rec.omp_error) {
                omp_errors.push_back(*rec.omp_error);
            }
            if (!std::isnan(rec.empirical_error)) {
                errors.push_back(rec.empirical_error);
                dvs.push_back(rec.delta_v_final);
            }
        }
        agg.n_trials = static_cast<int>(errors.size());
        agg.mean_iterations = iters / static_cast<double>(per_point);
        std::tie(agg.mean_error, agg.std_error) = mean_and_stderr(errors);
        if (!omp_errors.empty()) {
            const auto [m, se] = mean_and_stderr(omp_errors);
            agg.omp_mean = m;
            agg.omp_std_error = se;
        }
        agg.delta_v = dvs.empty() ? kNaN : mean_and_stderr(dvs).first;
        if (spec.delta_v_source == DeltaVSource::StateEvolution) {
            agg.delta_v = state_evolution_delta(p.R, spec.rho, p.J, p.noise);
        }

        if (!std::isnan(agg.delta_v) && agg.delta_v > 0.0) {
            const LimitQuery query{agg.delta_v, spec.rho, p.J, spec.metric.beta};
            if (spec.metric.kind == MetricKind::MWSE && spec.kind != ExperimentKind::Aud) {
                const LimitResult lim = mmwse(query);
                agg.theoretic_error = lim.value;
                agg.p_false_alarm = lim.p_false_alarm;
                agg.p_miss = lim.p_miss;
                agg.theoretic_method = to_string(lim.method);
            } else if (spec.metric.kind == MetricKind::MAE) {
                const LimitResult lim =
                    p.J == 1 ? mmae_quadrature(query)
                             : mmae(query, spec.mmae_samples, derive_seed(spec.base_seed, {stream::monte_carlo, s}));
                agg.theoretic_error = lim.value;
                agg.theoretic_method = to_string(lim.method);
            } else if (spec.metric.kind == MetricKind::MSE && spec.kind != ExperimentKind::Aud) {
                agg.theoretic_error = mmse_of_delta(agg.delta_v, spec.rho, p.J);
                agg.theoretic_method = to_string(LimitMethod::Quadrature);
            }
        }
        result.aggregates.push_back(agg);

        if (spec.kind == ExperimentKind::Roc && !std::isnan(agg.delta_v)) {
            const auto grid = default_roc_grid(agg.delta_v, p.J, spec.roc_points);
            const auto curve = roc_curve(agg.delta_v, p.J, grid);
            const double auc = roc_area(curve);
            for (const auto& pt : curve) {
                double fp = 0.0, tp = 0.0, neg = 0.0, pos = 0.0;
                for (std::size_t t = 0; t < per_point; ++t) {
                    const auto& o = outcomes[s * per_point + t];
                    for (Eigen::Index n = 0; n < o.sq_norms.size(); ++n) {
                        const bool detected = o.sq_norms[n] > pt.threshold;
                        if (o.support[n]) {
                            pos += 1.0;
                            tp += detected ? 1.0 : 0.0;
                        } else {
                            neg += 1.0;
                            fp += detected ? 1.0 : 0.0;
                        }
                    }
                }
                result.roc.push_back({s, p, agg.delta_v, pt.threshold, pt.fpr, pt.tpr, neg > 0 ? fp / neg : kNaN,
                                      pos > 0 ? tp / pos : kNaN, auc});
            }
        }
    }
    return result;
}

std::string experiment_csv_header(ExperimentKind kind) {
    if (kind == ExperimentKind::Roc) {
        return "row_type,experiment,sweep_index,N,M,R,J,rho,noise_param,delta_v,delta_v_source,threshold,fpr,tpr,"
               "empirical_fpr,empirical_tpr,auc,config_hash";
    }
    return "row_type,experiment,sweep_index,trial_index,seed,N,M,R,J,rho,noise_param,metric,empirical_error,"
           "std_error,omp_error,omp_std_error,theoretic_error,theoretic_method,p_fa,p_miss,delta_v,delta_v_source,"
           "n_trials,iterations,converged,t_max,epsilon,damping,delta_aggregation,config_hash";
}

void write_experiment_csv(const ExperimentResult& result, std::ostream& os) {
    const auto& spec = result.spec;
    const std::string hash = spec.config_hash();
    const std::string exp = to_string(spec.kind);
    os << experiment_csv_header(spec.kind) << '\n';
    if (spec.kind == ExperimentKind::Roc) {
        for (const auto& r : result.roc) {
            os << csv::join({"roc", exp, std::to_string(r.sweep_index), std::to_string(spec.N),
                             std::to_string(r.point.M), csv::num(r.point.R), std::to_string(r.point.J),
                             csv::num(spec.rho), csv::num(r.point.noise), csv::num(r.delta_v),
                             to_string(spec.delta_v_source), csv::num(r.threshold), csv::num(r.fpr), csv::num(r.tpr),
                             csv::num(r.empirical_fpr), csv::num(r.empirical_tpr), csv::num(r.auc), hash})
               << '\n';
        }
        return;
    }
    const std::string metric = spec.metric.to_string();
    const std::string aggregation = spec.gamp.delta_aggregation == DeltaAggregation::Mean ? "mean" : "sum";
    auto tail = [&] {
        return std::vector<std::string>{std::to_string(spec.gamp.t_max), csv::num(spec.gamp.epsilon),
                                        csv::num(spec.gamp.damping), aggregation, hash};
    };
    for (const auto& t : result.trials) {
        std::vector<std::string> f{"trial",
                                   exp,
                                   std::to_string(t.sweep_index),
                                   std::to_string(t.trial_index),
                                   std::to_string(t.seed),
                                   std::to_string(spec.N),
                                   std::to_string(t.point.M),
                                   csv::num(t.point.R),
                                   std::to_string(t.point.J),
                                   csv::num(spec.rho),
                                   csv::num(t.point.noise),
                                   metric,
                                   csv::num(t.empirical_error),
                                   "",
                                   opt_num(t.omp_error),
                                   "",
                                   opt_num(t.theoretic_error),
                                   "",
                                   "",
                                   "",
                                   csv::num(t.delta_v_final),
                                   "gamp",
                                   "1",
                                   std::to_string(t.iterations),
                                   t.converged ? "1" : "0"};
        for (auto& s : tail()) f.push_back(s);
        os << csv::join(f) << '\n';
    }
    for (const auto& a : result.aggregates) {
        std::vector<std::string> f{"aggregate",
                                   exp,
                                   std::to_string(a.sweep_index),
                                   "",
                                   "",
                                   std::to_string(spec.N),
                                   std::to_string(a.point.M),
                                   csv::num(a.point.R),
                                   std::to_string(a.point.J),
                                   csv::num(spec.rho),
                                   csv::num(a.point.noise),
                                   metric,
                                   csv::num(a.mean_error),
                                   csv::num(a.std_error),
                                   opt_num(a.omp_mean),
                                   opt_num(a.omp_std_error),
                                   opt_num(a.theoretic_error),
                                   a.theoretic_method,
                                   opt_num(a.p_false_alarm),
                                   opt_num(a.p_miss),
                                   csv::num(a.delta_v),
                                   to_string(spec.delta_v_source),
                                   std::to_string(a.n_trials),
                                   csv::num(a.mean_iterations),
                                   a.all_converged ? "1" : "0"};
        for (auto& s : tail()) f.push_back(s);
        os << csv::join(f) << '\n';
    }
}

} // namespace mmv
