#include "mmv/instance_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmv/csv.hpp"
#include "mmv/errors.hpp"

namespace mmv {

namespace {

constexpr int kFormatVersion = 1;

std::string prior_name(PriorKind k) {
    return k == PriorKind::BernoulliGaussian ? "bernoulli_gaussian" : "bernoulli_binary";
}

std::string matrix_name(MatrixKind k) {
    return k == MatrixKind::GaussianUnitRow ? "gaussian_unit_row" : "signed_bernoulli";
}

} // namespace

void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) {
        throw ParameterError("cannot write " + path.string());
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) {
                os << ',';
            }
            os << csv::num(m(r, c));
        }
        os << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw ParameterError("cannot read " + path.string());
    }
    std::vector<double> values;
    Eigen::Index rows = 0;
    Eigen::Index cols = -1;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        Eigen::Index count = 0;
        const char* p = line.c_str();
        while (*p) {
            char* end = nullptr;
            values.push_back(std::strtod(p, &end));
            if (end == p) {
                throw SpecError(path.string() + ": bad number on row " + std::to_string(rows + 1));
            }
            ++count;
            p = end;
            if (*p == ',') {
                ++p;
            }
        }
        if (cols >= 0 && count != cols) {
            throw SpecError(path.string() + ": ragged row " + std::to_string(rows + 1));
        }
        cols = count;
        ++rows;
    }
    Eigen::MatrixXd m(rows, std::max<Eigen::Index>(cols, 0));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
        }
    }
    return m;
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto& p = inst.params;
    nlohmann::json h;
    h["format_version"] = kFormatVersion;
    h["N"] = p.N;
    h["M"] = p.M;
    h["J"] = p.J;
    h["rho"] = p.rho;
    h["prior"] = prior_name(p.prior_kind);
    h["matrix"] = matrix_name(p.matrix_kind);
    h["normalize_rows"] = p.normalize_rows;
    if (const auto* awgn = std::get_if<AwgnChannel>(&p.channel)) {
        h["channel"] = {{"kind", "awgn"}, {"delta_z", awgn->delta_z}};
    } else {
        h["channel"] = {{"kind", "logistic"}, {"a", std::get<LogisticChannel>(p.channel).a}};
    }
    h["seed"] = inst.seed;
    std::ofstream(dir / "header.json") << h.dump(2) << '\n';

    write_matrix_csv(inst.signal.entries, dir / "X.csv");
    for (Eigen::Index j = 0; j < p.J; ++j) {
        const auto sj = std::to_string(j);
        write_matrix_csv(inst.measurements.matrices[static_cast<std::size_t>(j)], dir / ("A_" + sj + ".csv"));
        write_matrix_csv(inst.measurements.observations[static_cast<std::size_t>(j)], dir / ("y_" + sj + ".csv"));
    }
}

ProblemInstance load_instance(const std::filesystem::path& dir) {
    std::ifstream is(dir / "header.json");
    if (!is) {
        throw ParameterError("no header.json in " + dir.string());
    }
    nlohmann::json h;
    ProblemInstance inst;
    try {
        is >> h;
        if (h.at("format_version").get<int>() != kFormatVersion) {
            throw SpecError("unsupported instance format version");
        }
        auto& p = inst.params;
        p.N = h.at("N").get<Eigen::Index>();
        p.M = h.at("M").get<Eigen::Index>();
        p.J = h.at("J").get<Eigen::Index>();
        p.rho = h.at("rho").get<double>();
        const auto prior = h.at("prior").get<std::string>();
        if (prior != "bernoulli_gaussian" && prior != "bernoulli_binary") {
            throw SpecError("unknown prior '" + prior + "'");
        }
        p.prior_kind = prior == "bernoulli_gaussian" ? PriorKind::BernoulliGaussian : PriorKind::BernoulliBinary;
        p.matrix_kind = h.at("matrix").get<std::string>() == "gaussian_unit_row" ? MatrixKind::GaussianUnitRow
                                                                                  : MatrixKind::SignedBernoulli;
        p.normalize_rows = h.at("normalize_rows").get<bool>();
        const auto& ch = h.at("channel");
        if (ch.at("kind").get<std::string>() == "awgn") {
            p.channel = AwgnChannel{ch.at("delta_z").get<double>()};
        } else {
            p.channel = LogisticChannel{ch.at("a").get<double>(), default_mixture()};
        }
        inst.seed = h.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(dir.string() + "/header.json: " + e.what());
    }
    validate(inst.params.channel);

    const auto& p = inst.params;
    inst.signal.entries = read_matrix_csv(dir / "X.csv");
    if (inst.signal.entries.rows() != p.N || inst.signal.entries.cols() != p.J) {
        throw SpecError("X.csv shape does not match header");
    }
    inst.signal.support = (inst.signal.entries.array() != 0.0).rowwise().any();
    inst.signal.rho = p.rho;
    inst.signal.prior_kind = p.prior_kind;
    inst.measurements.channel = p.channel;
    for (Eigen::Index j = 0; j < p.J; ++j) {
        const auto sj = std::to_string(j);
        Eigen::MatrixXd A = read_matrix_csv(dir / ("A_" + sj + ".csv"));
        Eigen::MatrixXd y = read_matrix_csv(dir / ("y_" + sj + ".csv"));
        if (A.rows() != p.M || A.cols() != p.N || y.rows() != p.M || y.cols() != 1) {
            throw SpecError("channel " + sj + " files do not match header dimensions");
        }
        inst.measurements.matrices.push_back(std::move(A));
        inst.measurements.observations.push_back(y.col(0));
    }
    return inst;
}

} // namespace mmv
