#include "msteer/runner.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "msteer/maxent.hpp"

namespace msteer {

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseError:
        return 2;
    case ErrorCode::ValidationError:
        return 3;
    case ErrorCode::NoFeasibleStart:
        return 4;
    case ErrorCode::ControlInfeasible:
    case ErrorCode::RetryBudgetExceeded:
        return 5;
    case ErrorCode::SigmaNotPD:
    case ErrorCode::NotInteriorPoint:
    case ErrorCode::LineSearchStalled:
    case ErrorCode::MaxIterations:
        return 6;
    case ErrorCode::UnboundedRatio:
    case ErrorCode::AcceptanceStalled:
        return 7;
    case ErrorCode::MomentsInfeasible:
    case ErrorCode::EntropyOrderViolated:
        return 8;
    case ErrorCode::OrderMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::EmptyEnsemble:
    case ErrorCode::UnsupportedFamily:
    case ErrorCode::WeightSumInvalid:
    case ErrorCode::OutOfSupport:
        return 9;
    case ErrorCode::IoError:
        return 10;
    }
    return 1;
}

namespace {

// fixed stream layout so reruns reproduce artifacts byte for byte
constexpr std::uint64_t kCoeffStream = 0;
constexpr std::uint64_t kInitialStream = 1;
constexpr std::uint64_t kSamplingStream = 2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& vals) {
    std::string s;
    for (size_t i = 0; i < vals.size(); ++i) {
        if (i) {
            s += ',';
        }
        s += fmt(vals[i]);
    }
    return s;
}

std::vector<double> to_vec(const MomentSequence& m) {
    return {m.values().data(), m.values().data() + m.values().size()};
}

class ArtifactWriter {
  public:
    ArtifactWriter(std::filesystem::path dir, std::vector<std::string>& files)
        : dir_(std::move(dir)), files_(files) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) {
            throw Error(ErrorCode::IoError,
                        "cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    std::ofstream open(const std::string& name) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) {
            throw Error(ErrorCode::IoError, "cannot write " + (dir_ / name).string());
        }
        files_.push_back(name);
        return f;
    }

  private:
    std::filesystem::path dir_;
    std::vector<std::string>& files_;
};

std::string moment_header(int order) {
    std::string h = "k";
    for (int l = 1; l <= 2 * order; ++l) {
        h += ",m" + std::to_string(l);
    }
    return h;
}

void write_states_csv(ArtifactWriter& w, const SteeringPlan& plan, int order) {
    auto f = w.open("moments_states.csv");
    f << moment_header(order) << "\n";
    for (size_t k = 0; k < plan.states.size(); ++k) {
        f << k << ',' << join(to_vec(plan.states[k])) << "\n";
    }
}

void write_controls_csv(ArtifactWriter& w, const SteeringPlan& plan, int order, int horizon) {
    auto f = w.open("moments_controls.csv");
    f << moment_header(order) << "\n";
    const std::vector<double> zeros(2 * static_cast<size_t>(order), 0.0);
    for (int k = 0; k < horizon; ++k) {
        if (k < plan.k0) {
            f << k << ',' << join(zeros) << "\n";
        } else {
            f << k << ',' << join(to_vec(plan.controls[static_cast<size_t>(k - plan.k0)]))
              << "\n";
        }
    }
}

void write_density_csvs(ArtifactWriter& w, const SteeringRun& run) {
    for (size_t i = 0; i < run.realized_controls.size(); ++i) {
        const int k = run.plan.k0 + static_cast<int>(i);
        const RationalDensity& p = run.realized_controls[i];
        auto f = w.open("control_density_" + std::to_string(k) + ".csv");
        f << "u,p\n";
        for (int j = 0; j < p.grid.size(); ++j) {
            const double u = p.grid.nodes(j);
            f << fmt(u) << ',' << fmt(evaluate(p, u)) << "\n";
        }
    }
}

void write_column_csv(ArtifactWriter& w, const std::string& name, const std::string& header,
                      const std::vector<double>& values) {
    auto f = w.open(name);
    f << header << "\n";
    for (double v : values) {
        f << fmt(v) << "\n";
    }
}

void append_report_moments(std::ostream& os, const std::string& label,
                           const std::vector<double>& got, const MomentSequence& want) {
    os << label << "_moments = " << join(got) << "\n";
    std::vector<double> rel(got.size());
    for (size_t l = 0; l < got.size(); ++l) {
        const double w = want.moment(static_cast<int>(l) + 1);
        rel[l] = std::abs(got[l] - w) / (1.0 + std::abs(w));
    }
    os << label << "_rel_error = " << join(rel) << "\n";
}

void append_error_bound(std::ostream& os, const ErrorBoundReport& rep) {
    os << "[error-bound]\n";
    os << "H_maxent = " << fmt(rep.H_maxent) << "\n";
    os << "H_terminal = " << fmt(rep.H_terminal) << "\n";
    os << "H_desired = " << fmt(rep.H_desired) << "\n";
    os << "KL_terminal = " << fmt(rep.KL_terminal) << "\n";
    os << "KL_desired = " << fmt(rep.KL_desired) << "\n";
    os << "TV_bound = " << fmt(rep.TV_bound) << "\n";
}

SystemSchedule build_schedule(const RunConfig& cfg) {
    std::vector<double> a;
    if (cfg.coeffs.kind == CoeffKind::Uniform) {
        RngStream s(cfg.seed, kCoeffStream);
        a.reserve(static_cast<size_t>(cfg.horizon));
        for (int k = 0; k < cfg.horizon; ++k) {
            a.push_back(s.uniform(cfg.coeffs.lo, cfg.coeffs.hi));
        }
    } else {
        a = cfg.coeffs.values;
    }
    return SystemSchedule(cfg.horizon, cfg.order, std::move(a));
}

std::vector<double> initial_ensemble(const RunConfig& cfg) {
    if (cfg.initial_samples.has_value()) {
        std::ifstream f(*cfg.initial_samples);
        if (!f) {
            throw Error(ErrorCode::IoError, "cannot read samples from " + *cfg.initial_samples);
        }
        std::vector<double> xs;
        double v = 0.0;
        while (f >> v) {
            xs.push_back(v);
        }
        if (!f.eof()) {
            throw Error(ErrorCode::ParseError,
                        "non-numeric content in " + *cfg.initial_samples);
        }
        if (xs.empty()) {
            throw Error(ErrorCode::EmptyEnsemble, *cfg.initial_samples + " holds no samples");
        }
        return xs;
    }
    RngStream s(cfg.seed, kInitialStream);
    std::vector<double> xs(static_cast<size_t>(cfg.agents));
    for (auto& x : xs) {
        x = draw_from_spec(*cfg.initial, s);
    }
    return xs;
}

void write_run_header(std::ostream& os, const RunConfig& cfg, const SystemSchedule& sched,
                      const SteeringPlan& plan) {
    os << "schema = 1\n";
    os << "mode = " << (cfg.mode == SteeringMode::Density ? "density" : "occupation") << "\n";
    os << "order = " << cfg.order << "\n";
    os << "horizon = " << cfg.horizon << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "coeffs = " << join(sched.coeffs) << "\n";
    os << "k0 = " << plan.k0 << "\n";
    os << "weights = " << join(plan.weights) << "\n";
    if (cfg.constraint.bounded) {
        os << "constraint = [" << fmt(cfg.constraint.lo) << ", " << fmt(cfg.constraint.hi)
           << "]\n";
    } else {
        os << "constraint = none\n";
    }
}

} // namespace

RunArtifacts run(const RunConfig& config) {
    RunArtifacts artifacts;
    artifacts.directory = config.output;
    ArtifactWriter writer(artifacts.directory, artifacts.files);

    const SystemSchedule sched = build_schedule(config);
    RealizeOptions options;
    options.node_count = config.nodes;
    options.tol = config.tol;
    options.heavy_tail = config.heavy_tail;

    if (config.mode == SteeringMode::Density) {
        const MomentSequence x_T = moments_of_density(*config.terminal, config.order);
        if (config.check_only) {
            const SteeringPlan plan =
                derive_plan(moments_of_density(*config.initial, config.order), x_T, sched);
            write_states_csv(writer, plan, config.order);
            write_controls_csv(writer, plan, config.order, config.horizon);
            auto rep = writer.open("report.txt");
            write_run_header(rep, config, sched, plan);
            append_report_moments(rep, "planned_terminal", to_vec(plan.states.back()), x_T);
            return artifacts;
        }
        const SteeringRun run_result =
            run_density_steering(*config.initial, *config.terminal, sched, config.constraint,
                                 options);
        write_states_csv(writer, run_result.plan, config.order);
        write_controls_csv(writer, run_result.plan, config.order, config.horizon);
        write_density_csvs(writer, run_result);
        auto rep = writer.open("report.txt");
        write_run_header(rep, config, sched, run_result.plan);
        append_report_moments(rep, "desired", to_vec(x_T), x_T);
        append_report_moments(rep, "planned_terminal", to_vec(run_result.plan.states.back()),
                              x_T);
        append_error_bound(rep, terminal_error_bound(*config.terminal, *config.terminal,
                                                     config.order, Support::real_line()));
        return artifacts;
    }

    // occupation mode
    std::vector<double> states = initial_ensemble(config);
    const MomentSequence x_T = moments_of_density(*config.terminal, config.order);
    if (config.check_only) {
        const SteeringPlan plan =
            derive_plan(moments_of_samples(states, config.order), x_T, sched);
        write_states_csv(writer, plan, config.order);
        write_controls_csv(writer, plan, config.order, config.horizon);
        auto rep = writer.open("report.txt");
        write_run_header(rep, config, sched, plan);
        append_report_moments(rep, "planned_terminal", to_vec(plan.states.back()), x_T);
        return artifacts;
    }

    const MomentSequence x0_emp = moments_of_samples(states, config.order);
    auto [run_result, ensemble] =
        run_occupation_steering(std::move(states), *config.terminal, sched, config.constraint,
                                RngStream(config.seed, kSamplingStream), config.history,
                                options);

    write_states_csv(writer, run_result.plan, config.order);
    write_controls_csv(writer, run_result.plan, config.order, config.horizon);
    write_density_csvs(writer, run_result);
    if (config.history) {
        for (size_t k = 0; k < ensemble.state_history.size(); ++k) {
            write_column_csv(writer, "agents_" + std::to_string(k) + ".csv", "x",
                             ensemble.state_history[k]);
        }
        for (size_t k = 0; k < ensemble.control_history.size(); ++k) {
            if (!ensemble.control_history[k].empty()) {
                write_column_csv(writer, "controls_" + std::to_string(k) + ".csv", "u",
                                 ensemble.control_history[k]);
            }
        }
    }

    const MomentSequence terminal_emp = moments_of_samples(ensemble.states, config.order);
    auto rep = writer.open("report.txt");
    write_run_header(rep, config, sched, run_result.plan);
    rep << "agents = " << ensemble.states.size() << "\n";
    append_report_moments(rep, "desired", to_vec(x_T), x_T);
    append_report_moments(rep, "planned_terminal", to_vec(run_result.plan.states.back()), x_T);
    append_report_moments(rep, "empirical_initial", to_vec(x0_emp),
                          run_result.initial_moments);
    append_report_moments(rep, "empirical_terminal", to_vec(terminal_emp), x_T);
    append_error_bound(rep, terminal_error_bound(ensemble.states, *config.terminal,
                                                 config.order, Support::real_line()));
    return artifacts;
}

} // namespace msteer
