// gmk: fit, forecast, simulate and diagnose multivariate Gaussian Markov
// processes with stationary increments from the command line.
//
// Exit codes: 0 success, 2 domain/estimation error, 3 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmk/csv.hpp"
#include "gmk/diagnostics.hpp"
#include "gmk/estimate.hpp"
#include "gmk/forecast.hpp"
#include "gmk/kernel.hpp"
#include "gmk/simulate.hpp"

namespace {

using gmk::Matrix;
using gmk::Vector;
using nlohmann::json;

Matrix matrix_from_json(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw gmk::InvalidInput("params: " + name + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols)
            throw gmk::InvalidInput("params: ragged rows in " + name);
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j[r][c].get<double>();
    }
    return m;
}

json parse_params_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw gmk::InvalidInput(std::string("--params is not valid JSON: ") + e.what());
    }
}

gmk::KernelParams kernel_params_from_json(const json& j) {
    const Matrix alpha = matrix_from_json(j.at("alpha"), "alpha");
    const Matrix beta = j.contains("beta")
                            ? matrix_from_json(j.at("beta"), "beta")
                            : Matrix(Matrix::Zero(alpha.rows(), alpha.cols()));
    double horizon = j.contains("horizon") ? j.at("horizon").get<double>()
                                           : gmk::max_horizon(alpha, beta);
    return gmk::KernelParams(alpha, beta, horizon);
}

gmk::SemiParamModel model_from_json(const json& j) {
    const Matrix omega = matrix_from_json(j.at("omega"), "omega");
    std::vector<double> breakpoints = j.at("breakpoints").get<std::vector<double>>();
    std::vector<Matrix> blocks;
    for (const auto& b : j.at("blocks"))
        blocks.push_back(matrix_from_json(b, "blocks"));
    return gmk::SemiParamModel(omega, std::move(breakpoints), std::move(blocks));
}

std::string matrix_json(const Matrix& m) {
    std::ostringstream os;
    os << '[';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) os << ',';
        os << '[';
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            os << gmk::render_double(m(r, c));
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

// infinity has no JSON literal; render it as null
std::string number_or_null(double v) {
    return std::isfinite(v) ? gmk::render_double(v) : "null";
}

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed_flag) {
    if (seed_opt->count() > 0) return seed_flag;
    if (const char* env = std::getenv("GMK_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

class OutputStream {
public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw gmk::IoError("cannot open output file: " + path);
        }
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }
    void finish() {
        if (file_) {
            file_->flush();
            if (!*file_) throw gmk::IoError("failed writing output file");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

gmk::KernelParams fitted_params(const gmk::FitReport& report) {
    // the fitted kernel is a valid covariance on [0, t_last] even when the
    // generalized-eigenvalue horizon collapses to t_last exactly; pad so the
    // sample grid itself stays inside the open horizon
    const double mh = gmk::max_horizon(report);
    const double horizon = std::max(mh, report.t_last * (1.0 + 1e-9));
    return gmk::KernelParams(report.alpha_hat, report.beta_hat, horizon);
}

void cmd_fit(const std::string& input, const std::string& output) {
    const gmk::SampleSet data = gmk::parse_csv_file(input);
    gmk::FitReport report = gmk::fit(data);
    report.loglik = gmk::loglik(fitted_params(report), data);
    const double mh = gmk::max_horizon(report);

    OutputStream out(output);
    out.get() << "{\"m\":" << report.dim() << ",\"n\":" << report.n
              << ",\"t_last\":" << gmk::render_double(report.t_last)
              << ",\"alpha_hat\":" << matrix_json(report.alpha_hat)
              << ",\"beta_hat\":" << matrix_json(report.beta_hat)
              << ",\"loglik\":" << number_or_null(*report.loglik)
              << ",\"max_horizon\":" << number_or_null(mh) << "}\n";
    out.finish();
}

void cmd_forecast(const std::string& input, const std::string& output,
                  const std::vector<double>& query, double band) {
    const gmk::SampleSet data = gmk::parse_csv_file(input);
    const gmk::FitReport report = gmk::fit(data);

    OutputStream out(output);
    if (query.empty()) {
        gmk::Forecast empty;
        gmk::write_forecast_csv(out.get(), empty, report.dim());
    } else {
        const gmk::Forecast f =
            gmk::forecast_path(report, gmk::TimeGrid(query), band);
        gmk::write_forecast_csv(out.get(), f, report.dim());
    }
    out.finish();
}

void cmd_simulate(const std::string& params_text, const std::string& method,
                  const std::string& output, const std::vector<double>& query,
                  std::size_t n_paths, double dt, double t_end,
                  std::uint64_t seed) {
    const json j = parse_params_json(params_text);
    const gmk::TimeGrid grid(query);
    gmk::PathBatch batch = [&] {
        if (method == "exact")
            return gmk::sample_paths(kernel_params_from_json(j), grid, n_paths, seed);
        if (method == "euler") {
            const double end = t_end > 0.0 ? t_end : grid.last();
            return gmk::euler_maruyama(model_from_json(j), dt, end, n_paths, seed, grid);
        }
        throw gmk::InvalidInput("--method must be exact or euler");
    }();

    OutputStream out(output);
    gmk::write_batch_csv(out.get(), batch);
    out.finish();
}

void cmd_bridge(const std::string& params_text, const std::string& output,
                double u, const std::vector<double>& x_u,
                const std::vector<double>& query, std::size_t n_paths,
                std::uint64_t seed) {
    const json j = parse_params_json(params_text);
    const Matrix alpha = matrix_from_json(j.at("alpha"), "alpha");
    Vector x(static_cast<Eigen::Index>(x_u.size()));
    for (std::size_t i = 0; i < x_u.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = x_u[i];

    const gmk::PathBatch batch =
        gmk::sample_bridge(alpha, u, x, gmk::TimeGrid(query), n_paths, seed);
    OutputStream out(output);
    gmk::write_batch_csv(out.get(), batch);
    out.finish();
}

void cmd_diagnose(const std::string& params_text, const std::string& output,
                  double span, std::size_t n_paths, std::uint64_t seed) {
    const json j = parse_params_json(params_text);
    const gmk::KernelParams params = kernel_params_from_json(j);
    gmk::AutocorrReport rep = gmk::increment_autocorr(params, span);

    if (n_paths > 0) {
        // Monte Carlo counterpart on the equispaced grid [s, 2s, 3s]
        const gmk::TimeGrid grid({span, 2.0 * span, 3.0 * span});
        const gmk::PathBatch batch = gmk::sample_paths(params, grid, n_paths, seed);
        const gmk::EmpiricalAutocorr emp = gmk::empirical_increment_autocorr(batch, 1, 1);
        rep.empirical_rho = emp.rho;
        rep.empirical_rho_sq = emp.rho_sq;
    }

    OutputStream out(output);
    out.get() << "{\"s\":" << gmk::render_double(rep.s)
              << ",\"theoretical_rho\":" << gmk::render_double(rep.theoretical_rho)
              << ",\"theoretical_rho_sq\":" << gmk::render_double(rep.theoretical_rho_sq)
              << ",\"empirical_rho\":"
              << (rep.empirical_rho ? gmk::render_double(*rep.empirical_rho) : "null")
              << ",\"empirical_rho_sq\":"
              << (rep.empirical_rho_sq ? gmk::render_double(*rep.empirical_rho_sq) : "null")
              << ",\"inequality_ok\":" << (rep.inequality_ok ? "true" : "false")
              << "}\n";
    out.finish();
}

void cmd_kernel_eval(const std::string& params_text, const std::string& output,
                     double t, double s) {
    const gmk::KernelParams params =
        kernel_params_from_json(parse_params_json(params_text));
    const Matrix value = gmk::kernel_eval(params, t, s);
    OutputStream out(output);
    out.get() << "{\"m\":" << params.dim()
              << ",\"t\":" << gmk::render_double(t)
              << ",\"s\":" << gmk::render_double(s)
              << ",\"value\":" << matrix_json(value) << "}\n";
    out.finish();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian Markov processes with stationary increments: "
                 "closed-form fitting, forecasting, simulation, diagnostics"};
    app.require_subcommand(1);

    std::string input, output, params_text;
    std::string method = "exact";
    std::vector<double> query, x_u;
    std::uint64_t seed = 0;
    std::size_t n_paths = 1;
    double dt = 1e-3, t_end = 0.0, band = 1.96, u = 0.0, t_query = 0.0,
           s_query = 0.0, span = 1.0;

    auto* fit_cmd = app.add_subcommand("fit", "estimate (alpha, beta) from a CSV sample");
    fit_cmd->add_option("--input", input, "CSV file `time,x1,...,xm`")->required();
    fit_cmd->add_option("--output", output, "output path (default stdout)");

    auto* fc_cmd = app.add_subcommand("forecast", "posterior moments beyond the last sample");
    fc_cmd->add_option("--input", input)->required();
    fc_cmd->add_option("--output", output);
    fc_cmd->add_option("--query", query, "query times t1,t2,...")->delimiter(',');
    fc_cmd->add_option("--band", band, "marginal band multiplier (default 1.96)");

    auto* sim_cmd = app.add_subcommand("simulate", "sample paths (exact or Euler-Maruyama)");
    sim_cmd->add_option("--params", params_text, "JSON kernel params or SDE model")->required();
    sim_cmd->add_option("--method", method, "exact | euler");
    sim_cmd->add_option("--query", query, "record grid t1,t2,...")->delimiter(',')->required();
    sim_cmd->add_option("--n-paths", n_paths);
    sim_cmd->add_option("--dt", dt, "Euler step");
    sim_cmd->add_option("--t-end", t_end, "Euler end time (default: last grid time)");
    auto* sim_seed = sim_cmd->add_option("--seed", seed);
    sim_cmd->add_option("--output", output);

    auto* br_cmd = app.add_subcommand("bridge", "sample a matrix-scaled Brownian bridge");
    br_cmd->add_option("--params", params_text, "JSON {\"alpha\": [[...]]}")->required();
    br_cmd->add_option("--u", u, "endpoint time")->required();
    br_cmd->add_option("--x-u", x_u, "endpoint state x1,...,xm")->delimiter(',')->required();
    br_cmd->add_option("--query", query, "grid in (0, u]")->delimiter(',')->required();
    br_cmd->add_option("--n-paths", n_paths);
    auto* br_seed = br_cmd->add_option("--seed", seed);
    br_cmd->add_option("--output", output);

    auto* diag_cmd = app.add_subcommand("diagnose", "increment autocorrelation report");
    diag_cmd->add_option("--params", params_text, "JSON kernel params")->required();
    diag_cmd->add_option("--s", span, "increment span")->required();
    diag_cmd->add_option("--n-paths", n_paths, "simulate this many paths for the "
                                               "empirical part (0 = closed form only)");
    auto* diag_seed = diag_cmd->add_option("--seed", seed);
    diag_cmd->add_option("--output", output);

    auto* ke_cmd = app.add_subcommand("kernel-eval", "evaluate the kernel at (t, s)");
    ke_cmd->add_option("--params", params_text)->required();
    ke_cmd->add_option("--t", t_query)->required();
    ke_cmd->add_option("--s", s_query)->required();
    ke_cmd->add_option("--output", output);

    n_paths = 0; // diagnose default: closed form only
    CLI11_PARSE(app, argc, argv);
    if (sim_cmd->parsed() || br_cmd->parsed())
        if (n_paths == 0) n_paths = 1;

    try {
        if (fit_cmd->parsed()) {
            cmd_fit(input, output);
        } else if (fc_cmd->parsed()) {
            cmd_forecast(input, output, query, band);
        } else if (sim_cmd->parsed()) {
            cmd_simulate(params_text, method, output, query, n_paths, dt, t_end,
                         resolve_seed(sim_seed, seed));
        } else if (br_cmd->parsed()) {
            cmd_bridge(params_text, output, u, x_u, query, n_paths,
                       resolve_seed(br_seed, seed));
        } else if (diag_cmd->parsed()) {
            cmd_diagnose(params_text, output, span, n_paths,
                         resolve_seed(diag_seed, seed));
        } else if (ke_cmd->parsed()) {
            cmd_kernel_eval(params_text, output, t_query, s_query);
        }
    } catch (const gmk::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
