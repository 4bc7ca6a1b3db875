#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "efwe/datasets.hpp"
#include "efwe/distributions.hpp"
#include "efwe/errors.hpp"
#include "efwe/inference.hpp"

namespace efwe::cli {

namespace {

using nlohmann::json;

// Thrown for inputs that parse but make no sense together.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Logger {
public:
    enum Level { kError = 0, kInfo = 1, kDebug = 2 };

    explicit Logger(std::ostream& err) : err_(err) {
        if (const char* env = std::getenv("EFWE_LOG")) {
            const std::string v = env;
            if (v == "info") level_ = kInfo;
            if (v == "debug") level_ = kDebug;
        }
    }

    void log(Level level, const std::string& msg) const {
        static constexpr const char* kNames[] = {"error", "info", "debug"};
        if (level <= level_) err_ << "efwe " << kNames[level] << ": " << msg << '\n';
    }

private:
    std::ostream& err_;
    Level level_ = kError;
};

// Text mode: 6 significant digits.
std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

// CSV: shortest form that round-trips.
std::string exact(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct DataSource {
    std::string path;
    bool aarset = false;
    std::string column = "0";

    void attach(CLI::App* cmd) {
        auto* data = cmd->add_option("--data", path, "CSV file of lifetimes");
        auto* builtin = cmd->add_flag("--aarset", aarset, "use the built-in Aarset data (n = 50)");
        data->excludes(builtin);
        cmd->add_option("--column", column, "CSV column, by 0-based index or header name")
            ->capture_default_str();
    }

    bool given() const { return aarset || !path.empty(); }

    Dataset load() const {
        if (aarset) return efwe::aarset();
        if (path.empty()) throw UsageError("one of --data or --aarset is required");
        Column col = column;
        if (!column.empty() && std::all_of(column.begin(), column.end(),
                                           [](unsigned char c) { return std::isdigit(c); })) {
            col = static_cast<std::size_t>(std::stoul(column));
        }
        return load_csv(path, col);
    }
};

EfweParams parse_params(const std::vector<double>& v) {
    if (v.size() != 3) throw UsageError("--params expects three values alpha,beta,lambda");
    try {
        return EfweParams(v[0], v[1], v[2]);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    double lo = 0.0, hi = 0.0;
    long steps = 0;
    auto bad = [&] { return UsageError("--grid must be lo:hi:steps with 0 < lo <= hi, steps >= 1"); };
    if (parts.size() != 3) throw bad();
    try {
        std::size_t used = 0;
        lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw bad();
        hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw bad();
        steps = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw bad();
    } catch (const std::logic_error&) {
        throw bad();
    }
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi) || steps < 1 || (steps == 1 && hi != lo)) {
        throw bad();
    }
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (long i = 0; i < steps; ++i) {
        grid[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    }
    grid.back() = hi;
    return grid;
}

json fit_json(const FitResult& fit) {
    json params = json::object();
    json ci = json::object();
    for (std::size_t i = 0; i < fit.params.size(); ++i) {
        params[fit.names[i]] = fit.params[i];
        ci[fit.names[i]] = {fit.ci[i].lo, fit.ci[i].hi};
    }
    json vcov = json::array();
    for (Eigen::Index i = 0; i < fit.vcov.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < fit.vcov.cols(); ++j) row.push_back(fit.vcov(i, j));
        vcov.push_back(row);
    }
    json out = {
        {"model", to_string(fit.family)},
        {"n", fit.n},
        {"params", params},
        {"loglik", fit.loglik},
        {"aic", fit.aic},
        {"aicc", fit.aicc},
        {"bic", fit.bic},
        {"ks", fit.ks_stat},
        {"ks_pvalue", fit.ks_pvalue},
        {"level", fit.level},
        {"ci", ci},
        {"vcov", vcov},
        {"defect", fit.defect},
        {"converged", fit.converged},
        {"score_norm", fit.score_norm},
        {"iterations", fit.iterations},
    };
    if (fit.family == Family::Efwe) {
        out["likelihood"] = fit.likelihood == Likelihood::Verbatim ? "verbatim" : "conditional";
    }
    if (!fit.note.empty()) out["note"] = fit.note;
    return out;
}

void fit_text(const FitResult& fit, const Dataset& data, std::ostream& out) {
    out << "model           " << to_string(fit.family);
    if (fit.family == Family::Efwe) {
        out << (fit.likelihood == Likelihood::Verbatim ? " (verbatim likelihood)"
                                                       : " (conditional likelihood)");
    }
    out << "\ndata            " << data.label() << " (n = " << data.size() << ")\n\n";

    const std::string pct = num(100.0 * fit.level) + "%";
    out << std::left << std::setw(12) << "parameter" << std::right << std::setw(14) << "estimate"
        << std::setw(14) << "std.err" << std::setw(14) << (pct + " lower") << std::setw(14)
        << (pct + " upper") << '\n';
    for (std::size_t i = 0; i < fit.params.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out << std::left << std::setw(12) << fit.names[i] << std::right << std::setw(14)
            << num(fit.params[i]) << std::setw(14) << num(std::sqrt(fit.vcov(k, k)))
            << std::setw(14) << num(fit.ci[i].lo) << std::setw(14) << num(fit.ci[i].hi) << '\n';
    }
    out << "\nlog-likelihood  " << num(fit.loglik) << '\n'
        << "AIC             " << num(fit.aic) << '\n'
        << "AICC            " << num(fit.aicc) << '\n'
        << "BIC             " << num(fit.bic) << '\n'
        << "K-S             " << num(fit.ks_stat) << " (p = " << num(fit.ks_pvalue) << ")\n"
        << "defect F(0+)    " << num(fit.defect) << '\n'
        << "converged       " << (fit.converged ? "yes" : "no");
    if (!fit.note.empty()) out << " (" << fit.note << ")";
    out << "\n\nvariance-covariance\n";
    for (Eigen::Index i = 0; i < fit.vcov.rows(); ++i) {
        out << "  ";
        for (Eigen::Index j = 0; j < fit.vcov.cols(); ++j) out << std::setw(14) << num(fit.vcov(i, j));
        out << '\n';
    }
}

struct CompareRow {
    Family family;
    std::optional<FitResult> fit;
    std::string error;
};

int cmd_fit(const DataSource& src, const std::string& model, double level,
            const std::string& likelihood, const std::string& format, std::ostream& out,
            const Logger& log) {
    const Family family = parse_family(model);
    const Dataset data = src.load();
    FitOptions options;
    options.level = level;
    options.likelihood = likelihood == "conditional" ? Likelihood::Conditional : Likelihood::Verbatim;
    log.log(Logger::kInfo, "fitting " + model + " to " + data.label() + " (n = " +
                               std::to_string(data.size()) + ")");
    const FitResult fit = fit_mle(data, family, options);
    log.log(Logger::kDebug, "simplex iterations " + std::to_string(fit.iterations) +
                                ", score norm " + num(fit.score_norm));
    if (format == "json") {
        out << fit_json(fit).dump(2) << '\n';
    } else {
        fit_text(fit, data, out);
    }
    if (!fit.converged) {
        log.log(Logger::kError, "fit did not converge: " + fit.note);
        return kNonConvergence;
    }
    return kOk;
}

int cmd_compare(const DataSource& src, const std::vector<std::string>& models,
                const std::string& format, std::ostream& out, const Logger& log) {
    if (models.empty()) throw UsageError("--models needs at least one family");
    std::vector<Family> families;
    for (const auto& m : models) {
        Family f;
        try {
            f = parse_family(m);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
    }
    const Dataset data = src.load();

    std::vector<std::future<FitResult>> jobs;
    for (Family f : families) {
        jobs.push_back(std::async(std::launch::async, [&data, f] { return fit_mle(data, f); }));
    }
    std::vector<CompareRow> rows;
    for (std::size_t i = 0; i < families.size(); ++i) {
        CompareRow row{families[i], std::nullopt, {}};
        try {
            row.fit = jobs[i].get();
            if (!row.fit->converged) row.error = "not converged: " + row.fit->note;
        } catch (const DataError&) {
            throw;
        } catch (const DegenerateDataError&) {
            throw;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        if (!row.error.empty()) {
            log.log(Logger::kError, std::string(to_string(row.family)) + ": " + row.error);
        }
        rows.push_back(std::move(row));
    }
    // Stable: rows that tie on both criteria keep the requested order.
    std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
        if (a.fit.has_value() != b.fit.has_value()) return a.fit.has_value();
        if (!a.fit) return false;
        if (a.fit->aic != b.fit->aic) return a.fit->aic < b.fit->aic;
        return a.fit->bic < b.fit->bic;
    });

    bool all_ok = true;
    if (format == "json") {
        json arr = json::array();
        int rank = 0;
        for (const auto& row : rows) {
            json r = row.fit ? fit_json(*row.fit) : json{{"model", to_string(row.family)}};
            r["rank"] = row.fit ? json(++rank) : json(nullptr);
            if (!row.error.empty()) r["error"] = row.error;
            all_ok = all_ok && row.error.empty();
            arr.push_back(r);
        }
        out << json{{"data", data.label()}, {"n", data.size()}, {"models", arr}}.dump(2) << '\n';
    } else {
        out << std::left << std::setw(6) << "rank" << std::setw(10) << "model" << std::right
            << std::setw(4) << "k" << std::setw(12) << "loglik" << std::setw(12) << "AIC"
            << std::setw(12) << "AICC" << std::setw(12) << "BIC" << std::setw(12) << "K-S"
            << std::setw(12) << "p-value" << "  flag\n";
        int rank = 0;
        for (const auto& row : rows) {
            all_ok = all_ok && row.error.empty();
            out << std::left << std::setw(6) << (row.fit ? std::to_string(++rank) : "-")
                << std::setw(10) << to_string(row.family) << std::right << std::setw(4)
                << parameter_count(row.family);
            if (row.fit) {
                const FitResult& f = *row.fit;
                out << std::setw(12) << num(f.loglik) << std::setw(12) << num(f.aic)
                    << std::setw(12) << num(f.aicc) << std::setw(12) << num(f.bic)
                    << std::setw(12) << num(f.ks_stat) << std::setw(12) << num(f.ks_pvalue);
            }
            out << "  " << (row.error.empty() ? "ok" : row.error) << '\n';
        }
    }
    return all_ok ? kOk : kNonConvergence;
}

int cmd_sample(const std::vector<double>& raw, long n, std::uint64_t seed,
               const std::string& policy, std::ostream& out, const Logger& log) {
    const EfweParams p = parse_params(raw);
    if (n < 0) throw UsageError("--n must be >= 0");
    const SamplePolicy sp = policy == "strict" ? SamplePolicy::StrictPaper : SamplePolicy::Conditional;
    log.log(Logger::kInfo, "drawing " + std::to_string(n) + " values, seed " + std::to_string(seed) +
                               ", defect " + num(defect(p)));
    const std::vector<double> xs = sample(p, n, seed, sp);
    std::string buf = "time\n";
    for (double x : xs) buf += exact(x) + '\n';
    out << buf;
    return kOk;
}

int cmd_table(const std::vector<double>& raw, const std::string& what, const std::string& grid_spec,
              const DataSource& src, std::ostream& out, const Logger& log) {
    const std::optional<std::vector<double>> grid =
        grid_spec.empty() ? std::nullopt : std::optional(parse_grid(grid_spec));

    if (what == "km-overlay") {
        if (!src.given()) throw UsageError("km-overlay needs --data or --aarset");
        const Dataset data = src.load();
        EfweParams p(1.0, 1.0, 1.0);
        if (raw.empty()) {
            const FitResult fit = fit_mle(data, Family::Efwe);
            log.log(Logger::kInfo, "no --params given; using the EFWE fit alpha=" +
                                       num(fit.params[0]) + " beta=" + num(fit.params[1]) +
                                       " lambda=" + num(fit.params[2]));
            p = fit.efwe();
        } else {
            p = parse_params(raw);
        }
        const KmCurve km = kaplan_meier(data.values());
        const std::vector<double>& xs = grid ? *grid : km.times;
        std::string buf = "x,km,survival\n";
        for (double x : xs) buf += exact(x) + ',' + exact(km.at(x)) + ',' + exact(survival(p, x)) + '\n';
        out << buf;
        return kOk;
    }

    const EfweParams p = parse_params(raw);
    if (!grid) throw UsageError("--grid is required");
    double (*fn)(const EfweParams&, double) = nullptr;
    if (what == "cdf") fn = &efwe::cdf;
    if (what == "pdf") fn = &efwe::pdf;
    if (what == "hazard") fn = &efwe::hazard;
    if (what == "survival") fn = &efwe::survival;
    std::string buf = "x," + what + '\n';
    for (double x : *grid) buf += exact(x) + ',' + exact(fn(p, x)) + '\n';
    out << buf;
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Logger log(err);
    CLI::App app{"Exponential flexible Weibull extension: fitting, sampling and tables", "efwe"};
    app.require_subcommand(1);

    DataSource fit_src;
    std::string model = "efwe";
    double level = 0.95;
    std::string likelihood = "verbatim";
    std::string format = "text";
    auto* fit = app.add_subcommand("fit", "maximum-likelihood fit of one family");
    fit_src.attach(fit);
    fit->add_option("--model", model, "efwe|fwe|weibull|lfr")
        ->check(CLI::IsMember({"efwe", "fwe", "weibull", "lfr"}))
        ->capture_default_str();
    fit->add_option("--level", level, "Wald interval level")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    fit->add_option("--likelihood", likelihood, "verbatim|conditional (EFWE only)")
        ->check(CLI::IsMember({"verbatim", "conditional"}))
        ->capture_default_str();
    fit->add_option("--out", format, "json|text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    DataSource cmp_src;
    std::vector<std::string> models;
    std::string cmp_format = "text";
    auto* compare = app.add_subcommand("compare", "fit several families and rank them by AIC");
    cmp_src.attach(compare);
    compare->add_option("--models", models, "comma-separated list of families")
        ->delimiter(',')
        ->required();
    compare->add_option("--out", cmp_format, "json|text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    std::vector<double> sample_params;
    long sample_n = 0;
    std::uint64_t seed = 1;
    std::string policy = "conditional";
    auto* sample = app.add_subcommand("sample", "draw an EFWE sample as CSV");
    sample->add_option("--params", sample_params, "alpha,beta,lambda")->delimiter(',')->required();
    sample->add_option("--n", sample_n, "sample size")->required();
    sample->add_option("--seed", seed, "generator seed")->capture_default_str();
    sample->add_option("--policy", policy, "conditional|strict")
        ->check(CLI::IsMember({"conditional", "strict"}))
        ->capture_default_str();

    std::vector<double> table_params;
    std::string what;
    std::string grid;
    DataSource table_src;
    auto* table = app.add_subcommand("table", "evaluate a function on a grid as CSV");
    table->add_option("--params", table_params, "alpha,beta,lambda")->delimiter(',');
    table->add_option("--what", what, "cdf|pdf|hazard|survival|km-overlay")
        ->check(CLI::IsMember({"cdf", "pdf", "hazard", "survival", "km-overlay"}))
        ->required();
    table->add_option("--grid", grid, "lo:hi:steps, evenly spaced");
    table_src.attach(table);

    std::vector<std::string> argv_store{"efwe"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (fit->parsed()) {
            if (!fit_src.given()) throw UsageError("one of --data or --aarset is required");
            return cmd_fit(fit_src, model, level, likelihood, format, out, log);
        }
        if (compare->parsed()) {
            if (!cmp_src.given()) throw UsageError("one of --data or --aarset is required");
            return cmd_compare(cmp_src, models, cmp_format, out, log);
        }
        if (sample->parsed()) return cmd_sample(sample_params, sample_n, seed, policy, out, log);
        return cmd_table(table_params, what, grid, table_src, out, log);
    } catch (const UsageError& e) {
        log.log(Logger::kError, e.what());
        return kUsage;
    } catch (const DataError& e) {
        log.log(Logger::kError, e.what());
        return kDataError;
    } catch (const DegenerateDataError& e) {
        log.log(Logger::kError, e.what());
        return kDataError;
    } catch (const DefectError& e) {
        log.log(Logger::kError, e.what());
        return kDataError;
    } catch (const DomainError& e) {
        log.log(Logger::kError, e.what());
        return kDataError;
    } catch (const Error& e) {
        log.log(Logger::kError, e.what());
        return kNonConvergence;
    }
}

}  // namespace efwe::cli
