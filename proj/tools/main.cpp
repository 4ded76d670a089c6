#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "vinecg/builder.hpp"
#include "vinecg/errors.hpp"
#include "vinecg/model_io.hpp"
#include "vinecg/sampler.hpp"
#include "vinecg/scheduler.hpp"
#include "vinecg/vcg.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

vinecg::VarSet parse_index_list(const std::string& text, int d, const std::string& flag) {
    vinecg::VarSet out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            const int v = std::stoi(tok);
            if (v < 0 || v >= d)
                throw UsageError(flag + ": index " + tok + " out of range 0.." + std::to_string(d - 1));
            out.insert(v);
        } catch (const std::invalid_argument&) {
            throw UsageError(flag + ": cannot parse \"" + tok + "\" as an index");
        }
    }
    return out;
}

std::map<int, double> parse_cond_values(const std::string& text, int d) {
    std::map<int, double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const std::size_t eq = tok.find('=');
        if (eq == std::string::npos)
            throw UsageError("--cond-values: expected i=u entries, got \"" + tok + "\"");
        try {
            const int var = std::stoi(tok.substr(0, eq));
            const double val = std::stod(tok.substr(eq + 1));
            if (var < 0 || var >= d)
                throw UsageError("--cond-values: index " + std::to_string(var) + " out of range");
            out[var] = val;
        } catch (const std::invalid_argument&) {
            throw UsageError("--cond-values: cannot parse \"" + tok + "\"");
        }
    }
    return out;
}

std::vector<vinecg::CopulaFamily> parse_families(const std::string& text) {
    std::vector<vinecg::CopulaFamily> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(vinecg::family_from_name(tok));
        } catch (const vinecg::DataError&) {
            throw UsageError("--families: unknown family \"" + tok + "\"");
        }
    }
    if (out.empty()) throw UsageError("--families: list is empty");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw vinecg::DataError("cannot open output file \"" + path + "\"");
    out << text;
}

vinecg::VineModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vinecg::DataError("cannot open model file \"" + path + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    return vinecg::load(buf.str());
}

vinecg::SamplingOrder model_order(const vinecg::VineModel& m, bool conditional) {
    const vinecg::VarSet cond = conditional ? m.cond_set : vinecg::VarSet{};
    if (!m.default_order.empty() &&
        static_cast<int>(m.default_order.size()) + cond.size() == m.dim()) {
        vinecg::SamplingOrder order{m.default_order, cond, m.dim()};
        return order;
    }
    return vinecg::schedule(m, cond);
}

// ---------------------------------------------------------------------------

int cmd_fit(const std::string& data_path, const std::string& cond_text,
            const std::string& structure, const std::string& families_text,
            const std::string& method, double indep_threshold, const std::string& output,
            bool quiet) {
    const vinecg::DataMatrix data = vinecg::read_csv_file(data_path);
    const int d = static_cast<int>(data.d);

    vinecg::BuildConfig cfg;
    cfg.cond_set = parse_index_list(cond_text, d, "--cond");
    if (structure == "rvine")
        cfg.structure_kind = vinecg::StructureKind::rvine;
    else if (structure == "cvine")
        cfg.structure_kind = vinecg::StructureKind::cvine;
    else if (structure == "dvine")
        cfg.structure_kind = vinecg::StructureKind::dvine;
    else
        throw UsageError("--structure: must be rvine, cvine or dvine");
    if (!families_text.empty()) cfg.family_set = parse_families(families_text);
    if (method == "itau")
        cfg.fit_method = vinecg::FitMethod::itau;
    else if (method == "mle")
        cfg.fit_method = vinecg::FitMethod::mle;
    else
        throw UsageError("--method: must be itau or mle");
    if (indep_threshold < 0.0) throw UsageError("--indep-threshold: must be >= 0");
    cfg.independence_threshold = indep_threshold;

    const vinecg::PseudoObsMatrix obs = vinecg::to_pseudo_obs(data);
    vinecg::VineModel model = vinecg::build(obs, cfg);
    model.default_order = vinecg::schedule(model, cfg.cond_set).order;
    model.provenance = "fitted from " + data_path;

    if (!quiet) {
        std::unordered_map<vinecg::VariableVertex, std::vector<double>> cols;
        for (int j = 0; j < d; ++j) {
            const auto c = obs.col(static_cast<std::size_t>(j));
            cols.emplace(vinecg::VariableVertex{j, {}}, std::vector<double>(c.begin(), c.end()));
        }
        for (int k = 0; k < model.num_levels(); ++k) {
            for (const vinecg::CopulaVertex& v : model.level(k)) {
                const auto& ul = cols.at(v.parent_left());
                const auto& ur = cols.at(v.parent_right());
                const double tau = vinecg::kendall_tau(ul, ur);
                std::cerr << "level " << k << ": {" << v.key() << "} " << v.copula->describe()
                          << " |tau|=" << std::abs(tau) << "\n";
                std::vector<double> cl(ul.size()), cr(ul.size());
                for (std::size_t i = 0; i < ul.size(); ++i) {
                    cl[i] = vinecg::hfunc1(*v.copula, ul[i], ur[i]);
                    cr[i] = vinecg::hfunc2(*v.copula, ul[i], ur[i]);
                }
                cols.emplace(v.child_left(), std::move(cl));
                cols.emplace(v.child_right(), std::move(cr));
            }
        }
        vinecg::SampleBatch batch(obs.n, d);
        for (int j = 0; j < d; ++j)
            for (std::size_t i = 0; i < obs.n; ++i) batch.at(i, j) = obs.at(i, static_cast<std::size_t>(j));
        const std::vector<double> ll = vinecg::log_density(model, batch);
        double total = 0.0;
        for (double v : ll) total += v;
        std::cerr << "total log-likelihood: " << total << "\n";
        std::cerr << "default sampling order: "
                  << vinecg::SamplingOrder{model.default_order, cfg.cond_set, d}.to_string() << "\n";
    }

    write_text(output, vinecg::save(model));
    return 0;
}

int cmd_sample(const std::string& model_path, long n, const std::string& cond_values_text,
               std::uint64_t seed, const std::string& raw_data_path, const std::string& output) {
    if (n <= 0) throw UsageError("--n: must be >= 1");
    const vinecg::VineModel model = load_model_file(model_path);

    vinecg::SampleBatch batch;
    if (!cond_values_text.empty()) {
        const std::map<int, double> cond_values = parse_cond_values(cond_values_text, model.dim());
        vinecg::VarSet keys;
        for (const auto& [var, value] : cond_values) keys.insert(var);
        if (keys != model.cond_set)
            throw UsageError("--cond-values: keys {" + keys.to_string() +
                             "} must match the model cond_set {" + model.cond_set.to_string() + "}");
        const vinecg::SamplingOrder order = model_order(model, true);
        batch = vinecg::sample_conditional(model, static_cast<std::size_t>(n), cond_values, order, seed);
    } else {
        const vinecg::SamplingOrder order = model_order(model, false);
        batch = vinecg::sample(model, static_cast<std::size_t>(n), order, seed);
    }

    std::vector<std::string> names;
    for (int j = 0; j < model.dim(); ++j) names.push_back("u" + std::to_string(j));
    if (!raw_data_path.empty()) {
        // map uniforms through the empirical quantile function of the fit data
        const vinecg::DataMatrix data = vinecg::read_csv_file(raw_data_path);
        if (static_cast<int>(data.d) != model.dim())
            throw vinecg::DataError("--raw: data has " + std::to_string(data.d) +
                                    " columns, model needs " + std::to_string(model.dim()));
        names.clear();
        for (std::size_t j = 0; j < data.d; ++j)
            names.push_back(data.names.empty() ? "x" + std::to_string(j) : data.names[j]);
        for (int j = 0; j < model.dim(); ++j) {
            std::vector<double> sorted(data.col(static_cast<std::size_t>(j)).begin(),
                                       data.col(static_cast<std::size_t>(j)).end());
            std::sort(sorted.begin(), sorted.end());
            const double m_rows = static_cast<double>(sorted.size());
            for (std::size_t i = 0; i < batch.n; ++i) {
                const double pos = batch.at(i, j) * (m_rows - 1.0);
                const std::size_t lo = static_cast<std::size_t>(pos);
                const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
                const double frac = pos - static_cast<double>(lo);
                batch.at(i, j) = sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
            }
        }
    }

    std::ostringstream os;
    vinecg::write_csv(os, names, batch);
    write_text(output, os.str());
    return 0;
}

int cmd_density(const std::string& model_path, const std::string& data_path,
                const std::string& output, bool quiet) {
    const vinecg::VineModel model = load_model_file(model_path);
    vinecg::DataMatrix data = vinecg::read_csv_file(data_path);
    if (static_cast<int>(data.d) != model.dim())
        throw vinecg::DataError("density: data has " + std::to_string(data.d) +
                                " columns, model needs " + std::to_string(model.dim()));

    bool outside = false;
    for (double v : data.values)
        if (!(v > 0.0 && v < 1.0)) outside = true;
    vinecg::SampleBatch batch(data.n, static_cast<int>(data.d));
    if (outside) {
        std::cerr << "warning: data outside (0,1); applying rank transform to pseudo-observations\n";
        const vinecg::PseudoObsMatrix obs = vinecg::to_pseudo_obs(data);
        std::copy(obs.values.begin(), obs.values.end(), batch.values.begin());
    } else {
        std::copy(data.values.begin(), data.values.end(), batch.values.begin());
    }

    const std::vector<double> ll = vinecg::log_density(model, batch);
    double total = 0.0;
    std::ostringstream os;
    os << "log_density\n";
    char buf[32];
    for (double v : ll) {
        total += v;
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        os.write(buf, res.ptr - buf);
        os << '\n';
    }
    if (!quiet) std::cerr << "total log-likelihood: " << total << "\n";
    write_text(output, os.str());
    return 0;
}

int cmd_schedule(const std::string& model_path, const std::string& cond_text, bool worst) {
    const vinecg::VineModel model = load_model_file(model_path);
    const vinecg::VarSet cond = parse_index_list(cond_text, model.dim(), "--cond");
    const vinecg::SamplingOrder order = vinecg::schedule(model, cond, worst);
    const long calls = vinecg::query(order, model);
    std::cout << order.to_string() << ", h-calls: " << calls << "\n";
    for (const vinecg::VariableVertex& s : vinecg::get_source(order, model).sources)
        std::cout << "source: {" << s.key() << "}\n";
    return 0;
}

int cmd_export_dot(const std::string& model_path, const std::string& output) {
    const vinecg::VineModel model = load_model_file(model_path);
    write_text(output, vinecg::export_dot(model));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vinecg: vine copula fitting, scheduling, sampling and density evaluation"};
    app.require_subcommand(1);

    std::string data_path, model_path, output, cond_text, cond_values_text;
    std::string structure = "rvine", families_text, method = "itau", raw_data_path;
    double indep_threshold = 0.01;
    long n = 0;
    std::uint64_t seed = 0;
    bool quiet = false, worst = false;

    CLI::App* fit = app.add_subcommand("fit", "select a vine structure and fit pair copulas");
    fit->add_option("--data", data_path, "input CSV (header row, numeric cells)")->required();
    fit->add_option("--cond", cond_text, "conditioning variable indices, e.g. \"2,4\"");
    fit->add_option("--structure", structure, "rvine|cvine|dvine");
    fit->add_option("--families", families_text, "comma list of candidate families");
    fit->add_option("--method", method, "itau|mle");
    fit->add_option("--indep-threshold", indep_threshold, "independence truncation threshold");
    fit->add_option("--output", output, "model JSON path (default: stdout)");
    fit->add_flag("--quiet", quiet, "suppress the per-level summary");

    CLI::App* sample = app.add_subcommand("sample", "draw (conditional) samples from a model");
    sample->add_option("--model", model_path, "model JSON")->required();
    sample->add_option("--n", n, "number of rows")->required();
    sample->add_option("--cond-values", cond_values_text, "conditioning values, e.g. \"2=0.3,4=0.7\"");
    sample->add_option("--seed", seed, "random seed");
    sample->add_option("--raw", raw_data_path, "map samples through the empirical quantiles of this CSV");
    sample->add_option("--output", output, "output CSV path (default: stdout)");

    CLI::App* density = app.add_subcommand("density", "per-row copula log-density of a dataset");
    density->add_option("--model", model_path, "model JSON")->required();
    density->add_option("--data", data_path, "input CSV")->required();
    density->add_option("--output", output, "output CSV path (default: stdout)");
    density->add_flag("--quiet", quiet, "suppress the total log-likelihood line");

    CLI::App* sched = app.add_subcommand("schedule", "compute the optimal sampling order");
    sched->add_option("--model", model_path, "model JSON")->required();
    sched->add_option("--cond", cond_text, "conditioning variable indices");
    sched->add_flag("--worst", worst, "flip the greedy comparison to maximize h-calls");

    CLI::App* dot = app.add_subcommand("export-dot", "render the graph as Graphviz DOT");
    dot->add_option("--model", model_path, "model JSON")->required();
    dot->add_option("--output", output, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (fit->parsed())
            return cmd_fit(data_path, cond_text, structure, families_text, method, indep_threshold,
                           output, quiet);
        if (sample->parsed())
            return cmd_sample(model_path, n, cond_values_text, seed, raw_data_path, output);
        if (density->parsed()) return cmd_density(model_path, data_path, output, quiet);
        if (sched->parsed()) return cmd_schedule(model_path, cond_text, worst);
        if (dot->parsed()) return cmd_export_dot(model_path, output);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const vinecg::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const vinecg::StructureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const vinecg::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
