// bandsparse: sparse line-spectral estimation with integrated wideband
// dictionaries. Subcommands: estimate, experiment, scan, costs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bandsparse/experiments.hpp"
#include "bandsparse/io.hpp"
#include "bandsparse/sim.hpp"
#include "bandsparse/zoom.hpp"

namespace bs = bandsparse;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, delim)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct Series {
    bs::SamplingScheme scheme;
    bs::CVector y;
};

// CSV input: header row ending in re,im; the preceding columns are the
// per-dimension sample positions (one column for 1-D, one per dimension for
// M-D; the full product grid must be present for M-D).
Series load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("input file is empty: " + path);
    std::vector<std::string> header = split(trim(line), ',');
    for (std::string& h : header) h = trim(h);
    if (header.size() < 3 || header[header.size() - 2] != "re" || header.back() != "im")
        throw UsageError("input header must be <positions...>,re,im");
    const std::size_t dims = header.size() - 2;

    std::vector<std::vector<double>> pos(dims);
    std::vector<double> re, im;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::vector<std::string> cells = split(t, ',');
        if (cells.size() != header.size())
            throw UsageError("row " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " columns");
        try {
            for (std::size_t m = 0; m < dims; ++m) pos[m].push_back(std::stod(cells[m]));
            re.push_back(std::stod(cells[dims]));
            im.push_back(std::stod(cells[dims + 1]));
        } catch (const std::exception&) {
            throw UsageError("row " + std::to_string(lineno) + ": cannot parse numbers");
        }
    }
    if (re.empty()) throw UsageError("input has no data rows: " + path);

    Series s;
    if (dims == 1) {
        std::vector<std::size_t> order(re.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return pos[0][a] < pos[0][b]; });
        std::vector<double> times;
        bs::CVector y;
        for (std::size_t i : order) {
            times.push_back(pos[0][i]);
            y.emplace_back(re[i], im[i]);
        }
        s.scheme.times = {std::move(times)};
        s.y = std::move(y);
    } else {
        std::vector<std::vector<double>> axes(dims);
        for (std::size_t m = 0; m < dims; ++m) {
            axes[m] = pos[m];
            std::sort(axes[m].begin(), axes[m].end());
            axes[m].erase(std::unique(axes[m].begin(), axes[m].end()), axes[m].end());
        }
        std::size_t total = 1;
        for (const auto& a : axes) total *= a.size();
        if (total != re.size())
            throw UsageError("M-D input must cover the full sample grid exactly once");
        bs::CVector y(total, bs::cxd(0.0));
        std::vector<bool> seen(total, false);
        for (std::size_t r = 0; r < re.size(); ++r) {
            std::size_t index = 0, strideacc = 1;
            for (std::size_t m = 0; m < dims; ++m) {
                const auto it = std::lower_bound(axes[m].begin(), axes[m].end(), pos[m][r]);
                if (it == axes[m].end() || *it != pos[m][r])
                    throw UsageError("internal grid lookup failure");
                index += strideacc * static_cast<std::size_t>(it - axes[m].begin());
                strideacc *= axes[m].size();
            }
            if (seen[index]) throw UsageError("duplicate sample position in input");
            seen[index] = true;
            y[index] = bs::cxd(re[r], im[r]);
        }
        s.scheme.times = std::move(axes);
        s.y = std::move(y);
    }
    s.scheme.validate();
    return s;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("BANDSPARSE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("BANDSPARSE_SEED is not an integer");
        }
    }
    return bs::kDefaultSeed;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const std::exception& e) {
        throw UsageError(std::string("config parse error: ") + e.what());
    }
}

bs::DictKind parse_kind(const std::string& s) {
    if (s == "narrowband" || s == "nb") return bs::DictKind::narrowband;
    if (s == "wideband" || s == "wb") return bs::DictKind::wideband_integrated;
    if (s == "dpss") return bs::DictKind::wideband_dpss;
    throw UsageError("unknown dictionary kind: " + s);
}

void echo_config(const std::string& out_dir, const json& cfg) {
    if (out_dir.empty()) return;
    bs::ensure_directory(out_dir);
    bs::atomic_write_text(out_dir + "/effective_config.json", cfg.dump(2));
}

int cmd_estimate(const std::string& input, const std::string& out_dir, std::uint64_t seed,
                 const std::string& solver, const std::vector<int>& stages,
                 const std::vector<std::string>& kinds, const std::vector<double>& alphas,
                 double rho, int max_iters, double eps_act, bool refine) {
    const Series series = load_series(input);
    if (stages.empty()) throw UsageError("estimate: --stages required (e.g. \"40,50\")");

    bs::ZoomPlan plan;
    for (std::size_t z = 0; z < stages.size(); ++z) {
        bs::DictKind kind = bs::DictKind::wideband_integrated;
        if (z < kinds.size()) kind = parse_kind(kinds[z]);
        plan.stages.push_back({stages[z], kind});
        if (kind == bs::DictKind::wideband_dpss)
            plan.dpss = bs::DpssConfig{static_cast<int>(series.scheme.times[0].size()), 1.0 / 2.1};
    }
    plan.solver = solver == "spice" ? bs::SolverKind::spice : bs::SolverKind::lasso;
    if (!alphas.empty()) plan.alphas = alphas;
    plan.lasso.rho = rho;
    plan.lasso.max_iters = max_iters;
    plan.eps_act = eps_act;
    plan.refine_midpoints = refine;
    plan.max_entries = 1u << 26;

    const bs::ZoomResult result = bs::run_zoom(series.y, series.scheme, plan);

    std::cout << "model order: " << result.model_order << "\n";
    for (std::size_t i = 0; i < result.frequencies.size(); ++i) {
        std::cout << "  f[" << i << "] =";
        for (double f : result.frequencies[i]) std::cout << ' ' << f;
        if (i < result.amplitudes.size())
            std::cout << "  |amp| = " << std::abs(result.amplitudes[i]);
        std::cout << "\n";
    }
    std::cout << "op count (modeled): " << result.op_count << "\n";

    if (!out_dir.empty()) {
        bs::ensure_directory(out_dir);
        bs::atomic_write_text(out_dir + "/zoom_result.json", bs::zoom_result_json(result));
        std::ostringstream table;
        table << "component";
        for (int m = 0; m < series.scheme.dims(); ++m) table << ",f" << (m + 1);
        table << ",amp_re,amp_im,amp_abs\n";
        for (std::size_t i = 0; i < result.frequencies.size(); ++i) {
            table << i;
            for (double f : result.frequencies[i]) table << ',' << f;
            const bs::cxd a = i < result.amplitudes.size() ? result.amplitudes[i] : bs::cxd(0.0);
            table << ',' << a.real() << ',' << a.imag() << ',' << std::abs(a) << '\n';
        }
        bs::atomic_write_text(out_dir + "/estimates.csv", table.str());
        json echo;
        echo["command"] = "estimate";
        echo["input"] = input;
        echo["seed"] = seed;
        echo["solver"] = solver;
        echo["stages"] = stages;
        echo["alphas"] = plan.alphas;
        echo["eps_act"] = eps_act;
        echo_config(out_dir, echo);
    }
    return 0;
}

int cmd_scan(const std::string& input, const std::string& out_dir, int nb, int wb,
             bool normalize) {
    const Series series = load_series(input);
    if (series.scheme.dims() != 1) throw UsageError("scan supports 1-D series only");
    if (nb <= 0 && wb <= 0) throw UsageError("scan: give --nb and/or --wb");

    std::ostringstream csv;
    csv << "kind,index,f_lo,f_hi,position,magnitude\n";
    auto emit = [&](const bs::Dictionary& dict, const char* kind) {
        const std::vector<double> scan = bs::inner_product_scan(dict, series.y, normalize);
        for (std::size_t j = 0; j < scan.size(); ++j) {
            const bs::Cell& c = dict.column_cells[j][0];
            const double posn = dict.kind == bs::DictKind::narrowband ? c.point : c.mid();
            csv << kind << ',' << j << ',' << c.lo << ',' << c.hi << ',' << posn << ','
                << scan[j] << '\n';
        }
    };
    if (nb > 0) {
        const bs::Dictionary dict = bs::build_dictionary(
            series.scheme, bs::BandGrid::uniform_points(1, nb), bs::DictKind::narrowband);
        emit(dict, "narrowband");
    }
    if (wb > 0) {
        const bs::Dictionary dict = bs::build_dictionary(
            series.scheme, bs::BandGrid::uniform_bands(1, wb), bs::DictKind::wideband_integrated);
        emit(dict, "wideband");
    }
    if (out_dir.empty()) {
        std::cout << csv.str();
    } else {
        bs::ensure_directory(out_dir);
        bs::atomic_write_text(out_dir + "/scan.csv", csv.str());
        json echo;
        echo["command"] = "scan";
        echo["input"] = input;
        echo["nb"] = nb;
        echo["wb"] = wb;
        echo["normalize"] = normalize;
        echo_config(out_dir, echo);
        std::cout << "wrote " << out_dir << "/scan.csv\n";
    }
    return 0;
}

int cmd_costs(bool ratio, bool budget, bool recommend, bool admm, int b, std::size_t n,
              std::size_t p, int k, double eta, int stages) {
    if (!(ratio || budget || recommend || admm))
        throw UsageError("costs: give one of --ratio, --budget, --recommend, --admm");
    if (ratio) {
        const double r = bs::band_ratio(b, static_cast<int>(n));
        std::cout << "band_ratio(B=" << b << ", N=" << n << ") = " << r;
        if (bs::band_ratio_extrapolated(b, static_cast<int>(n)))
            std::cout << "  [outside the fitted range B in [4,100], N in [50,500]]";
        std::cout << "\n";
    }
    if (budget) {
        const bs::ZoomBudget zb = bs::zoom_budget(p, n, k, eta, stages);
        std::cout << "narrowband ops C1 = " << zb.narrowband_ops << "\n"
                  << "coarse stage ops C2 = " << zb.coarse_ops << "\n"
                  << "residual R = C1 - C2 = " << zb.residual << "\n"
                  << "zoom ops = " << zb.zoom_ops << "\n"
                  << "implied final grid spacing = " << zb.grid << "\n"
                  << "within budget: " << (zb.within_budget ? "yes" : "no") << "\n";
    }
    if (recommend) {
        const std::optional<int> rec = bs::recommend_bands(static_cast<int>(n), stages);
        if (rec)
            std::cout << "recommended B = " << *rec << " (ratio "
                      << bs::band_ratio(*rec, static_cast<int>(n)) << ", threshold "
                      << (stages >= 2 ? bs::kMultiStageRatioThreshold
                                      : bs::kSingleStageRatioThreshold)
                      << ")\n";
        else
            std::cout << "no feasible B in [4,100]; fall back to B = 4\n";
    }
    if (admm) {
        std::cout << "admm x-step ops(N=" << n << ", P=" << p
                  << ") = " << bs::admm_cost(n, p) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse line-spectral estimation with integrated wideband dictionaries"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    std::string format = "json";
    app.add_option("--format", format, "stdout format for experiment summaries: json | csv");

    // estimate
    auto* est = app.add_subcommand("estimate", "run the zoom pipeline on an input series");
    std::string est_input, est_out, est_solver = "lasso", est_stages, est_kinds;
    std::vector<double> est_alphas;
    double est_rho = 1.0, est_eps = 1e-3;
    int est_iters = 5000;
    bool est_refine = false;
    std::uint64_t est_seed = 0;
    bool est_seed_set = false;
    est->add_option("--input", est_input, "input CSV (<positions...>,re,im)");
    est->add_option("--out", est_out, "output directory");
    est->add_option("--solver", est_solver, "lasso | spice");
    est->add_option("--stages", est_stages, "per-stage band counts, e.g. \"40,50\"");
    est->add_option("--kinds", est_kinds, "per-stage kinds: narrowband|wideband|dpss");
    est->add_option("--alpha", est_alphas, "per-stage lambda fraction (repeatable)");
    est->add_option("--rho", est_rho, "ADMM step length");
    est->add_option("--max-iters", est_iters, "ADMM iteration cap");
    est->add_option("--eps-act", est_eps, "relative activity threshold");
    est->add_flag("--refine-midpoints", est_refine, "final narrowband pass on cluster midpoints");
    est->add_option("--seed", est_seed, "seed recorded in outputs")->each([&](const std::string&) {
        est_seed_set = true;
    });

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a named Monte Carlo experiment");
    std::string exp_name, exp_out, exp_solver, exp_stages, exp_kinds;
    int exp_trials = 0, exp_jobs = 0, exp_k = 0;
    std::size_t exp_n = 0;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    std::vector<double> exp_snr, exp_alphas;
    double exp_spacing = -1.0;
    exp->add_option("name", exp_name, "one of: fig5 fig6 fig7 fig8_lasso fig9_spice fig10_2d "
                                      "fig11_nonuniform fig12_modelorder table1 custom");
    exp->add_option("--out", exp_out, "output directory");
    exp->add_option("--trials", exp_trials, "Monte Carlo trials (0 = protocol default)");
    exp->add_option("--jobs", exp_jobs, "worker threads (0 = machine parallelism)");
    exp->add_option("--seed", exp_seed, "root seed")->each([&](const std::string&) {
        exp_seed_set = true;
    });
    exp->add_option("--snr-db", exp_snr, "SNR grid override (repeatable)");
    exp->add_option("--alpha", exp_alphas, "alpha override (repeatable)");
    exp->add_option("--stages", exp_stages, "stage band counts, custom experiment");
    exp->add_option("--kinds", exp_kinds, "stage kinds, custom experiment");
    exp->add_option("--solver", exp_solver, "custom experiment solver: lasso | spice");
    exp->add_option("--k", exp_k, "component count override");
    exp->add_option("--n", exp_n, "sample count override (per dimension)");
    exp->add_option("--min-spacing", exp_spacing, "minimum component spacing override");

    // scan
    auto* scan = app.add_subcommand("scan", "inner-product scan of an input series");
    std::string scan_input, scan_out;
    int scan_nb = 0, scan_wb = 0;
    bool scan_norm = false;
    scan->add_option("--input", scan_input, "input CSV");
    scan->add_option("--out", scan_out, "output directory (default: stdout)");
    scan->add_option("--nb", scan_nb, "narrowband grid size P");
    scan->add_option("--wb", scan_wb, "wideband band count B");
    scan->add_flag("--normalize", scan_norm, "scale so the peak is 1");

    // costs
    auto* costs = app.add_subcommand("costs", "cost model and band-count design rules");
    bool c_ratio = false, c_budget = false, c_recommend = false, c_admm = false;
    int c_b = 20, c_k = 2, c_stages = 1;
    std::size_t c_n = 100, c_p = 1000;
    double c_eta = 2.0 / 3.0;
    costs->add_flag("--ratio", c_ratio, "evaluate the band-gain ratio polynomial");
    costs->add_flag("--budget", c_budget, "residual budget and implied grid spacing");
    costs->add_flag("--recommend", c_recommend, "largest B meeting the ratio threshold");
    costs->add_flag("--admm", c_admm, "ADMM x-step operation count");
    costs->add_option("--B", c_b, "band count");
    costs->add_option("--N", c_n, "sample count");
    costs->add_option("--P", c_p, "narrowband dictionary size");
    costs->add_option("--K", c_k, "component count");
    costs->add_option("--eta", c_eta, "bands-to-samples ratio, 0 < eta < 1");
    costs->add_option("--stages", c_stages, "zoom stage count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const json cfg = load_config(config_path);
        auto cfg_or = [&](const char* key, auto fallback) {
            using T = decltype(fallback);
            if (cfg.contains(key)) return cfg[key].get<T>();
            return fallback;
        };
        const std::uint64_t seed_default = cfg.contains("seed")
                                               ? cfg["seed"].get<std::uint64_t>()
                                               : default_seed();

        if (est->parsed()) {
            if (est_input.empty()) est_input = cfg_or("input", std::string());
            if (est_input.empty()) throw UsageError("estimate: --input required");
            if (est_out.empty()) est_out = cfg_or("out", std::string());
            if (est->count("--solver") == 0) est_solver = cfg_or("solver", est_solver);
            if (est_alphas.empty() && cfg.contains("alphas"))
                est_alphas = cfg["alphas"].get<std::vector<double>>();
            if (!est_seed_set) est_seed = seed_default;
            std::vector<int> stages;
            std::string stages_src = !est_stages.empty() ? est_stages
                                                         : cfg_or("stages", std::string());
            for (const std::string& tok : split(stages_src, ','))
                if (!trim(tok).empty()) stages.push_back(std::stoi(trim(tok)));
            std::vector<std::string> kinds;
            for (const std::string& tok : split(est_kinds, ','))
                if (!trim(tok).empty()) kinds.push_back(trim(tok));
            return cmd_estimate(est_input, est_out, est_seed, est_solver, stages, kinds,
                                est_alphas, est_rho, est_iters, est_eps, est_refine);
        }
        if (exp->parsed()) {
            bs::ExperimentConfig ec;
            ec.name = !exp_name.empty() ? exp_name : cfg_or("experiment", std::string());
            if (ec.name.empty()) throw UsageError("experiment: name required");
            ec.trials = exp_trials > 0 ? exp_trials : cfg_or("trials", 0);
            ec.seed = exp_seed_set ? exp_seed : seed_default;
            ec.jobs = exp_jobs > 0 ? exp_jobs : cfg_or("jobs", 0);
            ec.out_dir = !exp_out.empty() ? exp_out : cfg_or("out", std::string());
            ec.snr_db = exp_snr;
            if (ec.snr_db.empty() && cfg.contains("snr_db"))
                ec.snr_db = cfg["snr_db"].get<std::vector<double>>();
            ec.alphas = exp_alphas;
            if (ec.alphas.empty() && cfg.contains("alphas"))
                ec.alphas = cfg["alphas"].get<std::vector<double>>();
            ec.solver = !exp_solver.empty() ? exp_solver : cfg_or("solver", std::string());
            ec.k = exp_k;
            ec.n = exp_n;
            ec.min_spacing = exp_spacing;
            for (const std::string& tok : split(exp_stages, ','))
                if (!trim(tok).empty()) ec.stage_bands.push_back(std::stoi(trim(tok)));
            for (const std::string& tok : split(exp_kinds, ','))
                if (!trim(tok).empty()) ec.stage_kinds.push_back(trim(tok));

            if (app.count("--format") == 0) format = cfg_or("format", format);
            if (format != "json" && format != "csv")
                throw UsageError("--format must be json or csv");
            const bs::ExperimentOutput out = bs::run_experiment(ec);
            if (!ec.out_dir.empty()) {
                json echo;
                echo["command"] = "experiment";
                echo["experiment"] = ec.name;
                echo["trials"] = ec.trials;
                echo["seed"] = ec.seed;
                echo["jobs"] = ec.jobs;
                echo["format"] = format;
                echo_config(ec.out_dir, echo);
                std::cout << "wrote " << out.files_written.size() + 1 << " files to "
                          << ec.out_dir << "\n";
            } else if (format == "csv") {
                // Flat per-condition rows for piping into plotting tools.
                std::cout << "label,trials,seed,success_rate,model_order_correct,over_rate,"
                             "under_rate,mse_defined,mse,outliers_removed,mean_ops\n";
                for (const bs::ExperimentReport& r : out.reports)
                    std::cout << r.label << ',' << r.trials << ',' << r.seed << ','
                              << r.success_rate << ',' << r.model_order_correct << ','
                              << r.over_rate << ',' << r.under_rate << ','
                              << (r.mse.defined ? 1 : 0) << ',' << r.mse.mse << ','
                              << r.outliers_removed << ',' << r.mean_ops << "\n";
            } else {
                std::cout << out.summary_json << "\n";
            }
            return 0;
        }
        if (scan->parsed()) {
            if (scan_input.empty()) scan_input = cfg_or("input", std::string());
            if (scan_input.empty()) throw UsageError("scan: --input required");
            if (scan_out.empty()) scan_out = cfg_or("out", std::string());
            return cmd_scan(scan_input, scan_out, scan_nb, scan_wb, scan_norm);
        }
        if (costs->parsed())
            return cmd_costs(c_ratio, c_budget, c_recommend, c_admm, c_b, c_n, c_p, c_k, c_eta,
                             c_stages);
        throw UsageError("no subcommand");
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
