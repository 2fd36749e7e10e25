#include "pxt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "pxt/arma_garch.hpp"
#include "pxt/dist.hpp"
#include "pxt/errors.hpp"
#include "pxt/indicators.hpp"
#include "pxt/inference.hpp"
#include "pxt/report.hpp"
#include "pxt/rng.hpp"
#include "pxt/stats.hpp"

namespace pxt {

using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

LeverageForm leverage_from_string(const std::string& s) {
    if (s == "squared_shock") return LeverageForm::squared_shock;
    if (s == "as_written") return LeverageForm::as_written;
    throw ConfigError("unknown leverage form '" + s + "'");
}

const char* leverage_to_string(LeverageForm f) {
    return f == LeverageForm::squared_shock ? "squared_shock" : "as_written";
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (value.is_null()) continue;  // emitted for unset optionals
        try {
            if (key == "bars") cfg.bars_path = value.get<std::string>();
            else if (key == "bars_frequency") cfg.bars_frequency = frequency_from_string(value.get<std::string>());
            else if (key == "frequency") cfg.frequency = frequency_from_string(value.get<std::string>());
            else if (key == "daily_bars") cfg.daily_bars_path = value.get<std::string>();
            else if (key == "predictors") cfg.predictors_path = value.get<std::string>();
            else if (key == "sentiment") cfg.sentiment_path = value.get<std::string>();
            else if (key == "convention") cfg.convention = convention_from_string(value.get<std::string>());
            else if (key == "granger_lags") cfg.granger_lags = value.get<std::vector<size_t>>();
            else if (key == "granger_filtered") cfg.granger_filtered = value.get<bool>();
            else if (key == "oos_splits") cfg.oos_splits = value.get<std::vector<std::string>>();
            else if (key == "subsamples") {
                for (const auto& pair : value) {
                    if (!pair.is_array() || pair.size() != 2)
                        throw ConfigError("subsamples entries must be [start, end] pairs");
                    cfg.subsamples.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
                }
            }
            else if (key == "q_max") cfg.q_max = value.get<int>();
            else if (key == "gamma") cfg.gamma = value.get<double>();
            else if (key == "weight_min") cfg.weight_min = value.get<double>();
            else if (key == "weight_max") cfg.weight_max = value.get<double>();
            else if (key == "variance_window") cfg.variance_window = value.get<size_t>();
            else if (key == "leverage") cfg.leverage = leverage_from_string(value.get<std::string>());
            else if (key == "aim_constant_variance") cfg.aim_constant_variance = value.get<bool>();
            else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
            else if (key == "seed") cfg.seed = value.get<uint64_t>();
            else if (key == "sims") cfg.sims = value.get<int>();
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    if (cfg.granger_lags.empty()) throw ConfigError("granger_lags must not be empty");
    if (cfg.q_max < 1) throw ConfigError("q_max must be >= 1");
    if (!(cfg.gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!(cfg.weight_min < cfg.weight_max)) throw ConfigError("weight bounds must satisfy min < max");
    if (cfg.sims < 1) throw ConfigError("sims must be >= 1");
    return cfg;
}

std::string RunConfig::to_json_text() const {
    json j;
    j["bars"] = bars_path;
    j["bars_frequency"] = ::pxt::to_string(bars_frequency);
    j["frequency"] = ::pxt::to_string(frequency);
    j["daily_bars"] = daily_bars_path;
    j["predictors"] = predictors_path;
    j["sentiment"] = sentiment_path;
    j["convention"] = ::pxt::to_string(convention);
    j["granger_lags"] = granger_lags;
    j["granger_filtered"] = granger_filtered;
    j["oos_splits"] = oos_splits;
    json subs = json::array();
    for (const auto& [a, b] : subsamples) subs.push_back({a, b});
    j["subsamples"] = subs;
    j["q_max"] = q_max;
    j["gamma"] = gamma;
    j["weight_min"] = weight_min;
    j["weight_max"] = weight_max;
    j["variance_window"] = variance_window;
    j["leverage"] = leverage_to_string(leverage);
    j["aim_constant_variance"] = aim_constant_variance.has_value() ? json(*aim_constant_variance) : json();
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    j["sims"] = sims;
    return j.dump();
}

size_t RunConfig::effective_variance_window() const {
    if (variance_window > 0) return variance_window;
    return frequency == Frequency::quarterly ? 40u : 120u;
}

double RunConfig::annualization() const {
    return frequency == Frequency::quarterly ? 400.0 : 1200.0;
}

size_t RunConfig::min_training() const {
    return frequency == Frequency::quarterly ? 40u : 120u;
}

size_t RunConfig::periods_per_year() const {
    return frequency == Frequency::quarterly ? 4u : 12u;
}

std::string RunOutput::summary_json() const {
    json j;
    j["files"] = files;
    j["notes"] = notes;
    return j.dump();
}

// ---------------------------------------------------------------------------

struct Engine::State {
    RunConfig cfg;
    std::string out_dir;
    std::string config_hash;

    std::optional<BarSeries> bars;
    std::optional<BarSeries> daily;
    std::optional<DecomposedSeries> decomp;
    std::optional<PredictorTable> predictors;
    std::optional<PredictorTable> sentiment;
    std::optional<ArmaGarchFit> gain_fit;
    std::optional<ArmaGarchFit> loss_fit;
    std::optional<std::vector<double>> gain_filtered;
    std::optional<std::vector<double>> loss_filtered;
    std::optional<std::vector<IndicatorSeries>> indicators;
    std::vector<std::pair<std::string, std::string>> data_hashes;

    explicit State(RunConfig c) : cfg(std::move(c)) {
        out_dir = cfg.output_dir;
        if (out_dir.empty()) {
            const char* env = std::getenv("PXT_OUTPUT_DIR");
            out_dir = env && *env ? env : ".";
        }
        config_hash = hex64(fnv1a(cfg.to_json_text()));
        if (cfg.oos_splits.empty()) {
            cfg.oos_splits = cfg.frequency == Frequency::quarterly
                                 ? std::vector<std::string>{"1971-Q1", "1989-Q1", "1996-Q1"}
                                 : std::vector<std::string>{"1971-01", "1989-01", "1996-01"};
        }
    }

    std::string path_for(const std::string& name) {
        std::filesystem::create_directories(out_dir);
        return (std::filesystem::path(out_dir) / name).string();
    }

    void stamp(Table& t, const std::string& report) {
        t.meta("tool", "pxt");
        t.meta("report", report);
        t.meta("config_hash", config_hash);
        for (const auto& [k, v] : data_hashes) t.meta(k, v);
        t.meta("frequency", ::pxt::to_string(cfg.frequency));
        t.meta("convention", ::pxt::to_string(cfg.convention));
        t.meta("switches",
               std::string("cov_divisor=n std_divisor=n-1 kurtosis=non_excess acf_norm=divisor_n ") +
                   "arma_mu=unconditional_mean garch_init=presample_ls_variance se=inverse_hessian " +
                   "sic=logdet+k*lnT/T var_inputs=levels oos_benchmark=expanding_mean " +
                   "rf=annual/periods_per_year leverage=" + std::string(leverage_to_string(cfg.leverage)) +
                   " mri_long_run=30y weight_bounds=[" + format_number(cfg.weight_min) + "," +
                   format_number(cfg.weight_max) + "] variance_window=" +
                   std::to_string(cfg.effective_variance_window()) + " gamma=" +
                   format_number(cfg.gamma) + " seed=" + std::to_string(cfg.seed));
    }

    void record_hash(const std::string& label, const std::string& path) {
        for (const auto& [k, v] : data_hashes)
            if (k == label) return;
        data_hashes.emplace_back(label, hex64(hash_file(path)));
    }

    const BarSeries& get_bars() {
        if (!bars) {
            if (cfg.bars_path.empty()) throw ConfigError("no bars file configured");
            record_hash("data_bars", cfg.bars_path);
            BarSeries loaded = load_bars(cfg.bars_path, cfg.bars_frequency);
            if (cfg.frequency == Frequency::quarterly && cfg.bars_frequency == Frequency::monthly) {
                std::string warning;
                bars = to_quarterly(loaded, &warning);
            } else if (cfg.frequency != cfg.bars_frequency) {
                throw ConfigError("cannot derive " + std::string(::pxt::to_string(cfg.frequency)) +
                                  " bars from a " + ::pxt::to_string(cfg.bars_frequency) + " file");
            } else {
                bars = std::move(loaded);
            }
        }
        return *bars;
    }

    const BarSeries& get_daily() {
        if (!daily) {
            if (cfg.daily_bars_path.empty()) throw ConfigError("no daily bars file configured");
            record_hash("data_daily", cfg.daily_bars_path);
            daily = load_bars(cfg.daily_bars_path, Frequency::daily);
        }
        return *daily;
    }

    const DecomposedSeries& get_decomp() {
        if (!decomp) decomp = decompose(get_bars(), cfg.convention);
        return *decomp;
    }

    const PredictorTable& get_predictors() {
        if (!predictors) {
            if (cfg.predictors_path.empty()) throw ConfigError("no predictors file configured");
            const BarSeries& calendar = get_bars();
            record_hash("data_predictors", cfg.predictors_path);
            predictors = load_predictors(cfg.predictors_path, calendar);
        }
        return *predictors;
    }

    const PredictorTable& get_sentiment() {
        if (!sentiment) {
            if (cfg.sentiment_path.empty()) throw ConfigError("no sentiment file configured");
            const BarSeries& calendar = get_bars();
            record_hash("data_sentiment", cfg.sentiment_path);
            sentiment = load_predictors(cfg.sentiment_path, calendar);
        }
        return *sentiment;
    }

    void ensure_fits() {
        if (gain_fit && loss_fit) return;
        const DecomposedSeries& d = get_decomp();
        auto grid = default_spec_grid();
        gain_fit = select_arma_garch(sqrt_transform(d.pmg), grid);
        loss_fit = select_arma_garch(sqrt_transform(d.pml), grid);
        gain_filtered = filtered_series(*gain_fit);
        loss_filtered = filtered_series(*loss_fit);
    }

    const std::vector<IndicatorSeries>& get_indicators() {
        if (!indicators) indicators = build_indicators(get_daily(), get_bars());
        return *indicators;
    }

    size_t split_index(const std::string& split) {
        const DecomposedSeries& d = get_decomp();
        Date target = parse_date(split);
        if (cfg.frequency == Frequency::quarterly && target.day == 0 && target.month % 3 != 0)
            target.month = ((target.month + 2) / 3) * 3;  // snap to quarter end
        for (size_t i = 0; i < d.size(); ++i)
            if (!(d.dates[i] < target)) return i;
        throw DataError("split date " + split + " lies beyond the sample");
    }

    // subcommands --------------------------------------------------------
    void run_decompose(RunOutput& out);
    void run_describe(RunOutput& out);
    void run_fit(RunOutput& out);
    void run_granger(RunOutput& out);
    void run_var(RunOutput& out);
    void run_oos(RunOutput& out);
    void run_controls(RunOutput& out);
    void run_simulate(RunOutput& out, const std::string& task);
};

namespace {

std::string coef_cell(double coef, double t) {
    return format_number(coef) + " [" + format_number(t, 4) + "]";
}

void summary_rows(Table& t,
                  const std::vector<std::pair<std::string, const SummaryStats*>>& cols) {
    auto row = [&](const std::string& name, auto getter) {
        std::vector<std::string> cells{name};
        for (const auto& [label, s] : cols) cells.push_back(getter(*s));
        t.add_row(std::move(cells));
    };
    row("mean", [](const SummaryStats& s) { return format_number(s.mean); });
    row("std_dev", [](const SummaryStats& s) { return format_number(s.std_dev); });
    row("max", [](const SummaryStats& s) { return format_number(s.max); });
    row("min", [](const SummaryStats& s) { return format_number(s.min); });
    row("skewness", [](const SummaryStats& s) { return format_number(s.skewness); });
    row("kurtosis", [](const SummaryStats& s) { return format_number(s.kurtosis); });
    row("jarque_bera", [](const SummaryStats& s) {
        return format_number(s.jarque_bera) + significance_stars(s.jb_pvalue);
    });
    row("jb_pvalue", [](const SummaryStats& s) { return format_number(s.jb_pvalue); });
    const SummaryStats& first = *cols.front().second;
    for (size_t i = 0; i < first.acf_lags.size(); ++i) {
        std::vector<std::string> cells{"acf(" + std::to_string(first.acf_lags[i]) + ")"};
        for (const auto& [label, s] : cols) cells.push_back(format_number(s->acf_values[i]));
        t.add_row(std::move(cells));
    }
    row("ljung_box_q", [](const SummaryStats& s) {
        return format_number(s.ljung_box_q) + significance_stars(s.ljung_box_p);
    });
    row("ljung_box_p", [](const SummaryStats& s) { return format_number(s.ljung_box_p); });
    row("obs", [](const SummaryStats& s) { return std::to_string(s.n); });
}

}  // namespace

void Engine::State::run_decompose(RunOutput& out) {
    const DecomposedSeries& d = get_decomp();
    std::string path = path_for("decomposed.csv");
    // header block, then the plain CSV payload
    Table head({});
    stamp(head, "decomposed_series");
    std::string text = head.to_string();
    text.pop_back();  // drop the empty column header line
    std::ostringstream body;
    body << "date,r_full,r,ovr,pmg,pml\n";
    for (size_t i = 0; i < d.size(); ++i) {
        body << format_date(d.dates[i], d.frequency) << ',' << format_number(d.r_full[i], 12) << ','
             << format_number(d.r[i], 12) << ',' << format_number(d.ovr[i], 12) << ','
             << format_number(d.pmg[i], 12) << ',' << format_number(d.pml[i], 12) << '\n';
    }
    write_text_file(path, text + body.str());
    out.files.push_back(path);
}

void Engine::State::run_describe(RunOutput& out) {
    const DecomposedSeries& d = get_decomp();
    const std::vector<size_t> lags = {1, 3, 6, 9, 12};
    SummaryStats sr = summarize(d.r, lags, 12);
    SummaryStats sg = summarize(d.pmg, lags, 12);
    SummaryStats sl = summarize(d.pml, lags, 12);

    Table stats({"statistic", "r", "pmg", "pml"});
    stamp(stats, "summary_stats");
    summary_rows(stats, {{"r", &sr}, {"pmg", &sg}, {"pml", &sl}});
    std::string p1 = path_for("summary_stats.tsv");
    stats.write(p1);
    out.files.push_back(p1);

    CorrelationMatrix cm = correlation_matrix({d.r_full, d.r, d.pmg, d.pml});
    const std::vector<std::string> names = {"r_full", "r", "pmg", "pml"};
    Table corr({"series", "r_full", "r", "pmg", "pml"});
    stamp(corr, "correlations");
    OvernightShare os = overnight_share(d);
    corr.meta("overnight_regression", "r_full = " + format_number(os.intercept) + " + " +
                                          format_number(os.slope) + "*r, r2=" +
                                          format_number(os.r_squared));
    for (size_t i = 0; i < names.size(); ++i) {
        std::vector<std::string> cells{names[i]};
        for (size_t j = 0; j < names.size(); ++j) {
            if (j > i) {
                cells.push_back("");
            } else if (j == i) {
                cells.push_back("1");
            } else {
                cells.push_back(format_number(cm.corr[i][j]) + significance_stars(cm.p_value[i][j]));
            }
        }
        corr.add_row(std::move(cells));
    }
    std::string p2 = path_for("correlations.tsv");
    corr.write(p2);
    out.files.push_back(p2);
}

void Engine::State::run_fit(RunOutput& out) {
    ensure_fits();
    const ArmaGarchFit& g = *gain_fit;
    const ArmaGarchFit& l = *loss_fit;

    // standard error layout: mu, ar..., ma..., omega, garch..., arch...
    auto se_at = [](const ArmaGarchFit& f, size_t idx) {
        return idx < f.std_errors.size() ? f.std_errors[idx] : kNan;
    };

    Table t({"parameter", "sqrt_pmg", "sqrt_pml"});
    stamp(t, "arma_garch_fits");
    t.meta("spec_pmg", g.spec.label());
    t.meta("spec_pml", l.spec.label());
    auto add_param = [&](const std::string& name, auto getter) {
        t.add_row({name, getter(g), getter(l)});
    };
    add_param("mu", [&](const ArmaGarchFit& f) { return coef_cell(f.mu, se_at(f, 0) > 0 ? f.mu / se_at(f, 0) : kNan); });
    for (int i = 0; i < 2; ++i) {
        add_param("ar(" + std::to_string(i + 1) + ")", [&](const ArmaGarchFit& f) -> std::string {
            if (i >= f.spec.ar) return "";
            size_t idx = 1 + i;
            return coef_cell(f.ar_coef[i], se_at(f, idx) > 0 ? f.ar_coef[i] / se_at(f, idx) : kNan);
        });
    }
    for (int j = 0; j < 2; ++j) {
        add_param("ma(" + std::to_string(j + 1) + ")", [&](const ArmaGarchFit& f) -> std::string {
            if (j >= f.spec.ma) return "";
            size_t idx = 1 + f.spec.ar + j;
            return coef_cell(f.ma_coef[j], se_at(f, idx) > 0 ? f.ma_coef[j] / se_at(f, idx) : kNan);
        });
    }
    add_param("omega", [&](const ArmaGarchFit& f) -> std::string {
        if (f.spec.constant_variance()) return format_number(f.omega);
        size_t idx = 1 + f.spec.ar + f.spec.ma;
        return coef_cell(f.omega, se_at(f, idx) > 0 ? f.omega / se_at(f, idx) : kNan);
    });
    add_param("garch(1)", [&](const ArmaGarchFit& f) -> std::string {
        if (f.spec.garch == 0) return "";
        size_t idx = 1 + f.spec.ar + f.spec.ma + 1;
        return coef_cell(f.garch_coef[0], se_at(f, idx) > 0 ? f.garch_coef[0] / se_at(f, idx) : kNan);
    });
    add_param("arch(1)", [&](const ArmaGarchFit& f) -> std::string {
        if (f.spec.arch == 0) return "";
        size_t idx = 1 + f.spec.ar + f.spec.ma + 1 + f.spec.garch;
        return coef_cell(f.arch_coef[0], se_at(f, idx) > 0 ? f.arch_coef[0] / se_at(f, idx) : kNan);
    });
    add_param("r_squared_pct", [&](const ArmaGarchFit& f) { return format_number(100.0 * f.r_squared); });
    add_param("aic", [&](const ArmaGarchFit& f) { return format_number(f.aic, 10); });
    add_param("log_likelihood", [&](const ArmaGarchFit& f) { return format_number(f.log_likelihood, 10); });
    add_param("status", [&](const ArmaGarchFit& f) { return std::string(::pxt::to_string(f.status)); });
    std::string p1 = path_for("arma_garch_fits.tsv");
    t.write(p1);
    out.files.push_back(p1);

    const std::vector<size_t> lags = {1, 3, 6, 9, 12};
    SummaryStats sg = summarize(*gain_filtered, lags, 12);
    SummaryStats sl = summarize(*loss_filtered, lags, 12);
    Table ft({"statistic", "pmg_filtered", "pml_filtered"});
    stamp(ft, "filtered_stats");
    summary_rows(ft, {{"pmg_filtered", &sg}, {"pml_filtered", &sl}});
    std::string p2 = path_for("filtered_stats.tsv");
    ft.write(p2);
    out.files.push_back(p2);

    json jf;
    for (const auto& [name, fit] : {std::pair{"sqrt_pmg", &g}, std::pair{"sqrt_pml", &l}}) {
        json f;
        f["spec"] = fit->spec.label();
        f["mu"] = fit->mu;
        f["ar"] = fit->ar_coef;
        f["ma"] = fit->ma_coef;
        f["omega"] = fit->omega;
        f["garch"] = fit->garch_coef;
        f["arch"] = fit->arch_coef;
        f["log_likelihood"] = fit->log_likelihood;
        f["aic"] = fit->aic;
        f["r_squared"] = fit->r_squared;
        f["status"] = ::pxt::to_string(fit->status);
        json se = json::array();
        for (double v : fit->std_errors) se.push_back(std::isfinite(v) ? json(v) : json());
        f["std_errors"] = se;
        json order = json::array();
        order.push_back("mu");
        for (int i = 1; i <= fit->spec.ar; ++i) order.push_back("ar" + std::to_string(i));
        for (int i = 1; i <= fit->spec.ma; ++i) order.push_back("ma" + std::to_string(i));
        order.push_back("omega");
        for (int i = 1; i <= fit->spec.garch; ++i) order.push_back("garch" + std::to_string(i));
        for (int i = 1; i <= fit->spec.arch; ++i) order.push_back("arch" + std::to_string(i));
        f["parameter_order"] = order;
        jf[name] = f;
    }
    Table jhead({});
    stamp(jhead, "fits");
    std::string jtext = jhead.to_string();
    jtext.pop_back();
    std::string p3 = path_for("fits.json");
    write_text_file(p3, jtext + jf.dump(2) + "\n");
    out.files.push_back(p3);
}

void Engine::State::run_granger(RunOutput& out) {
    const DecomposedSeries& d = get_decomp();
    // one p-value column and one F column per lag
    std::vector<std::string> cols{"direction"};
    for (size_t lag : cfg.granger_lags) cols.push_back("p_lag" + std::to_string(lag));
    for (size_t lag : cfg.granger_lags) cols.push_back("f_lag" + std::to_string(lag));
    Table table(cols);
    stamp(table, "granger_tests");

    auto add_direction = [&](const std::string& label, std::span<const double> x,
                             std::span<const double> y) {
        std::vector<std::string> p_cells, f_cells;
        for (size_t lag : cfg.granger_lags) {
            GrangerResult r = granger_test(x, y, lag);
            p_cells.push_back(format_number(r.p_value, 4));
            f_cells.push_back(format_number(r.f_stat, 6));
        }
        std::vector<std::string> cells{label};
        cells.insert(cells.end(), p_cells.begin(), p_cells.end());
        cells.insert(cells.end(), f_cells.begin(), f_cells.end());
        table.add_row(std::move(cells));
    };

    add_direction("pmg->pml", d.pmg, d.pml);
    add_direction("pml->pmg", d.pml, d.pmg);
    if (cfg.granger_filtered) {
        ensure_fits();
        add_direction("pmg_f->pml_f", *gain_filtered, *loss_filtered);
        add_direction("pml_f->pmg_f", *loss_filtered, *gain_filtered);
    }
    std::string p = path_for("granger_tests.tsv");
    table.write(p);
    out.files.push_back(p);
}

void Engine::State::run_var(RunOutput& out) {
    const DecomposedSeries& d = get_decomp();

    struct Window {
        std::string label;
        size_t begin;
        size_t end;  // exclusive
    };
    std::vector<Window> windows{{"full", 0, d.size()}};
    for (const auto& [a, b] : cfg.subsamples) {
        Date da = parse_date(a), db = parse_date(b);
        size_t lo = 0, hi = d.size();
        while (lo < d.size() && d.dates[lo] < da) ++lo;
        while (hi > 0 && db < d.dates[hi - 1]) --hi;
        if (lo + 30 > hi) throw DataError("subsample [" + a + "," + b + "] too short");
        windows.push_back({a + ".." + b, lo, hi});
    }

    Table est({"coefficient", "window", "gain_eq", "loss_eq"});
    stamp(est, "var_estimates");
    Table r2({"window", "var_order", "var_r2_pct", "aim_r2_pct", "predictability_ratio"});
    stamp(r2, "insample_r2");

    for (const auto& w : windows) {
        std::vector<double> gain(d.pmg.begin() + w.begin, d.pmg.begin() + w.end);
        std::vector<double> loss(d.pml.begin() + w.begin, d.pml.begin() + w.end);
        std::vector<double> rfull(d.r_full.begin() + w.begin, d.r_full.begin() + w.end);
        VarFit fit = fit_var(gain, loss, cfg.q_max);
        for (int i = 1; i <= fit.order; ++i) {
            est.add_row({"gain_lag" + std::to_string(i), w.label,
                         coef_cell(fit.gain_eq[i], fit.gain_tstat[i]),
                         coef_cell(fit.loss_eq[i], fit.loss_tstat[i])});
        }
        for (int i = 1; i <= fit.order; ++i) {
            est.add_row({"loss_lag" + std::to_string(i), w.label,
                         coef_cell(fit.gain_eq[fit.order + i], fit.gain_tstat[fit.order + i]),
                         coef_cell(fit.loss_eq[fit.order + i], fit.loss_tstat[fit.order + i])});
        }
        est.add_row({"const", w.label, coef_cell(fit.gain_eq[0], fit.gain_tstat[0]),
                     coef_cell(fit.loss_eq[0], fit.loss_tstat[0])});
        est.add_row({"r_squared", w.label, format_number(fit.gain_r2), format_number(fit.loss_r2)});

        InSampleForecast ins = in_sample_return_forecast(fit, gain, loss);
        bool aim_const = cfg.aim_constant_variance.value_or(cfg.frequency == Frequency::quarterly);
        ArchInMeanFit aim = fit_arch_in_mean(rfull, aim_const, cfg.leverage);
        double ratio = aim.r_squared > 0.0 ? ins.r_squared / aim.r_squared : kNan;
        r2.add_row({w.label, std::to_string(fit.order), format_number(100.0 * ins.r_squared),
                    format_number(100.0 * aim.r_squared), format_number(ratio)});
    }
    std::string p1 = path_for("var_estimates.tsv");
    est.write(p1);
    out.files.push_back(p1);
    std::string p2 = path_for("insample_r2.tsv");
    r2.write(p2);
    out.files.push_back(p2);
}

void Engine::State::run_oos(RunOutput& out) {
    const DecomposedSeries& d = get_decomp();

    // Per-period risk-free rate from the predictor file, when present.
    std::vector<double> rf_full;
    bool have_rf = false;
    if (!cfg.predictors_path.empty()) {
        const PredictorTable& pt = get_predictors();
        for (const auto& s : pt.series) {
            if (s.name == "TBL") {
                rf_full.assign(s.values.begin() + 1, s.values.end());  // align to decomposition
                for (double& v : rf_full) v /= static_cast<double>(cfg.periods_per_year());
                have_rf = true;
                break;
            }
        }
        if (!have_rf) out.notes.push_back("predictor file has no TBL column; backtest skipped");
    } else {
        out.notes.push_back("no predictors configured; backtest skipped");
    }

    Table t({"oos_start", "n_train", "n_oos", "var_order", "r2_oos_pct", "cw_stat", "cw_p",
             "cer_gain_pct", "sharpe_model", "sharpe_bh"});
    stamp(t, "oos_evaluation");
    json summary;

    for (const std::string& split : cfg.oos_splits) {
        size_t idx = split_index(split);
        if (idx < cfg.min_training())
            throw DataError("training window before " + split + " is shorter than " +
                            std::to_string(cfg.min_training()) + " periods");
        OosEvaluation ev = evaluate_oos(d.pmg, d.pml, d.r, idx, cfg.q_max);

        // forecast dump
        std::ostringstream fc;
        fc << "date,r,r_mean,r_var_forecast\n";
        for (size_t i = 0; i < ev.realized.size(); ++i) {
            fc << format_date(d.dates[idx + i], d.frequency) << ','
               << format_number(ev.realized[i], 12) << ',' << format_number(ev.mean_forecast[i], 12)
               << ',' << format_number(ev.model_forecast[i], 12) << '\n';
        }
        Table fhead({});
        stamp(fhead, "forecasts_" + split);
        std::string ftext = fhead.to_string();
        ftext.pop_back();
        std::string fpath = path_for("forecasts_" + split + ".csv");
        write_text_file(fpath, ftext + fc.str());
        out.files.push_back(fpath);

        std::string cer = "", srp = "", srb = "";
        json jsplit;
        jsplit["oos_start"] = split;
        jsplit["var_order"] = ev.var_order;
        jsplit["r2_oos"] = ev.r2_oos;
        jsplit["clark_west_stat"] = ev.clark_west_stat;
        jsplit["clark_west_p"] = ev.clark_west_p;

        if (have_rf) {
            bool rf_ok = true;
            for (size_t i = idx; i < d.size(); ++i)
                if (!std::isfinite(rf_full[i])) rf_ok = false;
            if (!rf_ok) {
                out.notes.push_back("missing TBL values in the evaluation window for " + split);
            } else {
                BacktestConfig bc;
                bc.gamma = cfg.gamma;
                bc.weight_min = cfg.weight_min;
                bc.weight_max = cfg.weight_max;
                bc.variance_window = cfg.effective_variance_window();
                bc.annualization = cfg.annualization();
                std::vector<double> rf_window(rf_full.begin() + idx, rf_full.end());
                BacktestReport rep = run_backtest(d.r, idx, ev.mean_forecast, ev.model_forecast,
                                                  rf_window, bc);
                cer = format_number(rep.cer_gain);
                srp = format_number(rep.sharpe_model, 4);
                srb = format_number(rep.sharpe_buy_hold, 4);
                jsplit["cer_gain_pct"] = rep.cer_gain;
                jsplit["sharpe_model"] = rep.sharpe_model;
                jsplit["sharpe_buy_hold"] = rep.sharpe_buy_hold;
                jsplit["weights_clamped_low"] = rep.clamped_low;
                jsplit["weights_clamped_high"] = rep.clamped_high;

                std::ostringstream ledger;
                ledger << "date,weight_bench,weight_model,ret_bench,ret_model,rf\n";
                for (size_t i = 0; i < rep.ret_model.size(); ++i) {
                    ledger << format_date(d.dates[idx + i], d.frequency) << ','
                           << format_number(rep.weight_bench[i], 12) << ','
                           << format_number(rep.weight_model[i], 12) << ','
                           << format_number(rep.ret_bench[i], 12) << ','
                           << format_number(rep.ret_model[i], 12) << ','
                           << format_number(rep.risk_free[i], 12) << '\n';
                }
                Table lhead({});
                stamp(lhead, "ledger_" + split);
                std::string ltext = lhead.to_string();
                ltext.pop_back();
                std::string lpath = path_for("ledger_" + split + ".csv");
                write_text_file(lpath, ltext + ledger.str());
                out.files.push_back(lpath);
            }
        }
        t.add_row({split, std::to_string(ev.split), std::to_string(ev.realized.size()),
                   std::to_string(ev.var_order),
                   format_number(100.0 * ev.r2_oos) + significance_stars(ev.clark_west_p),
                   format_number(ev.clark_west_stat, 6), format_number(ev.clark_west_p, 6), cer,
                   srp, srb});
        summary[split] = jsplit;
    }
    std::string p1 = path_for("oos_evaluation.tsv");
    t.write(p1);
    out.files.push_back(p1);
    Table shead({});
    stamp(shead, "backtest_summary");
    std::string stext = shead.to_string();
    stext.pop_back();
    std::string p2 = path_for("backtest_summary.json");
    write_text_file(p2, stext + summary.dump(2) + "\n");
    out.files.push_back(p2);
}

void Engine::State::run_controls(RunOutput& out) {
    ensure_fits();
    const DecomposedSeries& d = get_decomp();
    const size_t n = d.size();

    struct Group {
        std::string label;
        std::vector<ControlTerm> terms;
    };
    std::vector<Group> groups;

    if (!cfg.predictors_path.empty()) {
        const PredictorTable& pt = get_predictors();
        for (const auto& s : pt.series) {
            ControlTerm term{s.name, std::vector<double>(s.values.begin() + 1, s.values.end())};
            groups.push_back({s.name, {std::move(term)}});
        }
    } else {
        out.notes.push_back("no predictors configured; business-cycle controls skipped");
    }

    if (!cfg.daily_bars_path.empty()) {
        const auto& inds = get_indicators();
        auto aligned = [&](const IndicatorSeries& s) {
            return std::vector<double>(s.values.begin() + 1, s.values.end());
        };
        const IndicatorSeries* mri = nullptr;
        const IndicatorSeries* ima = nullptr;
        std::vector<ControlTerm> plain;
        for (const auto& s : inds) {
            if (s.name == "MRI") mri = &s;
            if (s.name == "I_MA") ima = &s;
        }
        if (mri && ima) {
            std::vector<double> up(n, kNan), down(n, kNan);
            for (size_t i = 1; i < mri->values.size() && i <= n; ++i) {
                double m = mri->values[i], g = ima->values[i];
                if (std::isfinite(m) && std::isfinite(g)) {
                    up[i - 1] = g * m;
                    down[i - 1] = (1.0 - g) * m;
                }
            }
            groups.push_back({"MRI_state", {{"I_MA*MRI", up}, {"(1-I_MA)*MRI", down}}});
        }
        const IndicatorSeries* h52 = nullptr;
        const IndicatorSeries* hmax = nullptr;
        const IndicatorSeries* sk = nullptr;
        for (const auto& s : inds) {
            if (s.name == "H52") h52 = &s;
            if (s.name == "Hmax") hmax = &s;
            if (s.name == "SK") sk = &s;
        }
        if (h52 && hmax)
            groups.push_back({"highs", {{"H52", aligned(*h52)}, {"Hmax", aligned(*hmax)}}});
        if (sk) groups.push_back({"skewness", {{"SK", aligned(*sk)}}});

        std::ostringstream dump;
        dump << "date";
        for (const auto& s : inds) dump << ',' << s.name;
        dump << '\n';
        const auto& calendar = get_bars();
        for (size_t i = 0; i < calendar.size(); ++i) {
            dump << format_date(calendar.bars[i].date, calendar.frequency);
            for (const auto& s : inds)
                dump << ',' << (std::isfinite(s.values[i]) ? format_number(s.values[i], 10) : "");
            dump << '\n';
        }
        Table ihead({});
        stamp(ihead, "indicators");
        for (const auto& s2 : inds) {
            std::string note = format_date(calendar.bars[s2.first_valid].date, cfg.frequency);
            if (s2.partial_history) note += " (partial long-run history)";
            ihead.meta("first_valid_" + s2.name, note);
        }
        std::string itext = ihead.to_string();
        itext.pop_back();
        std::string ipath = path_for("indicators.csv");
        write_text_file(ipath, itext + dump.str());
        out.files.push_back(ipath);
    } else {
        out.notes.push_back("no daily bars configured; indicator controls skipped");
    }

    if (!cfg.sentiment_path.empty()) {
        const PredictorTable& st = get_sentiment();
        for (const auto& s : st.series) {
            ControlTerm term{s.name, std::vector<double>(s.values.begin() + 1, s.values.end())};
            groups.push_back({"sentiment_" + s.name, {std::move(term)}});
        }
    }

    Table t({"group", "variant", "loss_f", "n", "dropped", "terms"});
    stamp(t, "control_regressions");

    auto term_text = [](const OlsResult& r) {
        std::string s;
        for (size_t i = 2; i < r.terms.size(); ++i) {
            if (!s.empty()) s += "  ";
            s += r.terms[i].name + "=" + format_number(r.terms[i].coef) +
                 significance_stars(r.terms[i].p_value) + " [" +
                 format_number(r.terms[i].t_stat, 4) + "]";
        }
        return s;
    };
    auto loss_cell = [](const OlsResult& r) {
        return format_number(r.terms[1].coef) + significance_stars(r.terms[1].p_value) + " [" +
               format_number(r.terms[1].t_stat, 4) + "]";
    };

    OlsResult bench = control_regression(*gain_filtered, *loss_filtered, {}, false);
    t.add_row({"none", "benchmark", loss_cell(bench), std::to_string(bench.n),
               std::to_string(bench.dropped), ""});

    for (const auto& g : groups) {
        for (bool contemporaneous : {false, true}) {
            try {
                OlsResult r =
                    control_regression(*gain_filtered, *loss_filtered, g.terms, contemporaneous);
                t.add_row({g.label, contemporaneous ? "lagged+next" : "lagged", loss_cell(r),
                           std::to_string(r.n), std::to_string(r.dropped), term_text(r)});
            } catch (const Error& e) {
                out.notes.push_back("control group '" + g.label + "' skipped: " + e.what());
            }
        }
    }
    std::string p = path_for("control_regressions.tsv");
    t.write(p);
    out.files.push_back(p);
}

void Engine::State::run_simulate(RunOutput& out, const std::string& task) {
    json rep;
    rep["task"] = task;
    rep["sims"] = cfg.sims;
    rep["seed"] = cfg.seed;
    const int sims = cfg.sims;

    if (task == "granger-size" || task == "granger-power") {
        const size_t n = 500;
        const size_t lag = 2;
        int reject5 = 0, reject1 = 0;
        for (int s = 0; s < sims; ++s) {
            Rng rng(cfg.seed + static_cast<uint64_t>(s));
            std::vector<double> x(n), y(n);
            for (size_t i = 0; i < n; ++i) x[i] = rng.normal();
            if (task == "granger-size") {
                for (size_t i = 0; i < n; ++i) y[i] = rng.normal();
            } else {
                y[0] = rng.normal();
                for (size_t i = 1; i < n; ++i) y[i] = 0.8 * x[i - 1] + rng.normal();
            }
            GrangerResult r = granger_test(x, y, lag);
            if (r.p_value < 0.05) ++reject5;
            if (r.p_value < 0.01) ++reject1;
        }
        rep["n"] = n;
        rep["lag"] = lag;
        rep["reject_rate_5pct"] = static_cast<double>(reject5) / sims;
        rep["reject_rate_1pct"] = static_cast<double>(reject1) / sims;
    } else if (task == "garch-recovery") {
        ArmaGarchParams truth;
        truth.mu = 0.0;
        truth.ar_coef = {0.9};
        truth.ma_coef = {-0.5};
        truth.omega = 1e-4;
        truth.garch_coef = {0.85};
        truth.arch_coef = {0.08};
        const size_t n = 5000;
        int recovered = 0, locally_optimal = 0, converged = 0;
        for (int s = 0; s < sims; ++s) {
            Rng rng(cfg.seed + static_cast<uint64_t>(s));
            std::vector<double> y = simulate_arma_garch(truth, n, rng);
            ArmaGarchFit fit = fit_arma_garch(y, {1, 1, 1, 1});
            if (fit.status == FitStatus::converged) ++converged;
            // omega is judged relative to the process's variance scale: its
            // own sampling deviation is ~20% of omega at this persistence,
            // so a band in omega units would measure the estimator, not us
            double var_scale =
                truth.omega / (1.0 - truth.garch_coef[0] - truth.arch_coef[0]);
            bool ok = std::fabs(fit.mu - truth.mu) <= 0.05 &&
                      std::fabs(fit.ar_coef[0] - truth.ar_coef[0]) <= 0.05 &&
                      std::fabs(fit.ma_coef[0] - truth.ma_coef[0]) <= 0.05 &&
                      std::fabs(fit.garch_coef[0] - truth.garch_coef[0]) <= 0.05 &&
                      std::fabs(fit.arch_coef[0] - truth.arch_coef[0]) <= 0.05 &&
                      std::fabs(fit.omega - truth.omega) <= 0.1 * var_scale;
            if (ok) ++recovered;

            // coordinate perturbations must not improve the likelihood
            double h0 = fitted_presample_variance(fit, y);
            std::vector<double> nat = fit.natural_parameters();
            bool optimal = true;
            for (size_t i = 0; i < nat.size() && optimal; ++i) {
                for (double sign : {1.0, -1.0}) {
                    std::vector<double> v = nat;
                    v[i] += sign * 1e-4;
                    double ll = arma_garch_loglik(y, fit.spec, v, h0);
                    if (std::isfinite(ll) &&
                        ll > fit.log_likelihood + 1e-7 * std::fabs(fit.log_likelihood)) {
                        optimal = false;
                        break;
                    }
                }
            }
            if (optimal) ++locally_optimal;
        }
        rep["n"] = n;
        rep["recovery_rate"] = static_cast<double>(recovered) / sims;
        rep["local_optimality_rate"] = static_cast<double>(locally_optimal) / sims;
        rep["convergence_rate"] = static_cast<double>(converged) / sims;
    } else if (task == "var-recovery") {
        VarParams truth;
        truth.gain_const = 0.01;
        truth.loss_const = 0.012;
        truth.gain_on_gain = {0.3};
        truth.gain_on_loss = {0.2};
        truth.loss_on_gain = {0.1};
        truth.loss_on_loss = {0.25};
        truth.noise_gain = 0.02;
        truth.noise_loss = 0.025;
        truth.noise_corr = 0.2;
        const size_t n = 5000;
        int recovered = 0, order_ok = 0;
        for (int s = 0; s < sims; ++s) {
            Rng rng(cfg.seed + static_cast<uint64_t>(s));
            std::vector<double> gain, loss;
            simulate_var(truth, n, rng, gain, loss);
            VarFit fit = fit_var(gain, loss, 4);
            if (fit.order == 1) ++order_ok;
            VarFit f1 = fit.order == 1 ? fit : fit_var_order(gain, loss, 1);
            bool ok = std::fabs(f1.gain_eq[1] - truth.gain_on_gain[0]) <= 0.05 &&
                      std::fabs(f1.gain_eq[2] - truth.gain_on_loss[0]) <= 0.05 &&
                      std::fabs(f1.loss_eq[1] - truth.loss_on_gain[0]) <= 0.05 &&
                      std::fabs(f1.loss_eq[2] - truth.loss_on_loss[0]) <= 0.05;
            if (ok) ++recovered;
        }
        rep["n"] = n;
        rep["recovery_rate"] = static_cast<double>(recovered) / sims;
        rep["order_selection_rate"] = static_cast<double>(order_ok) / sims;
    } else {
        throw ConfigError("unknown simulate task '" + task +
                          "' (expected granger-size, granger-power, garch-recovery or var-recovery)");
    }

    Table head({});
    stamp(head, "simulation_" + task);
    std::string text = head.to_string();
    text.pop_back();
    std::string p = path_for("simulation_" + task + ".json");
    write_text_file(p, text + rep.dump(2) + "\n");
    out.files.push_back(p);
}

// ---------------------------------------------------------------------------

Engine::Engine(RunConfig cfg) : state_(std::make_unique<State>(std::move(cfg))) {}
Engine::~Engine() = default;

const RunConfig& Engine::config() const { return state_->cfg; }

RunOutput Engine::run(const std::string& subcommand, const std::string& argument) {
    for (const std::string* path : {&state_->cfg.bars_path, &state_->cfg.daily_bars_path,
                                    &state_->cfg.predictors_path, &state_->cfg.sentiment_path}) {
        if (!path->empty() && !std::filesystem::exists(*path))
            throw DataError("configured input '" + *path + "' does not exist");
    }
    RunOutput out;
    if (subcommand == "decompose") state_->run_decompose(out);
    else if (subcommand == "describe") state_->run_describe(out);
    else if (subcommand == "fit") state_->run_fit(out);
    else if (subcommand == "granger") state_->run_granger(out);
    else if (subcommand == "var") state_->run_var(out);
    else if (subcommand == "oos") state_->run_oos(out);
    else if (subcommand == "controls") state_->run_controls(out);
    else if (subcommand == "simulate") state_->run_simulate(out, argument);
    else if (subcommand == "all") {
        state_->run_decompose(out);
        state_->run_describe(out);
        state_->run_fit(out);
        state_->run_granger(out);
        state_->run_var(out);
        state_->run_oos(out);
        state_->run_controls(out);
    } else {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    return out;
}

}  // namespace pxt
