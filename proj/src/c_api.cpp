#include "pxt.h"

#include <cstring>
#include <string>

#include "pxt/arma_garch.hpp"
#include "pxt/bars.hpp"
#include "pxt/decompose.hpp"
#include "pxt/engine.hpp"
#include "pxt/errors.hpp"
#include "pxt/inference.hpp"
#include "pxt/stats.hpp"
#include "pxt/var_forecast.hpp"

namespace {

thread_local std::string g_last_error;

pxt_status fail(pxt_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
pxt_status guarded(Fn&& fn) {
    try {
        fn();
        return PXT_OK;
    } catch (const pxt::ConfigError& e) {
        return fail(PXT_ERR_CONFIG, e.what());
    } catch (const pxt::DataError& e) {
        return fail(PXT_ERR_DATA, e.what());
    } catch (const pxt::NumericError& e) {
        return fail(PXT_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(PXT_ERR_NUMERIC, e.what());
    }
}

pxt::Frequency to_frequency(pxt_frequency f) {
    switch (f) {
        case PXT_DAILY: return pxt::Frequency::daily;
        case PXT_QUARTERLY: return pxt::Frequency::quarterly;
        default: return pxt::Frequency::monthly;
    }
}

}  // namespace

struct pxt_bars {
    pxt::BarSeries series;
};

struct pxt_decomposition {
    pxt::DecomposedSeries series;
};

struct pxt_engine {
    pxt::Engine engine;
    std::string summary;
    explicit pxt_engine(pxt::RunConfig cfg) : engine(std::move(cfg)) {}
};

extern "C" {

const char* pxt_version(void) { return "0.1.0"; }

const char* pxt_last_error(void) { return g_last_error.c_str(); }

pxt_status pxt_bars_load(const char* path, pxt_frequency frequency, pxt_bars** out) {
    if (!path || !out) return fail(PXT_ERR_CONFIG, "pxt_bars_load: null argument");
    *out = nullptr;
    return guarded([&] {
        auto* handle = new pxt_bars{pxt::load_bars(path, to_frequency(frequency))};
        *out = handle;
    });
}

pxt_status pxt_bars_to_quarterly(const pxt_bars* monthly, pxt_bars** out) {
    if (!monthly || !out) return fail(PXT_ERR_CONFIG, "pxt_bars_to_quarterly: null argument");
    *out = nullptr;
    return guarded([&] { *out = new pxt_bars{pxt::to_quarterly(monthly->series)}; });
}

long pxt_bars_count(const pxt_bars* bars) {
    return bars ? static_cast<long>(bars->series.size()) : 0;
}

void pxt_bars_free(pxt_bars* bars) { delete bars; }

pxt_status pxt_decompose(const pxt_bars* bars, pxt_convention convention,
                         pxt_decomposition** out) {
    if (!bars || !out) return fail(PXT_ERR_CONFIG, "pxt_decompose: null argument");
    *out = nullptr;
    return guarded([&] {
        auto conv = convention == PXT_LOW_EXTREME ? pxt::Convention::low_extreme
                                                  : pxt::Convention::high_extreme;
        *out = new pxt_decomposition{pxt::decompose(bars->series, conv)};
    });
}

long pxt_decomposition_size(const pxt_decomposition* d) {
    return d ? static_cast<long>(d->series.size()) : 0;
}

pxt_status pxt_decomposition_values(const pxt_decomposition* d, const char* field,
                                    double* buffer, long capacity) {
    if (!d || !field || !buffer)
        return fail(PXT_ERR_CONFIG, "pxt_decomposition_values: null argument");
    const std::vector<double>* src = nullptr;
    std::string name(field);
    if (name == "r_full") src = &d->series.r_full;
    else if (name == "r") src = &d->series.r;
    else if (name == "ovr") src = &d->series.ovr;
    else if (name == "pmg") src = &d->series.pmg;
    else if (name == "pml") src = &d->series.pml;
    else return fail(PXT_ERR_CONFIG, "unknown field '" + name + "'");
    if (capacity < static_cast<long>(src->size()))
        return fail(PXT_ERR_CONFIG, "buffer capacity too small");
    std::memcpy(buffer, src->data(), src->size() * sizeof(double));
    return PXT_OK;
}

void pxt_decomposition_free(pxt_decomposition* d) { delete d; }

pxt_status pxt_summarize(const double* x, long n, int q_lag, pxt_summary* out) {
    if (!x || !out || n <= 0 || q_lag < 0)
        return fail(PXT_ERR_CONFIG, "pxt_summarize: bad arguments");
    return guarded([&] {
        pxt::SummaryStats s = pxt::summarize(std::span(x, static_cast<size_t>(n)), {},
                                             static_cast<size_t>(q_lag));
        out->mean = s.mean;
        out->std_dev = s.std_dev;
        out->max = s.max;
        out->min = s.min;
        out->skewness = s.skewness;
        out->kurtosis = s.kurtosis;
        out->jarque_bera = s.jarque_bera;
        out->jb_pvalue = s.jb_pvalue;
        out->ljung_box_q = s.ljung_box_q;
        out->ljung_box_p = s.ljung_box_p;
        out->n = static_cast<long>(s.n);
    });
}

pxt_status pxt_granger_test(const double* x, const double* y, long n, int lag, pxt_granger* out) {
    if (!x || !y || !out || n <= 0 || lag <= 0)
        return fail(PXT_ERR_CONFIG, "pxt_granger_test: bad arguments");
    return guarded([&] {
        pxt::GrangerResult r =
            pxt::granger_test(std::span(x, static_cast<size_t>(n)),
                              std::span(y, static_cast<size_t>(n)), static_cast<size_t>(lag));
        out->f_stat = r.f_stat;
        out->p_value = r.p_value;
        out->n_used = static_cast<long>(r.n_used);
    });
}

pxt_status pxt_filter_series(const double* x, long n, double* out_filtered, char* spec_label,
                             long label_capacity) {
    if (!x || !out_filtered || n <= 0)
        return fail(PXT_ERR_CONFIG, "pxt_filter_series: bad arguments");
    return guarded([&] {
        std::span<const double> in(x, static_cast<size_t>(n));
        pxt::ArmaGarchFit fit =
            pxt::select_arma_garch(pxt::sqrt_transform(in), pxt::default_spec_grid());
        std::vector<double> filtered = pxt::filtered_series(fit);
        std::memcpy(out_filtered, filtered.data(), filtered.size() * sizeof(double));
        if (spec_label && label_capacity > 0) {
            std::string label = fit.spec.label();
            std::strncpy(spec_label, label.c_str(), static_cast<size_t>(label_capacity) - 1);
            spec_label[label_capacity - 1] = '\0';
        }
    });
}

pxt_status pxt_evaluate_oos(const double* pmg, const double* pml, const double* r, long n,
                            long split, int q_max, pxt_oos* out) {
    if (!pmg || !pml || !r || !out || n <= 0 || split <= 0 || split >= n)
        return fail(PXT_ERR_CONFIG, "pxt_evaluate_oos: bad arguments");
    return guarded([&] {
        pxt::OosEvaluation ev = pxt::evaluate_oos(
            std::span(pmg, static_cast<size_t>(n)), std::span(pml, static_cast<size_t>(n)),
            std::span(r, static_cast<size_t>(n)), static_cast<size_t>(split), q_max);
        out->r2_oos = ev.r2_oos;
        out->clark_west_stat = ev.clark_west_stat;
        out->clark_west_p = ev.clark_west_p;
        out->var_order = ev.var_order;
    });
}

pxt_status pxt_engine_create(const char* config_json, pxt_engine** out) {
    if (!out) return fail(PXT_ERR_CONFIG, "pxt_engine_create: null output");
    *out = nullptr;
    return guarded([&] {
        pxt::RunConfig cfg = pxt::RunConfig::from_json_text(config_json ? config_json : "{}");
        *out = new pxt_engine(std::move(cfg));
    });
}

pxt_status pxt_engine_run(pxt_engine* engine, const char* subcommand, const char* argument) {
    if (!engine || !subcommand) return fail(PXT_ERR_CONFIG, "pxt_engine_run: null argument");
    return guarded([&] {
        pxt::RunOutput out = engine->engine.run(subcommand, argument ? argument : "");
        engine->summary = out.summary_json();
    });
}

const char* pxt_engine_summary(const pxt_engine* engine) {
    return engine ? engine->summary.c_str() : "";
}

void pxt_engine_free(pxt_engine* engine) { delete engine; }

}  // extern "C"
