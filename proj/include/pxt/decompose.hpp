#pragma once

#include <string>
#include <vector>

#include "pxt/bars.hpp"

namespace pxt {

// Which price extreme anchors the gain/loss split.
//   high_extreme: PMG = ln H - ln O,  PML = ln H - ln C
//   low_extreme:  PMG = ln C - ln L,  PML = ln O - ln L
// Either way r = PMG - PML = ln C - ln O, and the full close-to-close
// return satisfies r_full = ovr + PMG - PML with ovr = ln O_t - ln C_{t-1}.
enum class Convention { high_extreme, low_extreme };

const char* to_string(Convention c);
Convention convention_from_string(const std::string& s);

struct DecomposedSeries {
    Convention convention = Convention::high_extreme;
    Frequency frequency = Frequency::monthly;
    std::vector<Date> dates;    // one per period, first bar consumed for the lagged close
    std::vector<double> r_full; // ln C_t - ln C_{t-1}
    std::vector<double> r;      // ln C_t - ln O_t (overnight removed)
    std::vector<double> ovr;    // ln O_t - ln C_{t-1}
    std::vector<double> pmg;
    std::vector<double> pml;

    size_t size() const { return dates.size(); }
};

DecomposedSeries decompose(const BarSeries& series, Convention convention);

struct OvernightShare {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// OLS of r_full on r; quantifies how little the overnight component adds.
OvernightShare overnight_share(const DecomposedSeries& d);

struct CovarianceDecomposition {
    double gain_gain = 0.0;   // Cov(PMG_t, PMG_{t-i})
    double loss_loss = 0.0;   // Cov(PML_t, PML_{t-i})
    double gain_loss = 0.0;   // Cov(PMG_t, PML_{t-i})
    double loss_gain = 0.0;   // Cov(PML_t, PMG_{t-i})
    double combined = 0.0;    // gain_gain + loss_loss - gain_loss - loss_gain
    double cov_r = 0.0;       // Cov(r_t, r_{t-i}) on the same window
};

// All covariances use divisor n on the identical aligned window, so
// `combined` equals `cov_r` up to rounding.
CovarianceDecomposition covariance_decomposition(const DecomposedSeries& d, size_t lag);

void write_decomposed_csv(const DecomposedSeries& d, const std::string& path);

}  // namespace pxt
