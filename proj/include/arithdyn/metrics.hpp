#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arithdyn/datagen.hpp"
#include "arithdyn/decode.hpp"
#include "arithdyn/task.hpp"

namespace arithdyn {

// Digit-wise error rates. e[i] is the mismatch fraction at the i-th place
// from the right after the gold-width truncation/zero-padding rule.
struct DigitErrorRecord {
    int64_t step = 0;
    std::vector<double> e;
    int64_t n = 0;
};

DigitErrorRecord digit_wise_error(const std::vector<std::string>& preds,
                                  const std::vector<std::string>& golds);

// Histogram of integer prediction errors e' - ehat with a moment-fit normal
// and its coefficient of determination against the binned counts.
struct ErrorHistogram {
    std::map<long long, long long> counts; // unit-width integer bins
    double mu = 0.0, sigma = 0.0, r2 = 0.0;
    bool degenerate = false; // all samples equal: sigma = 0, r2 undefined
    std::vector<int64_t> window;
};

ErrorHistogram fit_error_gaussian(const std::vector<long long>& samples,
                                  std::vector<int64_t> window = {});

// R^2 = 1 - SS_res/SS_tot of predictions against observations.
double r_squared(const std::vector<double>& y, const std::vector<double>& yhat);

enum class MixKind { None, Swapping, Repeating };

struct MixResult {
    MixKind kind = MixKind::None;
    int split = 0; // prefix length 1..3
};

// Detects recombined 4-digit outputs: SWAPPING when two outputs exchange
// suffixes of an input pair, REPEATING when one recombination appears next to
// an intact second input. Correct outputs never classify; recombinations that
// collide with an actual input do not count.
MixResult classify_mixing(const std::vector<std::string>& input_nums,
                          const std::vector<std::string>& output_nums);

struct MixingReport {
    int64_t total = 0;         // examples scored
    int64_t errors = 0;        // outputs differing from gold
    int64_t swapping = 0;
    int64_t repeating = 0;
    std::array<int64_t, 4> split_counts{}; // indexed by split position 1..3
    std::vector<std::string> transcripts;  // a few offending input->output lines

    double mixing_rate() const { return total ? double(swapping + repeating) / double(total) : 0.0; }
};

MixingReport mixing_report(const std::vector<Example>& examples,
                           const std::vector<ParsedAnswer>& outputs);

// kind: crude-length | digit-1..digit-4 | distinct-lengths.
double sorting_subskill_accuracy(const std::string& kind, const std::vector<Example>& examples,
                                 const std::vector<ParsedAnswer>& outputs);

// Fraction of predictions whose smallest output starts with the forbidden
// prefix of the unique 4-digit input (1..3 leading digits by kind).
double skewed_error_rate(const std::string& kind, const std::vector<Example>& examples,
                         const std::vector<ParsedAnswer>& outputs);

// Exact-match accuracy of the relation token, split by the examples' group
// label (NCID or contrast index, whichever is set).
std::map<int, double> comparison_group_accuracy(const std::vector<Example>& examples,
                                                const std::vector<ParsedAnswer>& outputs);

} // namespace arithdyn
