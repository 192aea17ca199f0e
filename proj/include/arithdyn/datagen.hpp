#pragma once

#include <string>
#include <vector>

#include "arithdyn/rng.hpp"
#include "arithdyn/task.hpp"
#include "arithdyn/vocab.hpp"

namespace arithdyn {

// A named bundle of examples evaluated by one criterion from the metrics
// module. Structural constraints are asserted at construction.
struct TestSuite {
    std::string name;
    std::vector<Example> examples;
    std::string evaluator;
};

// --- rendering -------------------------------------------------------------

// Applies the output digit order: position j of the result holds digit
// sigma[j] of the fixed-width plain-order answer.
std::string permute_output(const std::string& digits, const std::vector<int>& sigma);

// Plain-order fixed-width digits -> rendered answer for the spec's format.
std::string format_answer(long long value, int width, const OutputFormat& fmt);

std::string render_scratchpad(long long a, long long b, long long c, long long d, ScratchpadKind kind);

// Renders one example's full text from structured fields (used by generators
// and by tests that need golden strings).
std::string render_example(const TaskSpec& spec, const std::vector<long long>& operands);

// --- generators ------------------------------------------------------------

std::vector<Example> generate(const TaskSpec& spec);

std::vector<Example> gen_addition(const TaskSpec& spec);
std::vector<Example> gen_multiplication(const TaskSpec& spec);
std::vector<Example> gen_comparison(const TaskSpec& spec);
std::vector<Example> gen_sorting(const TaskSpec& spec);

// Replaces the rendered answer digit at semantic `place` (0 = units) with a
// uniform draw from `digits`. Operands stay untouched; the spec supplies the
// output format so the right rendered position is rewritten.
Example ablate_place(const Example& e, const TaskSpec& spec, int place,
                     const std::vector<int>& digits, Rng& rng);

std::string render_multiplication(const std::string& a_digits, int b, const OutputFormat& fmt);

// --- special test suites ---------------------------------------------------

// Comparison pairs differing at exactly digit index k (1 = thousands).
TestSuite gen_contrast_pairs(int k, long long n, uint64_t seed);

// Sorting inputs 1000,b,c,9999 with b1=c1, b3=c3 and the (2,4) digit pairs
// conflicting (sign product -1) or agreeing (+1).
TestSuite gen_conflict_tests(const std::string& kind, long long n, uint64_t seed);

// SD1..SD4: toggle b1=c1 and b3=c3 while keeping the (2,4) conflict.
TestSuite gen_same_digit_tests(int variant, long long n, uint64_t seed);

// One 4-digit number among three 3-digit ones, skewed at the given digit.
TestSuite gen_skewed_sorting(const std::string& kind, long long n, uint64_t seed);

// Sorting subskill suites: all-4-digit inputs with NCID = k shared prefix.
TestSuite gen_sorting_ncid_suite(int k, long long n, uint64_t seed);
// Inputs of distinct lengths 1..4 digits.
TestSuite gen_distinct_lengths(long long n, uint64_t seed);

// --- chunked stream --------------------------------------------------------

// Concatenates rendered examples ('\n' separated) and cuts uniformly placed
// fixed-length windows, one per example.
std::vector<TokenSeq> chunk_stream(const std::vector<Example>& examples, int window,
                                   const Vocab& v, Rng& rng);

// --- files -----------------------------------------------------------------

void write_dataset(const std::vector<Example>& examples, const std::string& path);
std::vector<std::string> read_dataset_lines(const std::string& path);
// Re-derives structured examples from rendered lines (inverse of rendering).
std::vector<Example> parse_dataset(const std::vector<std::string>& lines, const TaskSpec& spec);

uint64_t fnv1a64(const std::string& data);
std::string dataset_content_hash(const std::vector<Example>& examples);

} // namespace arithdyn
