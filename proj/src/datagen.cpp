#include "arithdyn/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace arithdyn {

// --- small digit helpers -----------------------------------------------

static std::string zfill(const std::string& s, int width) {
    if (int(s.size()) >= width) return s;
    return std::string(size_t(width) - s.size(), '0') + s;
}

static int digit_count(long long v) {
    int n = 1;
    while (v >= 10) { v /= 10; ++n; }
    return n;
}

// Schoolbook product of a decimal string and one digit; keeps the answer
// exact for operands beyond 64 bits (multiplication allows up to 40 digits).
static std::string mul_digit_string(const std::string& a, int b) {
    std::string out(a.size() + 1, '0');
    int carry = 0;
    for (int i = int(a.size()) - 1; i >= 0; --i) {
        int p = (a[size_t(i)] - '0') * b + carry;
        out[size_t(i) + 1] = char('0' + p % 10);
        carry = p / 10;
    }
    out[0] = char('0' + carry);
    // Plain answers drop the leading zero ("0" stays "0").
    size_t start = out.find_first_not_of('0');
    if (start == std::string::npos) return "0";
    return out.substr(start);
}

std::string permute_output(const std::string& digits, const std::vector<int>& sigma) {
    if (digits.size() != sigma.size())
        throw std::runtime_error("permute_output: length mismatch (" + std::to_string(digits.size()) +
                                 " digits vs sigma of " + std::to_string(sigma.size()) + ")");
    std::string out(digits.size(), '0');
    for (size_t j = 0; j < sigma.size(); ++j) {
        int src = sigma[j];
        if (src < 0 || src >= int(digits.size())) throw std::runtime_error("permute_output: sigma out of range");
        out[j] = digits[size_t(src)];
    }
    return out;
}

std::string format_answer(long long value, int width, const OutputFormat& fmt) {
    std::string plain = std::to_string(value);
    switch (fmt.kind) {
    case OutputFormat::Plain:
        return plain;
    case OutputFormat::Reverse: {
        std::string p = zfill(plain, width);
        return std::string(p.rbegin(), p.rend());
    }
    case OutputFormat::Permutation:
        return permute_output(zfill(plain, width), fmt.sigma);
    }
    return plain;
}

static std::string format_answer_str(const std::string& plain, int width, const OutputFormat& fmt) {
    switch (fmt.kind) {
    case OutputFormat::Plain:
        return plain;
    case OutputFormat::Reverse: {
        std::string p = zfill(plain, width);
        return std::string(p.rbegin(), p.rend());
    }
    case OutputFormat::Permutation:
        return permute_output(zfill(plain, width), fmt.sigma);
    }
    return plain;
}

int TaskSpec::answer_width() const {
    switch (task) {
    case Task::Addition:
    case Task::AdditionScratchpad:
        return digit_count(operand_count * operand_max);
    default:
        return 4;
    }
}

std::string render_scratchpad(long long a, long long b, long long c, long long d, ScratchpadKind kind) {
    long long ops[4] = {a, b, c, d};
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (i) out += '+';
        out += std::to_string(ops[i]);
    }
    out += '=';
    const long long scale[3] = {100, 10, 1};
    long long place_sum[3] = {0, 0, 0};
    for (int p = 0; p < 3; ++p) {
        if (p) out += '+';
        out += std::to_string(scale[p]);
        out += '(';
        for (int i = 0; i < 4; ++i) {
            long long digit = (ops[i] / scale[p]) % 10;
            place_sum[p] += digit;
            if (i) out += '+';
            out += std::to_string(digit);
        }
        out += ')';
    }
    if (kind == ScratchpadKind::DA) {
        out += '=';
        for (int p = 0; p < 3; ++p) {
            if (p) out += '+';
            out += std::to_string(scale[p]);
            out += '(';
            out += std::to_string(place_sum[p]);
            out += ')';
        }
    }
    out += '=';
    out += std::to_string(a + b + c + d);
    out += '$';
    return out;
}

std::string render_multiplication(const std::string& a_digits, int b, const OutputFormat& fmt) {
    std::string product = mul_digit_string(a_digits, b);
    // Reverse answers are fixed to width len(a)+1, wide enough for any b<=9.
    std::string ans = format_answer_str(product, int(a_digits.size()) + 1, fmt);
    return a_digits + "×" + std::to_string(b) + "=" + ans + "$";
}

static char relation_of(long long a, long long b) { return a > b ? '>' : (a < b ? '<' : '='); }

std::string render_example(const TaskSpec& spec, const std::vector<long long>& operands) {
    std::string out;
    switch (spec.task) {
    case Task::Addition: {
        long long sum = 0;
        for (size_t i = 0; i < operands.size(); ++i) {
            if (i) out += '+';
            out += std::to_string(operands[i]);
            sum += operands[i];
        }
        out += '=';
        out += format_answer(sum, spec.answer_width(), spec.format);
        out += '$';
        return out;
    }
    case Task::AdditionScratchpad: {
        if (operands.size() != 4) throw std::runtime_error("scratchpad rendering expects 4 operands");
        return render_scratchpad(operands[0], operands[1], operands[2], operands[3],
                                 spec.scratchpad == ScratchpadKind::None ? ScratchpadKind::D : spec.scratchpad);
    }
    case Task::Multiplication:
        return render_multiplication(std::to_string(operands.at(0)), int(operands.at(1)), spec.format);
    case Task::Comparison: {
        // Balanced sampling draws digits positionally, so values below 1000
        // keep their leading zeros in the rendered 4-character field.
        out = zfill(std::to_string(operands.at(0)), 4) + "," + zfill(std::to_string(operands.at(1)), 4);
        out += "→";
        out += relation_of(operands[0], operands[1]);
        out += '$';
        return out;
    }
    case Task::Sorting: {
        std::vector<long long> sorted = operands;
        std::stable_sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < operands.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(operands[i]);
        }
        out += "→";
        for (size_t i = 0; i < sorted.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(sorted[i]);
        }
        out += '$';
        return out;
    }
    }
    throw std::runtime_error("render_example: unknown task");
}

int TaskSpec::max_seq_len() const {
    TaskSpec probe = *this;
    switch (task) {
    case Task::Addition:
    case Task::AdditionScratchpad: {
        std::vector<long long> ops(size_t(operand_count), operand_max);
        Example e;
        e.text = render_example(probe, ops);
        return int(utf8_codepoints(e.text).size());
    }
    case Task::Multiplication: {
        std::string a(size_t(length_max), '9');
        return int(utf8_codepoints(render_multiplication(a, 9, format)).size());
    }
    case Task::Comparison:
        return int(utf8_codepoints(render_example(probe, {1000, 1000})).size());
    case Task::Sorting:
        return int(utf8_codepoints(render_example(probe, {9999, 9999, 9999, 9999})).size());
    }
    return 0;
}

// --- generators ----------------------------------------------------------

Example ablate_place(const Example& e, const TaskSpec& spec, int place,
                     const std::vector<int>& digits, Rng& rng) {
    if (digits.empty()) throw std::runtime_error("ablate_place: empty replacement set");
    if (place < 0) throw std::runtime_error("ablate_place: invalid place " + std::to_string(place));
    std::string answer = e.answer_text();
    const std::string prompt = e.prompt_text();
    int width = int(answer.size());
    int rendered_idx;
    if (spec.format.kind == OutputFormat::Plain) {
        if (place + 1 > width) {
            answer = zfill(answer, place + 1);
            width = int(answer.size());
        }
        rendered_idx = width - 1 - place;
    } else {
        int plain_idx = width - 1 - place;
        if (plain_idx < 0 || plain_idx >= width)
            throw std::runtime_error("ablate_place: invalid place " + std::to_string(place));
        if (spec.format.kind == OutputFormat::Reverse) {
            rendered_idx = width - 1 - plain_idx;
        } else {
            rendered_idx = -1;
            for (int j = 0; j < width; ++j)
                if (spec.format.sigma[size_t(j)] == plain_idx) { rendered_idx = j; break; }
            if (rendered_idx < 0) throw std::runtime_error("ablate_place: place not covered by permutation");
        }
    }
    Example out = e;
    answer[size_t(rendered_idx)] = char('0' + digits[rng.uniform(digits.size())]);
    out.text = prompt + answer + "$";
    out.meta.ablated_place = place;
    return out;
}

std::vector<Example> gen_addition(const TaskSpec& spec) {
    std::vector<Example> out;
    out.reserve(size_t(spec.sample_size));
    const long long span = spec.operand_max - spec.operand_min + 1;
    for (long long i = 0; i < spec.sample_size; ++i) {
        Rng rng = Rng::stream(spec.seed, uint64_t(i));
        Example e;
        e.operands.resize(size_t(spec.operand_count));
        long long sum = 0;
        for (auto& op : e.operands) {
            op = spec.operand_min + int64_t(rng.uniform(uint64_t(span)));
            sum += op;
        }
        e.answer_value = sum;
        for (long long op : e.operands) e.meta.lengths.push_back(digit_count(op));
        e.text = render_example(spec, e.operands);
        if (spec.ablate_place >= 0) e = ablate_place(e, spec, spec.ablate_place, spec.ablate_digits, rng);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Example> gen_multiplication(const TaskSpec& spec) {
    std::vector<Example> out;
    out.reserve(size_t(spec.sample_size));
    const int nlen = spec.length_max - spec.length_min + 1;
    // Optional alternative mix: weight 100*2^(len-1) per length instead of
    // uniform lengths.
    std::vector<double> cumw;
    if (spec.length_balanced_mult) {
        double acc = 0, w = 100;
        for (int l = 0; l < nlen; ++l, w *= 2) cumw.push_back(acc += w);
        for (auto& c : cumw) c /= cumw.back();
    }
    for (long long i = 0; i < spec.sample_size; ++i) {
        Rng rng = Rng::stream(spec.seed, uint64_t(i));
        int len;
        if (spec.length_balanced_mult) {
            double u = rng.uniform01();
            len = spec.length_min + int(std::lower_bound(cumw.begin(), cumw.end(), u) - cumw.begin());
            if (len > spec.length_max) len = spec.length_max;
        } else {
            len = spec.length_min + int(rng.uniform(uint64_t(nlen)));
        }
        // a uniform in [0, 10^len); drawn digit-by-digit then leading zeros
        // stripped, which is the same distribution.
        std::string a;
        a.reserve(size_t(len));
        for (int d = 0; d < len; ++d) a += char('0' + rng.uniform(10));
        size_t nz = a.find_first_not_of('0');
        a = (nz == std::string::npos) ? "0" : a.substr(nz);
        int b = int(rng.uniform(10));
        Example e;
        e.operand_text = {a, std::to_string(b)};
        if (a.size() <= 18) {
            e.operands = {std::stoll(a), b};
            e.answer_value = e.operands[0] * b;
        }
        e.meta.lengths = {int(a.size()), 1};
        e.text = render_multiplication(a, b, spec.format);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Example> gen_comparison(const TaskSpec& spec) {
    std::vector<Example> out;
    out.reserve(size_t(spec.sample_size));
    for (long long i = 0; i < spec.sample_size; ++i) {
        Rng rng = Rng::stream(spec.seed, uint64_t(i));
        Example e;
        long long a, b;
        if (spec.sampling == Sampling::NcidBalanced) {
            int k = int(rng.uniform(5));
            int da[4], db[4];
            for (int j = 0; j < 4; ++j) {
                if (j < k) {
                    da[j] = db[j] = int(rng.uniform(10));
                } else {
                    da[j] = int(rng.uniform(10));
                    db[j] = int(rng.uniform(10));
                }
            }
            a = ((da[0] * 10 + da[1]) * 10 + da[2]) * 10 + da[3];
            b = ((db[0] * 10 + db[1]) * 10 + db[2]) * 10 + db[3];
            e.meta.ncid = k;
        } else {
            a = 1000 + int64_t(rng.uniform(9000));
            b = 1000 + int64_t(rng.uniform(9000));
        }
        e.operands = {a, b};
        e.relation = relation_of(a, b);
        e.text = render_example(spec, e.operands);
        out.push_back(std::move(e));
    }
    return out;
}

// Digits for one sorting operand: first digit nonzero so the rendered length
// equals the nominal length.
static long long draw_number(Rng& rng, int len, const int* prefix, int k) {
    long long v = 0;
    for (int j = 0; j < len; ++j) {
        int d;
        if (j < k) d = prefix[j];
        else if (j == 0) d = 1 + int(rng.uniform(9));
        else d = int(rng.uniform(10));
        v = v * 10 + d;
    }
    return v;
}

std::vector<Example> gen_sorting(const TaskSpec& spec) {
    std::vector<Example> out;
    out.reserve(size_t(spec.sample_size));
    for (long long i = 0; i < spec.sample_size; ++i) {
        Rng rng = Rng::stream(spec.seed, uint64_t(i));
        Example e;
        e.operands.resize(4);
        if (spec.sampling == Sampling::Uniform) {
            for (auto& op : e.operands) op = int64_t(rng.uniform(10000));
        } else {
            int lengths[4];
            for (auto& l : lengths) l = (spec.sampling == Sampling::DoublyBalanced) ? 3 + int(rng.uniform(2)) : 4;
            int k = int(rng.uniform(3));
            int prefix[2] = {0, 0};
            for (int j = 0; j < k; ++j) prefix[j] = (j == 0) ? 1 + int(rng.uniform(9)) : int(rng.uniform(10));
            for (int n = 0; n < 4; ++n) e.operands[size_t(n)] = draw_number(rng, lengths[n], prefix, k);
            e.meta.ncid = k;
        }
        for (long long op : e.operands) e.meta.lengths.push_back(digit_count(op));
        e.answer_sorted = e.operands;
        std::stable_sort(e.answer_sorted.begin(), e.answer_sorted.end());
        e.text = render_example(spec, e.operands);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Example> generate(const TaskSpec& spec) {
    switch (spec.task) {
    case Task::Addition: return gen_addition(spec);
    case Task::AdditionScratchpad: {
        TaskSpec s = spec;
        if (s.scratchpad == ScratchpadKind::None) s.scratchpad = ScratchpadKind::D;
        auto ex = gen_addition(s);
        return ex;
    }
    case Task::Multiplication: return gen_multiplication(spec);
    case Task::Comparison: return gen_comparison(spec);
    case Task::Sorting: return gen_sorting(spec);
    }
    throw std::runtime_error("generate: unknown task");
}

// --- special suites --------------------------------------------------------

TestSuite gen_contrast_pairs(int k, long long n, uint64_t seed) {
    if (k < 1 || k > 4) throw std::runtime_error("contrast pairs: k must be 1..4");
    TestSuite suite;
    suite.name = "contrast-" + std::to_string(k);
    suite.evaluator = "comparison_group_accuracy";
    TaskSpec render_spec;
    render_spec.task = Task::Comparison;
    for (long long i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, uint64_t(i));
        long long a = 1000 + int64_t(rng.uniform(9000));
        int digits[4];
        long long t = a;
        for (int j = 3; j >= 0; --j) { digits[j] = int(t % 10); t /= 10; }
        int old = digits[k - 1];
        int nd = int(rng.uniform(9));
        if (nd >= old) ++nd;
        digits[k - 1] = nd;
        long long b = ((digits[0] * 10 + digits[1]) * 10 + digits[2]) * 10 + digits[3];
        Example e;
        e.operands = {a, b};
        e.relation = relation_of(a, b);
        e.meta.contrast_k = k;
        e.meta.suite = suite.name;
        e.text = render_example(render_spec, e.operands);
        suite.examples.push_back(std::move(e));
    }
    return suite;
}

// Two distinct digits with the requested sign of (first - second).
static void draw_signed_pair(Rng& rng, int sign, int& x, int& y) {
    int u = int(rng.uniform(10)), v;
    do { v = int(rng.uniform(10)); } while (v == u);
    int lo = std::min(u, v), hi = std::max(u, v);
    if (sign > 0) { x = hi; y = lo; } else { x = lo; y = hi; }
}

static Example make_sorting_example(const std::vector<long long>& ops, const std::string& suite_name) {
    TaskSpec render_spec;
    render_spec.task = Task::Sorting;
    Example e;
    e.operands = ops;
    e.answer_sorted = ops;
    std::stable_sort(e.answer_sorted.begin(), e.answer_sorted.end());
    for (long long op : ops) e.meta.lengths.push_back(digit_count(op));
    e.meta.suite = suite_name;
    e.text = render_example(render_spec, ops);
    return e;
}

static TestSuite conflict_like_suite(const std::string& name, bool b1_eq, bool b3_eq, int sign_product,
                                     long long n, uint64_t seed) {
    TestSuite suite;
    suite.name = name;
    suite.evaluator = "mixing";
    for (long long i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, uint64_t(i));
        int b1 = 1 + int(rng.uniform(9));
        int c1 = b1;
        if (!b1_eq) { do { c1 = 1 + int(rng.uniform(9)); } while (c1 == b1); }
        int b3 = int(rng.uniform(10));
        int c3 = b3;
        if (!b3_eq) { do { c3 = int(rng.uniform(10)); } while (c3 == b3); }
        int s2 = rng.uniform(2) ? 1 : -1;
        int s4 = sign_product > 0 ? s2 : -s2;
        int b2, c2, b4, c4;
        draw_signed_pair(rng, s2, b2, c2);
        draw_signed_pair(rng, s4, b4, c4);
        long long b = ((b1 * 10 + b2) * 10 + b3) * 10 + b4;
        long long c = ((c1 * 10 + c2) * 10 + c3) * 10 + c4;
        suite.examples.push_back(make_sorting_example({1000, b, c, 9999}, name));
    }
    return suite;
}

TestSuite gen_conflict_tests(const std::string& kind, long long n, uint64_t seed) {
    if (kind == "conflicting") return conflict_like_suite("conflicting", true, true, -1, n, seed);
    if (kind == "agreeing") return conflict_like_suite("agreeing", true, true, +1, n, seed);
    throw std::runtime_error("conflict tests: kind must be conflicting|agreeing");
}

TestSuite gen_same_digit_tests(int variant, long long n, uint64_t seed) {
    switch (variant) {
    case 1: return conflict_like_suite("SD1", true, true, -1, n, seed);
    case 2: return conflict_like_suite("SD2", false, true, -1, n, seed);
    case 3: return conflict_like_suite("SD3", true, false, -1, n, seed);
    case 4: return conflict_like_suite("SD4", false, false, -1, n, seed);
    default: throw std::runtime_error("same-digit tests: variant must be 1..4");
    }
}

TestSuite gen_skewed_sorting(const std::string& kind, long long n, uint64_t seed) {
    int skew_pos;
    if (kind == "first") skew_pos = 0;
    else if (kind == "second") skew_pos = 1;
    else if (kind == "third") skew_pos = 2;
    else throw std::runtime_error("skewed sorting: kind must be first|second|third");
    TestSuite suite;
    suite.name = "skewed-" + kind;
    suite.evaluator = "skewed_error_rate";
    for (long long i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, uint64_t(i));
        int long_slot = int(rng.uniform(4));
        // Shared prefix ahead of the skewed digit.
        int prefix[2] = {0, 0};
        for (int j = 0; j < skew_pos; ++j) prefix[j] = (j == 0) ? 1 + int(rng.uniform(9)) : int(rng.uniform(10));
        std::vector<long long> ops(4);
        for (int s = 0; s < 4; ++s) {
            int len = (s == long_slot) ? 4 : 3;
            long long v = 0;
            for (int j = 0; j < len; ++j) {
                int d;
                if (j < skew_pos) d = prefix[j];
                else if (j == skew_pos) {
                    // Low band for the 4-digit number, high band for the rest;
                    // a leading digit of 0 is only possible in the low band
                    // when the position is not the first digit.
                    if (s == long_slot) d = (j == 0) ? 1 + int(rng.uniform(4)) : int(rng.uniform(5));
                    else d = 5 + int(rng.uniform(5));
                } else {
                    d = int(rng.uniform(10));
                }
                v = v * 10 + d;
            }
            ops[size_t(s)] = v;
        }
        Example e = make_sorting_example(ops, suite.name);
        suite.examples.push_back(std::move(e));
    }
    return suite;
}

TestSuite gen_sorting_ncid_suite(int k, long long n, uint64_t seed) {
    if (k < 0 || k > 3) throw std::runtime_error("sorting NCID suite: k must be 0..3");
    TestSuite suite;
    suite.name = "ncid-" + std::to_string(k);
    suite.evaluator = "sorting_subskill_accuracy";
    for (long long i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, uint64_t(i));
        int prefix[3] = {0, 0, 0};
        for (int j = 0; j < k; ++j) prefix[j] = (j == 0) ? 1 + int(rng.uniform(9)) : int(rng.uniform(10));
        std::vector<long long> ops(4);
        for (auto& op : ops) op = draw_number(rng, 4, prefix, k);
        Example e = make_sorting_example(ops, suite.name);
        e.meta.ncid = k;
        suite.examples.push_back(std::move(e));
    }
    return suite;
}

TestSuite gen_distinct_lengths(long long n, uint64_t seed) {
    TestSuite suite;
    suite.name = "distinct-lengths";
    suite.evaluator = "sorting_subskill_accuracy";
    for (long long i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, uint64_t(i));
        int lens[4] = {1, 2, 3, 4};
        // Fisher-Yates over the four length slots.
        for (int j = 3; j > 0; --j) std::swap(lens[j], lens[rng.uniform(uint64_t(j + 1))]);
        std::vector<long long> ops(4);
        for (int s = 0; s < 4; ++s) {
            long long v = 0;
            for (int j = 0; j < lens[s]; ++j) {
                int d = (j == 0 && lens[s] > 1) ? 1 + int(rng.uniform(9)) : int(rng.uniform(10));
                v = v * 10 + d;
            }
            ops[size_t(s)] = v;
        }
        suite.examples.push_back(make_sorting_example(ops, suite.name));
    }
    return suite;
}

std::vector<TokenSeq> chunk_stream(const std::vector<Example>& examples, int window,
                                   const Vocab& v, Rng& rng) {
    std::string corpus;
    for (size_t i = 0; i < examples.size(); ++i) {
        if (i) corpus += '\n';
        corpus += examples[i].text;
    }
    TokenSeq all = encode(corpus, v);
    if (window > int(all.ids.size()))
        throw std::runtime_error("chunk_stream: window " + std::to_string(window) +
                                 " larger than corpus of " + std::to_string(all.ids.size()));
    std::vector<TokenSeq> out;
    out.reserve(examples.size());
    const uint64_t starts = all.ids.size() - size_t(window) + 1;
    for (size_t i = 0; i < examples.size(); ++i) {
        size_t s = size_t(rng.uniform(starts));
        TokenSeq w;
        w.ids.assign(all.ids.begin() + long(s), all.ids.begin() + long(s) + window);
        out.push_back(std::move(w));
    }
    return out;
}

// --- files -------------------------------------------------------------

void write_dataset(const std::vector<Example>& examples, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& e : examples) f << e.text << '\n';
}

std::vector<std::string> read_dataset_lines(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::vector<Example> parse_dataset(const std::vector<std::string>& lines, const TaskSpec& spec) {
    std::vector<Example> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        Example e;
        e.text = line;
        std::string prompt = e.prompt_text();
        // Strip the delimiter from the prompt to split the operands.
        if (spec.task == Task::Comparison || spec.task == Task::Sorting) prompt.resize(prompt.size() - 3);
        else prompt.pop_back();
        std::string sep = (spec.task == Task::Comparison || spec.task == Task::Sorting) ? ","
                          : (spec.task == Task::Multiplication ? "×" : "+");
        size_t pos = 0;
        while (pos <= prompt.size()) {
            size_t next = prompt.find(sep, pos);
            std::string tok = prompt.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            if (spec.task == Task::Multiplication) e.operand_text.push_back(tok);
            if (tok.size() <= 18) e.operands.push_back(std::stoll(tok));
            if (next == std::string::npos) break;
            pos = next + sep.size();
        }
        switch (spec.task) {
        case Task::Addition:
        case Task::AdditionScratchpad:
            e.answer_value = 0;
            for (long long v : e.operands) e.answer_value += v;
            break;
        case Task::Multiplication:
            if (e.operands.size() == 2) e.answer_value = e.operands[0] * e.operands[1];
            break;
        case Task::Comparison:
            e.relation = e.answer_text()[0];
            break;
        case Task::Sorting:
            e.answer_sorted = e.operands;
            std::stable_sort(e.answer_sorted.begin(), e.answer_sorted.end());
            break;
        }
        for (long long op : e.operands) e.meta.lengths.push_back(digit_count(op));
        out.push_back(std::move(e));
    }
    return out;
}

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string dataset_content_hash(const std::vector<Example>& examples) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& e : examples) {
        for (unsigned char c : e.text) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        h ^= uint64_t('\n');
        h *= 0x100000001b3ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

} // namespace arithdyn
