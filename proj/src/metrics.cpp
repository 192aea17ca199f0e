#include "arithdyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arithdyn {

namespace {

std::string zfill(const std::string& s, size_t width) {
    if (s.size() >= width) return s;
    return std::string(width - s.size(), '0') + s;
}

std::string rightmost(const std::string& s, size_t width) {
    if (s.size() <= width) return s;
    return s.substr(s.size() - width);
}

} // namespace

DigitErrorRecord digit_wise_error(const std::vector<std::string>& preds,
                                  const std::vector<std::string>& golds) {
    if (preds.empty() || preds.size() != golds.size())
        throw std::runtime_error("digit_wise_error: empty or mismatched inputs");
    size_t W = 0;
    for (const auto& g : golds) W = std::max(W, g.size());
    DigitErrorRecord rec;
    rec.n = int64_t(preds.size());
    rec.e.assign(W, 0.0);
    for (size_t k = 0; k < preds.size(); ++k) {
        std::string a = zfill(golds[k], W);
        std::string p = zfill(rightmost(preds[k], W), W);
        for (size_t i = 0; i < W; ++i) {
            // place i is counted from the right
            if (a[W - 1 - i] != p[W - 1 - i]) rec.e[i] += 1.0;
        }
    }
    for (double& v : rec.e) v /= double(rec.n);
    return rec;
}

double r_squared(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size() || y.empty()) throw std::runtime_error("r_squared: bad inputs");
    double mean = 0;
    for (double v : y) mean += v;
    mean /= double(y.size());
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0) return ss_res == 0 ? 1.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - ss_res / ss_tot;
}

ErrorHistogram fit_error_gaussian(const std::vector<long long>& samples, std::vector<int64_t> window) {
    if (samples.empty()) throw std::runtime_error("fit_error_gaussian: no samples");
    ErrorHistogram h;
    h.window = std::move(window);
    double mu = 0;
    for (long long s : samples) {
        mu += double(s);
        h.counts[s] += 1;
    }
    mu /= double(samples.size());
    double var = 0;
    for (long long s : samples) var += (double(s) - mu) * (double(s) - mu);
    var /= double(samples.size());
    h.mu = mu;
    h.sigma = std::sqrt(var);
    if (h.counts.size() < 2) {
        h.degenerate = true;
        h.r2 = std::numeric_limits<double>::quiet_NaN();
        return h;
    }
    // Compare the per-bin counts with the fitted normal's bin masses over the
    // full observed integer range.
    const long long lo = h.counts.begin()->first, hi = h.counts.rbegin()->first;
    const double n = double(samples.size());
    auto normal_cdf = [&](double t) { return 0.5 * (1.0 + std::erf((t - h.mu) / (h.sigma * std::sqrt(2.0)))); };
    std::vector<double> y, yhat;
    for (long long b = lo; b <= hi; ++b) {
        auto it = h.counts.find(b);
        y.push_back(it == h.counts.end() ? 0.0 : double(it->second));
        yhat.push_back(n * (normal_cdf(double(b) + 0.5) - normal_cdf(double(b) - 0.5)));
    }
    h.r2 = r_squared(y, yhat);
    return h;
}

MixResult classify_mixing(const std::vector<std::string>& input_nums,
                          const std::vector<std::string>& output_nums) {
    auto contains = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    // Correct outputs never classify as mixing.
    {
        std::vector<std::string> gold = input_nums;
        std::stable_sort(gold.begin(), gold.end(), [](const std::string& a, const std::string& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        if (gold == output_nums) return {};
    }
    std::vector<std::pair<const std::string*, const std::string*>> pairs;
    for (size_t i = 0; i < input_nums.size(); ++i)
        for (size_t j = 0; j < input_nums.size(); ++j) {
            if (i == j) continue;
            if (input_nums[i].size() != 4 || input_nums[j].size() != 4) continue;
            pairs.emplace_back(&input_nums[i], &input_nums[j]);
        }
    // Swapping takes precedence over repeating when both patterns match.
    for (int split = 1; split <= 3; ++split) {
        for (auto [u, v] : pairs) {
            std::string r_uv = u->substr(0, size_t(split)) + v->substr(size_t(split));
            std::string r_vu = v->substr(0, size_t(split)) + u->substr(size_t(split));
            if (contains(input_nums, r_uv) || contains(input_nums, r_vu)) continue;
            if (contains(output_nums, r_uv) && contains(output_nums, r_vu))
                return {MixKind::Swapping, split};
        }
    }
    for (int split = 1; split <= 3; ++split) {
        for (auto [u, v] : pairs) {
            std::string r_uv = u->substr(0, size_t(split)) + v->substr(size_t(split));
            if (contains(input_nums, r_uv)) continue;
            if (contains(output_nums, r_uv) && contains(output_nums, *v))
                return {MixKind::Repeating, split};
        }
    }
    return {};
}

MixingReport mixing_report(const std::vector<Example>& examples,
                           const std::vector<ParsedAnswer>& outputs) {
    if (examples.size() != outputs.size()) throw std::runtime_error("mixing_report: size mismatch");
    MixingReport rep;
    for (size_t k = 0; k < examples.size(); ++k) {
        rep.total += 1;
        std::vector<std::string> inputs;
        for (long long op : examples[k].operands) inputs.push_back(std::to_string(op));
        std::vector<std::string> gold;
        for (long long v : examples[k].answer_sorted) gold.push_back(std::to_string(v));
        if (outputs[k].ok && outputs[k].fields == gold) continue;
        rep.errors += 1;
        MixResult r = classify_mixing(inputs, outputs[k].fields);
        if (r.kind == MixKind::Swapping) {
            rep.swapping += 1;
            rep.split_counts[size_t(r.split)] += 1;
        } else if (r.kind == MixKind::Repeating) {
            rep.repeating += 1;
            rep.split_counts[size_t(r.split)] += 1;
        }
        if (r.kind != MixKind::None && rep.transcripts.size() < 8)
            rep.transcripts.push_back(examples[k].prompt_text() + outputs[k].raw);
    }
    return rep;
}

double sorting_subskill_accuracy(const std::string& kind, const std::vector<Example>& examples,
                                 const std::vector<ParsedAnswer>& outputs) {
    if (examples.size() != outputs.size() || examples.empty())
        throw std::runtime_error("sorting_subskill_accuracy: bad inputs");
    int digit_k = 0;
    if (kind == "crude-length") digit_k = 0;
    else if (kind.rfind("digit-", 0) == 0 && kind.size() == 7 && kind[6] >= '1' && kind[6] <= '4')
        digit_k = kind[6] - '0';
    else if (kind == "distinct-lengths") digit_k = -1;
    else throw std::runtime_error("sorting_subskill_accuracy: unknown suite '" + kind + "'");

    int64_t hits = 0;
    for (size_t k = 0; k < examples.size(); ++k) {
        std::vector<std::string> gold;
        for (long long v : examples[k].answer_sorted) gold.push_back(std::to_string(v));
        const auto& f = outputs[k].fields;
        bool good = false;
        if (digit_k == -1) {
            good = outputs[k].ok && f == gold;
        } else if (digit_k == 0) {
            // Delimiters in the right spots: every output field has the gold length.
            good = f.size() == gold.size();
            for (size_t i = 0; good && i < f.size(); ++i) good = f[i].size() == gold[i].size();
        } else {
            // The k-th digits must appear in the gold order.
            good = f.size() == gold.size();
            for (size_t i = 0; good && i < f.size(); ++i)
                good = f[i].size() >= size_t(digit_k) && gold[i].size() >= size_t(digit_k) &&
                       f[i][size_t(digit_k) - 1] == gold[i][size_t(digit_k) - 1];
        }
        hits += good ? 1 : 0;
    }
    return double(hits) / double(examples.size());
}

double skewed_error_rate(const std::string& kind, const std::vector<Example>& examples,
                         const std::vector<ParsedAnswer>& outputs) {
    if (examples.size() != outputs.size() || examples.empty())
        throw std::runtime_error("skewed_error_rate: bad inputs");
    size_t prefix_len;
    if (kind == "first") prefix_len = 1;
    else if (kind == "second") prefix_len = 2;
    else if (kind == "third") prefix_len = 3;
    else throw std::runtime_error("skewed_error_rate: unknown kind '" + kind + "'");

    int64_t skewed = 0;
    for (size_t k = 0; k < examples.size(); ++k) {
        std::string big;
        for (long long op : examples[k].operands) {
            std::string s = std::to_string(op);
            if (s.size() == 4) big = s;
        }
        if (big.empty()) throw std::runtime_error("skewed_error_rate: suite example lacks a 4-digit input");
        const std::string forbidden = big.substr(0, prefix_len);
        if (!outputs[k].fields.empty() && outputs[k].fields[0].rfind(forbidden, 0) == 0) skewed += 1;
    }
    return double(skewed) / double(examples.size());
}

std::map<int, double> comparison_group_accuracy(const std::vector<Example>& examples,
                                                const std::vector<ParsedAnswer>& outputs) {
    if (examples.size() != outputs.size()) throw std::runtime_error("comparison_group_accuracy: size mismatch");
    std::map<int, std::pair<int64_t, int64_t>> agg; // group -> (hits, total)
    for (size_t k = 0; k < examples.size(); ++k) {
        int group = examples[k].meta.contrast_k > 0 ? examples[k].meta.contrast_k : examples[k].meta.ncid;
        auto& slot = agg[group];
        slot.second += 1;
        if (outputs[k].ok && outputs[k].relation == examples[k].relation) slot.first += 1;
    }
    std::map<int, double> out;
    for (auto& [g, s] : agg) out[g] = s.second ? double(s.first) / double(s.second) : 0.0;
    return out;
}

} // namespace arithdyn
