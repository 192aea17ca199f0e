#include "arithdyn/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "arithdyn/decode.hpp"
#include "arithdyn/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace arithdyn {

namespace {

constexpr uint64_t kTestSeedSalt = 0x7e57da7aull;
constexpr uint64_t kSuiteSeedSalt = 0x5017e5ull;

TaskSpec test_spec_of(const TaskSpec& train_spec, long long n) {
    TaskSpec t = train_spec;
    t.sample_size = n;
    t.seed = Rng::stream(train_spec.seed, kTestSeedSalt).next_u64();
    // Held-out data is always clean; ablation only corrupts training text.
    t.ablate_place = -1;
    t.ablate_digits.clear();
    return t;
}

int answer_max_new(const TaskSpec& spec) {
    switch (spec.task) {
    case Task::Addition: return spec.answer_width() + 2;
    case Task::AdditionScratchpad: {
        TaskSpec probe = spec;
        return probe.max_seq_len(); // scratchpad region is generated too
    }
    case Task::Multiplication: return spec.length_max + 3;
    case Task::Comparison: return 2;
    case Task::Sorting: return 24;
    }
    return 8;
}

std::vector<TokenSeq> encode_prompts(const std::vector<Example>& examples, const Vocab& v) {
    std::vector<TokenSeq> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(encode(e.prompt_text(), v));
    return out;
}

// Gold answer digits in plain order (format undone), for digit-wise scoring.
std::string gold_plain_digits(const Example& e, const TaskSpec& spec) {
    int width = -1;
    if (spec.task == Task::Multiplication) width = int(e.operand_text.at(0).size()) + 1;
    ParsedAnswer g = parse_answer(e.answer_text(), spec, width);
    return g.plain_digits;
}

} // namespace

EvalSuites build_eval_suites(const RunSettings& s, const std::vector<Example>& train_examples) {
    EvalSuites suites;
    suites.spec = s.task;
    suites.vocab = build_vocab(s.task.task);
    const long long n = s.train.eval_size;
    const uint64_t base = Rng::stream(s.task.seed, kSuiteSeedSalt).next_u64();

    suites.main_test = generate(test_spec_of(s.task, n));

    switch (s.task.task) {
    case Task::Comparison: {
        for (int k = 1; k <= 4; ++k) suites.extra.push_back(gen_contrast_pairs(k, n, base + uint64_t(k)));
        break;
    }
    case Task::Sorting: {
        for (int k = 0; k <= 3; ++k)
            suites.extra.push_back(gen_sorting_ncid_suite(k, std::max<long long>(n / 2, 50), base + 10 + uint64_t(k)));
        suites.extra.push_back(gen_distinct_lengths(std::max<long long>(n / 2, 50), base + 20));
        for (const char* kind : {"first", "second", "third"})
            suites.extra.push_back(gen_skewed_sorting(kind, std::max<long long>(n / 2, 50), base + 30 + uint64_t(kind[0])));
        suites.extra.push_back(gen_conflict_tests("conflicting", n, base + 40));
        suites.extra.push_back(gen_conflict_tests("agreeing", n, base + 41));
        break;
    }
    case Task::Addition:
        if (!train_examples.empty() && s.task.ablate_place < 0) {
            suites.mi_baselines = dataset_mi_baselines(train_examples);
            suites.has_mi = true;
        }
        break;
    default:
        break;
    }
    return suites;
}

namespace {

// Completion harvesting shared by all generation-based metrics.
std::vector<ParsedAnswer> run_suite(const RunSettings& s, const EvalSuites& suites,
                                    const Parameters& params, const std::vector<Example>& examples,
                                    int64_t step, uint64_t salt) {
    std::vector<TokenSeq> prompts = encode_prompts(examples, suites.vocab);
    uint64_t seed = Rng::stream(s.task.seed, 0xe7a1, uint64_t(step), salt).next_u64();
    std::vector<std::string> completions =
        generate_batch(params, s.model, suites.vocab, prompts, s.train.temperature, seed,
                       answer_max_new(s.task), s.train.threads);
    std::vector<ParsedAnswer> parsed;
    parsed.reserve(completions.size());
    for (size_t i = 0; i < completions.size(); ++i) {
        int width = -1;
        if (s.task.task == Task::Multiplication)
            width = int(examples[i].operand_text.at(0).size()) + 1;
        parsed.push_back(parse_answer(completions[i], s.task, width));
    }
    return parsed;
}

std::string place_name(size_t i, size_t w) {
    static const char* names[] = {"units", "tens", "hundreds", "thousands"};
    if (w <= 4) return names[i];
    return "p" + std::to_string(i);
}

} // namespace

std::map<std::string, double> evaluate_snapshot(const RunSettings& s, const EvalSuites& suites,
                                                const Parameters& params, int64_t step,
                                                const std::string& errdiff_path) {
    std::map<std::string, double> out;
    const Task task = s.task.task;

    auto parsed = run_suite(s, suites, params, suites.main_test, step, 1);

    if (task == Task::Addition || task == Task::AdditionScratchpad || task == Task::Multiplication) {
        std::vector<std::string> preds, golds;
        int64_t exact = 0;
        std::vector<long long> diffs;
        for (size_t i = 0; i < parsed.size(); ++i) {
            const Example& e = suites.main_test[i];
            preds.push_back(parsed[i].plain_digits);
            golds.push_back(gold_plain_digits(e, s.task));
            if (parsed[i].raw == e.answer_text()) ++exact;
            if (task != Task::Multiplication && parsed[i].ok) diffs.push_back(e.answer_value - parsed[i].value);
        }
        DigitErrorRecord rec = digit_wise_error(preds, golds);
        for (size_t i = 0; i < rec.e.size(); ++i) out["err." + place_name(i, rec.e.size())] = rec.e[i];
        out["acc.seq"] = double(exact) / double(parsed.size());
        if (!errdiff_path.empty() && !diffs.empty()) {
            std::ofstream f(errdiff_path, std::ios::app);
            for (long long d : diffs) f << step << "," << d << "\n";
        }
    } else if (task == Task::Comparison) {
        auto group_acc = comparison_group_accuracy(suites.main_test, parsed);
        double all = 0;
        for (auto& [g, acc] : group_acc) {
            out["acc.ncid" + std::to_string(g)] = acc;
            all += acc;
        }
        out["acc.all"] = group_acc.empty() ? 0.0 : all / double(group_acc.size());
        for (const auto& suite : suites.extra) {
            auto sp = run_suite(s, suites, params, suite.examples, step, fnv1a64(suite.name));
            auto acc = comparison_group_accuracy(suite.examples, sp);
            // contrast-k suites carry a single group; report the error rate.
            out["contrast.k" + suite.name.substr(suite.name.size() - 1)] = 1.0 - acc.begin()->second;
        }
    } else if (task == Task::Sorting) {
        int64_t exact = 0;
        for (size_t i = 0; i < parsed.size(); ++i)
            if (parsed[i].raw == suites.main_test[i].answer_text()) ++exact;
        out["acc.seq"] = double(exact) / double(parsed.size());
        out["subskill.crude"] = sorting_subskill_accuracy("crude-length", suites.main_test, parsed);
        for (const auto& suite : suites.extra) {
            auto sp = run_suite(s, suites, params, suite.examples, step, fnv1a64(suite.name));
            if (suite.name.rfind("ncid-", 0) == 0) {
                int k = suite.name.back() - '0';
                out["subskill.d" + std::to_string(k + 1)] =
                    sorting_subskill_accuracy("digit-" + std::to_string(k + 1), suite.examples, sp);
            } else if (suite.name == "distinct-lengths") {
                out["subskill.distinct"] = sorting_subskill_accuracy("distinct-lengths", suite.examples, sp);
            } else if (suite.name.rfind("skewed-", 0) == 0) {
                out["skew." + suite.name.substr(7)] = skewed_error_rate(suite.name.substr(7), suite.examples, sp);
            } else if (suite.name == "conflicting" || suite.name == "agreeing") {
                MixingReport rep = mixing_report(suite.examples, sp);
                out["mix." + suite.name] = rep.mixing_rate();
                out["mix." + suite.name + "_err"] = double(rep.errors) / double(rep.total);
            }
        }
    }
    return out;
}

std::map<std::string, double> mi_probe_snapshot(const RunSettings& s, const EvalSuites& suites,
                                                const Parameters& params) {
    std::map<std::string, double> out;
    if (!suites.has_mi) return out;
    const Vocab& v = suites.vocab;
    const int W = s.task.answer_width();
    const std::vector<Example>& tests = suites.main_test;
    const int n = int(tests.size());
    const int L = s.model.max_seq_len;

    // Teacher-forced forward over the gold token sequences.
    std::vector<int> ids(size_t(n) * L, v.pad_id);
    auto answer_starts = std::vector<int>(size_t(n));
    for (int i = 0; i < n; ++i) {
        TokenSeq t = encode(tests[size_t(i)].text, v);
        answer_starts[size_t(i)] = t.answer_start;
        std::copy(t.ids.begin(), t.ids.end(), ids.begin() + size_t(i) * L);
    }
    RowMat<float> logits = forward_logits<float>(params, s.model, ids, n, L, false, 0);

    // Rendered index of the plain-order digit at a given place.
    auto rendered_index = [&](int place) {
        int plain_idx = W - 1 - place;
        switch (s.task.format.kind) {
        case OutputFormat::Plain: return plain_idx;
        case OutputFormat::Reverse: return W - 1 - plain_idx;
        case OutputFormat::Permutation:
            for (int j = 0; j < W; ++j)
                if (s.task.format.sigma[size_t(j)] == plain_idx) return j;
            throw std::runtime_error("mi probe: permutation misses a place");
        }
        return plain_idx;
    };

    // Softmax over the ten digit tokens at the position that predicts the
    // digit of `place`.
    auto digit_dists = [&](int place) {
        std::vector<std::vector<double>> dists(size_t(n), std::vector<double>(10));
        int j = rendered_index(place);
        for (int i = 0; i < n; ++i) {
            int pos = answer_starts[size_t(i)] + j - 1; // logits at pos predict token pos+1
            const float* row = logits.row(Eigen::Index(i) * L + pos).data();
            double mx = row[0];
            for (int t = 1; t < 10; ++t) mx = std::max(mx, double(row[t]));
            double sum = 0;
            for (int t = 0; t < 10; ++t) sum += dists[size_t(i)][size_t(t)] = std::exp(double(row[t]) - mx);
            for (int t = 0; t < 10; ++t) dists[size_t(i)][size_t(t)] /= sum;
        }
        return dists;
    };

    static const char* names[] = {"units", "tens", "hundreds"};

    // Thousands digit: plain MI against the first operand's hundreds digit.
    {
        auto x = std::vector<int>(size_t(n));
        for (int i = 0; i < n; ++i) x[size_t(i)] = digit_at(tests[size_t(i)].operands[0], 2);
        out["mi.probe.thousands"] = probe_mi(digit_dists(3), x);
        out["mi.base.thousands"] = suites.mi_baselines.thousands;
    }
    for (int place = 0; place < 3; ++place) {
        auto x = std::vector<int>(size_t(n)); auto zk = x; auto zh = x;
        for (int i = 0; i < n; ++i) {
            const Example& e = tests[size_t(i)];
            long long sum = 0;
            std::vector<int> col;
            for (long long op : e.operands) {
                sum += op;
                col.push_back(digit_at(op, place));
            }
            x[size_t(i)] = digit_at(e.operands[0], place);
            zk[size_t(i)] = local_carry_out(col);
            zh[size_t(i)] = digit_at(sum, place + 1);
        }
        auto dists = digit_dists(place);
        out["mi.probe." + std::string(names[place])] = probe_cmi(dists, x, zk);
        out["mi.base." + std::string(names[place])] = suites.mi_baselines.carry_cond[size_t(place)];
        out["mi.probe_eh." + std::string(names[place])] = probe_cmi(dists, x, zh);
        out["mi.base_eh." + std::string(names[place])] = suites.mi_baselines.higher_cond[size_t(place)];
    }
    return out;
}

TrainResult run_training(const RunSettings& s, const std::string& out_dir, bool resume) {
    auto t0 = std::chrono::steady_clock::now();
    Vocab vocab = build_vocab(s.task.task);
    std::vector<Example> examples = generate(s.task);
    if (examples.empty()) throw std::runtime_error("run_training: task.sample_size is 0");

    std::vector<TokenSeq> tokens;
    tokens.reserve(examples.size());
    if (s.train.chunked) {
        Rng rng = Rng::stream(s.task.seed, 0xc4a4);
        tokens = chunk_stream(examples, s.train.chunk_window, vocab, rng);
    } else {
        for (const auto& e : examples) tokens.push_back(pad_sequence(encode(e.text, vocab), s.model.max_seq_len, vocab));
    }

    EvalSuites suites = build_eval_suites(s, examples);
    const std::string config_json = settings_to_json(s);
    std::string errdiff_path;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "config.cfg").string(), settings_to_config_text(s));
        errdiff_path = (fs::path(out_dir) / "errdiffs.csv").string();
        if (!resume) {
            std::ofstream f(errdiff_path, std::ios::trunc);
            f << "step,diff\n";
        }
    }

    std::vector<EvalHook> hooks;
    hooks.push_back(EvalHook{1, [&s, &suites, errdiff_path](const Parameters& p, int64_t step) {
                                 return evaluate_snapshot(s, suites, p, step, errdiff_path);
                             }});
    if (suites.has_mi)
        hooks.push_back(EvalHook{1, [&s, &suites](const Parameters& p, int64_t) {
                                     return mi_probe_snapshot(s, suites, p);
                                 }});

    TrainResult result = run_training_loop(s.model, s.train, tokens, vocab, hooks, out_dir, resume, config_json);

    if (!out_dir.empty()) {
        json j;
        j["steps"] = result.steps;
        j["final_loss"] = result.final_loss;
        j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        j["dataset_hash"] = dataset_content_hash(examples);
        j["dataset_size"] = examples.size();
        j["parameters"] = result.params.param_count();
        if (!result.history.empty()) {
            json last;
            for (auto& [k, v] : result.history.back()) last[k] = v;
            j["final_metrics"] = last;
        }
        write_text_file((fs::path(out_dir) / "run.json").string(), j.dump(2) + "\n");
    }
    return result;
}

LoadedRun load_run_checkpoint(const std::string& ckpt_path) {
    LoadedRun out;
    out.settings = settings_from_json(peek_checkpoint_config(ckpt_path));
    Rng rng = Rng::stream(0, 0);
    Parameters shape = init_parameters<float>(out.settings.model, rng);
    Checkpoint ck = load_checkpoint_with_shape(ckpt_path, shape);
    out.params = std::move(ck.params);
    out.step = ck.step;
    return out;
}

// --- report ----------------------------------------------------------------

namespace {

struct ChartSpec {
    std::string file;
    std::string title;
    std::string prefix; // columns starting with this prefix form the series
};

} // namespace

int write_report(const std::string& run_dir, std::string* warnings) {
    fs::path dir(run_dir);
    if (!fs::exists(dir / "metrics.csv"))
        throw std::runtime_error("no metrics.csv under " + run_dir);
    CsvTable m = read_csv((dir / "metrics.csv").string());
    if (!m.has("step")) throw std::runtime_error("metrics.csv lacks a step column");
    const auto& steps = m.data["step"];
    int charts = 0;
    auto warn = [&](const std::string& msg) {
        if (warnings) *warnings += msg + "\n";
    };

    std::vector<ChartSpec> specs = {
        {"loss.svg", "training loss", "loss"},
        {"digit_errors.svg", "digit-wise error by place", "err."},
        {"accuracy.svg", "suite accuracy", "acc."},
        {"contrast.svg", "contrast-pair error by digit", "contrast."},
        {"subskill.svg", "sorting subskill accuracy", "subskill."},
        {"skewed.svg", "skewed-sorting error", "skew."},
        {"mixing.svg", "mixing rates", "mix."},
    };
    for (const auto& cs : specs) {
        std::vector<SvgSeries> series;
        for (const auto& col : m.columns) {
            if (col != cs.prefix && col.rfind(cs.prefix, 0) != 0) continue;
            const auto& ys = m.data[col];
            bool any = false;
            for (double v : ys) any = any || !std::isnan(v);
            if (!any) {
                warn("column " + col + " is empty; skipped");
                continue;
            }
            series.push_back(SvgSeries{col, steps, ys, false});
        }
        if (series.empty()) continue;
        write_text_file((dir / cs.file).string(),
                        line_chart_svg(cs.title, "training step", cs.title, series, true));
        ++charts;
    }

    // MI probes vs dataset baselines: solid model curves, dashed baselines.
    if (fs::exists(dir / "mi.csv")) {
        CsvTable mi = read_csv((dir / "mi.csv").string());
        if (mi.has("step")) {
            std::vector<SvgSeries> series;
            for (const char* name : {"mi.probe.thousands", "mi.probe.hundreds", "mi.probe.tens", "mi.probe.units"})
                if (mi.has(name)) series.push_back(SvgSeries{name, mi.data["step"], mi.data[name], false});
            for (const char* name : {"mi.base.thousands", "mi.base.hundreds", "mi.base.tens", "mi.base.units"})
                if (mi.has(name)) series.push_back(SvgSeries{name, mi.data["step"], mi.data[name], true});
            if (!series.empty()) {
                write_text_file((dir / "mi.svg").string(),
                                line_chart_svg("mutual information probes vs data", "training step",
                                               "nats", series, true));
                ++charts;
            }
        }
    }

    // Error histograms over three step windows, each with its normal fit.
    if (fs::exists(dir / "errdiffs.csv")) {
        CsvTable ed = read_csv((dir / "errdiffs.csv").string());
        if (ed.rows > 0 && ed.has("step") && ed.has("diff")) {
            double max_step = 0;
            for (double v : ed.data["step"]) max_step = std::max(max_step, v);
            const char* names[] = {"early", "mid", "late"};
            for (int wdx = 0; wdx < 3; ++wdx) {
                double lo = max_step * wdx / 3.0, hi = max_step * (wdx + 1) / 3.0;
                std::vector<long long> diffs;
                for (size_t i = 0; i < ed.rows; ++i) {
                    double st = ed.data["step"][i];
                    if (st > lo && st <= hi) diffs.push_back((long long)ed.data["diff"][i]);
                }
                if (diffs.size() < 10) continue;
                ErrorHistogram h = fit_error_gaussian(diffs);
                long long first = h.counts.begin()->first, last = h.counts.rbegin()->first;
                std::vector<double> counts, fitv;
                auto cdf = [&](double t) {
                    return 0.5 * (1.0 + std::erf((t - h.mu) / (h.sigma * std::sqrt(2.0))));
                };
                for (long long b = first; b <= last; ++b) {
                    auto it = h.counts.find(b);
                    counts.push_back(it == h.counts.end() ? 0.0 : double(it->second));
                    fitv.push_back(h.degenerate ? 0.0
                                                : double(diffs.size()) * (cdf(double(b) + 0.5) - cdf(double(b) - 0.5)));
                }
                std::ostringstream note;
                note.precision(3);
                note << "mu=" << h.mu << " sigma=" << h.sigma << " R2=" << h.r2;
                write_text_file((dir / ("errors_" + std::string(names[wdx]) + ".svg")).string(),
                                histogram_svg("prediction error distribution (" + std::string(names[wdx]) + ")",
                                              first, counts, fitv, note.str()));
                ++charts;
            }
        }
    }

    // Tidy long-form re-emission of every metric.
    {
        std::ostringstream os;
        os << "step,metric,value\n";
        for (const auto& col : m.columns) {
            if (col == "step") continue;
            for (size_t i = 0; i < m.rows; ++i) {
                double v = m.data[col][i];
                if (std::isnan(v)) continue;
                os << (long long)steps[i] << "," << col << "," << v << "\n";
            }
        }
        write_text_file((dir / "tidy.csv").string(), os.str());
    }
    return charts;
}

} // namespace arithdyn
