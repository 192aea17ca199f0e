#include "arithdyn/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

using nlohmann::json;

namespace arithdyn {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

namespace {

struct KvReader {
    const std::map<std::string, std::string>& kv;
    std::map<std::string, bool> seen;

    const std::string* find(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        seen[key] = true;
        return &it->second;
    }
    template <typename T, typename Parse>
    void get(const std::string& key, T& out, Parse parse) {
        if (const std::string* v = find(key)) {
            try {
                out = parse(*v);
            } catch (const std::exception& ex) {
                throw std::runtime_error("config field '" + key + "': " + ex.what());
            }
        }
    }
    void get_ll(const std::string& key, long long& out) { get(key, out, [](const std::string& v) { return std::stoll(v); }); }
    void get_i64(const std::string& key, int64_t& out) { get(key, out, [](const std::string& v) { return std::stoll(v); }); }
    void get_int(const std::string& key, int& out) { get(key, out, [](const std::string& v) { return std::stoi(v); }); }
    void get_u64(const std::string& key, uint64_t& out) { get(key, out, [](const std::string& v) { return std::stoull(v); }); }
    void get_f(const std::string& key, double& out) { get(key, out, [](const std::string& v) { return std::stod(v); }); }
    void get_f(const std::string& key, float& out) { get(key, out, [](const std::string& v) { return std::stof(v); }); }
    void get_b(const std::string& key, bool& out) {
        get(key, out, [](const std::string& v) {
            if (v == "1" || v == "true" || v == "yes") return true;
            if (v == "0" || v == "false" || v == "no") return false;
            throw std::runtime_error("expected a boolean");
        });
    }
    void check_all_consumed() {
        for (auto& [k, v] : kv)
            if (!seen.count(k)) throw std::runtime_error("unknown config field '" + k + "'");
    }
};

} // namespace

RunSettings settings_from_kv(const std::map<std::string, std::string>& kv) {
    RunSettings s;
    KvReader r{kv, {}};

    std::string task_kind = "addition";
    r.get("task.kind", task_kind, [](const std::string& v) { return v; });
    s.task.task = task_from_name(task_kind);

    // Paper defaults per task: sampling strategy and corpus size.
    switch (s.task.task) {
    case Task::Addition:
    case Task::AdditionScratchpad:
        s.task.sample_size = 1000000;
        s.task.sampling = Sampling::Uniform;
        break;
    case Task::Multiplication:
        s.task.sample_size = 100000;
        s.task.sampling = Sampling::Uniform;
        break;
    case Task::Comparison:
        s.task.sample_size = 45000;
        s.task.sampling = Sampling::NcidBalanced;
        break;
    case Task::Sorting:
        s.task.sample_size = 100000;
        s.task.sampling = Sampling::DoublyBalanced;
        break;
    }
    if (s.task.task == Task::AdditionScratchpad) s.task.scratchpad = ScratchpadKind::D;

    r.get_int("task.operand_count", s.task.operand_count);
    r.get_ll("task.operand_min", s.task.operand_min);
    r.get_ll("task.operand_max", s.task.operand_max);
    r.get_int("task.length_min", s.task.length_min);
    r.get_int("task.length_max", s.task.length_max);
    r.get("task.format", s.task.format, [](const std::string& v) { return OutputFormat::from_name(v); });
    r.get("task.sampling", s.task.sampling, [](const std::string& v) { return sampling_from_name(v); });
    r.get_ll("task.sample_size", s.task.sample_size);
    r.get_u64("task.seed", s.task.seed);
    r.get("task.scratchpad", s.task.scratchpad, [](const std::string& v) {
        if (v == "none") return ScratchpadKind::None;
        if (v == "D") return ScratchpadKind::D;
        if (v == "D+A") return ScratchpadKind::DA;
        throw std::runtime_error("expected none, D or D+A");
    });
    r.get_int("task.ablate_place", s.task.ablate_place);
    r.get("task.ablate_digits", s.task.ablate_digits, [](const std::string& v) {
        std::vector<int> out;
        for (char c : v) {
            if (c < '0' || c > '9') throw std::runtime_error("expected a digit string like 0123");
            out.push_back(c - '0');
        }
        return out;
    });
    r.get_b("task.length_balanced_mult", s.task.length_balanced_mult);
    if (s.task.ablate_place >= 0 && s.task.ablate_digits.empty())
        s.task.ablate_digits = (s.task.ablate_place == 3) ? std::vector<int>{0, 1, 2, 3}
                                                          : std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

    r.get_int("model.n_layers", s.model.n_layers);
    r.get_int("model.n_heads", s.model.n_heads);
    r.get_int("model.d_model", s.model.d_model);
    r.get_f("model.dropout", s.model.dropout);
    r.get("model.pos", s.model.pos, [](const std::string& v) { return pos_scheme_from_name(v); });
    r.get_int("model.rel_buckets", s.model.rel_buckets);
    r.get_int("model.rel_max_distance", s.model.rel_max_distance);

    r.get_f("train.lr", s.train.lr);
    r.get_f("train.min_lr", s.train.min_lr);
    r.get_i64("train.warmup_iters", s.train.warmup_iters);
    r.get_i64("train.decay_iters", s.train.decay_iters);
    r.get_f("train.beta1", s.train.beta1);
    r.get_f("train.beta2", s.train.beta2);
    r.get_f("train.weight_decay", s.train.weight_decay);
    r.get_f("train.grad_clip", s.train.grad_clip);
    r.get_int("train.batch_size", s.train.batch_size);
    r.get_i64("train.max_iters", s.train.max_iters);
    r.get_i64("train.eval_every", s.train.eval_every);
    r.get_i64("train.checkpoint_every", s.train.checkpoint_every);
    r.get_i64("train.eval_size", s.train.eval_size);
    r.get_u64("train.seed", s.train.seed);
    r.get_int("train.threads", s.train.threads);
    r.get_f("train.temperature", s.train.temperature);
    r.get_b("train.answer_only_loss", s.train.answer_only_loss);
    r.get_b("train.chunked", s.train.chunked);
    r.get_int("train.chunk_window", s.train.chunk_window);
    r.get_b("train.epoch_mode", s.train.epoch_mode);
    r.check_all_consumed();

    s.model.max_seq_len = s.train.chunked ? s.train.chunk_window : s.task.max_seq_len();
    s.model.vocab_size = build_vocab(s.task.task).size();
    s.model.validate();
    s.train.validate();
    return s;
}

std::map<std::string, std::string> settings_to_kv(const RunSettings& s) {
    std::map<std::string, std::string> kv;
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    kv["task.kind"] = task_name(s.task.task);
    kv["task.operand_count"] = std::to_string(s.task.operand_count);
    kv["task.operand_min"] = std::to_string(s.task.operand_min);
    kv["task.operand_max"] = std::to_string(s.task.operand_max);
    kv["task.length_min"] = std::to_string(s.task.length_min);
    kv["task.length_max"] = std::to_string(s.task.length_max);
    kv["task.format"] = s.task.format.name();
    kv["task.sampling"] = sampling_name(s.task.sampling);
    kv["task.sample_size"] = std::to_string(s.task.sample_size);
    kv["task.seed"] = std::to_string(s.task.seed);
    kv["task.scratchpad"] = s.task.scratchpad == ScratchpadKind::None ? "none"
                            : s.task.scratchpad == ScratchpadKind::D ? "D" : "D+A";
    kv["task.ablate_place"] = std::to_string(s.task.ablate_place);
    std::string digits;
    for (int d : s.task.ablate_digits) digits += char('0' + d);
    kv["task.ablate_digits"] = digits;
    kv["task.length_balanced_mult"] = s.task.length_balanced_mult ? "1" : "0";
    kv["model.n_layers"] = std::to_string(s.model.n_layers);
    kv["model.n_heads"] = std::to_string(s.model.n_heads);
    kv["model.d_model"] = std::to_string(s.model.d_model);
    kv["model.dropout"] = num(s.model.dropout);
    kv["model.pos"] = pos_scheme_name(s.model.pos);
    kv["model.rel_buckets"] = std::to_string(s.model.rel_buckets);
    kv["model.rel_max_distance"] = std::to_string(s.model.rel_max_distance);
    kv["train.lr"] = num(s.train.lr);
    kv["train.min_lr"] = num(s.train.min_lr);
    kv["train.warmup_iters"] = std::to_string(s.train.warmup_iters);
    kv["train.decay_iters"] = std::to_string(s.train.decay_iters);
    kv["train.beta1"] = num(s.train.beta1);
    kv["train.beta2"] = num(s.train.beta2);
    kv["train.weight_decay"] = num(s.train.weight_decay);
    kv["train.grad_clip"] = num(s.train.grad_clip);
    kv["train.batch_size"] = std::to_string(s.train.batch_size);
    kv["train.max_iters"] = std::to_string(s.train.max_iters);
    kv["train.eval_every"] = std::to_string(s.train.eval_every);
    kv["train.checkpoint_every"] = std::to_string(s.train.checkpoint_every);
    kv["train.eval_size"] = std::to_string(s.train.eval_size);
    kv["train.seed"] = std::to_string(s.train.seed);
    kv["train.threads"] = std::to_string(s.train.threads);
    kv["train.temperature"] = num(s.train.temperature);
    kv["train.answer_only_loss"] = s.train.answer_only_loss ? "1" : "0";
    kv["train.chunked"] = s.train.chunked ? "1" : "0";
    kv["train.chunk_window"] = std::to_string(s.train.chunk_window);
    kv["train.epoch_mode"] = s.train.epoch_mode ? "1" : "0";
    return kv;
}

std::string settings_to_config_text(const RunSettings& s) {
    std::string out;
    for (auto& [k, v] : settings_to_kv(s)) out += k + " = " + v + "\n";
    return out;
}

std::string settings_to_json(const RunSettings& s) {
    json j;
    for (auto& [k, v] : settings_to_kv(s)) j[k] = v;
    return j.dump(2);
}

RunSettings settings_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    std::map<std::string, std::string> kv;
    for (auto& [k, v] : j.items()) kv[k] = v.get<std::string>();
    return settings_from_kv(kv);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("failed writing: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty csv: " + path);
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        t.columns.push_back(cell);
        t.data[cell] = {};
    }
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream rs(line);
        size_t col = 0;
        while (col < t.columns.size()) {
            if (!std::getline(rs, cell, ',')) cell = "";
            double v = std::numeric_limits<double>::quiet_NaN();
            if (!cell.empty()) {
                try { v = std::stod(cell); } catch (...) {}
            }
            t.data[t.columns[col]].push_back(v);
            ++col;
        }
        ++t.rows;
    }
    return t;
}

std::string resolve_run_dir(const std::string& name) {
    namespace fs = std::filesystem;
    fs::path p(name);
    if (p.is_absolute()) return name;
    const char* root = std::getenv("ARITHDYN_RUN_ROOT");
    fs::path base = (root && *root) ? fs::path(root) : fs::path("runs");
    return (base / p).string();
}

} // namespace arithdyn
