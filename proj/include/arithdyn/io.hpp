#pragma once

#include <map>
#include <string>
#include <vector>

#include "arithdyn/model.hpp"
#include "arithdyn/task.hpp"
#include "arithdyn/train.hpp"

namespace arithdyn {

// Flat "section.key = value" configuration text; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct RunSettings {
    TaskSpec task;
    ModelConfig model;
    TrainConfig train;
};

// Applies keys over paper-default settings; unknown keys or bad values throw
// with the offending field named. model.max_seq_len / vocab_size are derived
// from the task.
RunSettings settings_from_kv(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> settings_to_kv(const RunSettings& s);
std::string settings_to_config_text(const RunSettings& s);
std::string settings_to_json(const RunSettings& s);
RunSettings settings_from_json(const std::string& json_text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Column-major view of a CSV with one header row; missing cells are NaN.
struct CsvTable {
    std::vector<std::string> columns;
    std::map<std::string, std::vector<double>> data;
    size_t rows = 0;
    bool has(const std::string& c) const { return data.count(c) != 0; }
};
CsvTable read_csv(const std::string& path);

// Run-root override for relative run directories.
std::string resolve_run_dir(const std::string& name);

} // namespace arithdyn
