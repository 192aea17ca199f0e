#include "arithdyn/task.hpp"

#include <stdexcept>

namespace arithdyn {

std::string task_name(Task t) {
    switch (t) {
    case Task::Addition: return "addition";
    case Task::Multiplication: return "multiplication";
    case Task::Comparison: return "comparison";
    case Task::Sorting: return "sorting";
    case Task::AdditionScratchpad: return "addition-scratchpad";
    }
    return "?";
}

Task task_from_name(const std::string& name) {
    if (name == "addition") return Task::Addition;
    if (name == "multiplication") return Task::Multiplication;
    if (name == "comparison") return Task::Comparison;
    if (name == "sorting") return Task::Sorting;
    if (name == "addition-scratchpad") return Task::AdditionScratchpad;
    throw std::runtime_error("unknown task '" + name +
                             "' (valid: addition, multiplication, comparison, sorting, addition-scratchpad)");
}

std::string sampling_name(Sampling s) {
    switch (s) {
    case Sampling::Uniform: return "uniform";
    case Sampling::NcidBalanced: return "ncid-balanced";
    case Sampling::DoublyBalanced: return "doubly-balanced";
    case Sampling::ClosenessOnly: return "closeness-only";
    }
    return "?";
}

Sampling sampling_from_name(const std::string& name) {
    if (name == "uniform") return Sampling::Uniform;
    if (name == "ncid-balanced") return Sampling::NcidBalanced;
    if (name == "doubly-balanced") return Sampling::DoublyBalanced;
    if (name == "closeness-only") return Sampling::ClosenessOnly;
    throw std::runtime_error("unknown sampling '" + name + "'");
}

std::string OutputFormat::name() const {
    switch (kind) {
    case Plain: return "plain";
    case Reverse: return "reverse";
    case Permutation: {
        std::string s = "perm:";
        for (int i : sigma) s += char('1' + i);
        return s;
    }
    }
    return "?";
}

OutputFormat OutputFormat::from_name(const std::string& name) {
    if (name == "plain") return plain();
    if (name == "reverse") return reverse();
    if (name.rfind("perm:", 0) == 0) {
        std::vector<int> sigma;
        for (size_t i = 5; i < name.size(); ++i) {
            char c = name[i];
            if (c < '1' || c > '9') throw std::runtime_error("bad permutation digit in '" + name + "'");
            sigma.push_back(c - '1');
        }
        return permutation(sigma);
    }
    throw std::runtime_error("unknown output format '" + name + "' (plain, reverse, perm:<digits>)");
}

std::string Example::answer_text() const {
    // Arrow tasks delimit with '→'; '=' tasks may contain several '=' in
    // scratchpad mode, where the final sum is the answer region.
    size_t pos = text.rfind("→");
    size_t skip = 3;
    if (pos == std::string::npos) {
        pos = text.rfind('=');
        skip = 1;
    }
    if (pos == std::string::npos) return {};
    std::string out = text.substr(pos + skip);
    if (!out.empty() && out.back() == '$') out.pop_back();
    return out;
}

std::string Example::prompt_text() const {
    size_t pos = text.find("→");
    size_t skip = 3;
    if (pos == std::string::npos) {
        pos = text.find('=');
        skip = 1;
    }
    if (pos == std::string::npos) return text;
    return text.substr(0, pos + skip);
}

} // namespace arithdyn
