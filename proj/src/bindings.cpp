#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arithdyn/datagen.hpp"
#include "arithdyn/decode.hpp"
#include "arithdyn/infotheory.hpp"
#include "arithdyn/io.hpp"
#include "arithdyn/metrics.hpp"
#include "arithdyn/runner.hpp"

namespace py = pybind11;
using namespace arithdyn;

namespace {

RunSettings settings_from_dict(const py::dict& d) {
    std::map<std::string, std::string> kv;
    for (auto item : d) kv[py::str(item.first)] = py::str(item.second);
    return settings_from_kv(kv);
}

py::dict theorem_report_dict(const Theorem1Report& rep) {
    py::dict out;
    out["ok"] = rep.ok;
    out["runtime_seconds"] = rep.runtime_seconds;
    py::list ai_e0, ai_ej, local, full;
    for (double v : rep.i_ai_e0) ai_e0.append(v);
    for (auto& row : rep.i_ai_ej) {
        py::list r;
        for (double v : row) r.append(v);
        ai_ej.append(r);
    }
    for (double v : rep.i_ai_ei_local) local.append(v);
    for (double v : rep.i_ai_ei_full) full.append(v);
    out["i_ai_e0"] = ai_e0;
    out["i_ai_ej"] = ai_ej;
    out["i_ai_ei_local"] = local;
    out["i_ai_ei_full"] = full;
    out["violations"] = rep.violations;
    out["table"] = rep.table_text();
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "synthetic-arithmetic transformer training dynamics (C++ core)";

    py::class_<TokenSeq>(m, "TokenSeq")
        .def_readonly("ids", &TokenSeq::ids)
        .def_readonly("answer_start", &TokenSeq::answer_start);

    py::class_<Vocab>(m, "Vocab")
        .def_readonly("symbols", &Vocab::symbols)
        .def_readonly("pad_id", &Vocab::pad_id)
        .def_readonly("terminator_id", &Vocab::terminator_id)
        .def("size", &Vocab::size);

    m.def("build_vocab", [](const std::string& task) { return build_vocab(task_from_name(task)); });
    m.def("encode", [](const std::string& text, const Vocab& v) { return encode(text, v); });
    m.def("decode_tokens", [](const std::vector<int>& ids, const Vocab& v) {
        TokenSeq t;
        t.ids = ids;
        return decode_tokens(t, v);
    });
    m.def("pad_sequence", [](const TokenSeq& t, int max_len, const Vocab& v) { return pad_sequence(t, max_len, v); });

    m.def("generate_dataset", [](const py::dict& cfg) {
        RunSettings s = settings_from_dict(cfg);
        std::vector<std::string> lines;
        for (const auto& e : generate(s.task)) lines.push_back(e.text);
        return lines;
    });
    m.def("dataset_hash", [](const py::dict& cfg) {
        RunSettings s = settings_from_dict(cfg);
        return dataset_content_hash(generate(s.task));
    });
    m.def("render_scratchpad", [](long long a, long long b, long long c, long long d, const std::string& kind) {
        return render_scratchpad(a, b, c, d, kind == "D" ? ScratchpadKind::D : ScratchpadKind::DA);
    });
    m.def("permute_output", &permute_output);

    m.def("digit_wise_error", [](const std::vector<std::string>& preds, const std::vector<std::string>& golds) {
        return digit_wise_error(preds, golds).e;
    });
    m.def("mi_from_table", [](const std::vector<std::vector<double>>& rows) {
        JointTable t(int(rows.size()), int(rows.at(0).size()));
        for (int x = 0; x < t.nx; ++x)
            for (int y = 0; y < t.ny; ++y) t.at(x, y) = rows[size_t(x)][size_t(y)];
        return mi_from_table(t);
    });
    m.def("probe_mi", &probe_mi);
    m.def("probe_cmi", &probe_cmi);
    m.def("local_carry_out", &local_carry_out);
    m.def("incoming_carry", &incoming_carry);

    m.def("verify_theorem1", [](bool inject_fault) { return theorem_report_dict(exact_theorem1(inject_fault)); },
          py::arg("inject_fault") = false);

    m.def("train_run", [](const py::dict& cfg, const std::string& out_dir) {
        RunSettings s = settings_from_dict(cfg);
        TrainResult r = run_training(s, out_dir, false);
        py::dict out;
        out["steps"] = r.steps;
        out["final_loss"] = r.final_loss;
        py::list history;
        for (auto& row : r.history) {
            py::dict h;
            for (auto& [k, v] : row) h[py::str(k)] = v;
            history.append(h);
        }
        out["history"] = history;
        return out;
    }, py::arg("cfg"), py::arg("out_dir") = std::string());

    m.def("eval_checkpoint", [](const std::string& ckpt, long long eval_size) {
        LoadedRun run = load_run_checkpoint(ckpt);
        if (eval_size > 0) run.settings.train.eval_size = eval_size;
        EvalSuites suites = build_eval_suites(run.settings, {});
        py::dict out;
        for (auto& [k, v] : evaluate_snapshot(run.settings, suites, run.params, run.step, ""))
            out[py::str(k)] = v;
        return out;
    }, py::arg("ckpt"), py::arg("eval_size") = 0);
}
