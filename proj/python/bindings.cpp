#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "vithsd/annotation/kappa.hpp"
#include "vithsd/classifier/model_io.hpp"
#include "vithsd/classifier/training.hpp"
#include "vithsd/core/dataset.hpp"
#include "vithsd/core/errors.hpp"
#include "vithsd/core/labels.hpp"
#include "vithsd/core/text.hpp"
#include "vithsd/metrics/prf.hpp"
#include "vithsd/metrics/stats.hpp"
#include "vithsd/streaming/latency.hpp"
#include "vithsd/streaming/window.hpp"

namespace py = pybind11;
using namespace vithsd;

namespace {

py::object to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null: return py::none();
        case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
        case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& v : j) out.append(to_py(v));
            return out;
        }
        case nlohmann::json::value_t::object: {
            py::dict out;
            for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
            return out;
        }
        default: return py::none();
    }
}

TermList terms_of(const std::vector<std::string>& terms) {
    std::string list = "[";
    for (const auto& t : terms) {
        if (list.size() > 1) list += ", ";
        list += t;
    }
    return parse_label_list(list + "]");
}

std::vector<std::string> strings_of(const TermList& terms) {
    std::vector<std::string> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(t.str());
    return out;
}

std::array<int, kNumTargets> codes_array(const std::vector<int>& codes) {
    if (codes.size() != kNumTargets)
        raise(ErrorCode::InvalidLevel, "expected " + std::to_string(kNumTargets) + " level codes, got " +
                                           std::to_string(codes.size()));
    std::array<int, kNumTargets> a{};
    std::copy(codes.begin(), codes.end(), a.begin());
    return a;
}

py::dict prf_dict(const metrics::PRFReport& r) {
    py::dict d;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["f1"] = r.f1;
    d["matched"] = r.total.matched;
    d["predicted"] = r.total.predicted;
    d["gold"] = r.total.gold;
    d["comments"] = r.comments;
    return d;
}

py::dict prediction_dict(const classifier::PredictionOutput& p) {
    py::dict d;
    d["id"] = p.comment_id;
    d["labels"] = p.labels.codes();
    d["terms"] = strings_of(p.terms());
    py::list probs;
    for (const auto& head : p.probabilities) probs.append(py::cast(std::vector<double>(head.begin(), head.end())));
    d["probabilities"] = probs;
    d["model"] = p.model_id;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Targeted hate-speech labels, agreement, metrics and a multi-head linear classifier";

    py::register_exception<Error>(m, "VithsdError", PyExc_RuntimeError);

    m.def("preprocess_text", [](const std::string& s) { return preprocess_text(s); });
    m.def("tokenize", [](const std::string& s) { return tokenize(s); });

    m.def("parse_label_list", [](const std::string& s) { return strings_of(parse_label_list(s)); },
          "Parse '[slug#level, ...]' into canonical term strings.");
    m.def("format_label_list", [](const std::vector<std::string>& t) { return format_label_list(terms_of(t)); });
    m.def("label_codes", [](const std::vector<std::string>& t) { return terms_to_label_vector(terms_of(t)).codes(); },
          "Per-target level codes for a term list.");
    m.def("terms_from_codes", [](const std::vector<int>& codes) {
        return strings_of(label_vector_to_terms(LabelVector::from_codes(codes_array(codes))));
    });

    m.def("cohen_kappa", [](const std::vector<int>& a, const std::vector<int>& b) { return annotation::cohen_kappa(a, b); },
          "None when expected agreement is 1.");
    m.def("fleiss_kappa", [](const std::vector<std::vector<int>>& counts) { return annotation::fleiss_kappa(counts); });

    m.def(
        "prf",
        [](const std::vector<std::vector<std::string>>& preds, const std::vector<std::vector<std::string>>& golds,
           const std::string& task, const std::string& mode) {
            std::vector<TermList> p, g;
            for (const auto& x : preds) p.push_back(terms_of(x));
            for (const auto& x : golds) g.push_back(terms_of(x));
            metrics::Aggregation agg;
            if (mode == "micro") agg = metrics::Aggregation::Micro;
            else if (mode == "macro") agg = metrics::Aggregation::Macro;
            else raise(ErrorCode::InvalidConfig, "mode must be micro or macro, got '" + mode + "'");
            if (task == "target_only") return prf_dict(metrics::target_only_prf(p, g, agg));
            if (task == "target_level") return prf_dict(metrics::target_level_prf(p, g, agg));
            raise(ErrorCode::InvalidConfig, "task must be target_only or target_level, got '" + task + "'");
        },
        py::arg("preds"), py::arg("golds"), py::arg("task") = "target_level", py::arg("mode") = "micro");

    m.def("load_dataset", [](const std::filesystem::path& path) {
        py::list out;
        for (const auto& lc : load_dataset(path)) {
            py::dict d;
            d["id"] = lc.comment.id;
            d["text"] = lc.comment.text;
            d["labels"] = lc.labels.codes();
            out.append(d);
        }
        return out;
    });
    m.def("dataset_stats", [](const std::filesystem::path& path) {
        return to_py(metrics::to_json(metrics::dataset_stats(load_dataset(path))));
    });

    py::class_<classifier::MultiHeadLinearModel>(m, "Model")
        .def_static(
            "train",
            [](const std::vector<std::string>& texts, const std::vector<std::vector<int>>& labels, std::size_t dim,
               std::size_t epochs, double learning_rate, double momentum, std::size_t batch_size, double l2,
               std::uint64_t seed) {
                if (texts.size() != labels.size())
                    raise(ErrorCode::LengthMismatch, "texts and labels differ in length");
                std::vector<LabeledComment> data;
                data.reserve(texts.size());
                for (std::size_t i = 0; i < texts.size(); ++i)
                    data.push_back({{std::to_string(i), texts[i], std::nullopt, ""},
                                    LabelVector::from_codes(codes_array(labels[i]))});
                classifier::TrainConfig cfg;
                cfg.dim = dim;
                cfg.epochs = epochs;
                cfg.learning_rate = learning_rate;
                cfg.momentum = momentum;
                cfg.batch_size = batch_size;
                cfg.l2 = l2;
                cfg.seed = seed;
                py::gil_scoped_release release;
                return classifier::train(std::span<const LabeledComment>(data), cfg);
            },
            py::arg("texts"), py::arg("labels"), py::arg("dim") = classifier::kDefaultFeatureDim,
            py::arg("epochs") = 10, py::arg("learning_rate") = 0.05, py::arg("momentum") = 0.9,
            py::arg("batch_size") = 32, py::arg("l2") = 1e-5, py::arg("seed") = 42)
        .def_static("load", [](const std::filesystem::path& p) { return classifier::load_model(p); })
        .def("save", [](const classifier::MultiHeadLinearModel& mdl, const std::filesystem::path& p) {
            classifier::save_model(mdl, p);
        })
        .def_property_readonly("dim", &classifier::MultiHeadLinearModel::dim)
        .def(
            "predict",
            [](const classifier::MultiHeadLinearModel& mdl, const std::string& text, const std::string& id) {
                return prediction_dict(classifier::predict_labels(mdl, Comment{id, text, std::nullopt, ""}));
            },
            py::arg("text"), py::arg("id") = "0")
        .def("__eq__", [](const classifier::MultiHeadLinearModel& a, const classifier::MultiHeadLinearModel& b) {
            return a == b;
        });

    m.def(
        "window_counts",
        [](const std::vector<std::pair<std::int64_t, std::vector<std::string>>>& events, std::int64_t width_seconds) {
            std::vector<streaming::PredictionRecord> recs;
            recs.reserve(events.size());
            for (std::size_t i = 0; i < events.size(); ++i) {
                streaming::PredictionRecord r;
                r.id = std::to_string(i);
                r.event_ts = events[i].first;
                r.processed_ts = events[i].first;
                r.terms = terms_of(events[i].second);
                recs.push_back(std::move(r));
            }
            return to_py(streaming::to_json(streaming::window_aggregate(recs, width_seconds)));
        },
        "Tumbling-window term counts over (event_ts_ms, terms) pairs.", py::arg("events"),
        py::arg("width_seconds") = streaming::kDefaultWindowSeconds);

    m.def(
        "latency_stats",
        [](std::vector<double> samples, const std::string& model) {
            const auto s = streaming::latency_stats(model, std::move(samples));
            py::dict d;
            d["model"] = s.model;
            d["count"] = s.count;
            d["min"] = s.min;
            d["q25"] = s.q25;
            d["median"] = s.median;
            d["mean"] = s.mean;
            d["q75"] = s.q75;
            d["max"] = s.max;
            return d;
        },
        py::arg("samples"), py::arg("model") = "model");
}
