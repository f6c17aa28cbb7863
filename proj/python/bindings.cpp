// Python bindings for the QA engine.

#include "aquarius/classifier.hpp"
#include "aquarius/error.hpp"
#include "aquarius/json_io.hpp"
#include "aquarius/metrics_export.hpp"
#include "aquarius/pipeline.hpp"
#include "aquarius/randomizer.hpp"
#include "aquarius/simulator.hpp"
#include "aquarius/stats.hpp"
#include "aquarius/text.hpp"
#include "aquarius/triage.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

namespace py = pybind11;
using namespace aquarius;

namespace {

auto to_py(const json& j) -> py::object {
    switch (j.type()) {
        case json::value_t::null: return py::none();
        case json::value_t::boolean: return py::bool_(j.get<bool>());
        case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case json::value_t::number_float: return py::float_(j.get<double>());
        case json::value_t::string: return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& v : j) {
                out.append(to_py(v));
            }
            return std::move(out);
        }
        case json::value_t::object: {
            py::dict out;
            for (const auto& [k, v] : j.items()) {
                out[py::str(k)] = to_py(v);
            }
            return std::move(out);
        }
        default: return py::none();
    }
}

auto from_py(const py::handle& o) -> json {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

auto status_name(ingest::ingest_status s) -> std::string {
    switch (s) {
        case ingest::ingest_status::accepted: return "accepted";
        case ingest::ingest_status::duplicate: return "duplicate";
        case ingest::ingest_status::rejected: return "rejected";
    }
    return "?";
}

auto summary_dict(const ingest::ingest_summary& s) -> py::dict {
    py::dict d;
    d["accepted"] = s.accepted;
    d["duplicates"] = s.duplicates;
    d["rejected"] = s.rejected;
    py::list errors;
    for (const auto& e : s.errors) {
        errors.append(py::make_tuple(e.line, e.message));
    }
    d["errors"] = errors;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "AQUARIUS radiology QA engine";

    static py::exception<aquarius::error> aquarius_error(m, "AquariusError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const aquarius::error& e) {
            const auto msg = std::string(to_string(e.code())) + ": " + e.what();
            py::set_error(aquarius_error, msg.c_str());
        }
    });

    m.def(
        "classify_report",
        [](const std::string& text, const std::string& study_id) {
            const report_document doc{study_id, text, timestamp{}};
            static const nlp::report_classifier classifier(nlp::default_lexicon());
            json j = classifier.classify_report(doc);
            j.erase("report_finalized_at");
            return to_py(j);
        },
        py::arg("text"), py::arg("study_id") = "adhoc",
        "Label a report with the default lexicon; returns the label as a dict.");

    m.def(
        "split_sentences",
        [](const std::string& text) {
            std::vector<std::pair<std::size_t, std::size_t>> out;
            for (const auto& r : nlp::split_sentences(text)) {
                out.emplace_back(r.start, r.end);
            }
            return out;
        },
        py::arg("text"), "Sentence byte ranges as (start, end) pairs.");

    m.def(
        "segment_sections",
        [](const std::string& text) {
            py::list out;
            for (const auto& s : nlp::segment_sections(text)) {
                out.append(py::make_tuple(std::string(nlp::to_string(s.kind)), s.name,
                                          s.range.start, s.range.end));
            }
            return out;
        },
        py::arg("text"), "Sections as (kind, name, start, end) tuples.");

    m.def("hash_flagged", &trial::hash_flagged, py::arg("seed"), py::arg("study_id"),
          py::arg("probability") = 0.5);
    m.def("fisher_exact_2x2", &stats::fisher_exact_2x2, py::arg("a"), py::arg("b"),
          py::arg("c"), py::arg("d"));
    m.def(
        "wilson_interval",
        [](std::size_t k, std::size_t n, double z) {
            const auto i = stats::wilson_interval(k, n, z);
            return py::make_tuple(i.lo, i.hi);
        },
        py::arg("successes"), py::arg("n"), py::arg("z") = 1.96);
    m.def("effort_reduction", &stats::effort_reduction, py::arg("queue_size"),
          py::arg("cohort_size"));

    m.def(
        "write_fixture", [](const std::filesystem::path& dir) { sim::write_bundle(sim::reference_fixture(), dir); },
        py::arg("directory"), "Write the 1936-study reference cohort as JSON-lines files.");
    m.def(
        "simulate",
        [](const py::dict& params, const std::filesystem::path& dir) {
            sim::write_bundle(sim::generate_cohort(from_py(params).get<sim::sim_params>()), dir);
        },
        py::arg("params"), py::arg("directory"));
    m.def(
        "random_review_baseline",
        [](const std::filesystem::path& sidecar, double fraction, const std::string& seed,
           std::size_t trials) {
            return to_py(json(sim::random_review_baseline(sim::read_sidecar(sidecar), fraction,
                                                          seed, trials)));
        },
        py::arg("sidecar"), py::arg("review_fraction"), py::arg("seed") = "aquarius-baseline",
        py::arg("trials") = 10000);

    py::class_<ingest::pipeline>(m, "Pipeline")
        .def(py::init([](py::object log_path, const py::dict& trial) {
                 ingest::pipeline_options options;
                 if (!trial.empty()) {
                     options.trial = from_py(trial).get<trial::trial_config>();
                 }
                 if (log_path.is_none()) {
                     return std::make_unique<ingest::pipeline>(std::move(options));
                 }
                 return std::make_unique<ingest::pipeline>(ingest::pipeline::open(
                     std::move(options), log_path.cast<std::filesystem::path>()));
             }),
             py::arg("log_path") = py::none(), py::arg("trial") = py::dict())
        .def(
            "ingest",
            [](ingest::pipeline& p, const std::string& kind, const py::dict& record) {
                const auto r = p.ingest_json(ingest::parse_record_kind(kind), from_py(record));
                return py::make_tuple(status_name(r.status), r.message);
            },
            py::arg("kind"), py::arg("record"))
        .def(
            "ingest_file",
            [](ingest::pipeline& p, const std::filesystem::path& path, py::object kind) {
                const auto k = kind.is_none() ? ingest::record_kind_from_path(path)
                                              : ingest::parse_record_kind(kind.cast<std::string>());
                if (!k) {
                    throw error(error_code::invalid_record,
                                "cannot infer record kind of " + path.string());
                }
                return summary_dict(p.ingest_file(path, *k));
            },
            py::arg("path"), py::arg("kind") = py::none())
        .def(
            "adjudicate",
            [](ingest::pipeline& p, const std::string& study_id, const std::string& outcome,
               const std::string& reviewer, py::object note, bool amendment) {
                adjudication a;
                a.study_id = study_id;
                a.reviewer_id = reviewer;
                a.outcome = parse_adjudication_outcome(outcome);
                if (!note.is_none()) {
                    a.note = note.cast<std::string>();
                }
                a.decided_at = timestamp::now();
                a.amendment = amendment;
                return to_py(json(p.adjudicate(a)));
            },
            py::arg("study_id"), py::arg("outcome"), py::arg("reviewer") = "python",
            py::arg("note") = py::none(), py::arg("amendment") = false)
        .def(
            "apply_script",
            [](ingest::pipeline& p, const std::filesystem::path& path) {
                const auto s = p.apply_script(path);
                py::dict d;
                d["applied"] = s.applied;
                d["repeats"] = s.repeats;
                d["failed"] = s.failed;
                return d;
            },
            py::arg("path"))
        .def("queue",
             [](const ingest::pipeline& p) {
                 py::list out;
                 for (const auto& item : triage::pending_queue(p.state())) {
                     out.append(to_py(json(item)));
                 }
                 return out;
             })
        .def(
            "metrics",
            [](const ingest::pipeline& p, py::object basis) {
                std::optional<rate_basis> b;
                if (!basis.is_none()) {
                    b = parse_rate_basis(basis.cast<std::string>());
                }
                return to_py(json(stats::compute_metrics(p.state(), p.options().trial, b)));
            },
            py::arg("basis") = py::none())
        .def_property_readonly("event_count",
                               [](const ingest::pipeline& p) { return p.events().size(); })
        .def_property_readonly("study_count",
                               [](const ingest::pipeline& p) { return p.state().studies.size(); });
}
