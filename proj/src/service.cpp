#include "aquarius/service.hpp"

#include "aquarius/error.hpp"
#include "aquarius/json_io.hpp"
#include "aquarius/randomizer.hpp"
#include "aquarius/stats.hpp"
#include "aquarius/triage.hpp"

#include <httplib.h>

#include <csignal>
#include <iostream>
#include <mutex>
#include <shared_mutex>
#include <thread>

namespace aquarius::service {

namespace {

auto http_status(error_code code) -> int {
    switch (code) {
        case error_code::unknown_item: return 404;
        case error_code::already_adjudicated:
        case error_code::incomplete_adjudication:
        case error_code::conflicting_duplicate: return 409;
        case error_code::invalid_record:
        case error_code::invalid_timestamp:
        case error_code::not_discordant: return 422;
        case error_code::io_error: return 500;
        default: return 400;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message, json extra = json::object()) {
    extra["error"] = code;
    extra["message"] = message;
    send_json(res, status, extra);
}

void send_error(httplib::Response& res, const error& e) {
    send_error(res, http_status(e.code()), to_string(e.code()), e.what());
}

auto arm_name(const cohort_state& state, const std::string& study_id) -> json {
    auto it = state.assignments.find(study_id);
    if (it == state.assignments.end()) {
        return nullptr;
    }
    return it->second.flagged ? "flagged" : "non-flagged";
}

auto item_json(const cohort_state& state, const triage_item& item) -> json {
    json j = item;
    j["arm"] = arm_name(state, item.study_id());
    return j;
}

auto parse_arm(const std::string& s) -> bool {
    if (s == "flagged") {
        return true;
    }
    if (s == "non-flagged" || s == "nonflagged" || s == "non_flagged") {
        return false;
    }
    throw error(error_code::invalid_record, "unknown arm '" + s + "'");
}

std::mutex log_mutex;

}  // namespace

struct qa_service::impl {
    impl(service_config c, ingest::pipeline p) : config(std::move(c)), pipeline(std::move(p)) {
        routes();
    }

    service_config config;
    ingest::pipeline pipeline;
    mutable std::shared_mutex mutex;
    httplib::Server server;
    std::thread thread;
    int bound_port = -1;

    template <typename F>
    void read(httplib::Response& res, F&& f) const {
        try {
            std::shared_lock lock(mutex);
            f(pipeline.state());
        } catch (const error& e) {
            send_error(res, e);
        }
    }

    template <typename F>
    void write(httplib::Response& res, F&& f) {
        try {
            std::unique_lock lock(mutex);
            f(pipeline);
        } catch (const error& e) {
            send_error(res, e);
        }
    }

    void ingest_route(const char* path, record_kind kind) {
        server.Post(path, [this, kind](const httplib::Request& req, httplib::Response& res) {
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::parse_error& e) {
                send_error(res, 400, "InvalidRecord", std::string("malformed JSON: ") + e.what());
                return;
            }
            write(res, [&](ingest::pipeline& p) {
                const auto r = p.ingest_json(kind, body);
                switch (r.status) {
                    case ingest::ingest_status::accepted:
                        send_json(res, 201, {{"status", "accepted"}});
                        break;
                    case ingest::ingest_status::duplicate:
                        send_json(res, 200, {{"status", "duplicate"}});
                        break;
                    case ingest::ingest_status::rejected:
                        send_error(res, 422, "InvalidRecord", r.message);
                        break;
                }
            });
        });
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers",
                                     "Content-Type, Authorization"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});

        server.set_pre_routing_handler([this](const httplib::Request& req,
                                              httplib::Response& res) {
            if (req.method == "OPTIONS" || !config.bearer_token) {
                return httplib::Server::HandlerResponse::Unhandled;
            }
            if (req.get_header_value("Authorization") != "Bearer " + *config.bearer_token) {
                send_error(res, 401, "Unauthorized", "missing or invalid bearer token");
                return httplib::Server::HandlerResponse::Handled;
            }
            return httplib::Server::HandlerResponse::Unhandled;
        });

        server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
            const json line{{"ts", timestamp::now()},
                            {"method", req.method},
                            {"path", req.path},
                            {"status", res.status},
                            {"remote", req.remote_addr}};
            std::lock_guard lock(log_mutex);
            std::cerr << line.dump() << '\n';
        });

        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
            res.status = 204;
        });

        ingest_route("/v1/studies", record_kind::study);
        ingest_route("/v1/ai-results", record_kind::finding);
        ingest_route("/v1/reports", record_kind::report);

        server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
            read(res, [&](const cohort_state& s) {
                send_json(res, 200,
                          {{"status", "ok"},
                           {"events", pipeline.events().size()},
                           {"studies", s.studies.size()}});
            });
        });

        server.Get("/v1/worklist", [this](const httplib::Request&, httplib::Response& res) {
            read(res, [&](const cohort_state& s) {
                json out = json::array();
                for (const auto& e : trial::worklist_view(s)) {
                    out.push_back({{"study_id", e.study_id}, {"flag_shown", e.flag_shown}});
                }
                send_json(res, 200, out);
            });
        });

        server.Get("/v1/triage/queue", [this](const httplib::Request& req,
                                              httplib::Response& res) {
            read(res, [&](const cohort_state& s) {
                triage::queue_filter filter;
                if (req.has_param("arm") && !req.get_param_value("arm").empty()) {
                    filter.flagged = parse_arm(req.get_param_value("arm"));
                }
                if (req.has_param("class") && !req.get_param_value("class").empty()) {
                    filter.concordance = parse_concordance_class(req.get_param_value("class"));
                }
                json out = json::array();
                for (const auto& item : triage::pending_queue(s, filter)) {
                    out.push_back(item_json(s, item));
                }
                send_json(res, 200, out);
            });
        });

        server.Get(R"(/v1/triage/([^/]+))", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
            const std::string id = req.matches[1];
            read(res, [&](const cohort_state& s) {
                const auto* item = s.triage.find(id);
                if (!item) {
                    send_error(res, 404, "UnknownItem", "no triage item for study '" + id + "'");
                    return;
                }
                json out = item_json(s, *item);
                out["live"] = s.is_live(*item);
                out["adjudications"] = s.triage.history(id);
                if (auto f = s.findings.find(id); f != s.findings.end()) {
                    out["ai_finding"] = f->second;
                }
                send_json(res, 200, out);
            });
        });

        server.Post(R"(/v1/triage/([^/]+)/adjudication)", [this](const httplib::Request& req,
                                                                 httplib::Response& res) {
            const std::string id = req.matches[1];
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::parse_error& e) {
                send_error(res, 400, "InvalidRecord", std::string("malformed JSON: ") + e.what());
                return;
            }
            write(res, [&](ingest::pipeline& p) {
                const auto adj = parse_adjudication_request(body, id, timestamp::now());
                const auto item = p.adjudicate(adj);
                send_json(res, 200, item_json(p.state(), item));
            });
        });

        server.Get("/v1/metrics", [this](const httplib::Request& req, httplib::Response& res) {
            read(res, [&](const cohort_state& s) {
                std::optional<rate_basis> basis;
                if (req.has_param("basis") && !req.get_param_value("basis").empty()) {
                    basis = parse_rate_basis(req.get_param_value("basis"));
                }
                const auto summary = stats::summarize(s);
                if (summary.pending > 0) {
                    send_error(res, 409, "IncompleteAdjudication",
                               std::to_string(summary.pending) + " cases pending adjudication",
                               {{"pending", summary.pending},
                                {"cohort_size", summary.cohort_size},
                                {"queue_size", summary.queue_size},
                                {"effort_reduction",
                                 summary.cohort_size == 0
                                     ? 1.0
                                     : stats::effort_reduction(summary.queue_size,
                                                               summary.cohort_size)}});
                    return;
                }
                json out = stats::compute_metrics(s, pipeline.options().trial, basis, config.z);
                out["pending"] = 0;
                send_json(res, 200, out);
            });
        });

        server.Get(R"(/v1/reports/([^/]+))", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            const std::string id = req.matches[1];
            read(res, [&](const cohort_state& s) {
                const auto* report = s.current_report(id);
                if (!report) {
                    send_error(res, 404, "UnknownItem", "no report for study '" + id + "'");
                    return;
                }
                json out = *report;
                out["versions"] = s.reports.at(id).size();
                if (auto l = s.labels.find(id); l != s.labels.end()) {
                    out["label"] = to_string(l->second.label);
                    out["evidence"] = l->second.evidence;
                    out["classifier_version"] = l->second.classifier_version;
                } else {
                    out["label"] = nullptr;
                    out["evidence"] = json::array();
                }
                send_json(res, 200, out);
            });
        });
    }
};

qa_service::qa_service(service_config config, ingest::pipeline pipeline)
    : impl_(std::make_unique<impl>(std::move(config), std::move(pipeline))) {}

qa_service::~qa_service() { stop(); }

auto qa_service::bind(const std::string& host, int port) -> int {
    if (port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(host);
    } else {
        impl_->bound_port = impl_->server.bind_to_port(host, port) ? port : -1;
    }
    if (impl_->bound_port < 0) {
        throw error(error_code::io_error,
                    "cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
    }
    return impl_->bound_port;
}

void qa_service::run() { impl_->server.listen_after_bind(); }

void qa_service::start() {
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void qa_service::stop() {
    if (!impl_) {
        return;
    }
    impl_->server.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

auto qa_service::port() const noexcept -> int { return impl_->bound_port; }

namespace {
qa_service* running_service = nullptr;

extern "C" void handle_stop_signal(int) {
    if (running_service) {
        running_service->stop();
    }
}
}  // namespace

auto serve(const service_config& config) -> int {
    try {
        auto pipeline = ingest::pipeline::open(pipeline_options_for(config), config.log_path);
        qa_service svc(config, std::move(pipeline));
        const int port = svc.bind(config.host, config.port);
        std::cerr << json{{"ts", timestamp::now()},
                          {"event", "listening"},
                          {"host", config.host},
                          {"port", port},
                          {"log_path", config.log_path.string()}}
                         .dump()
                  << '\n';
        running_service = &svc;
        std::signal(SIGINT, handle_stop_signal);
        std::signal(SIGTERM, handle_stop_signal);
        svc.run();
        running_service = nullptr;
        return 0;
    } catch (const error& e) {
        std::cerr << "aquarius serve: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace aquarius::service
