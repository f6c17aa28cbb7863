#include "aquarius/cli.hpp"

#include "aquarius/config.hpp"
#include "aquarius/error.hpp"
#include "aquarius/metrics_export.hpp"
#include "aquarius/pipeline.hpp"
#include "aquarius/service.hpp"
#include "aquarius/simulator.hpp"
#include "aquarius/stats.hpp"
#include "aquarius/triage.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace aquarius::cli {

namespace {

struct global_options {
    std::string config_path;
    std::string log_path;
    std::string format = "table";
};

auto load_config(const global_options& g) -> service_config {
    auto config = g.config_path.empty() ? service_config{} : load_service_config(g.config_path);
    if (!g.log_path.empty()) {
        config.log_path = g.log_path;
    } else if (const char* env = std::getenv("AQUARIUS_LOG"); env && *env) {
        config.log_path = env;
    }
    return config;
}

auto open_pipeline(const service_config& config) -> ingest::pipeline {
    return ingest::pipeline::open(pipeline_options_for(config), config.log_path);
}

void print_line_errors(std::ostream& err, const std::string& source,
                       const std::vector<ingest::line_error>& errors) {
    constexpr std::size_t shown = 20;
    for (std::size_t i = 0; i < errors.size() && i < shown; ++i) {
        err << source << ':' << errors[i].line << ": " << errors[i].message << '\n';
    }
    if (errors.size() > shown) {
        err << source << ": " << errors.size() - shown << " more errors\n";
    }
}

auto arm_label(const cohort_state& s, const std::string& id) -> std::string {
    auto it = s.assignments.find(id);
    return it == s.assignments.end() ? "-" : it->second.flagged ? "flagged" : "non-flagged";
}

auto cmd_ingest(const global_options& g, const std::vector<std::string>& files,
                const std::string& kind_name, std::ostream& out, std::ostream& err) -> int {
    const auto config = load_config(g);
    auto p = open_pipeline(config);
    std::optional<record_kind> forced;
    if (!kind_name.empty()) {
        forced = ingest::parse_record_kind(kind_name);
    }
    // Studies first so findings and reports can complete them immediately.
    std::vector<std::pair<std::string, record_kind>> plan;
    for (const auto& f : files) {
        const auto kind = forced ? forced : ingest::record_kind_from_path(f);
        if (!kind) {
            err << "skipping " << f << ": cannot tell the record kind from the file name\n";
            continue;
        }
        plan.emplace_back(f, *kind);
    }
    std::stable_sort(plan.begin(), plan.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });

    json report = json::array();
    ingest::ingest_summary total;
    for (const auto& [file, kind] : plan) {
        const auto s = p.ingest_file(file, kind);
        print_line_errors(err, file, s.errors);
        total.add(s);
        report.push_back({{"file", file},
                          {"accepted", s.accepted},
                          {"duplicates", s.duplicates},
                          {"rejected", s.rejected}});
    }
    if (g.format == "json") {
        out << json{{"files", report},
                    {"accepted", total.accepted},
                    {"duplicates", total.duplicates},
                    {"rejected", total.rejected},
                    {"events", p.events().size()}}
                   .dump(2)
            << '\n';
    } else {
        for (const auto& r : report) {
            out << std::left << std::setw(40) << r["file"].get<std::string>()
                << " accepted " << r["accepted"] << ", duplicates " << r["duplicates"]
                << ", rejected " << r["rejected"] << '\n';
        }
        out << "log " << config.log_path.string() << ": " << p.events().size() << " events, "
            << p.state().studies.size() << " studies, "
            << triage::pending_queue(p.state()).size() << " pending triage items\n";
    }
    return total.rejected == 0 ? exit_ok : exit_invalid;
}

auto cmd_queue(const global_options& g, const std::string& arm, const std::string& cls,
               std::ostream& out) -> int {
    const auto config = load_config(g);
    const auto state = ingest::replay(config.log_path).state;
    triage::queue_filter filter;
    if (!arm.empty()) {
        filter.flagged = arm == "flagged";
    }
    if (!cls.empty()) {
        filter.concordance = parse_concordance_class(cls);
    }
    const auto items = triage::pending_queue(state, filter);
    if (g.format == "json") {
        json arr = json::array();
        for (const auto& item : items) {
            json j = item;
            j["arm"] = arm_label(state, item.study_id());
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << '\n';
        return exit_ok;
    }
    out << std::left << std::setw(16) << "STUDY" << std::setw(18) << "CLASS" << std::setw(13)
        << "ARM"
        << "ENQUEUED\n";
    for (const auto& item : items) {
        out << std::left << std::setw(16) << item.study_id() << std::setw(18)
            << to_string(item.concordance()) << std::setw(13)
            << arm_label(state, item.study_id()) << item.enqueued_at().to_string() << '\n';
    }
    out << items.size() << " pending\n";
    return exit_ok;
}

struct adjudicate_options {
    std::string script;
    std::string study;
    std::string outcome;
    std::string reviewer = "cli";
    std::string note;
    bool amend = false;
};

auto cmd_adjudicate(const global_options& g, const adjudicate_options& o, std::ostream& out,
                    std::ostream& err) -> int {
    const auto config = load_config(g);
    auto p = open_pipeline(config);
    if (!o.script.empty()) {
        const auto s = p.apply_script(std::filesystem::path(o.script));
        print_line_errors(err, o.script, s.errors);
        if (g.format == "json") {
            out << json{{"applied", s.applied}, {"repeats", s.repeats}, {"failed", s.failed}}
                       .dump(2)
                << '\n';
        } else {
            out << "applied " << s.applied << ", repeats " << s.repeats << ", failed "
                << s.failed << "; " << triage::pending_queue(p.state()).size()
                << " still pending\n";
        }
        return s.failed == 0 ? exit_ok : exit_invalid;
    }
    adjudication adj;
    adj.study_id = o.study;
    adj.reviewer_id = o.reviewer;
    adj.outcome = parse_adjudication_outcome(o.outcome);
    if (!o.note.empty()) {
        adj.note = o.note;
    }
    adj.decided_at = timestamp::now();
    adj.amendment = o.amend;
    const auto item = p.adjudicate(adj);
    if (g.format == "json") {
        out << json(item).dump(2) << '\n';
    } else {
        out << item.study_id() << ": " << to_string(adj.outcome) << '\n';
    }
    return exit_ok;
}

auto cmd_metrics(const global_options& g, const std::string& basis_name,
                 const std::string& out_path, std::ostream& out) -> int {
    const auto config = load_config(g);
    const auto state = ingest::replay(config.log_path).state;
    std::optional<rate_basis> basis;
    if (!basis_name.empty()) {
        basis = parse_rate_basis(basis_name);
    }
    const auto m = stats::compute_metrics(state, config.trial, basis, config.z);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::trunc);
        if (!f) {
            throw error(error_code::io_error, "cannot write " + out_path);
        }
        f << metrics_to_json_text(m) << '\n';
    }
    out << (g.format == "json" ? metrics_to_json_text(m) + "\n" : render_metrics_table(m));
    return exit_ok;
}

auto cmd_replay(const global_options& g, std::ostream& out) -> int {
    const auto config = load_config(g);
    const auto r = ingest::replay(config.log_path);
    const auto summary = stats::summarize(r.state);
    if (g.format == "json") {
        out << json{{"log_path", config.log_path.string()},
                    {"events", r.events.size()},
                    {"dropped_partial_tail", r.dropped_partial_tail},
                    {"studies", summary.cohort_size},
                    {"ai_positive", summary.ai_positive_total},
                    {"queue_size", summary.queue_size},
                    {"pending", summary.pending}}
                   .dump(2)
            << '\n';
    } else {
        out << config.log_path.string() << ": ok, " << r.events.size() << " events, "
            << summary.cohort_size << " studies, " << summary.ai_positive_total
            << " AI-positive, " << summary.queue_size << " triage items (" << summary.pending
            << " pending)";
        if (r.dropped_partial_tail) {
            out << "; dropped an incomplete final line";
        }
        out << '\n';
    }
    return exit_ok;
}

struct simulate_options {
    std::string out_dir;
    std::string params_path;
    std::size_t n = 0;
    double ai_positive_rate = -1;
    double nlp_neg_given_ai_pos = -1;
    double miss_flagged = -1;
    double miss_nonflagged = -1;
    double nlp_error_rate = -1;
    std::string seed;
    std::string baseline_sidecar;
    double review_fraction = 0.0;
    std::size_t trials = 10000;
    std::string baseline_seed = "aquarius-baseline";
};

auto cmd_simulate(const global_options& g, const simulate_options& o, std::ostream& out,
                  std::ostream& err) -> int {
    if (!o.baseline_sidecar.empty()) {
        if (o.review_fraction <= 0.0) {
            err << "--review-fraction is required with --baseline\n";
            return exit_usage;
        }
        const auto sidecar = sim::read_sidecar(o.baseline_sidecar);
        const auto rep =
            sim::random_review_baseline(sidecar, o.review_fraction, o.baseline_seed, o.trials);
        out << json(rep).dump(2) << '\n';
        return exit_ok;
    }
    if (o.out_dir.empty()) {
        err << "simulate needs --out DIR (or --baseline SIDECAR)\n";
        return exit_usage;
    }
    sim::sim_params params;
    if (!o.params_path.empty()) {
        std::ifstream in(o.params_path);
        if (!in) {
            throw error(error_code::io_error, "cannot read " + o.params_path);
        }
        try {
            params = json::parse(in).get<sim::sim_params>();
        } catch (const json::exception& e) {
            throw error(error_code::invalid_config, e.what());
        }
    } else if (!g.config_path.empty()) {
        params.trial = load_config(g).trial;
    }
    if (o.n > 0) params.n_studies = o.n;
    if (o.ai_positive_rate >= 0) params.ai_positive_rate = o.ai_positive_rate;
    if (o.nlp_neg_given_ai_pos >= 0) params.nlp_neg_given_ai_pos = o.nlp_neg_given_ai_pos;
    if (o.miss_flagged >= 0) params.miss_prob_flagged = o.miss_flagged;
    if (o.miss_nonflagged >= 0) params.miss_prob_nonflagged = o.miss_nonflagged;
    if (o.nlp_error_rate >= 0) params.nlp_error_rate = o.nlp_error_rate;
    if (!o.seed.empty()) params.seed = o.seed;

    const auto bundle = sim::generate_cohort(params);
    sim::write_bundle(bundle, o.out_dir);
    out << "wrote " << bundle.studies.size() << " studies (" << bundle.script.size()
        << " scripted adjudications) to " << o.out_dir << '\n';
    return exit_ok;
}

auto cmd_fixture(const std::string& out_dir, std::ostream& out) -> int {
    const auto bundle = sim::reference_fixture();
    sim::write_bundle(bundle, out_dir);
    out << "wrote " << bundle.studies.size() << " studies (" << bundle.script.size()
        << " scripted adjudications) to " << out_dir << '\n';
    return exit_ok;
}

auto cmd_serve(const global_options& g, const std::string& host, int port,
               const std::string& token) -> int {
    auto config = load_config(g);
    if (!host.empty()) config.host = host;
    if (port >= 0) config.port = port;
    if (!token.empty()) config.bearer_token = token;
    return service::serve(config);
}

}  // namespace

auto run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int {
    CLI::App app{"AQUARIUS radiology QA engine", "aquarius"};
    app.require_subcommand(1);
    app.fallthrough();
    global_options g;
    app.add_option("--config", g.config_path, "Service/trial configuration file (JSON)");
    app.add_option("--log", g.log_path, "Event log path (default: $AQUARIUS_LOG or config)");

    auto add_format = [&g](CLI::App* sub) {
        sub->add_option("--format", g.format, "Output format")
            ->check(CLI::IsMember({"table", "json"}));
    };

    auto* ingest_cmd = app.add_subcommand("ingest", "Load JSON-lines files into the event log");
    std::vector<std::string> files;
    std::string kind;
    ingest_cmd->add_option("files", files, "studies/findings/reports .jsonl files")->required();
    ingest_cmd->add_option("--kind", kind, "Record kind for every file")
        ->check(CLI::IsMember({"studies", "findings", "reports"}));
    add_format(ingest_cmd);

    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic cohort or run the baseline");
    simulate_options so;
    sim_cmd->add_option("--out", so.out_dir, "Output directory");
    sim_cmd->add_option("--params", so.params_path, "Simulation parameters (JSON)");
    sim_cmd->add_option("--n", so.n, "Number of studies");
    sim_cmd->add_option("--ai-positive-rate", so.ai_positive_rate, "P(AI-positive)");
    sim_cmd->add_option("--nlp-neg-given-ai-pos", so.nlp_neg_given_ai_pos, "P(NLP-negative | AI-positive)");
    sim_cmd->add_option("--miss-prob-flagged", so.miss_flagged, "P(true miss | discordant, no NLP error), flagged arm");
    sim_cmd->add_option("--miss-prob-nonflagged", so.miss_nonflagged, "P(true miss | discordant, no NLP error), non-flagged arm");
    sim_cmd->add_option("--nlp-error-rate", so.nlp_error_rate, "P(reported but missed by the classifier | discordant)");
    sim_cmd->add_option("--seed", so.seed, "Cohort seed");
    sim_cmd->add_option("--baseline", so.baseline_sidecar,
                        "Run the random-review baseline over this sidecar file");
    sim_cmd->add_option("--review-fraction", so.review_fraction, "Share of the cohort reviewed per trial")
        ->check(CLI::Range(0.0, 1.0));
    sim_cmd->add_option("--trials", so.trials, "Baseline trials (default 10000)")
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--baseline-seed", so.baseline_seed, "Baseline sampling seed");

    auto* fixture_cmd = app.add_subcommand("fixture", "Write the 1936-study reference cohort");
    std::string fixture_out;
    fixture_cmd->add_option("--out", fixture_out, "Output directory")->required();

    auto* queue_cmd = app.add_subcommand("queue", "List pending triage items");
    std::string arm;
    std::string cls;
    queue_cmd->add_option("--arm", arm)->check(CLI::IsMember({"flagged", "non-flagged"}));
    queue_cmd->add_option("--class", cls, "Concordance class");
    add_format(queue_cmd);

    auto* adj_cmd = app.add_subcommand("adjudicate", "Record adjudications");
    adjudicate_options ao;
    auto* script_opt = adj_cmd->add_option("--script", ao.script, "JSON-lines adjudication script");
    auto* study_opt = adj_cmd->add_option("--study", ao.study, "Study id");
    auto* outcome_opt = adj_cmd->add_option("--outcome", ao.outcome, "Adjudication outcome");
    adj_cmd->add_option("--reviewer", ao.reviewer, "Reviewer id (default cli)");
    adj_cmd->add_option("--note", ao.note, "Free-text note");
    adj_cmd->add_flag("--amend", ao.amend, "Supersede an existing verdict");
    script_opt->excludes(study_opt)->excludes(outcome_opt);
    study_opt->needs(outcome_opt);
    outcome_opt->needs(study_opt);
    add_format(adj_cmd);

    auto* metrics_cmd = app.add_subcommand("metrics", "Print QA metrics");
    std::string basis;
    std::string metrics_out;
    metrics_cmd->add_option("--basis", basis, "AI_POSITIVE or CONFIRMED_POSITIVE");
    metrics_cmd->add_option("--out", metrics_out, "Also write the JSON report here");
    add_format(metrics_cmd);

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    std::string host;
    int port = -1;
    std::string token;
    serve_cmd->add_option("--host", host, "Bind address (default from config)");
    serve_cmd->add_option("--port", port, "Port, 0 picks a free one (default from config)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--token", token, "Require this bearer token");

    auto* replay_cmd = app.add_subcommand("replay", "Validate an event log by replaying it");
    add_format(replay_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "aquarius: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(g, files, kind, out, err);
        if (*sim_cmd) return cmd_simulate(g, so, out, err);
        if (*fixture_cmd) return cmd_fixture(fixture_out, out);
        if (*queue_cmd) return cmd_queue(g, arm, cls, out);
        if (*adj_cmd) {
            if (ao.script.empty() && ao.study.empty()) {
                err << "aquarius adjudicate: pass --script FILE or --study ID --outcome X\n";
                return exit_usage;
            }
            return cmd_adjudicate(g, ao, out, err);
        }
        if (*metrics_cmd) return cmd_metrics(g, basis, metrics_out, out);
        if (*serve_cmd) return cmd_serve(g, host, port, token);
        if (*replay_cmd) return cmd_replay(g, out);
    } catch (const error& e) {
        err << "aquarius: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_invalid;
    }
    return exit_usage;
}

auto run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) -> int {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_cli(args, out, err);
}

}  // namespace aquarius::cli
