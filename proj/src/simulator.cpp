#include "aquarius/simulator.hpp"

#include "aquarius/error.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace aquarius::sim {

namespace {

using namespace std::chrono_literals;

template <std::size_t N>
using phrases = std::array<std::string_view, N>;

// Each list's classifier reading under the default lexicon is fixed by construction.
constexpr phrases<7> affirmed_findings{
    "Acute subdural hematoma along the left convexity measuring 6 mm in thickness.",
    "Acute subarachnoid hemorrhage in the basal cisterns and sylvian fissures.",
    "Intraparenchymal hemorrhage in the right frontal lobe with surrounding edema.",
    "Intraventricular hemorrhage layering in the occipital horns.",
    "Small epidural hematoma underlying the right temporal bone.",
    "Hemorrhagic contusion in the left temporal lobe.",
    "Acute hyperdense hematoma in the left basal ganglia.",
};
constexpr phrases<4> affirmed_impressions{
    "Acute intracranial hemorrhage as described.",
    "Findings consistent with acute intracranial hemorrhage.",
    "Acute hemorrhage, communicated to the referring physician.",
    "Intracranial hemorrhage as detailed above.",
};
constexpr phrases<4> uncertain_findings{
    "Possible small subdural hematoma along the falx.",
    "Subtle hyperdensity concerning for subarachnoid hemorrhage in a left parietal sulcus.",
    "Focal hyperdensity in the right frontal lobe may represent hemorrhagic contusion.",
    "Subarachnoid hemorrhage cannot be excluded in the interpeduncular cistern.",
};
constexpr phrases<3> uncertain_impressions{
    "Findings suspicious for intracranial hemorrhage, follow-up recommended.",
    "Probable small subdural hematoma.",
    "Question of subtle subarachnoid hemorrhage.",
};
constexpr phrases<5> negated_findings{
    "No intracranial hemorrhage.",
    "No evidence of acute intracranial hemorrhage.",
    "There is no acute hemorrhage, mass effect or midline shift.",
    "Intracranial hemorrhage is not identified.",
    "No extra-axial hematoma.",
};
constexpr phrases<4> negative_impressions{
    "No acute intracranial abnormality.",
    "Negative for intracranial hemorrhage.",
    "No evidence of intracranial hemorrhage.",
    "No acute intracranial process.",
};
// Describe a hemorrhage in words the lexicon does not cover.
constexpr phrases<4> unlisted_findings{
    "Layering hyperdense blood products in the occipital horns.",
    "Hyperdense crescentic extra-axial collection along the right convexity.",
    "Acute blood in the basal cisterns.",
    "Hyperdense extra-axial collection along the left tentorium.",
};
constexpr phrases<3> unlisted_impressions{
    "Acute extra-axial collection as described.",
    "Acute blood products, communicated to the referring physician.",
    "Hyperdense collection as above, neurosurgical consultation suggested.",
};
constexpr phrases<6> neutral_sentences{
    "The ventricles and sulci are normal in size and configuration.",
    "Gray-white matter differentiation is preserved.",
    "The visualized paranasal sinuses and mastoid air cells are clear.",
    "The calvarium is intact.",
    "No midline shift.",
    "Mild periventricular white matter hypodensity, likely chronic small vessel change.",
};
constexpr phrases<5> indications{
    "Fall with head strike.", "Headache.", "Altered mental status.", "Dizziness.",
    "Acute neurological deficit.",
};

template <std::size_t N>
auto pick(rng& r, const phrases<N>& list) -> std::string_view {
    return list[r.below(N)];
}

enum class report_style { affirmed, uncertain, negated, unlisted };

auto synthesize_report(rng& r, report_style style) -> std::string {
    std::string findings;
    std::string impression;
    auto add = [&findings](std::string_view s) {
        if (!findings.empty()) {
            findings += ' ';
        }
        findings += s;
    };
    switch (style) {
        case report_style::affirmed:
            add(pick(r, affirmed_findings));
            add(pick(r, neutral_sentences));
            impression = pick(r, affirmed_impressions);
            break;
        case report_style::uncertain:
            add(pick(r, neutral_sentences));
            add(pick(r, uncertain_findings));
            impression = pick(r, uncertain_impressions);
            break;
        case report_style::negated:
            add(pick(r, negated_findings));
            add(pick(r, neutral_sentences));
            impression = pick(r, negative_impressions);
            break;
        case report_style::unlisted:
            add(pick(r, unlisted_findings));
            add(pick(r, neutral_sentences));
            impression = pick(r, unlisted_impressions);
            break;
    }
    std::string text = "INDICATION: ";
    text += pick(r, indications);
    text += "\nTECHNIQUE: Noncontrast CT of the head.\nFINDINGS: ";
    text += findings;
    text += "\nIMPRESSION: ";
    text += impression;
    return text;
}

auto three_decimals(double x) -> double { return std::round(x * 1000.0) / 1000.0; }

auto padded(std::string_view prefix, std::size_t n, int width) -> std::string {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, n);
    return std::string(prefix) + buf;
}

const timestamp cohort_start = timestamp::parse("2021-01-04T07:00:00Z");

struct study_plan {
    bool ai_positive = false;
    std::optional<bool> flagged_override;
    report_style style = report_style::negated;
    std::optional<adjudication_outcome> outcome;
};

// Materializes planned studies into records, reports, sidecar and script.
auto build_bundle(const std::vector<study_plan>& plan, std::string_view id_prefix,
                  const std::optional<trial::trial_config>& trial, rng& r) -> cohort_bundle {
    cohort_bundle b;
    const int width = plan.size() < 10000 ? 4 : 6;
    std::size_t adjudicated = 0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto& p = plan[i];
        const auto id = padded(id_prefix, i + 1, width);
        const auto acquired = cohort_start + std::chrono::minutes(15 * i + r.below(10));
        const auto received = acquired + std::chrono::seconds(120 + r.below(300));
        const auto finalized = acquired + std::chrono::minutes(45 + r.below(180));

        b.studies.push_back({id, acquired, "CT-" + std::to_string(1 + r.below(3)),
                             std::string(default_exam_type)});

        ai_finding f;
        f.study_id = id;
        f.finding_code = std::string(default_finding_code);
        f.ai_positive = p.ai_positive;
        f.ai_score = three_decimals(p.ai_positive ? 0.5 + 0.5 * r.uniform() : 0.49 * r.uniform());
        f.model_version = "ich-detect-2.1";
        f.received_at = received;
        f.flagged_override = p.flagged_override;
        b.findings.push_back(f);

        b.reports.push_back({id, synthesize_report(r, p.style), finalized});

        ground_truth g;
        g.study_id = id;
        g.ai_positive = p.ai_positive;
        if (p.ai_positive) {
            g.flagged = p.flagged_override ? *p.flagged_override
                                           : trial::assign_arm(f, *trial).flagged;
        }
        g.intended_label = p.style == report_style::affirmed || p.style == report_style::uncertain
                               ? nlp_label_value::positive
                               : nlp_label_value::negative;
        g.reported = p.style != report_style::negated;
        g.has_finding = g.reported || p.outcome == adjudication_outcome::true_positive_missed;
        g.intended_outcome = p.outcome;
        b.sidecar.push_back(g);

        if (p.outcome) {
            adjudication a;
            a.study_id = id;
            a.reviewer_id = "neuroradiologist-1";
            a.outcome = *p.outcome;
            if (*p.outcome == adjudication_outcome::reported_nlp_error) {
                a.note = "finding reported in phrasing the classifier does not match";
            }
            a.decided_at = cohort_start + std::chrono::days(45) +
                           std::chrono::minutes(10 * adjudicated++);
            b.script.push_back(a);
        }
    }
    return b;
}

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw error(error_code::invalid_config, std::string(name) + " must lie in [0,1]");
    }
}

template <typename T>
void write_lines(const std::filesystem::path& path, const std::vector<T>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw error(error_code::io_error, "cannot write " + path.string());
    }
    for (const auto& rec : records) {
        out << json(rec).dump() << '\n';
    }
    if (!out) {
        throw error(error_code::io_error, "write failed for " + path.string());
    }
}

}  // namespace

rng::rng(std::string_view seed) : engine_(trial::fnv1a64(seed)) {}

auto rng::next() -> std::uint64_t { return engine_(); }

auto rng::uniform() -> double { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

auto rng::below(std::uint64_t n) -> std::uint64_t {
    // Rejection on the biased low end of the 2^64 range.
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
        const auto x = next();
        if (x >= threshold) {
            return x % n;
        }
    }
}

void validate_sim_params(const sim_params& p) {
    if (p.n_studies == 0) {
        throw error(error_code::invalid_config, "n_studies must be at least 1");
    }
    check_probability(p.ai_positive_rate, "ai_positive_rate");
    check_probability(p.nlp_neg_given_ai_pos, "nlp_neg_given_ai_pos");
    check_probability(p.miss_prob_flagged, "miss_prob_flagged");
    check_probability(p.miss_prob_nonflagged, "miss_prob_nonflagged");
    check_probability(p.nlp_error_rate, "nlp_error_rate");
    trial::validate_trial_config(p.trial);
}

void to_json(json& j, const sim_params& v) {
    j = json{{"n_studies", v.n_studies},
             {"ai_positive_rate", v.ai_positive_rate},
             {"nlp_neg_given_ai_pos", v.nlp_neg_given_ai_pos},
             {"miss_prob_flagged", v.miss_prob_flagged},
             {"miss_prob_nonflagged", v.miss_prob_nonflagged},
             {"nlp_error_rate", v.nlp_error_rate},
             {"seed", v.seed},
             {"trial", v.trial}};
}

void from_json(const json& j, sim_params& v) {
    if (!j.is_object()) {
        throw error(error_code::invalid_config, "simulation parameters must be a JSON object");
    }
    try {
        sim_params out;
        out.n_studies = j.value("n_studies", out.n_studies);
        out.ai_positive_rate = j.value("ai_positive_rate", out.ai_positive_rate);
        out.nlp_neg_given_ai_pos = j.value("nlp_neg_given_ai_pos", out.nlp_neg_given_ai_pos);
        out.miss_prob_flagged = j.value("miss_prob_flagged", out.miss_prob_flagged);
        out.miss_prob_nonflagged = j.value("miss_prob_nonflagged", out.miss_prob_nonflagged);
        out.nlp_error_rate = j.value("nlp_error_rate", out.nlp_error_rate);
        out.seed = j.value("seed", out.seed);
        if (auto it = j.find("trial"); it != j.end() && !it->is_null()) {
            out.trial = it->get<trial::trial_config>();
        }
        v = std::move(out);
    } catch (const json::exception& e) {
        throw error(error_code::invalid_config, e.what());
    }
}

void to_json(json& j, const ground_truth& v) {
    j = json{{"study_id", v.study_id},
             {"ai_positive", v.ai_positive},
             {"flagged", v.flagged ? json(*v.flagged) : json(nullptr)},
             {"intended_label", to_string(v.intended_label)},
             {"has_finding", v.has_finding},
             {"reported", v.reported},
             {"intended_outcome",
              v.intended_outcome ? json(to_string(*v.intended_outcome)) : json(nullptr)}};
}

void from_json(const json& j, ground_truth& v) {
    try {
        ground_truth out;
        out.study_id = j.at("study_id").get<std::string>();
        out.ai_positive = j.at("ai_positive").get<bool>();
        if (auto it = j.find("flagged"); it != j.end() && !it->is_null()) {
            out.flagged = it->get<bool>();
        }
        out.intended_label = parse_nlp_label_value(j.at("intended_label").get<std::string>());
        out.has_finding = j.at("has_finding").get<bool>();
        out.reported = j.at("reported").get<bool>();
        if (auto it = j.find("intended_outcome"); it != j.end() && !it->is_null()) {
            out.intended_outcome = parse_adjudication_outcome(it->get<std::string>());
        }
        v = std::move(out);
    } catch (const json::exception& e) {
        throw error(error_code::invalid_record, std::string("sidecar: ") + e.what());
    }
}

auto generate_cohort(const sim_params& params) -> cohort_bundle {
    validate_sim_params(params);
    rng r(params.seed);
    std::vector<study_plan> plan(params.n_studies);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        auto& p = plan[i];
        p.ai_positive = r.bernoulli(params.ai_positive_rate);
        if (!p.ai_positive) {
            p.style = report_style::negated;
            continue;
        }
        // The arm is needed for the miss probability; it depends only on the id.
        const auto id = padded("SIM-", i + 1, params.n_studies < 10000 ? 4 : 6);
        const bool flagged = trial::hash_flagged(params.trial.trial_seed, id,
                                                 params.trial.flag_probability);
        if (!r.bernoulli(params.nlp_neg_given_ai_pos)) {
            p.style = r.bernoulli(0.15) ? report_style::uncertain : report_style::affirmed;
        } else if (r.bernoulli(params.nlp_error_rate)) {
            p.style = report_style::unlisted;
            p.outcome = adjudication_outcome::reported_nlp_error;
        } else {
            p.style = report_style::negated;
            const double miss = flagged ? params.miss_prob_flagged : params.miss_prob_nonflagged;
            p.outcome = r.bernoulli(miss) ? adjudication_outcome::true_positive_missed
                                          : adjudication_outcome::ai_false_positive;
        }
    }
    return build_bundle(plan, "SIM-", params.trial, r);
}

auto reference_fixture() -> cohort_bundle {
    constexpr std::size_t n = 1936;
    constexpr std::size_t ai_pos = 381;
    using enum adjudication_outcome;
    constexpr auto tpm = true_positive_missed;
    constexpr auto rne = reported_nlp_error;
    constexpr auto afp = ai_false_positive;
    // Discordant outcomes per arm; 1 + 3 + 8 flagged, 5 + 3 + 9 non-flagged.
    constexpr std::array<adjudication_outcome, 12> flagged_cases{afp, rne, afp, afp, tpm, afp,
                                                                 rne, afp, afp, rne, afp, afp};
    constexpr std::array<adjudication_outcome, 17> nonflagged_cases{
        afp, tpm, afp, rne, tpm, afp, afp, tpm, rne, afp, afp, tpm, afp, rne, afp, tpm, afp};
    constexpr std::size_t flagged_total = 190;
    constexpr std::size_t nonflagged_total = ai_pos - flagged_total;

    rng r("aquarius-reference-fixture");
    std::vector<study_plan> plan(n);
    std::size_t j = 0;
    std::array<std::size_t, 2> arm_ordinal{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = plan[i];
        // AI-positive studies spread evenly through the cohort.
        p.ai_positive = (i + 1) * ai_pos / n > i * ai_pos / n;
        if (!p.ai_positive) {
            p.style = report_style::negated;
            continue;
        }
        const bool flagged = j++ % 2 == 1;
        p.flagged_override = flagged;
        const std::size_t k = arm_ordinal[flagged ? 1 : 0]++;
        const std::size_t total = flagged ? flagged_total : nonflagged_total;
        const std::size_t cases = flagged ? flagged_cases.size() : nonflagged_cases.size();
        // Arm ordinal k is discordant when it is the first of its stride bucket.
        const bool discordant = (k * cases) % total < cases;
        if (!discordant) {
            p.style = r.bernoulli(0.15) ? report_style::uncertain : report_style::affirmed;
            continue;
        }
        const std::size_t slot = k * cases / total;
        p.outcome = flagged ? flagged_cases[slot] : nonflagged_cases[slot];
        p.style = *p.outcome == rne ? report_style::unlisted : report_style::negated;
    }
    return build_bundle(plan, "AQ-", std::nullopt, r);
}

void write_bundle(const cohort_bundle& bundle, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw error(error_code::io_error, "cannot create " + dir.string() + ": " + ec.message());
    }
    write_lines(dir / studies_file, bundle.studies);
    write_lines(dir / findings_file, bundle.findings);
    write_lines(dir / reports_file, bundle.reports);
    write_lines(dir / script_file, bundle.script);
    write_lines(dir / sidecar_file, bundle.sidecar);
}

auto read_sidecar(const std::filesystem::path& path) -> std::vector<ground_truth> {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::io_error, "cannot read " + path.string());
    }
    std::vector<ground_truth> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        out.push_back(parse_json_line(line).get<ground_truth>());
    }
    return out;
}

void to_json(json& j, const baseline_report& v) {
    j = json{{"seed", v.seed},
             {"trials", v.trials},
             {"cohort_size", v.cohort_size},
             {"true_misses", v.true_misses},
             {"review_fraction", v.review_fraction},
             {"sample_size", v.sample_size},
             {"mean_detected", v.mean_detected},
             {"sd_detected", v.sd_detected},
             {"mean_fraction_detected", v.mean_fraction_detected},
             {"expected_detected", v.expected_detected},
             {"aquarius_queue_size", v.aquarius_queue_size},
             {"aquarius_detected", v.aquarius_detected}};
}

auto random_review_baseline(const std::vector<ground_truth>& sidecar, double review_fraction,
                            std::string_view seed, std::size_t trials) -> baseline_report {
    if (!(review_fraction > 0.0 && review_fraction <= 1.0)) {
        throw error(error_code::invalid_config, "review_fraction must lie in (0,1]");
    }
    if (trials == 0) {
        throw error(error_code::invalid_config, "trials must be at least 1");
    }
    if (sidecar.empty()) {
        throw error(error_code::invalid_config, "sidecar is empty");
    }
    const std::size_t n = sidecar.size();

    baseline_report rep;
    rep.seed = std::string(seed);
    rep.trials = trials;
    rep.cohort_size = n;
    rep.review_fraction = review_fraction;
    rep.sample_size = std::max<std::size_t>(
        1, std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(review_fraction * n))));
    for (const auto& g : sidecar) {
        rep.true_misses += g.missed() ? 1 : 0;
        if (g.ai_positive && g.intended_label == nlp_label_value::negative) {
            ++rep.aquarius_queue_size;
            rep.aquarius_detected += g.missed() ? 1 : 0;
        }
    }
    rep.expected_detected = static_cast<double>(rep.true_misses) *
                            static_cast<double>(rep.sample_size) / static_cast<double>(n);

    std::vector<char> missed(n);
    for (std::size_t i = 0; i < n; ++i) {
        missed[i] = sidecar[i].missed() ? 1 : 0;
    }
    std::vector<std::size_t> order(n);
    // Welford accumulation keeps the variance stable over many trials.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        rng r(std::string(seed) + ":" + std::to_string(t));
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::size_t found = 0;
        // Partial Fisher-Yates: the first sample_size slots are the reviewed studies.
        for (std::size_t i = 0; i < rep.sample_size; ++i) {
            const auto pick = i + static_cast<std::size_t>(r.below(n - i));
            std::swap(order[i], order[pick]);
            found += static_cast<std::size_t>(missed[order[i]]);
        }
        const double x = static_cast<double>(found);
        const double delta = x - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (x - mean);
    }
    rep.mean_detected = mean;
    rep.sd_detected = trials > 1 ? std::sqrt(m2 / static_cast<double>(trials - 1)) : 0.0;
    rep.mean_fraction_detected =
        rep.true_misses == 0 ? 0.0 : mean / static_cast<double>(rep.true_misses);
    return rep;
}

}  // namespace aquarius::sim
