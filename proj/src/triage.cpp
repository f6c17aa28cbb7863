#include "aquarius/triage.hpp"

#include "aquarius/cohort_state.hpp"
#include "aquarius/error.hpp"

#include <algorithm>

namespace aquarius::triage {

auto concordance(bool ai_positive, nlp_label_value nlp) -> concordance_class {
    const bool nlp_positive = nlp == nlp_label_value::positive;
    if (ai_positive) {
        return nlp_positive ? concordance_class::ai_pos_nlp_pos : concordance_class::ai_pos_nlp_neg;
    }
    return nlp_positive ? concordance_class::ai_neg_nlp_pos : concordance_class::ai_neg_nlp_neg;
}

auto in_review_scope(concordance_class c, review_scope scope) -> bool {
    if (!is_discordant(c)) {
        return false;
    }
    return scope == review_scope::all_discordant || c == concordance_class::ai_pos_nlp_neg;
}

auto triage_queue::enqueue_if_discordant(const std::string& study_id, concordance_class c,
                                         const trial::trial_config& config,
                                         timestamp enqueued_at) -> std::optional<triage_item> {
    if (auto it = items_.find(study_id); it != items_.end()) {
        return it->second;
    }
    if (!in_review_scope(c, config.scope)) {
        return std::nullopt;
    }
    triage_item item(study_id, c, enqueued_at);
    items_.emplace(study_id, item);
    return item;
}

void triage_queue::apply_enqueue(const triage_item& item) {
    items_.insert_or_assign(item.study_id(), item);
}

void triage_queue::check_adjudication(const adjudication& adj) const {
    auto it = items_.find(adj.study_id);
    if (it == items_.end()) {
        throw error(error_code::unknown_item, "no triage item for study '" + adj.study_id + "'");
    }
    if (it->second.status() == triage_status::adjudicated && !adj.amendment) {
        throw error(error_code::already_adjudicated,
                    "study '" + adj.study_id + "' is already adjudicated");
    }
}

auto triage_queue::is_repeat(const adjudication& adj) const -> bool {
    if (adj.amendment) {
        return false;
    }
    const auto* current = effective_adjudication(adj.study_id);
    return current && current->reviewer_id == adj.reviewer_id &&
           current->outcome == adj.outcome && current->note == adj.note;
}

auto triage_queue::record_adjudication(const adjudication& adj) -> triage_item {
    check_adjudication(adj);
    return apply_adjudication(adj);
}

auto triage_queue::apply_adjudication(const adjudication& adj) -> triage_item {
    auto it = items_.find(adj.study_id);
    if (it == items_.end()) {
        throw error(error_code::unknown_item, "no triage item for study '" + adj.study_id + "'");
    }
    it->second = it->second.with_status(triage_status::adjudicated);
    history_[adj.study_id].push_back(adj);
    return it->second;
}

auto triage_queue::find(const std::string& study_id) const -> const triage_item* {
    auto it = items_.find(study_id);
    return it == items_.end() ? nullptr : &it->second;
}

auto triage_queue::effective_adjudication(const std::string& study_id) const
    -> const adjudication* {
    auto it = history_.find(study_id);
    if (it == history_.end() || it->second.empty()) {
        return nullptr;
    }
    return &it->second.back();
}

auto triage_queue::history(const std::string& study_id) const
    -> const std::vector<adjudication>& {
    static const std::vector<adjudication> empty;
    auto it = history_.find(study_id);
    return it == history_.end() ? empty : it->second;
}

auto pending_queue(const cohort_state& state, const queue_filter& filter)
    -> std::vector<triage_item> {
    std::vector<triage_item> out;
    for (const auto& item : state.live_items()) {
        if (item.status() != triage_status::pending) {
            continue;
        }
        if (filter.concordance && item.concordance() != *filter.concordance) {
            continue;
        }
        if (filter.flagged) {
            auto it = state.assignments.find(item.study_id());
            if (it == state.assignments.end() || it->second.flagged != *filter.flagged) {
                continue;
            }
        }
        out.push_back(item);
    }
    std::sort(out.begin(), out.end(), [](const triage_item& a, const triage_item& b) {
        return a.enqueued_at() != b.enqueued_at() ? a.enqueued_at() < b.enqueued_at()
                                                  : a.study_id() < b.study_id();
    });
    return out;
}

}  // namespace aquarius::triage
