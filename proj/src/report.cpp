#include "hopfkit/report.hpp"

namespace hopfkit {

std::string to_string(Status s) {
    switch (s) {
        case Status::Holds: return "HOLDS";
        case Status::Fails: return "FAILS";
        case Status::HypothesesUnmet: return "HYPOTHESES_UNMET";
        case Status::Undetermined: return "UNDETERMINED";
        case Status::NotApplicable: return "NOT_APPLICABLE";
    }
    return "UNDETERMINED";
}

int exit_code(Status s) {
    switch (s) {
        case Status::Holds: return 0;
        case Status::Fails: return 1;
        default: return 2;
    }
}

CheckItem CheckItem::ok(std::string name, double value,
                        std::optional<double> witness, std::string note) {
    return CheckItem{std::move(name), true, value, witness, std::move(note)};
}

CheckItem CheckItem::fail(std::string name, double value,
                          std::optional<double> witness, std::string note) {
    return CheckItem{std::move(name), false, value, witness, std::move(note)};
}

void VerdictReport::finalize() {
    if (not_applicable) {
        overall = Status::NotApplicable;
        return;
    }
    for (const auto& h : hypotheses) {
        if (!h.pass) {
            overall = Status::HypothesesUnmet;
            return;
        }
    }
    if (undetermined) {
        overall = Status::Undetermined;
        return;
    }
    for (const auto& c : conclusions) {
        if (!c.pass) {
            overall = Status::Fails;
            return;
        }
    }
    overall = Status::Holds;
}

nlohmann::ordered_json to_json(const CheckItem& item) {
    nlohmann::ordered_json j;
    j["name"] = item.name;
    j["pass"] = item.pass;
    j["value"] = item.value;
    if (item.witness_x) j["witness_x"] = *item.witness_x;
    if (!item.note.empty()) j["note"] = item.note;
    return j;
}

nlohmann::ordered_json VerdictReport::to_json() const {
    nlohmann::ordered_json j;
    j["checker"] = checker;
    j["status"] = to_string(overall);
    if (not_applicable) j["not_applicable_reason"] = *not_applicable;
    auto items = [](const std::vector<CheckItem>& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& it : v) arr.push_back(hopfkit::to_json(it));
        return arr;
    };
    j["hypotheses"] = items(hypotheses);
    j["conclusions"] = items(conclusions);
    if (!trace.empty()) j["trace"] = items(trace);
    if (undetermined) j["undetermined"] = true;
    return j;
}

const CheckItem* find_item(const std::vector<CheckItem>& items, std::string_view name) {
    for (const auto& it : items)
        if (it.name == name) return &it;
    return nullptr;
}

}  // namespace hopfkit
