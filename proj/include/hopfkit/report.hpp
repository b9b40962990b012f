#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hopfkit {

// Overall verdict of a checker run. HOLDS/FAILS speak about the theorem's
// conclusion under verified hypotheses; HYPOTHESES_UNMET means a hypothesis
// failed definitively; UNDETERMINED means some scan could not resolve
// (never conflated with a definite failure); NOT_APPLICABLE means the
// checker's own applicability gate rejected the problem shape.
enum class Status { Holds, Fails, HypothesesUnmet, Undetermined, NotApplicable };

std::string to_string(Status s);

// Process exit code for a verdict: 0 HOLDS, 1 FAILS, 2 anything undecided.
int exit_code(Status s);

// One measured fact. `pass` is what the verdict logic consumes; `value` and
// `witness_x` feed the report so a reader can see the margin and where.
struct CheckItem {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::optional<double> witness_x;
    std::string note;

    static CheckItem ok(std::string name, double value,
                        std::optional<double> witness = std::nullopt,
                        std::string note = "");
    static CheckItem fail(std::string name, double value,
                          std::optional<double> witness = std::nullopt,
                          std::string note = "");
};

struct VerdictReport {
    std::string checker;  // which check produced this
    std::vector<CheckItem> hypotheses;
    std::vector<CheckItem> conclusions;
    std::vector<CheckItem> trace;  // informational only, never affects status
    bool undetermined = false;     // set by unresolvable scans
    std::optional<std::string> not_applicable;  // reason, when gated out
    Status overall = Status::Undetermined;

    // HOLDS iff all hypotheses and conclusions pass; a failed hypothesis
    // dominates everything except an applicability gate; unresolvable scans
    // yield UNDETERMINED rather than FAILS.
    void finalize();

    nlohmann::ordered_json to_json() const;
};

nlohmann::ordered_json to_json(const CheckItem& item);

// First item with the given name, or nullptr. Names are stable interface.
const CheckItem* find_item(const std::vector<CheckItem>& items, std::string_view name);

}  // namespace hopfkit
