#pragma once

#include <string>
#include <vector>

#include "adtree/model.hpp"
#include "adtree/scoring.hpp"

namespace adtree {

enum class ChangeKind { AddDefense, RemoveDefense, SetIds };

struct Change {
    ChangeKind kind = ChangeKind::AddDefense;
    std::string leaf_id;
    std::string defense_id;            // AddDefense / RemoveDefense
    IdsTier tier = IdsTier::Absent;    // SetIds

    friend bool operator==(const Change&, const Change&) = default;
};

/// Named, ordered list of defense and IDS changes — an improvement plan.
struct Scenario {
    std::string name;
    std::vector<Change> changes;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ComparisonRow {
    std::string leaf_id;
    std::string label;
    double nu_before = 0.0;
    double nu_after = 0.0;
    double improvement_percent = 0.0;
    bool zero_baseline = false;  // W_ZERO_BASELINE: before was 0, percent pinned to 0
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;  // leaves_of order
    double root_before = 0.0;
    double root_after = 0.0;
    AggregationSemantics semantics = AggregationSemantics::WorstPath;
};

struct Improvement {
    double percent = 0.0;
    bool zero_baseline = false;
};

enum class Objective { MaxLeaf, SumLeaves };

enum class ActionKind { AddDefense, UpgradeIds };

/// One recommended step and the objective reduction it achieved (delta <= 0).
struct Action {
    std::string leaf_id;
    ActionKind kind = ActionKind::AddDefense;
    std::string defense_id;               // AddDefense
    IdsTier new_tier = IdsTier::Minimal;  // UpgradeIds
    double delta = 0.0;

    friend bool operator==(const Action&, const Action&) = default;
};

/// Applies changes in order to a copy; the input tree is never mutated.
/// Throws DomainError with E_UNKNOWN_LEAF, E_UNKNOWN_DEFENSE, E_DUP_ADD
/// (defense already present) or E_ABSENT_REMOVE.
AdTree apply_scenario(const AdTree& tree, const Scenario& scenario);

/// Relative improvement 100 * (before - after) / before. A zero baseline
/// yields 0 with the zero_baseline flag set; regressions come out negative.
Improvement improvement_percent(double nu_before, double nu_after);

/// Evaluates the tree before and after the scenario and joins the results
/// per leaf. Propagates apply_scenario errors.
ComparisonReport compare_scenarios(const AdTree& tree, const Scenario& scenario,
                                   AggregationSemantics semantics = AggregationSemantics::WorstPath);

/// Greedy defense prioritization: up to `budget` rounds, each picking the
/// candidate action (attach a missing catalog defense while the leaf count
/// is under 5, or upgrade an IDS tier by one step) with the largest
/// objective reduction. Ties break on smaller leaf id, then defense-add
/// before IDS-upgrade, then smaller defense id. Stops early once no action
/// strictly reduces the objective. Requires budget >= 1.
std::vector<Action> recommend_defenses(const AdTree& tree, int budget, Objective objective,
                                       AggregationSemantics semantics = AggregationSemantics::WorstPath);

}  // namespace adtree
