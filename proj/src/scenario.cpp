#include "adtree/scenario.hpp"

#include <algorithm>
#include <stdexcept>

namespace adtree {

namespace {

constexpr int kCountermeasureCap = 5;

AttackLeaf* find_leaf(Node& node, const std::string& leaf_id) {
    if (node.is_leaf()) {
        return node.leaf().id == leaf_id ? &node.leaf() : nullptr;
    }
    for (Node& child : node.gate().children) {
        if (AttackLeaf* found = find_leaf(child, leaf_id)) {
            return found;
        }
    }
    return nullptr;
}

double objective_value(const TreeEvaluation& evaluation, Objective objective) {
    double value = 0.0;
    for (const LeafScore& score : evaluation.leaves) {
        if (objective == Objective::MaxLeaf) {
            value = std::max(value, score.nu);
        } else {
            value += score.nu;
        }
    }
    return value;
}

int non_ids_defense_count(const AttackLeaf& leaf, const DefenseCatalog& catalog) {
    int count = 0;
    for (const std::string& id : leaf.defenses) {
        if (!is_ids_defense(catalog, id)) {
            ++count;
        }
    }
    return count;
}

struct Candidate {
    Action action;
    double objective_after = 0.0;
};

// Smaller objective first; ties on leaf id, add-before-upgrade, defense id.
bool better_candidate(const Candidate& a, const Candidate& b) {
    if (a.objective_after != b.objective_after) {
        return a.objective_after < b.objective_after;
    }
    if (a.action.leaf_id != b.action.leaf_id) {
        return a.action.leaf_id < b.action.leaf_id;
    }
    if (a.action.kind != b.action.kind) {
        return a.action.kind == ActionKind::AddDefense;
    }
    return a.action.defense_id < b.action.defense_id;
}

}  // namespace

AdTree apply_scenario(const AdTree& tree, const Scenario& scenario) {
    AdTree result = tree;
    for (const Change& change : scenario.changes) {
        AttackLeaf* leaf = find_leaf(result.root, change.leaf_id);
        if (leaf == nullptr) {
            throw DomainError("E_UNKNOWN_LEAF", "scenario '" + scenario.name +
                                                    "' targets unknown leaf '" +
                                                    change.leaf_id + "'");
        }
        switch (change.kind) {
            case ChangeKind::AddDefense: {
                if (!result.catalog.contains(change.defense_id)) {
                    throw DomainError("E_UNKNOWN_DEFENSE",
                                      "scenario '" + scenario.name + "' adds unknown defense '" +
                                          change.defense_id + "'");
                }
                auto it = std::find(leaf->defenses.begin(), leaf->defenses.end(),
                                    change.defense_id);
                if (it != leaf->defenses.end()) {
                    throw DomainError("E_DUP_ADD", "defense '" + change.defense_id +
                                                       "' is already present on leaf '" +
                                                       change.leaf_id + "'");
                }
                leaf->defenses.push_back(change.defense_id);
                break;
            }
            case ChangeKind::RemoveDefense: {
                if (!result.catalog.contains(change.defense_id)) {
                    throw DomainError("E_UNKNOWN_DEFENSE",
                                      "scenario '" + scenario.name +
                                          "' removes unknown defense '" + change.defense_id +
                                          "'");
                }
                auto it = std::find(leaf->defenses.begin(), leaf->defenses.end(),
                                    change.defense_id);
                if (it == leaf->defenses.end()) {
                    throw DomainError("E_ABSENT_REMOVE",
                                      "defense '" + change.defense_id +
                                          "' is not present on leaf '" + change.leaf_id + "'");
                }
                leaf->defenses.erase(it);
                break;
            }
            case ChangeKind::SetIds:
                leaf->ids_tier = change.tier;
                break;
        }
    }
    return result;
}

Improvement improvement_percent(double nu_before, double nu_after) {
    if (nu_before == 0.0) {
        return {0.0, true};
    }
    return {100.0 * (nu_before - nu_after) / nu_before, false};
}

ComparisonReport compare_scenarios(const AdTree& tree, const Scenario& scenario,
                                   AggregationSemantics semantics) {
    AdTree improved = apply_scenario(tree, scenario);
    TreeEvaluation before = evaluate(tree, semantics);
    TreeEvaluation after = evaluate(improved, semantics);

    ComparisonReport report;
    report.semantics = semantics;
    report.root_before = before.root;
    report.root_after = after.root;
    report.rows.reserve(before.leaves.size());
    // Scenarios change leaf attributes only, never structure, so the two
    // evaluations enumerate the same leaves in the same order.
    for (std::size_t i = 0; i < before.leaves.size(); ++i) {
        const LeafScore& b = before.leaves[i];
        const LeafScore& a = after.leaves[i];
        Improvement improvement = improvement_percent(b.nu, a.nu);
        report.rows.push_back(
            {b.leaf_id, b.label, b.nu, a.nu, improvement.percent, improvement.zero_baseline});
    }
    return report;
}

std::vector<Action> recommend_defenses(const AdTree& tree, int budget, Objective objective,
                                       AggregationSemantics semantics) {
    if (budget < 1) {
        throw std::invalid_argument("recommend_defenses: budget must be at least 1");
    }
    std::vector<Action> actions;
    AdTree current = tree;
    double current_objective = objective_value(evaluate(current, semantics), objective);

    for (int round = 0; round < budget; ++round) {
        std::optional<Candidate> best;
        for (const AttackLeaf* leaf : leaves_of(current)) {
            if (non_ids_defense_count(*leaf, current.catalog) < kCountermeasureCap) {
                for (const Defense& defense : current.catalog.entries) {
                    if (std::find(leaf->defenses.begin(), leaf->defenses.end(), defense.id) !=
                        leaf->defenses.end()) {
                        continue;
                    }
                    Action action{leaf->id, ActionKind::AddDefense, defense.id, IdsTier::Minimal,
                                  0.0};
                    Scenario step{"", {{ChangeKind::AddDefense, leaf->id, defense.id, {}}}};
                    double after = objective_value(
                        evaluate(apply_scenario(current, step), semantics), objective);
                    Candidate candidate{action, after};
                    if (!best || better_candidate(candidate, *best)) {
                        best = candidate;
                    }
                }
            }
            if (std::optional<IdsTier> upgraded = next_ids_tier(leaf->ids_tier)) {
                Action action{leaf->id, ActionKind::UpgradeIds, "", *upgraded, 0.0};
                Scenario step{"", {{ChangeKind::SetIds, leaf->id, "", *upgraded}}};
                double after = objective_value(
                    evaluate(apply_scenario(current, step), semantics), objective);
                Candidate candidate{action, after};
                if (!best || better_candidate(candidate, *best)) {
                    best = candidate;
                }
            }
        }
        if (!best || best->objective_after >= current_objective) {
            break;
        }
        best->action.delta = best->objective_after - current_objective;
        Scenario step{"", {}};
        if (best->action.kind == ActionKind::AddDefense) {
            step.changes.push_back(
                {ChangeKind::AddDefense, best->action.leaf_id, best->action.defense_id, {}});
        } else {
            step.changes.push_back(
                {ChangeKind::SetIds, best->action.leaf_id, "", best->action.new_tier});
        }
        current = apply_scenario(current, step);
        current_objective = best->objective_after;
        actions.push_back(best->action);
    }
    return actions;
}

}  // namespace adtree
