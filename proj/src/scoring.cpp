#include "adtree/scoring.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace adtree {

namespace {

constexpr int kCountermeasureCap = 5;

double combine(GateKind kind, AggregationSemantics semantics, const std::vector<double>& values) {
    if (semantics == AggregationSemantics::WorstPath) {
        if (kind == GateKind::Or) {
            return *std::max_element(values.begin(), values.end());
        }
        return *std::min_element(values.begin(), values.end());
    }
    if (kind == GateKind::Or) {
        double miss_all = 1.0;
        for (double v : values) {
            miss_all *= 1.0 - v;
        }
        return 1.0 - miss_all;
    }
    double hit_all = 1.0;
    for (double v : values) {
        hit_all *= v;
    }
    return hit_all;
}

double eval_node(const Node& node, const DefenseCatalog& catalog,
                 AggregationSemantics semantics, TreeEvaluation& out) {
    if (node.is_leaf()) {
        LeafScore score = score_leaf(node.leaf(), catalog);
        out.leaves.push_back(score);
        return score.nu;
    }
    const GateNode& gate = node.gate();
    std::size_t slot = out.gates.size();
    out.gates.push_back({gate.label, gate.kind, 0.0});
    std::vector<double> child_values;
    child_values.reserve(gate.children.size());
    for (const Node& child : gate.children) {
        child_values.push_back(eval_node(child, catalog, semantics, out));
    }
    double value = combine(gate.kind, semantics, child_values);
    out.gates[slot].value = value;
    return value;
}

}  // namespace

double alpha_weight(int n) {
    if (n < 0 || n > kCountermeasureCap) {
        throw std::invalid_argument("alpha_weight: count " + std::to_string(n) +
                                    " outside [0, 5]");
    }
    if (n == 0) {
        return 1.0;
    }
    return n >= 3 ? 0.0 : 0.5;
}

double beta_weight(IdsTier tier) {
    switch (tier) {
        case IdsTier::Absent: return 1.0;
        case IdsTier::Minimal: return 0.67;
        case IdsTier::Standard: return 0.33;
        case IdsTier::Enhanced: return 0.0;
    }
    return 1.0;
}

double leaf_vulnerability(int countermeasures, IdsTier tier) {
    if (countermeasures < 0) {
        throw std::invalid_argument("leaf_vulnerability: negative countermeasure count");
    }
    int n = std::min(countermeasures, kCountermeasureCap);
    double alpha = alpha_weight(n);
    double beta = beta_weight(tier);
    double coverage_gap = 1.0 - static_cast<double>(n) / kCountermeasureCap;
    if (alpha > 0.0) {
        return alpha * std::max(coverage_gap, beta);
    }
    return std::max(coverage_gap, beta) / 3.0;
}

LeafScore score_leaf(const AttackLeaf& leaf, const DefenseCatalog& catalog) {
    std::set<std::string> distinct(leaf.defenses.begin(), leaf.defenses.end());
    int countermeasures = 0;
    for (const std::string& id : distinct) {
        if (!is_ids_defense(catalog, id)) {
            ++countermeasures;
        }
    }
    int n = std::min(countermeasures, kCountermeasureCap);
    LeafScore score;
    score.leaf_id = leaf.id;
    score.label = leaf.label;
    score.n = n;
    score.alpha = alpha_weight(n);
    score.beta = beta_weight(leaf.ids_tier);
    score.nu = leaf_vulnerability(countermeasures, leaf.ids_tier);
    return score;
}

TreeEvaluation evaluate(const AdTree& tree, AggregationSemantics semantics) {
    std::vector<Diagnostic> diagnostics = validate_tree(tree);
    if (has_errors(diagnostics)) {
        for (const Diagnostic& d : diagnostics) {
            if (d.severity == Severity::Error) {
                throw DomainError("E_INVALID_TREE", "tree failed validation: " + d.message);
            }
        }
    }
    TreeEvaluation out;
    out.semantics = semantics;
    out.root = eval_node(tree.root, tree.catalog, semantics, out);
    return out;
}

}  // namespace adtree
