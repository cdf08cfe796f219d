#pragma once

#include <vector>

#include "adtree/model.hpp"

namespace adtree {

/// Computed vulnerability quadruple for one leaf. `n` is the clamped count
/// of distinct non-IDS countermeasures; `nu` is always in [0, 1].
struct LeafScore {
    std::string leaf_id;
    std::string label;
    int n = 0;
    double alpha = 1.0;
    double beta = 1.0;
    double nu = 1.0;
};

/// How gates roll leaf values up. WorstPath takes the attacker's view:
/// OR = max of children (easiest branch), AND = min (best-defended mandatory
/// step bounds the path). Probabilistic treats child values as independent
/// success probabilities: OR = 1 - prod(1 - v), AND = prod(v).
enum class AggregationSemantics { WorstPath, Probabilistic };

struct GateValue {
    std::string label;
    GateKind kind = GateKind::Or;
    double value = 0.0;
};

struct TreeEvaluation {
    std::vector<LeafScore> leaves;  // leaves_of order
    std::vector<GateValue> gates;   // pre-order
    double root = 0.0;
    AggregationSemantics semantics = AggregationSemantics::WorstPath;
};

/// Coverage weight by countermeasure count: 0 -> 1.0, 1 or 2 -> 0.5,
/// 3 and up -> 0.0. Requires 0 <= n <= 5; throws std::invalid_argument
/// outside that range.
double alpha_weight(int n);

/// Detection weight by IDS tier: Absent 1.0, Minimal 0.67, Standard 0.33,
/// Enhanced 0.0. The constants are the printed decimals, not exact thirds.
double beta_weight(IdsTier tier);

/// Vulnerability index for one leaf configuration. `countermeasures` is the
/// raw non-IDS count (clamped at 5 internally); throws std::invalid_argument
/// when negative. With a = alpha_weight(min(n,5)) and b = beta_weight(tier):
/// a > 0 gives a * max(1 - n/5, b); a = 0 gives max(1 - n/5, b) / 3.
double leaf_vulnerability(int countermeasures, IdsTier tier);

/// Score one leaf against a catalog. The countermeasure count excludes
/// defenses that are themselves IDS entries.
LeafScore score_leaf(const AttackLeaf& leaf, const DefenseCatalog& catalog);

/// Scores every leaf and rolls values up through the gates. Throws
/// DomainError("E_INVALID_TREE") when the tree has validation errors.
TreeEvaluation evaluate(const AdTree& tree,
                        AggregationSemantics semantics = AggregationSemantics::WorstPath);

}  // namespace adtree
