#include "adtree/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace adtree {

namespace {

constexpr std::size_t kCountermeasureCap = 5;

std::string lowercased(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

const Defense* DefenseCatalog::find(std::string_view id) const {
    for (const Defense& d : entries) {
        if (d.id == id) {
            return &d;
        }
    }
    return nullptr;
}

std::optional<std::size_t> DefenseCatalog::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::string_view ids_tier_name(IdsTier tier) {
    switch (tier) {
        case IdsTier::Absent: return "absent";
        case IdsTier::Minimal: return "minimal";
        case IdsTier::Standard: return "standard";
        case IdsTier::Enhanced: return "enhanced";
    }
    return "absent";
}

std::optional<IdsTier> parse_ids_tier(std::string_view name) {
    if (name == "absent") return IdsTier::Absent;
    if (name == "minimal") return IdsTier::Minimal;
    if (name == "standard") return IdsTier::Standard;
    if (name == "enhanced") return IdsTier::Enhanced;
    return std::nullopt;
}

std::optional<IdsTier> next_ids_tier(IdsTier tier) {
    switch (tier) {
        case IdsTier::Absent: return IdsTier::Minimal;
        case IdsTier::Minimal: return IdsTier::Standard;
        case IdsTier::Standard: return IdsTier::Enhanced;
        case IdsTier::Enhanced: return std::nullopt;
    }
    return std::nullopt;
}

std::string_view gate_kind_name(GateKind kind) {
    return kind == GateKind::And ? "and" : "or";
}

bool operator==(const AttackLeaf& a, const AttackLeaf& b) {
    if (a.id != b.id || a.label != b.label || a.ids_tier != b.ids_tier) {
        return false;
    }
    std::vector<std::string> da = a.defenses;
    std::vector<std::string> db = b.defenses;
    std::sort(da.begin(), da.end());
    std::sort(db.begin(), db.end());
    return da == db;
}

bool operator==(const GateNode& a, const GateNode& b) {
    return a.kind == b.kind && a.label == b.label && a.children == b.children;
}

bool operator==(const Node& a, const Node& b) {
    return a.value == b.value;
}

bool operator==(const AdTree& a, const AdTree& b) {
    return a.name == b.name && a.catalog == b.catalog && a.root == b.root;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool is_ids_defense(const DefenseCatalog& catalog, std::string_view defense_id) {
    const Defense* d = catalog.find(defense_id);
    if (d == nullptr) {
        return false;
    }
    return lowercased(d->description).find("intrusion detection") != std::string::npos;
}

bool is_valid_identifier(std::string_view text) {
    if (text.empty() || !std::isalpha(static_cast<unsigned char>(text.front()))) {
        return false;
    }
    return std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

DefenseCatalog builtin_catalog() {
    return DefenseCatalog{{
        {"d1", "Cryptographic solutions"},
        {"d2", "Intrusion detection systems"},
        {"d3", "Access-control gateway"},
        {"d4", "Secure boot and code verification"},
        {"d5", "Hardware-based protection"},
        {"d6", "Secure software stack"},
        {"d7", "CVE scanning"},
        {"d8", "Actuator command plausibility checks"},
        {"d9", "Anti-malware software"},
        {"d10", "Input sanitization"},
        {"d11", "Redundant inference"},
        {"d12", "Public key infrastructure"},
    }};
}

namespace {

struct TreeValidator {
    const AdTree& tree;
    std::vector<Diagnostic> diagnostics;
    std::unordered_set<std::string> seen_leaf_ids;

    void error(std::string code, std::string message, std::string location) {
        diagnostics.push_back({Severity::Error, std::move(code), std::move(message),
                               std::move(location), std::nullopt});
    }

    void warning(std::string code, std::string message, std::string location) {
        diagnostics.push_back({Severity::Warning, std::move(code), std::move(message),
                               std::move(location), std::nullopt});
    }

    void check_catalog() {
        std::unordered_set<std::string> seen;
        for (const Defense& d : tree.catalog.entries) {
            if (!is_valid_identifier(d.id)) {
                error("E_BAD_ID", "defense id '" + d.id + "' is not a valid identifier", d.id);
            }
            if (!seen.insert(d.id).second) {
                error("E_DUP_ID", "duplicate defense id '" + d.id + "' in catalog", d.id);
            }
        }
    }

    void check_leaf(const AttackLeaf& leaf) {
        if (!is_valid_identifier(leaf.id)) {
            error("E_BAD_ID", "leaf id '" + leaf.id + "' is not a valid identifier", leaf.id);
        }
        if (!seen_leaf_ids.insert(leaf.id).second) {
            error("E_DUP_ID", "duplicate leaf id '" + leaf.id + "'", leaf.id);
        }
        std::set<std::string> distinct;
        std::size_t countermeasures = 0;
        for (const std::string& defense_id : leaf.defenses) {
            if (!distinct.insert(defense_id).second) {
                error("E_DUP_ID", "defense '" + defense_id + "' listed twice on leaf '" +
                                      leaf.id + "'",
                      leaf.id);
                continue;
            }
            if (!tree.catalog.contains(defense_id)) {
                error("E_UNKNOWN_DEFENSE", "leaf '" + leaf.id + "' references unknown defense '" +
                                               defense_id + "'",
                      leaf.id);
                continue;
            }
            if (is_ids_defense(tree.catalog, defense_id)) {
                warning("W_IDS_AS_DEFENSE",
                        "defense '" + defense_id + "' on leaf '" + leaf.id +
                            "' is an intrusion detection system; use the ids tier instead",
                        leaf.id);
            } else {
                ++countermeasures;
            }
        }
        if (countermeasures > kCountermeasureCap) {
            warning("W_NCAP", "leaf '" + leaf.id + "' has " + std::to_string(countermeasures) +
                                  " countermeasures; scoring clamps the count at " +
                                  std::to_string(kCountermeasureCap),
                    leaf.id);
        }
    }

    void check_node(const Node& node) {
        if (node.is_leaf()) {
            check_leaf(node.leaf());
            return;
        }
        const GateNode& gate = node.gate();
        if (gate.children.empty()) {
            error("E_EMPTY_GATE", "gate '" + gate.label + "' has no children", gate.label);
            return;
        }
        for (const Node& child : gate.children) {
            check_node(child);
        }
    }
};

void collect_leaves(const Node& node, std::vector<const AttackLeaf*>& out) {
    if (node.is_leaf()) {
        out.push_back(&node.leaf());
        return;
    }
    for (const Node& child : node.gate().children) {
        collect_leaves(child, out);
    }
}

}  // namespace

std::vector<Diagnostic> validate_tree(const AdTree& tree) {
    TreeValidator v{tree, {}, {}};
    v.check_catalog();
    v.check_node(tree.root);
    return std::move(v.diagnostics);
}

std::vector<const AttackLeaf*> leaves_of(const AdTree& tree) {
    std::vector<const AttackLeaf*> out;
    collect_leaves(tree.root, out);
    return out;
}

}  // namespace adtree
