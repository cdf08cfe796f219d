#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adtree {

/// Error for operations that cannot return diagnostics (scenario application,
/// evaluation of an invalid tree, rendering). Carries a short machine code
/// such as "E_UNKNOWN_LEAF" next to the human-readable message.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct Defense {
    std::string id;           // identifier, e.g. "d1"
    std::string description;  // human-readable text

    friend bool operator==(const Defense&, const Defense&) = default;
};

/// Ordered collection of defenses. Uniqueness of ids is a validation rule,
/// not a construction-time constraint.
struct DefenseCatalog {
    std::vector<Defense> entries;

    const Defense* find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }
    std::optional<std::size_t> index_of(std::string_view id) const;
    std::size_t size() const { return entries.size(); }

    friend bool operator==(const DefenseCatalog&, const DefenseCatalog&) = default;
};

/// Intrusion-detection capability attached to a leaf, ordered by increasing
/// strength. Modeled as a single attribute, separate from the countermeasure
/// set, because detection is weighted independently of coverage.
enum class IdsTier { Absent, Minimal, Standard, Enhanced };

std::string_view ids_tier_name(IdsTier tier);
std::optional<IdsTier> parse_ids_tier(std::string_view name);

/// The next stronger tier, or nullopt for Enhanced.
std::optional<IdsTier> next_ids_tier(IdsTier tier);

struct AttackLeaf {
    std::string id;
    std::string label;
    std::vector<std::string> defenses;  // defense ids; a set, kept in document order
    IdsTier ids_tier = IdsTier::Absent;
};

// Defenses compare as a set: order is presentation detail, duplicates are
// validation errors.
bool operator==(const AttackLeaf& a, const AttackLeaf& b);

enum class GateKind { And, Or };

std::string_view gate_kind_name(GateKind kind);

struct Node;

struct GateNode {
    GateKind kind = GateKind::Or;
    std::string label;
    std::vector<Node> children;  // ordered, non-empty for valid trees
};

/// One tree node: a gate over children or an attack leaf. Value semantics
/// make cycles unrepresentable and copies independent.
struct Node {
    std::variant<GateNode, AttackLeaf> value;

    bool is_leaf() const { return std::holds_alternative<AttackLeaf>(value); }
    const AttackLeaf& leaf() const { return std::get<AttackLeaf>(value); }
    AttackLeaf& leaf() { return std::get<AttackLeaf>(value); }
    const GateNode& gate() const { return std::get<GateNode>(value); }
    GateNode& gate() { return std::get<GateNode>(value); }
};

bool operator==(const GateNode& a, const GateNode& b);
bool operator==(const Node& a, const Node& b);
inline bool operator!=(const Node& a, const Node& b) { return !(a == b); }

struct AdTree {
    std::string name;
    DefenseCatalog catalog;
    Node root{AttackLeaf{}};
};

bool operator==(const AdTree& a, const AdTree& b);

enum class Severity { Warning, Error };

/// Position of a token or construct in DSL source text. Line and column are
/// 1-based; column counts bytes within the line.
struct SourceSpan {
    int line = 0;
    int column = 0;
    std::size_t offset = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// One validation or parse finding. Errors reject the document; warnings
/// never block evaluation.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;      // e.g. "E_UNKNOWN_DEFENSE", "W_NCAP"
    std::string message;
    std::string location;  // node/leaf/defense id when known
    std::optional<SourceSpan> span;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// True when a catalog entry describes an intrusion detection system.
/// Such entries are scored through the IDS tier, not the countermeasure
/// count, so attaching one to a leaf draws W_IDS_AS_DEFENSE.
bool is_ids_defense(const DefenseCatalog& catalog, std::string_view defense_id);

bool is_valid_identifier(std::string_view text);

/// The twelve-entry core countermeasure catalog (d1..d12).
DefenseCatalog builtin_catalog();

/// Checks every structural invariant: identifier syntax, unique leaf and
/// catalog ids, defense references resolving, non-empty gates. Warnings:
/// W_NCAP past the five-countermeasure cap, W_IDS_AS_DEFENSE for IDS entries
/// attached as countermeasures. Pure; never mutates the tree.
std::vector<Diagnostic> validate_tree(const AdTree& tree);

/// All attack leaves in pre-order, left to right. Stable across calls.
std::vector<const AttackLeaf*> leaves_of(const AdTree& tree);

}  // namespace adtree
