#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adtree/model.hpp"
#include "adtree/scenario.hpp"

namespace adtree {

/// One parsed `.adt` document: the tree (with its catalog) plus any number
/// of named scenarios, in document order.
struct Document {
    AdTree tree;
    std::vector<Scenario> scenarios;

    const Scenario* find_scenario(std::string_view name) const;
};

bool operator==(const Document& a, const Document& b);

struct ParseResult {
    // Engaged only when diagnostics contain no errors.
    std::optional<Document> document;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return document.has_value(); }
};

/// Parses UTF-8 source text. Deterministic; unknown keys and constructs are
/// errors, never ignored. Error diagnostics carry the code (E_SYNTAX,
/// E_DUP_ID, E_UNKNOWN_DEFENSE, E_UNKNOWN_LEAF, E_BAD_TIER) and a source
/// span covering the offending token. Accepts LF or CRLF line endings.
ParseResult parse_document(std::string_view text);

/// Document-level invariants for programmatically built documents: the tree
/// invariants plus unique scenario names and resolvable scenario targets.
/// parse_document enforces the same rules with source spans.
std::vector<Diagnostic> validate_document(const Document& doc);

/// Canonical text form: two-space indentation, one construct per line, leaf
/// defenses sorted by catalog order, LF line endings. Re-parsing the output
/// reproduces the document; serializing again is byte-identical.
std::string serialize_document(const Document& doc);

}  // namespace adtree
