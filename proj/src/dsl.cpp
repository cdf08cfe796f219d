#include "adtree/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace adtree {

namespace {

constexpr std::size_t kCountermeasureCap = 5;
// Bounds parser recursion so hostile input cannot exhaust the stack.
constexpr int kMaxNestingDepth = 200;

const std::unordered_set<std::string_view> kKeywords = {
    "defense", "tree", "and", "or", "leaf", "defenses", "ids", "scenario",
    "add", "to", "remove", "from", "set-ids",
    "absent", "minimal", "standard", "enhanced",
};

enum class TokenKind { Word, String, LBrace, RBrace, LBracket, RBracket, Colon, Comma, End };

std::string_view token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Word: return "word";
        case TokenKind::String: return "string";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Colon: return "':'";
        case TokenKind::Comma: return "','";
        case TokenKind::End: return "end of input";
    }
    return "token";
}

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // word text or decoded string value
    SourceSpan span;
};

std::string describe(const Token& token) {
    if (token.kind == TokenKind::Word) {
        return "'" + token.text + "'";
    }
    return std::string(token_kind_name(token.kind));
}

struct LexResult {
    std::vector<Token> tokens;
    std::optional<Diagnostic> error;
};

LexResult lex(std::string_view text) {
    LexResult result;
    std::size_t i = 0;
    int line = 1;
    int column = 1;

    auto here = [&]() { return SourceSpan{line, column, i}; };
    auto fail = [&](SourceSpan span, const std::string& message) {
        result.error = Diagnostic{Severity::Error, "E_SYNTAX", message, "", span};
    };
    auto advance = [&]() {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++i;
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance();
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') {
                advance();
            }
            continue;
        }
        SourceSpan span = here();
        if (c == '{' || c == '}' || c == '[' || c == ']' || c == ':' || c == ',') {
            TokenKind kind = c == '{'   ? TokenKind::LBrace
                             : c == '}' ? TokenKind::RBrace
                             : c == '[' ? TokenKind::LBracket
                             : c == ']' ? TokenKind::RBracket
                             : c == ':' ? TokenKind::Colon
                                        : TokenKind::Comma;
            result.tokens.push_back({kind, std::string(1, c), span});
            advance();
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string word;
            while (i < text.size()) {
                char w = text[i];
                if (std::isalnum(static_cast<unsigned char>(w)) || w == '_' || w == '-') {
                    word.push_back(w);
                    advance();
                } else {
                    break;
                }
            }
            result.tokens.push_back({TokenKind::Word, std::move(word), span});
            continue;
        }
        if (c == '"') {
            advance();  // opening quote
            std::string value;
            bool closed = false;
            while (i < text.size()) {
                char s = text[i];
                if (s == '"') {
                    advance();
                    closed = true;
                    break;
                }
                if (s == '\n' || s == '\r') {
                    break;
                }
                if (s == '\\') {
                    advance();
                    if (i >= text.size() || (text[i] != '"' && text[i] != '\\')) {
                        fail(here(), "invalid escape in string; only \\\" and \\\\ are allowed");
                        return result;
                    }
                    value.push_back(text[i]);
                    advance();
                    continue;
                }
                value.push_back(s);
                advance();
            }
            if (!closed) {
                fail(span, "unterminated string");
                return result;
            }
            result.tokens.push_back({TokenKind::String, std::move(value), span});
            continue;
        }
        fail(span, std::string("unexpected character '") + c + "'");
        return result;
    }
    result.tokens.push_back({TokenKind::End, "", here()});
    return result;
}

// Unwinds the recursive descent after an unrecoverable syntax error.
struct ParseAbort {};

struct LeafSpans {
    SourceSpan id;
    std::vector<SourceSpan> defenses;
};

struct ChangeSpans {
    SourceSpan leaf;
    SourceSpan defense;
};

struct ScenarioSpans {
    SourceSpan name;
    std::vector<ChangeSpans> changes;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ParseResult run() {
        ParseResult result;
        Document doc;
        try {
            parse_catalog(doc);
            parse_tree(doc);
            parse_scenarios(doc);
            if (peek().kind != TokenKind::End) {
                syntax_error(peek(), "expected 'scenario' or end of input, got " +
                                         describe(peek()));
            }
        } catch (const ParseAbort&) {
            result.diagnostics = std::move(diagnostics_);
            return result;
        }
        check_references(doc);
        bool failed = has_errors(diagnostics_);
        result.diagnostics = std::move(diagnostics_);
        if (!failed) {
            result.document = std::move(doc);
        }
        return result;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }

    const Token& take() { return tokens_[pos_++]; }

    bool at_word(std::string_view word) const {
        return peek().kind == TokenKind::Word && peek().text == word;
    }

    [[noreturn]] void syntax_error(const Token& token, const std::string& message) {
        diagnostics_.push_back({Severity::Error, "E_SYNTAX", message, "", token.span});
        throw ParseAbort{};
    }

    void error_at(const std::string& code, const SourceSpan& span, const std::string& message,
                  const std::string& location = "") {
        diagnostics_.push_back({Severity::Error, code, message, location, span});
    }

    void warning_at(const std::string& code, const SourceSpan& span, const std::string& message,
                    const std::string& location = "") {
        diagnostics_.push_back({Severity::Warning, code, message, location, span});
    }

    const Token& expect(TokenKind kind, const std::string& what) {
        if (peek().kind != kind) {
            syntax_error(peek(), "expected " + what + ", got " + describe(peek()));
        }
        return take();
    }

    const Token& expect_keyword(std::string_view word) {
        if (!at_word(word)) {
            syntax_error(peek(), "expected '" + std::string(word) + "', got " + describe(peek()));
        }
        return take();
    }

    const Token& expect_identifier(const std::string& what) {
        if (peek().kind != TokenKind::Word) {
            syntax_error(peek(), "expected " + what + ", got " + describe(peek()));
        }
        if (kKeywords.count(peek().text) != 0) {
            syntax_error(peek(), "expected " + what + ", got keyword '" + peek().text + "'");
        }
        if (!is_valid_identifier(peek().text)) {
            syntax_error(peek(), "'" + peek().text + "' is not a valid " + what);
        }
        return take();
    }

    IdsTier parse_tier() {
        if (peek().kind != TokenKind::Word) {
            syntax_error(peek(), "expected an ids tier, got " + describe(peek()));
        }
        const Token& token = take();
        if (std::optional<IdsTier> tier = parse_ids_tier(token.text)) {
            return *tier;
        }
        error_at("E_BAD_TIER", token.span,
                 "unknown ids tier '" + token.text +
                     "'; expected absent, minimal, standard or enhanced");
        return IdsTier::Absent;
    }

    void parse_catalog(Document& doc) {
        while (at_word("defense")) {
            take();
            const Token& id = expect_identifier("defense id");
            const Token& description = expect(TokenKind::String, "defense description string");
            doc.tree.catalog.entries.push_back({id.text, description.text});
            catalog_spans_.push_back(id.span);
        }
    }

    void parse_tree(Document& doc) {
        if (!at_word("tree")) {
            syntax_error(peek(), "expected 'tree', got " + describe(peek()));
        }
        take();
        const Token& name = expect(TokenKind::String, "tree name string");
        doc.tree.name = name.text;
        expect(TokenKind::LBrace, "'{'");
        doc.tree.root = parse_node(0);
        expect(TokenKind::RBrace, "'}'");
    }

    Node parse_node(int depth) {
        if (depth > kMaxNestingDepth) {
            syntax_error(peek(), "gate nesting exceeds the depth limit of " +
                                     std::to_string(kMaxNestingDepth));
        }
        if (at_word("and") || at_word("or")) {
            GateKind kind = peek().text == "and" ? GateKind::And : GateKind::Or;
            take();
            GateNode gate;
            gate.kind = kind;
            gate.label = expect(TokenKind::String, "gate label string").text;
            expect(TokenKind::LBrace, "'{'");
            do {
                gate.children.push_back(parse_node(depth + 1));
            } while (peek().kind != TokenKind::RBrace);
            take();  // '}'
            return Node{std::move(gate)};
        }
        if (at_word("leaf")) {
            take();
            return Node{parse_leaf()};
        }
        syntax_error(peek(), "expected 'and', 'or' or 'leaf', got " + describe(peek()));
    }

    AttackLeaf parse_leaf() {
        AttackLeaf leaf;
        LeafSpans spans;
        const Token& id = expect_identifier("leaf id");
        leaf.id = id.text;
        spans.id = id.span;
        leaf.label = expect(TokenKind::String, "leaf label string").text;
        expect(TokenKind::LBrace, "'{'");
        if (at_word("defenses")) {
            take();
            expect(TokenKind::Colon, "':'");
            expect(TokenKind::LBracket, "'['");
            if (peek().kind != TokenKind::RBracket) {
                while (true) {
                    const Token& ref = expect_identifier("defense id");
                    leaf.defenses.push_back(ref.text);
                    spans.defenses.push_back(ref.span);
                    if (peek().kind == TokenKind::Comma) {
                        take();
                        continue;
                    }
                    break;
                }
            }
            expect(TokenKind::RBracket, "']'");
        }
        if (at_word("ids")) {
            take();
            expect(TokenKind::Colon, "':'");
            leaf.ids_tier = parse_tier();
        }
        expect(TokenKind::RBrace, "'}'");
        leaf_spans_.push_back(std::move(spans));
        return leaf;
    }

    void parse_scenarios(Document& doc) {
        while (at_word("scenario")) {
            take();
            Scenario scenario;
            ScenarioSpans spans;
            const Token& name = expect(TokenKind::String, "scenario name string");
            scenario.name = name.text;
            spans.name = name.span;
            expect(TokenKind::LBrace, "'{'");
            while (peek().kind != TokenKind::RBrace) {
                scenario.changes.push_back(parse_change(spans));
            }
            take();  // '}'
            doc.scenarios.push_back(std::move(scenario));
            scenario_spans_.push_back(std::move(spans));
        }
    }

    Change parse_change(ScenarioSpans& spans) {
        Change change;
        ChangeSpans change_spans;
        if (at_word("add")) {
            take();
            change.kind = ChangeKind::AddDefense;
            const Token& defense = expect_identifier("defense id");
            change.defense_id = defense.text;
            change_spans.defense = defense.span;
            expect_keyword("to");
            const Token& leaf = expect_identifier("leaf id");
            change.leaf_id = leaf.text;
            change_spans.leaf = leaf.span;
        } else if (at_word("remove")) {
            take();
            change.kind = ChangeKind::RemoveDefense;
            const Token& defense = expect_identifier("defense id");
            change.defense_id = defense.text;
            change_spans.defense = defense.span;
            expect_keyword("from");
            const Token& leaf = expect_identifier("leaf id");
            change.leaf_id = leaf.text;
            change_spans.leaf = leaf.span;
        } else if (at_word("set-ids")) {
            take();
            change.kind = ChangeKind::SetIds;
            const Token& leaf = expect_identifier("leaf id");
            change.leaf_id = leaf.text;
            change_spans.leaf = leaf.span;
            change.tier = parse_tier();
        } else {
            syntax_error(peek(),
                         "expected 'add', 'remove', 'set-ids' or '}', got " + describe(peek()));
        }
        spans.changes.push_back(change_spans);
        return change;
    }

    // Reference and uniqueness checks, with spans recorded during parsing.
    // Mirrors validate_tree / validate_document for parsed input.
    void check_references(const Document& doc) {
        const DefenseCatalog& catalog = doc.tree.catalog;
        std::unordered_set<std::string> catalog_ids;
        for (std::size_t i = 0; i < catalog.entries.size(); ++i) {
            const std::string& id = catalog.entries[i].id;
            if (!catalog_ids.insert(id).second) {
                error_at("E_DUP_ID", catalog_spans_[i],
                         "duplicate defense id '" + id + "' in catalog", id);
            }
        }

        std::vector<const AttackLeaf*> leaves = leaves_of(doc.tree);
        std::unordered_set<std::string> leaf_ids;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            const AttackLeaf& leaf = *leaves[i];
            const LeafSpans& spans = leaf_spans_[i];
            if (!leaf_ids.insert(leaf.id).second) {
                error_at("E_DUP_ID", spans.id, "duplicate leaf id '" + leaf.id + "'", leaf.id);
            }
            std::set<std::string> seen;
            std::size_t countermeasures = 0;
            for (std::size_t j = 0; j < leaf.defenses.size(); ++j) {
                const std::string& defense_id = leaf.defenses[j];
                const SourceSpan& span = spans.defenses[j];
                if (!seen.insert(defense_id).second) {
                    error_at("E_DUP_ID", span,
                             "defense '" + defense_id + "' listed twice on leaf '" + leaf.id + "'",
                             leaf.id);
                    continue;
                }
                if (!catalog.contains(defense_id)) {
                    error_at("E_UNKNOWN_DEFENSE", span,
                             "leaf '" + leaf.id + "' references unknown defense '" + defense_id +
                                 "'",
                             leaf.id);
                    continue;
                }
                if (is_ids_defense(catalog, defense_id)) {
                    warning_at("W_IDS_AS_DEFENSE", span,
                               "defense '" + defense_id + "' on leaf '" + leaf.id +
                                   "' is an intrusion detection system; use the ids tier instead",
                               leaf.id);
                } else {
                    ++countermeasures;
                }
            }
            if (countermeasures > kCountermeasureCap) {
                warning_at("W_NCAP", spans.id,
                           "leaf '" + leaf.id + "' has " + std::to_string(countermeasures) +
                               " countermeasures; scoring clamps the count at " +
                               std::to_string(kCountermeasureCap),
                           leaf.id);
            }
        }

        std::unordered_set<std::string> scenario_names;
        for (std::size_t i = 0; i < doc.scenarios.size(); ++i) {
            const Scenario& scenario = doc.scenarios[i];
            const ScenarioSpans& spans = scenario_spans_[i];
            if (!scenario_names.insert(scenario.name).second) {
                error_at("E_DUP_ID", spans.name,
                         "duplicate scenario name \"" + scenario.name + "\"", scenario.name);
            }
            for (std::size_t j = 0; j < scenario.changes.size(); ++j) {
                const Change& change = scenario.changes[j];
                const ChangeSpans& change_spans = spans.changes[j];
                if (leaf_ids.count(change.leaf_id) == 0) {
                    error_at("E_UNKNOWN_LEAF", change_spans.leaf,
                             "scenario \"" + scenario.name + "\" targets unknown leaf '" +
                                 change.leaf_id + "'",
                             change.leaf_id);
                }
                if (change.kind != ChangeKind::SetIds && !catalog.contains(change.defense_id)) {
                    error_at("E_UNKNOWN_DEFENSE", change_spans.defense,
                             "scenario \"" + scenario.name + "\" references unknown defense '" +
                                 change.defense_id + "'",
                             change.defense_id);
                }
            }
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic> diagnostics_;
    std::vector<SourceSpan> catalog_spans_;
    std::vector<LeafSpans> leaf_spans_;   // pre-order, parallel to leaves_of
    std::vector<ScenarioSpans> scenario_spans_;
};

std::string quoted(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Leaf defenses in catalog order; ids missing from the catalog (only
// possible in hand-built documents) sort after, by id.
std::vector<std::string> catalog_sorted(const std::vector<std::string>& defenses,
                                        const DefenseCatalog& catalog) {
    std::vector<std::string> out = defenses;
    std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        auto ia = catalog.index_of(a);
        auto ib = catalog.index_of(b);
        if (ia.has_value() != ib.has_value()) {
            return ia.has_value();
        }
        if (ia && ib && *ia != *ib) {
            return *ia < *ib;
        }
        return a < b;
    });
    return out;
}

void write_node(const Node& node, const DefenseCatalog& catalog, int depth, std::string& out) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    if (node.is_leaf()) {
        const AttackLeaf& leaf = node.leaf();
        out += indent + "leaf " + leaf.id + " " + quoted(leaf.label) + " {";
        std::string body;
        if (!leaf.defenses.empty()) {
            std::vector<std::string> sorted = catalog_sorted(leaf.defenses, catalog);
            body += "defenses: [";
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                if (i > 0) {
                    body += ", ";
                }
                body += sorted[i];
            }
            body += "]";
        }
        if (leaf.ids_tier != IdsTier::Absent) {
            if (!body.empty()) {
                body += " ";
            }
            body += "ids: ";
            body += ids_tier_name(leaf.ids_tier);
        }
        if (body.empty()) {
            out += "}\n";
        } else {
            out += " " + body + " }\n";
        }
        return;
    }
    const GateNode& gate = node.gate();
    out += indent + std::string(gate_kind_name(gate.kind)) + " " + quoted(gate.label) + " {\n";
    for (const Node& child : gate.children) {
        write_node(child, catalog, depth + 1, out);
    }
    out += indent + "}\n";
}

}  // namespace

const Scenario* Document::find_scenario(std::string_view name) const {
    for (const Scenario& scenario : scenarios) {
        if (scenario.name == name) {
            return &scenario;
        }
    }
    return nullptr;
}

bool operator==(const Document& a, const Document& b) {
    return a.tree == b.tree && a.scenarios == b.scenarios;
}

ParseResult parse_document(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }
    LexResult lexed = lex(text);
    if (lexed.error) {
        ParseResult result;
        result.diagnostics.push_back(*lexed.error);
        return result;
    }
    Parser parser(std::move(lexed.tokens));
    return parser.run();
}

std::vector<Diagnostic> validate_document(const Document& doc) {
    std::vector<Diagnostic> diagnostics = validate_tree(doc.tree);

    std::unordered_set<std::string> leaf_ids;
    for (const AttackLeaf* leaf : leaves_of(doc.tree)) {
        leaf_ids.insert(leaf->id);
    }
    std::unordered_set<std::string> names;
    for (const Scenario& scenario : doc.scenarios) {
        if (!names.insert(scenario.name).second) {
            diagnostics.push_back({Severity::Error, "E_DUP_ID",
                                   "duplicate scenario name \"" + scenario.name + "\"",
                                   scenario.name, std::nullopt});
        }
        for (const Change& change : scenario.changes) {
            if (leaf_ids.count(change.leaf_id) == 0) {
                diagnostics.push_back({Severity::Error, "E_UNKNOWN_LEAF",
                                       "scenario \"" + scenario.name +
                                           "\" targets unknown leaf '" + change.leaf_id + "'",
                                       change.leaf_id, std::nullopt});
            }
            if (change.kind != ChangeKind::SetIds &&
                !doc.tree.catalog.contains(change.defense_id)) {
                diagnostics.push_back({Severity::Error, "E_UNKNOWN_DEFENSE",
                                       "scenario \"" + scenario.name +
                                           "\" references unknown defense '" + change.defense_id +
                                           "'",
                                       change.defense_id, std::nullopt});
            }
        }
    }
    return diagnostics;
}

std::string serialize_document(const Document& doc) {
    std::string out;
    for (const Defense& defense : doc.tree.catalog.entries) {
        out += "defense " + defense.id + " " + quoted(defense.description) + "\n";
    }
    if (!doc.tree.catalog.entries.empty()) {
        out += "\n";
    }
    out += "tree " + quoted(doc.tree.name) + " {\n";
    write_node(doc.tree.root, doc.tree.catalog, 1, out);
    out += "}\n";
    for (const Scenario& scenario : doc.scenarios) {
        out += "\nscenario " + quoted(scenario.name) + " {";
        if (scenario.changes.empty()) {
            out += "}\n";
            continue;
        }
        out += "\n";
        for (const Change& change : scenario.changes) {
            switch (change.kind) {
                case ChangeKind::AddDefense:
                    out += "  add " + change.defense_id + " to " + change.leaf_id + "\n";
                    break;
                case ChangeKind::RemoveDefense:
                    out += "  remove " + change.defense_id + " from " + change.leaf_id + "\n";
                    break;
                case ChangeKind::SetIds:
                    out += "  set-ids " + change.leaf_id + " " +
                           std::string(ids_tier_name(change.tier)) + "\n";
                    break;
            }
        }
        out += "}\n";
    }
    return out;
}

}  // namespace adtree
