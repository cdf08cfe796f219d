// Shared test machinery: the independent scoring oracle, random input
// generators, a brute-force tree evaluator, an XML well-formedness scanner,
// and a harness for driving the CLI binary. Everything here stays
// independent of the library code paths it is used to check.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adtree/dsl.hpp"
#include "adtree/model.hpp"
#include "adtree/scenario.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace testsupport {

// ---------------------------------------------------------------------------
// Independent scoring oracle: a literal transcription of the vulnerability
// formula and its two weight tables, kept separate from the library.

inline double oracle_alpha(int n) {
    if (n == 0) return 1.00;
    if (n >= 3) return 0.00;
    return 0.50;
}

inline double oracle_beta(adtree::IdsTier tier) {
    switch (tier) {
        case adtree::IdsTier::Absent: return 1.00;
        case adtree::IdsTier::Minimal: return 0.67;
        case adtree::IdsTier::Standard: return 0.33;
        case adtree::IdsTier::Enhanced: return 0.00;
    }
    return 1.00;
}

inline double oracle_nu(int raw_count, adtree::IdsTier tier) {
    int n = raw_count > 5 ? 5 : raw_count;
    double a = oracle_alpha(n);
    double b = oracle_beta(tier);
    if (a > 0.0) {
        return std::max(a * (1.0 - n / 5.0), a * b);
    }
    return std::max(1.0 - n / 5.0, b) / 3.0;
}

inline const std::vector<adtree::IdsTier>& all_tiers() {
    static const std::vector<adtree::IdsTier> tiers = {
        adtree::IdsTier::Absent, adtree::IdsTier::Minimal, adtree::IdsTier::Standard,
        adtree::IdsTier::Enhanced};
    return tiers;
}

// Brute-force recursive evaluation over a tree whose leaves carry only
// non-IDS defenses (as produced by the generators below).
inline double brute_eval(const adtree::Node& node, bool probabilistic) {
    if (node.is_leaf()) {
        const adtree::AttackLeaf& leaf = node.leaf();
        return oracle_nu(static_cast<int>(leaf.defenses.size()), leaf.ids_tier);
    }
    const adtree::GateNode& gate = node.gate();
    std::vector<double> values;
    values.reserve(gate.children.size());
    for (const adtree::Node& child : gate.children) {
        values.push_back(brute_eval(child, probabilistic));
    }
    if (!probabilistic) {
        if (gate.kind == adtree::GateKind::Or) {
            return *std::max_element(values.begin(), values.end());
        }
        return *std::min_element(values.begin(), values.end());
    }
    if (gate.kind == adtree::GateKind::Or) {
        double p = 1.0;
        for (double v : values) p *= 1.0 - v;
        return 1.0 - p;
    }
    double p = 1.0;
    for (double v : values) p *= v;
    return p;
}

// ---------------------------------------------------------------------------
// Random inputs.

class Gen {
public:
    explicit Gen(unsigned seed) : rng_(seed) {}

    int pick(int lo, int hi) {  // inclusive
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }

    bool coin(double p = 0.5) { return std::uniform_real_distribution<>(0.0, 1.0)(rng_) < p; }

    adtree::IdsTier tier() { return all_tiers()[static_cast<std::size_t>(pick(0, 3))]; }

    // Printable label text, exercising the string escapes and CSV quoting.
    std::string label() {
        static const std::string alphabet =
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
            " ,.:;#{}[]()-_/\\\"'";
        int len = pick(0, 24);
        std::string out;
        for (int i = 0; i < len; ++i) {
            out.push_back(alphabet[static_cast<std::size_t>(
                pick(0, static_cast<int>(alphabet.size()) - 1))]);
        }
        return out;
    }

    // A tree over `catalog_size` synthetic non-IDS defenses, with at most
    // `max_leaves` leaves and gates nested at most `max_depth` deep.
    adtree::AdTree tree(int max_depth, int max_leaves, int catalog_size = 8) {
        adtree::AdTree tree;
        tree.name = "generated";
        for (int i = 1; i <= catalog_size; ++i) {
            tree.catalog.entries.push_back(
                {"c" + std::to_string(i), "Defense " + std::to_string(i)});
        }
        leaf_counter_ = 0;
        int budget = pick(1, max_leaves);
        tree.root = node(max_depth, budget, tree.catalog);
        return tree;
    }

private:
    adtree::Node node(int depth, int leaf_budget, const adtree::DefenseCatalog& catalog) {
        if (depth == 0 || leaf_budget <= 1 || coin(0.35)) {
            return adtree::Node{leaf(catalog)};
        }
        adtree::GateNode gate;
        gate.kind = coin() ? adtree::GateKind::Or : adtree::GateKind::And;
        gate.label = "g" + std::to_string(leaf_counter_);
        int children = pick(2, std::min(3, leaf_budget));
        int remaining = leaf_budget;
        for (int i = 0; i < children; ++i) {
            int slots_left = children - i - 1;
            int share = (i == children - 1) ? remaining : pick(1, remaining - slots_left);
            remaining -= share;
            gate.children.push_back(node(depth - 1, share, catalog));
        }
        return adtree::Node{std::move(gate)};
    }

    adtree::AttackLeaf leaf(const adtree::DefenseCatalog& catalog) {
        adtree::AttackLeaf leaf;
        leaf.id = "L" + std::to_string(++leaf_counter_);
        leaf.label = "leaf " + std::to_string(leaf_counter_);
        leaf.ids_tier = tier();
        int n = pick(0, 5);
        std::vector<std::string> pool;
        for (const adtree::Defense& d : catalog.entries) {
            pool.push_back(d.id);
        }
        std::shuffle(pool.begin(), pool.end(), rng_);
        for (int i = 0; i < n && i < static_cast<int>(pool.size()); ++i) {
            leaf.defenses.push_back(pool[static_cast<std::size_t>(i)]);
        }
        return leaf;
    }

    std::mt19937 rng_;
    int leaf_counter_ = 0;

public:
    // A full document: catalog, tree, and scenarios whose targets resolve.
    adtree::Document document() {
        adtree::Document doc;
        doc.tree = tree(3, 6, pick(1, 6));
        doc.tree.name = label();
        for (adtree::Defense& d : doc.tree.catalog.entries) {
            d.description = label();
        }
        relabel(doc.tree.root);
        std::vector<const adtree::AttackLeaf*> leaves = adtree::leaves_of(doc.tree);
        int scenario_count = pick(0, 3);
        for (int s = 0; s < scenario_count; ++s) {
            adtree::Scenario scenario;
            scenario.name = "s" + std::to_string(s) + " " + label();
            int change_count = pick(0, 4);
            for (int c = 0; c < change_count; ++c) {
                adtree::Change change;
                const adtree::AttackLeaf* target =
                    leaves[static_cast<std::size_t>(pick(0, static_cast<int>(leaves.size()) - 1))];
                change.leaf_id = target->id;
                int kind = pick(0, 2);
                if (kind == 0) {
                    change.kind = adtree::ChangeKind::AddDefense;
                    change.defense_id = random_catalog_id(doc.tree.catalog);
                } else if (kind == 1) {
                    change.kind = adtree::ChangeKind::RemoveDefense;
                    change.defense_id = random_catalog_id(doc.tree.catalog);
                } else {
                    change.kind = adtree::ChangeKind::SetIds;
                    change.tier = tier();
                }
                scenario.changes.push_back(std::move(change));
            }
            doc.scenarios.push_back(std::move(scenario));
        }
        return doc;
    }

private:
    void relabel(adtree::Node& node) {
        if (node.is_leaf()) {
            node.leaf().label = label();
            return;
        }
        node.gate().label = label();
        for (adtree::Node& child : node.gate().children) {
            relabel(child);
        }
    }

    std::string random_catalog_id(const adtree::DefenseCatalog& catalog) {
        int i = pick(0, static_cast<int>(catalog.entries.size()) - 1);
        return catalog.entries[static_cast<std::size_t>(i)].id;
    }
};

// ---------------------------------------------------------------------------
// Minimal XML well-formedness scanner: prolog, balanced tags, quoted
// attributes, sane entities. Enough to vet the SVG emitter's output.

inline bool xml_well_formed(const std::string& text, std::string* error = nullptr) {
    auto fail = [&](const std::string& message) {
        if (error != nullptr) {
            *error = message;
        }
        return false;
    };
    std::size_t i = 0;
    std::vector<std::string> stack;
    int root_elements = 0;
    auto skip_ws = [&]() {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    if (text.compare(i, 5, "<?xml") == 0) {
        std::size_t end = text.find("?>", i);
        if (end == std::string::npos) return fail("unterminated prolog");
        i = end + 2;
    }
    while (i < text.size()) {
        char c = text[i];
        if (c == '<') {
            if (text.compare(i, 4, "<!--") == 0) {
                std::size_t end = text.find("-->", i);
                if (end == std::string::npos) return fail("unterminated comment");
                i = end + 3;
                continue;
            }
            if (i + 1 < text.size() && text[i + 1] == '/') {
                std::size_t end = text.find('>', i);
                if (end == std::string::npos) return fail("unterminated closing tag");
                std::string name = text.substr(i + 2, end - i - 2);
                if (stack.empty() || stack.back() != name) {
                    return fail("mismatched closing tag: " + name);
                }
                stack.pop_back();
                i = end + 1;
                continue;
            }
            ++i;
            std::string name;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == ':' ||
                    text[i] == '-' || text[i] == '_')) {
                name.push_back(text[i++]);
            }
            if (name.empty()) return fail("empty tag name");
            // attributes
            while (i < text.size() && text[i] != '>' &&
                   !(text[i] == '/' && i + 1 < text.size() && text[i + 1] == '>')) {
                if (std::isspace(static_cast<unsigned char>(text[i]))) {
                    ++i;
                    continue;
                }
                while (i < text.size() && text[i] != '=' && text[i] != '>' &&
                       !std::isspace(static_cast<unsigned char>(text[i]))) {
                    ++i;
                }
                skip_ws();
                if (i >= text.size() || text[i] != '=') return fail("attribute without value");
                ++i;
                skip_ws();
                if (i >= text.size() || (text[i] != '"' && text[i] != '\'')) {
                    return fail("unquoted attribute value");
                }
                char quote = text[i++];
                while (i < text.size() && text[i] != quote) {
                    if (text[i] == '<') return fail("'<' in attribute value");
                    ++i;
                }
                if (i >= text.size()) return fail("unterminated attribute value");
                ++i;
            }
            if (i < text.size() && text[i] == '/') {
                i += 2;  // self-closing
                if (stack.empty()) {
                    ++root_elements;
                }
            } else if (i < text.size() && text[i] == '>') {
                ++i;
                if (stack.empty()) {
                    ++root_elements;
                }
                stack.push_back(name);
            } else {
                return fail("unterminated tag " + name);
            }
            continue;
        }
        if (c == '&') {
            std::size_t end = text.find(';', i);
            if (end == std::string::npos || end - i > 8) return fail("bad entity");
            std::string entity = text.substr(i + 1, end - i - 1);
            if (entity != "amp" && entity != "lt" && entity != "gt" && entity != "quot" &&
                entity != "apos" && (entity.empty() || entity[0] != '#')) {
                return fail("unknown entity &" + entity + ";");
            }
            i = end + 1;
            continue;
        }
        if (c == '>') return fail("stray '>'");
        ++i;
    }
    if (!stack.empty()) return fail("unclosed element " + stack.back());
    if (root_elements != 1) return fail("expected exactly one root element");
    return true;
}

inline int count_tag(const std::string& text, const std::string& tag) {
    int count = 0;
    std::size_t pos = 0;
    std::string needle = "<" + tag;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        char after = pos + needle.size() < text.size() ? text[pos + needle.size()] : '\0';
        if (after == ' ' || after == '>' || after == '/') {
            ++count;
        }
        pos += needle.size();
    }
    return count;
}

// ---------------------------------------------------------------------------
// CLI harness.

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::filesystem::path unique_temp_path(const std::string& stem) {
    static int counter = 0;
    std::ostringstream name;
    name << "adtree_" << stem << "_" <<
#if defined(__unix__) || defined(__APPLE__)
        ::getpid()
#else
        0
#endif
         << "_" << counter++;
    return std::filesystem::temp_directory_path() / name.str();
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

#ifdef ADTREE_CLI_PATH
inline CliResult run_cli(const std::string& args) {
    CliResult result;
    std::filesystem::path out_path = unique_temp_path("stdout");
    std::filesystem::path err_path = unique_temp_path("stderr");
    std::string command = std::string(ADTREE_CLI_PATH) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
    int status = std::system(command.c_str());
#if defined(__unix__) || defined(__APPLE__)
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    result.exit_code = status;
#endif
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return result;
}
#endif

}  // namespace testsupport
