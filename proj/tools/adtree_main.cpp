#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "adtree/dataset.hpp"
#include "adtree/dsl.hpp"
#include "adtree/report.hpp"
#include "adtree/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitIoError = 2;

void print_diagnostic(const adtree::Diagnostic& diagnostic) {
    const char* severity =
        diagnostic.severity == adtree::Severity::Error ? "ERROR" : "WARNING";
    int line = 0;
    int column = 0;
    if (diagnostic.span) {
        line = diagnostic.span->line;
        column = diagnostic.span->column;
    }
    std::cerr << severity << " " << diagnostic.code << " " << line << ":" << column << " "
              << diagnostic.message << "\n";
}

// Reads the document at `path`, resolving the pseudo-path @cav to the
// bundled dataset. Prints diagnostics to stderr. Returns the exit code to
// use on failure, kExitOk on success.
int load_document(const std::string& path, adtree::Document& out,
                  bool print_warnings = true) {
    std::string text;
    if (path == "@cav") {
        text = adtree::cav_dataset_text();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read '" << path << "'\n";
            return kExitIoError;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        text = buffer.str();
    }
    adtree::ParseResult result = adtree::parse_document(text);
    for (const adtree::Diagnostic& diagnostic : result.diagnostics) {
        if (diagnostic.severity == adtree::Severity::Error || print_warnings) {
            print_diagnostic(diagnostic);
        }
    }
    if (!result.ok()) {
        return kExitDomainError;
    }
    out = std::move(*result.document);
    return kExitOk;
}

int find_scenario(const adtree::Document& doc, const std::string& name,
                  const adtree::Scenario*& out) {
    out = doc.find_scenario(name);
    if (out == nullptr) {
        std::cerr << "ERROR E_UNKNOWN_SCENARIO 0:0 no scenario named \"" << name
                  << "\" in document\n";
        return kExitDomainError;
    }
    return kExitOk;
}

struct CommonArgs {
    std::string path;
    std::string scenario;
    std::string semantics = "worst";
    std::string format = "table";
    int precision = 4;
};

adtree::AggregationSemantics semantics_of(const CommonArgs& args) {
    return args.semantics == "prob" ? adtree::AggregationSemantics::Probabilistic
                                    : adtree::AggregationSemantics::WorstPath;
}

adtree::RenderOptions options_of(const CommonArgs& args) {
    adtree::RenderOptions options;
    options.precision = args.precision;
    if (args.format == "csv") {
        options.format = adtree::OutputFormat::Csv;
    } else if (args.format == "json") {
        options.format = adtree::OutputFormat::Json;
    } else {
        options.format = adtree::OutputFormat::Table;
    }
    return options;
}

int run_validate(const std::string& path) {
    adtree::Document doc;
    return load_document(path, doc);
}

int run_evaluate(const CommonArgs& args) {
    adtree::Document doc;
    if (int rc = load_document(args.path, doc)) {
        return rc;
    }
    const adtree::AdTree* tree = &doc.tree;
    adtree::AdTree modified;
    if (!args.scenario.empty()) {
        const adtree::Scenario* scenario = nullptr;
        if (int rc = find_scenario(doc, args.scenario, scenario)) {
            return rc;
        }
        modified = adtree::apply_scenario(doc.tree, *scenario);
        tree = &modified;
    }
    adtree::TreeEvaluation evaluation = adtree::evaluate(*tree, semantics_of(args));
    std::cout << adtree::render_evaluation(evaluation, options_of(args));
    return kExitOk;
}

int run_compare(const CommonArgs& args) {
    adtree::Document doc;
    if (int rc = load_document(args.path, doc)) {
        return rc;
    }
    const adtree::Scenario* scenario = nullptr;
    if (int rc = find_scenario(doc, args.scenario, scenario)) {
        return rc;
    }
    adtree::ComparisonReport report =
        adtree::compare_scenarios(doc.tree, *scenario, semantics_of(args));
    std::cout << adtree::render_comparison(report, options_of(args));
    return kExitOk;
}

int run_render(const CommonArgs& args, const std::string& out_path, int width, int height) {
    adtree::Document doc;
    if (int rc = load_document(args.path, doc)) {
        return rc;
    }
    const adtree::Scenario* scenario = nullptr;
    if (int rc = find_scenario(doc, args.scenario, scenario)) {
        return rc;
    }
    adtree::ComparisonReport report =
        adtree::compare_scenarios(doc.tree, *scenario, semantics_of(args));
    adtree::RenderOptions options;
    options.format = adtree::OutputFormat::Svg;
    options.precision = args.precision;
    options.chart_width = width;
    options.chart_height = height;
    std::string svg = adtree::render_comparison_chart(report, options);
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << svg) || !out.flush()) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kExitIoError;
    }
    return kExitOk;
}

int run_recommend(const CommonArgs& args, int budget, const std::string& objective_name) {
    if (budget < 1) {
        std::cerr << "ERROR E_BAD_BUDGET 0:0 budget must be at least 1\n";
        return kExitDomainError;
    }
    adtree::Document doc;
    if (int rc = load_document(args.path, doc)) {
        return rc;
    }
    adtree::Objective objective = objective_name == "max" ? adtree::Objective::MaxLeaf
                                                          : adtree::Objective::SumLeaves;
    std::vector<adtree::Action> actions =
        adtree::recommend_defenses(doc.tree, budget, objective, semantics_of(args));
    for (const adtree::Action& action : actions) {
        if (action.kind == adtree::ActionKind::AddDefense) {
            std::cout << "add " << action.defense_id << " to " << action.leaf_id;
        } else {
            std::cout << "set-ids " << action.leaf_id << " "
                      << adtree::ids_tier_name(action.new_tier);
        }
        std::cout << "  # delta " << adtree::format_fixed(action.delta, 4) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attack-defense tree vulnerability analysis for connected vehicles"};
    app.set_version_flag("--version", std::string("adtree ") + ADTREE_VERSION);
    app.require_subcommand(1);

    CommonArgs args;
    std::string out_path;
    int width = 800;
    int height = 400;
    int budget = 1;
    std::string objective = "sum";

    auto add_semantics = [&](CLI::App* cmd) {
        cmd->add_option("--semantics", args.semantics, "Gate aggregation: worst or prob")
            ->check(CLI::IsMember({"worst", "prob"}));
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", args.format, "Output format")
            ->check(CLI::IsMember({"table", "csv", "json"}));
        cmd->add_option("--precision", args.precision, "Decimal places for values")
            ->check(CLI::Range(0, 9));
    };
    auto add_path = [&](CLI::App* cmd) {
        cmd->add_option("path", args.path, "Document path (.adt) or @cav")->required();
    };

    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a document");
    add_path(validate);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Compute vulnerability indices for every leaf");
    add_path(evaluate);
    evaluate->add_option("--scenario", args.scenario, "Apply this scenario before evaluating");
    add_semantics(evaluate);
    add_format(evaluate);

    CLI::App* compare =
        app.add_subcommand("compare", "Compare the tree before and after a scenario");
    add_path(compare);
    compare->add_option("--scenario", args.scenario, "Scenario to apply")->required();
    add_semantics(compare);
    add_format(compare);

    CLI::App* render = app.add_subcommand("render", "Write a before/after SVG bar chart");
    add_path(render);
    render->add_option("--scenario", args.scenario, "Scenario to apply")->required();
    render->add_option("--out", out_path, "Output SVG path")->required();
    render->add_option("--width", width, "Chart width in SVG units");
    render->add_option("--height", height, "Chart height in SVG units");
    add_semantics(render);

    CLI::App* recommend =
        app.add_subcommand("recommend", "Greedy defense prioritization for a tree");
    add_path(recommend);
    recommend->add_option("--budget", budget, "Maximum number of actions");
    recommend->add_option("--objective", objective, "Objective: max or sum")
        ->check(CLI::IsMember({"max", "sum"}));
    add_semantics(recommend);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitDomainError;
    }

    try {
        if (app.got_subcommand(validate)) {
            return run_validate(args.path);
        }
        if (app.got_subcommand(evaluate)) {
            return run_evaluate(args);
        }
        if (app.got_subcommand(compare)) {
            return run_compare(args);
        }
        if (app.got_subcommand(render)) {
            return run_render(args, out_path, width, height);
        }
        if (app.got_subcommand(recommend)) {
            return run_recommend(args, budget, objective);
        }
    } catch (const adtree::DomainError& e) {
        std::cerr << "ERROR " << e.code() << " 0:0 " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitOk;
}
