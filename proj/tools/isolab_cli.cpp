// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isolab/isolab.h"

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

struct Options {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<double> tol;
    std::vector<double> ladder;
    std::string out;
    std::string format = "json";
    std::string input;
    std::string config;
    std::string arrow;
};

json build_config(const std::string& command, const Options& o) {
    json cfg = json::object();
    if (!o.config.empty()) cfg = read_json_file(o.config);
    if (!o.input.empty()) {
        json in = read_json_file(o.input);
        // A bare asymptotic-data object is accepted as the "data" entry.
        if (in.is_object() && in.contains("theta") && in.contains("sigma") && !in.contains("data")) {
            cfg["data"] = in;
        } else if (in.is_object()) {
            for (auto it = in.begin(); it != in.end(); ++it) cfg[it.key()] = it.value();
        } else {
            throw std::runtime_error("input file must hold a JSON object");
        }
    }
    if (o.seed) cfg["seed"] = *o.seed;
    if (o.samples) cfg["samples"] = *o.samples;
    if (o.tol) cfg["tol"] = *o.tol;
    if (!o.ladder.empty()) cfg["ladder"] = o.ladder;
    if (command == "convert" && !o.arrow.empty()) cfg["arrow"] = o.arrow;
    return cfg;
}

int run(const std::string& command, const Options& o) {
    const json cfg = build_config(command, o);
    isolab_context* ctx = nullptr;
    if (isolab_context_create(&ctx) != ISOLAB_OK) {
        std::cerr << "isolab: cannot create context\n";
        return 2;
    }
    char* report = nullptr;
    char* csv = nullptr;
    int exit_code = 0;
    const isolab_status st = isolab_run(ctx, command.c_str(), cfg.dump().c_str(), &report, &csv, &exit_code);
    if (st != ISOLAB_OK) {
        std::cerr << "isolab " << command << ": " << isolab_status_name(st) << " error: " << isolab_last_error(ctx)
                  << '\n';
        isolab_context_destroy(ctx);
        return 2;
    }
    const std::string rep(report), table(csv ? csv : "");
    isolab_string_free(report);
    isolab_string_free(csv);
    isolab_context_destroy(ctx);

    if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        const auto base = std::filesystem::path(o.out) / command;
        std::ofstream(base.string() + ".json") << rep << '\n';
        if (!table.empty()) std::ofstream(base.string() + ".csv") << table;
    } else if (o.format == "csv") {
        if (table.empty()) {
            std::cerr << "isolab " << command << ": no CSV table for this command, printing JSON\n";
            std::cout << rep << '\n';
        } else {
            std::cout << table;
        }
    } else {
        std::cout << rep << '\n';
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of the Painleve VI / Stokes / monodromy correspondence"};
    app.set_version_flag("--version", std::string(isolab_version()));
    app.require_subcommand(1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"roundtrip", "Closed-form round trip F(P(G(Q(d)))) over random generic samples"},
        {"limits", "PVI ladder: regularized limits A(x), B(x) against the closed-form boundary value"},
        {"stokes", "Closed-form versus numerical Stokes matrices"},
        {"jmms", "Isomonodromic flow with conservation checks and the shrinking band"},
        {"convert", "Evaluate a single arrow (Q, Q0, Qinv, G, G_sub, G_direct, P, F, traces, FPGQ)"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--seed", o.seed, "Sampler seed");
        sub->add_option("--samples", o.samples, "Number of samples");
        sub->add_option("--tol", o.tol, "Pass/fail threshold");
        sub->add_option("--ladder", o.ladder, "x ladder for limit runs")->delimiter(',');
        sub->add_option("--out", o.out, "Output directory for <command>.json and <command>.csv");
        sub->add_option("--format", o.format, "Stdout format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--input", o.input, "JSON file with input data (asymptotic data, state, matrices)")
            ->check(CLI::ExistingFile);
        sub->add_option("--config", o.config, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
        if (name == "convert") sub->add_option("--arrow", o.arrow, "Arrow to evaluate");
    }

    CLI11_PARSE(app, argc, argv);
    try {
        for (const auto& [name, help] : commands) {
            if (app.got_subcommand(name)) return run(name, o);
        }
    } catch (const std::exception& e) {
        std::cerr << "isolab: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
