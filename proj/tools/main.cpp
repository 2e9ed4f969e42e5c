#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "loopsim/commands.hpp"

namespace {

// exit codes: 0 ok, 2 config error, 3 I/O error, 4 precondition violation
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitPrecondition = 4;

void print_error(const std::string& kind, const std::string& message,
                 const std::string& field = "") {
    nlohmann::json j;
    j["error"] = kind;
    j["message"] = message;
    if (!field.empty()) j["field"] = field;
    std::cerr << j.dump() << "\n";
}

struct Options {
    std::string config_path;
    std::string out_dir;
    std::string format = "json";
    int64_t seed_override = -1;
};

loopsim::RunConfig load(const Options& opt) {
    loopsim::RunConfig cfg = loopsim::load_config(opt.config_path);
    if (opt.seed_override >= 0) cfg.simulation.seed = static_cast<uint64_t>(opt.seed_override);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    return cfg;
}

void add_common(CLI::App* cmd, Options& opt, bool needs_config = true) {
    auto* config = cmd->add_option("--config", opt.config_path, "run configuration (JSON)");
    if (needs_config) config->required();
    cmd->add_option("--seed", opt.seed_override, "override simulation.seed");
    cmd->add_option("--out", opt.out_dir, "output directory (overrides config)");
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-bin loop interferometer simulator and analysis toolkit"};
    app.require_subcommand(1);

    Options opt;
    std::string tags_path, events_path, reference_path, mode = "fidelity";
    std::string file_a, file_b;

    auto* compile = app.add_subcommand("compile", "compile schedule to a transfer matrix");
    add_common(compile, opt);
    auto* preview = app.add_subcommand("preview", "loop-blocked transmitted intensity trace");
    add_common(preview, opt);
    auto* simulate =
        app.add_subcommand("simulate", "theory distribution + synthetic tags + reconstruction");
    add_common(simulate, opt);
    auto* hom = app.add_subcommand("hom", "two-photon interference histogram and visibility");
    add_common(hom, opt);
    auto* reconstruct = app.add_subcommand("reconstruct", "bin a tag stream into event counts");
    add_common(reconstruct, opt);
    reconstruct->add_option("--tags", tags_path, "tag stream file (.bin or .csv)")->required();
    auto* validate = app.add_subcommand("validate", "validate an event sample");
    add_common(validate, opt);
    validate->add_option("--events", events_path, "events file")->required();
    validate->add_option("--mode", mode, "validation mode")
        ->required()
        ->check(CLI::IsMember({"uniform", "distinguishable", "fidelity"}));
    validate->add_option("--reference", reference_path,
                         "reference distribution CSV (fidelity mode; default: theory)");
    auto* fidelity = app.add_subcommand("fidelity", "statistical fidelity of two distributions");
    fidelity->add_option("a", file_a, "first distribution CSV")->required();
    fidelity->add_option("b", file_b, "second distribution CSV")->required();
    fidelity->add_option("--out", opt.out_dir, "output directory");
    auto* report = app.add_subcommand("report", "stream statistics for a tag file");
    add_common(report, opt);
    report->add_option("--tags", tags_path, "tag stream file (.bin or .csv)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fidelity->parsed()) {
            const std::string out =
                (opt.out_dir.empty() ? std::string(".") : opt.out_dir) + "/fidelity.json";
            loopsim::cmd_fidelity(file_a, file_b, out);
            return 0;
        }
        const loopsim::RunConfig cfg = load(opt);
        const std::string out = opt.out_dir.empty() ? cfg.output_dir : opt.out_dir;
        if (compile->parsed()) {
            loopsim::cmd_compile(cfg, out);
        } else if (preview->parsed()) {
            loopsim::cmd_preview(cfg, out);
        } else if (simulate->parsed()) {
            loopsim::cmd_simulate(cfg, out);
        } else if (hom->parsed()) {
            loopsim::cmd_hom(cfg, out);
        } else if (reconstruct->parsed()) {
            loopsim::cmd_reconstruct(cfg, tags_path, out);
        } else if (validate->parsed()) {
            loopsim::cmd_validate(cfg, events_path, mode, reference_path, out);
        } else if (report->parsed()) {
            loopsim::cmd_report(cfg, tags_path, out);
        }
        return 0;
    } catch (const loopsim::ConfigError& e) {
        print_error("config", e.what(), e.field);
        return kExitConfig;
    } catch (const loopsim::IoError& e) {
        print_error("io", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        print_error("precondition", e.what());
        return kExitPrecondition;
    } catch (const std::domain_error& e) {
        print_error("precondition", e.what());
        return kExitPrecondition;
    } catch (const std::exception& e) {
        print_error("io", e.what());
        return kExitIo;
    }
}
