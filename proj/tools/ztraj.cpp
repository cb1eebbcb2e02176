#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "ztraj/io/commands.hpp"

using namespace ztraj;
using namespace ztraj::io;

namespace {

constexpr int kInputError = 1;
constexpr int kCertificationFailure = 2;

int run(int argc, char** argv)
{
    CLI::App app{"ztraj: zeros, orbits and rational points of trajectories of polynomial vector fields"};
    app.set_version_flag("--version", "ztraj 1.0");

    std::vector<std::string> names;
    for (const auto& [name, cmd] : commands())
        names.push_back(name);

    std::string command, config_path, out_path, format = "json";
    std::optional<std::uint64_t> seed;
    std::optional<long> precision;
    std::optional<unsigned> threads;
    app.add_option("command", command, "Subcommand to run")->required()->check(CLI::IsMember(names));
    app.add_option("--config", config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Seed of the random generator");
    app.add_option("--precision-bits", precision, "Working precision in bits (default 128)")
        ->check(CLI::Range(32L, 1L << 16));
    app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--out", out_path, "Output file (default: standard output)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    json cfg = json::object();
    CommandContext ctx;
    if (!config_path.empty()) {
        cfg = read_json(config_path);
        ctx.base_dir = std::filesystem::path(config_path).parent_path();
        if (ctx.base_dir.empty())
            ctx.base_dir = ".";
    }
    if (!cfg.is_object())
        throw ParseError("config must be a JSON object");
    ctx.settings.seed = seed ? *seed : cfg.value("seed", std::uint64_t{1});
    ctx.settings.precision = precision ? *precision : cfg.value("precision_bits", 128L);
    ctx.settings.threads = threads ? *threads : cfg.value("threads", 1u);
    if (ctx.settings.threads == 0)
        throw ParseError("threads must be positive");
    if (format == "csv" && !has_csv(command))
        throw ParseError("'" + command + "' has no tabular output; use --format json");

    CommandOutput result = commands().at(command)(cfg, ctx);
    // systems-make emits a bare system file so that {"file": ...} can load it.
    json doc = command == "systems-make" ? result.result
                                         : json{{"command", command},
                                                {"seed", ctx.settings.seed},
                                                {"precision_bits", ctx.settings.precision},
                                                {"certified", result.certified},
                                                {"result", result.result}};
    std::string text = format == "csv" ? *result.csv : doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out)
            throw ParseError("cannot write " + out_path);
        out << text;
    }
    if (!result.certified) {
        std::cerr << "ztraj: certification failed; see the diagnostics in the output\n";
        return kCertificationFailure;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const CertificationError& e) {
        std::cerr << "ztraj: certification failed: " << e.what() << "\n";
        return kCertificationFailure;
    } catch (const Error& e) {
        std::cerr << "ztraj: " << e.what() << "\n";
        return kInputError;
    } catch (const json::exception& e) {
        std::cerr << "ztraj: invalid config: " << e.what() << "\n";
        return kInputError;
    }
}
