#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Sequential expanding-map CLT laboratory"};
    app.require_subcommand(1);

    seqclt::RunOptions options;
    std::string out_dir;
    std::uint64_t seed_override = 0;
    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads (changes speed only)")->check(CLI::Range(1u, 1024u));

    auto* run = app.add_subcommand("run", "Run one experiment config");
    std::string config_path;
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    auto* out_opt = run->add_option("--out-dir", out_dir, "Output directory");
    auto* seed_opt = run->add_option("--seed-override", seed_override, "Replace the config seed");
    run->add_option("--threads", threads, "Worker threads (changes speed only)")->check(CLI::Range(1u, 1024u));

    auto* sum = app.add_subcommand("summarize", "Merge rate tables of several reports into one CSV");
    std::vector<std::string> reports;
    sum->add_option("reports", reports, "report.json files")->required();
    std::string sum_out;
    sum->add_option("--out", sum_out, "Write the table to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : seqclt::kExitConfigError;
    }

    try {
        if (run->parsed()) {
            options.threads = threads;
            if (*out_opt) {
                options.out_dir = out_dir;
            }
            if (*seed_opt) {
                options.seed_override = seed_override;
            }
            const seqclt::RunResult result = seqclt::run_experiment_file(config_path, options);
            for (const auto& c : result.checks) {
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
            }
            std::cout << "report: " << (result.out_dir / "report.json").string() << '\n';
            return result.exit_code;
        }
        std::vector<std::filesystem::path> paths(reports.begin(), reports.end());
        const auto rows = seqclt::summarize(paths);
        if (sum_out.empty()) {
            seqclt::write_summary_csv(std::cout, rows);
        } else {
            std::ofstream out(sum_out, std::ios::binary);
            if (!out) {
                throw seqclt::ConfigError("cannot write " + sum_out);
            }
            seqclt::write_summary_csv(out, rows);
        }
        return seqclt::kExitOk;
    } catch (const seqclt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return seqclt::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return seqclt::kExitRuntimeError;
    }
}
