#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "nuedge/cli/config.hpp"
#include "nuedge/cli/study.hpp"
#include "nuedge/error.hpp"
#include "nuedge/markov/chain.hpp"
#include "nuedge/sim/sampling.hpp"
#include "nuedge/text.hpp"

int main(int argc, char** argv) {
    using namespace nuedge;
    CLI::App app{"Edgeworth expansions for weakly dependent sums"};
    app.require_subcommand(1);

    std::string config_path, out_dir, model = "iid-3pt-nonlattice", chain_file, cumulant_text;
    std::uint64_t seed = 0;
    int order = 1, k_max = 4;
    double power = 3.0;
    std::size_t n = 64, count = 10000;

    auto* expand = app.add_subcommand("expand", "print Psi polynomials for given cumulants");
    expand->add_option("--cumulants", cumulant_text, "gamma_2 gamma_3 ... of S_n")->required();
    expand->add_option("--order", order, "expansion order r")->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("chain-analyze", "ellipticity, pressure and asymptotic cumulant coefficients");
    analyze->add_option("--model", model, "built-in chain name");
    analyze->add_option("--chain", chain_file, "chain file");
    analyze->add_option("--order", k_max, "highest cumulant order")->check(CLI::Range(2, 12));

    auto* study = app.add_subcommand("study", "run a convergence study");
    study->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
    auto* seed_opt = study->add_option("--seed", seed, "override the seed");
    auto* out_opt = study->add_option("--out", out_dir, "override the output directory");
    auto* order_opt = study->add_option("--order", order, "override r")->check(CLI::NonNegativeNumber);
    auto* power_opt = study->add_option("--power", power, "override s")->check(CLI::NonNegativeNumber);

    auto* sample = app.add_subcommand("sample", "emit a Monte Carlo batch");
    sample->add_option("--model", model, "built-in chain or simulation model");
    sample->add_option("--chain", chain_file, "chain file");
    sample->add_option("--n", n, "horizon")->check(CLI::PositiveNumber);
    sample->add_option("--count", count, "number of trajectories")->check(CLI::PositiveNumber);
    sample->add_option("--seed", seed, "seed");
    sample->add_option("--out", out_dir, "output directory (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*expand) {
            std::cout << cli::expand_report(text::parse_doubles(cumulant_text), order);
            return 0;
        }
        if (*analyze) {
            const auto spec = chain_file.empty() ? markov::builtin_chain(model) : markov::load_chain(chain_file);
            std::cout << cli::chain_analysis_report(spec, k_max);
            return 0;
        }
        if (*study) {
            auto config = cli::load_config(config_path);
            if (*seed_opt) config.seed = seed;
            if (*out_opt) config.out_dir = out_dir;
            if (*order_opt) config.r = order;
            if (*power_opt) config.s = power;
            const int code = cli::run_convergence_study(config);
            std::cout << (std::filesystem::path(config.out_dir) / config.summary_file).string() << '\n';
            if (code != 0) std::cerr << "study: consistency checks failed; see the summary file\n";
            return code;
        }
        if (*sample) {
            const auto batch = chain_file.empty()
                                   ? sim::sample_builtin(model, n, count, seed)
                                   : sim::sample_chain(markov::load_chain(chain_file), n, count, seed);
            const auto body = sim::serialize_batch(batch);
            if (out_dir.empty()) {
                std::cout << body;
            } else {
                std::filesystem::create_directories(out_dir);
                const auto path = std::filesystem::path(out_dir) / ("sample_n" + std::to_string(n) + ".txt");
                text::write_file(path.string(), body);
                std::cout << path.string() << '\n';
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
