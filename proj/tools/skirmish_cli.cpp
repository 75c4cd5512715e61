// Command-line front end: experiments, black-box evaluation, single rollouts,
// replay rendering, script validation, training, and script generation.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skirmish/env/config.hpp"
#include "skirmish/eval/experiment.hpp"
#include "skirmish/gen/http_provider.hpp"
#include "skirmish/gen/loop.hpp"
#include "skirmish/learn/trainer.hpp"
#include "skirmish/script/builtins.hpp"

namespace fs = std::filesystem;
using namespace skirmish;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

void emit_report(const eval::WinRateReport& report, const std::string& results_dir,
                 const std::string& stem) {
    std::cout << eval::render_table(report);
    fs::create_directories(results_dir);
    std::string csv_path = results_dir + "/" + stem + ".csv";
    write_file(csv_path, eval::to_csv(report));
    std::ofstream jsonl(results_dir + "/" + stem + ".jsonl");
    eval::episodes_to_jsonl(report, jsonl);
    std::cout << "wrote " << csv_path << " and " << results_dir << "/" << stem << ".jsonl\n";
}

void print_episode(const eval::EpisodeResult& r) {
    std::cout << "winner " << eval::to_string(r.winner) << ", steps " << r.steps
              << ", return_p1 " << r.return_p1 << ", return_p2 " << r.return_p2
              << ", script_index " << r.opponent_script_index << ", seed " << r.seed << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skirmish: scripted-opponent micromanagement combat environment"};
    app.require_subcommand(1);

    std::string data_dir_flag;
    app.add_option("--data-dir", data_dir_flag,
                   "data directory (default: $SKIRMISH_DATA_DIR or the shipped data/)");

    auto* run = app.add_subcommand("run", "run an experiment config and report win rates");
    std::string run_config;
    int run_episodes = -1, run_seeds = -1, run_workers = -1;
    std::string run_out;
    run->add_option("--config", run_config, "experiment JSON file")->required();
    run->add_option("--episodes", run_episodes, "override evaluation episodes per seed");
    run->add_option("--seeds", run_seeds, "override seed count");
    run->add_option("--workers", run_workers, "override worker thread count");
    run->add_option("--out", run_out, "results directory (default: $SKIRMISH_RESULTS_DIR)");

    auto* bb = app.add_subcommand("eval-blackbox",
                                  "evaluate a frozen model against unseen opponents");
    std::string bb_model, bb_train, bb_scenario, bb_out;
    std::vector<std::string> bb_tests;
    int bb_episodes = 256;
    uint64_t bb_seed = 0;
    bb->add_option("--model", bb_model, "model file from train")->required();
    bb->add_option("--train-opponent", bb_train, "opponent used in training")->required();
    bb->add_option("--test-opponent", bb_tests, "opponent(s) to test against")->required();
    bb->add_option("--scenario", bb_scenario, "scenario override (default: the model's)");
    bb->add_option("--episodes", bb_episodes, "episodes per cell (default 256)");
    bb->add_option("--seed", bb_seed, "base seed");
    bb->add_option("--out", bb_out, "results directory");

    auto* roll = app.add_subcommand("rollout", "run one episode and optionally log a replay");
    std::string roll_scenario, roll_p1 = "attack_nearest", roll_opponent, roll_p2, roll_replay;
    uint64_t roll_seed = 0;
    roll->add_option("--scenario", roll_scenario, "scenario name or path")->required();
    roll->add_option("--p1", roll_p1, "player-1 script (builtin name or .dsl path)");
    roll->add_option("--opponent", roll_opponent, "decision-tree opponent script");
    roll->add_option("--p2", roll_p2, "player-2 script: switches to self-play mode");
    roll->add_option("--seed", roll_seed, "episode seed");
    roll->add_option("--replay", roll_replay, "write a JSON-lines replay here");

    auto* rr = app.add_subcommand("render-replay", "print an ASCII storyboard of a replay");
    std::string rr_path, rr_out;
    bool rr_check = false;
    rr->add_option("--replay", rr_path, "replay file")->required();
    rr->add_option("--out", rr_out, "write the storyboard here instead of stdout");
    rr->add_flag("--check", rr_check, "re-simulate and verify the log first");

    auto* scripts = app.add_subcommand("scripts", "list builtin scripts or check script files");
    auto* scripts_list = scripts->add_subcommand("list", "list the builtin script library");
    auto* scripts_check = scripts->add_subcommand("check", "parse script files, report errors");
    std::vector<std::string> check_paths;
    scripts_check->add_option("files", check_paths, "script files")->required();
    scripts->require_subcommand(1);

    auto* train = app.add_subcommand("train", "train the tabular learner against an opponent");
    std::string train_scenario, train_opponent = "attack_nearest", train_model_out,
                train_curve_out;
    uint64_t train_seed = 0;
    learn::LearnerConfig learner_cfg;
    train->add_option("--scenario", train_scenario, "scenario name or path")->required();
    train->add_option("--opponent", train_opponent,
                      "opponent script, or a comma list for an equal mixture");
    train->add_option("--steps", learner_cfg.total_steps, "environment steps (default 200000)");
    train->add_option("--alpha", learner_cfg.alpha, "learning rate");
    train->add_option("--gamma", learner_cfg.gamma, "discount factor");
    train->add_option("--eval-interval", learner_cfg.eval_interval, "steps between evaluations");
    train->add_flag("--vdn", learner_cfg.use_vdn, "additive joint-value updates");
    train->add_option("--seed", train_seed, "training seed");
    train->add_option("--out", train_model_out, "model output file")->required();
    train->add_option("--curve", train_curve_out, "learning-curve JSON output");

    auto* sg = app.add_subcommand("scriptgen", "generate opponent scripts with the refine loop");
    std::string sg_scenario, sg_provider = "mock", sg_endpoint, sg_model = "default", sg_out,
                sg_transcript;
    gen::RefineOptions sg_options;
    sg->add_option("--scenario", sg_scenario, "scenario name or path")->required();
    sg->add_option("--provider", sg_provider, "mock | http");
    sg->add_option("--endpoint", sg_endpoint, "chat-completion endpoint URL (http provider)");
    sg->add_option("--model", sg_model, "model name (http provider)");
    sg->add_option("--max-iters", sg_options.max_iters, "iteration cap");
    sg->add_option("--window", sg_options.stability_window, "stability window");
    sg->add_option("--tol", sg_options.stability_tol, "stability tolerance");
    sg->add_option("--episodes", sg_options.sim_episodes, "simulation episodes per iteration");
    sg->add_option("--seed", sg_options.seed, "simulation seed");
    sg->add_option("--transcript", sg_transcript, "JSON-lines transcript output");
    sg->add_option("--out", sg_out, "write the accepted script here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!data_dir_flag.empty()) setenv("SKIRMISH_DATA_DIR", data_dir_flag.c_str(), 1);
        auto table = env::load_default_stat_table();

        if (*run) {
            auto cfg = eval::load_experiment(run_config);
            if (run_episodes > 0) cfg.n_eval_episodes = run_episodes;
            if (run_seeds > 0) cfg.n_seeds = run_seeds;
            if (run_workers > 0) cfg.n_workers = run_workers;
            if (!run_out.empty()) cfg.results_dir = run_out;
            auto report = eval::run_eval(cfg, table);
            emit_report(report, cfg.results_dir, "report");
        } else if (*bb) {
            auto model = learn::load_model(bb_model);
            std::vector<nlohmann::json> tests(bb_tests.begin(), bb_tests.end());
            auto report = eval::blackbox_eval(
                model, bb_train, tests, table,
                bb_scenario.empty() ? nlohmann::json() : nlohmann::json(bb_scenario),
                bb_episodes, bb_seed);
            emit_report(report, bb_out.empty() ? eval::default_results_dir() : bb_out,
                        "blackbox");
        } else if (*roll) {
            env::EnvConfig cfg;
            cfg.scenario = env::resolve_scenario(roll_scenario, table);
            eval::ScriptPolicy p1(env::resolve_script(roll_p1));
            std::unique_ptr<eval::ScriptPolicy> p2;
            if (!roll_p2.empty()) {
                cfg.mode = env::Mode::SelfPlay;
                p2 = std::make_unique<eval::ScriptPolicy>(env::resolve_script(roll_p2));
            } else {
                if (roll_opponent.empty()) {
                    throw ConfigError("rollout needs --opponent (or --p2 for self-play)");
                }
                cfg.mode = env::Mode::DecisionTree;
                cfg.opponent_mixture = env::mixture_from_json(roll_opponent);
            }
            env::Environment envr(cfg, table);
            eval::ReplayLog log;
            auto result = eval::run_episode(envr, p1, p2.get(), roll_seed,
                                            roll_replay.empty() ? nullptr : &log);
            print_episode(result);
            if (!roll_replay.empty()) {
                eval::write_replay(log, roll_replay);
                std::cout << "wrote replay " << roll_replay << "\n";
            }
        } else if (*rr) {
            auto log = eval::read_replay(rr_path);
            if (rr_check) {
                eval::resimulate(log);
                std::cout << "replay re-simulates exactly\n";
            }
            auto text = eval::render_replay(log);
            if (rr_out.empty()) {
                std::cout << text;
            } else {
                write_file(rr_out, text);
                std::cout << "wrote " << rr_out << "\n";
            }
        } else if (*scripts) {
            if (*scripts_list) {
                for (const auto& [name, text] : script::builtin_sources()) {
                    std::cout << name << ":\n" << text << "\n";
                }
            }
            if (*scripts_check) {
                bool all_ok = true;
                for (const auto& path : check_paths) {
                    try {
                        auto tree = script::parse_script({env::read_text_file(path), path});
                        std::cout << path << ": ok (" << tree.rules.size() << " rules)\n";
                    } catch (const ParseError& e) {
                        all_ok = false;
                        std::cout << path << ": " << e.what() << "\n";
                    }
                }
                return all_ok ? 0 : 1;
            }
        } else if (*train) {
            env::EnvConfig cfg;
            cfg.scenario = env::resolve_scenario(train_scenario, table);
            cfg.mode = env::Mode::DecisionTree;
            nlohmann::json opponent;
            if (train_opponent.find(',') == std::string::npos) {
                opponent = train_opponent;
            } else {
                nlohmann::json entries = nlohmann::json::array();
                std::stringstream ss(train_opponent);
                std::string item;
                while (std::getline(ss, item, ',')) entries.push_back(item);
                opponent = nlohmann::json{{"scripts", entries}};
            }
            cfg.opponent_mixture = env::mixture_from_json(opponent);
            auto result = learn::train(cfg, table, learner_cfg, train_seed);
            learn::save_model(result.model, train_model_out);
            std::cout << "trained " << result.model.table.size() << " entries; final eval "
                      << result.curve.back().win_rate << "\nwrote " << train_model_out << "\n";
            if (!train_curve_out.empty()) {
                nlohmann::json curve = nlohmann::json::array();
                std::vector<double> raw;
                for (const auto& p : result.curve) raw.push_back(p.win_rate);
                auto smoothed = eval::smooth_series(raw, 0.6);
                for (size_t i = 0; i < result.curve.size(); ++i) {
                    curve.push_back({{"env_steps", result.curve[i].env_steps},
                                     {"win_rate", result.curve[i].win_rate},
                                     {"smoothed", smoothed[i]}});
                }
                write_file(train_curve_out, curve.dump(2) + "\n");
                std::cout << "wrote " << train_curve_out << "\n";
            }
        } else if (*sg) {
            auto scenario = env::resolve_scenario(sg_scenario, table);
            sg_options.transcript_path = sg_transcript;
            std::unique_ptr<gen::TextProvider> provider;
            if (sg_provider == "mock") {
                provider = std::make_unique<gen::MockProvider>();
            } else if (sg_provider == "http") {
                gen::HttpProviderConfig pc;
                if (!sg_endpoint.empty()) pc.endpoint = sg_endpoint;
                pc.model = sg_model;
                provider = std::make_unique<gen::HttpProvider>(pc);
            } else {
                throw ConfigError("unknown provider '" + sg_provider + "'");
            }
            auto result = gen::refine_loop(*provider, scenario, table, sg_options);
            std::cout << "iterations " << result.state.history.size() << ", converged "
                      << (result.state.converged ? "yes" : "no") << "\n";
            for (const auto& r : result.state.history) {
                std::cout << "  iter " << r.iteration << ": red " << r.p1_win << ", blue "
                          << r.p2_win << "\n";
            }
            std::cout << "accepted opponent script:\n" << result.accepted.text;
            if (!sg_out.empty()) {
                write_file(sg_out, result.accepted.text);
                std::cout << "wrote " << sg_out << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
