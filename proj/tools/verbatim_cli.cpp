// verbatim: measure verbatim memorization of a reference corpus in
// chat-completion models.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

#include "verbatim/corpus.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/filter_probe.hpp"
#include "verbatim/mock_server.hpp"
#include "verbatim/report.hpp"
#include "verbatim/runner.hpp"
#include "verbatim/util.hpp"

namespace {

using namespace verbatim;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitPartialFailures = 2;

std::shared_ptr<Provider> provider_from_config(const RunConfig& config,
                                               const std::string& provider_name,
                                               const Corpus* corpus) {
    for (const auto& setup : config.providers) {
        if (setup.name != provider_name) continue;
        if (setup.kind == ProviderSetup::Kind::Mock) {
            auto mock = mock_configure(setup.mock, corpus, setup.name);
            mock->set_constraints(setup.constraints);
            return mock;
        }
        HttpProviderConfig http;
        http.name = setup.name;
        http.dialect = setup.dialect;
        http.base_url = setup.base_url;
        http.api_key_env = setup.api_key_env;
        http.constraints = setup.constraints;
        http.retry = setup.retry;
        return std::make_shared<HttpProvider>(std::move(http));
    }
    throw ConfigError("no provider named '" + provider_name + "' in the config");
}

int cmd_ingest(const std::string& input_dir, const std::string& category_name_arg,
               const std::string& output, std::size_t min_body_chars, bool ascii_fold,
               bool no_strip) {
    const auto category = category_from_name(category_name_arg);
    if (!category) {
        std::cerr << "unknown category '" << category_name_arg
                  << "' (expected lawsuit, arbitrary or new)\n";
        return kExitConfigError;
    }
    NormalizeOptions opts = NormalizeOptions::defaults();
    opts.min_body_chars = min_body_chars;
    opts.ascii_fold = ascii_fold;
    opts.apply_strip_patterns = !no_strip;
    const Corpus corpus = Corpus::load_dir(input_dir, *category, opts);
    corpus.save_jsonl(output);
    std::cout << "ingested " << corpus.size() << " article(s) into " << output << "\n";
    return kExitOk;
}

int finish_run(const RunStats& stats, bool dry_run) {
    if (dry_run) {
        std::cout << "dry run: " << stats.cells_planned << " cell(s) printed, nothing sent\n";
        return kExitOk;
    }
    std::cout << "cells planned: " << stats.cells_planned
              << ", skipped (already recorded): " << stats.skipped_existing
              << ", written: " << stats.written() << " (" << stats.written_error
              << " error record(s))\n";
    return stats.written_error > 0 ? kExitPartialFailures : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verbatim - context-manipulation memorization harness"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize raw article files into corpus JSONL");
    std::string ingest_input, ingest_category, ingest_output;
    std::size_t ingest_min_chars = 500;
    bool ingest_ascii_fold = false, ingest_no_strip = false;
    ingest->add_option("--input", ingest_input, "directory of article files")->required();
    ingest->add_option("--category", ingest_category, "lawsuit | arbitrary | new")->required();
    ingest->add_option("--output", ingest_output, "corpus JSONL path")->required();
    ingest->add_option("--min-body-chars", ingest_min_chars, "minimum article text length");
    ingest->add_flag("--ascii-fold", ingest_ascii_fold, "fold typographic punctuation to ASCII");
    ingest->add_flag("--no-strip", ingest_no_strip, "disable caption strip patterns");

    // run
    auto* run = app.add_subcommand("run", "run the attack grid");
    std::string run_config_path, run_output;
    std::uint64_t run_seed = 0;
    unsigned run_concurrency = 0;
    bool run_dry = false, run_seed_set = false;
    run->add_option("--config", run_config_path, "run config JSON")->required();
    run->add_option("--output", run_output, "override output_dir");
    run->add_option("--seed", run_seed, "override seed")->each([&](const std::string&) {
        run_seed_set = true;
    });
    run->add_option("--concurrency", run_concurrency, "override worker count");
    run->add_flag("--dry-run", run_dry, "print conversations without sending");

    // resume
    auto* resume_cmd = app.add_subcommand("resume", "continue an interrupted run");
    std::string resume_dir, resume_config_path;
    resume_cmd->add_option("--run-dir", resume_dir, "run directory with manifest.json")
        ->required();
    resume_cmd->add_option("--config", resume_config_path,
                           "config to verify against the manifest");

    // baseline
    auto* baseline_cmd =
        app.add_subcommand("baseline", "benchmark benign-prompt output speed");
    std::string bl_config, bl_provider, bl_model, bl_prompts, bl_out;
    unsigned bl_concurrency = 4;
    baseline_cmd->add_option("--config", bl_config, "run config JSON")->required();
    baseline_cmd->add_option("--provider", bl_provider, "provider name from the config")
        ->required();
    baseline_cmd->add_option("--model", bl_model, "model name")->required();
    baseline_cmd->add_option("--prompts", bl_prompts, "benign prompt list, one per line")
        ->required();
    baseline_cmd->add_option("--out", bl_out, "baseline JSONL output")->required();
    baseline_cmd->add_option("--concurrency", bl_concurrency, "parallel requests");

    // probe-filter
    auto* probe_cmd = app.add_subcommand("probe-filter", "detect an output filter");
    std::string pf_config, pf_provider, pf_model, pf_baseline, pf_text, pf_text_file;
    double pf_confidence = 0.95;
    probe_cmd->add_option("--config", pf_config, "run config JSON")->required();
    probe_cmd->add_option("--provider", pf_provider, "provider name from the config")->required();
    probe_cmd->add_option("--model", pf_model, "model name")->required();
    probe_cmd->add_option("--baseline", pf_baseline, "baseline JSONL from 'baseline'")
        ->required();
    probe_cmd->add_option("--text", pf_text, "candidate text");
    probe_cmd->add_option("--text-file", pf_text_file, "file with candidate text");
    probe_cmd->add_option("--confidence", pf_confidence, "one-sided confidence level");

    // report
    auto* report_cmd = app.add_subcommand("report", "aggregate records into tables");
    std::string rp_records, rp_out_dir, rp_config;
    report_cmd->add_option("--records", rp_records, "records JSONL")->required();
    report_cmd->add_option("--out-dir", rp_out_dir, "report output directory")->required();
    report_cmd->add_option("--config", rp_config, "config JSON (for model parameter counts)");

    // compact
    auto* compact_cmd =
        app.add_subcommand("compact", "drop torn and duplicate lines from a record store");
    std::string cp_records;
    compact_cmd->add_option("--records", cp_records, "records JSONL")->required();

    // mock-serve
    auto* serve_cmd =
        app.add_subcommand("mock-serve", "serve a mock provider over local HTTP");
    std::string ms_config, ms_provider, ms_corpus;
    serve_cmd->add_option("--config", ms_config, "run config JSON")->required();
    serve_cmd->add_option("--provider", ms_provider, "mock provider name")->required();
    serve_cmd->add_option("--corpus", ms_corpus, "corpus JSONL the mock should know");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            return cmd_ingest(ingest_input, ingest_category, ingest_output, ingest_min_chars,
                              ingest_ascii_fold, ingest_no_strip);
        }
        if (*run) {
            RunConfig config = RunConfig::load(run_config_path);
            if (!run_output.empty()) config.output_dir = run_output;
            if (run_seed_set) config.seed = run_seed;
            if (run_concurrency > 0) config.concurrency = run_concurrency;
            RunOptions options;
            options.dry_run = run_dry;
            options.quiet = false;
            return finish_run(run_grid(config, options), run_dry);
        }
        if (*resume_cmd) {
            std::optional<RunConfig> expected;
            if (!resume_config_path.empty()) expected = RunConfig::load(resume_config_path);
            RunOptions options;
            options.quiet = false;
            return finish_run(resume(resume_dir, expected, options), false);
        }
        if (*baseline_cmd) {
            const RunConfig config = RunConfig::load(bl_config);
            auto provider = provider_from_config(config, bl_provider, nullptr);
            const auto prompts = load_prompt_list(bl_prompts);
            CompletionParams params = config.params;
            params.model = bl_model;
            const auto baseline = benchmark_baseline(*provider, prompts, params,
                                                     LatencyBaseline::kMinSamples, bl_concurrency);
            baseline.save_jsonl(bl_out);
            std::cout << "baseline: n=" << baseline.n() << " mean=" << baseline.mean()
                      << " cps, std=" << baseline.stddev() << " cps, failures dropped="
                      << baseline.failures << "\n";
            return kExitOk;
        }
        if (*probe_cmd) {
            if (pf_text.empty() == pf_text_file.empty()) {
                std::cerr << "provide exactly one of --text / --text-file\n";
                return kExitConfigError;
            }
            const RunConfig config = RunConfig::load(pf_config);
            auto provider = provider_from_config(config, pf_provider, nullptr);
            const auto baseline = LatencyBaseline::load_jsonl(pf_baseline);
            CompletionParams params = config.params;
            params.model = pf_model;
            ProbeOptions options;
            options.confidence = pf_confidence;
            const std::string text = pf_text.empty() ? read_file(pf_text_file) : pf_text;
            const auto verdict = probe(*provider, text, baseline, params, options);
            std::cout << filter_verdict_name(verdict.kind) << " (basis "
                      << (verdict.basis == FilterBasis::StopReason ? "stop_reason" : "timing_ci")
                      << ", observed " << verdict.observed_cps << " cps, ci_low "
                      << verdict.ci_low << " cps)\n";
            return kExitOk;
        }
        if (*report_cmd) {
            RecordReadStats stats;
            auto records = read_records(rp_records, &stats);
            sort_records_canonical(records);
            std::map<std::string, double> model_params;
            if (!rp_config.empty()) model_params = RunConfig::load(rp_config).model_params_b;
            write_report_files(records, model_params, rp_out_dir);
            std::cout << "report over " << records.size() << " record(s) written to "
                      << rp_out_dir;
            if (stats.bad_lines > 0) std::cout << " (" << stats.bad_lines << " bad line(s) skipped)";
            std::cout << "\n";
            return kExitOk;
        }
        if (*compact_cmd) {
            const auto [kept, dropped] = compact_records(cp_records);
            std::cout << "kept " << kept << " record(s), dropped " << dropped << "\n";
            return kExitOk;
        }
        if (*serve_cmd) {
            const RunConfig config = RunConfig::load(ms_config);
            Corpus corpus;
            if (!ms_corpus.empty()) corpus = Corpus::load_jsonl(ms_corpus);
            auto provider = provider_from_config(config, ms_provider,
                                                 ms_corpus.empty() ? nullptr : &corpus);
            auto mock = std::dynamic_pointer_cast<MockProvider>(provider);
            if (!mock) {
                std::cerr << "provider '" << ms_provider << "' is not a mock provider\n";
                return kExitConfigError;
            }
            MockHttpServer server(mock);
            server.start();
            std::cout << "mock provider '" << ms_provider << "' listening on "
                      << server.base_url() << " (Ctrl-C to stop)" << std::endl;
            std::this_thread::sleep_for(std::chrono::hours(24 * 365));
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ManifestMismatch& e) {
        std::cerr << "manifest mismatch: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
