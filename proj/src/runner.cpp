#include "verbatim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "verbatim/errors.hpp"
#include "verbatim/util.hpp"

namespace fs = std::filesystem;

namespace verbatim {

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Cell {
    const ProviderSetup* setup;
    std::string model;
    AttackId attack;
    std::optional<std::size_t> prefix_tokens;
    const Article* article;

    CellKey key() const {
        return CellKey{setup->name, model, attack, prefix_tokens, article->id};
    }
};

// Append-only record sink. Each record is one full line written and
// flushed in a single call, so a crash can tear at most the final line.
class RecordWriter {
  public:
    RecordWriter(const std::string& path, std::size_t capacity) : capacity_(capacity) {
        // A crash can leave a torn final line without a newline; terminate
        // it so appended records start on their own line and the tolerant
        // reader can skip the torn one.
        if (fs::exists(path) && fs::file_size(path) > 0) {
            std::ifstream peek(path, std::ios::binary);
            peek.seekg(-1, std::ios::end);
            char last = '\n';
            peek.get(last);
            if (last != '\n') {
                std::ofstream fix(path, std::ios::binary | std::ios::app);
                fix.put('\n');
            }
        }
        out_.open(path, std::ios::binary | std::ios::app);
        if (!out_) throw IoError("cannot open record store for append: " + path);
    }

    // False once the capacity budget is exhausted (simulated kill).
    bool append(const ExperimentRecord& record) {
        const std::string line = record.to_json_line() + "\n";
        std::lock_guard lock(mu_);
        if (capacity_ != 0 && written_ >= capacity_) return false;
        out_.write(line.data(), static_cast<std::streamsize>(line.size()));
        out_.flush();
        if (!out_) throw IoError("error appending to record store");
        ++written_;
        return true;
    }

    std::size_t written() const { return written_; }

  private:
    std::ofstream out_;
    std::mutex mu_;
    std::size_t capacity_;
    std::size_t written_ = 0;
};

Corpus load_corpora(const RunConfig& config) {
    Corpus all;
    for (const auto& [category, path] : config.corpus_paths) {
        Corpus c = Corpus::load_jsonl(path);
        for (const auto& a : c.articles()) {
            if (a.category != category) {
                throw ConfigError("article '" + a.id + "' in " + path + " has category '" +
                                  std::string(category_name(a.category)) +
                                  "' but the config maps this corpus to '" +
                                  std::string(category_name(category)) + "'");
            }
        }
        all.merge(c);
    }
    return all;
}

nlohmann::ordered_json build_manifest(const RunConfig& config, const AttackTemplates& templates,
                                      const RefusalPatterns& patterns) {
    nlohmann::ordered_json m;
    m["tool"] = "verbatim";
    m["version"] = kToolVersion;
    m["config_hash"] = to_hex(config.config_hash());
    m["template_digest"] = to_hex(templates.digest());
    m["refusal_digest"] = to_hex(patterns.digest());
    nlohmann::ordered_json corpus_hashes = nlohmann::ordered_json::object();
    for (const auto& [category, path] : config.corpus_paths) {
        corpus_hashes[std::string(category_name(category))] = to_hex(fnv1a64(read_file(path)));
    }
    m["corpus_hashes"] = std::move(corpus_hashes);
    m["embedding_backend"] = default_embedding_backend().id();
    m["config"] = config.to_json();
    return m;
}

std::shared_ptr<Provider> build_provider(const ProviderSetup& setup, const Corpus& corpus) {
    if (setup.kind == ProviderSetup::Kind::Mock) {
        auto mock = mock_configure(setup.mock, &corpus, setup.name);
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

void print_conversation(std::ostream& out, const CellKey& key, const Conversation& conv) {
    static std::mutex mu;
    std::lock_guard lock(mu);
    out << "=== " << key.canonical() << " ===\n";
    for (const auto& m : conv.messages) {
        out << "[" << role_name(m.role) << "] " << m.content << "\n";
    }
    out << "\n";
}

RunStats execute(const RunConfig& config, const RunOptions& options, bool resuming) {
    if (config.output_dir.empty()) throw ConfigError("output_dir is required");
    if (config.providers.empty()) throw ConfigError("at least one provider is required");

    const Corpus corpus = load_corpora(config);
    const AttackTemplates templates = config.templates_dir.empty()
                                          ? AttackTemplates::builtin()
                                          : AttackTemplates::load_dir(config.templates_dir);
    const RefusalPatterns patterns = config.refusal_patterns_path.empty()
                                         ? RefusalPatterns::defaults()
                                         : RefusalPatterns::load(config.refusal_patterns_path);

    const fs::path dir(config.output_dir);
    const std::string records_path = (dir / kRecordsFileName).string();
    const std::string manifest_path = (dir / kManifestFileName).string();

    if (!options.dry_run) {
        fs::create_directories(dir);
        if (!resuming) {
            if (fs::exists(records_path)) {
                throw ConfigError("record store already exists at " + records_path +
                                  "; use resume to continue it");
            }
            write_file(manifest_path, build_manifest(config, templates, patterns).dump(2) + "\n");
        }
    }

    // Cells already on disk are never re-attempted.
    std::unordered_set<std::string> completed;
    if (resuming && fs::exists(records_path)) {
        RecordReadStats stats;
        for (const auto& r : read_records(records_path, &stats)) {
            completed.insert(r.key.canonical());
        }
    }

    // Tokenizers and providers are per-setup, built once.
    std::unordered_map<std::string, std::shared_ptr<Provider>> providers;
    std::unordered_map<std::string, TokenizerSpec> tokenizers;
    for (const auto& setup : config.providers) {
        if (providers.contains(setup.name)) {
            throw ConfigError("duplicate provider name '" + setup.name + "'");
        }
        providers[setup.name] = options.dry_run ? nullptr : build_provider(setup, corpus);
        tokenizers.emplace(setup.name, setup.tokenizer_spec());
    }

    std::vector<Cell> cells;
    for (const auto& setup : config.providers) {
        for (const auto& model : setup.models) {
            for (const auto attack : config.attacks) {
                for (const auto& article : corpus.articles()) {
                    if (attack == AttackId::A3) {
                        for (const auto prefix : config.prefix_sizes) {
                            cells.push_back({&setup, model, attack, prefix, &article});
                        }
                    } else {
                        cells.push_back({&setup, model, attack, std::nullopt, &article});
                    }
                }
            }
        }
    }

    RunStats stats;
    stats.cells_planned = cells.size();

    std::vector<Cell> pending;
    pending.reserve(cells.size());
    for (auto& cell : cells) {
        if (completed.contains(cell.key().canonical())) {
            ++stats.skipped_existing;
        } else {
            pending.push_back(cell);
        }
    }

    // Decorrelate article order from category for provider-side caches.
    std::mt19937_64 shuffle_rng(config.seed);
    std::shuffle(pending.begin(), pending.end(), shuffle_rng);

    std::unique_ptr<RecordWriter> writer;
    if (!options.dry_run) {
        writer = std::make_unique<RecordWriter>(records_path, options.stop_after_records);
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> cancelled{false};
    std::atomic<std::size_t> ok_count{0}, error_count{0};
    std::mutex fatal_mu;
    std::exception_ptr fatal;

    const auto worker = [&] {
        while (!cancelled.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            const Cell& cell = pending[i];
            ExperimentRecord record;
            record.key = cell.key();
            record.category = cell.article->category;
            try {
                auto built = build_attack(cell.attack, *cell.article, cell.prefix_tokens,
                                          tokenizers.at(cell.setup->name), templates);
                auto conv =
                    adapt_for_provider(std::move(built.conversation), cell.setup->constraints,
                                       templates);
                record.conversation_digest = to_hex(conv.digest());
                if (options.dry_run) {
                    print_conversation(options.dry_run_sink ? *options.dry_run_sink : std::cout,
                                       record.key, conv);
                    continue;
                }
                CompletionParams params = config.params;
                params.model = cell.model;
                auto completion = providers.at(cell.setup->name)->complete(conv, params);
                auto metrics = evaluate_all(completion.text, built.expected_completion);
                record.verdict = classify(completion, metrics, patterns);
                record.completion = std::move(completion);
                record.metrics = metrics;
            } catch (const Timeout& e) {
                record.error_class = "Timeout";
                record.error_message = e.what();
            } catch (const RateLimited& e) {
                record.error_class = "RateLimited";
                record.error_message = e.what();
            } catch (const AuthError& e) {
                record.error_class = "AuthError";
                record.error_message = e.what();
            } catch (const MalformedResponse& e) {
                record.error_class = "MalformedResponse";
                record.error_message = e.what();
            } catch (const TextTooShort& e) {
                record.error_class = "TextTooShort";
                record.error_message = e.what();
            } catch (const Error& e) {
                record.error_class = "Error";
                record.error_message = e.what();
            } catch (...) {
                std::lock_guard lock(fatal_mu);
                if (!fatal) fatal = std::current_exception();
                cancelled.store(true);
                return;
            }
            if (options.dry_run) continue;
            if (!writer->append(record)) {
                cancelled.store(true);  // simulated kill: budget exhausted
                return;
            }
            if (record.ok()) {
                ok_count.fetch_add(1);
            } else {
                error_count.fetch_add(1);
            }
        }
    };

    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(config.concurrency,
                                        static_cast<unsigned>(std::max<std::size_t>(
                                            1, pending.size()))));
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (fatal) std::rethrow_exception(fatal);

    stats.written_ok = ok_count.load();
    stats.written_error = error_count.load();
    if (!options.quiet) {
        std::cerr << "cells planned " << stats.cells_planned << ", skipped "
                  << stats.skipped_existing << ", written " << stats.written() << " ("
                  << stats.written_error << " errors)\n";
    }
    return stats;
}

}  // namespace

RunStats run_grid(const RunConfig& config, const RunOptions& options) {
    return execute(config, options, /*resuming=*/false);
}

RunStats resume(const std::string& run_dir, const std::optional<RunConfig>& expected,
                const RunOptions& options) {
    const fs::path dir(run_dir);
    const std::string manifest_path = (dir / kManifestFileName).string();
    if (!fs::exists(manifest_path)) {
        throw ManifestMismatch("no manifest at " + manifest_path);
    }
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw ManifestMismatch(std::string("manifest is not valid JSON: ") + e.what());
    }
    RunConfig config = RunConfig::from_json(manifest.at("config"));
    const std::string recorded_hash = manifest.value("config_hash", "");
    if (to_hex(config.config_hash()) != recorded_hash) {
        throw ManifestMismatch("manifest config_hash does not match its embedded config");
    }
    if (expected && to_hex(expected->config_hash()) != recorded_hash) {
        throw ManifestMismatch(
            "supplied config differs from the one this run was started with");
    }
    const AttackTemplates templates = config.templates_dir.empty()
                                          ? AttackTemplates::builtin()
                                          : AttackTemplates::load_dir(config.templates_dir);
    if (to_hex(templates.digest()) != manifest.value("template_digest", "")) {
        throw ManifestMismatch("attack templates changed since the run started");
    }
    if (manifest.contains("corpus_hashes")) {
        for (const auto& [category, path] : config.corpus_paths) {
            const auto name = std::string(category_name(category));
            if (manifest.at("corpus_hashes").value(name, "") != to_hex(fnv1a64(read_file(path)))) {
                throw ManifestMismatch("corpus file changed since the run started: " + path);
            }
        }
    }
    config.output_dir = run_dir;  // allow a moved run directory
    return execute(config, options, /*resuming=*/true);
}

}  // namespace verbatim
