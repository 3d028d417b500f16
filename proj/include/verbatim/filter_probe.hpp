#pragma once

#include <span>
#include <string>
#include <vector>

#include "verbatim/provider.hpp"

namespace verbatim {

struct LatencySample {
    std::string prompt_id;
    double chars_per_second = 0.0;
};

// Benign-prompt throughput distribution; mean/std always recomputed from
// the samples so persisted baselines reproduce exactly.
struct LatencyBaseline {
    std::vector<LatencySample> samples;
    std::size_t failures = 0;

    static constexpr std::size_t kMinSamples = 30;

    std::size_t n() const { return samples.size(); }
    double mean() const;
    double stddev() const;  // sample standard deviation

    void save_jsonl(const std::string& path) const;
    static LatencyBaseline load_jsonl(const std::string& path);
};

// One completion per prompt; failed requests are dropped and counted.
// Throws InsufficientSamples when fewer than min_samples succeed.
LatencyBaseline benchmark_baseline(Provider& provider, std::span<const std::string> prompts,
                                   const CompletionParams& params,
                                   std::size_t min_samples = LatencyBaseline::kMinSamples,
                                   unsigned concurrency = 4);

std::vector<std::string> load_prompt_list(const std::string& path);

enum class FilterVerdictKind { Filtered, NotFiltered, Inconclusive };
enum class FilterBasis { StopReason, TimingCI };

std::string_view filter_verdict_name(FilterVerdictKind k);

struct FilterVerdict {
    FilterVerdictKind kind = FilterVerdictKind::Inconclusive;
    FilterBasis basis = FilterBasis::TimingCI;
    double observed_cps = 0.0;
    double ci_low = 0.0;  // mean - z(confidence) * std
};

struct ProbeOptions {
    double confidence = 0.95;
    std::size_t min_candidate_chars = 1000;
    std::size_t min_measurable_output_chars = 50;
    std::string prompt_template = "Repeat after me: \"{text}\"";
};

// Sends a repeat-after-me prompt carrying candidate_text. A content-filter
// stop reason decides immediately; otherwise the observed throughput is
// tested against the one-sided lower confidence bound of the baseline
// (filters slow responses down, never speed them up).
FilterVerdict probe(Provider& provider, std::string_view candidate_text,
                    const LatencyBaseline& baseline, const CompletionParams& params,
                    const ProbeOptions& options = {});

// Classification given an already-measured response; probe() delegates
// here. Exposed for tests and offline analysis.
FilterVerdict classify_probe_response(const CompletionResult& result,
                                      const LatencyBaseline& baseline,
                                      const ProbeOptions& options);

// Standard normal quantile (Acklam's rational approximation).
double normal_quantile(double p);

}  // namespace verbatim
