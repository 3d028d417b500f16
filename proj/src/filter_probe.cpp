#include "verbatim/filter_probe.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/unicode.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

double LatencyBaseline::mean() const {
    if (samples.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& s : samples) sum += s.chars_per_second;
    return sum / static_cast<double>(samples.size());
}

double LatencyBaseline::stddev() const {
    if (samples.size() < 2) return 0.0;
    const double m = mean();
    double acc = 0.0;
    for (const auto& s : samples) {
        const double d = s.chars_per_second - m;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(samples.size() - 1));
}

void LatencyBaseline::save_jsonl(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write baseline file: " + path);
    for (const auto& s : samples) {
        nlohmann::ordered_json j;
        j["prompt_id"] = s.prompt_id;
        j["chars_per_second"] = s.chars_per_second;
        out << j.dump() << '\n';
    }
}

LatencyBaseline LatencyBaseline::load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open baseline file: " + path);
    LatencyBaseline b;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            b.samples.push_back(
                {j.at("prompt_id").get<std::string>(), j.at("chars_per_second").get<double>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
    return b;
}

std::vector<std::string> load_prompt_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open prompt list: " + path);
    std::vector<std::string> prompts;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) prompts.push_back(line);
    }
    return prompts;
}

LatencyBaseline benchmark_baseline(Provider& provider, std::span<const std::string> prompts,
                                   const CompletionParams& params, std::size_t min_samples,
                                   unsigned concurrency) {
    if (prompts.size() < min_samples) {
        throw InsufficientSamples("need at least " + std::to_string(min_samples) +
                                  " benign prompts, got " + std::to_string(prompts.size()));
    }
    LatencyBaseline baseline;
    baseline.samples.resize(prompts.size());
    std::vector<char> ok(prompts.size(), 0);
    std::mutex mu;
    std::size_t next = 0;

    const auto worker = [&] {
        while (true) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= prompts.size()) return;
                i = next++;
            }
            Conversation conv;
            conv.messages.push_back({Role::User, prompts[i]});
            conv.article_id.clear();
            try {
                const auto result = provider.complete(conv, params);
                if (result.output_chars > 0 && result.latency.count() > 0) {
                    baseline.samples[i] = {"prompt-" + std::to_string(i + 1),
                                           result.chars_per_second()};
                    ok[i] = 1;
                }
            } catch (const ProviderError&) {
                // dropped and counted below
            }
        }
    };

    std::vector<std::thread> threads;
    const unsigned n_threads = std::max(1u, concurrency);
    threads.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    LatencyBaseline out;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        if (ok[i]) {
            out.samples.push_back(std::move(baseline.samples[i]));
        } else {
            ++out.failures;
        }
    }
    if (out.samples.size() < min_samples) {
        throw InsufficientSamples("only " + std::to_string(out.samples.size()) + " of " +
                                  std::to_string(prompts.size()) +
                                  " baseline prompts succeeded; need " +
                                  std::to_string(min_samples));
    }
    return out;
}

double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw Error("normal_quantile: p must be inside (0, 1)");
    // Acklam's rational approximation, |relative error| < 1.15e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

FilterVerdict classify_probe_response(const CompletionResult& result,
                                      const LatencyBaseline& baseline,
                                      const ProbeOptions& options) {
    FilterVerdict v;
    v.ci_low = baseline.mean() - normal_quantile(options.confidence) * baseline.stddev();
    if (result.stop_reason == StopReason::ContentFilter) {
        v.kind = FilterVerdictKind::Filtered;
        v.basis = FilterBasis::StopReason;
        v.observed_cps = result.chars_per_second();
        return v;
    }
    v.basis = FilterBasis::TimingCI;
    if (result.output_chars < options.min_measurable_output_chars) {
        v.kind = FilterVerdictKind::Inconclusive;
        v.observed_cps = result.chars_per_second();
        return v;
    }
    v.observed_cps = result.chars_per_second();
    v.kind = v.observed_cps < v.ci_low ? FilterVerdictKind::Filtered
                                       : FilterVerdictKind::NotFiltered;
    return v;
}

FilterVerdict probe(Provider& provider, std::string_view candidate_text,
                    const LatencyBaseline& baseline, const CompletionParams& params,
                    const ProbeOptions& options) {
    if (baseline.n() < LatencyBaseline::kMinSamples) {
        throw InsufficientSamples("baseline has " + std::to_string(baseline.n()) +
                                  " samples; need at least " +
                                  std::to_string(LatencyBaseline::kMinSamples));
    }
    if (uni::char_count(candidate_text) < options.min_candidate_chars) {
        throw Error("probe candidate has fewer than " +
                    std::to_string(options.min_candidate_chars) +
                    " characters; throughput would not be measurable");
    }
    std::string prompt = options.prompt_template;
    const auto slot = prompt.find("{text}");
    if (slot == std::string::npos) throw ConfigError("probe template lacks a {text} placeholder");
    prompt.replace(slot, 6, candidate_text);

    Conversation conv;
    conv.messages.push_back({Role::User, std::move(prompt)});
    const auto result = provider.complete(conv, params);
    return classify_probe_response(result, baseline, options);
}

std::string_view filter_verdict_name(FilterVerdictKind k) {
    switch (k) {
        case FilterVerdictKind::Filtered: return "filtered";
        case FilterVerdictKind::NotFiltered: return "not_filtered";
        case FilterVerdictKind::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

}  // namespace verbatim
