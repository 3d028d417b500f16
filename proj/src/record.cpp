#include "verbatim/record.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

using nlohmann::json;
using nlohmann::ordered_json;

std::string CellKey::canonical() const {
    char prefix_part[16];
    std::snprintf(prefix_part, sizeof prefix_part, "%08zu",
                  prefix_tokens.value_or(std::size_t(0)));
    std::string out;
    out.reserve(provider.size() + model.size() + article_id.size() + 24);
    out += provider;
    out += '|';
    out += model;
    out += '|';
    out += attack_name(attack);
    out += '|';
    out += prefix_part;
    out += '|';
    out += article_id;
    return out;
}

std::string ExperimentRecord::to_json_line() const {
    ordered_json j;
    j["provider"] = key.provider;
    j["model"] = key.model;
    j["attack"] = std::string(attack_name(key.attack));
    if (key.prefix_tokens) {
        j["prefix_tokens"] = *key.prefix_tokens;
    } else {
        j["prefix_tokens"] = nullptr;
    }
    j["article_id"] = key.article_id;
    j["category"] = std::string(category_name(category));
    j["conversation_digest"] = conversation_digest;
    j["status"] = ok() ? "ok" : "error";
    if (!ok()) {
        j["error_class"] = error_class;
        j["error_message"] = error_message;
    }
    if (completion) {
        ordered_json c;
        c["text"] = completion->text;
        c["stop_reason"] = std::string(stop_reason_name(completion->stop_reason));
        c["stop_reason_raw"] = completion->stop_reason_raw;
        c["latency_us"] = completion->latency.count();
        c["first_byte_us"] = completion->first_byte_latency.count();
        c["output_chars"] = completion->output_chars;
        if (completion->output_tokens) {
            c["output_tokens"] = *completion->output_tokens;
        } else {
            c["output_tokens"] = nullptr;
        }
        c["request_id"] = completion->request_id;
        c["sent_at_ms"] = completion->sent_at_ms;
        c["received_at_ms"] = completion->received_at_ms;
        j["completion"] = std::move(c);
    }
    if (metrics) {
        ordered_json m;
        m["levenshtein_normalized"] = metrics->levenshtein_normalized;
        m["lcs_chars"] = metrics->lcs_chars;
        m["lccs_chars"] = metrics->lccs_chars;
        m["bleu4"] = metrics->bleu4;
        m["cosine_sim"] = metrics->cosine_sim;
        m["expected_len_chars"] = metrics->expected_len_chars;
        m["output_len_chars"] = metrics->output_len_chars;
        j["metrics"] = std::move(m);
    }
    if (verdict) {
        j["verdict"] = std::string(verdict_kind_name(verdict->kind));
        j["verdict_evidence"] = verdict->evidence;
    }
    return j.dump();
}

ExperimentRecord ExperimentRecord::from_json_line(const std::string& line) {
    const json j = json::parse(line);
    ExperimentRecord r;
    r.key.provider = j.at("provider").get<std::string>();
    r.key.model = j.at("model").get<std::string>();
    auto attack = attack_from_name(j.at("attack").get<std::string>());
    if (!attack) throw Error("record has unknown attack id");
    r.key.attack = *attack;
    if (!j.at("prefix_tokens").is_null()) {
        r.key.prefix_tokens = j.at("prefix_tokens").get<std::size_t>();
    }
    r.key.article_id = j.at("article_id").get<std::string>();
    auto cat = category_from_name(j.at("category").get<std::string>());
    if (!cat) throw Error("record has unknown category");
    r.category = *cat;
    r.conversation_digest = j.value("conversation_digest", "");
    if (j.value("status", "ok") == "error") {
        r.error_class = j.value("error_class", "Error");
        r.error_message = j.value("error_message", "");
    }
    if (j.contains("completion")) {
        const auto& c = j.at("completion");
        CompletionResult res;
        res.text = c.at("text").get<std::string>();
        const auto stop = c.at("stop_reason").get<std::string>();
        if (stop == "length") {
            res.stop_reason = StopReason::Length;
        } else if (stop == "stop") {
            res.stop_reason = StopReason::Stop;
        } else if (stop == "content_filter") {
            res.stop_reason = StopReason::ContentFilter;
        } else {
            res.stop_reason = StopReason::Other;
        }
        res.stop_reason_raw = c.value("stop_reason_raw", "");
        res.latency = std::chrono::microseconds(c.at("latency_us").get<std::int64_t>());
        res.first_byte_latency =
            std::chrono::microseconds(c.value("first_byte_us", std::int64_t(0)));
        res.output_chars = c.at("output_chars").get<std::size_t>();
        if (c.contains("output_tokens") && !c.at("output_tokens").is_null()) {
            res.output_tokens = c.at("output_tokens").get<std::size_t>();
        }
        res.request_id = c.value("request_id", "");
        res.sent_at_ms = c.value("sent_at_ms", std::int64_t(0));
        res.received_at_ms = c.value("received_at_ms", std::int64_t(0));
        r.completion = std::move(res);
    }
    if (j.contains("metrics")) {
        const auto& m = j.at("metrics");
        MetricReport mr;
        mr.levenshtein_normalized = m.at("levenshtein_normalized").get<double>();
        mr.lcs_chars = m.at("lcs_chars").get<std::size_t>();
        mr.lccs_chars = m.at("lccs_chars").get<std::size_t>();
        mr.bleu4 = m.at("bleu4").get<double>();
        mr.cosine_sim = m.at("cosine_sim").get<double>();
        mr.expected_len_chars = m.at("expected_len_chars").get<std::size_t>();
        mr.output_len_chars = m.at("output_len_chars").get<std::size_t>();
        r.metrics = mr;
    }
    if (j.contains("verdict")) {
        ExclusionVerdict v;
        auto kind = verdict_kind_from_name(j.at("verdict").get<std::string>());
        if (!kind) throw Error("record has unknown verdict kind");
        v.kind = *kind;
        v.evidence = j.value("verdict_evidence", "");
        r.verdict = v;
    }
    return r;
}

std::vector<ExperimentRecord> read_records(const std::string& path, RecordReadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open record store: " + path);
    std::vector<ExperimentRecord> out;
    std::string line;
    RecordReadStats local;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
            out.push_back(ExperimentRecord::from_json_line(line));
            ++local.parsed;
        } catch (const std::exception&) {
            ++local.bad_lines;
        }
    }
    if (stats != nullptr) *stats = local;
    return out;
}

void sort_records_canonical(std::vector<ExperimentRecord>& records) {
    std::sort(records.begin(), records.end(),
              [](const ExperimentRecord& a, const ExperimentRecord& b) {
                  return a.key.canonical() < b.key.canonical();
              });
}

std::pair<std::size_t, std::size_t> compact_records(const std::string& path) {
    RecordReadStats stats;
    const auto records = read_records(path, &stats);
    std::unordered_set<std::string> seen;
    std::vector<const ExperimentRecord*> kept;
    kept.reserve(records.size());
    std::size_t duplicates = 0;
    for (const auto& r : records) {
        if (seen.insert(r.key.canonical()).second) {
            kept.push_back(&r);
        } else {
            ++duplicates;
        }
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        for (const auto* r : kept) out << r->to_json_line() << '\n';
    }
    std::filesystem::rename(tmp, path);
    return {kept.size(), duplicates + stats.bad_lines};
}

}  // namespace verbatim
