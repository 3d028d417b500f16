#include "verbatim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

namespace {

constexpr MetricField kAllMetricFields[] = {
    MetricField::LevenshteinNormalized, MetricField::LcsChars,  MetricField::LccsChars,
    MetricField::Bleu4,                 MetricField::CosineSim, MetricField::ExpectedLenChars,
};

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

// Values are folded in sorted order, so aggregation over any permutation
// of the records produces bit-identical statistics.
struct Accum {
    std::vector<double> values;

    void add(double x) { values.push_back(x); }
    std::size_t n() const { return values.size(); }

    MetricStats stats() const {
        MetricStats s;
        if (values.empty()) return s;
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0.0;
        for (double v : sorted) sum += v;
        const double mean = sum / static_cast<double>(sorted.size());
        s.mean = mean;
        if (sorted.size() >= 2) {
            double acc = 0.0;
            for (double v : sorted) acc += (v - mean) * (v - mean);
            s.stddev = std::sqrt(acc / static_cast<double>(sorted.size() - 1));
        }
        return s;
    }
};

}  // namespace

std::string_view metric_field_name(MetricField f) {
    switch (f) {
        case MetricField::LevenshteinNormalized: return "levenshtein_normalized";
        case MetricField::LcsChars: return "lcs_chars";
        case MetricField::LccsChars: return "lccs_chars";
        case MetricField::Bleu4: return "bleu4";
        case MetricField::CosineSim: return "cosine_sim";
        case MetricField::ExpectedLenChars: return "expected_len_chars";
    }
    return "unknown";
}

std::optional<double> metric_value(const ExperimentRecord& record, MetricField f) {
    if (!record.metrics) return std::nullopt;
    const auto& m = *record.metrics;
    switch (f) {
        case MetricField::LevenshteinNormalized: return m.levenshtein_normalized;
        case MetricField::LcsChars: return static_cast<double>(m.lcs_chars);
        case MetricField::LccsChars: return static_cast<double>(m.lccs_chars);
        case MetricField::Bleu4: return m.bleu4;
        case MetricField::CosineSim: return m.cosine_sim;
        case MetricField::ExpectedLenChars: return static_cast<double>(m.expected_len_chars);
    }
    return std::nullopt;
}

AggregateTable aggregate(std::span<const ExperimentRecord> records) {
    struct RowAccum {
        std::size_t included = 0;
        std::size_t excluded = 0;
        std::map<std::string, Accum> per_metric;
    };
    std::map<GroupKey, RowAccum> groups;
    for (const auto& r : records) {
        if (!r.ok()) continue;  // transport errors live in the exclusion table
        GroupKey key{r.key.model, r.key.attack, r.category};
        auto& row = groups[key];
        const bool included = r.verdict && r.verdict->kind == VerdictKind::Included;
        if (!included) {
            ++row.excluded;
            continue;
        }
        ++row.included;
        for (const auto f : kAllMetricFields) {
            if (auto v = metric_value(r, f)) {
                row.per_metric[std::string(metric_field_name(f))].add(*v);
            }
        }
    }
    AggregateTable table;
    for (const auto& [key, acc] : groups) {
        AggregateRow row;
        row.key = key;
        row.n_included = acc.included;
        row.n_excluded = acc.excluded;
        for (const auto f : kAllMetricFields) {
            const std::string name(metric_field_name(f));
            auto it = acc.per_metric.find(name);
            row.stats[name] = it == acc.per_metric.end() ? MetricStats{} : it->second.stats();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<ExclusionRow> exclusion_rates(std::span<const ExperimentRecord> records) {
    std::map<GroupKey, ExclusionRow> groups;
    for (const auto& r : records) {
        GroupKey key{r.key.model, r.key.attack, r.category};
        auto& row = groups[key];
        row.key = key;
        if (!r.ok()) {
            ++row.n_transport_error;
            continue;
        }
        ++row.n_total;
        if (!r.verdict || r.verdict->kind == VerdictKind::Included) continue;
        ++row.n_excluded;
        switch (r.verdict->kind) {
            case VerdictKind::ContentFilter: ++row.n_content_filter; break;
            case VerdictKind::Refusal: ++row.n_refusal; break;
            case VerdictKind::ZeroSimilarity: ++row.n_zero_similarity; break;
            case VerdictKind::Included: break;
        }
    }
    std::vector<ExclusionRow> out;
    out.reserve(groups.size());
    for (auto& [key, row] : groups) {
        row.empty_group = row.n_total == 0;
        out.push_back(row);
    }
    return out;
}

int percent_display(std::size_t numerator, std::size_t denominator) {
    if (denominator == 0) return 0;
    // Half-up in exact integer arithmetic.
    return static_cast<int>((200 * numerator + denominator) / (2 * denominator));
}

std::optional<double> pearson_xy(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) return std::nullopt;
    // One pass, Welford-style compensated co-moments.
    double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ++n;
        const double dx = x[i] - mean_x;
        mean_x += dx / static_cast<double>(n);
        const double dy = y[i] - mean_y;
        mean_y += dy / static_cast<double>(n);
        m2x += dx * (x[i] - mean_x);
        m2y += dy * (y[i] - mean_y);
        cxy += dx * (y[i] - mean_y);
    }
    if (m2x <= 0.0 || m2y <= 0.0) return std::nullopt;  // degenerate variance
    return cxy / std::sqrt(m2x * m2y);
}

CorrelationReport pearson(std::span<const ExperimentRecord> records, MetricField x,
                          MetricField y) {
    struct Pair {
        std::vector<double> xs, ys;
    };
    std::map<std::pair<std::string, int>, Pair> groups;
    for (const auto& r : records) {
        if (!r.ok() || !r.verdict || r.verdict->kind != VerdictKind::Included) continue;
        const auto xv = metric_value(r, x);
        const auto yv = metric_value(r, y);
        if (!xv || !yv) continue;
        auto& g = groups[{r.key.model, static_cast<int>(r.category)}];
        g.xs.push_back(*xv);
        g.ys.push_back(*yv);
    }
    CorrelationReport report;
    report.x = x;
    report.y = y;
    for (const auto& [key, g] : groups) {
        CorrelationRow row;
        row.model = key.first;
        row.category = static_cast<Category>(key.second);
        row.n = g.xs.size();
        if (row.n >= 3) row.r = pearson_xy(g.xs, g.ys);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<SweepPoint> sweep_series(std::span<const ExperimentRecord> records, SweepAxis axis,
                                     MetricField metric,
                                     const std::map<std::string, double>* model_params_b) {
    std::map<std::pair<double, int>, Accum> groups;
    for (const auto& r : records) {
        if (!r.ok() || !r.verdict || r.verdict->kind != VerdictKind::Included) continue;
        double axis_value;
        if (axis == SweepAxis::PrefixTokens) {
            if (!r.key.prefix_tokens) continue;
            axis_value = static_cast<double>(*r.key.prefix_tokens);
        } else {
            if (model_params_b == nullptr) {
                throw MissingModelSize("model parameter-count map is required for this sweep");
            }
            auto it = model_params_b->find(r.key.model);
            if (it == model_params_b->end()) {
                throw MissingModelSize("no parameter count configured for model '" +
                                       r.key.model + "'");
            }
            axis_value = it->second;
        }
        const auto v = metric_value(r, metric);
        if (!v) continue;
        groups[{axis_value, static_cast<int>(r.category)}].add(*v);
    }
    std::vector<SweepPoint> out;
    for (const auto& [key, acc] : groups) {
        SweepPoint p;
        p.axis_value = key.first;
        p.category = static_cast<Category>(key.second);
        const auto s = acc.stats();
        p.mean = s.mean;
        p.stddev = s.stddev;
        p.n = acc.n();
        out.push_back(p);
    }
    return out;
}

void export_aggregate_csv(const AggregateTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "model,attack,category,n_included,n_excluded";
    for (const auto f : kAllMetricFields) {
        out << ',' << metric_field_name(f) << "_mean," << metric_field_name(f) << "_std";
    }
    out << '\n';
    for (const auto& row : table.rows) {
        out << csv_escape(row.key.model) << ',' << attack_name(row.key.attack) << ','
            << category_name(row.key.category) << ',' << row.n_included << ','
            << row.n_excluded;
        for (const auto f : kAllMetricFields) {
            const auto& s = row.stats.at(std::string(metric_field_name(f)));
            out << ',' << (s.mean ? fmt_full(*s.mean) : "") << ','
                << (s.stddev ? fmt_full(*s.stddev) : "");
        }
        out << '\n';
    }
}

void export_aggregate_json(const AggregateTable& table, const std::string& path) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json j;
        j["model"] = row.key.model;
        j["attack"] = std::string(attack_name(row.key.attack));
        j["category"] = std::string(category_name(row.key.category));
        j["n_included"] = row.n_included;
        j["n_excluded"] = row.n_excluded;
        nlohmann::ordered_json stats = nlohmann::ordered_json::object();
        for (const auto& [name, s] : row.stats) {
            nlohmann::ordered_json sj;
            if (s.mean) sj["mean"] = *s.mean; else sj["mean"] = nullptr;
            if (s.stddev) sj["std"] = *s.stddev; else sj["std"] = nullptr;
            stats[name] = std::move(sj);
        }
        j["stats"] = std::move(stats);
        rows.push_back(std::move(j));
    }
    write_file(path, rows.dump(2) + "\n");
}

AggregateTable import_aggregate_json(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    AggregateTable table;
    for (const auto& row_json : j) {
        AggregateRow row;
        row.key.model = row_json.at("model").get<std::string>();
        row.key.attack = *attack_from_name(row_json.at("attack").get<std::string>());
        row.key.category = *category_from_name(row_json.at("category").get<std::string>());
        row.n_included = row_json.at("n_included").get<std::size_t>();
        row.n_excluded = row_json.at("n_excluded").get<std::size_t>();
        for (const auto& [name, sj] : row_json.at("stats").items()) {
            MetricStats s;
            if (!sj.at("mean").is_null()) s.mean = sj.at("mean").get<double>();
            if (!sj.at("std").is_null()) s.stddev = sj.at("std").get<double>();
            row.stats[name] = s;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void export_aggregate_markdown(const AggregateTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    std::set<std::string> models;
    for (const auto& row : table.rows) models.insert(row.key.model);
    const auto cell = [](const MetricStats& s, int decimals) {
        if (!s.mean) return std::string("-");
        std::string v = fmt_fixed(*s.mean, decimals);
        if (s.stddev) v += " / " + fmt_fixed(*s.stddev, decimals);
        return v;
    };
    for (const auto& model : models) {
        out << "## " << model << "\n\n";
        out << "| Attack | Articles | LCCS mean/std | Cosine Sim. mean/std | LCS mean/std | "
               "Norm. Levenshtein mean/std | BLEU-4 mean/std | n |\n";
        out << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& row : table.rows) {
            if (row.key.model != model) continue;
            out << "| #" << (static_cast<int>(row.key.attack) + 1) << " | "
                << category_name(row.key.category) << " | "
                << cell(row.stats.at("lccs_chars"), 1) << " | "
                << cell(row.stats.at("cosine_sim"), 2) << " | "
                << cell(row.stats.at("lcs_chars"), 1) << " | "
                << cell(row.stats.at("levenshtein_normalized"), 2) << " | "
                << cell(row.stats.at("bleu4"), 3) << " | " << row.n_included << " |\n";
        }
        out << "\n";
    }
}

void export_exclusions_csv(const std::vector<ExclusionRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "model,attack,category,n,excluded_pct,excluded_n,content_filter_pct,content_filter_n,"
           "refusal_pct,refusal_n,zero_similarity_pct,zero_similarity_n,transport_errors,"
           "empty_group\n";
    for (const auto& r : rows) {
        out << csv_escape(r.key.model) << ',' << attack_name(r.key.attack) << ','
            << category_name(r.key.category) << ',' << r.n_total << ','
            << percent_display(r.n_excluded, r.n_total) << ',' << r.n_excluded << ','
            << percent_display(r.n_content_filter, r.n_total) << ',' << r.n_content_filter << ','
            << percent_display(r.n_refusal, r.n_total) << ',' << r.n_refusal << ','
            << percent_display(r.n_zero_similarity, r.n_total) << ',' << r.n_zero_similarity
            << ',' << r.n_transport_error << ',' << (r.empty_group ? 1 : 0) << '\n';
    }
}

void export_correlations_csv(const std::vector<CorrelationReport>& reports,
                             const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "x,y,model,category,r,n\n";
    for (const auto& report : reports) {
        for (const auto& row : report.rows) {
            out << metric_field_name(report.x) << ',' << metric_field_name(report.y) << ','
                << csv_escape(row.model) << ',' << category_name(row.category) << ','
                << (row.r ? fmt_full(*row.r) : "") << ',' << row.n << '\n';
        }
    }
}

void export_sweep_csv(const std::vector<SweepPoint>& points, std::string_view axis_name,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << axis_name << ",category,mean,std,n\n";
    for (const auto& p : points) {
        out << fmt_full(p.axis_value) << ',' << category_name(p.category) << ','
            << (p.mean ? fmt_full(*p.mean) : "") << ',' << (p.stddev ? fmt_full(*p.stddev) : "")
            << ',' << p.n << '\n';
    }
}

void write_report_files(std::span<const ExperimentRecord> records,
                        const std::map<std::string, double>& model_params_b,
                        const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    const auto table = aggregate(records);
    export_aggregate_csv(table, path("aggregate.csv"));
    export_aggregate_json(table, path("aggregate.json"));
    export_aggregate_markdown(table, path("aggregate.md"));
    export_exclusions_csv(exclusion_rates(records), path("exclusions.csv"));

    std::vector<CorrelationReport> correlations;
    correlations.push_back(pearson(records, MetricField::ExpectedLenChars, MetricField::LccsChars));
    correlations.push_back(pearson(records, MetricField::LccsChars, MetricField::Bleu4));
    correlations.push_back(
        pearson(records, MetricField::LccsChars, MetricField::LevenshteinNormalized));
    export_correlations_csv(correlations, path("correlations.csv"));

    export_sweep_csv(sweep_series(records, SweepAxis::PrefixTokens, MetricField::LccsChars,
                                  nullptr),
                     "prefix_tokens", path("sweep_prefix.csv"));
    if (!model_params_b.empty()) {
        export_sweep_csv(sweep_series(records, SweepAxis::ModelParams, MetricField::LccsChars,
                                      &model_params_b),
                         "model_params_b", path("sweep_modelsize.csv"));
    }
}

}  // namespace verbatim
