#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "verbatim/record.hpp"

namespace verbatim {

// Which scalar a report op reads from a record.
enum class MetricField {
    LevenshteinNormalized,
    LcsChars,
    LccsChars,
    Bleu4,
    CosineSim,
    ExpectedLenChars,
};

std::string_view metric_field_name(MetricField f);
std::optional<double> metric_value(const ExperimentRecord& record, MetricField f);

struct GroupKey {
    std::string model;
    AttackId attack = AttackId::A1;
    Category category = Category::Arbitrary;

    auto tie() const { return std::tuple(model, static_cast<int>(attack), static_cast<int>(category)); }
    bool operator<(const GroupKey& o) const { return tie() < o.tie(); }
    bool operator==(const GroupKey& o) const { return tie() == o.tie(); }
};

struct MetricStats {
    std::optional<double> mean;    // null when n_included == 0
    std::optional<double> stddev;  // sample std, null when n_included < 2
};

struct AggregateRow {
    GroupKey key;
    std::size_t n_included = 0;
    std::size_t n_excluded = 0;
    std::map<std::string, MetricStats> stats;  // metric field name -> stats
};

struct AggregateTable {
    std::vector<AggregateRow> rows;  // sorted by key
};

// Mean and sample standard deviation per metric per (model, attack,
// category) group, over Included records only.
AggregateTable aggregate(std::span<const ExperimentRecord> records);

// Exact-rational exclusion accounting per group.
struct ExclusionRow {
    GroupKey key;
    std::size_t n_total = 0;  // classified records (errors counted apart)
    std::size_t n_excluded = 0;
    std::size_t n_content_filter = 0;
    std::size_t n_refusal = 0;
    std::size_t n_zero_similarity = 0;
    std::size_t n_transport_error = 0;  // not part of n_total
    bool empty_group = false;
};

std::vector<ExclusionRow> exclusion_rates(std::span<const ExperimentRecord> records);

// Display rounding used by the tables: half-up to integer percent.
int percent_display(std::size_t numerator, std::size_t denominator);

// Pearson product-moment correlation; null when either variance is 0.
std::optional<double> pearson_xy(std::span<const double> x, std::span<const double> y);

struct CorrelationRow {
    std::string model;
    Category category = Category::Arbitrary;
    std::optional<double> r;
    std::size_t n = 0;
};

struct CorrelationReport {
    MetricField x;
    MetricField y;
    std::vector<CorrelationRow> rows;
};

// r per (model, category) group over Included records carrying both
// fields. Groups with n < 3 report null.
CorrelationReport pearson(std::span<const ExperimentRecord> records, MetricField x,
                          MetricField y);

enum class SweepAxis { PrefixTokens, ModelParams };

struct SweepPoint {
    double axis_value = 0.0;
    Category category = Category::Arbitrary;
    std::optional<double> mean;
    std::optional<double> stddev;
    std::size_t n = 0;
};

// Mean +- std band of one metric over Included records, per category and
// axis value. ModelParams takes sizes (in billions) from model_params_b
// and throws MissingModelSize for swept models absent from the map.
std::vector<SweepPoint> sweep_series(std::span<const ExperimentRecord> records, SweepAxis axis,
                                     MetricField metric,
                                     const std::map<std::string, double>* model_params_b);

// File emitters. All full precision except the .md table, which uses the
// display rounding.
void export_aggregate_csv(const AggregateTable& table, const std::string& path);
void export_aggregate_json(const AggregateTable& table, const std::string& path);
AggregateTable import_aggregate_json(const std::string& path);
void export_aggregate_markdown(const AggregateTable& table, const std::string& path);
void export_exclusions_csv(const std::vector<ExclusionRow>& rows, const std::string& path);
void export_correlations_csv(const std::vector<CorrelationReport>& reports,
                             const std::string& path);
void export_sweep_csv(const std::vector<SweepPoint>& points, std::string_view axis_name,
                      const std::string& path);

// Everything the report subcommand writes, in one call.
void write_report_files(std::span<const ExperimentRecord> records,
                        const std::map<std::string, double>& model_params_b,
                        const std::string& out_dir);

}  // namespace verbatim
