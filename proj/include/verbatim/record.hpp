#pragma once

#include <optional>
#include <string>
#include <vector>

#include "verbatim/attack.hpp"
#include "verbatim/corpus.hpp"
#include "verbatim/exclusion.hpp"
#include "verbatim/metrics.hpp"
#include "verbatim/provider.hpp"

namespace verbatim {

// One grid cell: (provider, model, attack, prefix size, article).
struct CellKey {
    std::string provider;
    std::string model;
    AttackId attack = AttackId::A1;
    std::optional<std::size_t> prefix_tokens;
    std::string article_id;

    // Sortable canonical form, also used for at-most-once bookkeeping.
    std::string canonical() const;

    bool operator==(const CellKey&) const = default;
    bool operator<(const CellKey& other) const { return canonical() < other.canonical(); }
};

// One grid-cell outcome. Either completion+metrics+verdict are present
// (status "ok") or error_class/error_message describe the failure.
struct ExperimentRecord {
    CellKey key;
    Category category = Category::Arbitrary;
    std::string conversation_digest;  // hex

    std::optional<CompletionResult> completion;
    std::optional<MetricReport> metrics;
    std::optional<ExclusionVerdict> verdict;

    std::string error_class;
    std::string error_message;

    bool ok() const { return error_class.empty(); }

    std::string to_json_line() const;
    static ExperimentRecord from_json_line(const std::string& line);
};

struct RecordReadStats {
    std::size_t parsed = 0;
    std::size_t bad_lines = 0;  // crashed partial writes, skipped
};

// Tolerant JSONL reader: unparseable lines (typically one torn tail line
// after a crash) are skipped and counted.
std::vector<ExperimentRecord> read_records(const std::string& path,
                                           RecordReadStats* stats = nullptr);

void sort_records_canonical(std::vector<ExperimentRecord>& records);

// Rewrites the store keeping the first record per cell key and dropping
// unparseable lines. Returns {kept, dropped}.
std::pair<std::size_t, std::size_t> compact_records(const std::string& path);

}  // namespace verbatim
