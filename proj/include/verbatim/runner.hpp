#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "verbatim/record.hpp"
#include "verbatim/run_config.hpp"

namespace verbatim {

struct RunOptions {
    bool dry_run = false;  // print conversations, send nothing, write nothing
    // Stop the writer after this many records (0 = no limit). Used to
    // simulate an interrupted run; the store stays valid for resume().
    std::size_t stop_after_records = 0;
    bool quiet = true;
    std::ostream* dry_run_sink = nullptr;  // null = stdout
};

struct RunStats {
    std::size_t cells_planned = 0;
    std::size_t skipped_existing = 0;
    std::size_t written_ok = 0;
    std::size_t written_error = 0;

    std::size_t written() const { return written_ok + written_error; }
};

inline constexpr const char* kRecordsFileName = "records.jsonl";
inline constexpr const char* kManifestFileName = "manifest.json";

// Runs the full grid (providers x models x attacks x prefix sizes x
// articles). Every cell is attempted exactly once; per-cell failures are
// durable error records, not fatal. Creates output_dir, writes the
// manifest, appends records as cells complete.
RunStats run_grid(const RunConfig& config, const RunOptions& options = {});

// Continues an interrupted run. Reads the manifest, verifies the config
// hash (against `expected` when supplied — a changed config is a
// ManifestMismatch), skips cells that already have records.
RunStats resume(const std::string& run_dir, const std::optional<RunConfig>& expected = {},
                const RunOptions& options = {});

}  // namespace verbatim
