#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace lrdseq {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Shortest round-trip decimal rendering (to_chars); "." separator, no
// locale dependence, deterministic across runs.
std::string format_double(double v);

// FNV-1a 64-bit over bytes.
std::uint64_t fnv1a64(const std::string& bytes);

// Hash of the canonical (key-sorted) JSON dump; covers every semantically
// meaningful field since the whole config participates.
std::string config_hash(const nlohmann::json& config);

// CSV with LF line endings. Cells are joined with ','; numbers must be
// pre-formatted via format_double.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// temp file + rename, so readers never observe partial writes
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct RunManifest {
    nlohmann::json config;
    std::string hash;
    std::uint64_t master_seed = 0;
    std::string experiment_kind;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;

    nlohmann::json to_json() const;
};

} // namespace lrdseq
