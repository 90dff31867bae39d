// output.hpp
// Snapshots, JSON run records, file naming and the config-file reader used by
// the command-line tool.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "schelling/dynamics.hpp"
#include "schelling/experiments.hpp"

namespace schelling {

inline constexpr const char* kVersion = "schelling-sim 1.0.0";

// Binary P6 image of one z-slice. Alpha nodes are red, beta nodes green, with
// brightness 128 + floor(127 * same / (2w+1)^dim), `same` being the node's
// same_type_count. A non-empty comment goes into the header as '# comment'.
void write_ppm(std::ostream& out, const Configuration& config, int z = 0, const std::string& comment = {});

// Standard base64 with padding.
std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// One bit per node in id order, least significant bit first, 1 = alpha.
std::vector<std::uint8_t> pack_config(const Configuration& config);
Configuration unpack_config(const ModelParams& params, const std::vector<std::uint8_t>& bytes);

nlohmann::json params_json(const ModelParams& params);

struct RunRecordOptions {
    double epsilon = 0.1;
    bool embed_final = false;
};

// version, params, seed, order, per-stage reports, termination flag, label and
// optionally the base64 final configuration.
nlohmann::json run_record_json(const Configuration& initial, const RunResult& result, const RunOptions& options,
                               const RunRecordOptions& record = {});

nlohmann::json trial_stats_json(const ModelParams& params, const TrialStats& stats);

// "d2_n600_w5_ta0.44_tb0.42" (decimal when exact in at most 12 digits,
// otherwise p-q).
std::string params_stem(const ModelParams& params);

// Writes to `path + ".partial"` and renames onto `path` on commit(). If the
// writer is destroyed without commit, or any write fails, the .partial file
// is left behind and commit() throws std::runtime_error.
class OutputFile {
public:
    explicit OutputFile(std::filesystem::path path);
    ~OutputFile();
    OutputFile(const OutputFile&) = delete;
    OutputFile& operator=(const OutputFile&) = delete;

    std::ostream& stream() { return out_; }
    void commit();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::filesystem::path partial_;
    std::ofstream out_;
    bool committed_ = false;
};

// Reads `key = value` lines; blank lines and lines starting with '#' are
// skipped. Throws std::runtime_error on unreadable files or lines without
// '=' (the message names the line).
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

}  // namespace schelling
