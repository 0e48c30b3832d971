#pragma once

// Serialization: fields as {k: [re, im]} JSON maps or CSV grid samples
// (resampled spectrally on ingest), CSV writing with a fixed 17-significant-
// digit format, and the FNV-1a checksum used by run manifests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sww/spectral.hpp"

namespace sww {

nlohmann::json field_to_json(const PeriodicField& f);
PeriodicField field_from_json(const nlohmann::json& j, const SpectralConfig& cfg);

nlohmann::json state_to_json(const State& u);
State state_from_json(const nlohmann::json& j, const SpectralConfig& cfg);

// Uniform samples over [0, 2pi); needs at least 2 n_modes + 2 rows.
PeriodicField field_from_samples(const std::vector<double>& values, const SpectralConfig& cfg);

// CSV with rows "x,value" or "value"; returns the resampled field.
PeriodicField field_from_csv(const std::filesystem::path& path, const SpectralConfig& cfg);

std::string format_double(double v);  // %.17g

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    ~CsvWriter();

    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& values);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::string buffer_;
    size_t columns_ = 0;
};

uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(uint64_t value);

}  // namespace sww
