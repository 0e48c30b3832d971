#include "sww/io.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sww {

nlohmann::json field_to_json(const PeriodicField& f) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (int k = 1; k <= f.config().n_modes; ++k) {
        const complexd z = f.coeff(k);
        if (z == complexd{0.0, 0.0}) continue;
        coeffs[std::to_string(k)] = {z.real(), z.imag()};
        coeffs[std::to_string(-k)] = {z.real(), -z.imag()};
    }
    return {{"n_modes", f.config().n_modes}, {"coeffs", coeffs}};
}

PeriodicField field_from_json(const nlohmann::json& j, const SpectralConfig& cfg) {
    PeriodicField f(cfg);
    if (!j.contains("coeffs") || !j["coeffs"].is_object())
        throw ValidationError("field_from_json: missing 'coeffs' object");
    for (const auto& [key, value] : j["coeffs"].items()) {
        int k = 0;
        try {
            k = std::stoi(key);
        } catch (...) {
            throw ValidationError("field_from_json: non-integer mode key '" + key + "'");
        }
        if (k == 0) {
            if (std::abs(value[0].get<double>()) > 1e-14)
                throw ValidationError("field_from_json: nonzero mean coefficient");
            continue;
        }
        if (std::abs(k) > cfg.n_modes)
            throw ValidationError("field_from_json: mode " + key + " beyond n_modes");
        if (!value.is_array() || value.size() != 2)
            throw ValidationError("field_from_json: coefficient must be [re, im]");
        if (k > 0) f.set_coeff(k, {value[0].get<double>(), value[1].get<double>()});
    }
    return f;
}

nlohmann::json state_to_json(const State& u) {
    return {{"eta", field_to_json(u.eta)}, {"xi", field_to_json(u.xi)}};
}

State state_from_json(const nlohmann::json& j, const SpectralConfig& cfg) {
    if (!j.contains("eta") || !j.contains("xi"))
        throw ValidationError("state_from_json: missing 'eta'/'xi'");
    return {field_from_json(j["eta"], cfg), field_from_json(j["xi"], cfg)};
}

PeriodicField field_from_samples(const std::vector<double>& values, const SpectralConfig& cfg) {
    const int n = static_cast<int>(values.size());
    if (n < 2 * cfg.n_modes + 2)
        throw ValidationError("field_from_samples: need at least 2 n_modes + 2 samples");
    // Direct DFT at the sample resolution, truncated to the retained modes.
    PeriodicField f(cfg);
    for (int k = 1; k <= cfg.n_modes; ++k) {
        complexd acc{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            const double x = 2.0 * std::numbers::pi * j / n;
            acc += values[static_cast<size_t>(j)] * std::polar(1.0, -k * x);
        }
        f.set_coeff(k, acc / static_cast<double>(n));
    }
    return f;
}

PeriodicField field_from_csv(const std::filesystem::path& path, const SpectralConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ValidationError("field_from_csv: cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!values.empty() || line.find_first_not_of("0123456789+-.eE, \t") == std::string::npos) {
            std::istringstream ss(line);
            std::string cell, last;
            while (std::getline(ss, cell, ',')) last = cell;
            try {
                values.push_back(std::stod(last));
            } catch (...) {
                if (values.empty()) continue;  // header row
                throw ValidationError("field_from_csv: bad row '" + line + "'");
            }
        }
    }
    return field_from_samples(values, cfg);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : path_(path), columns_(columns.size()) {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
    std::ofstream out(path_, std::ios::binary);
    out << buffer_;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw ValidationError("CsvWriter: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format_double(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& values) {
    if (values.size() != columns_) throw ValidationError("CsvWriter: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += values[i];
    }
    buffer_ += '\n';
}

uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("fnv1a64_file: cannot open " + path.string());
    uint64_t hash = 1469598103934665603ull;
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(chunk[i]);
            hash *= 1099511628211ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(chunk))) break;
    }
    return hash;
}

std::string hex64(uint64_t value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace sww
