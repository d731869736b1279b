#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lowrate/distributions.hpp"
#include "lowrate/estimators.hpp"
#include "lowrate/renewal.hpp"

namespace lowrate::cli {

/// Any malformed, missing, or unknown config content. The message always
/// names the offending key or section.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key-value file with [section] headers and # comments. Order of
/// sections and keys is preserved; duplicates are errors.
struct ConfigFile {
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::vector<Section> sections;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text,
                                 const std::string& origin);

    const Section* find(const std::string& name) const;
};

/// Typed accessor over one section. Every get/require marks the key as
/// consumed; finish() rejects anything left over, so unknown keys are hard
/// errors.
class SectionView {
public:
    SectionView(const ConfigFile::Section& section);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key);
    std::string require(const std::string& key);

    double require_double(const std::string& key);
    std::int64_t require_int(const std::string& key);
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback);
    std::size_t require_count(const std::string& key);
    bool get_bool(const std::string& key, bool fallback);
    std::string get_string(const std::string& key, const std::string& fallback);
    std::optional<double> get_double(const std::string& key);

    std::vector<double> require_double_list(const std::string& key);
    std::vector<std::int64_t> require_int_list(const std::string& key);
    std::vector<std::string> require_string_list(const std::string& key);

    /// Remaining keys are unknown: throws naming each one.
    void finish() const;

    const std::string& name() const { return section_.name; }

private:
    std::string qualify(const std::string& key) const;
    const ConfigFile::Section& section_;
    std::vector<bool> consumed_;
};

/// Model keys shared by [model], [sensor.*] and check sections:
/// family plus the family's own parameters; parameters of other families
/// are rejected via SectionView::finish.
IncrementModel parse_model(SectionView& section);

SamplingScheme::Kind parse_scheme_kind(const std::string& text,
                                       const std::string& key);
EstimatorKind parse_estimator_kind(const std::string& text,
                                   const std::string& key);

} // namespace lowrate::cli
