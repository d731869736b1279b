#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lowrate::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + text + "'");
    }
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
    std::int64_t v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw ConfigError("bad integer value for " + key + ": '" + text + "'");
    return v;
}

} // namespace

ConfigFile ConfigFile::parse_text(const std::string& text,
                                  const std::string& origin) {
    ConfigFile file;
    std::stringstream ss(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const std::string where =
            origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header '" +
                                  line + "'");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw ConfigError(where + ": empty section name");
            if (file.find(name))
                throw ConfigError(where + ": duplicate section [" + name + "]");
            file.sections.push_back({name, {}});
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" +
                              line + "'");
        if (file.sections.empty())
            throw ConfigError(where + ": key before any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        auto& entries = file.sections.back().entries;
        for (const auto& [k, v] : entries)
            if (k == key)
                throw ConfigError(where + ": duplicate key [" +
                                  file.sections.back().name + "]." + key);
        entries.emplace_back(key, value);
    }
    return file;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

const ConfigFile::Section* ConfigFile::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

SectionView::SectionView(const ConfigFile::Section& section)
    : section_(section), consumed_(section.entries.size(), false) {}

std::string SectionView::qualify(const std::string& key) const {
    return "[" + section_.name + "]." + key;
}

bool SectionView::has(const std::string& key) const {
    for (const auto& [k, v] : section_.entries)
        if (k == key) return true;
    return false;
}

std::optional<std::string> SectionView::get(const std::string& key) {
    for (std::size_t i = 0; i < section_.entries.size(); ++i) {
        if (section_.entries[i].first == key) {
            consumed_[i] = true;
            return section_.entries[i].second;
        }
    }
    return std::nullopt;
}

std::string SectionView::require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("missing required key " + qualify(key));
    return *v;
}

double SectionView::require_double(const std::string& key) {
    return parse_double(require(key), qualify(key));
}

std::int64_t SectionView::require_int(const std::string& key) {
    return parse_int(require(key), qualify(key));
}

std::uint64_t SectionView::get_seed(const std::string& key,
                                    std::uint64_t fallback) {
    auto v = get(key);
    if (!v) return fallback;
    const std::int64_t s = parse_int(*v, qualify(key));
    return static_cast<std::uint64_t>(s);
}

std::size_t SectionView::require_count(const std::string& key) {
    const std::int64_t v = require_int(key);
    if (v < 0) throw ConfigError(qualify(key) + " must be >= 0");
    return static_cast<std::size_t>(v);
}

bool SectionView::get_bool(const std::string& key, bool fallback) {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("bad boolean value for " + qualify(key) + ": '" + *v +
                      "'");
}

std::string SectionView::get_string(const std::string& key,
                                    const std::string& fallback) {
    auto v = get(key);
    return v ? *v : fallback;
}

std::optional<double> SectionView::get_double(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return parse_double(*v, qualify(key));
}

std::vector<double> SectionView::require_double_list(const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split(require(key), ','))
        out.push_back(parse_double(item, qualify(key)));
    if (out.empty()) throw ConfigError(qualify(key) + " must be nonempty");
    return out;
}

std::vector<std::int64_t> SectionView::require_int_list(
    const std::string& key) {
    std::vector<std::int64_t> out;
    for (const auto& item : split(require(key), ','))
        out.push_back(parse_int(item, qualify(key)));
    if (out.empty()) throw ConfigError(qualify(key) + " must be nonempty");
    return out;
}

std::vector<std::string> SectionView::require_string_list(
    const std::string& key) {
    auto out = split(require(key), ',');
    out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
    if (out.empty()) throw ConfigError(qualify(key) + " must be nonempty");
    return out;
}

void SectionView::finish() const {
    for (std::size_t i = 0; i < section_.entries.size(); ++i)
        if (!consumed_[i])
            throw ConfigError("unknown key " +
                              qualify(section_.entries[i].first));
}

IncrementModel parse_model(SectionView& section) {
    const std::string family = section.require("family");
    try {
        if (family == "gaussian_curved")
            return IncrementModel::gaussian_curved(
                section.require_double("mu"), section.require_double("c"));
        if (family == "gaussian")
            return IncrementModel::gaussian(section.require_double("mu"),
                                            section.require_double("sigma"));
        if (family == "gamma")
            return IncrementModel::gamma(section.require_double("k"),
                                         section.require_double("lambda"));
        if (family == "deterministic")
            return IncrementModel::deterministic(section.require_double("mu"));
        if (family == "two_point")
            return IncrementModel::two_point_lattice(
                section.require_double("a"), section.require_double("b"),
                section.require_double("p"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("[" + section.name() + "]: " + e.what());
    }
    throw ConfigError("[" + section.name() + "].family: unknown family '" +
                      family + "'");
}

SamplingScheme::Kind parse_scheme_kind(const std::string& text,
                                       const std::string& key) {
    if (text == "hitting_one_sided") return SamplingScheme::Kind::HittingOneSided;
    if (text == "hitting_two_sided") return SamplingScheme::Kind::HittingTwoSided;
    if (text == "exog_exponential") return SamplingScheme::Kind::ExogExponential;
    if (text == "exog_geometric") return SamplingScheme::Kind::ExogGeometric;
    if (text == "exog_deterministic")
        return SamplingScheme::Kind::ExogDeterministic;
    throw ConfigError(key + ": unknown scheme kind '" + text + "'");
}

EstimatorKind parse_estimator_kind(const std::string& text,
                                   const std::string& key) {
    if (text == "bar") return EstimatorKind::Bar;
    if (text == "tilde") return EstimatorKind::Tilde;
    if (text == "hat") return EstimatorKind::Hat;
    if (text == "check") return EstimatorKind::Check;
    if (text == "ghat") return EstimatorKind::GHat;
    if (text == "gcheck") return EstimatorKind::GCheck;
    if (text == "sigma") return EstimatorKind::Sigma;
    throw ConfigError(key + ": unknown estimator '" + text + "'");
}

} // namespace lowrate::cli
