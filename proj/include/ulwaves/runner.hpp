#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ulwaves/grid.hpp"
#include "ulwaves/timestepper.hpp"

namespace ulwaves {

class RunConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class KeyType { text, real, integer, boolean, reals, integers, choice };

struct KeySpec {
    std::string name;
    KeyType type;
    std::string fallback;
    std::vector<std::string> choices;
    std::string doc;
};

const std::vector<KeySpec>& config_schema();

// Flat dotted-key configuration; every key of the schema has a value once constructed.
class RunConfig {
public:
    RunConfig();

    // `where` prefixes error messages ("file.cfg:12").
    void set(const std::string& key, const std::string& value, const std::string& where = "");
    bool explicitly_set(const std::string& key) const { return explicit_.count(key) != 0; }

    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    int integer(const std::string& key) const;
    bool boolean(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<int> integers(const std::string& key) const;

    // Cross-key checks: grid shape, canal wall alignment, scenario requirements.
    void validate() const;
    // key = value lines for every schema key, in schema order.
    std::string echo() const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> explicit_;
};

// Lines "key = value"; '#' starts a comment; blank lines ignored.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config(const std::filesystem::path& path);
// "key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);

enum ExitStatus { exit_ok = 0, exit_config = 1, exit_aborted = 2, exit_incompatible = 3, exit_failure = 4 };

// Runs the configured scenario into output.dir; returns an ExitStatus.
int run(const RunConfig& cfg, std::ostream& log);

std::string format_record(const DiagnosticsRecord& r);
std::string diagnostics_header();

struct Snapshot {
    std::string field;
    std::vector<int> points;
    std::vector<double> lengths;
    double t = 0.0;
    RealField values;
};

// Random trigonometric polynomial with modes |m_a| <= band, scaled so that sup|u| + sup|grad u| = w1inf.
RealField random_band_limited(const PeriodicGrid& grid, int band, double w1inf, std::mt19937& rng);

void write_snapshot(const std::filesystem::path& stem, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& stem);

}  // namespace ulwaves
