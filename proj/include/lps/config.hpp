#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lps/cascade.hpp"
#include "lps/full_model.hpp"
#include "lps/physics.hpp"
#include "lps/units.hpp"

namespace lps::config {

/// Flat key-value config file with dotted sections, e.g.
///   laser.power_mW = 2
/// '#' starts a comment; blank lines are ignored.
class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& is);
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile from_pairs(std::map<std::string, std::string> kv);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    int get_int(const std::string& key, int dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;

    /// Keys never read by any getter; used to flag typos.
    std::vector<std::string> unused_keys() const;

private:
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> used_;
};

enum class Mode { scale, solve_asym, solve_full, scan, series_check, validate };
Mode mode_from_string(const std::string& s);

/// Fully resolved run description: grid, doping, scaled model constants,
/// laser, scan range, solver settings and output conversion references.
struct RunConfig {
    Mode mode = Mode::scan;

    // grid
    int dim = 1;
    int nx = 200;
    int ny = 16;
    double aspect = 0.5;

    physics::DopingProfile doping;

    cascade::ModelSetup setup;
    physics::LaserSpec laser;

    // scan range (scaled x0)
    double scan_start = 0.2;
    double scan_stop = 0.8;
    double scan_step = 0.05;

    cascade::CascadeSettings cascade_settings;
    full::FullSettings full_settings;

    // dimensional references for output columns
    double V_th_V = 0.025852;
    double x_ref_m = 3e-3;
    std::optional<units::ScaledParams> scaled;  ///< set when built from a preset

    std::string out_dir;
    int threads = 1;
    bool fail_fast = false;
    unsigned seed = 12345;
    int series_order = 3;
    bool verbose = false;

    void validate() const;
};

/// Builds the run description from a parsed config file. Material presets
/// ("material = si|gaas") resolve the dimensional path through
/// compute_scaling; "material = scaled" (default) reads the model.* and
/// rec.* keys directly. Unknown keys are rejected.
RunConfig load_run_config(const KeyValueFile& kv);

}  // namespace lps::config
