#ifndef FB_CONFIG_HPP
#define FB_CONFIG_HPP

#include "fb/grid.hpp"
#include "fb/nonlinearity.hpp"
#include "fb/solver.hpp"
#include "fb/verification.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fb {

/// Flat dotted-key configuration. Text format: one `key = value` per line,
/// '#' comments, no sections or programmability. Unknown keys are rejected.
struct RunConfig {
    std::map<std::string, std::string> kv; // canonical (trimmed) pairs
    std::uint64_t seed = 0;

    static RunConfig parse_text(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get(const std::string& key, const std::string& dflt) const;
    double get_num(const std::string& key, double dflt) const;
    long get_int(const std::string& key, long dflt) const;
    std::vector<double> get_list(const std::string& key) const;

    /// Canonical text (sorted keys) and its FNV-1a hash; seed folded in.
    std::string canonical_text() const;
    std::uint64_t hash() const;

    // typed views (validated against module preconditions)
    Grid make_grid() const;
    NonlinearityModel make_model() const;
    EpsSchedule make_schedule(const Grid& g) const;
    ContinuationOptions solver_options(const Grid& g) const;
    VerifyOptions verify_options() const;
};

/// Preset names: subcritical_square, sum_of_powers, weighted_power,
/// critical_radial.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

std::uint64_t fnv1a(const std::string& s);

} // namespace fb

#endif
