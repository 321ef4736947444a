#include "fb/config.hpp"
#include "fb/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace fb {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "domain.kind", "domain.xmin", "domain.xmax", "domain.ymin", "domain.ymax",
        "domain.radius", "domain.dim",
        "grid.nx", "grid.ny", "grid.n",
        "model.variant", "model.p", "model.p_list", "model.mu", "model.a3", "model.a4",
        "model.spatial_weight", "model.kappa", "model.lambda", "model.a1", "model.a2",
        "eps.first_factor", "eps.last_factor", "eps.ratio",
        "solver.mp_grad_tol", "solver.mp_path_size", "solver.mp_max_sweeps",
        "solver.mp_descent_steps", "solver.newton_tol", "solver.newton_max_steps",
        "verify.nondeg_c_min", "verify.density_c_min", "verify.fb_median_max",
        "verify.lipschitz_ratio", "verify.variational_factor", "verify.harmonicity_max",
        "verify.nondeg_r0_factor", "verify.nondeg_r_min_factor",
        "output.write_binary",
        "seed",
        "sweep.axis", "sweep.values",
    };
    return keys;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key))
            throw ConfigError("unknown config key: " + key);
        if (value.empty())
            throw ConfigError("empty value for config key: " + key);
        if (cfg.kv.count(key))
            throw ConfigError("duplicate config key: " + key);
        cfg.kv[key] = value;
    }
    cfg.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

std::string RunConfig::get(const std::string& key, const std::string& dflt) const {
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

double RunConfig::get_num(const std::string& key, double dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config key " + key + " is not a number: " + it->second);
    return v;
}

long RunConfig::get_int(const std::string& key, long dflt) const {
    const double v = get_num(key, static_cast<double>(dflt));
    const long l = static_cast<long>(v);
    if (static_cast<double>(l) != v)
        throw ConfigError("config key " + key + " is not an integer");
    return l;
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return {};
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw ConfigError("config key " + key + " has a non-numeric entry: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("config key " + key + " needs a comma list");
    return out;
}

std::string RunConfig::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t RunConfig::hash() const {
    return fnv1a(canonical_text() + "seed:" + std::to_string(seed));
}

Grid RunConfig::make_grid() const {
    const std::string kind = get("domain.kind", "box");
    if (kind == "radial") {
        const int dim = static_cast<int>(get_int("domain.dim", 3));
        const double radius = get_num("domain.radius", 1.0);
        const int n = static_cast<int>(get_int("grid.n", 257));
        return Grid::radial(dim, radius, n);
    }
    const double xmin = get_num("domain.xmin", -1.0), xmax = get_num("domain.xmax", 1.0);
    const double ymin = get_num("domain.ymin", -1.0), ymax = get_num("domain.ymax", 1.0);
    const int nx = static_cast<int>(get_int("grid.nx", 129));
    const int ny = static_cast<int>(get_int("grid.ny", nx));
    if (kind == "box") return Grid::rect2d(nx, ny, xmin, xmax, ymin, ymax, MaskShape::Box);
    if (kind == "disk") return Grid::rect2d(nx, ny, xmin, xmax, ymin, ymax, MaskShape::Disk);
    throw ConfigError("domain.kind must be box, disk or radial");
}

NonlinearityModel RunConfig::make_model() const {
    const std::string variant = get("model.variant", "pure_power");
    if (variant == "pure_power") return NonlinearityModel::pure_power(get_num("model.p", 4.0));
    if (variant == "sum_of_powers") {
        auto ps = get_list("model.p_list");
        if (ps.empty()) throw ConfigError("sum_of_powers needs model.p_list");
        return NonlinearityModel::sum_of_powers(ps);
    }
    if (variant == "weighted_power")
        return NonlinearityModel::weighted_power(get_num("model.mu", 3.0), get_num("model.p", 4.0),
                                                 get_num("model.a3", 1.0), get_num("model.a4", 1.0),
                                                 get_int("model.spatial_weight", 1) != 0);
    if (variant == "critical_combo")
        return NonlinearityModel::critical_combo(
            get_num("model.kappa", 0.1), get_num("model.lambda", 1.0), get_num("model.mu", 3.0),
            static_cast<int>(get_int("domain.dim", 3)));
    if (variant == "exponential_n2")
        return NonlinearityModel::exponential_n2(get_num("model.a1", 1.0), get_num("model.a2", 1.0));
    throw ConfigError("unknown model.variant: " + variant);
}

EpsSchedule RunConfig::make_schedule(const Grid& g) const {
    return EpsSchedule::for_grid(g, get_num("eps.first_factor", 8.0),
                                 get_num("eps.last_factor", 2.0), get_num("eps.ratio", 0.5));
}

ContinuationOptions RunConfig::solver_options(const Grid& g) const {
    ContinuationOptions opt;
    opt.mp.grad_tol = get_num("solver.mp_grad_tol", 0.0);
    (void)g;
    opt.mp.path_size = static_cast<int>(get_int("solver.mp_path_size", 32));
    opt.mp.max_sweeps = static_cast<int>(get_int("solver.mp_max_sweeps", 100000));
    opt.mp.descent_steps = static_cast<int>(get_int("solver.mp_descent_steps", 10));
    opt.newton.tol = get_num("solver.newton_tol", 1e-10);
    opt.newton.max_steps = static_cast<int>(get_int("solver.newton_max_steps", 100));
    return opt;
}

VerifyOptions RunConfig::verify_options() const {
    VerifyOptions v;
    v.nondeg_c_min = get_num("verify.nondeg_c_min", v.nondeg_c_min);
    v.density_c_min = get_num("verify.density_c_min", v.density_c_min);
    v.fb_median_max = get_num("verify.fb_median_max", v.fb_median_max);
    v.lipschitz_ratio = get_num("verify.lipschitz_ratio", v.lipschitz_ratio);
    v.variational_factor = get_num("verify.variational_factor", v.variational_factor);
    v.harmonicity_max = get_num("verify.harmonicity_max", v.harmonicity_max);
    v.nondeg_r0_factor = get_num("verify.nondeg_r0_factor", v.nondeg_r0_factor);
    v.nondeg_r_min_factor = get_num("verify.nondeg_r_min_factor", v.nondeg_r_min_factor);
    return v;
}

std::vector<std::string> preset_names() {
    return {"subcritical_square", "sum_of_powers", "weighted_power", "critical_radial"};
}

std::string preset_text(const std::string& name) {
    if (name == "subcritical_square")
        return "# subcritical pure power on the unit square\n"
               "domain.kind = box\n"
               "domain.xmin = -1\ndomain.xmax = 1\ndomain.ymin = -1\ndomain.ymax = 1\n"
               "grid.nx = 129\ngrid.ny = 129\n"
               "model.variant = pure_power\nmodel.p = 4\n"
               "eps.first_factor = 8\neps.last_factor = 2\neps.ratio = 0.5\n"
               "seed = 1\n";
    if (name == "sum_of_powers")
        return "# sum of two superlinear powers on the unit square\n"
               "domain.kind = box\n"
               "domain.xmin = -1\ndomain.xmax = 1\ndomain.ymin = -1\ndomain.ymax = 1\n"
               "grid.nx = 129\ngrid.ny = 129\n"
               "model.variant = sum_of_powers\nmodel.p_list = 3, 4\n"
               "eps.first_factor = 8\neps.last_factor = 2\neps.ratio = 0.5\n"
               "seed = 1\n";
    if (name == "weighted_power")
        return "# spatially weighted power on the unit square\n"
               "domain.kind = box\n"
               "domain.xmin = -1\ndomain.xmax = 1\ndomain.ymin = -1\ndomain.ymax = 1\n"
               "grid.nx = 129\ngrid.ny = 129\n"
               "model.variant = weighted_power\nmodel.mu = 3\nmodel.p = 4\n"
               "model.a3 = 1\nmodel.a4 = 1\nmodel.spatial_weight = 1\n"
               "eps.first_factor = 8\neps.last_factor = 2\neps.ratio = 0.5\n"
               "seed = 1\n";
    if (name == "critical_radial")
        return "# critical + subcritical combination, radial ball in dimension 3\n"
               "domain.kind = radial\n"
               "domain.dim = 3\ndomain.radius = 1\n"
               "grid.n = 513\n"
               "model.variant = critical_combo\nmodel.kappa = 0.1\nmodel.lambda = 1\nmodel.mu = 3\n"
               "eps.first_factor = 8\neps.last_factor = 2\neps.ratio = 0.5\n"
               "seed = 1\n";
    throw ConfigError("unknown preset: " + name);
}

} // namespace fb
