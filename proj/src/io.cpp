#include "fb/io.hpp"
#include "fb/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fb {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

std::string trace_to_json(const SolveTrace& trace, std::uint64_t config_hash, std::uint64_t seed) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config_hash"] = hex64(config_hash);
    j["seed"] = seed;
    ordered_json entries = ordered_json::array();
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const TraceEntry& e = trace.entries[i];
        ordered_json je;
        je["eps"] = e.eps;
        je["level"] = e.level;
        je["level_sharp"] = e.level_sharp;
        je["grad_norm"] = e.grad_norm;
        je["newton_steps"] = e.newton_steps;
        je["mp_sweeps"] = e.mp_sweeps;
        je["field_csv"] = "u_eps_" + std::to_string(i) + ".csv";
        entries.push_back(je);
    }
    j["entries"] = entries;
    return j.dump(2) + "\n";
}

SolveTrace trace_from_json(const std::string& dir, const std::string& json_text, const Grid& g) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("trace json parse error: ") + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw SchemaError("trace schema version mismatch");
    SolveTrace tr;
    for (const auto& je : j.at("entries")) {
        TraceEntry e;
        e.eps = je.at("eps").get<double>();
        e.level = je.at("level").get<double>();
        e.level_sharp = je.at("level_sharp").get<double>();
        e.grad_norm = je.at("grad_norm").get<double>();
        e.newton_steps = je.at("newton_steps").get<int>();
        e.mp_sweeps = je.at("mp_sweeps").get<int>();
        e.u = read_field_csv(dir + "/" + je.at("field_csv").get<std::string>(), g);
        tr.entries.push_back(std::move(e));
    }
    return tr;
}

namespace {

ordered_json fb_json(const FbConditionReport& r) {
    ordered_json j;
    j["points_total"] = r.points_total;
    j["points_used"] = r.points_used;
    j["median_abs"] = r.median_abs;
    j["median_signed"] = r.median_signed;
    j["iqr"] = r.iqr;
    j["worst_decile"] = r.worst_decile;
    j["trivial"] = r.trivial;
    j["pass"] = r.pass;
    return j;
}

ordered_json nondeg_json(const NondegeneracyReport& r) {
    ordered_json j;
    j["empirical_c"] = r.empirical_c;
    j["samples"] = r.samples;
    j["r_min"] = r.r_min;
    j["r0"] = r.r0;
    j["trivial"] = r.trivial;
    j["pass"] = r.pass;
    return j;
}

ordered_json density_json(const DensityReport& r) {
    ordered_json j;
    j["min_fraction"] = r.min_fraction;
    j["max_fraction"] = r.max_fraction;
    j["entries"] = r.entries.size();
    j["skipped"] = r.skipped;
    j["trivial"] = r.trivial;
    j["pass"] = r.pass;
    return j;
}

ordered_json variational_json(const VariationalReport& r) {
    ordered_json j;
    j["eps"] = r.eps;
    j["source_eps"] = r.source_eps;
    j["res_norm"] = r.res_norm;
    j["max_abs_quad"] = r.max_abs_quad;
    j["pass"] = r.pass;
    ordered_json arr = ordered_json::array();
    for (const auto& e : r.entries) {
        ordered_json je;
        je["phi"] = e.phi;
        je["phi_c1"] = e.phi_c1;
        je["quad"] = e.quad;
        je["pairing"] = e.pairing;
        je["bound"] = e.bound;
        arr.push_back(je);
    }
    j["fields"] = arr;
    return j;
}

ordered_json energy_json(const EnergyReport& r) {
    ordered_json j;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json jr;
        jr["eps"] = row.eps;
        jr["J_eps"] = row.J_eps;
        jr["J_sharp"] = row.J_sharp;
        jr["band"] = row.band;
        jr["tie_band"] = row.tie_band;
        jr["grad_norm"] = row.grad_norm;
        jr["sandwich_ok"] = row.sandwich_ok;
        rows.push_back(jr);
    }
    j["rows"] = rows;
    j["level_last"] = r.level_last;
    j["has_inf_M"] = r.has_inf_M;
    j["inf_M_level"] = r.inf_M_level;
    j["cross_method_gap"] = r.cross_method_gap;
    j["pass"] = r.pass;
    return j;
}

ordered_json lipschitz_json(const LipschitzReport& r) {
    ordered_json j;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json jr;
        jr["eps"] = row.eps;
        jr["sup_grad"] = row.sup_grad;
        rows.push_back(jr);
    }
    j["rows"] = rows;
    j["delta0"] = r.delta0;
    j["pass"] = r.pass;
    return j;
}

ordered_json aux_json(const AuxReport& r) {
    ordered_json j;
    j["harmonicity_sup"] = r.harmonicity_sup;
    j["harmonicity_nodes"] = r.harmonicity_nodes;
    j["ring_nu"] = r.ring_nu;
    j["ring_samples"] = r.ring_samples;
    j["majorant_A0"] = r.majorant_A0;
    j["majorant_violation"] = r.majorant_violation;
    j["min_u"] = r.min_u;
    j["pass"] = r.pass;
    return j;
}

ordered_json critical_json(const CriticalReport& r) {
    ordered_json j;
    j["applicable"] = r.applicable;
    j["sobolev"] = r.sobolev;
    j["threshold"] = r.threshold;
    j["worst_level"] = r.worst_level;
    j["pass"] = r.pass;
    return j;
}

ordered_json options_json(const VerifyOptions& o) {
    ordered_json j;
    j["nondeg_r0_factor"] = o.nondeg_r0_factor;
    j["nondeg_r_min_factor"] = o.nondeg_r_min_factor;
    j["nondeg_c_min"] = o.nondeg_c_min;
    j["density_radii_factors"] = o.density_radii_factors;
    j["density_c_min"] = o.density_c_min;
    j["fb_median_max"] = o.fb_median_max;
    j["lipschitz_ratio"] = o.lipschitz_ratio;
    j["variational_factor"] = o.variational_factor;
    j["ring_angles"] = o.ring_angles;
    j["ring_radii_factors"] = o.ring_radii_factors;
    j["harmonicity_max"] = o.harmonicity_max;
    j["tie_band_factor"] = o.tie_band_factor;
    j["max_fb_samples"] = o.max_fb_samples;
    return j;
}

} // namespace

std::string report_to_json(const VerificationReport& rep) {
    ordered_json j;
    j["schema_version"] = rep.schema_version;
    j["config_hash"] = hex64(rep.config_hash);
    j["seed"] = rep.seed;
    j["fb_condition"] = fb_json(rep.fb);
    j["nondegeneracy"] = nondeg_json(rep.nondeg);
    j["density"] = density_json(rep.density);
    ordered_json vars = ordered_json::array();
    for (const auto& v : rep.variational) vars.push_back(variational_json(v));
    j["variational"] = vars;
    j["energy"] = energy_json(rep.energy);
    j["lipschitz"] = lipschitz_json(rep.lipschitz);
    j["aux"] = aux_json(rep.aux);
    j["critical"] = critical_json(rep.critical);
    j["options"] = options_json(rep.options);
    j["all_pass"] = rep.all_pass();
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for read: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace fb
