#include "lps/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lps::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& is) {
    KeyValueFile f;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidInput("config line " + std::to_string(lineno) + ": empty key");
        if (f.kv_.count(key))
            throw InvalidInput("config: duplicate key " + key);
        f.kv_[key] = value;
    }
    return f;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open config file: " + path);
    return parse(is);
}

KeyValueFile KeyValueFile::from_pairs(std::map<std::string, std::string> kv) {
    KeyValueFile f;
    f.kv_ = std::move(kv);
    return f;
}

bool KeyValueFile::has(const std::string& key) const { return kv_.count(key) > 0; }

void KeyValueFile::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string KeyValueFile::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw InvalidInput("config: missing required key " + key);
    used_.insert(key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    used_.insert(key);
    return it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    std::size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw InvalidInput("config: key " + key + " is not a number: " + v);
    }
    if (pos != v.size()) throw InvalidInput("config: key " + key + " is not a number: " + v);
    return d;
}

double KeyValueFile::get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}

int KeyValueFile::get_int(const std::string& key, int dflt) const {
    if (!has(key)) return dflt;
    const double d = get_double(key);
    const int i = static_cast<int>(std::lround(d));
    if (d != i) throw InvalidInput("config: key " + key + " must be an integer");
    return i;
}

bool KeyValueFile::get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InvalidInput("config: key " + key + " must be a boolean, got " + v);
}

std::vector<std::string> KeyValueFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : kv_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

Mode mode_from_string(const std::string& s) {
    if (s == "scale") return Mode::scale;
    if (s == "solve-asym") return Mode::solve_asym;
    if (s == "solve-full") return Mode::solve_full;
    if (s == "scan") return Mode::scan;
    if (s == "series-check") return Mode::series_check;
    if (s == "validate") return Mode::validate;
    throw InvalidInput("unknown mode: " + s);
}

void RunConfig::validate() const {
    if (!(scan_step > 0)) throw InvalidInput("scan step must be positive");
    if (!(scan_start <= scan_stop)) throw InvalidInput("scan range is empty");
    if (scan_start < 0.0 || scan_stop > 1.0)
        throw InvalidInput("scan range must lie inside the scaled domain [0,1]");
    if (threads < 1) throw InvalidInput("threads must be >= 1");
    setup.validate();
    laser.validate();
}

RunConfig load_run_config(const KeyValueFile& kv) {
    RunConfig rc;
    rc.mode = mode_from_string(kv.get_string("mode", "scan"));

    rc.dim = kv.get_int("grid.dim", 1);
    rc.nx = kv.get_int("grid.nx", rc.dim == 1 ? 200 : 48);
    rc.ny = kv.get_int("grid.ny", 16);
    rc.aspect = kv.get_double("grid.aspect", 0.5);

    const std::string material = kv.get_string("material", "scaled");
    if (material != "scaled") {
        units::PhysicalParams p = units::preset(
            units::material_from_string(material),
            kv.get_double("laser.spot_radius_um", 0.0) * 1e-6);
        p.domain_diameter_m = kv.get_double("physical.x_ref_mm", 3.0) * 1e-3;
        p.temperature_K = kv.get_double("physical.T_K", p.temperature_K);
        p.resistance_Ohm = kv.get_double("physical.resistance_Ohm", p.resistance_Ohm);
        p.N_c_per_cm3 = kv.get_double("physical.Nc_cm3", p.N_c_per_cm3);
        p.N_v_per_cm3 = kv.get_double("physical.Nv_cm3", p.N_v_per_cm3);
        if (kv.has("physical.Eg_eV")) p.E_v_eV = p.E_c_eV - kv.get_double("physical.Eg_eV");
        p.rel_permittivity = kv.get_double("physical.eps_r", p.rel_permittivity);
        p.mu_n_cm2_per_Vs = kv.get_double("physical.mu_n", p.mu_n_cm2_per_Vs);
        p.mu_p_cm2_per_Vs = kv.get_double("physical.mu_p", p.mu_p_cm2_per_Vs);
        p.mu_ref_cm2_per_Vs = std::max(p.mu_n_cm2_per_Vs, p.mu_p_cm2_per_Vs);
        p.C_ref_per_cm3 = kv.get_double("physical.C_ref_cm3", p.C_ref_per_cm3);
        p.laser_power_W = kv.get_double("laser.power_mW", p.laser_power_W * 1e3) * 1e-3;
        p.laser_wavelength_m =
            kv.get_double("laser.wavelength_nm", p.laser_wavelength_m * 1e9) * 1e-9;
        p.penetration_depth_m =
            kv.get_double("laser.penetration_depth_um", p.penetration_depth_m * 1e6) * 1e-6;
        p.reflectivity = kv.get_double("laser.reflectivity", p.reflectivity);
        p.C_d_cm3_per_s = kv.get_double("physical.Cd_cm3s", p.C_d_cm3_per_s);
        p.C_n_cm6_per_s = kv.get_double("physical.Cn_cm6s", p.C_n_cm6_per_s);
        p.C_p_cm6_per_s = kv.get_double("physical.Cp_cm6s", p.C_p_cm6_per_s);
        p.tau_n_s = kv.get_double("physical.tau_n_s", p.tau_n_s);
        p.tau_p_s = kv.get_double("physical.tau_p_s", p.tau_p_s);
        p.n_T_per_cm3 = kv.get_double("physical.nT_cm3", p.n_T_per_cm3);
        p.p_T_per_cm3 = kv.get_double("physical.pT_cm3", p.p_T_per_cm3);

        const units::ScaledParams s = units::compute_scaling(p);
        rc.scaled = s;
        rc.setup = cascade::ModelSetup::from_scaled(s);
        rc.laser.kappa = s.kappa_hat;
        rc.laser.sigma = s.sigma_hat;
        rc.laser.dA = s.dA_hat;
        rc.V_th_V = s.ref.V_th_V;
        rc.x_ref_m = s.ref.x_ref_m;
    }

    // scaled-side overrides (and the whole model when material = scaled)
    rc.setup.lambda = kv.get_double("model.lambda", rc.setup.lambda);
    rc.setup.delta = kv.get_double("model.delta", rc.setup.delta);
    rc.setup.phi0 = kv.get_double("model.phi0", rc.setup.phi0);
    rc.setup.mu_n = kv.get_double("model.mu_n", rc.setup.mu_n);
    rc.setup.mu_p = kv.get_double("model.mu_p", rc.setup.mu_p);
    rc.setup.R_hat = kv.get_double("model.R_hat", rc.setup.R_hat);
    const std::string cd = kv.get_string("model.contact_data", "delta_exact");
    if (cd == "delta_exact")
        rc.setup.contact_data = cascade::ModelSetup::ContactData::delta_exact;
    else if (cd == "strict")
        rc.setup.contact_data = cascade::ModelSetup::ContactData::strict_limit;
    else
        throw InvalidInput("model.contact_data must be delta_exact or strict");
    rc.setup.rec.Cd = kv.get_double("rec.Cd", rc.setup.rec.Cd);
    rc.setup.rec.Cn = kv.get_double("rec.Cn", rc.setup.rec.Cn);
    rc.setup.rec.Cp = kv.get_double("rec.Cp", rc.setup.rec.Cp);
    rc.setup.rec.tau_n = kv.get_double("rec.tau_n", rc.setup.rec.tau_n);
    rc.setup.rec.tau_p = kv.get_double("rec.tau_p", rc.setup.rec.tau_p);
    rc.setup.rec.nT = kv.get_double("rec.nT", rc.setup.rec.nT);
    rc.setup.rec.pT = kv.get_double("rec.pT", rc.setup.rec.pT);

    rc.laser.kappa = kv.get_double("laser.kappa_hat", rc.laser.kappa);
    rc.laser.sigma = kv.get_double("laser.sigma_hat", rc.laser.sigma);
    rc.laser.dA = kv.get_double("laser.dA_hat", rc.laser.dA);
    rc.laser.x0 = kv.get_double("laser.x0", 0.5);

    const std::string profile = kv.get_string("doping.profile", "constant");
    if (profile == "constant") {
        physics::DopingProfile::Constant c;
        c.level = kv.get_double("doping.level", 1.0);
        rc.doping = physics::DopingProfile(c);
    } else if (profile == "sinusoidal") {
        const double amp = kv.get_double("doping.rel_amplitude", 0.2);
        const double period = kv.get_double("doping.period", 0.1);
        const int axis = kv.get_int("doping.axis", 0);
        if (kv.get_bool("doping.normalize", true)) {
            rc.doping = physics::DopingProfile::sinusoidal_normalized(amp, period, axis);
        } else {
            physics::DopingProfile::Sinusoidal s;
            s.mean = kv.get_double("doping.mean", 1.0);
            s.rel_amplitude = amp;
            s.period = period;
            s.axis = axis;
            rc.doping = physics::DopingProfile(s);
        }
    } else if (profile == "file") {
        const std::string path = kv.get_string("doping.file");
        mesh::Grid g = mesh::build_grid(rc.dim, rc.nx, rc.ny, rc.aspect);
        mesh::Field f = mesh::load_field_file(path, g);
        rc.doping = physics::DopingProfile(physics::DopingProfile::Tabulated{f.values()});
    } else {
        throw InvalidInput("doping.profile must be constant, sinusoidal or file");
    }

    rc.scan_start = kv.get_double("scan.start", rc.scan_start);
    rc.scan_stop = kv.get_double("scan.stop", rc.scan_stop);
    rc.scan_step = kv.get_double("scan.step", rc.scan_step);

    rc.cascade_settings.newton.abs_tol =
        kv.get_double("solver.newton_tol", rc.cascade_settings.newton.abs_tol);
    rc.cascade_settings.newton.rel_tol =
        kv.get_double("solver.newton_rel_tol", rc.cascade_settings.newton.rel_tol);
    rc.cascade_settings.newton.max_iters = kv.get_int("solver.max_iters", 50);
    rc.cascade_settings.bound_slack = kv.get_double("solver.bound_slack", 1e-8);
    rc.full_settings.newton = rc.cascade_settings.newton;
    rc.full_settings.gummel_tol = kv.get_double("solver.gummel_tol", 1e-11);
    rc.full_settings.coupling_tol = kv.get_double("solver.coupling_tol", 1e-10);

    rc.V_th_V = kv.get_double("model.V_th_V", rc.V_th_V);
    rc.x_ref_m = kv.get_double("model.x_ref_mm", rc.x_ref_m * 1e3) * 1e-3;

    rc.out_dir = kv.get_string("output.dir", "");
    rc.threads = kv.get_int("run.threads", 1);
    rc.fail_fast = kv.get_bool("run.fail_fast", false);
    rc.seed = static_cast<unsigned>(kv.get_int("run.seed", 12345));
    rc.series_order = kv.get_int("series.K", 3);

    const auto unused = kv.unused_keys();
    if (!unused.empty()) {
        std::string msg = "config: unknown keys:";
        for (const auto& k : unused) msg += " " + k;
        throw InvalidInput(msg);
    }
    rc.validate();
    return rc;
}

}  // namespace lps::config
