#include "ringpair/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ringpair::io {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& tok, const std::string& where) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument(where + ": not a number: \"" + tok + "\"");
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

// --- strict config helpers ------------------------------------------------

void require_object(const json& j, const std::string& path) {
    if (!j.is_object())
        throw std::invalid_argument("config: \"" + path + "\" must be an object");
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument(
                "config: unknown key \"" + (prefix.empty() ? key : prefix + "." + key) + "\"");
    }
}

double get_number(const json& obj, const std::string& prefix, const char* key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument("config: \"" + prefix + "." + key + "\" must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& prefix, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw std::invalid_argument("config: \"" + prefix + "." + key + "\" must be an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& prefix, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw std::invalid_argument("config: \"" + prefix + "." + key + "\" must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& prefix, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw std::invalid_argument("config: \"" + prefix + "." + key + "\" must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_array(const json& obj, const std::string& prefix,
                                     const char* key, std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array())
        throw std::invalid_argument("config: \"" + prefix + "." + key
                                    + "\" must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number())
            throw std::invalid_argument("config: \"" + prefix + "." + key
                                        + "\" must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

LossBudget parse_budget(const json& arr, const std::string& prefix) {
    if (!arr.is_array())
        throw std::invalid_argument("loss budget: \"" + prefix + "\" must be an array");
    LossBudget out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& e = arr[i];
        const std::string p = prefix + "[" + std::to_string(i) + "]";
        require_object(e, p);
        check_keys(e, p, {"label", "loss_dB", "err_dB"});
        LossEntry entry;
        entry.label = get_string(e, p, "label", "");
        if (!e.contains("loss_dB"))
            throw std::invalid_argument("loss budget: \"" + p + "\" is missing loss_dB");
        entry.loss_db = get_number(e, p, "loss_dB", 0.0);
        entry.err_db = get_number(e, p, "err_dB", 0.0);
        out.push_back(entry);
    }
    return out;
}

json double_matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

RunConfig parse_config(const json& j) {
    require_object(j, "(root)");
    check_keys(j, "", {"device", "pump", "grid", "jsa", "coupler_model", "coupler_scan",
                       "sweep", "analysis", "io"});
    RunConfig c;

    if (j.contains("device")) {
        const json& d = j.at("device");
        require_object(d, "device");
        check_keys(d, "device",
                   {"l1_um", "l2_um", "dl_amzi_um", "kappa1_sq", "kappa2_sq",
                    "kappa_mzi_sq", "n_eff0", "n_g", "alpha_dB_cm", "lambda0_nm"});
        c.device.l1_um = get_number(d, "device", "l1_um", c.device.l1_um);
        c.device.l2_um = get_number(d, "device", "l2_um", c.device.l2_um);
        c.device.dl_amzi_um = get_number(d, "device", "dl_amzi_um", c.device.dl_amzi_um);
        c.device.kappa1_sq = get_number(d, "device", "kappa1_sq", c.device.kappa1_sq);
        c.device.kappa2_sq = get_number(d, "device", "kappa2_sq", c.device.kappa2_sq);
        c.device.kappa_mzi_sq = get_number(d, "device", "kappa_mzi_sq", c.device.kappa_mzi_sq);
        c.device.waveguide.n_eff0 = get_number(d, "device", "n_eff0", c.device.waveguide.n_eff0);
        c.device.waveguide.n_g = get_number(d, "device", "n_g", c.device.waveguide.n_g);
        c.device.waveguide.alpha_db_cm =
            get_number(d, "device", "alpha_dB_cm", c.device.waveguide.alpha_db_cm);
        c.device.waveguide.lambda0_nm =
            get_number(d, "device", "lambda0_nm", c.device.waveguide.lambda0_nm);
        c.device.validate();
    }

    if (j.contains("pump")) {
        const json& p = j.at("pump");
        require_object(p, "pump");
        check_keys(p, "pump", {"center_nm", "fwhm_pm", "shape", "rep_rate_Hz"});
        c.pump.center_nm = get_number(p, "pump", "center_nm", c.pump.center_nm);
        c.pump.fwhm_pm = get_number(p, "pump", "fwhm_pm", c.pump.fwhm_pm);
        c.pump.rep_rate_hz = get_number(p, "pump", "rep_rate_Hz", c.pump.rep_rate_hz);
        const std::string shape = get_string(p, "pump", "shape", "gaussian");
        if (shape == "gaussian") c.pump.shape = PumpShape::gaussian;
        else if (shape == "sech") c.pump.shape = PumpShape::sech;
        else throw std::invalid_argument(
            "config: \"pump.shape\" must be \"gaussian\" or \"sech\"");
        c.pump.validate();
    }

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        require_object(g, "grid");
        check_keys(g, "grid", {"start_nm", "stop_nm", "points"});
        c.grid.start_nm = get_number(g, "grid", "start_nm", c.grid.start_nm);
        c.grid.stop_nm = get_number(g, "grid", "stop_nm", c.grid.stop_nm);
        c.grid.points = get_int(g, "grid", "points", c.grid.points);
        c.grid.validate();
    }

    if (j.contains("jsa")) {
        const json& g = j.at("jsa");
        require_object(g, "jsa");
        check_keys(g, "jsa",
                   {"signal_center_nm", "idler_center_nm", "half_span_rad_ps", "points"});
        for (const char* k :
             {"signal_center_nm", "idler_center_nm", "half_span_rad_ps"})
            if (!g.contains(k))
                throw std::invalid_argument(std::string("config: \"jsa\" block requires \"jsa.")
                                            + k + "\"");
        c.jsa.enabled = true;
        c.jsa.signal_center_nm = get_number(g, "jsa", "signal_center_nm", 0.0);
        c.jsa.idler_center_nm = get_number(g, "jsa", "idler_center_nm", 0.0);
        c.jsa.half_span_rad_ps = get_number(g, "jsa", "half_span_rad_ps", 0.0);
        c.jsa.points = get_int(g, "jsa", "points", c.jsa.points);
    }

    if (j.contains("coupler_model")) {
        const json& m = j.at("coupler_model");
        require_object(m, "coupler_model");
        check_keys(m, "coupler_model",
                   {"c0_rad_um", "g_ref_nm", "decay_nm", "slope_per_nm", "bent_decay_nm",
                    "bent_slope_per_nm"});
        auto& cm = c.coupler_model;
        cm.c0_rad_um = get_number(m, "coupler_model", "c0_rad_um", cm.c0_rad_um);
        cm.g_ref_nm = get_number(m, "coupler_model", "g_ref_nm", cm.g_ref_nm);
        cm.decay_nm = get_number(m, "coupler_model", "decay_nm", cm.decay_nm);
        cm.slope_per_nm = get_number(m, "coupler_model", "slope_per_nm", cm.slope_per_nm);
        cm.bent_decay_nm = get_number(m, "coupler_model", "bent_decay_nm", cm.bent_decay_nm);
        cm.bent_slope_per_nm =
            get_number(m, "coupler_model", "bent_slope_per_nm", cm.bent_slope_per_nm);
    }

    if (j.contains("coupler_scan")) {
        const json& s = j.at("coupler_scan");
        require_object(s, "coupler_scan");
        check_keys(s, "coupler_scan",
                   {"gap_nm", "r_um", "bent_fraction", "l_s_min_um", "l_s_max_um",
                    "l_s_points", "theta_min_rad", "theta_max_rad", "theta_points"});
        auto& cs = c.coupler_scan;
        cs.gap_nm = get_number(s, "coupler_scan", "gap_nm", cs.gap_nm);
        cs.r_um = get_number(s, "coupler_scan", "r_um", cs.r_um);
        cs.bent_fraction = get_number(s, "coupler_scan", "bent_fraction", cs.bent_fraction);
        cs.l_s_min_um = get_number(s, "coupler_scan", "l_s_min_um", cs.l_s_min_um);
        cs.l_s_max_um = get_number(s, "coupler_scan", "l_s_max_um", cs.l_s_max_um);
        cs.l_s_points = get_int(s, "coupler_scan", "l_s_points", cs.l_s_points);
        cs.theta_min_rad = get_number(s, "coupler_scan", "theta_min_rad", cs.theta_min_rad);
        cs.theta_max_rad = get_number(s, "coupler_scan", "theta_max_rad", cs.theta_max_rad);
        cs.theta_points = get_int(s, "coupler_scan", "theta_points", cs.theta_points);
    }

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        require_object(s, "sweep");
        check_keys(s, "sweep",
                   {"kappa2_sq_values", "kappa_mzi_sq_values", "min_purity",
                    "optimize_pump", "pump_grid_pm"});
        c.sweep.kappa2_sq_range =
            get_number_array(s, "sweep", "kappa2_sq_values", c.sweep.kappa2_sq_range);
        c.sweep.kappa_mzi_sq_range =
            get_number_array(s, "sweep", "kappa_mzi_sq_values", c.sweep.kappa_mzi_sq_range);
        c.min_purity = get_number(s, "sweep", "min_purity", c.min_purity);
        c.sweep.optimize_pump = get_bool(s, "sweep", "optimize_pump", c.sweep.optimize_pump);
        c.sweep.pump_grid_pm =
            get_number_array(s, "sweep", "pump_grid_pm", c.sweep.pump_grid_pm);
    }

    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        require_object(a, "analysis");
        check_keys(a, "analysis",
                   {"coincidence_window_s", "weighting", "jsi_bin_pm", "mc_trials",
                    "mc_noise_sigma"});
        auto& an = c.analysis;
        an.coincidence_window_s =
            get_number(a, "analysis", "coincidence_window_s", an.coincidence_window_s);
        an.jsi_bin_pm = get_number(a, "analysis", "jsi_bin_pm", an.jsi_bin_pm);
        an.mc_trials = get_int(a, "analysis", "mc_trials", an.mc_trials);
        an.mc_noise_sigma = get_number(a, "analysis", "mc_noise_sigma", an.mc_noise_sigma);
        const std::string w = get_string(a, "analysis", "weighting", "poisson");
        if (w == "poisson") an.weighting = FitWeighting::poisson;
        else if (w == "uniform") an.weighting = FitWeighting::uniform;
        else if (w == "relative") an.weighting = FitWeighting::relative;
        else throw std::invalid_argument(
            "config: \"analysis.weighting\" must be poisson, uniform or relative");
    }

    if (j.contains("io")) {
        const json& p = j.at("io");
        require_object(p, "io");
        check_keys(p, "io", {"power_series_csv", "jsi_csv", "loss_budget_json"});
        c.io.power_series_csv = get_string(p, "io", "power_series_csv", "");
        c.io.jsi_csv = get_string(p, "io", "jsi_csv", "");
        c.io.loss_budget_json = get_string(p, "io", "loss_budget_json", "");
    }

    c.sweep.base = c.device;
    c.sweep.pump = c.pump;
    if (c.sweep.optimize_pump && c.sweep.pump_grid_pm.empty())
        c.sweep.pump_grid_pm = default_pump_grid_pm();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: invalid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

PowerSeries read_power_series(const std::string& path, double coincidence_window_s) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::invalid_argument(path + ": empty file");
    const auto header = split_csv_line(lines[0]);
    const char* expected[4] = {"P_mW", "Cs_Hz", "Ci_Hz", "Ccc_Hz"};
    for (int k = 0; k < 4; ++k) {
        if (static_cast<std::size_t>(k) >= header.size() || header[k] != expected[k])
            throw std::invalid_argument(path + ": missing column " + expected[k]);
    }
    PowerSeries s;
    s.coincidence_window_s = coincidence_window_s;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto tok = split_csv_line(lines[i]);
        if (tok.size() != 4)
            throw std::invalid_argument(path + ": line " + std::to_string(i + 1)
                                        + " needs 4 fields");
        const std::string where = path + ": line " + std::to_string(i + 1);
        s.rows.push_back({parse_double(tok[0], where), parse_double(tok[1], where),
                          parse_double(tok[2], where), parse_double(tok[3], where)});
    }
    s.validate();
    return s;
}

MeasuredJsi read_measured_jsi(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2) throw std::invalid_argument(path + ": too few rows");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2)
        throw std::invalid_argument(path + ": header must list idler wavelengths");
    MeasuredJsi j;
    for (std::size_t k = 1; k < header.size(); ++k)
        j.idler_nm.push_back(parse_double(header[k], path + ": header"));
    const std::size_t ncols = j.idler_nm.size();
    std::vector<double> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto tok = split_csv_line(lines[i]);
        const std::string where = path + ": line " + std::to_string(i + 1);
        if (tok.size() != ncols + 1)
            throw std::invalid_argument(where + ": expected " + std::to_string(ncols + 1)
                                        + " fields");
        j.signal_nm.push_back(parse_double(tok[0], where));
        for (std::size_t k = 1; k < tok.size(); ++k)
            values.push_back(parse_double(tok[k], where));
    }
    j.intensity.resize(static_cast<Eigen::Index>(j.signal_nm.size()),
                       static_cast<Eigen::Index>(ncols));
    for (std::size_t r = 0; r < j.signal_nm.size(); ++r)
        for (std::size_t c = 0; c < ncols; ++c)
            j.intensity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                values[r * ncols + c];
    j.validate();
    return j;
}

std::pair<LossBudget, LossBudget> read_loss_budgets(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open loss budget " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("loss budget: invalid JSON: " + std::string(e.what()));
    }
    require_object(j, "(loss budget)");
    check_keys(j, "", {"signal", "idler"});
    if (!j.contains("signal") || !j.contains("idler"))
        throw std::invalid_argument("loss budget: needs \"signal\" and \"idler\" arrays");
    return {parse_budget(j.at("signal"), "signal"), parse_budget(j.at("idler"), "idler")};
}

std::string spectrum_csv(const WavelengthGrid& grid, const FieldSolution& sol) {
    std::string out = "wavelength_nm,re_Eout,im_Eout,abs2_Eout,abs2_Eins1,abs2_Eins2\n";
    for (int i = 0; i < grid.points; ++i) {
        const std::complex<double> e_out = sol.e_out.values[i];
        out += format_double(grid.wavelength(i));
        out += ',';
        out += format_double(e_out.real());
        out += ',';
        out += format_double(e_out.imag());
        out += ',';
        out += format_double(std::norm(e_out));
        out += ',';
        out += format_double(std::norm(sol.e_ins1.values[i]));
        out += ',';
        out += format_double(std::norm(sol.e_ins2.values[i]));
        out += '\n';
    }
    return out;
}

std::string resonances_json(const std::vector<ResonanceInfo>& res) {
    json out;
    out["resonances_found"] = res.size();
    json arr = json::array();
    for (const auto& r : res) {
        json e;
        e["center_nm"] = r.center_nm;
        e["fwhm_pm"] = r.fwhm_pm;
        e["extinction_dB"] = r.extinction_db;
        arr.push_back(e);
    }
    out["resonances"] = arr;
    return out.dump(2) + "\n";
}

std::string jsi_csv(const JointSpectrum& j) {
    const int n = static_cast<int>(j.detuning_rad_ps.size());
    std::string out = "signal_nm,idler_nm,intensity\n";
    for (int i = 0; i < n; ++i) {
        const std::string sig = format_double(j.signal_wavelength(i));
        for (int k = 0; k < n; ++k) {
            out += sig;
            out += ',';
            out += format_double(j.idler_wavelength(k));
            out += ',';
            out += format_double(std::norm(j.amplitude(i, k)));
            out += '\n';
        }
    }
    return out;
}

std::string jsa_report_json(const JointSpectrum& j, const SchmidtResult& s, double gap) {
    json out;
    out["signal_center_nm"] = j.signal_center_nm;
    out["idler_center_nm"] = j.idler_center_nm;
    out["pump_center_nm"] = j.pump_center_nm;
    out["pump_fwhm_pm"] = j.pump_fwhm_pm;
    out["pump_shape"] = j.pump_shape == PumpShape::gaussian ? "gaussian" : "sech";
    out["purity"] = s.purity;
    out["schmidt_number"] = s.schmidt_number;
    json probs = json::array();
    for (std::size_t i = 0; i < s.schmidt_probs.size() && i < 8; ++i)
        probs.push_back(s.schmidt_probs[i]);
    out["schmidt_probs_top8"] = probs;
    out["jsi_purity_gap"] = gap;
    out["raw_strength"] = j.raw_strength;
    return out.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& r) {
    std::string out = "kappa2_sq,kappa_mzi_sq,purity,relative_brightness\n";
    for (const auto& c : r.cells) {
        out += format_double(c.kappa2_sq);
        out += ',';
        out += format_double(c.kappa_mzi_sq);
        out += ',';
        out += format_double(c.purity);
        out += ',';
        out += format_double(c.relative_brightness);
        out += '\n';
    }
    return out;
}

std::string design_json(const SweepResult& r, const SelectedDesign& sel, double min_purity) {
    json out;
    out["cells_total"] = r.cells.size();
    std::size_t failed = 0;
    json errors = json::array();
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        if (r.cells[i].ok) continue;
        ++failed;
        json e;
        e["index"] = i;
        e["kappa2_sq"] = r.cells[i].kappa2_sq;
        e["kappa_mzi_sq"] = r.cells[i].kappa_mzi_sq;
        e["message"] = r.cells[i].error;
        errors.push_back(e);
    }
    out["cells_failed"] = failed;
    out["errors"] = errors;
    out["min_purity"] = min_purity;
    out["pump_mode"] = r.pump_optimized ? "per-cell-optimized" : "fixed";
    json s;
    s["found"] = sel.found;
    if (sel.found) {
        s["kappa2_sq"] = sel.cell.kappa2_sq;
        s["kappa_mzi_sq"] = sel.cell.kappa_mzi_sq;
        s["purity"] = sel.cell.purity;
        s["relative_brightness"] = sel.cell.relative_brightness;
        s["jsi_purity_gap"] = sel.cell.jsi_purity_gap;
        s["pump_fwhm_pm"] = sel.cell.pump_fwhm_sim_pm;
        s["signal_fwhm_pm"] = sel.cell.signal_fwhm_sim_pm;
    }
    out["selected"] = s;
    return out.dump(2) + "\n";
}

std::string coupler_csv(const DesignSpaceScan& s) {
    std::string out = "L_s_um,theta_rad,transmittance,gap_sensitivity,dispersion\n";
    for (std::size_t i = 0; i < s.l_s_um.size(); ++i) {
        for (std::size_t k = 0; k < s.theta_rad.size(); ++k) {
            const CouplerMetrics& m = s.grid[i * s.theta_rad.size() + k].metrics;
            out += format_double(s.l_s_um[i]);
            out += ',';
            out += format_double(s.theta_rad[k]);
            out += ',';
            out += format_double(m.transmittance);
            out += ',';
            out += format_double(m.gap_sensitivity);
            out += ',';
            out += format_double(m.dispersion);
            out += '\n';
        }
    }
    return out;
}

std::string coupler_contours_json(const DesignSpaceScan& s, double gap_nm, double r_um) {
    json out;
    out["gap_nm"] = gap_nm;
    out["r_um"] = r_um;
    json contours = json::array();
    for (const auto& c : s.contours) {
        json e;
        e["target_transmittance"] = c.target;
        json pts = json::array();
        for (const auto& p : c.points) pts.push_back({p.l_s_um, p.theta_rad});
        e["points"] = pts;
        json mt;
        mt["L_s_um"] = c.most_tolerant.l_s_um;
        mt["theta_rad"] = c.most_tolerant.theta_rad;
        mt["transmittance"] = c.most_tolerant.metrics.transmittance;
        mt["gap_sensitivity"] = c.most_tolerant.metrics.gap_sensitivity;
        mt["dispersion"] = c.most_tolerant.metrics.dispersion;
        e["most_tolerant"] = mt;
        contours.push_back(e);
    }
    out["contours"] = contours;
    return out.dump(2) + "\n";
}

std::string car_csv(const std::vector<CarPoint>& curve) {
    std::string out = "P_mW,car,tpa_flag\n";
    for (const auto& p : curve) {
        out += format_double(p.p_mw);
        out += ',';
        out += p.infinite ? "inf" : format_double(p.car);
        out += ',';
        out += p.tpa_flag ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string measured_jsi_csv(const MeasuredJsi& j) {
    std::string out = "signal_nm/idler_nm";
    for (double v : j.idler_nm) {
        out += ',';
        out += format_double(v);
    }
    out += '\n';
    for (std::size_t r = 0; r < j.signal_nm.size(); ++r) {
        out += format_double(j.signal_nm[r]);
        for (std::size_t c = 0; c < j.idler_nm.size(); ++c) {
            out += ',';
            out += format_double(j.intensity(static_cast<Eigen::Index>(r),
                                             static_cast<Eigen::Index>(c)));
        }
        out += '\n';
    }
    return out;
}

std::string analysis_report_json(const BrightnessFit& fit, FitWeighting weighting,
                                 const IntrinsicHeralding* heralding,
                                 const JsiReport* jsi) {
    json out;
    json f;
    f["gamma_eff_Hz_mW2"] = fit.gamma_eff_hz_mw2;
    f["err_gamma_Hz_mW2"] = fit.err_gamma;
    f["eta_s"] = fit.eta_s;
    f["err_eta_s"] = fit.err_eta_s;
    f["eta_i"] = fit.eta_i;
    f["err_eta_i"] = fit.err_eta_i;
    f["beta_s_Hz_mW"] = fit.beta_s_hz_mw;
    f["beta_i_Hz_mW"] = fit.beta_i_hz_mw;
    f["dark_Hz"] = fit.dark_hz;
    f["knee_mW"] = fit.knee_mw;  // non-finite serializes as null: no knee found
    f["points_used"] = fit.points_used;
    f["residual_norm"] = fit.residual_norm;
    f["coincidence_window_s"] = fit.dt_s;
    switch (weighting) {
        case FitWeighting::poisson: f["weighting"] = "poisson"; break;
        case FitWeighting::uniform: f["weighting"] = "uniform"; break;
        case FitWeighting::relative: f["weighting"] = "relative"; break;
    }
    f["covariance"] = double_matrix(fit.covariance);
    out["brightness_fit"] = f;

    if (heralding) {
        auto channel = [](const HeraldingEstimate& h) {
            json e;
            e["eta_src"] = h.eta_src;
            e["err"] = h.err;
            e["consistency_warning"] = h.consistency_warning;
            return e;
        };
        json ih;
        ih["signal"] = channel(heralding->signal);
        ih["idler"] = channel(heralding->idler);
        out["intrinsic_heralding"] = ih;
    }

    if (jsi) {
        json r;
        r["native_purity"] = jsi->native_purity;
        r["supersampled_purity"] = jsi->supersampled_purity;
        r["bin_pm"] = jsi->bin_pm;
        r["noise_sigma"] = jsi->noise_sigma;
        json mc;
        mc["purity"] = jsi->mc.purity;
        mc["err"] = jsi->mc.err;
        mc["trials"] = jsi->mc_trials;
        r["monte_carlo"] = mc;
        out["jsi"] = r;
    }
    return out.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace ringpair::io
