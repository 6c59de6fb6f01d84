#include "pinchnet/experiment.hpp"

#include "pinchnet/error.hpp"
#include "pinchnet/system.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pinchnet {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        parts.push_back(trim(item));
    }
    return parts;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "not a number: '" + text + "'");
    }
    if (!std::isfinite(v)) {
        throw ConfigError(key, "must be finite");
    }
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "not a non-negative integer: '" + text + "'");
    }
    return v;
}

cplx parse_complex(const std::string& key, const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() == 1) {
        return {parse_double(key, parts[0]), 0.0};
    }
    if (parts.size() == 2) {
        return {parse_double(key, parts[0]), parse_double(key, parts[1])};
    }
    throw ConfigError(key, "expected 're' or 're,im'");
}

PAModel parse_model(const std::string& key, const std::string& text) {
    if (text == "ideal") {
        return PAModel::Ideal;
    }
    if (text == "dc") {
        return PAModel::DC;
    }
    if (text == "baseline") {
        return PAModel::Baseline;
    }
    throw ConfigError(key, "unknown PA model '" + text + "' (ideal, dc, baseline)");
}

constexpr double kDeg = kPi / 180.0;

} // namespace

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);

    if (key == "frequency") {
        frequency = parse_double(key, value);
    } else if (key == "n_g") {
        n_g = parse_double(key, value);
    } else if (key == "y_g") {
        y_g = parse_double(key, value);
    } else if (key == "z_g") {
        z_g = parse_double(key, value);
    } else if (key == "x_r") {
        x_r = parse_double(key, value);
    } else if (key == "y_r") {
        y_r = parse_double(key, value);
    } else if (key == "z_r") {
        z_r = parse_double(key, value);
    } else if (key == "x_max") {
        x_max = parse_double(key, value);
    } else if (key == "dx_min") {
        dx_min = parse_double(key, value);
    } else if (key == "n_list") {
        n_list.clear();
        for (const auto& item : split(value, ',')) {
            n_list.push_back(static_cast<std::size_t>(parse_uint(key, item)));
        }
    } else if (key == "models") {
        models.clear();
        for (const auto& item : split(value, ',')) {
            models.push_back(parse_model(key, item));
        }
    } else if (key == "varphi_deg") {
        varphi_deg = parse_double(key, value);
    } else if (key == "position_mode") {
        if (value == "optimized") {
            position_mode = PositionMode::Optimized;
        } else if (value == "fixed") {
            position_mode = PositionMode::FixedHeuristic;
        } else {
            throw ConfigError(key, "expected 'optimized' or 'fixed'");
        }
    } else if (key == "pathloss") {
        if (value == "free_space") {
            pathloss = PathlossKind::FreeSpace;
        } else if (value == "power_law") {
            pathloss = PathlossKind::PowerLaw;
        } else {
            throw ConfigError(key, "expected 'free_space' or 'power_law'");
        }
    } else if (key == "c0_db") {
        c0_db = parse_double(key, value);
    } else if (key == "d0") {
        d0 = parse_double(key, value);
    } else if (key == "alpha") {
        alpha = parse_double(key, value);
    } else if (key == "restarts") {
        restarts = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "seed") {
        seed = parse_uint(key, value);
    } else if (key == "kappa_grid") {
        kappa_grid = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "gamma_t") {
        gamma_t = parse_complex(key, value);
    } else if (key == "gamma_r") {
        gamma_r = parse_complex(key, value);
    } else if (key == "gamma_l") {
        gamma_l = parse_complex(key, value);
    } else if (key == "h_rr") {
        h_rr = parse_complex(key, value);
    } else if (key == "h_tt_self") {
        h_tt_self = parse_complex(key, value);
    } else if (key == "h_tt_mutual") {
        h_tt_mutual = parse_complex(key, value);
    } else {
        throw ConfigError(key.empty() ? "<empty>" : key, "unknown configuration key");
    }
}

void ExperimentConfig::load(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        }
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

void ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    load(in);
}

void ExperimentConfig::validate() const {
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) {
            throw ConfigError(key, "must be positive");
        }
    };
    positive("frequency", frequency);
    positive("n_g", n_g);
    positive("x_max", x_max);
    positive("dx_min", dx_min);
    if (!(varphi_deg > 0.0 && varphi_deg < 180.0)) {
        throw ConfigError("varphi_deg", "must lie in (0, 180)");
    }
    if (n_list.empty()) {
        throw ConfigError("n_list", "must not be empty");
    }
    for (const auto n : n_list) {
        if (n == 0) {
            throw ConfigError("n_list", "PA counts must be at least 1");
        }
    }
    if (models.empty()) {
        throw ConfigError("models", "must not be empty");
    }
    if (restarts == 0) {
        throw ConfigError("restarts", "must be at least 1");
    }
    if (kappa_grid < 2) {
        throw ConfigError("kappa_grid", "must be at least 2");
    }
    if (pathloss == PathlossKind::PowerLaw) {
        positive("d0", d0);
        positive("alpha", alpha);
    }
    const double xi = (y_g - y_r) * (y_g - y_r) + (z_g - z_r) * (z_g - z_r);
    if (!(xi > 0.0)) {
        throw ConfigError("z_g", "receiver lies on the waveguide axis");
    }
    auto reflection = [](const char* key, cplx g) {
        if (std::abs(g) > 1.0 + 1e-12) {
            throw ConfigError(key, "reflection coefficient magnitude exceeds 1");
        }
    };
    reflection("gamma_t", gamma_t);
    reflection("gamma_r", gamma_r);
    reflection("gamma_l", gamma_l);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
    std::string ns;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        ns += (i ? "," : "") + std::to_string(n_list[i]);
    }
    std::string ms;
    for (std::size_t i = 0; i < models.size(); ++i) {
        ms += (i ? "," : "") + to_string(models[i]);
    }
    return {
        {"frequency", format_double(frequency)},
        {"n_g", format_double(n_g)},
        {"y_g", format_double(y_g)},
        {"z_g", format_double(z_g)},
        {"x_r", format_double(x_r)},
        {"y_r", format_double(y_r)},
        {"z_r", format_double(z_r)},
        {"x_max", format_double(x_max)},
        {"dx_min", format_double(dx_min)},
        {"n_list", ns},
        {"models", ms},
        {"varphi_deg", format_double(varphi_deg)},
        {"position_mode", to_string(position_mode)},
        {"pathloss", pathloss == PathlossKind::FreeSpace ? "free_space" : "power_law"},
        {"c0_db", format_double(c0_db)},
        {"d0", format_double(d0)},
        {"alpha", format_double(alpha)},
        {"restarts", std::to_string(restarts)},
        {"seed", std::to_string(seed)},
        {"kappa_grid", std::to_string(kappa_grid)},
        {"gamma_t", format_complex(gamma_t)},
        {"gamma_r", format_complex(gamma_r)},
        {"gamma_l", format_complex(gamma_l)},
        {"h_rr", format_complex(h_rr)},
        {"h_tt_self", format_complex(h_tt_self)},
        {"h_tt_mutual", format_complex(h_tt_mutual)},
    };
}

ProblemSpec ExperimentConfig::problem(std::size_t num_pas) const {
    ProblemSpec spec;
    spec.num_pas = num_pas;
    spec.dx_min = dx_min;
    spec.geom.y_g = y_g;
    spec.geom.z_g = z_g;
    spec.geom.receiver = {x_r, y_r, z_r};
    spec.geom.x_max = x_max;
    spec.lambda = lambda();
    spec.n_g = n_g;
    spec.varphi = varphi_deg * kDeg;
    spec.model = pathloss == PathlossKind::FreeSpace
                     ? PathlossModel::free_space()
                     : PathlossModel::power_law(std::pow(10.0, c0_db / 10.0), d0, alpha);
    spec.position_mode = position_mode;
    return spec;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_complex(cplx z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
    return buf;
}

Solution solve(const ExperimentConfig& cfg, PAModel model, std::size_t num_pas) {
    const ProblemSpec spec = cfg.problem(num_pas);
    switch (model) {
    case PAModel::Ideal:
        return ideal_solve(spec);
    case PAModel::DC:
        return dc_alternating_solve(spec, cfg.restarts, cfg.seed);
    case PAModel::Baseline:
        return baseline_solve(spec);
    }
    throw InvalidArgument("solve: unknown PA model");
}

namespace {

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? ";" : "") + format_double(values[i]);
    }
    return out;
}

// Ideal PAs: "amp2@phase2_rad" per PA (theta1 is real and implied by the
// amplitudes); coupler PAs: kappa per PA.
std::string format_params(const Solution& sol) {
    if (const auto* ideal = std::get_if<IdealParams>(&sol.params)) {
        std::string out;
        for (std::size_t i = 0; i < ideal->pas.size(); ++i) {
            const cplx t2 = ideal->pas[i].theta2;
            out += (i ? ";" : "") + format_double(std::abs(t2)) + "@" + format_double(std::arg(t2));
        }
        return out;
    }
    return join(std::get<CouplerParams>(sol.params).kappas);
}

void write_header(std::ostream& out, const char* command, const ExperimentConfig& cfg) {
    out << "# pinchnet " << command << '\n';
    for (const auto& [key, value] : cfg.resolved()) {
        out << "# " << key << " = " << value << '\n';
    }
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string quoted = "\"";
    for (const char c : text) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c == '\n' ? ' ' : c;
    }
    return quoted + "\"";
}

} // namespace

std::vector<GainRow> run_gain_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<GainRow> rows;
    for (const PAModel model : cfg.models) {
        for (const std::size_t n : cfg.n_list) {
            GainRow row;
            row.model = model;
            row.n = n;
            row.dx_min = cfg.dx_min;
            row.position_mode = cfg.position_mode;
            row.seed = cfg.seed;
            const auto start = std::chrono::steady_clock::now();
            try {
                const Solution sol = solve(cfg, model, n);
                row.gain = sol.gain;
                row.positions = sol.s;
                row.params = format_params(sol);
                row.restarts_used = sol.restarts_used;
            } catch (const Error& e) {
                row.error = e.what();
            }
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<KappaRow> run_kappa_sweep(double varphi, std::size_t grid) {
    if (grid < 2) {
        throw ConfigError("kappa_grid", "must be at least 2");
    }
    std::vector<KappaRow> rows;
    rows.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double kappa = kKappaMax * (static_cast<double>(i) / static_cast<double>(grid - 1));
        const AmpPhase ap = dc_amp_phase({kappa, varphi});
        rows.push_back({kappa, ap.amp1, ap.amp2, ap.phase1 / kDeg, ap.phase2 / kDeg});
    }
    return rows;
}

std::vector<MismatchRow> run_mismatch_study(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<MismatchRow> rows;
    const bool boundary = std::abs(cfg.gamma_t) >= 1.0 || std::abs(cfg.gamma_r) >= 1.0 ||
                          std::abs(cfg.gamma_l) >= 1.0;
    for (const PAModel model : cfg.models) {
        for (const std::size_t n : cfg.n_list) {
            MismatchRow row;
            row.model = model;
            row.n = n;
            try {
                const ProblemSpec spec = cfg.problem(n);
                const Solution sol = solve(cfg, model, n);
                const SystemLayout layout = SystemLayout::from_abscissas(sol.s, spec.beta_g(), spec.geom,
                                                                         spec.lambda, spec.model);
                const CVector h = layout.channel();
                const auto pas = sol.scattering();

                row.gain_matched = channel_gain(matched_chain_coefficient(sol.coefficients(), sol.s, h, spec.beta_g()));

                ChannelState ch = ChannelState::matched(h);
                ch.gamma_t = cfg.gamma_t;
                ch.gamma_r = cfg.gamma_r;
                ch.gamma_l = cfg.gamma_l;
                ch.h_rr = cfg.h_rr;
                for (std::size_t i = 0; i < n; ++i) {
                    ch.h_tt(i, i) = cfg.h_tt_self;
                    if (i + 1 < n) {
                        ch.h_tt(i, i + 1) = cfg.h_tt_mutual;
                        ch.h_tt(i + 1, i) = cfg.h_tt_mutual;
                    }
                }
                row.gain_general = channel_gain(e2e_multi_general(pas, layout, ch));
                row.ratio = row.gain_matched > 0.0 ? row.gain_general / row.gain_matched : 0.0;
                const bool finite = std::isfinite(row.gain_general) && std::isfinite(row.ratio);
                row.flag = boundary || !finite ? "pathological" : "ok";
            } catch (const Error& e) {
                row.flag = "pathological";
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_gain_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<GainRow>& rows) {
    write_header(out, "gain-sweep", cfg);
    out << kGainColumns << '\n';
    for (const auto& r : rows) {
        out << to_string(r.model) << ',' << r.n << ',' << format_double(r.dx_min) << ','
            << to_string(r.position_mode) << ',';
        if (r.error.empty()) {
            out << format_double(r.gain) << ',' << format_double(10.0 * std::log10(r.gain)) << ','
                << join(r.positions) << ',' << r.params << ',' << r.restarts_used;
        } else {
            out << ",,,," << r.restarts_used;
        }
        out << ',' << r.seed << ',' << format_double(r.wall_ms) << ',' << csv_field(r.error) << '\n';
    }
}

void write_kappa_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<KappaRow>& rows) {
    write_header(out, "kappa-sweep", cfg);
    out << kKappaColumns << '\n';
    for (const auto& r : rows) {
        out << format_double(r.kappa) << ',' << format_double(r.amp1) << ',' << format_double(r.amp2)
            << ',' << format_double(r.phase1_deg) << ',' << format_double(r.phase2_deg) << '\n';
    }
}

void write_mismatch_csv(std::ostream& out, const ExperimentConfig& cfg,
                        const std::vector<MismatchRow>& rows) {
    write_header(out, "mismatch", cfg);
    out << kMismatchColumns << '\n';
    for (const auto& r : rows) {
        out << to_string(r.model) << ',' << r.n << ',' << format_complex(cfg.gamma_t) << ','
            << format_complex(cfg.gamma_r) << ',' << format_complex(cfg.gamma_l) << ','
            << format_complex(cfg.h_rr) << ',';
        if (r.error.empty()) {
            out << format_double(r.gain_matched) << ',' << format_double(r.gain_general) << ','
                << format_double(r.ratio);
        } else {
            out << ",,";
        }
        out << ',' << r.flag << ',' << csv_field(r.error) << '\n';
    }
}

} // namespace pinchnet
