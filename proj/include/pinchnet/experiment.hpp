#pragma once

// Experiment configuration and the three sweep runners behind the CLI.
// Config files are flat `key = value` text with `#` comments; every key
// has a default, so an empty file reproduces the reference setup.

#include "pinchnet/cmatrix.hpp"
#include "pinchnet/optimize.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pinchnet {

enum class PathlossKind { FreeSpace, PowerLaw };

struct ExperimentConfig {
    double frequency = 15e9;
    double n_g = 1.4;
    double y_g = 0.0;
    double z_g = 3.0;
    double x_r = 15.0;
    double y_r = 0.0;
    double z_r = 0.0;
    double x_max = 30.0;
    double dx_min = 0.5;
    std::vector<std::size_t> n_list{1, 2, 4, 6, 8};
    std::vector<PAModel> models{PAModel::Ideal, PAModel::DC, PAModel::Baseline};
    double varphi_deg = 45.0;
    PositionMode position_mode = PositionMode::Optimized;
    PathlossKind pathloss = PathlossKind::FreeSpace;
    double c0_db = -28.0;
    double d0 = 1.0;
    double alpha = 1.0;
    std::size_t restarts = 100;
    std::uint64_t seed = 1;
    std::size_t kappa_grid = 101;

    // Mismatch study only.
    cplx gamma_t{};
    cplx gamma_r{};
    cplx gamma_l{};
    cplx h_rr{};
    cplx h_tt_self{};     // diagonal of H_TT
    cplx h_tt_mutual{};   // nearest-neighbour entries of H_TT

    /// Applies one `key = value` assignment. Throws ConfigError.
    void set(const std::string& key, const std::string& value);
    /// Reads a config file, applying every assignment in order.
    void load(std::istream& in);
    void load_file(const std::string& path);
    void validate() const;

    /// Resolved configuration in fixed key order, as written to CSV headers.
    std::vector<std::pair<std::string, std::string>> resolved() const;

    ProblemSpec problem(std::size_t num_pas) const;
    double lambda() const { return wavelength_from_frequency(frequency); }
};

/// Round-trip exact rendering (17 significant digits).
std::string format_double(double v);
std::string format_complex(cplx z);

struct GainRow {
    PAModel model = PAModel::Ideal;
    std::size_t n = 0;
    double dx_min = 0.0;
    PositionMode position_mode = PositionMode::Optimized;
    double gain = 0.0;
    std::vector<double> positions;
    std::string params;
    std::size_t restarts_used = 0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::string error;
};

struct KappaRow {
    double kappa;
    double amp1;
    double amp2;
    double phase1_deg;
    double phase2_deg;
};

struct MismatchRow {
    PAModel model = PAModel::Ideal;
    std::size_t n = 0;
    double gain_matched = 0.0;
    double gain_general = 0.0;
    double ratio = 0.0;
    std::string flag;
    std::string error;
};

/// Runs the solver for `model`. Throws on solver errors.
Solution solve(const ExperimentConfig& cfg, PAModel model, std::size_t num_pas);

std::vector<GainRow> run_gain_sweep(const ExperimentConfig& cfg);
std::vector<KappaRow> run_kappa_sweep(double varphi, std::size_t grid);
std::vector<MismatchRow> run_mismatch_study(const ExperimentConfig& cfg);

void write_gain_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<GainRow>& rows);
void write_kappa_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<KappaRow>& rows);
void write_mismatch_csv(std::ostream& out, const ExperimentConfig& cfg,
                        const std::vector<MismatchRow>& rows);

inline constexpr const char* kGainColumns =
    "model,N,dx_min,position_mode,gain_linear,gain_db,positions,params,restarts_used,seed,wall_ms,error";
inline constexpr const char* kKappaColumns = "kappa,amp1,amp2,phase1_deg,phase2_deg";
inline constexpr const char* kMismatchColumns =
    "model,N,gamma_t,gamma_r,gamma_l,h_rr,gain_matched,gain_general,ratio,flag,error";

} // namespace pinchnet
