#pragma once

// Run configuration and CSV output.
//
// Config files are `key = value` lines with `#` comments. The same keys are
// used by command-line flags, which are applied after the file.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pseudosym/experiments.hpp"
#include "pseudosym/tokamak.hpp"

namespace pseudosym {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field)
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class ModelKind { Quadratic, Tokamak, Harmonic };

struct RunConfig {
    ModelKind model = ModelKind::Tokamak;
    SchemeConfig scheme{Scheme::QImplicitSE, 0.1, 3, 1, 3, ImplicitSide::P};  // h from `h` below
    std::size_t n = 3;                // ignored for the tokamak (always 3)
    std::optional<double> h;          // T0 units for the tokamak
    std::optional<std::size_t> steps;
    std::size_t stride = 1;
    double h_min = 0.02;
    double h_max = 0.2;
    std::size_t h_count = 10;
    std::vector<int> m_list{1, 2, 3};
    std::string out;                  // empty: standard output
    int jobs = 1;
    bool full_scale = false;
    PhysicalParams params;
    /// Initial state; SI units for the tokamak.
    std::optional<Vec<double>> q0;
    std::optional<Vec<double>> p0;

    /// Throws ConfigError naming the first inconsistent field.
    void validate() const;
};

/// Sets one field from its textual form. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` text on top of `base`. Errors carry the line number.
RunConfig parse_config_text(std::string_view text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

std::string_view model_name(ModelKind m) noexcept;

std::unique_ptr<Hamiltonian> make_hamiltonian(const RunConfig& cfg);
/// Configured initial state in the model's working units.
PhaseState initial_state(const RunConfig& cfg, const Hamiltonian& ham);

/// %.17g
std::string format_double(double x);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_defect_csv(std::ostream& os, const std::vector<DefectRow>& rows);
void write_drift_csv(std::ostream& os, const std::vector<DriftSeries>& series);
void write_matrix_csv(std::ostream& os, const Matrix& m);

/// Writes to `path` through a temporary file and rename, so readers never see
/// a partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace pseudosym
