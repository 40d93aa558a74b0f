#include "pseudosym/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pseudosym {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text)
{
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(key), "expected a finite number, got '" + std::string(text) + "'");
    }
    return v;
}

long long parse_integer(std::string_view key, std::string_view text)
{
    text = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) {
        return v;
    }
    // Accept integral values written as 3e5.
    const double d = parse_double(key, text);
    if (d != std::floor(d) || std::abs(d) > 9e15) {
        throw ConfigError(std::string(key), "expected an integer, got '" + std::string(text) + "'");
    }
    return static_cast<long long>(d);
}

std::size_t parse_count(std::string_view key, std::string_view text)
{
    const long long v = parse_integer(key, text);
    if (v < 0) {
        throw ConfigError(std::string(key), "must be non-negative");
    }
    return static_cast<std::size_t>(v);
}

int parse_int(std::string_view key, std::string_view text)
{
    const long long v = parse_integer(key, text);
    if (v < -1'000'000 || v > 1'000'000) {
        throw ConfigError(std::string(key), "out of range");
    }
    return static_cast<int>(v);
}

std::vector<std::string_view> split_list(std::string_view text)
{
    std::vector<std::string_view> parts;
    while (true) {
        const auto comma = text.find(',');
        parts.push_back(trim(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return parts;
}

bool parse_bool(std::string_view key, std::string_view text)
{
    text = trim(text);
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key), "expected true/false, got '" + std::string(text) + "'");
}

} // namespace

std::string_view model_name(ModelKind m) noexcept
{
    switch (m) {
    case ModelKind::Quadratic:
        return "quadratic";
    case ModelKind::Tokamak:
        return "tokamak";
    case ModelKind::Harmonic:
        break;
    }
    return "harmonic";
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value)
{
    key = trim(key);
    value = trim(value);
    const std::string k(key);
    if (key == "hamiltonian") {
        if (value == "quadratic") cfg.model = ModelKind::Quadratic;
        else if (value == "tokamak") cfg.model = ModelKind::Tokamak;
        else if (value == "harmonic") cfg.model = ModelKind::Harmonic;
        else throw ConfigError(k, "unknown model '" + std::string(value) + "' (quadratic, tokamak, harmonic)");
    } else if (key == "scheme") {
        const auto s = parse_scheme(value);
        if (!s) {
            throw ConfigError(k, "unknown scheme '" + std::string(value) +
                                     "' (p-implicit, q-implicit, sv-pq, sv-qp, linear-implicit, exact-se)");
        }
        cfg.scheme.variant = *s;
    } else if (key == "side") {
        if (value == "p") cfg.scheme.side = ImplicitSide::P;
        else if (value == "q") cfg.scheme.side = ImplicitSide::Q;
        else throw ConfigError(k, "expected p or q");
    } else if (key == "N") {
        cfg.n = parse_count(key, value);
    } else if (key == "M") {
        cfg.scheme.M = parse_int(key, value);
        cfg.m_list = {cfg.scheme.M};
    } else if (key == "M_list") {
        cfg.m_list.clear();
        for (auto part : split_list(value)) cfg.m_list.push_back(parse_int(key, part));
        cfg.scheme.M = cfg.m_list.front();
    } else if (key == "M1") {
        cfg.scheme.M1 = parse_int(key, value);
    } else if (key == "M2") {
        cfg.scheme.M2 = parse_int(key, value);
    } else if (key == "h") {
        cfg.h = parse_double(key, value);
    } else if (key == "steps") {
        cfg.steps = parse_count(key, value);
    } else if (key == "stride") {
        cfg.stride = parse_count(key, value);
    } else if (key == "h_min") {
        cfg.h_min = parse_double(key, value);
    } else if (key == "h_max") {
        cfg.h_max = parse_double(key, value);
    } else if (key == "h_count") {
        cfg.h_count = parse_count(key, value);
    } else if (key == "out") {
        cfg.out = std::string(value);
    } else if (key == "jobs") {
        cfg.jobs = parse_int(key, value);
    } else if (key == "full_scale") {
        cfg.full_scale = parse_bool(key, value);
    } else if (key == "R") {
        cfg.params.major_radius = parse_double(key, value);
    } else if (key == "a") {
        cfg.params.distance_param = parse_double(key, value);
    } else if (key == "B0") {
        cfg.params.b0 = parse_double(key, value);
    } else if (key == "mass") {
        cfg.params.mass = parse_double(key, value);
    } else if (key == "charge") {
        cfg.params.charge = parse_double(key, value);
    } else if (key == "q0" || key == "p0") {
        Vec<double> v;
        for (auto part : split_list(value)) v.push_back(parse_double(key, part));
        (key == "q0" ? cfg.q0 : cfg.p0) = std::move(v);
    } else {
        throw ConfigError(k, "unknown setting");
    }
}

void RunConfig::validate() const
{
    if (model != ModelKind::Tokamak && n < (model == ModelKind::Quadratic ? 2u : 1u)) {
        throw ConfigError("N", model == ModelKind::Quadratic ? "quadratic model needs N >= 2" : "must be >= 1");
    }
    if (h && !(*h > 0.0)) {
        throw ConfigError("h", "step size must be positive");
    }
    if (steps && *steps < 1) {
        throw ConfigError("steps", "must be >= 1");
    }
    if (stride < 1) {
        throw ConfigError("stride", "must be >= 1");
    }
    if (!(h_min > 0.0) || !(h_max > h_min)) {
        throw ConfigError("h_min", "need 0 < h_min < h_max");
    }
    if (h_count < 6) {
        throw ConfigError("h_count", "sweeps need at least 6 step sizes");
    }
    if (m_list.empty()) {
        throw ConfigError("M_list", "must not be empty");
    }
    for (int m : m_list) {
        if (m < 1) throw ConfigError("M", "iteration count must be >= 1");
    }
    if (scheme.is_sv() && (scheme.M1 < 1 || scheme.M2 < 1)) {
        throw ConfigError(scheme.M1 < 1 ? "M1" : "M2", "iteration count must be >= 1");
    }
    if (scheme.variant == Scheme::LinearImplicitEM && model != ModelKind::Tokamak) {
        throw ConfigError("scheme", "linear-implicit needs the tokamak model");
    }
    if (scheme.variant == Scheme::ExactSEQuadratic && model != ModelKind::Quadratic) {
        throw ConfigError("scheme", "exact-se needs the quadratic model");
    }
    if (jobs < 0) {
        throw ConfigError("jobs", "must be >= 0 (0 = all threads)");
    }
    const std::size_t dim = model == ModelKind::Tokamak ? 3 : n;
    if (q0 && q0->size() != dim) throw ConfigError("q0", "expected " + std::to_string(dim) + " components");
    if (p0 && p0->size() != dim) throw ConfigError("p0", "expected " + std::to_string(dim) + " components");
    if (q0.has_value() != p0.has_value()) {
        throw ConfigError(q0 ? "p0" : "q0", "q0 and p0 must be given together");
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("params", e.what());
    }
    if (!out.empty()) {
        const std::filesystem::path dir = std::filesystem::path(out).parent_path();
        if (!dir.empty() && !std::filesystem::is_directory(dir)) {
            throw ConfigError("out", "directory '" + dir.string() + "' does not exist");
        }
    }
}

RunConfig parse_config_text(std::string_view text, RunConfig base)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        }
        try {
            apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2) + " (line " +
                                             std::to_string(line_no) + ")");
        }
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

std::unique_ptr<Hamiltonian> make_hamiltonian(const RunConfig& cfg)
{
    switch (cfg.model) {
    case ModelKind::Quadratic:
        return std::make_unique<QuadraticModel>(cfg.n);
    case ModelKind::Tokamak:
        return std::make_unique<TokamakModel>(cfg.params);
    case ModelKind::Harmonic:
        break;
    }
    return std::make_unique<HarmonicOscillator>(cfg.n);
}

PhaseState initial_state(const RunConfig& cfg, const Hamiltonian& ham)
{
    if (const auto* tok = dynamic_cast<const TokamakModel*>(&ham)) {
        if (cfg.q0) {
            return tok->scales().nondimensionalize(PhaseState{*cfg.q0, *cfg.p0});
        }
        return tok->reference_state();
    }
    if (cfg.q0) {
        return {*cfg.q0, *cfg.p0};
    }
    const std::size_t n = ham.dim();
    PhaseState z{Vec<double>(n), Vec<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        z.q[i] = 1.0 / static_cast<double>(i + 2);
        z.p[i] = (i % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(i + 3);
    }
    return z;
}

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().dim();
    os << "step,t";
    for (std::size_t i = 1; i <= n; ++i) os << ",q" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",p" << i;
    os << ",H\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        os << traj.steps[k] << ',' << format_double(traj.times[k]);
        for (double v : traj.states[k].q) os << ',' << format_double(v);
        for (double v : traj.states[k].p) os << ',' << format_double(v);
        os << ',' << format_double(traj.energies[k]) << '\n';
    }
}

void write_defect_csv(std::ostream& os, const std::vector<DefectRow>& rows)
{
    os << "scheme,M,M1,M2,h,delta,alpha,skew_residual,det_flow,det_antidiag\n";
    for (const auto& r : rows) {
        os << scheme_name(r.cfg.variant) << ',' << r.cfg.M << ',' << r.cfg.M1 << ',' << r.cfg.M2 << ','
           << format_double(r.cfg.h) << ',' << format_double(r.delta) << ',' << format_double(r.alpha) << ','
           << format_double(r.skew_residual) << ',' << format_double(r.det_flow) << ','
           << format_double(r.det_antidiag) << '\n';
    }
}

void write_drift_csv(std::ostream& os, const std::vector<DriftSeries>& series)
{
    os << "scheme,M,step,t,abs_energy_error\n";
    for (const auto& s : series) {
        const int m = s.cfg.uses_fpi() ? s.cfg.M : 0;
        for (std::size_t k = 0; k < s.steps.size(); ++k) {
            os << scheme_name(s.cfg.variant) << ',' << m << ',' << s.steps[k] << ',' << format_double(s.times[k])
               << ',' << format_double(s.abs_energy_error[k]) << '\n';
        }
    }
}

void write_matrix_csv(std::ostream& os, const Matrix& m)
{
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            os << (j ? "," : "") << format_double(m(i, j));
        }
        os << '\n';
    }
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot open '" + tmp + "' for writing");
        }
        f << content;
        f.flush();
        if (!f) {
            std::filesystem::remove(tmp);
            throw std::runtime_error("write to '" + tmp + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace pseudosym
