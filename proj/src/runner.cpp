#include "ulwaves/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cctype>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ulwaves/canal.hpp"
#include "ulwaves/dirichlet_neumann.hpp"
#include "ulwaves/dispersive.hpp"
#include "ulwaves/fit.hpp"
#include "ulwaves/ul_spaces.hpp"

namespace ulwaves {

namespace fs = std::filesystem;

namespace {

constexpr int format_version = 1;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_real(const std::string& s, double& v)
{
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(v);
}

bool parse_integer(const std::string& s, int& v)
{
    if (s.empty()) return false;
    char* end = nullptr;
    const long l = std::strtol(s.c_str(), &end, 10);
    v = static_cast<int>(l);
    return end == s.c_str() + s.size() && l == v;
}

std::string num(double v)
{
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

const KeySpec* find_key(const std::string& key)
{
    for (const auto& k : config_schema())
        if (k.name == key) return &k;
    return nullptr;
}

}  // namespace

const std::vector<KeySpec>& config_schema()
{
    static const std::vector<KeySpec> schema{
        {"scenario", KeyType::choice, "simulate", {"simulate", "canal", "basin", "dno-test", "paradiff-test", "dispersive", "norms"}, ""},
        {"seed", KeyType::integer, "1", {}, "seed for random data"},
        {"output.dir", KeyType::text, "ulwaves_out", {}, ""},
        {"output.snapshot_every", KeyType::integer, "0", {}, "0: initial and final only"},
        {"grid.points", KeyType::integers, "64", {}, "points per axis"},
        {"grid.lengths", KeyType::reals, "6.283185307179586", {}, "period per axis"},
        {"physics.g", KeyType::real, "1", {}, ""},
        {"physics.h", KeyType::real, "1", {}, "depth"},
        {"dno.delta", KeyType::real, "0.1", {}, "straightening smoothing"},
        {"dno.nz", KeyType::integer, "32", {}, "Chebyshev intervals"},
        {"dno.tol", KeyType::real, "1e-10", {}, "GMRES relative tolerance"},
        {"dno.bottom", KeyType::choice, "flat", {"flat", "following"}, ""},
        {"stepper.T", KeyType::real, "1", {}, "final time"},
        {"stepper.dt", KeyType::real, "0.01", {}, ""},
        {"stepper.epsilon", KeyType::real, "0", {}, "parabolic regularization"},
        {"stepper.scheme", KeyType::choice, "rk4", {"rk4", "parabolic"}, ""},
        {"stepper.fixed_point_tol", KeyType::real, "1e-12", {}, ""},
        {"monitors.taylor", KeyType::boolean, "true", {}, ""},
        {"monitors.depth", KeyType::boolean, "true", {}, ""},
        {"monitors.energy", KeyType::boolean, "false", {}, "symmetrized energy"},
        {"monitors.taylor_every", KeyType::integer, "5", {}, ""},
        {"monitors.taylor_floor", KeyType::real, "0", {}, ""},
        {"monitors.depth_floor", KeyType::real, "0", {}, ""},
        {"monitors.symmetrizer_s", KeyType::real, "2", {}, ""},
        {"monitors.ul_s", KeyType::reals, "", {}, "uniformly local norms of eta"},
        {"initial.kind", KeyType::choice, "rest", {"rest", "travelling", "standing", "random"}, ""},
        {"initial.amplitude", KeyType::real, "0.01", {}, ""},
        {"initial.mode", KeyType::integers, "1", {}, "mode numbers per axis"},
        {"initial.band", KeyType::integer, "4", {}, "random data bandwidth"},
        {"canal.width", KeyType::reals, "", {}, "wall distance per reflected axis"},
        {"canal.compat_tol", KeyType::real, "1e-8", {}, ""},
        {"canal.parity_tol", KeyType::real, "1e-10", {}, ""},
        {"canal.projection_every", KeyType::integer, "0", {}, ""},
        {"canal.s", KeyType::real, "3", {}, "regularity index of the data"},
        {"dispersive.alpha", KeyType::real, "0.5", {}, ""},
        {"dispersive.d", KeyType::integer, "1", {}, ""},
        {"dispersive.j_range", KeyType::integers, "20,22,24,26", {}, ""},
        {"dispersive.quadrature", KeyType::real, "10", {}, "eta step = h^alpha / quadrature"},
        {"dispersive.s_points", KeyType::integer, "2000", {}, ""},
        {"dispersive.s_max_factor", KeyType::real, "2", {}, ""},
        {"norms.s", KeyType::reals, "0,1,2", {}, ""},
        {"dno_test.samples", KeyType::integer, "10", {}, ""},
        {"dno_test.amplitude", KeyType::real, "0.2", {}, "W^{1,inf} size of eta"},
        {"dno_test.k_max", KeyType::integer, "16", {}, ""},
        {"paradiff_test.k", KeyType::integers, "8,16,32,64", {}, ""},
        {"paradiff_test.amplitude", KeyType::real, "0.05", {}, ""},
    };
    return schema;
}

RunConfig::RunConfig()
{
    for (const auto& k : config_schema()) values_[k.name] = k.fallback;
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& where)
{
    const std::string pre = where.empty() ? "" : where + ": ";
    const KeySpec* spec = find_key(key);
    if (!spec) throw RunConfigError(pre + "unknown key '" + key + "'");
    const std::string v = trim(value);
    auto bad = [&](const std::string& what) { throw RunConfigError(pre + "key '" + key + "' expects " + what + ", got '" + v + "'"); };
    double d;
    int i;
    switch (spec->type) {
    case KeyType::text: break;
    case KeyType::real:
        if (!parse_real(v, d)) bad("a number");
        break;
    case KeyType::integer:
        if (!parse_integer(v, i)) bad("an integer");
        break;
    case KeyType::boolean:
        if (v != "true" && v != "false") bad("true or false");
        break;
    case KeyType::reals:
        for (const auto& item : split_list(v))
            if (!parse_real(item, d)) bad("a comma-separated list of numbers");
        break;
    case KeyType::integers:
        for (const auto& item : split_list(v))
            if (!parse_integer(item, i)) bad("a comma-separated list of integers");
        break;
    case KeyType::choice: {
        bool ok = false;
        std::string all;
        for (const auto& c : spec->choices) {
            ok = ok || c == v;
            all += (all.empty() ? "" : "|") + c;
        }
        if (!ok) bad("one of " + all);
        break;
    }
    }
    values_[key] = v;
    explicit_[key] = true;
}

const std::string& RunConfig::text(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw RunConfigError("unknown key '" + key + "'");
    return it->second;
}

double RunConfig::real(const std::string& key) const { return std::strtod(text(key).c_str(), nullptr); }
int RunConfig::integer(const std::string& key) const { return static_cast<int>(std::strtol(text(key).c_str(), nullptr, 10)); }
bool RunConfig::boolean(const std::string& key) const { return text(key) == "true"; }

std::vector<double> RunConfig::reals(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) out.push_back(std::strtod(item.c_str(), nullptr));
    return out;
}

std::vector<int> RunConfig::integers(const std::string& key) const
{
    std::vector<int> out;
    for (const auto& item : split_list(text(key))) out.push_back(static_cast<int>(std::strtol(item.c_str(), nullptr, 10)));
    return out;
}

void RunConfig::validate() const
{
    const auto pts = integers("grid.points");
    const auto len = reals("grid.lengths");
    if (pts.empty() || pts.size() > 2) throw RunConfigError("grid.points needs one or two entries");
    if (len.size() != pts.size()) throw RunConfigError("grid.lengths needs one entry per entry of grid.points");
    for (std::size_t a = 0; a < pts.size(); ++a) {
        if (pts[a] < 4 || pts[a] % 2) throw RunConfigError("grid.points entries must be even and >= 4");
        if (!(len[a] > 0)) throw RunConfigError("grid.lengths entries must be positive");
    }
    if (!(real("physics.h") > 0) || !(real("physics.g") > 0)) throw RunConfigError("physics.g and physics.h must be positive");
    if (integer("dno.nz") < 4) throw RunConfigError("dno.nz must be >= 4");
    if (!(real("dno.delta") > 0)) throw RunConfigError("dno.delta must be positive");
    if (!(real("stepper.dt") != 0) || !(real("stepper.T") >= 0)) throw RunConfigError("stepper.dt must be nonzero and stepper.T >= 0");
    if (text("stepper.scheme") == "parabolic" && !(real("stepper.epsilon") > 0))
        throw RunConfigError("stepper.scheme = parabolic needs stepper.epsilon > 0");

    const std::string& sc = text("scenario");
    if (sc == "canal" || sc == "basin") {
        const auto w = reals("canal.width");
        const std::size_t walls = sc == "basin" ? 2 : 1;
        if (sc == "basin" && pts.size() != 2) throw RunConfigError("scenario basin needs a two-dimensional grid");
        if (w.size() != walls)
            throw RunConfigError("scenario " + sc + " needs canal.width with " + std::to_string(walls) + " entr" +
                                 (walls == 1 ? "y" : "ies"));
        for (std::size_t a = 0; a < walls; ++a) {
            if (!(w[a] > 0) || std::abs(len[a] - 2 * w[a]) > 1e-12 * len[a]) {
                std::ostringstream os;
                os << "canal.width[" << a << "] = " << w[a] << " is not aligned with the grid: the doubled torus needs grid.lengths["
                   << a << "] = 2 * canal.width[" << a << "] = " << 2 * w[a] << " so that both walls fall on grid nodes (got "
                   << len[a] << ")";
                throw RunConfigError(os.str());
            }
        }
    }
    if (sc == "dispersive") {
        ProbeConfig p;
        p.alpha = real("dispersive.alpha");
        p.d = integer("dispersive.d");
        p.j_range = integers("dispersive.j_range");
        p.quadrature = real("dispersive.quadrature");
        p.s_points = integer("dispersive.s_points");
        p.s_max_factor = real("dispersive.s_max_factor");
        try {
            ulwaves::validate(p);
        } catch (const std::exception& e) {
            throw RunConfigError(std::string("dispersive: ") + e.what());
        }
        if (p.j_range.size() < 4) throw RunConfigError("dispersive.j_range needs at least four entries");
    }
}

std::string RunConfig::echo() const
{
    std::ostringstream os;
    os << "# effective configuration, format version " << format_version << "\n";
    for (const auto& k : config_schema()) os << k.name << " = " << values_.at(k.name) << "\n";
    return os.str();
}

RunConfig parse_config_text(const std::string& text, const std::string& origin)
{
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(n);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw RunConfigError(where + ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1), where);
    }
    return cfg;
}

RunConfig parse_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw RunConfigError("cannot read configuration file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

void apply_override(RunConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw RunConfigError("override '" + assignment + "' is not key=value");
    cfg.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1), "override");
}

std::string diagnostics_header()
{
    return "{\"format\":\"ulwaves-diagnostics\",\"version\":" + std::to_string(format_version) + "}";
}

std::string format_record(const DiagnosticsRecord& r)
{
    std::ostringstream os;
    os << "{\"t\":" << num(r.t) << ",\"hamiltonian\":" << num(r.hamiltonian) << ",\"mass\":" << num(r.mass)
       << ",\"min_taylor\":" << num(r.min_taylor) << ",\"min_depth\":" << num(r.min_depth)
       << ",\"symmetrized_energy\":" << num(r.symmetrized_energy) << ",\"ul_norms\":{";
    bool first = true;
    for (const auto& [s, v] : r.ul_norms) {
        os << (first ? "" : ",") << quoted(num(s)) << ":" << num(v);
        first = false;
    }
    os << "},\"parity_defects\":{";
    first = true;
    for (const auto& [k, v] : r.parity_defects) {
        os << (first ? "" : ",") << quoted(k) << ":" << num(v);
        first = false;
    }
    os << "},\"abort_reason\":" << (r.abort_reason.empty() ? "null" : quoted(r.abort_reason)) << "}";
    return os.str();
}

RealField random_band_limited(const PeriodicGrid& grid, int band, double w1inf, std::mt19937& rng)
{
    std::normal_distribution<double> nd;
    const RealField x = grid.coordinate(0);
    const RealField y = grid.dims() > 1 ? grid.coordinate(1) : RealField(RealField::Zero(grid.size()));
    const double k0 = 2 * std::numbers::pi / grid.length(0);
    const double k1 = grid.dims() > 1 ? 2 * std::numbers::pi / grid.length(1) : 0.0;
    const int b1 = grid.dims() > 1 ? band : 0;
    RealField u = RealField::Zero(grid.size());
    for (int m0 = 0; m0 <= band; ++m0)
        for (int m1 = -b1; m1 <= b1; ++m1) {
            if (m0 == 0 && m1 <= 0) continue;
            const double decay = 1.0 / (1.0 + m0 * m0 + m1 * m1);
            const RealField ph = m0 * k0 * x + m1 * k1 * y;
            u += decay * (nd(rng) * ph.cos() + nd(rng) * ph.sin());
        }
    double size = u.abs().maxCoeff();
    double grad = 0.0;
    const VectorField gu = spectral_gradient(grid, u);
    RealField g2 = RealField::Zero(grid.size());
    for (const auto& c : gu) g2 += c.square();
    grad = g2.sqrt().maxCoeff();
    size += grad;
    return size > 0 ? RealField(w1inf * u / size) : u;
}

void write_snapshot(const fs::path& stem, const Snapshot& s)
{
    if (static_cast<Eigen::Index>(std::accumulate(s.points.begin(), s.points.end(), 1L, std::multiplies<long>())) !=
        s.values.size())
        throw std::invalid_argument("snapshot size does not match its points");
    std::ofstream bin(stem.string() + ".bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    std::ofstream hdr(stem.string() + ".hdr");
    hdr << "format = ulwaves-snapshot\nversion = " << format_version << "\nfield = " << s.field
        << "\ndtype = float64\nbyte_order = little\ndims = " << s.points.size() << "\npoints =";
    for (int p : s.points) hdr << " " << p;
    hdr << "\nlengths =";
    for (double l : s.lengths) hdr << " " << num(l);
    hdr << "\nt = " << num(s.t) << "\nlayout = axis 0 fastest\n";
    if (!bin || !hdr) throw std::runtime_error("cannot write snapshot " + stem.string());
}

Snapshot read_snapshot(const fs::path& stem)
{
    std::ifstream hdr(stem.string() + ".hdr");
    if (!hdr) throw std::runtime_error("cannot read snapshot header " + stem.string() + ".hdr");
    Snapshot s;
    std::string line;
    while (std::getline(hdr, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        std::istringstream val(line.substr(eq + 1));
        if (key == "version") {
            int v;
            val >> v;
            if (v != format_version) throw std::runtime_error("unsupported snapshot version");
        } else if (key == "dtype") {
            std::string t;
            val >> t;
            if (t != "float64") throw std::runtime_error("unsupported snapshot dtype " + t);
        } else if (key == "field") {
            val >> s.field;
        } else if (key == "points") {
            for (int p; val >> p;) s.points.push_back(p);
        } else if (key == "lengths") {
            for (double l; val >> l;) s.lengths.push_back(l);
        } else if (key == "t") {
            val >> s.t;
        }
    }
    const long n = std::accumulate(s.points.begin(), s.points.end(), 1L, std::multiplies<long>());
    s.values.resize(n);
    std::ifstream bin(stem.string() + ".bin", std::ios::binary);
    bin.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!bin || bin.gcount() != static_cast<std::streamsize>(n * sizeof(double)))
        throw std::runtime_error("snapshot data truncated: " + stem.string() + ".bin");
    return s;
}

namespace {

struct Context {
    const RunConfig& cfg;
    std::ostream& log;
    fs::path dir;
};

PeriodicGrid grid_of(const RunConfig& cfg) { return make_grid(cfg.reals("grid.lengths"), cfg.integers("grid.points")); }

PhysicsParams physics_of(const RunConfig& cfg) { return {cfg.real("physics.g"), cfg.real("physics.h")}; }

DnoParams dno_of(const RunConfig& cfg)
{
    DnoParams p;
    p.h = cfg.real("physics.h");
    p.delta = cfg.real("dno.delta");
    p.zpoints = cfg.integer("dno.nz");
    p.tol = cfg.real("dno.tol");
    p.bottom = cfg.text("dno.bottom") == "flat" ? BottomMode::flat : BottomMode::following;
    return p;
}

StepConfig stepper_of(const RunConfig& cfg)
{
    StepConfig s;
    s.dt = cfg.real("stepper.dt");
    s.epsilon = cfg.real("stepper.epsilon");
    s.scheme = cfg.text("stepper.scheme") == "rk4" ? Scheme::rk4 : Scheme::parabolic;
    s.fixed_point_tol = cfg.real("stepper.fixed_point_tol");
    s.monitors.taylor = cfg.boolean("monitors.taylor");
    s.monitors.depth = cfg.boolean("monitors.depth");
    s.monitors.energy = cfg.boolean("monitors.energy");
    s.monitors.taylor_every = cfg.integer("monitors.taylor_every");
    s.monitors.taylor_floor = cfg.real("monitors.taylor_floor");
    s.monitors.depth_floor = cfg.real("monitors.depth_floor");
    s.monitors.symmetrizer_s = cfg.real("monitors.symmetrizer_s");
    s.monitors.ul_s = cfg.reals("monitors.ul_s");
    return s;
}

SurfaceState initial_state(const RunConfig& cfg, const PeriodicGrid& g)
{
    const std::string& kind = cfg.text("initial.kind");
    const double A = cfg.real("initial.amplitude");
    SurfaceState s{RealField::Zero(g.size()), RealField::Zero(g.size()), 0.0};
    if (kind == "rest") return s;
    if (kind == "random") {
        std::mt19937 rng(static_cast<unsigned>(cfg.integer("seed")));
        s.eta = random_band_limited(g, cfg.integer("initial.band"), A, rng);
        s.psi = random_band_limited(g, cfg.integer("initial.band"), A, rng);
        return s;
    }
    const auto modes = cfg.integers("initial.mode");
    RealField phase = RealField::Zero(g.size());
    double k2 = 0.0;
    for (int a = 0; a < g.dims() && a < static_cast<int>(modes.size()); ++a) {
        const double k = 2 * std::numbers::pi * modes[a] / g.length(a);
        phase += k * g.coordinate(a);
        k2 += k * k;
    }
    s.eta = A * phase.cos();
    if (kind == "travelling" && k2 > 0) {
        const PhysicsParams ph = physics_of(cfg);
        const double k = std::sqrt(k2), w = std::sqrt(ph.g * k * std::tanh(k * ph.h));
        s.psi = A * ph.g / w * phase.sin();
    }
    return s;
}

std::string series_name(const std::string& raw)
{
    std::string out;
    for (char c : raw) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
    return out;
}

// Two-column (t, value) files per diagnostic; NaN samples are skipped.
void write_series(const fs::path& dir, const std::vector<DiagnosticsRecord>& recs)
{
    fs::create_directories(dir);
    std::map<std::string, std::vector<std::pair<double, double>>> cols;
    for (const auto& r : recs) {
        auto add = [&](const std::string& name, double v) {
            if (std::isfinite(v)) cols[name].emplace_back(r.t, v);
        };
        add("hamiltonian", r.hamiltonian);
        add("mass", r.mass);
        add("min_taylor", r.min_taylor);
        add("min_depth", r.min_depth);
        add("symmetrized_energy", r.symmetrized_energy);
        for (const auto& [s, v] : r.ul_norms) add("ul_norm_s" + num(s), v);
        for (const auto& [k, v] : r.parity_defects) add("parity_" + series_name(k), v);
    }
    for (const auto& [name, pts] : cols) {
        std::ofstream out(dir / (name + ".dat"));
        out << "# t " << name << "\n";
        for (const auto& [t, v] : pts) out << num(t) << " " << num(v) << "\n";
    }
}

void snapshot_state(const Context& c, const PeriodicGrid& g, const SurfaceState& s, const std::string& tag)
{
    fs::create_directories(c.dir / "snapshots");
    write_snapshot(c.dir / "snapshots" / ("eta_" + tag), {"eta", g.points(), g.lengths(), s.t, s.eta});
    write_snapshot(c.dir / "snapshots" / ("psi_" + tag), {"psi", g.points(), g.lengths(), s.t, s.psi});
}

class DiagnosticsFile {
public:
    explicit DiagnosticsFile(const fs::path& p) : out_(p)
    {
        out_ << diagnostics_header() << "\n";
    }
    void operator()(const DiagnosticsRecord& r)
    {
        out_ << format_record(r) << "\n";
        out_.flush();
        records.push_back(r);
    }
    std::vector<DiagnosticsRecord> records;

private:
    std::ofstream out_;
};

int finish_trajectory(const Context& c, const PeriodicGrid& g, const Trajectory& traj, DiagnosticsFile& diag)
{
    write_series(c.dir / "series", diag.records);
    const int every = c.cfg.integer("output.snapshot_every");
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const bool edge = i == 0 || i + 1 == traj.states.size();
        if (edge || (every > 0 && i % every == 0)) {
            const std::string tag = i == 0 ? "initial" : (i + 1 == traj.states.size() ? "final" : "step" + std::to_string(i));
            snapshot_state(c, g, traj.states[i], tag);
        }
    }
    if (traj.aborted()) {
        c.log << "aborted: " << traj.abort_reason << "\n";
        return exit_aborted;
    }
    c.log << "completed " << diag.records.size() - 1 << " steps\n";
    return exit_ok;
}

int run_simulate(const Context& c)
{
    const PeriodicGrid g = grid_of(c.cfg);
    WaterWaveModel m(g, physics_of(c.cfg), dno_of(c.cfg));
    const SurfaceState s0 = initial_state(c.cfg, g);
    DiagnosticsFile diag(c.dir / "diagnostics.ndjson");
    const Trajectory traj = integrate(m, s0, c.cfg.real("stepper.T"), stepper_of(c.cfg), std::ref(diag), nullptr, 1);
    return finish_trajectory(c, g, traj, diag);
}

int run_canal(const Context& c, bool basin)
{
    const PeriodicGrid g = grid_of(c.cfg);
    const CanalDomain dom(g, basin);
    WaterWaveModel m(g, physics_of(c.cfg), dno_of(c.cfg));
    const SurfaceState s0 = initial_state(c.cfg, g);
    const CanalData data = canal_data_from_surface(m, dom, dom.restrict(s0.eta), dom.restrict(s0.psi), c.cfg.real("canal.s"));
    CanalOptions opt;
    opt.compat_tol = c.cfg.real("canal.compat_tol");
    opt.parity_tol = c.cfg.real("canal.parity_tol");
    opt.projection_every = c.cfg.integer("canal.projection_every");
    const CompatibilityReport rep = compatibility_check(dom, data, opt.compat_tol);
    {
        std::ofstream out(c.dir / "compatibility.txt");
        out << "pass = " << (rep.pass ? "true" : "false") << "\ntol = " << num(rep.tol) << "\n";
        for (const auto& [k, v] : rep.defects) out << k << " = " << num(v) << "\n";
    }
    if (!rep.pass) {
        c.log << "incompatible canal data: " << rep.summary() << "\n";
        return exit_incompatible;
    }
    DiagnosticsFile diag(c.dir / "diagnostics.ndjson");
    const CanalRun run = canal_simulate(m, dom, data, c.cfg.real("stepper.T"), stepper_of(c.cfg), opt, std::ref(diag));
    std::ofstream(c.dir / "canal_summary.txt") << "max_parity_defect = " << num(run.max_parity_defect)
                                               << "\nmax_wall_slope = " << num(run.max_wall_slope)
                                               << "\nmax_wall_normal_velocity = " << num(run.max_wall_normal_velocity) << "\n";
    for (std::size_t i = 0; i < run.canal.size(); i += std::max<std::size_t>(1, run.canal.size() - 1)) {
        fs::create_directories(c.dir / "snapshots");
        std::vector<int> pts{dom.points(0)};
        std::vector<double> len{dom.width(0)};
        if (g.dims() > 1) {
            pts.push_back(dom.points(1));
            len.push_back(basin ? dom.width(1) : g.length(1));
        }
        const std::string tag = i == 0 ? "initial" : "final";
        write_snapshot(c.dir / "snapshots" / ("canal_eta_" + tag), {"eta", pts, len, run.canal[i].t, run.canal[i].eta});
        write_snapshot(c.dir / "snapshots" / ("canal_psi_" + tag), {"psi", pts, len, run.canal[i].t, run.canal[i].psi});
        if (run.canal.size() == 1) break;
    }
    return finish_trajectory(c, g, run.torus, diag);
}

int run_dno_test(const Context& c)
{
    const PeriodicGrid g = grid_of(c.cfg);
    const DnoParams p = dno_of(c.cfg);
    DnoSolver dno(g, p);
    std::ofstream out(c.dir / "dno_test.ndjson");
    out << "{\"format\":\"ulwaves-dno-test\",\"version\":" << format_version << "}\n";
    dno.set_surface(RealField::Zero(g.size()));
    const RealField x = g.coordinate(0);
    double worst = 0.0;
    for (int m = 1; m <= c.cfg.integer("dno_test.k_max") && m < g.points(0) / 2; ++m) {
        const double k = 2 * std::numbers::pi * m / g.length(0);
        const RealField u = (k * x).cos();
        const double sym = k * std::tanh(k * p.h);
        const double err = (dno.apply(u) - sym * u).abs().maxCoeff() / sym;
        worst = std::max(worst, err);
        out << "{\"test\":\"flat\",\"k\":" << num(k) << ",\"relative_error\":" << num(err) << "}\n";
    }
    std::mt19937 rng(static_cast<unsigned>(c.cfg.integer("seed")));
    double sa = 0.0, pos = std::numeric_limits<double>::infinity(), cst = 0.0;
    for (int i = 0; i < c.cfg.integer("dno_test.samples"); ++i) {
        const RealField eta = random_band_limited(g, 6, c.cfg.real("dno_test.amplitude"), rng);
        const RealField p1 = random_band_limited(g, 10, 1.0, rng), p2 = random_band_limited(g, 10, 1.0, rng);
        dno.set_surface(eta);
        const RealField g1 = dno.apply(p1), g2 = dno.apply(p2);
        const double defect = std::abs(inner_product(g, g1, p2) - inner_product(g, p1, g2)) / (l2_norm(g, p1) * l2_norm(g, p2));
        const double q = inner_product(g, p1, g1);
        const double c0 = dno.apply(RealField::Constant(g.size(), 1.0)).abs().maxCoeff();
        sa = std::max(sa, defect);
        pos = std::min(pos, q);
        cst = std::max(cst, c0);
        out << "{\"test\":\"random\",\"sample\":" << i << ",\"self_adjointness\":" << num(defect) << ",\"quadratic_form\":"
            << num(q) << ",\"constant\":" << num(c0) << "}\n";
    }
    std::ofstream(c.dir / "dno_summary.txt") << "flat_max_relative_error = " << num(worst) << "\nmax_self_adjointness_defect = "
                                             << num(sa) << "\nmin_quadratic_form = " << num(pos)
                                             << "\nmax_constant_image = " << num(cst) << "\n";
    c.log << "flat oracle max relative error " << worst << "\n";
    return exit_ok;
}

int run_paradiff_test(const Context& c)
{
    const PeriodicGrid g = grid_of(c.cfg);
    DnoSolver dno(g, dno_of(c.cfg));
    const RealField x = g.coordinate(0);
    const RealField eta = c.cfg.real("paradiff_test.amplitude") * x.cos();
    dno.set_surface(eta);
    std::ofstream out(c.dir / "paradiff_ladder.ndjson");
    out << "{\"format\":\"ulwaves-paradiff-ladder\",\"version\":" << format_version << "}\n";
    std::vector<double> lk, lr;
    for (int m : c.cfg.integers("paradiff_test.k")) {
        const double k = 2 * std::numbers::pi * m / g.length(0);
        const RealField psi = (k * x).cos();
        const RealField G = dno.apply(psi);
        const double ratio = l2_norm(g, dno_remainder(dno, eta, psi)) / l2_norm(g, G);
        out << "{\"k\":" << num(k) << ",\"ratio\":" << num(ratio) << "}\n";
        lk.push_back(std::log(k));
        lr.push_back(std::log(ratio));
    }
    if (lk.size() >= 2) {
        const LineFit f = line_fit(lk, lr);
        std::ofstream(c.dir / "paradiff_slope.txt") << "slope = " << num(f.slope) << "\nresidual = " << num(f.residual) << "\n";
        c.log << "remainder ratio slope " << f.slope << "\n";
    }
    return exit_ok;
}

int run_dispersive(const Context& c)
{
    ProbeConfig p;
    p.alpha = c.cfg.real("dispersive.alpha");
    p.d = c.cfg.integer("dispersive.d");
    p.j_range = c.cfg.integers("dispersive.j_range");
    p.quadrature = c.cfg.real("dispersive.quadrature");
    p.s_points = c.cfg.integer("dispersive.s_points");
    p.s_max_factor = c.cfg.real("dispersive.s_max_factor");
    const LossFit f = loss_exponent_fit(p);
    std::ofstream out(c.dir / "dispersive_ladder.ndjson");
    out << "{\"format\":\"ulwaves-dispersive-ladder\",\"version\":" << format_version << "}\n";
    for (const auto& r : f.ladder)
        out << "{\"j\":" << r.j << ",\"h\":" << num(r.h) << ",\"operator_norm\":" << num(r.norm) << ",\"mass_case1\":"
            << num(r.mass_case1) << ",\"mass_case2\":" << num(r.mass_case2) << ",\"mass_case3\":" << num(r.mass_case3) << "}\n";
    std::ofstream(c.dir / "dispersive_slope.txt") << "slope = " << num(f.fit.slope) << "\nresidual = " << num(f.fit.residual)
                                                  << "\nexpected = " << num(p.d * p.alpha / 2) << "\n";
    c.log << "loss exponent slope " << f.fit.slope << " (d alpha / 2 = " << p.d * p.alpha / 2 << ")\n";
    return exit_ok;
}

int run_norms(const Context& c)
{
    const PeriodicGrid g = grid_of(c.cfg);
    const SurfaceState s = initial_state(c.cfg, g);
    const PartitionOfUnity pou(g);
    std::ofstream out(c.dir / "norms.ndjson");
    out << "{\"format\":\"ulwaves-norms\",\"version\":" << format_version << "}\n";
    for (double sv : c.cfg.reals("norms.s"))
        out << "{\"s\":" << num(sv) << ",\"ul_eta\":" << num(ul_sobolev_norm(s.eta, sv, pou)) << ",\"ul_psi\":"
            << num(ul_sobolev_norm(s.psi, sv, pou)) << ",\"sobolev_eta\":" << num(sobolev_norm(g, s.eta, sv)) << "}\n";
    return exit_ok;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log)
{
    cfg.validate();
    const Context c{cfg, log, fs::path(cfg.text("output.dir"))};
    fs::create_directories(c.dir);
    std::ofstream(c.dir / "config.effective") << cfg.echo();
    const std::string& sc = cfg.text("scenario");
    log << "scenario " << sc << " -> " << c.dir.string() << "\n";
    if (sc == "simulate") return run_simulate(c);
    if (sc == "canal") return run_canal(c, false);
    if (sc == "basin") return run_canal(c, true);
    if (sc == "dno-test") return run_dno_test(c);
    if (sc == "paradiff-test") return run_paradiff_test(c);
    if (sc == "dispersive") return run_dispersive(c);
    return run_norms(c);
}

}  // namespace ulwaves
