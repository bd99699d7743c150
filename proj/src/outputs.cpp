#include "mudflow/outputs.hpp"

#include "mudflow/dft.hpp"
#include "mudflow/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace mudflow {

using nlohmann::json;

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

// nodal values of an interface sample (modes k = 0..n/2 -> full spectrum)
std::vector<double> sample_nodal(const TrajectorySample& s) {
    const int half = static_cast<int>(s.modes.size()) - 1;
    const int n = 2 * half;
    std::vector<std::complex<double>> c(static_cast<size_t>(n), {0.0, 0.0});
    for (int k = 0; k <= half; ++k) {
        c[static_cast<size_t>(k)] = s.modes[static_cast<size_t>(k)];
        if (k > 0 && k < half) c[static_cast<size_t>(n - k)] = std::conj(s.modes[static_cast<size_t>(k)]);
    }
    return dft::synthesize(c);
}

} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,k,re,im\n";
    for (const TrajectorySample& s : traj.samples)
        for (size_t k = 0; k < s.modes.size(); ++k)
            out << format_full(s.t) << ',' << k << ',' << format_full(s.modes[k].real()) << ','
                << format_full(s.modes[k].imag()) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,dt,newton_iterations,velocity_residual,mean_f,mean_flux,sup_f,sup_F,"
           "mud_iterations,water_residual,mud_residual,max_principle_violation,uniqueness_gap\n";
    for (const StepDiagnostics& d : traj.diagnostics)
        out << format_full(d.t) << ',' << format_full(d.dt) << ',' << d.newton_iterations << ','
            << format_full(d.velocity_residual) << ',' << format_full(d.mean_f) << ','
            << format_full(d.mean_flux) << ',' << format_full(d.sup_f) << ','
            << format_full(d.sup_F) << ',' << d.mud_iterations << ','
            << format_full(d.water_residual) << ',' << format_full(d.mud_residual) << ','
            << format_full(d.max_principle_violation) << ',' << format_full(d.uniqueness_gap)
            << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_snapshot_json(const std::string& path, const Snapshot& snap) {
    json doc;
    doc["t"] = snap.t;
    doc["step_index"] = snap.step_index;
    doc["dt_next"] = snap.dt_next;
    doc["easy_steps"] = snap.easy_steps;
    doc["f"] = json::array();
    for (int j = 0; j < snap.f.size(); ++j) doc["f"].push_back(snap.f.value(j));
    doc["F"] = json::array();
    for (int j = 0; j < snap.F.size(); ++j) doc["F"].push_back(snap.F.value(j));
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

Snapshot read_snapshot_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open snapshot: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("snapshot parse error: ") + e.what());
    }
    Snapshot snap;
    try {
        snap.t = doc.at("t").get<double>();
        snap.step_index = doc.at("step_index").get<int>();
        snap.dt_next = doc.at("dt_next").get<double>();
        snap.easy_steps = doc.at("easy_steps").get<int>();
        snap.f = PeriodicProfile(doc.at("f").get<std::vector<double>>());
        snap.F = PeriodicProfile(doc.at("F").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("snapshot schema error: ") + e.what());
    }
    return snap;
}

namespace {

struct SvgCanvas {
    double width = 720, height = 420, margin = 45;
    std::ostringstream body;

    double sx(double u) const { return margin + u * (width - 2 * margin); }
    double sy(double u) const { return height - margin - u * (height - 2 * margin); }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& [u, v] : pts) body << sx(u) << ',' << sy(v) << ' ';
        body << "\"/>\n";
    }
    void text(double u, double v, const std::string& s) {
        body << "<text x=\"" << sx(u) << "\" y=\"" << sy(v) << "\" font-size=\"11\">" << s
             << "</text>\n";
    }
    void frame() {
        body << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
             << "\" height=\"" << height - 2 * margin
             << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    }
    void save(const std::string& path) const {
        std::ofstream out = open_out(path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
            << height << "\">\n"
            << body.str() << "</svg>\n";
        if (!out) throw IoError("write failed: " + path);
    }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

} // namespace

void write_interface_svg(const std::string& path, const Trajectory& traj, int curves) {
    if (traj.samples.empty()) throw DomainError("write_interface_svg: empty trajectory");
    SvgCanvas svg;
    svg.frame();
    double amp = 1e-30;
    std::vector<size_t> picks;
    const size_t m = traj.samples.size();
    const int c = std::max(1, std::min<int>(curves, static_cast<int>(m)));
    for (int i = 0; i < c; ++i)
        picks.push_back((m - 1) * static_cast<size_t>(i) / static_cast<size_t>(std::max(1, c - 1)));
    std::vector<std::vector<double>> nodal;
    for (size_t p : picks) {
        nodal.push_back(sample_nodal(traj.samples[p]));
        for (double v : nodal.back()) amp = std::max(amp, std::abs(v));
    }
    for (size_t i = 0; i < picks.size(); ++i) {
        const std::vector<double>& vals = nodal[i];
        std::vector<std::pair<double, double>> pts;
        for (size_t j = 0; j < vals.size(); ++j)
            pts.push_back({static_cast<double>(j) / (vals.size() - 1), 0.5 + 0.5 * vals[j] / amp});
        pts.push_back({1.0, 0.5 + 0.5 * vals[0] / amp});
        svg.polyline(pts, kPalette[i % 10]);
    }
    svg.text(0.02, 1.02, "interface y = f(x), scaled by " + format_full(amp));
    svg.save(path);
}

void write_modes_svg(const std::string& path, const Trajectory& traj, const std::vector<int>& ks) {
    if (traj.samples.size() < 2) throw DomainError("write_modes_svg: need at least two samples");
    SvgCanvas svg;
    svg.frame();
    const double t0 = traj.samples.front().t, t1 = traj.samples.back().t;
    double lo = 0.0, hi = -300.0;
    std::vector<std::vector<std::pair<double, double>>> curves;
    for (int k : ks) {
        std::vector<std::pair<double, double>> pts;
        for (const TrajectorySample& s : traj.samples) {
            if (k < 0 || k >= static_cast<int>(s.modes.size())) continue;
            const double a = std::abs(s.modes[static_cast<size_t>(k)]);
            if (a <= 0.0) continue;
            const double y = std::log10(a);
            pts.push_back({(s.t - t0) / std::max(1e-300, t1 - t0), y});
            hi = std::max(hi, y);
            lo = std::min(lo, y);
        }
        curves.push_back(std::move(pts));
    }
    if (hi <= lo) hi = lo + 1.0;
    for (size_t i = 0; i < curves.size(); ++i) {
        for (auto& [u, v] : curves[i]) v = (v - lo) / (hi - lo);
        if (curves[i].size() >= 2) svg.polyline(curves[i], kPalette[i % 10]);
        svg.text(0.02, 0.96 - 0.05 * static_cast<double>(i),
                 "k=" + std::to_string(ks[i]));
    }
    svg.text(0.35, 1.02, "log10 |a_k| vs t");
    svg.save(path);
}

void write_field_csv(const std::string& path, const Field2D& field) {
    std::ofstream out = open_out(path);
    out << "x,y,value\n";
    const Grid& g = field.grid();
    for (int ix = 0; ix < g.nx(); ++ix)
        for (int iy = 0; iy < g.ny(); ++iy)
            out << format_full(g.x(ix)) << ',' << format_full(g.y(iy)) << ','
                << format_full(field.at(ix, iy)) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> write_outputs(const Trajectory& traj, const RunConfig& config) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output.directory, ec);
    if (ec) throw IoError("cannot create output directory: " + config.output.directory);
    const std::string base = config.output.directory + "/" + config.output.prefix;

    std::vector<std::string> written;
    const std::string traj_path = base + "_trajectory.csv";
    write_trajectory_csv(traj_path, traj);
    written.push_back(traj_path);

    const std::string diag_path = base + "_diagnostics.csv";
    write_diagnostics_csv(diag_path, traj);
    written.push_back(diag_path);

    Snapshot snap{traj.final_state.t, traj.step_index, traj.final_dt, traj.easy_steps,
                  traj.final_state.f, traj.final_state.F};
    if (snap.F.empty()) snap.F = PeriodicProfile::zeros(snap.f.size());
    const std::string snap_path = base + "_snapshot.json";
    write_snapshot_json(snap_path, snap);
    written.push_back(snap_path);

    if (config.output.svg) {
        const std::string iface = base + "_interface.svg";
        write_interface_svg(iface, traj);
        written.push_back(iface);
        std::vector<int> ks;
        // track the modes present in the initial data, fall back to k=1..3
        for (int k = 1; k <= traj.nx / 2; ++k)
            if (std::abs(traj.samples.front().modes[static_cast<size_t>(k)]) > 1e-14) ks.push_back(k);
        if (ks.empty()) ks = {1, 2, 3};
        if (ks.size() > 6) ks.resize(6);
        const std::string modes = base + "_modes.svg";
        write_modes_svg(modes, traj, ks);
        written.push_back(modes);
    }

    if (config.output.fields && traj.final_state.water_potential && traj.final_state.mud_potential) {
        const DarcyFields df = darcy_postprocess(traj.final_state, config.params, config.policy);
        const std::pair<std::string, const Field2D*> fields[] = {
            {"_water_potential.csv", &*traj.final_state.water_potential},
            {"_mud_potential.csv", &*traj.final_state.mud_potential},
            {"_water_vel_x.csv", &df.water_vel_x},   {"_water_vel_y.csv", &df.water_vel_y},
            {"_water_pressure.csv", &df.water_pressure}, {"_mud_vel_x.csv", &df.mud_vel_x},
            {"_mud_vel_y.csv", &df.mud_vel_y},       {"_mud_pressure.csv", &df.mud_pressure}};
        for (const auto& [suffix, field] : fields) {
            const std::string p = base + suffix;
            write_field_csv(p, *field);
            written.push_back(p);
        }
    }
    return written;
}

} // namespace mudflow
