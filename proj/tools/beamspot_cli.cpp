// SPDX-License-Identifier: Apache-2.0
//
// beamspot   Distributed massive MIMO beamforming and PA distortion analysis
// Copyright (C) 2026 beamspot contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end. Every subcommand loads one scenario file, runs
// one analysis, and writes plotter-agnostic CSV or binary outputs. Given
// the same scenario and seed, reruns are byte-identical; the only
// timestamp lives in the focusing sidecar and is informational.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <beamspot/io.hpp>
#include <beamspot/scenario_config.hpp>
#include <beamspot/threading.hpp>

namespace
{

constexpr const char *version_string = "beamspot 1.0.0";

std::vector<double> parse_number_list(const std::string &text, const char *what)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        try
        {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        }
        catch (const std::exception &)
        {
            throw beamspot::config_error(std::string(what) + ": \"" + item +
                                         "\" is not a number");
        }
        pos = comma + 1;
    }
    return out;
}

beamspot::Location parse_point(const std::string &text, const char *what)
{
    const std::vector<double> nums = parse_number_list(text, what);
    if (nums.size() != 2)
        throw beamspot::config_error(std::string(what) +
                                     ": expected \"x,y\" in meters");
    return beamspot::Location{{nums[0], nums[1]}};
}

std::string utc_now()
{
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string strip_suffix(const std::string &path, const std::string &suffix)
{
    if (path.size() > suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return path.substr(0, path.size() - suffix.size());
    return path;
}

std::string hash_hex(std::uint64_t h)
{
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Integrated power of a density grid, sum S(w) dw / (2 pi).
double grid_power(const beamspot::SpectrumGrid &grid)
{
    double acc = 0.0;
    for (const auto &v : grid.values)
        acc += v.real();
    return acc * grid.freq_step / (2.0 * M_PI);
}

void require_single_array(const beamspot::Scenario &scenario, const char *what)
{
    if (scenario.num_arrays() != 1)
        throw beamspot::config_error(
            std::string(what) + " is a per-array analysis; the scenario has " +
            std::to_string(scenario.num_arrays()) +
            " arrays (split the file or reduce it to one array)");
}

// Places one far-field user per requested pattern angle. Directivity
// depends only on the angle from the array axis, so the radius merely has
// to clear the reference distance.
void place_pattern_users(beamspot::Scenario &scenario, const std::vector<double> &users_deg)
{
    const beamspot::ArrayDescriptor &arr = scenario.arrays[0];
    const double lambda = beamspot::wavelength(scenario.carrier);
    const double radius = std::max(1000.0 * lambda, 10.0 * scenario.carrier.ref_distance);
    scenario.users.locations.clear();
    scenario.users.powers.clear();
    for (const double deg : users_deg)
    {
        const double theta = arr.axis_angle + deg * M_PI / 180.0;
        scenario.users.locations.push_back(
            {{arr.position.x + radius * std::cos(theta),
              arr.position.y + radius * std::sin(theta)}});
        scenario.users.powers.push_back(1.0);
    }
}

int run_directivity(const std::string &config_path, const std::string &users_csv,
                    long num_antennas, double step_deg, const std::string &out_path)
{
    beamspot::FullConfig cfg = beamspot::load_config(config_path);
    require_single_array(cfg.scenario, "directivity");
    if (num_antennas > 0)
        cfg.scenario.arrays[0].num_antennas = static_cast<int>(num_antennas);
    if (!users_csv.empty())
        place_pattern_users(cfg.scenario, parse_number_list(users_csv, "--users"));
    if (!(step_deg > 0.0) || step_deg > 180.0)
        throw beamspot::config_error("--step must be in (0, 180] degrees");

    std::vector<double> theta_deg;
    std::vector<double> theta_rad;
    for (double deg = 0.0; deg <= 180.0 + 1e-9; deg += step_deg)
    {
        theta_deg.push_back(deg);
        theta_rad.push_back(deg * M_PI / 180.0);
    }

    const std::vector<double> signal =
        beamspot::directivity_signal(cfg.scenario, theta_rad);
    const std::vector<double> distortion =
        beamspot::directivity_distortion3(cfg.scenario, theta_rad);
    beamspot::write_directivity_csv(out_path, theta_deg, signal, distortion);

    std::size_t sig_peak = 0, dis_peak = 0;
    for (std::size_t i = 1; i < theta_deg.size(); ++i)
    {
        if (signal[i] > signal[sig_peak])
            sig_peak = i;
        if (distortion[i] > distortion[dis_peak])
            dis_peak = i;
    }
    std::printf("antennas: %d  users: %zu  angles: %zu\n",
                cfg.scenario.arrays[0].num_antennas, cfg.scenario.users.count(),
                theta_deg.size());
    std::printf("signal peak: %.1f deg  distortion peak: %.1f deg\n",
                theta_deg[sig_peak], theta_deg[dis_peak]);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

int run_focusing(const std::string &config_path, const std::string &out_path, long threads)
{
    const beamspot::FullConfig cfg = beamspot::load_config(config_path);
    const std::size_t workers = beamspot::resolve_threads(threads);
    const beamspot::FocusingMap map = beamspot::sweep(cfg.scenario, cfg.cell, workers);

    const double sig_u = beamspot::uniformity_metric(map, beamspot::MapLayer::signal);
    const double dis_u = beamspot::uniformity_metric(map, beamspot::MapLayer::distortion);

    const std::string stem = strip_suffix(out_path, ".bspt");
    beamspot::write_map_bspt(stem + ".bspt", map);
    beamspot::write_map_csv(stem + ".csv", map);

    // Speckled layers can hold thousands of local maxima; the sidecar keeps
    // the strongest few and the full count.
    constexpr std::size_t max_listed_peaks = 16;
    nlohmann::json peaks = nlohmann::json::array();
    nlohmann::json peak_counts;
    for (const beamspot::MapLayer layer :
         {beamspot::MapLayer::signal, beamspot::MapLayer::distortion})
    {
        const char *name = layer == beamspot::MapLayer::signal ? "signal" : "distortion";
        const std::vector<beamspot::Peak> found =
            beamspot::peak_report(map, layer, cfg.scenario.users);
        peak_counts[name] = found.size();
        for (std::size_t i = 0; i < std::min(found.size(), max_listed_peaks); ++i)
            peaks.push_back({{"layer", name},
                             {"x_m", found[i].x},
                             {"y_m", found[i].y},
                             {"value", found[i].value},
                             {"nearest_user_m", found[i].nearest_user_distance}});
    }
    nlohmann::json sidecar = {
        {"config_hash", hash_hex(cfg.config_hash)},
        {"grid",
         {{"nx", map.nx},
          {"ny", map.ny},
          {"origin_x_m", map.origin_x},
          {"origin_y_m", map.origin_y},
          {"step_m", map.step},
          {"mask_radius_m", map.mask_radius},
          {"eval_freq_offset_hz", map.eval_freq_offset_hz},
          {"band_average", map.band_average}}},
        {"uniformity_db_std", {{"signal", sig_u}, {"distortion", dis_u}}},
        {"peak_counts", peak_counts},
        {"peaks", peaks},
        {"generated_utc", utc_now()},
    };
    beamspot::write_text_file(stem + ".json", sidecar.dump(2) + "\n");

    std::printf("grid: %zu x %zu cells, step %.6g m\n", map.nx, map.ny, map.step);
    std::printf("signal uniformity (dB std): %.6g\n", sig_u);
    std::printf("distortion uniformity (dB std): %.6g\n", dis_u);
    std::printf("wrote %s.bspt, %s.csv, %s.json\n", stem.c_str(), stem.c_str(),
                stem.c_str());
    return 0;
}

int run_psd(const std::string &config_path, const std::string &observer_text,
            const std::string &out_path, bool full)
{
    const beamspot::FullConfig cfg = beamspot::load_config(config_path);
    const beamspot::Location observer = parse_point(observer_text, "--observer");
    const beamspot::SpectrumGrid base = beamspot::make_base_spectrum(cfg);
    const std::vector<beamspot::LinkParams> obs =
        beamspot::observer_links(cfg.scenario, observer);

    const beamspot::SpectrumGrid signal =
        beamspot::signal_psd_multi(cfg.scenario, obs, base);
    const beamspot::SpectrumGrid distortion =
        beamspot::distortion3_psd_multi(cfg.scenario, obs, base);

    std::vector<std::string> names = {"signal", "distortion3"};
    std::vector<const beamspot::SpectrumGrid *> columns = {&signal, &distortion};
    beamspot::SpectrumGrid total;
    if (full)
    {
        total = beamspot::received_psd_general(cfg.scenario, obs, base);
        names.push_back("total");
        columns.push_back(&total);
    }
    beamspot::write_spectrum_csv(out_path, names, columns);

    const double ps = grid_power(signal);
    const double pd = grid_power(distortion);
    std::printf("signal power: %.9g\n", ps);
    std::printf("distortion power: %.9g\n", pd);
    if (pd > 0.0)
        std::printf("signal/distortion: %.4f dB\n", 10.0 * std::log10(ps / pd));
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

int run_validate(const std::string &config_path, long samples, long seed_arg,
                 const std::string &observer_text, const std::string &out_path,
                 double inband_tol, double shoulder_tol)
{
    const beamspot::FullConfig cfg = beamspot::load_config(config_path);
    if (!(inband_tol > 0.0) || !(shoulder_tol > 0.0))
        throw beamspot::config_error("tolerances must be positive");

    std::size_t num_blocks = cfg.mc.num_blocks;
    if (samples > 0)
    {
        const std::size_t len = cfg.mc.block_length;
        num_blocks = (static_cast<std::size_t>(samples) + len - 1) / len;
        num_blocks = std::max<std::size_t>(num_blocks, 2);
    }
    const std::uint64_t seed = seed_arg >= 0 ? static_cast<std::uint64_t>(seed_arg)
                                             : cfg.mc.seed;
    const beamspot::Location observer =
        observer_text.empty() ? cfg.scenario.users.locations[0]
                              : parse_point(observer_text, "--observer");

    const beamspot::SpectrumGrid base = beamspot::make_simulation_spectrum(cfg);
    const beamspot::ValidationReport report = beamspot::validate_scenario_psd(
        cfg.scenario, observer, base, num_blocks, cfg.mc.welch, seed, inband_tol,
        shoulder_tol);

    nlohmann::json bins = nlohmann::json::array();
    for (const beamspot::BinComparison &bin : report.bins)
        bins.push_back({{"freq_offset_hz", bin.freq_offset_hz},
                        {"expected", bin.expected},
                        {"empirical", bin.empirical},
                        {"std_error", bin.std_error},
                        {"in_band", bin.in_band},
                        {"shoulder", bin.shoulder},
                        {"rel_error", bin.rel_error}});
    const nlohmann::json doc = {
        {"config_hash", hash_hex(cfg.config_hash)},
        {"observer_m", {observer.position.x, observer.position.y}},
        {"seed", seed},
        {"num_blocks", report.num_blocks},
        {"total_samples", report.total_samples},
        {"inband_tol", inband_tol},
        {"shoulder_tol", shoulder_tol},
        {"worst_inband_rel", report.worst_inband_rel},
        {"worst_shoulder_rel", report.worst_shoulder_rel},
        {"pass", report.pass},
        {"bins", bins},
    };
    const std::string text = doc.dump(2) + "\n";
    if (!out_path.empty())
        beamspot::write_text_file(out_path, text);
    else
        std::fputs(text.c_str(), stdout);

    std::fprintf(stderr, "validation %s: worst in-band %.4g (tol %.4g), worst shoulder %.4g (tol %.4g)\n",
                 report.pass ? "PASS" : "FAIL", report.worst_inband_rel, inband_tol,
                 report.worst_shoulder_rel, shoulder_tol);
    return report.pass ? 0 : 1;
}

int run_im_directions(const std::string &config_path)
{
    const beamspot::FullConfig cfg = beamspot::load_config(config_path);
    require_single_array(cfg.scenario, "the intermodulation table");
    const beamspot::ArrayDescriptor &arr = cfg.scenario.arrays[0];
    const double lambda = beamspot::wavelength(cfg.scenario.carrier);
    const beamspot::LinkTable links = beamspot::user_links(cfg.scenario);

    const std::size_t K = cfg.scenario.users.count();
    std::vector<double> phis(K);
    for (std::size_t k = 0; k < K; ++k)
        phis[k] = links.at(0, k).phi;
    const std::vector<beamspot::ImDirection> dirs = beamspot::enumerate_im_directions(
        phis, cfg.scenario.users.powers, arr.spacing, lambda);

    std::printf("%-14s %-12s %-10s triples (k,k',k'')\n", "phi_rad", "theta_deg",
                "weight");
    for (const beamspot::ImDirection &d : dirs)
    {
        char theta[16];
        if (d.theta)
            std::snprintf(theta, sizeof(theta), "%.4f", *d.theta * 180.0 / M_PI);
        else
            std::snprintf(theta, sizeof(theta), "%s", "invisible");
        std::string triples;
        for (const auto &t : d.triples)
        {
            if (!triples.empty())
                triples += ' ';
            triples += '(' + std::to_string(t[0]) + ',' + std::to_string(t[1]) + ',' +
                       std::to_string(t[2]) + ')';
        }
        std::printf("%-14.9f %-12s %-10.6g %s\n", d.phi, theta, d.weight,
                    triples.c_str());
    }
    const std::size_t bound = (K * K * K - K * K) / 2 + K;
    std::printf("%zu directions for %zu users (generic-position count %zu)\n",
                dirs.size(), K, bound);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Distributed massive MIMO beamforming and PA distortion analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string);

    std::string config_path, users_csv, observer_text, out_path;
    long num_antennas = 0, threads = 0, samples = 0, seed_arg = -1;
    double step_deg = 0.1, inband_tol = 0.05, shoulder_tol = 0.15;
    bool full = false;
    int exit_code = 0;

    const auto add_config = [&](CLI::App *cmd) {
        cmd->add_option("config", config_path, "Scenario file (JSON)")->required();
    };

    CLI::App *directivity = app.add_subcommand(
        "directivity", "Angle sweep of the signal and third-order distortion "
                       "patterns of a single array");
    add_config(directivity);
    directivity->add_option("--users", users_csv,
                            "Override users with far-field directions, degrees "
                            "from the array axis (e.g. 135,60)");
    directivity->add_option("--n", num_antennas, "Override the antenna count");
    directivity->add_option("--step", step_deg, "Angle grid step in degrees")
        ->capture_default_str();
    directivity->add_option("--out", out_path, "Output CSV path")->required();
    directivity->callback([&] {
        exit_code = run_directivity(config_path, users_csv, num_antennas, step_deg,
                                    out_path);
    });

    CLI::App *focusing = app.add_subcommand(
        "focusing", "Cell-wide map of received signal and distortion power");
    add_config(focusing);
    focusing->add_option("--out", out_path,
                         "Output stem; writes <stem>.bspt, <stem>.csv, <stem>.json")
        ->required();
    focusing->add_option("--threads", threads,
                         "Worker threads (0 = BEAMSPOT_THREADS or hardware)");
    focusing->callback([&] { exit_code = run_focusing(config_path, out_path, threads); });

    CLI::App *psd = app.add_subcommand(
        "psd", "Received power spectral density at one observer");
    add_config(psd);
    psd->add_option("--observer", observer_text, "Observer position \"x,y\" in meters")
        ->required();
    psd->add_option("--out", out_path, "Output CSV path")->required();
    psd->add_flag("--full", full,
                  "Also evaluate the full second-order engine (total column)");
    psd->callback(
        [&] { exit_code = run_psd(config_path, observer_text, out_path, full); });

    CLI::App *validate = app.add_subcommand(
        "validate", "Compare a Monte Carlo PSD estimate against the analytic "
                    "engine and emit a JSON report");
    add_config(validate);
    validate->add_option("--samples", samples,
                         "Minimum total sample count (rounded up to whole blocks)");
    validate->add_option("--seed", seed_arg, "Simulation seed override");
    validate->add_option("--observer", observer_text,
                         "Observer position \"x,y\" (default: first user)");
    validate->add_option("--out", out_path, "Report path (default: stdout)");
    validate->add_option("--inband-tol", inband_tol, "Relative tolerance inside the band")
        ->capture_default_str();
    validate->add_option("--shoulder-tol", shoulder_tol,
                         "Relative tolerance on the regrowth shoulders")
        ->capture_default_str();
    validate->callback([&] {
        exit_code = run_validate(config_path, samples, seed_arg, observer_text,
                                 out_path, inband_tol, shoulder_tol);
    });

    CLI::App *im = app.add_subcommand(
        "im-directions", "Table of third-order intermodulation beam directions "
                         "of a single array");
    add_config(im);
    im->callback([&] { exit_code = run_im_directions(config_path); });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    catch (const beamspot::io_error &e)
    {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    }
    catch (const beamspot::error &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return exit_code;
}
