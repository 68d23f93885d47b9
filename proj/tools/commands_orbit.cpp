#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "common.hpp"
#include "ogsnet/capacity.hpp"
#include "ogsnet/cmg_io.hpp"
#include "ogsnet/dgmodel.hpp"
#include "ogsnet/io_util.hpp"
#include "ogsnet/orbits.hpp"
#include "table.hpp"

namespace ogscli {

namespace {

using namespace ogsnet;

struct PassesOpts {
    std::string sites;
    double altitude = 530.0;
    std::string inc = "20:100:5";
    double days = 365.0;
    double min_elev = 30.0;
    double step = 10.0;
    int workers = 0;
    std::string out;
    std::string passes_out;
};

void run_passes(RunContext& ctx, const PassesOpts& o) {
    const auto sites = read_sites(ctx.require_input(o.sites));
    const std::vector<double> sweep = parse_sweep(o.inc);
    ctx.workers = o.workers;

    CsvWriter tau("site,inclination_deg,tau_s_per_day");
    CsvWriter detail("site,inclination_deg,start_s,end_s,duration_s,max_elevation_deg");
    for (const Site& site : sites) {
        const PassProfile profile = tau_profile(site, sweep, o.altitude, o.days,
                                                o.min_elev, o.step, o.workers);
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            tau.field(site.name).field(sweep[i]).field(profile.tau_s_per_day[i]);
            tau.endrow();
        }
        if (!o.passes_out.empty()) {
            for (double inc : sweep) {
                OrbitSpec orbit;
                orbit.altitude_km = o.altitude;
                orbit.inclination_deg = inc;
                for (const PassRecord& p : detect_passes(
                         orbit, site, 0.0, o.days * 86400.0, o.step, o.min_elev)) {
                    detail.field(site.name)
                        .field(inc)
                        .field(p.start_s)
                        .field(p.end_s)
                        .field(p.duration_s)
                        .field(p.max_elevation_deg);
                    detail.endrow();
                }
            }
        }
    }
    atomic_write_file(o.out, tau.str());
    ctx.note_output(o.out, "tau_profile");
    if (!o.passes_out.empty()) {
        atomic_write_file(o.passes_out, detail.str());
        ctx.note_output(o.passes_out, "pass_records");
    }
    ctx.metadata["altitude_km"] = o.altitude;
    ctx.metadata["days"] = o.days;
    ctx.metadata["min_elevation_deg"] = o.min_elev;
    ctx.metadata["orbit_raan_deg"] = 0.0;
    ctx.metadata["orbit_phase_deg"] = 0.0;
}

struct GeoOpts {
    std::string sites;
    std::string lon = "-180:180:1";
    double min_elev = 30.0;
    std::string avail_file;
    std::string corr_file;
    double samples = 1e7;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
};

void run_geo(RunContext& ctx, const GeoOpts& o) {
    const auto sites = read_sites(ctx.require_input(o.sites));
    const std::vector<double> sweep = parse_sweep(o.lon);
    ctx.seed = o.seed;
    ctx.seed_used = true;
    ctx.workers = o.workers;

    // Per-site omega by name, then the correlation matrix in sites order.
    const Table avail = read_csv(ctx.require_input(o.avail_file));
    const int name_col = avail.column({"name", "site"});
    const int omega_col = avail.column({"omega", "omega_binary"}, false);
    const int avail_col = avail.column({"availability", "availability_fraction"},
                                       omega_col < 0);
    std::map<std::string, double> omega_by_name;
    for (const auto& row : avail.rows)
        omega_by_name[row[std::size_t(name_col)]] =
            omega_col >= 0 ? to_double(row[std::size_t(omega_col)])
                           : 1.0 - to_double(row[std::size_t(avail_col)]);

    std::vector<std::string> names;
    std::vector<double> omega;
    for (const Site& s : sites) {
        const auto it = omega_by_name.find(s.name);
        if (it == omega_by_name.end())
            throw std::runtime_error("geo: no availability row for site " + s.name);
        names.push_back(s.name);
        omega.push_back(it->second);
    }

    const Table corr = read_csv(ctx.require_input(o.corr_file));
    const std::size_t n = names.size();
    if (corr.header.size() != n + 1 || corr.rows.size() != n)
        throw std::runtime_error("geo: correlation matrix does not match sites");
    std::vector<double> r(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t row = n;
        for (std::size_t q = 0; q < n; ++q)
            if (corr.rows[q][0] == names[k]) row = q;
        if (row == n)
            throw std::runtime_error("geo: matrix missing row for " + names[k]);
        for (std::size_t l = 0; l < n; ++l) {
            std::size_t col = 0;
            for (std::size_t q = 1; q < corr.header.size(); ++q)
                if (corr.header[q] == names[l]) col = q;
            if (col == 0)
                throw std::runtime_error("geo: matrix missing column for " + names[l]);
            r[k * n + l] = to_double(corr.rows[row][col]);
        }
    }
    const std::vector<double> gamma = gamma_from_r(r, omega);

    const std::int64_t draws = parse_count(o.samples, "--samples");
    bool any_repaired = false;
    OutageSampler sampler = [&](const std::vector<int>& subset) {
        std::vector<double> sub_omega;
        std::vector<double> sub_gamma;
        for (int a : subset) {
            sub_omega.push_back(omega[std::size_t(a)]);
            for (int b : subset)
                sub_gamma.push_back(gamma[std::size_t(a) * n + std::size_t(b)]);
        }
        const JointAvailabilityModel model = fit_model(sub_omega, sub_gamma);
        any_repaired = any_repaired || model.psd_repaired;
        const OutageDistribution dist = sample(model, draws, o.seed, o.workers);
        return std::make_pair(dist.cdf[0], dist.ci95[0]);
    };

    const GeoVisibilityProfile profile =
        geo_profile(sites, sweep, o.min_elev, sampler);

    CsvWriter w("lon_deg,visible_count,visible_sites,outage,ci95");
    for (std::size_t q = 0; q < sweep.size(); ++q) {
        std::string joined;
        for (int k : profile.visible_sites[q]) {
            if (!joined.empty()) joined += ';';
            joined += names[std::size_t(k)];
        }
        w.field(sweep[q])
            .field(profile.visible_count[q])
            .field(joined)
            .field(profile.outage[q])
            .field(profile.outage_ci95[q]);
        w.endrow();
    }
    atomic_write_file(o.out, w.str());
    ctx.note_output(o.out, "geo_visibility");
    ctx.metadata["psd_repaired_any_segment"] = any_repaired;
    ctx.metadata["min_elevation_deg"] = o.min_elev;
}

struct CapacityOpts {
    std::vector<std::string> tau_files;
    std::vector<std::string> avail_files;
    double bitrate = 5e9;
    std::string baseline;
    std::string out;
    std::string summary_out;
};

std::pair<std::string, std::string> split_label(const std::string& spec, int k) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) return {"net" + std::to_string(k + 1), spec};
    return {spec.substr(0, eq), spec.substr(eq + 1)};
}

void run_capacity(RunContext& ctx, const CapacityOpts& o) {
    if (o.tau_files.empty() || o.tau_files.size() != o.avail_files.size())
        throw std::invalid_argument(
            "capacity: need matching --tau and --avail entries");

    std::vector<CapacityProfile> profiles;
    for (std::size_t k = 0; k < o.tau_files.size(); ++k) {
        const auto [tau_label, tau_path] = split_label(o.tau_files[k], int(k));
        const auto [avail_label, avail_path] = split_label(o.avail_files[k], int(k));
        if (tau_label != avail_label)
            throw std::invalid_argument("capacity: label mismatch '" + tau_label +
                                        "' vs '" + avail_label + "'");

        // tau.csv rows grouped by site.
        const Table tau = read_csv(ctx.require_input(tau_path));
        const int site_col = tau.column({"site", "name"});
        const int inc_col = tau.column({"inclination_deg", "inclination"});
        const int tau_col = tau.column({"tau_s_per_day", "tau"});
        std::map<std::string, PassProfile> by_site;
        for (const auto& row : tau.rows) {
            PassProfile& p = by_site[row[std::size_t(site_col)]];
            p.site.name = row[std::size_t(site_col)];
            p.inclinations_deg.push_back(to_double(row[std::size_t(inc_col)]));
            p.tau_s_per_day.push_back(to_double(row[std::size_t(tau_col)]));
        }
        if (by_site.empty()) throw std::runtime_error(tau_path + ": no rows");

        const Table avail = read_csv(ctx.require_input(avail_path));
        const int name_col = avail.column({"name", "site"});
        const int a_col = avail.column({"availability", "availability_fraction",
                                        "availability_binary"},
                                       false);
        const int om_col = avail.column({"omega", "omega_binary"}, a_col < 0);
        std::map<std::string, double> a_by_name;
        for (const auto& row : avail.rows)
            a_by_name[row[std::size_t(name_col)]] =
                a_col >= 0 ? to_double(row[std::size_t(a_col)])
                           : 1.0 - to_double(row[std::size_t(om_col)]);

        std::vector<double> availabilities;
        std::vector<PassProfile> site_profiles;
        for (auto& [name, profile] : by_site) {
            const auto it = a_by_name.find(name);
            if (it == a_by_name.end())
                throw std::runtime_error("capacity: no availability for site " + name);
            availabilities.push_back(it->second);
            site_profiles.push_back(profile);
        }
        profiles.push_back(
            network_capacity(availabilities, site_profiles, o.bitrate, tau_label));
    }

    const std::string baseline =
        o.baseline.empty() ? profiles[0].label : o.baseline;
    const NetworkComparison cmp = compare_networks(profiles, baseline);

    CsvWriter w("network,inclination_deg,t_s_per_day,data_bits_per_day,ratio_vs_" +
                baseline);
    for (std::size_t k = 0; k < profiles.size(); ++k)
        for (std::size_t i = 0; i < profiles[k].inclinations_deg.size(); ++i) {
            w.field(profiles[k].label)
                .field(profiles[k].inclinations_deg[i])
                .field(profiles[k].t_s_per_day[i])
                .field(profiles[k].data_bits_per_day[i])
                .field(cmp.per_i_ratio[k][i]);
            w.endrow();
        }
    atomic_write_file(o.out, w.str());
    ctx.note_output(o.out, "capacity_profile");

    if (!o.summary_out.empty()) {
        CsvWriter s("network,integral_t_s_deg,ratio_vs_" + baseline);
        for (std::size_t k = 0; k < profiles.size(); ++k) {
            s.field(profiles[k].label)
                .field(capacity_integral(profiles[k]))
                .field(cmp.integral_ratio[k]);
            s.endrow();
        }
        atomic_write_file(o.summary_out, s.str());
        ctx.note_output(o.summary_out, "capacity_summary");
    }
    for (std::size_t k = 0; k < profiles.size(); ++k)
        std::cout << profiles[k].label << " integral "
                  << fmt_double(capacity_integral(profiles[k])) << " ratio "
                  << fmt_double(cmp.integral_ratio[k]) << "\n";
}

}  // namespace

void register_orbit_commands(CLI::App& app, RunContext& ctx) {
    {
        auto o = std::make_shared<PassesOpts>();
        CLI::App* c = app.add_subcommand(
            "passes", "LEO pass simulation and tau(i) sweep");
        c->add_option("--sites", o->sites)->required();
        c->add_option("--alt", o->altitude, "Orbit altitude, km");
        c->add_option("--inc", o->inc, "Inclination sweep start:stop:step");
        c->add_option("--days", o->days);
        c->add_option("--min-elev", o->min_elev);
        c->add_option("--step", o->step, "Sampling step, s (<= 10)");
        c->add_option("--workers", o->workers);
        c->add_option("--out", o->out)->required();
        c->add_option("--passes-out", o->passes_out);
        c->callback([&ctx, o]() { run_passes(ctx, *o); });
    }
    {
        auto o = std::make_shared<GeoOpts>();
        CLI::App* c = app.add_subcommand(
            "geo", "GEO visibility and outage versus longitude");
        c->add_option("--sites", o->sites)->required();
        c->add_option("--lon", o->lon, "Longitude sweep start:stop:step");
        c->add_option("--min-elev", o->min_elev);
        c->add_option("--avail", o->avail_file)->required();
        c->add_option("--corr", o->corr_file)->required();
        c->add_option("--samples", o->samples);
        c->add_option("--seed", o->seed);
        c->add_option("--workers", o->workers);
        c->add_option("--out", o->out)->required();
        c->callback([&ctx, o]() { run_geo(ctx, *o); });
    }
    {
        auto o = std::make_shared<CapacityOpts>();
        CLI::App* c = app.add_subcommand(
            "capacity", "Availability-weighted network link capacity");
        c->add_option("--tau", o->tau_files, "[label=]tau.csv (repeatable)")
            ->required();
        c->add_option("--avail", o->avail_files, "[label=]avail.csv (repeatable)")
            ->required();
        c->add_option("--bitrate", o->bitrate);
        c->add_option("--baseline", o->baseline);
        c->add_option("--out", o->out)->required();
        c->add_option("--summary-out", o->summary_out);
        c->callback([&ctx, o]() { run_capacity(ctx, *o); });
    }
}

}  // namespace ogscli
