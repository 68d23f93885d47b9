#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <set>

#include "common.hpp"
#include "ogsnet/cmg_io.hpp"
#include "ogsnet/correlation.hpp"
#include "ogsnet/grid.hpp"
#include "ogsnet/io_util.hpp"
#include "ogsnet/synth.hpp"
#include "table.hpp"

namespace ogscli {

namespace {

using namespace ogsnet;

// Text matrix (north row first, whitespace separated), flipped into grid
// order.
std::vector<double> read_field_file(const std::string& path, const GridSpec& spec) {
    const std::string content = read_file(path);
    std::istringstream ss(content);
    std::vector<double> north_up;
    double v;
    while (ss >> v) north_up.push_back(v);
    if (north_up.size() != spec.n_pixels())
        throw std::runtime_error(path + ": expected " +
                                 std::to_string(spec.n_pixels()) + " values, got " +
                                 std::to_string(north_up.size()));
    std::vector<double> out(spec.n_pixels());
    for (int i = 0; i < spec.n_lat; ++i)
        for (int j = 0; j < spec.n_lon; ++j)
            out[spec.index(i, j)] =
                north_up[std::size_t(spec.n_lat - 1 - i) * spec.n_lon + j];
    return out;
}

void export_grid(RunContext& ctx, const GridSpec& spec,
                 const std::vector<double>& values, const std::string& txt,
                 const std::string& pgm, const std::string& role) {
    if (!txt.empty()) {
        write_text_matrix(txt, spec, values);
        ctx.note_output(txt, role + "_text");
    }
    if (!pgm.empty()) {
        double lo = 0.0, hi = 0.0;
        write_pgm(pgm, spec, values, lo, hi);
        ctx.note_output(pgm, role + "_raster");
        ctx.metadata["raster_scale"][pgm] = {{"min", lo}, {"max", hi}};
    }
}

struct SynthOpts {
    int nlat = 64, nlon = 64;
    double lat0 = -50.0, lat1 = -10.0, lon0 = 110.0, lon1 = 150.0;
    double frames = 1000;
    double corr_length = 5.0;
    double omega = 0.4;
    std::string omega_field;
    std::uint64_t seed = 0;
    std::int64_t t0 = 0;
    std::int64_t stride = 86400;
    std::string source = "synth";
    bool text_encoding = false;
    std::string out;
};

void run_synth(RunContext& ctx, const SynthOpts& o) {
    SynthSpec spec;
    spec.grid = {o.nlat, o.nlon, o.lat0, o.lat1, o.lon0, o.lon1};
    spec.grid.validate();
    spec.n_frames = parse_count(o.frames, "--frames");
    spec.corr_length_px = o.corr_length;
    spec.seed = o.seed;
    spec.t0 = o.t0;
    spec.stride_s = o.stride;
    spec.source_id = o.source;
    if (!o.omega_field.empty())
        spec.omega_field = read_field_file(ctx.require_input(o.omega_field), spec.grid);
    else
        spec.omega_field.assign(spec.grid.n_pixels(), o.omega);

    ctx.seed = o.seed;
    ctx.seed_used = true;
    const CloudMaskSeries series = synth_generate(spec);
    write_cmg(o.out, series, o.text_encoding);
    ctx.note_output(o.out, "cloud_mask_series");
}

struct AvailOpts {
    std::string masks;
    std::string sites;
    double threshold = 0.5;
    std::string out;        // per-site table
    std::string omega_out;  // name,omega (binary) table
    std::string omega_txt, omega_pgm, avail_txt, avail_pgm;
};

void run_availability(RunContext& ctx, const AvailOpts& o) {
    const CloudMaskSeries series = read_cmg(ctx.require_input(o.masks));
    const AvailabilityGrid grid = availability_grid(series);

    if (o.out.empty() && o.omega_out.empty() && o.omega_txt.empty() &&
        o.omega_pgm.empty() && o.avail_txt.empty() && o.avail_pgm.empty())
        throw std::invalid_argument("availability: no outputs requested");

    if (!o.out.empty() || !o.omega_out.empty()) {
        if (o.sites.empty())
            throw std::invalid_argument("availability: per-site tables need --sites");
        const auto sites = read_sites(ctx.require_input(o.sites));
        CsvWriter per_site(
            "name,lat_deg,lon_deg,roi_radius_px,n_frames,omega_fraction,"
            "availability_fraction,omega_binary,availability_binary");
        CsvWriter omega_table("name,omega");
        for (const Site& s : sites) {
            const SiteSeries ss = extract_site_series(series, s, o.threshold);
            const double of = ss.omega_fraction();
            const double ob = ss.omega_binary();
            per_site.field(s.name)
                .field(s.lat)
                .field(s.lon)
                .field(s.roi_radius_px)
                .field(std::int64_t(ss.size()))
                .field(of)
                .field(1.0 - of)
                .field(ob)
                .field(1.0 - ob);
            per_site.endrow();
            omega_table.field(s.name).field(ob);
            omega_table.endrow();
        }
        if (!o.out.empty()) {
            atomic_write_file(o.out, per_site.str());
            ctx.note_output(o.out, "site_availability");
        }
        if (!o.omega_out.empty()) {
            atomic_write_file(o.omega_out, omega_table.str());
            ctx.note_output(o.omega_out, "site_omega");
        }
    }

    export_grid(ctx, grid.spec, grid.omega, o.omega_txt, o.omega_pgm, "omega");
    std::vector<double> avail(grid.omega.size());
    for (std::size_t p = 0; p < avail.size(); ++p) avail[p] = grid.availability(p);
    export_grid(ctx, grid.spec, avail, o.avail_txt, o.avail_pgm, "availability");
    ctx.metadata["n_frames"] = series.n_frames();
    ctx.metadata["source"] = series.source_id;
}

struct SiteSeriesOpts {
    std::vector<std::string> masks;
    std::string sites;
    double threshold = 0.5;
    std::string out;
    std::string seasonal_out;
    double outlier_z = 3.0;
};

void run_site_series(RunContext& ctx, const SiteSeriesOpts& o) {
    if (o.masks.empty()) throw std::invalid_argument("site-series: need --masks");
    std::vector<CloudMaskSeries> sources;
    for (const std::string& m : o.masks)
        sources.push_back(read_cmg(ctx.require_input(m)));
    const auto sites = read_sites(ctx.require_input(o.sites));

    CsvWriter table("timestamp,site,source,cloud_fraction,binary");
    std::map<std::string, std::vector<SiteSeries>> per_site;
    for (const CloudMaskSeries& src : sources) {
        for (const Site& s : sites) {
            const SiteSeries ss = extract_site_series(src, s, o.threshold);
            for (std::size_t t = 0; t < ss.size(); ++t) {
                table.field(ss.timestamps[t])
                    .field(s.name)
                    .field(src.source_id)
                    .field(ss.cloud_fraction[t])
                    .field(int(ss.binary[t]));
                table.endrow();
            }
            per_site[s.name].push_back(ss);
        }
    }
    if (!o.out.empty()) {
        atomic_write_file(o.out, table.str());
        ctx.note_output(o.out, "site_series");
    }

    if (!o.seasonal_out.empty()) {
        CsvWriter seasonal("site,month,availability,stddev");
        auto flagged = nlohmann::json::object();
        for (const Site& s : sites) {
            const SeasonalProfile profile =
                seasonal_profile(per_site[s.name], o.outlier_z);
            for (int m = 0; m < 12; ++m) {
                if (!profile.present[m]) continue;
                seasonal.field(s.name)
                    .field(m + 1)
                    .field(profile.availability[m])
                    .field(profile.stddev[m]);
                seasonal.endrow();
            }
            if (!profile.flagged_sources.empty()) {
                flagged[s.name] = profile.flagged_sources;
                std::cerr << "warning: outlier source(s) at site " << s.name << ":";
                for (const auto& f : profile.flagged_sources) std::cerr << " " << f;
                std::cerr << " (flag-only, not excluded)\n";
            }
        }
        atomic_write_file(o.seasonal_out, seasonal.str());
        ctx.note_output(o.seasonal_out, "seasonal_profile");
        if (!flagged.empty()) ctx.metadata["outlier_flags"] = flagged;
    }
    if (o.out.empty() && o.seasonal_out.empty())
        throw std::invalid_argument("site-series: no outputs requested");
}

struct SurfaceOpts {
    std::string masks;
    std::string sites;
    std::string site_name;
    double threshold = 0.5;
    std::string out;
    std::string raster;
    std::string contours;
    std::vector<double> levels = {0.2, 0.4};
};

void run_corr_surface(RunContext& ctx, const SurfaceOpts& o) {
    const CloudMaskSeries series = read_cmg(ctx.require_input(o.masks));
    const auto sites = read_sites(ctx.require_input(o.sites));
    const Site* site = nullptr;
    for (const Site& s : sites)
        if (s.name == o.site_name) site = &s;
    if (!site)
        throw std::invalid_argument("corr-surface: site '" + o.site_name +
                                    "' not in sites file");

    const SiteSeries ss = extract_site_series(series, *site, o.threshold);
    const CorrelationSurface surf = correlation_surface(series, ss);

    write_text_matrix(o.out, surf.spec, surf.r);
    ctx.note_output(o.out, "correlation_surface");
    if (!o.raster.empty()) {
        double lo = 0.0, hi = 0.0;
        write_pgm(o.raster, surf.spec, surf.r, lo, hi);
        ctx.note_output(o.raster, "correlation_surface_raster");
        ctx.metadata["raster_scale"][o.raster] = {{"min", lo}, {"max", hi}};
    }

    if (!o.contours.empty()) {
        // A contour pixel sits at or above the level with a 4-neighbour below.
        std::string body = "# level ilat jlon lat_deg lon_deg r\n";
        const GridSpec& g = surf.spec;
        for (double level : o.levels) {
            for (int i = 0; i < g.n_lat; ++i)
                for (int j = 0; j < g.n_lon; ++j) {
                    if (surf.zero_variance[g.index(i, j)]) continue;
                    const double v = surf.r[g.index(i, j)];
                    if (v < level) continue;
                    bool boundary = false;
                    const int di[4] = {1, -1, 0, 0};
                    const int dj[4] = {0, 0, 1, -1};
                    for (int d = 0; d < 4; ++d) {
                        const int ni = i + di[d], nj = j + dj[d];
                        if (ni < 0 || ni >= g.n_lat || nj < 0 || nj >= g.n_lon)
                            continue;
                        if (surf.r[g.index(ni, nj)] < level) boundary = true;
                    }
                    if (!boundary) continue;
                    body += fmt_double(level);
                    body += " " + std::to_string(i) + " " + std::to_string(j);
                    body += " " + fmt_double(g.lat_center(i));
                    body += " " + fmt_double(g.lon_center(j));
                    body += " " + fmt_double(v) + "\n";
                }
        }
        atomic_write_file(o.contours, body);
        ctx.note_output(o.contours, "contour_sidecar");
    }
    ctx.metadata["zero_variance_pixels"] =
        std::count(surf.zero_variance.begin(), surf.zero_variance.end(), 1);
    ctx.metadata["frame_cadence_s"] =
        series.n_frames() > 1 ? series.timestamps[1] - series.timestamps[0] : 0;
}

struct MatrixOpts {
    std::string masks;
    std::string sites;
    double threshold = 0.5;
    std::string out;
    std::string gamma_out;
    std::string omega_out;
};

void run_corr_matrix(RunContext& ctx, const MatrixOpts& o) {
    const CloudMaskSeries series = read_cmg(ctx.require_input(o.masks));
    const auto sites = read_sites(ctx.require_input(o.sites));
    std::vector<SiteSeries> site_series;
    for (const Site& s : sites)
        site_series.push_back(extract_site_series(series, s, o.threshold));

    const CorrelationMatrix m = correlation_matrix(site_series);
    const int n = m.n();

    auto write_square = [&](const std::string& path, const std::vector<double>& vals,
                            const std::string& role) {
        std::string header = "name";
        for (const Site& s : sites) header += "," + s.name;
        CsvWriter w(std::move(header));
        for (int k = 0; k < n; ++k) {
            w.field(sites[std::size_t(k)].name);
            for (int l = 0; l < n; ++l) w.field(vals[std::size_t(k) * n + l]);
            w.endrow();
        }
        atomic_write_file(path, w.str());
        ctx.note_output(path, role);
    };

    write_square(o.out, m.r, "correlation_matrix");
    if (!o.gamma_out.empty())
        write_square(o.gamma_out, covariance_matrix(site_series), "covariance_matrix");
    if (!o.omega_out.empty()) {
        CsvWriter w("name,omega");
        for (const SiteSeries& ss : site_series) {
            w.field(ss.site.name).field(ss.omega_binary());
            w.endrow();
        }
        atomic_write_file(o.omega_out, w.str());
        ctx.note_output(o.omega_out, "site_omega");
    }

    const MeanAbsCorrelation mac = mean_abs_correlation(m);
    std::cout << "mean_abs_correlation " << fmt_double(mac.mean) << " +- "
              << fmt_double(mac.stddev) << "\n";
    ctx.metadata["mean_abs_correlation"] = mac.mean;
    ctx.metadata["mean_abs_correlation_std"] = mac.stddev;
    for (int k = 0; k < n; ++k)
        if (m.zero_variance[std::size_t(k)])
            ctx.metadata["zero_variance_sites"].push_back(sites[std::size_t(k)].name);
}

}  // namespace

void register_data_commands(CLI::App& app, RunContext& ctx) {
    {
        auto o = std::make_shared<SynthOpts>();
        CLI::App* c = app.add_subcommand(
            "synth", "Generate a synthetic binary cloud-mask series");
        c->add_option("--nlat", o->nlat)->check(CLI::PositiveNumber);
        c->add_option("--nlon", o->nlon)->check(CLI::PositiveNumber);
        c->add_option("--lat0", o->lat0);
        c->add_option("--lat1", o->lat1);
        c->add_option("--lon0", o->lon0);
        c->add_option("--lon1", o->lon1);
        c->add_option("--frames", o->frames);
        c->add_option("--corr-length", o->corr_length, "Field correlation length, px");
        c->add_option("--omega", o->omega, "Uniform cloud probability target");
        c->add_option("--omega-field", o->omega_field,
                      "Per-pixel omega text matrix (north row first)");
        c->add_option("--seed", o->seed);
        c->add_option("--t0", o->t0);
        c->add_option("--stride", o->stride);
        c->add_option("--source", o->source);
        c->add_flag("--text-encoding", o->text_encoding);
        c->add_option("--out", o->out)->required();
        c->callback([&ctx, o]() { run_synth(ctx, *o); });
    }
    {
        auto o = std::make_shared<AvailOpts>();
        CLI::App* c = app.add_subcommand(
            "availability", "Reduce a mask series to availability statistics");
        c->add_option("--masks", o->masks)->required();
        c->add_option("--sites", o->sites);
        c->add_option("--threshold", o->threshold);
        c->add_option("--out", o->out, "Per-site availability table");
        c->add_option("--omega-out", o->omega_out, "name,omega table (binary)");
        c->add_option("--omega-txt", o->omega_txt);
        c->add_option("--omega-pgm", o->omega_pgm);
        c->add_option("--avail-txt", o->avail_txt);
        c->add_option("--avail-pgm", o->avail_pgm);
        c->callback([&ctx, o]() { run_availability(ctx, *o); });
    }
    {
        auto o = std::make_shared<SiteSeriesOpts>();
        CLI::App* c = app.add_subcommand(
            "site-series", "Extract per-site ROI series, optionally seasonal");
        c->add_option("--masks", o->masks, "CMG input (repeatable per source)");
        c->add_option("--sites", o->sites)->required();
        c->add_option("--threshold", o->threshold);
        c->add_option("--out", o->out);
        c->add_option("--seasonal-out", o->seasonal_out);
        c->add_option("--outlier-z", o->outlier_z);
        c->callback([&ctx, o]() { run_site_series(ctx, *o); });
    }
    {
        auto o = std::make_shared<SurfaceOpts>();
        CLI::App* c = app.add_subcommand(
            "corr-surface", "Correlation surface of one site against the grid");
        c->add_option("--masks", o->masks)->required();
        c->add_option("--sites", o->sites)->required();
        c->add_option("--site", o->site_name)->required();
        c->add_option("--threshold", o->threshold);
        c->add_option("--out", o->out)->required();
        c->add_option("--raster", o->raster);
        c->add_option("--contours", o->contours);
        c->add_option("--levels", o->levels);
        c->callback([&ctx, o]() { run_corr_surface(ctx, *o); });
    }
    {
        auto o = std::make_shared<MatrixOpts>();
        CLI::App* c = app.add_subcommand(
            "corr-matrix", "Pairwise site correlation matrix");
        c->add_option("--masks", o->masks)->required();
        c->add_option("--sites", o->sites)->required();
        c->add_option("--threshold", o->threshold);
        c->add_option("--out", o->out)->required();
        c->add_option("--gamma-out", o->gamma_out);
        c->add_option("--omega-out", o->omega_out);
        c->callback([&ctx, o]() { run_corr_matrix(ctx, *o); });
    }
}

}  // namespace ogscli
