#include <CLI11.hpp>

#include <cmath>
#include <iostream>

#include "common.hpp"
#include "ogsnet/cmg_io.hpp"
#include "ogsnet/correlation.hpp"
#include "ogsnet/dgmodel.hpp"
#include "ogsnet/io_util.hpp"
#include "ogsnet/optimizer.hpp"
#include "table.hpp"

namespace ogscli {

namespace {

using namespace ogsnet;

std::vector<double> read_omega_table(RunContext& ctx, const std::string& path,
                                     std::vector<std::string>& names) {
    const Table t = read_csv(ctx.require_input(path));
    const int name_col = t.column({"name", "site"});
    const int omega_col = t.column({"omega", "omega_binary"});
    std::vector<double> omega;
    for (const auto& row : t.rows) {
        names.push_back(row[std::size_t(name_col)]);
        omega.push_back(to_double(row[std::size_t(omega_col)]));
    }
    if (omega.empty()) throw std::runtime_error(path + ": no sites");
    return omega;
}

// Square table keyed by site name in both header and first column; values
// are reindexed to `names` order.
std::vector<double> read_square_table(RunContext& ctx, const std::string& path,
                                      const std::vector<std::string>& names) {
    const Table t = read_csv(ctx.require_input(path));
    const std::size_t n = names.size();
    if (t.header.size() != n + 1 || t.rows.size() != n)
        throw std::runtime_error(path + ": expected a " + std::to_string(n) + "x" +
                                 std::to_string(n) + " site matrix");
    auto col_of = [&](const std::string& name) {
        for (std::size_t c = 1; c < t.header.size(); ++c)
            if (t.header[c] == name) return c;
        throw std::runtime_error(path + ": missing column for site " + name);
    };
    auto row_of = [&](const std::string& name) {
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            if (t.rows[r][0] == name) return r;
        throw std::runtime_error(path + ": missing row for site " + name);
    };
    std::vector<double> out(n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            out[k * n + l] = to_double(t.rows[row_of(names[k])][col_of(names[l])]);
    return out;
}

void write_cdf(RunContext& ctx, const std::string& path,
               const OutageDistribution& dist, const std::string& role) {
    CsvWriter w("M,p_avail_le_M,ci95,count");
    for (int m = 0; m <= dist.n_sites; ++m) {
        w.field(m)
            .field(dist.cdf[std::size_t(m)])
            .field(dist.ci95[std::size_t(m)])
            .field(dist.counts[std::size_t(m)]);
        w.endrow();
    }
    atomic_write_file(path, w.str());
    ctx.note_output(path, role);
}

struct OutageOpts {
    std::string masks, sites;
    double threshold = 0.5;
    std::string omega_file;
    std::string r_spec;  // constant or path to a correlation matrix
    std::string gamma_file;
    double samples = 1e8;
    std::uint64_t seed = 0;
    int workers = 0;
    bool clamp_degenerate = false;
    std::string out;
    std::string empirical_out;
};

void run_outage(RunContext& ctx, const OutageOpts& o) {
    ctx.seed = o.seed;
    ctx.seed_used = true;
    ctx.workers = o.workers;

    std::vector<double> omega;
    std::vector<double> gamma;
    std::vector<SiteSeries> site_series;

    if (!o.masks.empty()) {
        const CloudMaskSeries series = read_cmg(ctx.require_input(o.masks));
        const auto sites = read_sites(ctx.require_input(o.sites));
        for (const Site& s : sites)
            site_series.push_back(extract_site_series(series, s, o.threshold));
        for (const SiteSeries& ss : site_series) omega.push_back(ss.omega_binary());
        gamma = covariance_matrix(site_series);
    } else if (!o.omega_file.empty()) {
        std::vector<std::string> names;
        omega = read_omega_table(ctx, o.omega_file, names);
        const std::size_t n = omega.size();
        if (!o.gamma_file.empty()) {
            gamma = read_square_table(ctx, o.gamma_file, names);
        } else if (!o.r_spec.empty()) {
            std::vector<double> r(n * n);
            char* end = nullptr;
            const double r_const = std::strtod(o.r_spec.c_str(), &end);
            if (end && *end == '\0') {
                // Constant equicorrelation target.
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l)
                        r[k * n + l] = (k == l) ? 1.0 : r_const;
            } else {
                r = read_square_table(ctx, o.r_spec, names);
            }
            gamma = gamma_from_r(r, omega);
        } else {
            throw std::invalid_argument("outage: --omega needs --r or --gamma");
        }
    } else {
        throw std::invalid_argument("outage: need --masks/--sites or --omega");
    }

    FitOptions fit_opts;
    fit_opts.clamp_degenerate = o.clamp_degenerate;
    const JointAvailabilityModel model = fit_model(omega, gamma, fit_opts);
    const OutageDistribution dist =
        sample(model, parse_count(o.samples, "--samples"), o.seed, o.workers);
    write_cdf(ctx, o.out, dist, "outage_cdf");

    if (!o.empirical_out.empty()) {
        if (site_series.empty())
            throw std::invalid_argument("outage: --empirical-out needs --masks");
        write_cdf(ctx, o.empirical_out, empirical_cdf_from_data(site_series),
                  "empirical_cdf");
    }

    ctx.metadata["psd_repaired"] = model.psd_repaired;
    ctx.metadata["repair_delta"] = model.repair_delta;
    ctx.metadata["p_outage"] = dist.cdf[0];
    std::cout << "p_avail(M=0) " << fmt_double(dist.cdf[0]) << " +- "
              << fmt_double(dist.ci95[0]) << (model.psd_repaired ? "  [PSD-REPAIRED"
                                                                   " latent matrix, max delta " +
                                                                       fmt_double(model.repair_delta) + "]"
                                                                 : "")
              << "\n";
}

struct OptimizeOpts {
    std::string masks;
    int n_sites = 8;
    std::string seeds;
    bool lat_weight = false;
    double lat_slope = 0.00745;
    bool exclude_w0 = false;
    std::string mask_file;
    double w0 = 1.0;
    double wk = 1.0;
    int min_sep = 0;
    int downsample = 1;
    std::string out;
    std::string sites_out;
    std::string surface_prefix;
};

void run_optimize(RunContext& ctx, const OptimizeOpts& o) {
    CloudMaskSeries series = read_cmg(ctx.require_input(o.masks));
    if (o.downsample > 1) series = block_downsample(series, o.downsample);

    std::vector<std::uint8_t> mask;
    if (!o.mask_file.empty())
        mask = read_region_mask(ctx.require_input(o.mask_file), series.spec);

    std::vector<Site> seeds;
    if (!o.seeds.empty()) seeds = read_sites(ctx.require_input(o.seeds));

    Weights weights;
    weights.w0 = o.w0;
    weights.wk.assign(std::size_t(o.n_sites) + seeds.size(), o.wk);
    weights.spatial_applies_to_w0 = !o.exclude_w0;
    if (o.lat_weight) {
        weights.spatial_weight.resize(series.spec.n_pixels());
        for (int i = 0; i < series.spec.n_lat; ++i) {
            const double w = latitude_weighting(series.spec.lat_center(i), o.lat_slope);
            for (int j = 0; j < series.spec.n_lon; ++j)
                weights.spatial_weight[series.spec.index(i, j)] = w;
        }
    }

    const SelectionResult result =
        optimize_network(series, o.n_sites, weights, mask, seeds, o.min_sep);

    nlohmann::json j;
    j["n_seeds"] = result.n_seeds;
    j["weights"] = {{"w0", o.w0},
                    {"wk", o.wk},
                    {"latitude_weighting", o.lat_weight},
                    {"latitude_slope", o.lat_slope},
                    {"spatial_applies_to_w0", !o.exclude_w0}};
    j["downsample"] = o.downsample;
    auto sites_json = nlohmann::json::array();
    for (const Site& s : result.sites)
        sites_json.push_back({{"name", s.name}, {"lat_deg", s.lat}, {"lon_deg", s.lon}});
    j["sites"] = sites_json;
    auto steps = nlohmann::json::array();
    for (std::size_t k = 0; k < result.steps.size(); ++k) {
        const SelectionStep& st = result.steps[k];
        steps.push_back({{"step", k + 1},
                         {"ilat", st.pixel_ilat},
                         {"jlon", st.pixel_jlon},
                         {"lat_deg", series.spec.lat_center(st.pixel_ilat)},
                         {"lon_deg", series.spec.lon_center(st.pixel_jlon)},
                         {"objective", st.objective}});
    }
    j["steps"] = steps;
    atomic_write_file(o.out, j.dump(2) + "\n");
    ctx.note_output(o.out, "selection");

    if (!o.sites_out.empty()) {
        write_sites(o.sites_out, result.sites);
        ctx.note_output(o.sites_out, "selected_sites");
    }

    if (!o.surface_prefix.empty()) {
        // Re-derive the per-step surfaces for plotting: step k minimises the
        // surface built from the first (n_seeds + k - 1) sites.
        const AvailabilityGrid avail = availability_grid(series);
        std::vector<CorrelationSurface> surfaces;
        for (const Site& s : result.sites)
            surfaces.push_back(
                correlation_surface(series, extract_site_series(series, s)));
        for (std::size_t k = 1; k <= result.steps.size(); ++k) {
            const std::size_t n_prior = std::size_t(result.n_seeds) + k - 1;
            const std::string path =
                o.surface_prefix + "_step" + std::to_string(k) + ".pgm";
            double lo = 0.0, hi = 0.0;
            if (n_prior == 0) {
                write_pgm(path, series.spec, avail.omega, lo, hi);
            } else {
                const std::vector<CorrelationSurface> prior(
                    surfaces.begin(), surfaces.begin() + std::ptrdiff_t(n_prior));
                const ObjectiveSurface g =
                    objective_surface(avail, prior, weights, mask);
                write_pgm(path, series.spec, g.g, lo, hi);
            }
            ctx.note_output(path, "objective_surface_step" + std::to_string(k));
            ctx.metadata["raster_scale"][path] = {{"min", lo}, {"max", hi}};
        }
        const std::string final_path = o.surface_prefix + "_final.pgm";
        double lo = 0.0, hi = 0.0;
        write_pgm(final_path, series.spec, result.final_surface.g, lo, hi);
        ctx.note_output(final_path, "objective_surface_final");
        ctx.metadata["raster_scale"][final_path] = {{"min", lo}, {"max", hi}};
    }

    for (const auto& st : result.steps)
        std::cout << "selected (" << st.pixel_ilat << "," << st.pixel_jlon
                  << ") objective " << fmt_double(st.objective) << "\n";
}

struct ReportOpts {
    std::string masks, sites;
    double threshold = 0.5;
    double samples = 1e7;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
    std::string per_site_out;
};

void run_report(RunContext& ctx, const ReportOpts& o) {
    const CloudMaskSeries series = read_cmg(ctx.require_input(o.masks));
    const auto sites = read_sites(ctx.require_input(o.sites));
    std::vector<SiteSeries> site_series;
    for (const Site& s : sites)
        site_series.push_back(extract_site_series(series, s, o.threshold));

    ctx.seed = o.seed;
    ctx.seed_used = true;
    ctx.workers = o.workers;
    const NetworkReport report = network_report(
        site_series, parse_count(o.samples, "--samples"), o.seed, o.workers);

    CsvWriter w(
        "n_sites,a_mean,a_std,rbar,rbar_std,p_outage,p_outage_ci95,"
        "psd_repaired,repair_delta");
    w.field(report.n_sites).field(report.a_mean).field(report.a_std);
    if (report.rbar_defined)
        w.field(report.rbar).field(report.rbar_std);
    else
        w.field(std::string()).field(std::string());
    w.field(report.p_outage)
        .field(report.p_outage_ci95)
        .field(int(report.psd_repaired))
        .field(report.repair_delta);
    w.endrow();
    atomic_write_file(o.out, w.str());
    ctx.note_output(o.out, "network_report");

    if (!o.per_site_out.empty()) {
        CsvWriter ps("name,omega_binary,availability_fraction");
        for (const SiteSeries& ss : site_series) {
            ps.field(ss.site.name)
                .field(ss.omega_binary())
                .field(1.0 - ss.omega_fraction());
            ps.endrow();
        }
        atomic_write_file(o.per_site_out, ps.str());
        ctx.note_output(o.per_site_out, "per_site_report");
    }

    std::cout << "A_mean " << fmt_double(report.a_mean) << " +- "
              << fmt_double(report.a_std) << "\n";
    if (report.rbar_defined)
        std::cout << "mean_abs_r " << fmt_double(report.rbar) << " +- "
                  << fmt_double(report.rbar_std) << "\n";
    std::cout << "p_avail(M=0) " << fmt_double(report.p_outage) << " +- "
              << fmt_double(report.p_outage_ci95) << "\n";
}

}  // namespace

void register_model_commands(CLI::App& app, RunContext& ctx) {
    {
        auto o = std::make_shared<OutageOpts>();
        CLI::App* c = app.add_subcommand(
            "outage", "Joint availability model and outage CDF");
        c->add_option("--masks", o->masks);
        c->add_option("--sites", o->sites);
        c->add_option("--threshold", o->threshold);
        c->add_option("--omega", o->omega_file, "name,omega table");
        c->add_option("--r", o->r_spec,
                      "Bernoulli correlation: a constant or a matrix file");
        c->add_option("--gamma", o->gamma_file, "Covariance matrix file");
        c->add_option("--samples", o->samples);
        c->add_option("--seed", o->seed);
        c->add_option("--workers", o->workers);
        c->add_flag("--clamp-degenerate", o->clamp_degenerate,
                    "Clamp omega into [1e-6, 1-1e-6] instead of rejecting");
        c->add_option("--out", o->out)->required();
        c->add_option("--empirical-out", o->empirical_out);
        c->callback([&ctx, o]() { run_outage(ctx, *o); });
    }
    {
        auto o = std::make_shared<OptimizeOpts>();
        CLI::App* c = app.add_subcommand(
            "optimize", "Greedy availability/diversity site selection");
        c->add_option("--masks", o->masks)->required();
        c->add_option("--n", o->n_sites)->check(CLI::PositiveNumber);
        c->add_option("--seeds", o->seeds, "Existing network to extend");
        c->add_flag("--lat-weight", o->lat_weight);
        c->add_option("--lat-slope", o->lat_slope);
        c->add_flag("--exclude-w0", o->exclude_w0,
                    "Leave the availability term out of the spatial weighting");
        c->add_option("--mask", o->mask_file, "Region mask (PGM or text, 0 = excluded)");
        c->add_option("--w0", o->w0);
        c->add_option("--wk", o->wk);
        c->add_option("--min-sep", o->min_sep,
                      "Minimum pixel separation between selected sites");
        c->add_option("--downsample", o->downsample);
        c->add_option("--out", o->out)->required();
        c->add_option("--sites-out", o->sites_out);
        c->add_option("--surface-out", o->surface_prefix);
        c->callback([&ctx, o]() { run_optimize(ctx, *o); });
    }
    {
        auto o = std::make_shared<ReportOpts>();
        CLI::App* c = app.add_subcommand(
            "report", "Availability, diversity and outage summary for a network");
        c->add_option("--masks", o->masks)->required();
        c->add_option("--sites", o->sites)->required();
        c->add_option("--threshold", o->threshold);
        c->add_option("--samples", o->samples);
        c->add_option("--seed", o->seed);
        c->add_option("--workers", o->workers);
        c->add_option("--out", o->out)->required();
        c->add_option("--per-site-out", o->per_site_out);
        c->callback([&ctx, o]() { run_report(ctx, *o); });
    }
}

}  // namespace ogscli
