#include "ogsnet/cmg_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ogsnet/io_util.hpp"

namespace ogsnet {

namespace {

std::size_t packed_frame_bytes(const GridSpec& spec) {
    return (spec.n_pixels() + 7) / 8;
}

[[noreturn]] void malformed(const std::string& what) {
    throw std::runtime_error("malformed CMG header: " + what);
}

}  // namespace

void write_cmg(const std::string& path, const CloudMaskSeries& series,
               bool text_encoding) {
    series.validate();
    std::ostringstream out;
    out << "CMG1\n";
    out << "n_lat " << series.spec.n_lat << "\n";
    out << "n_lon " << series.spec.n_lon << "\n";
    out << "lat_min " << fmt_double(series.spec.lat_min) << "\n";
    out << "lat_max " << fmt_double(series.spec.lat_max) << "\n";
    out << "lon_min " << fmt_double(series.spec.lon_min) << "\n";
    out << "lon_max " << fmt_double(series.spec.lon_max) << "\n";
    out << "n_frames " << series.n_frames() << "\n";
    out << "source " << (series.source_id.empty() ? "unknown" : series.source_id)
        << "\n";
    out << "encoding " << (text_encoding ? "text" : "packed") << "\n";

    // Uniform cadence collapses to start+stride, otherwise list every epoch.
    bool uniform = series.n_frames() >= 2;
    const std::int64_t stride =
        series.n_frames() >= 2 ? series.timestamps[1] - series.timestamps[0] : 0;
    for (std::size_t t = 2; t < series.n_frames(); ++t)
        if (series.timestamps[t] - series.timestamps[t - 1] != stride)
            uniform = false;
    if (uniform) {
        out << "epochs uniform " << series.timestamps[0] << " " << stride << "\n";
    } else {
        out << "epochs list";
        for (std::int64_t t : series.timestamps) out << " " << t;
        out << "\n";
    }
    out << "data\n";

    const std::size_t npix = series.spec.n_pixels();
    if (text_encoding) {
        for (std::size_t t = 0; t < series.n_frames(); ++t) {
            const std::uint8_t* f = series.frame(t);
            for (std::size_t p = 0; p < npix; ++p) {
                out << int(f[p]);
                out << ((p + 1) % series.spec.n_lon == 0 ? '\n' : ' ');
            }
        }
    } else {
        const std::size_t nbytes = packed_frame_bytes(series.spec);
        std::string packed(nbytes, '\0');
        for (std::size_t t = 0; t < series.n_frames(); ++t) {
            std::fill(packed.begin(), packed.end(), '\0');
            const std::uint8_t* f = series.frame(t);
            for (std::size_t p = 0; p < npix; ++p)
                if (f[p]) packed[p / 8] |= char(0x80u >> (p % 8));
            out.write(packed.data(), std::streamsize(nbytes));
        }
    }
    atomic_write_file(path, out.str());
}

CloudMaskSeries read_cmg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);

    std::string line;
    if (!std::getline(in, line) || line != "CMG1") malformed("missing CMG1 magic");

    CloudMaskSeries series;
    std::int64_t n_frames = -1;
    std::string encoding = "packed";
    bool have_epochs = false;
    bool saw_data = false;

    while (std::getline(in, line)) {
        if (line == "data") {
            saw_data = true;
            break;
        }
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key.empty() || key[0] == '#') continue;
        if (key == "n_lat") ls >> series.spec.n_lat;
        else if (key == "n_lon") ls >> series.spec.n_lon;
        else if (key == "lat_min") ls >> series.spec.lat_min;
        else if (key == "lat_max") ls >> series.spec.lat_max;
        else if (key == "lon_min") ls >> series.spec.lon_min;
        else if (key == "lon_max") ls >> series.spec.lon_max;
        else if (key == "n_frames") ls >> n_frames;
        else if (key == "source") ls >> series.source_id;
        else if (key == "encoding") ls >> encoding;
        else if (key == "epochs") {
            std::string mode;
            ls >> mode;
            if (mode == "uniform") {
                std::int64_t start = 0, stride = 0;
                if (!(ls >> start >> stride)) malformed("epochs uniform needs start and stride");
                if (n_frames < 0) malformed("n_frames must precede epochs");
                if (n_frames > 1 && stride <= 0) malformed("non-monotone timestamps");
                for (std::int64_t t = 0; t < n_frames; ++t)
                    series.timestamps.push_back(start + t * stride);
            } else if (mode == "list") {
                std::int64_t v;
                while (ls >> v) series.timestamps.push_back(v);
            } else {
                malformed("unknown epochs mode '" + mode + "'");
            }
            have_epochs = true;
        } else {
            malformed("unknown key '" + key + "'");
        }
        if (ls.fail() && !ls.eof()) malformed("bad value for key '" + key + "'");
    }

    if (!saw_data) malformed("missing data section");
    if (n_frames < 1) malformed("n_frames must be >= 1");
    if (!have_epochs) malformed("missing epochs");
    try {
        series.spec.validate();
    } catch (const std::exception& e) {
        malformed(e.what());
    }
    if (std::int64_t(series.timestamps.size()) != n_frames)
        malformed("epoch count does not match n_frames");
    for (std::size_t t = 1; t < series.timestamps.size(); ++t)
        if (series.timestamps[t] <= series.timestamps[t - 1])
            malformed("non-monotone timestamps");

    const std::size_t npix = series.spec.n_pixels();
    series.frames.resize(std::size_t(n_frames) * npix);

    if (encoding == "text") {
        for (std::int64_t t = 0; t < n_frames; ++t) {
            std::uint8_t* f = series.frame(std::size_t(t));
            for (std::size_t p = 0; p < npix; ++p) {
                long v;
                if (!(in >> v)) throw std::runtime_error("CMG data truncated");
                if (v != 0 && v != 1)
                    throw std::runtime_error("non-binary cell (value " +
                                             std::to_string(v) + ")");
                f[p] = std::uint8_t(v);
            }
        }
    } else if (encoding == "packed") {
        const std::size_t nbytes = packed_frame_bytes(series.spec);
        std::vector<char> buf(nbytes);
        for (std::int64_t t = 0; t < n_frames; ++t) {
            in.read(buf.data(), std::streamsize(nbytes));
            if (std::size_t(in.gcount()) != nbytes)
                throw std::runtime_error("CMG data truncated (dimension mismatch)");
            std::uint8_t* f = series.frame(std::size_t(t));
            for (std::size_t p = 0; p < npix; ++p)
                f[p] = (std::uint8_t(buf[p / 8]) >> (7 - p % 8)) & 1u;
            // Trailing pad bits must be clean zero.
            for (std::size_t b = npix; b < nbytes * 8; ++b)
                if ((std::uint8_t(buf[b / 8]) >> (7 - b % 8)) & 1u)
                    throw std::runtime_error("non-binary cell (padding bits set)");
        }
        char extra;
        if (in.read(&extra, 1))
            throw std::runtime_error("CMG data longer than header declares");
    } else {
        malformed("unknown encoding '" + encoding + "'");
    }

    series.validate();
    return series;
}

std::vector<Site> read_sites(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<Site> sites;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        Site s;
        if (!(ls >> s.name)) continue;  // blank line
        if (!(ls >> s.lat >> s.lon >> s.roi_radius_px))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected name lat lon roi_radius_px");
        if (s.lat < -90.0 || s.lat > 90.0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": latitude outside [-90, 90]");
        sites.push_back(std::move(s));
    }
    if (sites.empty()) throw std::runtime_error(path + ": no sites found");
    return sites;
}

void write_sites(const std::string& path, const std::vector<Site>& sites) {
    std::ostringstream out;
    out << "# name lat_deg lon_deg roi_radius_px\n";
    for (const Site& s : sites)
        out << s.name << " " << fmt_double(s.lat) << " " << fmt_double(s.lon)
            << " " << s.roi_radius_px << "\n";
    atomic_write_file(path, out.str());
}

void write_text_matrix(const std::string& path, const GridSpec& spec,
                       const std::vector<double>& values) {
    if (values.size() != spec.n_pixels())
        throw std::invalid_argument("write_text_matrix: size mismatch");
    std::ostringstream out;
    for (int i = spec.n_lat - 1; i >= 0; --i) {
        for (int j = 0; j < spec.n_lon; ++j) {
            if (j) out << ' ';
            out << fmt_double(values[spec.index(i, j)]);
        }
        out << '\n';
    }
    atomic_write_file(path, out.str());
}

void write_pgm(const std::string& path, const GridSpec& spec,
               const std::vector<double>& values, double& scale_min,
               double& scale_max) {
    if (values.size() != spec.n_pixels())
        throw std::invalid_argument("write_pgm: size mismatch");
    scale_min = std::numeric_limits<double>::infinity();
    scale_max = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        scale_min = std::min(scale_min, v);
        scale_max = std::max(scale_max, v);
    }
    const double span = scale_max - scale_min;
    std::ostringstream out;
    out << "P5\n" << spec.n_lon << " " << spec.n_lat << "\n255\n";
    for (int i = spec.n_lat - 1; i >= 0; --i) {
        for (int j = 0; j < spec.n_lon; ++j) {
            const double v = values[spec.index(i, j)];
            const int g = span > 0.0
                              ? int(std::lround(255.0 * (v - scale_min) / span))
                              : 0;
            out.put(char(std::clamp(g, 0, 255)));
        }
    }
    atomic_write_file(path, out.str());
}

std::vector<std::uint8_t> read_region_mask(const std::string& path,
                                           const GridSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    in >> magic;

    int width = 0, height = 0;
    std::vector<double> north_up(spec.n_pixels());

    auto skip_comments = [&in]() {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string comment;
            std::getline(in, comment);
            in >> std::ws;
        }
    };

    if (magic == "P5" || magic == "P2") {
        int maxval = 0;
        skip_comments();
        in >> width;
        skip_comments();
        in >> height;
        skip_comments();
        in >> maxval;
        if (width != spec.n_lon || height != spec.n_lat)
            throw std::runtime_error("mask dimensions do not match grid");
        if (magic == "P5") {
            in.get();  // single whitespace after maxval
            for (std::size_t p = 0; p < spec.n_pixels(); ++p) {
                const int c = in.get();
                if (c == EOF) throw std::runtime_error("mask data truncated");
                north_up[p] = double(c);
            }
        } else {
            for (std::size_t p = 0; p < spec.n_pixels(); ++p)
                if (!(in >> north_up[p]))
                    throw std::runtime_error("mask data truncated");
        }
    } else {
        // Plain text matrix; first token already consumed.
        in.seekg(0);
        for (std::size_t p = 0; p < spec.n_pixels(); ++p)
            if (!(in >> north_up[p]))
                throw std::runtime_error("mask matrix truncated or wrong size");
    }

    // File rows run north to south; flip into grid (south-origin) order.
    std::vector<std::uint8_t> excluded(spec.n_pixels(), 0);
    for (int i = 0; i < spec.n_lat; ++i)
        for (int j = 0; j < spec.n_lon; ++j) {
            const double v = north_up[std::size_t(spec.n_lat - 1 - i) * spec.n_lon + j];
            excluded[spec.index(i, j)] = (v == 0.0) ? 1 : 0;
        }
    return excluded;
}

}  // namespace ogsnet
