#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "vds/energy.hpp"

namespace vds {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s)
{
    double x = 0.0;
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return x;
}

// Write-temp-then-rename so concurrent sweep workers never expose partial files.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline constexpr const char* energy_csv_header = "t,E,kinetic,elastic,memory,delay,I,K,L,F";

inline std::string energy_csv(const std::vector<EnergyRecord>& records,
                              const std::vector<std::string>& footer = {})
{
    std::ostringstream os;
    os << energy_csv_header << '\n';
    for (const auto& r : records) {
        os << format_double(r.t) << ',' << format_double(r.E) << ',' << format_double(r.kinetic)
           << ',' << format_double(r.elastic) << ',' << format_double(r.memory) << ','
           << format_double(r.delay) << ',' << format_double(r.I) << ',' << format_double(r.K)
           << ',' << format_double(r.L) << ',' << format_double(r.F) << '\n';
    }
    for (const auto& line : footer)
        os << "# " << line << '\n';
    return os.str();
}

struct EnergySeries {
    std::vector<double> t;
    std::vector<double> E;
};

// Read back the first two columns of an energy.csv; footer comments are skipped.
inline EnergySeries read_energy_csv(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open: " + path.string());
    EnergySeries out;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto c1 = line.find(',');
        if (c1 == std::string::npos)
            throw std::runtime_error("malformed csv row: " + line);
        auto c2 = line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            c2 = line.size();
        out.t.push_back(parse_double(std::string_view(line).substr(0, c1)));
        out.E.push_back(parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1)));
    }
    if (!header_seen)
        throw std::runtime_error("empty csv: " + path.string());
    return out;
}

// Field snapshot with a one-line header; values follow row-major, one per line
// in csv form or as raw little-endian doubles in binary form.
inline std::string snapshot_header(const Grid& g, double t)
{
    std::ostringstream os;
    os << "# dim=" << g.dim() << " Lx=" << format_double(g.lx())
       << " Ly=" << format_double(g.dim() == 2 ? g.ly() : 0.0) << " nx=" << g.nx()
       << " ny=" << (g.dim() == 2 ? g.ny() : 1) << " t=" << format_double(t);
    return os.str();
}

inline std::string snapshot_csv(const GridFunction& f, double t)
{
    std::ostringstream os;
    os << snapshot_header(f.grid(), t) << '\n';
    for (std::size_t i = 0; i < f.size(); ++i)
        os << format_double(f[i]) << '\n';
    return os.str();
}

inline std::string snapshot_binary(const GridFunction& f, double t)
{
    std::string out = snapshot_header(f.grid(), t);
    out.push_back('\n');
    const auto* raw = reinterpret_cast<const char*>(f.values().data());
    out.append(raw, raw + f.size() * sizeof(double));
    return out;
}

} // namespace vds
