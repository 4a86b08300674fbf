#include "minsurf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace minsurf {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

PointCloud read_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_xyz: cannot open " + path);
    PointCloud cloud;
    cloud.source = path;
    std::string line;
    std::size_t line_number = 0;
    int fields_expected = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        double v[6];
        int count = 0;
        while (count < 6 && (ss >> v[count])) ++count;
        std::string trailing;
        if (ss >> trailing) throw ParseError("read_xyz: too many fields", line_number);
        if (count != 3 && count != 6)
            throw ParseError("read_xyz: expected 3 or 6 numeric fields, got " +
                                 std::to_string(count),
                             line_number);
        if (fields_expected == 0) fields_expected = count;
        if (count != fields_expected)
            throw ParseError("read_xyz: inconsistent field count", line_number);
        cloud.points.emplace_back(v[0], v[1], v[2]);
        if (count == 6) cloud.exact_normals.emplace_back(v[3], v[4], v[5]);
    }
    return cloud;
}

void write_xyz(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_xyz: cannot open " + path);
    const bool normals = cloud.has_normals();
    if (normals && cloud.exact_normals.size() != cloud.points.size())
        throw std::invalid_argument("write_xyz: normal count mismatch");
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Vec3& p = cloud.points[i];
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
            << format_double(p.z());
        if (normals) {
            const Vec3& n = cloud.exact_normals[i];
            out << ' ' << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
                << format_double(n.z());
        }
        out << '\n';
    }
}

}  // namespace minsurf
