#include "geokp/distance_field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace geokp {

namespace {
constexpr double kLogClamp = 1e-6;  // meters, floor before the logarithm
}

std::string field_kind_name(FieldKind kind) {
    switch (kind) {
        case FieldKind::euclidean: return "euclidean";
        case FieldKind::manifold: return "manifold";
        case FieldKind::dmax: return "dmax";
        case FieldKind::log_target: return "log_target";
        case FieldKind::predicted: return "predicted";
    }
    return "unknown";
}

DistanceField euclidean_field(const ScanCloud& cloud, const Skeleton& skeleton) {
    if (cloud.size() == 0 || skeleton.joints.empty())
        throw std::runtime_error("euclidean_field: empty cloud or skeleton");
    DistanceField field;
    field.kind = FieldKind::euclidean;
    field.values.resize(static_cast<Eigen::Index>(cloud.size()),
                        static_cast<Eigen::Index>(skeleton.joints.size()));
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
        field.joint_names.push_back(skeleton.joints[j].name);
        for (std::size_t i = 0; i < cloud.size(); ++i)
            field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (cloud.points[i] - skeleton.joints[j].position).norm();
    }
    return field;
}

DistanceField manifold_field(const ScanCloud& cloud, const Mesh& mesh,
                             const std::vector<GeodesicField>& fields,
                             const std::vector<std::string>& joint_names) {
    if (fields.size() != joint_names.size())
        throw std::runtime_error("manifold_field: field/name count mismatch");
    for (const auto& f : fields)
        if (f.distances.size() != mesh.vertices.size())
            throw std::runtime_error("manifold_field: field size does not match mesh vertex count");
    DistanceField out;
    out.kind = FieldKind::manifold;
    out.joint_names = joint_names;
    out.values.resize(static_cast<Eigen::Index>(cloud.size()), static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        int f = cloud.hit_face[i];
        if (f < 0 || f >= static_cast<int>(mesh.faces.size()))
            throw std::runtime_error("manifold_field: hit face index out of range");
        const auto& tri = mesh.faces[f];
        BarycentricCoords bc{cloud.bary[i].x(), cloud.bary[i].y()};
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto& d = fields[j].distances;
            double value;
            if (!std::isfinite(d[tri[0]]) || !std::isfinite(d[tri[1]]) || !std::isfinite(d[tri[2]])) {
                // an unreachable corner means the whole face is in an
                // unreachable component; avoid 0*inf turning into NaN
                value = std::numeric_limits<double>::infinity();
            } else {
                // combine surface distance and joint depth in quadrature: for
                // a joint at depth o below its nearest surface point, the true
                // distance is ~sqrt(g^2 + o^2); adding o outright inflates
                // every on-component distance by up to o and biases the
                // downstream multilateration
                double g = interpolate_distance(d[tri[0]], d[tri[1]], d[tri[2]], bc);
                value = std::hypot(g, fields[j].offset);
            }
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
        }
    }
    return out;
}

DistanceField dmax_field(const DistanceField& manifold, const DistanceField& euclidean,
                         int* inf_replacements) {
    if (manifold.values.rows() != euclidean.values.rows() ||
        manifold.values.cols() != euclidean.values.cols() || manifold.joint_names != euclidean.joint_names)
        throw std::runtime_error("dmax_field: shape or joint-label mismatch");
    DistanceField out;
    out.kind = FieldKind::dmax;
    out.joint_names = manifold.joint_names;
    out.values.resize(manifold.values.rows(), manifold.values.cols());
    int replaced = 0;
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
            double m = manifold.values(i, j), e = euclidean.values(i, j);
            if (!std::isfinite(m)) {
                out.values(i, j) = e;
                ++replaced;
            } else {
                out.values(i, j) = std::max(m, e);
            }
        }
    }
    if (inf_replacements) *inf_replacements = replaced;
    return out;
}

DistanceField log_target(const DistanceField& dmax) {
    if (dmax.kind != FieldKind::dmax) throw std::runtime_error("log_target: input kind must be dmax");
    DistanceField out = dmax;
    out.kind = FieldKind::log_target;
    out.values = (-dmax.values.cwiseMax(kLogClamp).array().log() / 10.0).matrix();
    return out;
}

DistanceField invert_target(const DistanceField& log_field) {
    if (log_field.kind != FieldKind::log_target && log_field.kind != FieldKind::predicted)
        throw std::runtime_error("invert_target: input kind must be log_target or predicted");
    DistanceField out = log_field;
    out.kind = FieldKind::dmax;
    out.values = (-10.0 * log_field.values.array()).exp().matrix();
    return out;
}

DistanceField corrupt_field(const DistanceField& field, double sigma_m, uint64_t seed) {
    if (field.kind != FieldKind::dmax) throw std::runtime_error("corrupt_field: input kind must be dmax");
    if (sigma_m < 0) throw std::runtime_error("corrupt_field: sigma must be >= 0");
    DistanceField out = field;
    out.kind = FieldKind::predicted;
    out.source = "oracle+noise(" + std::to_string(sigma_m) + ")";
    if (sigma_m > 0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, sigma_m);
        for (Eigen::Index i = 0; i < out.values.rows(); ++i)
            for (Eigen::Index j = 0; j < out.values.cols(); ++j)
                out.values(i, j) = std::max(out.values(i, j) + noise(rng), 0.0);
    }
    return out;
}

// File layout: magic "DFLD", version u16, kind u8, n u64, m u16,
// m x (u16 length + UTF-8 name), u32 length + source tag,
// then n*m float64 row-major little-endian.
void write_field(const DistanceField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field: cannot open " + path);
    out.write("DFLD", 4);
    uint16_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), 2);
    uint8_t kind = static_cast<uint8_t>(field.kind);
    out.write(reinterpret_cast<const char*>(&kind), 1);
    uint64_t n = field.n();
    out.write(reinterpret_cast<const char*>(&n), 8);
    uint16_t m = static_cast<uint16_t>(field.m());
    if (field.joint_names.size() != field.m())
        throw std::runtime_error("write_field: joint-name count does not match columns");
    out.write(reinterpret_cast<const char*>(&m), 2);
    for (const auto& name : field.joint_names) {
        uint16_t len = static_cast<uint16_t>(name.size());
        out.write(reinterpret_cast<const char*>(&len), 2);
        out.write(name.data(), len);
    }
    uint32_t tag_len = static_cast<uint32_t>(field.source.size());
    out.write(reinterpret_cast<const char*>(&tag_len), 4);
    out.write(field.source.data(), tag_len);
    for (Eigen::Index i = 0; i < field.values.rows(); ++i)
        for (Eigen::Index j = 0; j < field.values.cols(); ++j) {
            double v = field.values(i, j);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
}

DistanceField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "DFLD", 4) != 0)
        throw std::runtime_error("read_field: bad magic in " + path);
    uint16_t version;
    in.read(reinterpret_cast<char*>(&version), 2);
    if (version != 1) throw std::runtime_error("read_field: unsupported version");
    uint8_t kind;
    in.read(reinterpret_cast<char*>(&kind), 1);
    if (kind > 4) throw std::runtime_error("read_field: unknown field kind");
    uint64_t n;
    uint16_t m;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&m), 2);
    DistanceField field;
    field.kind = static_cast<FieldKind>(kind);
    for (uint16_t j = 0; j < m; ++j) {
        uint16_t len;
        in.read(reinterpret_cast<char*>(&len), 2);
        std::string name(len, '\0');
        in.read(name.data(), len);
        field.joint_names.push_back(name);
    }
    uint32_t tag_len;
    in.read(reinterpret_cast<char*>(&tag_len), 4);
    field.source.resize(tag_len);
    in.read(field.source.data(), tag_len);
    if (!in) throw std::runtime_error("read_field: truncated header in " + path);
    field.values.resize(static_cast<Eigen::Index>(n), m);
    for (Eigen::Index i = 0; i < field.values.rows(); ++i)
        for (Eigen::Index j = 0; j < field.values.cols(); ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), 8);
            if (!in) throw std::runtime_error("read_field: truncated payload in " + path);
            field.values(i, j) = v;
        }
    return field;
}

}  // namespace geokp
