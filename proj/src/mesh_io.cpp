#include "geokp/mesh_io.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace geokp {

namespace {

using nlohmann::json;

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(c));
    return ext;
}

void fan_triangulate(const std::vector<int>& poly, std::vector<std::array<int, 3>>& faces) {
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        faces.push_back({poly[0], poly[static_cast<int>(i)], poly[i + 1]});
}

}  // namespace

Mesh load_mesh(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "obj") return load_obj(path);
    if (ext == "ply") return load_ply(path);
    throw std::runtime_error("load_mesh: unsupported format '" + ext + "' for " + path);
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "obj") return save_obj(mesh, path);
    if (ext == "ply") return save_ply(mesh, path);
    throw std::runtime_error("save_mesh: unsupported format '" + ext + "' for " + path);
}

Mesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_obj: cannot open " + path);
    Mesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 p;
            ls >> p.x() >> p.y() >> p.z();
            if (!ls) throw std::runtime_error("load_obj: malformed vertex line: " + line);
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string token;
            while (ls >> token) {
                // "i", "i/t", "i//n", "i/t/n"; negative indices count from the end
                int idx = std::stoi(token.substr(0, token.find('/')));
                if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
                poly.push_back(idx - 1);
            }
            if (poly.size() < 3) throw std::runtime_error("load_obj: face with < 3 vertices: " + line);
            fan_triangulate(poly, mesh.faces);
        }
    }
    check_mesh(mesh);
    return mesh;
}

void save_obj(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_obj: cannot open " + path);
    out.precision(17);
    for (const auto& v : mesh.vertices) out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

namespace {

struct PlyProperty {
    std::string type;  // scalar type, or list item type
    std::string name;
    bool is_list = false;
    std::string count_type;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
};

std::size_t scalar_size(const std::string& type) {
    if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
    if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
    if (type == "int" || type == "uint" || type == "int32" || type == "uint32" || type == "float" ||
        type == "float32")
        return 4;
    if (type == "double" || type == "float64") return 8;
    throw std::runtime_error("ply: unknown type " + type);
}

double read_binary_scalar(std::istream& in, const std::string& type) {
    char buf[8];
    std::size_t sz = scalar_size(type);
    in.read(buf, static_cast<std::streamsize>(sz));
    if (!in) throw std::runtime_error("ply: truncated binary payload");
    if (type == "float" || type == "float32") {
        float f;
        std::memcpy(&f, buf, 4);
        return f;
    }
    if (type == "double" || type == "float64") {
        double d;
        std::memcpy(&d, buf, 8);
        return d;
    }
    if (sz == 1) {
        if (type == "char" || type == "int8") return static_cast<int8_t>(buf[0]);
        return static_cast<uint8_t>(buf[0]);
    }
    if (sz == 2) {
        if (type == "short" || type == "int16") {
            int16_t v;
            std::memcpy(&v, buf, 2);
            return v;
        }
        uint16_t v;
        std::memcpy(&v, buf, 2);
        return v;
    }
    if (type == "int" || type == "int32") {
        int32_t v;
        std::memcpy(&v, buf, 4);
        return v;
    }
    uint32_t v;
    std::memcpy(&v, buf, 4);
    return v;
}

}  // namespace

Mesh load_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_ply: cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("ply", 0) != 0) throw std::runtime_error("load_ply: not a PLY file: " + path);

    bool binary = false;
    std::vector<PlyElement> elements;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "binary_little_endian")
                binary = true;
            else if (fmt != "ascii")
                throw std::runtime_error("load_ply: unsupported format " + fmt);
        } else if (tag == "element") {
            PlyElement el;
            ls >> el.name >> el.count;
            elements.push_back(el);
        } else if (tag == "property") {
            if (elements.empty()) throw std::runtime_error("load_ply: property before element");
            PlyProperty prop;
            std::string type;
            ls >> type;
            if (type == "list") {
                prop.is_list = true;
                ls >> prop.count_type >> prop.type >> prop.name;
            } else {
                prop.type = type;
                ls >> prop.name;
            }
            elements.back().props.push_back(prop);
        } else if (tag == "end_header") {
            break;
        }
    }

    Mesh mesh;
    auto read_scalar = [&](const std::string& type) -> double {
        if (binary) return read_binary_scalar(in, type);
        double v;
        in >> v;
        if (!in) throw std::runtime_error("load_ply: truncated ascii payload");
        return v;
    };

    for (const auto& el : elements) {
        if (el.name == "vertex") {
            mesh.vertices.reserve(el.count);
            for (std::size_t i = 0; i < el.count; ++i) {
                Vec3 p = Vec3::Zero();
                for (const auto& prop : el.props) {
                    double v = read_scalar(prop.type);
                    if (prop.name == "x") p.x() = v;
                    else if (prop.name == "y") p.y() = v;
                    else if (prop.name == "z") p.z() = v;
                }
                mesh.vertices.push_back(p);
            }
        } else if (el.name == "face") {
            for (std::size_t i = 0; i < el.count; ++i) {
                for (const auto& prop : el.props) {
                    if (!prop.is_list) {
                        read_scalar(prop.type);
                        continue;
                    }
                    int n = static_cast<int>(read_scalar(prop.count_type));
                    std::vector<int> poly(n);
                    for (int k = 0; k < n; ++k) poly[k] = static_cast<int>(read_scalar(prop.type));
                    if (prop.name == "vertex_indices" || prop.name == "vertex_index")
                        fan_triangulate(poly, mesh.faces);
                }
            }
        } else {
            // skip unknown elements
            for (std::size_t i = 0; i < el.count; ++i)
                for (const auto& prop : el.props) {
                    if (prop.is_list) {
                        int n = static_cast<int>(read_scalar(prop.count_type));
                        for (int k = 0; k < n; ++k) read_scalar(prop.type);
                    } else {
                        read_scalar(prop.type);
                    }
                }
        }
    }
    check_mesh(mesh);
    return mesh;
}

void save_ply(const Mesh& mesh, const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_ply: cannot open " + path);
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    if (binary) {
        for (const auto& v : mesh.vertices) {
            double xyz[3] = {v.x(), v.y(), v.z()};
            out.write(reinterpret_cast<const char*>(xyz), 24);
        }
        for (const auto& f : mesh.faces) {
            uint8_t n = 3;
            int32_t idx[3] = {f[0], f[1], f[2]};
            out.write(reinterpret_cast<const char*>(&n), 1);
            out.write(reinterpret_cast<const char*>(idx), 12);
        }
    } else {
        out.precision(17);
        for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " " << v.z() << "\n";
        for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    }
}

Skeleton load_skeleton(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_skeleton: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("load_skeleton: malformed file " + path + ": " + e.what());
    }
    Skeleton skel;
    for (const auto& j : doc.at("joints")) {
        Joint joint;
        joint.name = j.at("name").get<std::string>();
        auto pos = j.at("position");
        joint.position = Vec3(pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>());
        if (j.contains("parent")) joint.parent = j.at("parent").get<std::string>();
        skel.joints.push_back(joint);
    }
    if (doc.contains("bones")) {
        for (const auto& b : doc.at("bones")) {
            Bone bone;
            bone.name = b.at("name").get<std::string>();
            bone.joint_a = b.at("joints").at(0).get<std::string>();
            bone.joint_b = b.at("joints").at(1).get<std::string>();
            skel.bones.push_back(bone);
        }
    }
    check_skeleton(skel);
    return skel;
}

namespace {

json skeleton_to_json(const Skeleton& skeleton) {
    json doc;
    doc["joints"] = json::array();
    for (const auto& j : skeleton.joints) {
        json jj;
        jj["name"] = j.name;
        jj["position"] = {j.position.x(), j.position.y(), j.position.z()};
        if (j.parent) jj["parent"] = *j.parent;
        doc["joints"].push_back(jj);
    }
    doc["bones"] = json::array();
    for (const auto& b : skeleton.bones)
        doc["bones"].push_back({{"name", b.name}, {"joints", {b.joint_a, b.joint_b}}});
    return doc;
}

}  // namespace

void save_skeleton(const Skeleton& skeleton, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_skeleton: cannot open " + path);
    out << skeleton_to_json(skeleton).dump(2) << "\n";
}

void save_skeleton_with_weights(const Skeleton& skeleton, const Mesh& mesh, const std::string& path) {
    json doc = skeleton_to_json(skeleton);
    if (mesh.has_skin_weights()) {
        json sw = json::object();
        for (std::size_t v = 0; v < mesh.skin_weights.size(); ++v) {
            if (mesh.skin_weights[v].empty()) continue;
            json entry = json::object();
            for (const auto& [name, w] : mesh.skin_weights[v]) entry[name] = w;
            sw[std::to_string(v)] = entry;
        }
        doc["skin_weights"] = sw;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_skeleton: cannot open " + path);
    out << doc.dump(2) << "\n";
}

void load_skin_weights(const std::string& skeleton_path, Mesh& mesh) {
    std::ifstream in(skeleton_path);
    if (!in) throw std::runtime_error("load_skin_weights: cannot open " + skeleton_path);
    json doc;
    in >> doc;
    if (!doc.contains("skin_weights")) return;
    mesh.skin_weights.assign(mesh.vertices.size(), {});
    for (const auto& [key, entry] : doc.at("skin_weights").items()) {
        std::size_t v = std::stoul(key);
        if (v >= mesh.vertices.size())
            throw std::runtime_error("load_skin_weights: vertex index out of range: " + key);
        for (const auto& [name, w] : entry.items()) mesh.skin_weights[v][name] = w.get<double>();
    }
    check_mesh(mesh);
}

}  // namespace geokp
