#include "geokp/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace geokp {

AnchorSet select_area_of_interest(const ScanCloud& cloud, const Eigen::VectorXd& column, int k) {
    if (k < 4) throw std::runtime_error("select_area_of_interest: k must be >= 4");
    if (static_cast<int>(cloud.size()) < k)
        throw std::runtime_error("select_area_of_interest: cloud smaller than k");
    if (column.size() != static_cast<Eigen::Index>(cloud.size()))
        throw std::runtime_error("select_area_of_interest: column length does not match cloud");

    std::vector<int> order(cloud.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
        return std::pair(column[a], a) < std::pair(column[b], b);
    });
    std::vector<int> chosen(order.begin(), order.begin() + k);
    // the "first point within the area of interest": lowest original index
    std::sort(chosen.begin(), chosen.end());

    AnchorSet set;
    set.anchor = cloud.points[chosen[0]];
    set.distances.push_back(column[chosen[0]]);
    for (int i = 1; i < k; ++i) {
        set.others.push_back(cloud.points[chosen[i]]);
        set.distances.push_back(column[chosen[i]]);
    }

    // coplanarity: rank of the translated point matrix
    Eigen::MatrixXd pts(k - 1, 3);
    for (int i = 1; i < k; ++i) pts.row(i - 1) = (cloud.points[chosen[i]] - set.anchor).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pts);
    set.near_coplanar = svd.singularValues()(2) < 1e-9;
    return set;
}

JointEstimate multilaterate(const AnchorSet& anchors) {
    const int k = static_cast<int>(anchors.others.size()) + 1;
    if (k < 4) throw std::runtime_error("multilaterate: need at least 4 anchors");
    if (anchors.distances.size() != static_cast<std::size_t>(k))
        throw std::runtime_error("multilaterate: distance count does not match anchors");

    JointEstimate est;
    est.anchor_count = k;

    // translate so the anchor sits at the origin; the closed form's b rows
    // drop the anchor coordinates, which is exact only then
    const double d1 = anchors.distances[0];
    Eigen::MatrixXd h(k - 1, 3);
    Eigen::VectorXd b(k - 1);
    for (int i = 1; i < k; ++i) {
        Vec3 p = anchors.others[i - 1] - anchors.anchor;
        double di = anchors.distances[i];
        h.row(i - 1) = 2.0 * p.transpose();
        b(i - 1) = p.squaredNorm() - di * di + d1 * d1;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
    Vec3 solution;
    if (qr.rank() < 3 || anchors.near_coplanar) {
        Eigen::Matrix3d normal = h.transpose() * h + 1e-9 * Eigen::Matrix3d::Identity();
        solution = normal.ldlt().solve(h.transpose() * b);
        est.ridge_fallback = true;
    } else {
        solution = qr.solve(b);
    }
    est.position = solution + anchors.anchor;

    double sq_sum = 0;
    sq_sum += std::pow((anchors.anchor - est.position).norm() - d1, 2);
    for (int i = 1; i < k; ++i)
        sq_sum += std::pow((anchors.others[i - 1] - est.position).norm() - anchors.distances[i], 2);
    est.residual_rms = std::sqrt(sq_sum / k);
    return est;
}

std::vector<JointEstimate> solve_all_joints(const ScanCloud& cloud, const DistanceField& field, int k) {
    if (field.kind != FieldKind::dmax && field.kind != FieldKind::predicted)
        throw std::runtime_error("solve_all_joints: field kind must be dmax or predicted");
    if (field.n() != cloud.size())
        throw std::runtime_error("solve_all_joints: field row count does not match cloud size");
    std::vector<JointEstimate> estimates;
    for (std::size_t j = 0; j < field.m(); ++j) {
        JointEstimate est;
        est.joint_name = field.joint_names[j];
        try {
            Eigen::VectorXd column = field.values.col(static_cast<Eigen::Index>(j));
            if (!column.allFinite()) throw std::runtime_error("non-finite distance column");
            est = multilaterate(select_area_of_interest(cloud, column, k));
            est.joint_name = field.joint_names[j];
        } catch (const std::exception& e) {
            est.failed = true;
            est.failure_reason = e.what();
        }
        estimates.push_back(est);
    }
    return estimates;
}

JointErrorTable joint_errors(const std::vector<JointEstimate>& estimates, const Skeleton& truth) {
    JointErrorTable table;
    for (const auto& est : estimates) {
        if (est.failed) continue;
        int idx = truth.joint_index(est.joint_name);
        if (idx < 0)
            throw std::runtime_error("joint_errors: truth skeleton missing joint '" + est.joint_name + "'");
        table.joint_names.push_back(est.joint_name);
        table.errors_m.push_back((est.position - truth.joints[idx].position).norm());
    }
    if (!table.errors_m.empty()) {
        double sum = std::accumulate(table.errors_m.begin(), table.errors_m.end(), 0.0);
        table.mean = sum / static_cast<double>(table.errors_m.size());
        double sq = 0;
        for (double e : table.errors_m) sq += (e - table.mean) * (e - table.mean);
        table.stddev = std::sqrt(sq / static_cast<double>(table.errors_m.size()));
    }
    return table;
}

std::vector<BoneStats> bone_length_stats(const std::vector<Skeleton>& frames, const std::vector<Bone>& bones) {
    if (frames.empty()) throw std::runtime_error("bone_length_stats: no frames");
    std::vector<BoneStats> out;
    for (const auto& bone : bones) {
        BoneStats stats;
        stats.bone_name = bone.name;
        std::vector<double> lengths;
        for (const auto& frame : frames) {
            int a = frame.joint_index(bone.joint_a), b = frame.joint_index(bone.joint_b);
            if (a < 0 || b < 0) {
                ++stats.excluded_frames;
                continue;
            }
            lengths.push_back((frame.joints[a].position - frame.joints[b].position).norm());
        }
        if (lengths.empty())
            throw std::runtime_error("bone_length_stats: bone '" + bone.name + "' resolvable in no frame");
        double sum = std::accumulate(lengths.begin(), lengths.end(), 0.0);
        stats.mean = sum / static_cast<double>(lengths.size());
        double sq = 0;
        for (double l : lengths) sq += (l - stats.mean) * (l - stats.mean);
        stats.stddev = std::sqrt(sq / static_cast<double>(lengths.size()));
        stats.min = *std::min_element(lengths.begin(), lengths.end());
        stats.max = *std::max_element(lengths.begin(), lengths.end());
        out.push_back(stats);
    }
    return out;
}

void save_estimates_csv(const std::vector<JointEstimate>& estimates, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_estimates_csv: cannot open " + path);
    out.precision(17);
    out << "joint_name,x,y,z,residual_m,k,flags\n";
    for (const auto& est : estimates) {
        std::string flags;
        if (est.failed) {
            // keep the reason in the same cell; commas would break the row
            std::string reason = est.failure_reason;
            std::replace(reason.begin(), reason.end(), ',', ';');
            flags = "failed:" + reason;
        } else if (est.ridge_fallback) {
            flags = "ridge";
        }
        out << est.joint_name << "," << est.position.x() << "," << est.position.y() << ","
            << est.position.z() << "," << est.residual_rms << "," << est.anchor_count << "," << flags
            << "\n";
    }
}

std::vector<JointEstimate> load_estimates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_estimates_csv: cannot open " + path);
    std::vector<JointEstimate> estimates;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        JointEstimate est;
        std::getline(ls, est.joint_name, ',');
        std::getline(ls, cell, ',');
        est.position.x() = std::stod(cell);
        std::getline(ls, cell, ',');
        est.position.y() = std::stod(cell);
        std::getline(ls, cell, ',');
        est.position.z() = std::stod(cell);
        std::getline(ls, cell, ',');
        est.residual_rms = std::stod(cell);
        std::getline(ls, cell, ',');
        est.anchor_count = std::stoi(cell);
        std::getline(ls, cell, ',');
        if (cell.rfind("failed", 0) == 0) {
            est.failed = true;
            if (cell.size() > 7) est.failure_reason = cell.substr(7);
        }
        est.ridge_fallback = cell == "ridge";
        estimates.push_back(est);
    }
    return estimates;
}

void save_error_table_csv(const JointErrorTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_error_table_csv: cannot open " + path);
    out.precision(17);
    out << "joint_name,error_m\n";
    for (std::size_t i = 0; i < table.joint_names.size(); ++i)
        out << table.joint_names[i] << "," << table.errors_m[i] << "\n";
    out << "mean," << table.mean << "\n";
    out << "std," << table.stddev << "\n";
}

void save_bone_stats_csv(const std::vector<BoneStats>& stats, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_bone_stats_csv: cannot open " + path);
    out.precision(17);
    out << "bone_name,mean_m,std_m,min_m,max_m,excluded_frames\n";
    for (const auto& s : stats)
        out << s.bone_name << "," << s.mean << "," << s.stddev << "," << s.min << "," << s.max << ","
            << s.excluded_frames << "\n";
}

Skeleton estimates_to_skeleton(const std::vector<JointEstimate>& estimates, const std::vector<Bone>& bones) {
    Skeleton skel;
    for (const auto& est : estimates) {
        if (est.failed) continue;
        skel.joints.push_back({est.joint_name, est.position, std::nullopt});
    }
    skel.bones = bones;
    return skel;
}

}  // namespace geokp
