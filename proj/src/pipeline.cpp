#include "geokp/pipeline.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "geokp/distance_field.hpp"
#include "geokp/geodesics.hpp"
#include "geokp/mesh_io.hpp"
#include "geokp/mlp.hpp"
#include "geokp/proxy.hpp"
#include "geokp/solver.hpp"

namespace geokp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_tag(int f) {
    std::ostringstream os;
    os.width(3);
    os.fill('0');
    os << f;
    return os.str();
}

std::vector<RiggedModel> resolve_frames(const PipelineConfig& config) {
    std::vector<RiggedModel> frames;
    if (!config.frames.empty()) {
        for (const auto& input : config.frames) {
            RiggedModel model;
            model.mesh = load_mesh(input.mesh_path);
            model.skeleton = load_skeleton(input.skeleton_path);
            frames.push_back(std::move(model));
        }
    } else if (config.model.rfind("builtin:quadruped", 0) == 0) {
        std::string rest = config.model.substr(std::string("builtin:quadruped").size());
        if (rest.empty()) {
            frames.push_back(build_quadruped());
        } else if (rest.rfind("-walk:", 0) == 0) {
            frames = walking_frames(std::stoi(rest.substr(6)));
        } else if (rest.rfind("-rigid:", 0) == 0) {
            frames = rigid_motion_frames(std::stoi(rest.substr(7)));
        } else {
            throw std::runtime_error("unknown builtin model: " + config.model);
        }
    } else {
        RiggedModel model;
        model.mesh = load_mesh(config.model);
        model.skeleton = load_skeleton(config.skeleton_path);
        frames.push_back(std::move(model));
    }
    return frames;
}

CameraRig resolve_rig(const PipelineConfig& config, const std::vector<RiggedModel>& frames) {
    if (config.rig_path) return load_rig(*config.rig_path);
    // default: 4 cameras ringing the subject's bounding-box center
    Vec3 lo = Vec3::Constant(1e300), hi = -lo;
    for (const auto& frame : frames)
        for (const auto& v : frame.mesh.vertices) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
    Vec3 center = 0.5 * (lo + hi);
    double extent = (hi - lo).norm();
    return ring_rig(center, 1.8 * extent, 0.35 * extent, 4, 220, 180, 55.0, 45.0, 6.0 * extent);
}

// bounded deterministic frame parallelism: results land in per-frame files
void parallel_frames(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 1) {
        for (int f = 0; f < count; ++f) body(f);
        return;
    }
    std::vector<std::future<void>> running;
    for (int f = 0; f < count; ++f) {
        running.push_back(std::async(std::launch::async, body, f));
        if (static_cast<int>(running.size()) >= workers) {
            running.front().get();
            running.erase(running.begin());
        }
    }
    for (auto& fut : running) fut.get();
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    json doc;
    in >> doc;
    PipelineConfig config;
    config.model = doc.value("model", config.model);
    config.skeleton_path = doc.value("skeleton", config.skeleton_path);
    if (doc.contains("frames")) {
        for (const auto& f : doc.at("frames"))
            config.frames.push_back({f.at("mesh").get<std::string>(), f.at("skeleton").get<std::string>()});
    }
    if (doc.contains("rig")) config.rig_path = doc.at("rig").get<std::string>();
    if (doc.contains("augment")) {
        const auto& a = doc.at("augment");
        if (a.contains("scale")) {
            config.scale = Vec3(a.at("scale").at(0).get<double>(), a.at("scale").at(1).get<double>(),
                                a.at("scale").at(2).get<double>());
        }
        config.deform_amplitude_m = a.value("amplitude_m", 0.0);
        config.deform_kernels = a.value("kernels", 0);
        config.deform_radius_m = a.value("radius_m", 0.1);
    }
    config.downsample_n = doc.value("downsample_n", config.downsample_n);
    config.area_k = doc.value("k", doc.value("area_k", config.area_k));
    config.noise_sigma_m = doc.value("sigma_m", doc.value("noise_sigma_m", config.noise_sigma_m));
    config.seed = doc.value("seed", config.seed);
    config.workers = doc.value("workers", config.workers);
    config.out_dir = doc.value("out", config.out_dir);
    if (config.downsample_n < static_cast<std::size_t>(config.area_k) || config.area_k < 4)
        throw std::runtime_error("load_config: need downsample_n >= k >= 4");
    return config;
}

int frame_count(const std::string& dataset_dir) {
    std::ifstream in(dataset_dir + "/manifest.json");
    if (!in) throw std::runtime_error("dataset manifest not found in " + dataset_dir);
    json doc;
    in >> doc;
    return doc.at("frames").get<int>();
}

int cmd_gen(const PipelineConfig& config) {
    auto frames = resolve_frames(config);
    CameraRig rig = resolve_rig(config, frames);
    fs::create_directories(config.out_dir);

    std::atomic<int> failures{0};
    parallel_frames(static_cast<int>(frames.size()), config.workers, [&](int f) {
        try {
            RiggedModel frame = frames[f];
            auto [scaled_mesh, scaled_skel] = apply_rigid_scale(frame.mesh, frame.skeleton, config.scale);
            AugmentationSpec spec;
            spec.deformation_seed = config.seed + static_cast<uint64_t>(f);
            spec.deformation_amplitude_m = config.deform_amplitude_m;
            spec.kernel_count = config.deform_kernels;
            spec.kernel_radius_m = config.deform_radius_m;
            int flipped = 0;
            Mesh mesh = apply_nonrigid_deformation(scaled_mesh, spec, &flipped);
            if (flipped > 0)
                std::cerr << "gen: frame " << f << ": " << flipped << " face normals flipped by deformation\n";

            ScanCloud cloud = raycast_scan(mesh, rig);
            if (cloud.size() > 0) cloud = downsample_fps(cloud, config.downsample_n);

            // place the scanned frame into the world; the rig rides along, so
            // rigid motion of the scene transports annotations unchanged
            const Eigen::Isometry3d& xf = frames[f].world_from_local;
            if (!xf.isApprox(Eigen::Isometry3d::Identity())) {
                for (auto& p : cloud.points) p = xf * p;
                for (auto& v : mesh.vertices) v = xf * v;
                for (auto& j : scaled_skel.joints) j.position = xf * j.position;
            }

            std::string tag = frame_tag(f);
            save_cloud_ply(cloud, config.out_dir + "/cloud_" + tag + ".ply");
            save_ply(mesh, config.out_dir + "/mesh_" + tag + ".ply");
            save_skeleton(scaled_skel, config.out_dir + "/skeleton_" + tag + ".json");
            if (cloud.size() == 0) std::cerr << "gen: frame " << f << ": no ray hits\n";
        } catch (const std::exception& e) {
            std::cerr << "gen: frame " << f << " failed: " << e.what() << "\n";
            ++failures;
        }
    });

    save_rig(rig, config.out_dir + "/rig.json");
    json manifest;
    manifest["frames"] = frames.size();
    manifest["seed"] = config.seed;
    manifest["downsample_n"] = config.downsample_n;
    manifest["model"] = config.model;
    std::ofstream out(config.out_dir + "/manifest.json");
    out << manifest.dump(2) << "\n";
    return failures.load() == 0 ? 0 : 1;
}

int cmd_distfield(const PipelineConfig& config, const std::string& dataset_dir) {
    int count = frame_count(dataset_dir);
    std::atomic<int> failures{0};
    parallel_frames(count, config.workers, [&](int f) {
        std::string tag = frame_tag(f);
        try {
            Mesh mesh = load_mesh(dataset_dir + "/mesh_" + tag + ".ply");
            Skeleton skel = load_skeleton(dataset_dir + "/skeleton_" + tag + ".json");
            ScanCloud cloud = load_cloud_ply(dataset_dir + "/cloud_" + tag + ".ply");
            for (int face : cloud.hit_face)
                if (face < 0 || face >= static_cast<int>(mesh.faces.size()))
                    throw std::runtime_error("cloud references a face outside the frame mesh");

            DistanceField euclid;
            DistanceField manifold;
            if (cloud.size() > 0) {
                euclid = euclidean_field(cloud, skel);
                LaplaceOperator op = build_laplacian(mesh);
                HeatGeodesicSolver solver(mesh, op);
                TriangleBvh bvh(mesh);
                std::vector<GeodesicField> fields;
                std::vector<std::string> names;
                for (const auto& joint : skel.joints) {
                    JointSource src = joint_surface_source(mesh, bvh, joint.position);
                    GeodesicField field = solver.solve(src.weights);
                    field.offset = src.offset;
                    field.source_name = joint.name;
                    fields.push_back(std::move(field));
                    names.push_back(joint.name);
                }
                manifold = manifold_field(cloud, mesh, fields, names);
            } else {
                std::cerr << "distfield: frame " << f << ": empty cloud, writing empty fields\n";
                euclid.kind = FieldKind::euclidean;
                manifold.kind = FieldKind::manifold;
                for (const auto& joint : skel.joints) {
                    euclid.joint_names.push_back(joint.name);
                    manifold.joint_names.push_back(joint.name);
                }
                euclid.values.resize(0, static_cast<Eigen::Index>(skel.joints.size()));
                manifold.values.resize(0, static_cast<Eigen::Index>(skel.joints.size()));
            }
            int replaced = 0;
            DistanceField dmax = dmax_field(manifold, euclid, &replaced);
            if (replaced > 0)
                std::cerr << "distfield: frame " << f << ": " << replaced
                          << " infinite manifold entries fell back to Euclidean\n";
            DistanceField log = log_target(dmax);
            write_field(euclid, dataset_dir + "/field_euclidean_" + tag + ".dfld");
            write_field(manifold, dataset_dir + "/field_manifold_" + tag + ".dfld");
            write_field(dmax, dataset_dir + "/field_dmax_" + tag + ".dfld");
            write_field(log, dataset_dir + "/field_log_" + tag + ".dfld");
        } catch (const std::exception& e) {
            std::cerr << "distfield: frame " << f << " failed: " << e.what() << "\n";
            ++failures;
        }
    });
    return failures.load() == 0 ? 0 : 1;
}

int cmd_solve(const PipelineConfig& config, const std::string& dataset_dir, const std::string& source) {
    int count = frame_count(dataset_dir);
    fs::create_directories(config.out_dir);
    std::atomic<int> failures{0};
    parallel_frames(count, config.workers, [&](int f) {
        std::string tag = frame_tag(f);
        try {
            ScanCloud cloud = load_cloud_ply(dataset_dir + "/cloud_" + tag + ".ply");
            DistanceField field;
            if (source == "oracle") {
                field = read_field(dataset_dir + "/field_dmax_" + tag + ".dfld");
            } else if (source == "noise") {
                field = read_field(dataset_dir + "/field_dmax_" + tag + ".dfld");
                field = corrupt_field(field, config.noise_sigma_m, config.seed + static_cast<uint64_t>(f));
            } else {
                field = read_field(source);
                if (field.kind == FieldKind::log_target) field = invert_target(field);
            }
            if (field.n() != cloud.size())
                throw std::runtime_error("field has " + std::to_string(field.n()) + " rows, cloud has " +
                                         std::to_string(cloud.size()) + " points");
            auto estimates = solve_all_joints(cloud, field, config.area_k);
            save_estimates_csv(estimates, config.out_dir + "/estimates_" + tag + ".csv");
            double worst = 0;
            for (const auto& est : estimates)
                if (!est.failed) worst = std::max(worst, est.residual_rms);
            std::cerr << "solve: frame " << f << ": max residual " << worst << " m\n";
        } catch (const std::exception& e) {
            std::cerr << "solve: frame " << f << " failed: " << e.what() << "\n";
            ++failures;
        }
    });
    return failures.load() == 0 ? 0 : 1;
}

int cmd_eval(const std::string& dataset_dir, const std::string& estimates_dir) {
    int count = frame_count(dataset_dir);
    std::vector<Skeleton> truth_frames, estimate_frames;
    double error_sum = 0, error_sq = 0;
    std::size_t error_count = 0;
    for (int f = 0; f < count; ++f) {
        std::string tag = frame_tag(f);
        Skeleton truth = load_skeleton(dataset_dir + "/skeleton_" + tag + ".json");
        auto estimates = load_estimates_csv(estimates_dir + "/estimates_" + tag + ".csv");
        JointErrorTable table = joint_errors(estimates, truth);
        save_error_table_csv(table, estimates_dir + "/joint_errors_" + tag + ".csv");
        for (double e : table.errors_m) {
            error_sum += e;
            error_sq += e * e;
            ++error_count;
        }
        truth_frames.push_back(truth);
        estimate_frames.push_back(estimates_to_skeleton(estimates, truth.bones));
    }
    if (error_count == 0) throw std::runtime_error("cmd_eval: no joint estimates found");

    auto truth_stats = bone_length_stats(truth_frames, truth_frames.front().bones);
    auto est_stats = bone_length_stats(estimate_frames, truth_frames.front().bones);
    save_bone_stats_csv(est_stats, estimates_dir + "/bone_stats.csv");
    save_bone_stats_csv(truth_stats, estimates_dir + "/bone_stats_truth.csv");

    double mean = error_sum / static_cast<double>(error_count);
    double stddev = std::sqrt(error_sq / static_cast<double>(error_count) - mean * mean);
    json summary;
    summary["frames"] = count;
    summary["joint_error_mean_m"] = mean;
    summary["joint_error_std_m"] = stddev;
    std::ofstream out(estimates_dir + "/summary.json");
    out << summary.dump(2) << "\n";
    std::cerr << "eval: mean joint error " << mean << " m over " << error_count << " estimates\n";
    return 0;
}

int cmd_hip(const std::string& dataset_csv, const std::string& out_dir, uint64_t seed, int workers) {
    Dataset data = load_dataset_csv(dataset_csv);
    TrainConfig config;
    config.seed = seed;
    LooResult result = leave_one_out(data, config, workers);
    fs::create_directories(out_dir);
    save_loo_csv(data, result, out_dir + "/hip_predictions.csv");
    // also fit on the full set so downstream callers get a usable model
    TrainResult fit = train_adam(MlpModel::make(static_cast<int>(data.features.cols()), seed), data, config);
    save_model(fit.model, out_dir + "/hip_model.txt");
    std::cerr << "hip: rmse " << result.rmse;
    if (result.r2_defined)
        std::cerr << ", r2 " << result.r2 << "\n";
    else
        std::cerr << ", r2 undefined (constant targets)\n";
    return 0;
}

}  // namespace geokp
